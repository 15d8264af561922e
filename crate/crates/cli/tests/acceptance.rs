//! Acceptance gate: eight end-to-end criteria, one test each, every test
//! printing a single PASS line (run with `--nocapture` to see them) and
//! enforcing its own runtime budget.

use std::process::Command;
use std::time::{Duration, Instant};

use lifisim_core::channel::{
    ber_ook, calibrate_to_anchor, lambertian_order, link_snr, ook_snr_for_ber,
};
use lifisim_core::geometry::LinkGeometry;
use lifisim_core::linksim::{run_link, LinkRun};
use lifisim_core::modem::ofdm::{
    aco_time_frames, error_vector_magnitude, recover_aco_symbols, reference_aco_symbols,
};
use lifisim_core::modem::{self, scheme_metrics, SchemeConfig};
use lifisim_core::planner::{assign_users, optimize_tilts};
use lifisim_core::scenario::Scenario;

fn budget(start: Instant, limit: Duration, what: &str) {
    let took = start.elapsed();
    assert!(took <= limit, "{what} took {took:?}, budget {limit:?}");
}

fn seeded_bits(len: usize, mut state: u64) -> Vec<u8> {
    (0..len)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 40) as u8 & 1
        })
        .collect()
}

#[test]
fn criterion_1_survey_anchor_and_trend() {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_lifisim"))
        .arg("table3")
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta_deg,snr_db"));
    let rows: Vec<(f64, String)> = lines
        .map(|l| {
            let (theta, snr) = l.split_once(',').unwrap();
            (theta.parse().unwrap(), snr.to_string())
        })
        .collect();
    assert_eq!(rows[0].0, 65.0);
    assert_eq!(rows[0].1, "128.000", "anchor must print exactly");
    let snrs: Vec<f64> = rows.iter().map(|(_, s)| s.parse().unwrap()).collect();
    for pair in snrs.windows(2) {
        assert!(pair[0] > pair[1], "survey must strictly decrease: {snrs:?}");
    }
    budget(start, Duration::from_secs(1), "criterion 1");
    println!("PASS criterion 1: survey anchored at 128.000 dB and strictly decreasing");
}

#[test]
fn criterion_2_seventy_degree_ber_threshold() {
    let start = Instant::now();
    // Pin the 70 degree link exactly at the OOK 1e-5 operating point, then
    // the smaller angles must clear the threshold and the larger must miss.
    let mut sc = Scenario::builtin_default();
    let target_db = 10.0 * ook_snr_for_ber(1e-5).unwrap().log10();
    sc.noise = calibrate_to_anchor(&sc, 70.0, 45.0, target_db).unwrap();
    let (lp, rx, link) = sc.primary_link().unwrap();

    let ber_at = |theta_deg: f64| {
        let geom = LinkGeometry { theta_deg, ..link };
        ber_ook(link_snr(lp, rx, &geom, &sc.noise).unwrap().snr_linear)
    };
    for theta in [65.0, 68.0] {
        let ber = ber_at(theta);
        assert!(ber <= 1e-5, "theta {theta}: {ber}");
    }
    for theta in [75.0, 78.0] {
        let ber = ber_at(theta);
        assert!(ber > 1e-5, "theta {theta}: {ber}");
    }
    budget(start, Duration::from_secs(1), "criterion 2");
    println!("PASS criterion 2: BER crosses 1e-5 exactly at the 70 degree pivot");
}

#[test]
fn criterion_3_monte_carlo_vs_analytic() {
    let start = Instant::now();
    let bits = 2_000_000u64;
    for &snr_db in &[8.0, 10.0, 12.0] {
        let est = run_link(&LinkRun {
            scheme: SchemeConfig::Ook { dimming: 0.5 },
            snr_db,
            bit_budget: bits,
            seed: 20260814,
        })
        .unwrap();
        let p = ber_ook(10f64.powf(snr_db / 10.0));
        let sigma = (p * (1.0 - p) / bits as f64).sqrt();
        assert!(
            (est.ber - p).abs() < 3.0 * sigma,
            "{snr_db} dB: simulated {} vs Q {} (3 sigma {})",
            est.ber,
            p,
            3.0 * sigma
        );
    }
    budget(start, Duration::from_secs(60), "criterion 3");
    println!("PASS criterion 3: OOK Monte Carlo within 3 sigma of Q(sqrt(SNR)) at 8/10/12 dB");
}

#[test]
fn criterion_4_roundtrips_and_intensity_constraints() {
    let start = Instant::now();
    let schemes = [
        "ook", "pwm", "ppm4", "vppm", "oppm8,4", "dco-ofdm", "aco-ofdm",
    ];
    let bits = seeded_bits(10_000, 0x1F1F);
    for name in schemes {
        let config = SchemeConfig::parse_name(name).unwrap();
        let wf = modem::encode(&bits, &config).unwrap();
        assert!(
            wf.samples.iter().all(|&s| s.is_finite() && s >= 0.0),
            "{name}: intensity must be non-negative"
        );
        let decoded = modem::decode(&wf, &config).unwrap();
        assert_eq!(&decoded[..bits.len()], &bits[..], "{name} round trip");
    }

    // Dimming fidelity: the OOK/PWM compensation design holds the mean at
    // the target for payloads whose ones and zeros balance; VPPM is data
    // independent. A balanced payload plus the one-slot rounding quantum is
    // therefore the exact contract.
    let mut balanced = vec![0u8; 5_000];
    balanced.extend(vec![1u8; 5_000]);
    let noise = seeded_bits(balanced.len(), 0xD1D1);
    for i in (1..balanced.len()).rev() {
        let j = (noise[i] as usize * 131 + i * 17 + 3) % (i + 1);
        balanced.swap(i, j);
    }
    for dimming in [0.3, 0.5, 0.7] {
        for config in [
            SchemeConfig::Ook { dimming },
            SchemeConfig::Pwm { dimming, width_delta: 0.1 },
            SchemeConfig::Vppm { dimming },
        ] {
            let wf = modem::encode(&balanced, &config).unwrap();
            let quantum = 1.0 / wf.samples.len() as f64 * wf.samples_per_slot as f64;
            assert!(
                (wf.mean() - dimming).abs() <= quantum + 1e-12,
                "{} at dimming {dimming}: mean {}",
                config.name(),
                wf.mean()
            );
        }
    }
    budget(start, Duration::from_secs(30), "criterion 4");
    println!("PASS criterion 4: seven schemes round-trip 10^4 bits; waveforms stay non-negative and on the dimming target");
}

#[test]
fn criterion_5_aco_clipping_property() {
    let start = Instant::now();
    for &n in &[16usize, 64] {
        for &qam in &[4usize, 16] {
            let qam_bits = (qam as f64).log2() as usize;
            let bits = seeded_bits(6 * (n / 4) * qam_bits, 0xAC0);
            for frame in aco_time_frames(&bits, n, qam) {
                for t in 0..n / 2 {
                    assert!(
                        (frame[t] + frame[t + n / 2]).abs() < 1e-9,
                        "antisymmetry broken at N={n} M={qam} t={t}"
                    );
                }
            }
            let config = SchemeConfig::AcoOfdm { subcarriers: n, qam_order: qam };
            let wf = modem::encode(&bits, &config).unwrap();
            let recovered = recover_aco_symbols(&wf.samples, n, qam).unwrap();
            let reference = reference_aco_symbols(&bits, n, qam);
            let evm = error_vector_magnitude(&reference, &recovered);
            assert!(evm < 1e-9, "N={n} M={qam}: EVM {evm}");
        }
    }
    budget(start, Duration::from_secs(5), "criterion 5");
    println!("PASS criterion 5: ACO antisymmetry to 1e-9 and post-clip EVM < 1e-9 for N in {{16,64}}, 4/16-QAM");
}

#[test]
fn criterion_6_lambertian_power_conservation() {
    let start = Instant::now();
    for &semi in &[30.0, 45.0, 60.0] {
        let m = lambertian_order(semi).unwrap();
        let p_t = 1.0;
        // Composite Simpson over the polar angle; the azimuth integral is
        // the closed 2 pi factor.
        let intensity = |theta: f64| {
            p_t * (m + 1.0) / (2.0 * std::f64::consts::PI) * theta.cos().powf(m)
        };
        let f = |theta: f64| intensity(theta) * 2.0 * std::f64::consts::PI * theta.sin();
        let steps = 10_000;
        let h = std::f64::consts::FRAC_PI_2 / steps as f64;
        let mut sum = f(0.0) + f(std::f64::consts::FRAC_PI_2);
        for i in 1..steps {
            sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        let integral = sum * h / 3.0;
        assert!(
            (integral - p_t).abs() / p_t < 1e-3,
            "semi {semi}: hemisphere integral {integral}"
        );
    }
    budget(start, Duration::from_secs(5), "criterion 6");
    println!("PASS criterion 6: hemispherical quadrature recovers P_t within 1e-3 at 30/45/60 degree semi-angles");
}

#[test]
fn criterion_7_efficiency_orderings() {
    let start = Instant::now();
    // OOK rate factor peaks at 50% dimming.
    let rf = |d: f64| {
        scheme_metrics(&SchemeConfig::Ook { dimming: d })
            .unwrap()
            .rate_factor
    };
    let peak = rf(0.5);
    for i in 1..20 {
        let d = i as f64 / 20.0;
        assert!(rf(d) <= peak + 1e-12, "rate factor at {d} beats 0.5");
    }

    // PPM trades duty for peak power: below OOK's 50% duty from L = 4 up.
    let ook_duty = scheme_metrics(&SchemeConfig::Ook { dimming: 0.5 })
        .unwrap()
        .duty_cycle;
    for exp in 2..=6 {
        let duty = scheme_metrics(&SchemeConfig::Ppm { slots_per_symbol: 1 << exp })
            .unwrap()
            .duty_cycle;
        assert!(duty < ook_duty, "L={}: duty {duty}", 1 << exp);
    }

    // OPPM's position alphabet beats PPM at equal duty and symbol duration:
    // log2(n - w + 1) >= log2(n / w) for every valid width.
    for n in 2usize..=64 {
        for w in 1..n {
            let oppm_bits = ((n - w + 1) as f64).log2();
            let ppm_bits = (n as f64 / w as f64).log2();
            assert!(
                oppm_bits >= ppm_bits - 1e-12,
                "n={n} w={w}: {oppm_bits} < {ppm_bits}"
            );
        }
    }
    budget(start, Duration::from_secs(5), "criterion 7");
    println!("PASS criterion 7: rate factor peaks at 50% dimming, L-PPM duty < OOK duty for L >= 4, OPPM alphabet >= PPM at equal duty");
}

#[test]
fn criterion_8_planner_oracles() {
    let start = Instant::now();

    // Part 1: dedicated matching equals factorial brute force, 100 trials.
    let mut state = 0xACCE5517u64;
    let mut rand = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for trial in 0..100 {
        let users = 3 + trial % 4;
        let mut sc = Scenario::builtin_default();
        sc.strategy = lifisim_core::scenario::Strategy::Dedicated;
        sc.noise = lifisim_core::channel::NoiseModel::new(1e-13).unwrap();
        let panel = sc.panels[0].clone();
        let rx = sc.receivers[0].clone();
        sc.panels = (0..users)
            .map(|_| {
                let mut p = panel.clone();
                p.mobility = lifisim_core::channel::Mobility::Fixed;
                p.position.x = 0.5 + 4.0 * rand();
                p.position.y = 0.5 + 4.0 * rand();
                p
            })
            .collect();
        sc.receivers = (0..users)
            .map(|_| {
                let mut r = rx.clone();
                r.position.x = 0.5 + 4.0 * rand();
                r.position.y = 0.5 + 4.0 * rand();
                r
            })
            .collect();

        let pair_snr = |p: usize, r: usize| -> f64 {
            let lp = &sc.panels[p];
            let rx = &sc.receivers[r];
            let geom = lifisim_core::geometry::link_geometry(
                &lp.position,
                &lp.normal,
                &rx.position,
                &rx.normal,
            )
            .unwrap();
            link_snr(lp, rx, &geom, &sc.noise).unwrap().snr_linear
        };
        let assignment = assign_users(&sc).unwrap();
        let achieved = assignment
            .iter()
            .enumerate()
            .map(|(r, &p)| pair_snr(p, r))
            .fold(f64::INFINITY, f64::min);

        fn brute(r: usize, min: f64, snr: &[Vec<f64>], used: &mut [bool]) -> f64 {
            if r == snr.len() {
                return min;
            }
            let mut best = f64::NEG_INFINITY;
            for p in 0..snr[0].len() {
                if !used[p] {
                    used[p] = true;
                    best = best.max(brute(r + 1, min.min(snr[r][p]), snr, used));
                    used[p] = false;
                }
            }
            best
        }
        let matrix: Vec<Vec<f64>> = (0..users)
            .map(|r| (0..users).map(|p| pair_snr(p, r)).collect())
            .collect();
        let oracle = brute(0, f64::INFINITY, &matrix, &mut vec![false; users]);
        assert_eq!(achieved, oracle, "trial {trial}, {users} users");
    }

    // Part 2: a lone user pulls the moveable panel onto the aim-at-user
    // axis within one tilt step.
    let step = 1.0;
    for &(dx, dy) in &[(1.5, 0.0), (0.0, -1.8), (1.2, 1.2), (-2.0, 0.7)] {
        let mut sc = Scenario::builtin_default();
        sc.receivers[0].position.x = 2.5 + dx;
        sc.receivers[0].position.y = 2.5 + dy;
        let plan = optimize_tilts(&sc, step).unwrap();
        let radius = f64::hypot(dx, dy);
        let aim_tilt = (radius / 2.15).atan().to_degrees();
        let aim_az = (dy as f64).atan2(dx).to_degrees().rem_euclid(360.0);
        let (tilt, az) = plan.tilts[0];
        let az_dist = (az - aim_az).abs().min(360.0 - (az - aim_az).abs());
        assert!((tilt - aim_tilt).abs() <= step + 1e-9, "tilt {tilt} vs {aim_tilt}");
        assert!(az_dist <= step + 1e-9, "azimuth {az} vs {aim_az}");
    }

    // Part 3: aiming the hybrid scenario's moveable panel can only raise
    // the worst user's SNR above the frozen (as-configured) aim.
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../scenarios/hybrid_two_user.json"
    ))
    .unwrap();
    let sc = Scenario::from_json_str(&text).unwrap();
    let assignment = assign_users(&sc).unwrap();
    let frozen_min_db = assignment
        .iter()
        .enumerate()
        .map(|(r, &p)| {
            let lp = &sc.panels[p];
            let rx = &sc.receivers[r];
            let geom = lifisim_core::geometry::link_geometry(
                &lp.position,
                &lp.normal,
                &rx.position,
                &rx.normal,
            )
            .unwrap();
            link_snr(lp, rx, &geom, &sc.noise).unwrap().snr_db
        })
        .fold(f64::INFINITY, f64::min);
    let plan = optimize_tilts(&sc, 1.0).unwrap();
    assert!(
        plan.min_user_snr_db >= frozen_min_db - 1e-12,
        "tilted {} vs frozen {frozen_min_db}",
        plan.min_user_snr_db
    );

    budget(start, Duration::from_secs(60), "criterion 8");
    println!("PASS criterion 8: matching equals brute force (100 trials), tilt search aims at the user, hybrid planning never hurts the worst user");
}
