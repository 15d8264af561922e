//! End-to-end Monte Carlo link simulation.
//!
//! Bits go through the modem, pick up additive white Gaussian noise in the
//! electrical domain, and come back through the matching detector; the error
//! count over a seeded bit budget gives a BER estimate with a binomial
//! confidence interval.
//!
//! The noise variance is derived from the requested electrical SNR and each
//! scheme's decision-scale amplitude (see [`reference_level`]): with standard
//! deviation ref / (2 sqrt SNR) per sample, an OOK run realizes exactly the
//! analytic BER Q(sqrt SNR), which acceptance tests exploit as an oracle.
//!
//! Reproducibility contract: every block of bits draws its data and its
//! noise from independent ChaCha8 streams whose seeds come from a SplitMix64
//! expansion of the run seed (stream 2b for block b's data, 2b+1 for its
//! noise). Results are therefore bit-identical across runs, platforms, and
//! any parallel execution order of sweep points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::channel::{ber_ook, link_snr};
use crate::error::{Error, Result};
use crate::geometry::LinkGeometry;
use crate::modem::{self, SchemeConfig, NOMINAL_MEAN_POWER};
use crate::scenario::Scenario;

/// Smallest statistically meaningful bit budget.
pub const MIN_BIT_BUDGET: u64 = 1000;

/// Bits simulated per encode/decode block. Bounds peak memory while keeping
/// the FFT and RNG batch sizes efficient.
const BLOCK_BITS: u64 = 8192;

/// One Monte Carlo BER experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkRun {
    pub scheme: SchemeConfig,
    /// Electrical SNR in dB (gamma^2 P_rec / sigma^2 convention).
    pub snr_db: f64,
    pub bit_budget: u64,
    pub seed: u64,
}

/// A BER measurement with its binomial confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerEstimate {
    pub ber: f64,
    pub errors: u64,
    pub bits: u64,
    /// 1.96 * sqrt(p (1-p) / n), the 95% normal-approximation halfwidth.
    pub ci95_halfwidth: f64,
    /// True when the link had no signal at all (out of FOV / back-facing);
    /// the estimate is then the synthesized coin-flip value 0.5.
    pub zero_gain: bool,
}

impl BerEstimate {
    fn from_counts(errors: u64, bits: u64) -> BerEstimate {
        let p = errors as f64 / bits as f64;
        BerEstimate {
            ber: p,
            errors,
            bits,
            ci95_halfwidth: 1.96 * (p * (1.0 - p) / bits as f64).sqrt(),
            zero_gain: false,
        }
    }

    /// The no-signal estimate: hard decisions on pure noise are coin flips.
    fn zero_gain(bits: u64) -> BerEstimate {
        BerEstimate {
            ber: 0.5,
            errors: bits / 2,
            bits,
            ci95_halfwidth: 0.0,
            zero_gain: true,
        }
    }
}

/// Decision-scale amplitude the SNR definition is referenced to: the span
/// between the extreme noiseless sample levels a detector must separate.
pub fn reference_level(scheme: &SchemeConfig) -> f64 {
    match *scheme {
        SchemeConfig::Ook { .. } | SchemeConfig::Pwm { .. } | SchemeConfig::Vppm { .. } => 1.0,
        SchemeConfig::Ppm { slots_per_symbol } => slots_per_symbol as f64 * NOMINAL_MEAN_POWER,
        SchemeConfig::Oppm {
            chips_per_symbol,
            pulse_width_chips,
        } => chips_per_symbol as f64 / pulse_width_chips as f64 * NOMINAL_MEAN_POWER,
        // For multicarrier schemes the decision scale is the RMS swing of
        // the time signal after the config-derived amplitude scaling.
        SchemeConfig::DcoOfdm {
            subcarriers,
            bias_db,
            ..
        } => {
            let sigma = (2.0 * (subcarriers as f64 / 2.0 - 1.0)).sqrt() / subcarriers as f64;
            let bias = (10f64.powf(bias_db / 10.0) - 1.0).sqrt() * sigma;
            NOMINAL_MEAN_POWER / bias * sigma
        }
        SchemeConfig::AcoOfdm { subcarriers, .. } => {
            let sigma = (2.0 * (subcarriers as f64 / 4.0)).sqrt() / subcarriers as f64;
            let scale = NOMINAL_MEAN_POWER * (2.0 * std::f64::consts::PI).sqrt() / sigma;
            // Clipping halves the variance of the transmitted signal.
            scale * sigma / std::f64::consts::SQRT_2
        }
    }
}

/// SplitMix64 expansion: statistically independent 64-bit sub-seed for
/// `stream` under `master`. Fixed for all time; changing it changes every
/// seeded result in the tree.
pub fn split_seed(master: u64, stream: u64) -> u64 {
    let mut z = master
        .wrapping_add(stream.wrapping_mul(0x9E3779B97F4A7C15))
        .wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Runs one seeded Monte Carlo BER experiment.
pub fn run_link(run: &LinkRun) -> Result<BerEstimate> {
    run.scheme.validate()?;
    if run.bit_budget < MIN_BIT_BUDGET {
        return Err(Error::InvalidRun(format!(
            "bit_budget {} below the minimum {MIN_BIT_BUDGET}",
            run.bit_budget
        )));
    }
    if !run.snr_db.is_finite() {
        return Err(Error::InvalidRun(format!(
            "snr_db {} must be finite",
            run.snr_db
        )));
    }
    let snr_linear = 10f64.powf(run.snr_db / 10.0);
    let sigma = reference_level(&run.scheme) / (2.0 * snr_linear.sqrt());
    let noise = Normal::new(0.0, sigma).expect("finite positive sigma");

    let mut errors = 0u64;
    let mut done = 0u64;
    let mut block = 0u64;
    let mut bits = Vec::new();
    while done < run.bit_budget {
        let n = BLOCK_BITS.min(run.bit_budget - done) as usize;
        let mut bit_rng = ChaCha8Rng::seed_from_u64(split_seed(run.seed, 2 * block));
        bits.clear();
        bits.extend((0..n).map(|_| u8::from(bit_rng.random::<bool>())));

        let mut waveform = modem::encode(&bits, &run.scheme)?;
        let mut noise_rng = ChaCha8Rng::seed_from_u64(split_seed(run.seed, 2 * block + 1));
        for sample in &mut waveform.samples {
            *sample += noise.sample(&mut noise_rng);
        }
        let decoded = modem::decode(&waveform, &run.scheme)?;
        // Symbol padding can make the decoded block longer; only budget bits
        // count.
        errors += bits
            .iter()
            .zip(&decoded)
            .filter(|(a, b)| a != b)
            .count() as u64;

        done += n as u64;
        block += 1;
    }
    Ok(BerEstimate::from_counts(errors, run.bit_budget))
}

/// One [`run_link`] per SNR point, with per-point sub-seeds split off the
/// master seed; output order matches input order.
pub fn ber_sweep(
    scheme: &SchemeConfig,
    snr_db_points: &[f64],
    bit_budget: u64,
    seed: u64,
) -> Result<Vec<(f64, BerEstimate)>> {
    snr_db_points
        .iter()
        .enumerate()
        .map(|(i, &snr_db)| {
            let run = LinkRun {
                scheme: scheme.clone(),
                snr_db,
                bit_budget,
                seed: split_seed(seed, i as u64),
            };
            Ok((snr_db, run_link(&run)?))
        })
        .collect()
}

/// BER of the scenario's primary link at irradiance angle `theta_deg`,
/// holding the link's incidence angle and distance fixed. Zero channel gain
/// (out of FOV, back-facing) yields the flagged coin-flip estimate instead
/// of an error.
pub fn angle_ber(
    scenario: &Scenario,
    theta_deg: f64,
    scheme: &SchemeConfig,
    bit_budget: u64,
    seed: u64,
) -> Result<BerEstimate> {
    let (lp, rx, link) = scenario.primary_link()?;
    let geom = LinkGeometry {
        theta_deg,
        phi_deg: link.phi_deg,
        distance_m: link.distance_m,
    };
    let report = link_snr(lp, rx, &geom, &scenario.noise)?;
    if report.channel_gain <= 0.0 || report.snr_linear <= 0.0 {
        if bit_budget < MIN_BIT_BUDGET {
            return Err(Error::InvalidRun(format!(
                "bit_budget {bit_budget} below the minimum {MIN_BIT_BUDGET}"
            )));
        }
        return Ok(BerEstimate::zero_gain(bit_budget));
    }
    run_link(&LinkRun {
        scheme: scheme.clone(),
        snr_db: report.snr_db,
        bit_budget,
        seed,
    })
}

/// Analytic BER for schemes with a closed form; currently OOK only.
pub fn analytic_ber(scheme: &SchemeConfig, snr_linear: f64) -> Option<f64> {
    match scheme {
        SchemeConfig::Ook { .. } => Some(ber_ook(snr_linear)),
        _ => None,
    }
}
