//! Placement planning: coverage grids, user-to-panel assignment, tilt
//! optimization for moveable panels, and overlap detection.
//!
//! Every cell of a coverage grid is served by its best single panel (the
//! per-cell maximum of the link SNR); overlapping service areas are counted,
//! never summed. Tilt optimization is a deterministic grid search over
//! (tilt, azimuth) with ties broken toward smaller tilt, then smaller
//! azimuth, so results are independent of evaluation order.

use crate::channel::{link_snr, LedPanel, Receiver, SnrReport};
use crate::error::{Error, Result};
use crate::geometry::{link_geometry, tilt_panel, Point3};
use crate::linksim::analytic_ber;
use crate::scenario::{Scenario, Strategy};

/// Grid spacing used for the overlap count inside [`optimize_tilts`].
pub const DEFAULT_OVERLAP_RESOLUTION_M: f64 = 0.25;
/// Service threshold used for the overlap count inside [`optimize_tilts`].
pub const DEFAULT_OVERLAP_THRESHOLD_DB: f64 = 10.0;

/// Receiver-plane SNR/BER lattice. Cell (ix, iy) is centered at
/// ((ix + 0.5) res, (iy + 0.5) res) on the receiver plane; `values` is
/// indexed `[iy][ix]`.
#[derive(Debug, Clone)]
pub struct CoverageGrid {
    pub resolution_m: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<Vec<SnrReport>>,
    /// Analytic BER per cell where the scheme has a closed form, else None.
    pub ber_values: Vec<Vec<Option<f64>>>,
    /// Index of the panel serving each cell (the per-cell SNR maximizer).
    pub serving_panel: Vec<Vec<usize>>,
}

impl CoverageGrid {
    pub fn cell_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            (ix as f64 + 0.5) * self.resolution_m,
            (iy as f64 + 0.5) * self.resolution_m,
        )
    }

    /// Largest finite cell SNR in dB; None when nothing is covered.
    pub fn max_snr_db(&self) -> Option<f64> {
        self.values
            .iter()
            .flatten()
            .map(|r| r.snr_db)
            .filter(|v| v.is_finite())
            .fold(None, |acc: Option<f64>, v| {
                Some(acc.map_or(v, |a| a.max(v)))
            })
    }
}

/// A finished plan: who talks to which panel, how panels are aimed, and what
/// every user gets.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanReport {
    /// assignment[r] is the panel index serving receiver r.
    pub assignment: Vec<usize>,
    /// tilts[p] is the (tilt_deg, azimuth_deg) applied to panel p; fixed
    /// panels stay at (0, 0).
    pub tilts: Vec<(f64, f64)>,
    pub per_user_snr_db: Vec<f64>,
    /// Analytic BER per user where the scheme has a closed form.
    pub per_user_ber: Vec<Option<f64>>,
    pub min_user_snr_db: f64,
    /// Cells served above [`DEFAULT_OVERLAP_THRESHOLD_DB`] by two or more
    /// panels after tilting, on the default overlap grid.
    pub overlap_cells: usize,
}

// -------------------------------------------------------------- coverage --

/// A receiver probe with receiver 0's optics, facing up at a grid cell.
fn probe_at(template: &Receiver, x: f64, y: f64, plane_z: f64) -> Receiver {
    let mut probe = template.clone();
    probe.position = Point3::new(x, y, plane_z);
    probe
}

/// SNR of one panel at one probe; zero-gain geometry reports are permitted.
fn panel_snr(lp: &LedPanel, probe: &Receiver, scenario: &Scenario) -> Result<SnrReport> {
    let geom = link_geometry(&lp.position, &lp.normal, &probe.position, &probe.normal)?;
    link_snr(lp, probe, &geom, &scenario.noise)
}

/// Evaluates the receiver-plane coverage lattice: per cell, the best single
/// panel's SNR, that panel's index, and the scheme's analytic BER (where one
/// exists). Resolution must lie in (0.01, 1] meters.
pub fn coverage_grid(scenario: &Scenario, resolution_m: f64) -> Result<CoverageGrid> {
    if !(resolution_m > 0.01 && resolution_m <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "resolution {resolution_m} m outside (0.01, 1]"
        )));
    }
    scenario.validate()?;
    let template = &scenario.receivers[0];
    let plane_z = scenario.room.receiver_plane_height;
    let nx = (scenario.room.width / resolution_m).ceil() as usize;
    let ny = (scenario.room.depth / resolution_m).ceil() as usize;

    let mut values = Vec::with_capacity(ny);
    let mut ber_values = Vec::with_capacity(ny);
    let mut serving = Vec::with_capacity(ny);
    for iy in 0..ny {
        let mut row = Vec::with_capacity(nx);
        let mut ber_row = Vec::with_capacity(nx);
        let mut serve_row = Vec::with_capacity(nx);
        for ix in 0..nx {
            let x = (ix as f64 + 0.5) * resolution_m;
            let y = (iy as f64 + 0.5) * resolution_m;
            let probe = probe_at(template, x, y, plane_z);
            let mut best = 0usize;
            let mut best_report: Option<SnrReport> = None;
            for (p, lp) in scenario.panels.iter().enumerate() {
                let report = panel_snr(lp, &probe, scenario)?;
                if best_report
                    .map(|b| report.snr_linear > b.snr_linear)
                    .unwrap_or(true)
                {
                    best = p;
                    best_report = Some(report);
                }
            }
            let report = best_report.expect("panels is non-empty");
            ber_row.push(analytic_ber(&scenario.scheme, report.snr_linear));
            row.push(report);
            serve_row.push(best);
        }
        values.push(row);
        ber_values.push(ber_row);
        serving.push(serve_row);
    }
    Ok(CoverageGrid {
        resolution_m,
        nx,
        ny,
        values,
        ber_values,
        serving_panel: serving,
    })
}

// ------------------------------------------------------------ assignment --

/// SNR matrix snr[r][p] of every receiver-panel pair under current aiming.
fn snr_matrix(scenario: &Scenario) -> Result<Vec<Vec<f64>>> {
    scenario
        .receivers
        .iter()
        .map(|rx| {
            scenario
                .panels
                .iter()
                .map(|lp| {
                    let geom =
                        link_geometry(&lp.position, &lp.normal, &rx.position, &rx.normal)?;
                    Ok(link_snr(lp, rx, &geom, &scenario.noise)?.snr_linear)
                })
                .collect()
        })
        .collect()
}

/// Exhaustive injective assignment maximizing the minimum per-user SNR.
/// Receivers choose panels in lexicographic order, and only strictly better
/// minima replace the incumbent, so the first-found optimum (smallest panel
/// indices) wins ties.
fn exhaustive_max_min(snr: &[Vec<f64>]) -> Vec<usize> {
    let receivers = snr.len();
    let panels = snr[0].len();
    let mut used = vec![false; panels];
    let mut current = vec![0usize; receivers];
    let mut best: Option<(f64, Vec<usize>)> = None;
    fn recurse(
        r: usize,
        min_so_far: f64,
        snr: &[Vec<f64>],
        used: &mut Vec<bool>,
        current: &mut Vec<usize>,
        best: &mut Option<(f64, Vec<usize>)>,
    ) {
        if r == snr.len() {
            if best.as_ref().map(|(m, _)| min_so_far > *m).unwrap_or(true) {
                *best = Some((min_so_far, current.clone()));
            }
            return;
        }
        for p in 0..used.len() {
            if used[p] {
                continue;
            }
            used[p] = true;
            current[r] = p;
            recurse(
                r + 1,
                min_so_far.min(snr[r][p]),
                snr,
                used,
                current,
                best,
            );
            used[p] = false;
        }
    }
    recurse(0, f64::INFINITY, snr, &mut used, &mut current, &mut best);
    best.expect("at least one assignment exists").1
}

/// Greedy pairing for large user counts: repeatedly commit the highest-SNR
/// unassigned (receiver, panel) pair. Ties resolve toward the smaller
/// receiver index, then the smaller panel index.
fn greedy_max_pairs(snr: &[Vec<f64>]) -> Vec<usize> {
    let receivers = snr.len();
    let panels = snr[0].len();
    let mut assignment = vec![usize::MAX; receivers];
    let mut panel_used = vec![false; panels];
    for _ in 0..receivers {
        let mut pick: Option<(f64, usize, usize)> = None;
        for r in 0..receivers {
            if assignment[r] != usize::MAX {
                continue;
            }
            for p in 0..panels {
                if panel_used[p] {
                    continue;
                }
                if pick.map(|(s, _, _)| snr[r][p] > s).unwrap_or(true) {
                    pick = Some((snr[r][p], r, p));
                }
            }
        }
        let (_, r, p) = pick.expect("unassigned pair remains");
        assignment[r] = p;
        panel_used[p] = true;
    }
    assignment
}

/// Each receiver independently takes its highest-SNR panel (panels may be
/// shared). Ties resolve toward the smaller panel index.
fn best_server(snr: &[Vec<f64>]) -> Vec<usize> {
    snr.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .fold((0usize, f64::NEG_INFINITY), |acc, (p, &s)| {
                    if s > acc.1 {
                        (p, s)
                    } else {
                        acc
                    }
                })
                .0
        })
        .collect()
}

/// Exhaustive matching is guaranteed only up to this many receivers; larger
/// problems use the greedy pairing.
pub const EXHAUSTIVE_ASSIGNMENT_LIMIT: usize = 6;

/// Maps every receiver to a serving panel according to the scenario's
/// strategy:
///
/// * FixedWide: everyone on panel 0 (the designated wide panel).
/// * Dedicated: one panel per user; max-min SNR matching, exhaustive up to
///   [`EXHAUSTIVE_ASSIGNMENT_LIMIT`] users, greedy beyond.
/// * Moveable/Hybrid: the same injective matching when there are enough
///   panels, otherwise each user's best server (panels shared).
pub fn assign_users(scenario: &Scenario) -> Result<Vec<usize>> {
    scenario.validate()?;
    let receivers = scenario.receivers.len();
    match scenario.strategy {
        Strategy::FixedWide => Ok(vec![0; receivers]),
        Strategy::Dedicated => {
            if scenario.panels.len() < receivers {
                return Err(Error::Infeasible(format!(
                    "dedicated strategy needs {} panels for {} receivers",
                    receivers, receivers
                )));
            }
            let snr = snr_matrix(scenario)?;
            if receivers <= EXHAUSTIVE_ASSIGNMENT_LIMIT {
                Ok(exhaustive_max_min(&snr))
            } else {
                Ok(greedy_max_pairs(&snr))
            }
        }
        Strategy::Moveable | Strategy::Hybrid => {
            let snr = snr_matrix(scenario)?;
            if scenario.panels.len() >= receivers {
                if receivers <= EXHAUSTIVE_ASSIGNMENT_LIMIT {
                    Ok(exhaustive_max_min(&snr))
                } else {
                    Ok(greedy_max_pairs(&snr))
                }
            } else {
                Ok(best_server(&snr))
            }
        }
    }
}

// ------------------------------------------------------------------ tilt --

/// The scenario with the given per-panel (tilt, azimuth) pairs applied.
pub fn tilted_scenario(scenario: &Scenario, tilts: &[(f64, f64)]) -> Result<Scenario> {
    let mut out = scenario.clone();
    for (panel, &(tilt, az)) in out.panels.iter_mut().zip(tilts) {
        if tilt != 0.0 || az != 0.0 {
            panel.normal = tilt_panel(tilt, az)?;
        }
    }
    Ok(out)
}

/// Minimum SNR (linear) this panel delivers to its assigned users with the
/// candidate normal applied.
fn min_assigned_snr(
    lp: &LedPanel,
    users: &[&Receiver],
    scenario: &Scenario,
) -> Result<f64> {
    let mut min = f64::INFINITY;
    for rx in users {
        let geom = link_geometry(&lp.position, &lp.normal, &rx.position, &rx.normal)?;
        min = min.min(link_snr(lp, rx, &geom, &scenario.noise)?.snr_linear);
    }
    Ok(min)
}

/// Aims every moveable panel at its assigned users by deterministic grid
/// search and reports the resulting per-user link quality.
///
/// The search scans tilt in {0, step, 2 step, ...} up to the panel's tilt
/// limit (outer, ascending) and azimuth in {0, step, ...} below 360 degrees
/// (inner, ascending), maximizing the minimum SNR over the panel's assigned
/// users; only strict improvements replace the incumbent, so ties keep the
/// smallest tilt, then the smallest azimuth. Panels with no assigned user
/// keep their configured aim.
pub fn optimize_tilts(scenario: &Scenario, tilt_step_deg: f64) -> Result<PlanReport> {
    if !(0.5..=5.0).contains(&tilt_step_deg) {
        return Err(Error::InvalidParameter(format!(
            "tilt_step {tilt_step_deg} deg outside [0.5, 5]"
        )));
    }
    if !matches!(scenario.strategy, Strategy::Moveable | Strategy::Hybrid) {
        return Err(Error::InvalidScenario(format!(
            "tilt optimization applies to moveable or hybrid strategies, not {:?}",
            scenario.strategy
        )));
    }
    if scenario.strategy == Strategy::Moveable
        && !scenario.panels.iter().any(|p| p.mobility.is_moveable())
    {
        return Err(Error::InvalidScenario(
            "moveable strategy with no moveable panel".into(),
        ));
    }
    let assignment = assign_users(scenario)?;
    let mut tilts = vec![(0.0, 0.0); scenario.panels.len()];
    let mut planned = scenario.clone();

    for (p, panel) in scenario.panels.iter().enumerate() {
        let max_tilt = match panel.mobility {
            crate::channel::Mobility::Moveable { max_tilt_deg } => max_tilt_deg,
            crate::channel::Mobility::Fixed => continue,
        };
        let users: Vec<&Receiver> = assignment
            .iter()
            .zip(&scenario.receivers)
            .filter(|(&a, _)| a == p)
            .map(|(_, rx)| rx)
            .collect();
        if users.is_empty() {
            continue;
        }
        let mut candidate = panel.clone();
        let mut best = (0.0, 0.0, f64::NEG_INFINITY);
        let mut tilt = 0.0;
        while tilt <= max_tilt + 1e-9 {
            let mut az = 0.0;
            while az < 360.0 - 1e-9 {
                candidate.normal = tilt_panel(tilt, az)?;
                let score = min_assigned_snr(&candidate, &users, scenario)?;
                if score > best.2 {
                    best = (tilt, az, score);
                }
                az += tilt_step_deg;
                // Tilt zero is azimuth-invariant; one sample suffices.
                if tilt == 0.0 {
                    break;
                }
            }
            tilt += tilt_step_deg;
        }
        tilts[p] = (best.0, best.1);
        planned.panels[p].normal = tilt_panel(best.0, best.1)?;
    }

    let mut per_user_snr_db = Vec::with_capacity(scenario.receivers.len());
    let mut per_user_ber = Vec::with_capacity(scenario.receivers.len());
    let mut min_snr_db = f64::INFINITY;
    for (r, rx) in planned.receivers.iter().enumerate() {
        let lp = &planned.panels[assignment[r]];
        let geom = link_geometry(&lp.position, &lp.normal, &rx.position, &rx.normal)?;
        let report = link_snr(lp, rx, &geom, &planned.noise)?;
        min_snr_db = min_snr_db.min(report.snr_db);
        per_user_ber.push(analytic_ber(&planned.scheme, report.snr_linear));
        per_user_snr_db.push(report.snr_db);
    }
    let overlap_cells = overlap_report(
        &planned,
        DEFAULT_OVERLAP_RESOLUTION_M,
        DEFAULT_OVERLAP_THRESHOLD_DB,
    )?;
    Ok(PlanReport {
        assignment,
        tilts,
        per_user_snr_db,
        per_user_ber,
        min_user_snr_db: min_snr_db,
        overlap_cells,
    })
}

// --------------------------------------------------------------- overlap --

/// Counts grid cells where at least two panels individually clear the SNR
/// threshold: the quantitative form of adjacent-coverage overlap.
pub fn overlap_report(
    scenario: &Scenario,
    resolution_m: f64,
    snr_threshold_db: f64,
) -> Result<usize> {
    if !(resolution_m > 0.01 && resolution_m <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "resolution {resolution_m} m outside (0.01, 1]"
        )));
    }
    scenario.validate()?;
    let template = &scenario.receivers[0];
    let plane_z = scenario.room.receiver_plane_height;
    let threshold = 10f64.powf(snr_threshold_db / 10.0);
    let nx = (scenario.room.width / resolution_m).ceil() as usize;
    let ny = (scenario.room.depth / resolution_m).ceil() as usize;
    let mut overlap = 0usize;
    for iy in 0..ny {
        for ix in 0..nx {
            let x = (ix as f64 + 0.5) * resolution_m;
            let y = (iy as f64 + 0.5) * resolution_m;
            let probe = probe_at(template, x, y, plane_z);
            let mut above = 0usize;
            for lp in &scenario.panels {
                if panel_snr(lp, &probe, scenario)?.snr_linear > threshold {
                    above += 1;
                    if above == 2 {
                        overlap += 1;
                        break;
                    }
                }
            }
        }
    }
    Ok(overlap)
}
