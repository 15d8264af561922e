//! Deterministic text output: fixed-precision number formatting, CSV
//! writers, and the PGM heatmap encoder.
//!
//! All numeric output is fixed-point with six significant digits and never
//! uses scientific notation, so repeated runs produce byte-identical,
//! diff-friendly files. Non-finite or unavailable values print as `NONE`.

use crate::linksim::BerEstimate;
use crate::planner::CoverageGrid;

/// Sentinel for values with no numeric representation (no signal, no
/// closed-form BER, -inf dB).
pub const NONE_SENTINEL: &str = "NONE";

/// Formats with six significant digits in fixed-point notation:
/// 128 -> "128.000", 0.5 -> "0.500000", 1e-5 -> "0.0000100000".
/// Magnitudes of 1e6 and above keep all integer digits.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return NONE_SENTINEL.into();
    }
    if x == 0.0 {
        return format!("{:.5}", 0.0);
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// An integer when the value is whole (grid angles, indices), else the
/// standard six-significant-digit form.
fn fmt_plain(x: f64) -> String {
    if x.is_finite() && x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        fmt_sig(x)
    }
}

/// CSV of an irradiance-angle SNR survey: `theta_deg,snr_db` rows.
pub fn table3_csv(rows: &[(f64, f64)]) -> String {
    let mut out = String::from("theta_deg,snr_db\n");
    for &(theta, snr_db) in rows {
        out.push_str(&fmt_plain(theta));
        out.push(',');
        out.push_str(&fmt_sig(snr_db));
        out.push('\n');
    }
    out
}

/// CSV of a BER sweep: `snr_db,ber,ci95` rows.
pub fn ber_csv(rows: &[(f64, BerEstimate)]) -> String {
    let mut out = String::from("snr_db,ber,ci95\n");
    for (snr_db, est) in rows {
        out.push_str(&fmt_sig(*snr_db));
        out.push(',');
        out.push_str(&fmt_sig(est.ber));
        out.push(',');
        out.push_str(&fmt_sig(est.ci95_halfwidth));
        out.push('\n');
    }
    out
}

/// CSV of a coverage grid: `x,y,snr_db,ber,serving_panel` rows in row-major
/// order (y outer, x inner). Unserved cells print `NONE` for snr_db; cells
/// without a closed-form BER print `NONE` for ber.
pub fn coverage_csv(grid: &CoverageGrid) -> String {
    let mut out = String::from("x,y,snr_db,ber,serving_panel\n");
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let (x, y) = grid.cell_center(ix, iy);
            let report = &grid.values[iy][ix];
            out.push_str(&fmt_sig(x));
            out.push(',');
            out.push_str(&fmt_sig(y));
            out.push(',');
            out.push_str(&fmt_sig(report.snr_db));
            out.push(',');
            match grid.ber_values[iy][ix] {
                Some(ber) => out.push_str(&fmt_sig(ber)),
                None => out.push_str(NONE_SENTINEL),
            }
            out.push(',');
            out.push_str(&grid.serving_panel[iy][ix].to_string());
            out.push('\n');
        }
    }
    out
}

/// Binary P5 heatmap of the grid's SNR in dB, mapping [0, max dB] linearly
/// onto [0, 255]. Cells at or below 0 dB (including unserved cells) are
/// black. Rows run north to south (iy ascending), columns west to east.
pub fn coverage_pgm(grid: &CoverageGrid) -> Vec<u8> {
    let max_db = grid.max_snr_db().filter(|&m| m > 0.0);
    let mut out = format!("P5\n{} {}\n255\n", grid.nx, grid.ny).into_bytes();
    out.reserve(grid.nx * grid.ny);
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let db = grid.values[iy][ix].snr_db;
            let pixel = match max_db {
                Some(max) if db.is_finite() && db > 0.0 => {
                    (db / max * 255.0).round().clamp(0.0, 255.0) as u8
                }
                _ => 0,
            };
            out.push(pixel);
        }
    }
    out
}
