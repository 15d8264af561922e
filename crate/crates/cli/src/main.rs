//! Command-line front end: scenario loading, the experiment commands, and
//! CSV/heatmap outputs.
//!
//! Every command is deterministic for fixed flags and files. Exit codes are
//! a stable contract: 0 success, 2 user or configuration error, 3 I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lifisim_core::channel::{calibrate_to_anchor, link_snr, table3_sweep};
use lifisim_core::geometry::LinkGeometry;
use lifisim_core::linksim::ber_sweep;
use lifisim_core::modem::SchemeConfig;
use lifisim_core::output::{ber_csv, coverage_csv, coverage_pgm, fmt_sig, table3_csv, NONE_SENTINEL};
use lifisim_core::planner::{coverage_grid, optimize_tilts, overlap_report};
use lifisim_core::scenario::Scenario;

const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "lifisim",
    version,
    about = "Indoor Li-Fi link simulator: Lambertian LOS SNR, IM/DD modulation BER, and LED-panel placement planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the primary link's SNR at one irradiance angle.
    Snr {
        /// Scenario JSON; omit for the built-in default room.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Irradiance angle theta in degrees.
        #[arg(long)]
        theta: f64,
        /// Recalibrate noise so the link hits DB at (THETA, PHI) first.
        #[arg(long, value_name = "THETA,PHI,DB")]
        calibrate_anchor: Option<String>,
    },
    /// CSV of the SNR survey over the five standard irradiance angles.
    Table3 {
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, value_name = "THETA,PHI,DB")]
        calibrate_anchor: Option<String>,
    },
    /// Monte Carlo BER sweep; CSV of snr_db, ber, ci95.
    Ber {
        /// Scheme name: ook, pwm, ppm<L>, vppm, oppm<n>,<w>, dco-ofdm,
        /// aco-ofdm.
        #[arg(long)]
        scheme: String,
        /// Comma-separated SNR points in dB; empty for a header-only CSV.
        #[arg(long, value_name = "DB[,DB...]", allow_hyphen_values = true)]
        snr_db: String,
        /// Bits per SNR point.
        #[arg(long, default_value_t = 1_000_000)]
        bits: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Receiver-plane coverage grid to CSV, with an optional PGM heatmap.
    Coverage {
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Grid resolution in meters, in (0.01, 1].
        #[arg(long, default_value_t = 0.25)]
        resolution: f64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Optional binary PGM heatmap path.
        #[arg(long)]
        heatmap: Option<PathBuf>,
        /// Also report cells served above this SNR by two or more panels.
        #[arg(long, allow_hyphen_values = true)]
        threshold_db: Option<f64>,
    },
    /// Aim moveable panels at their users and report the resulting plan.
    Plan {
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Tilt/azimuth grid step in degrees, in [0.5, 5].
        #[arg(long, default_value_t = 1.0)]
        tilt_step: f64,
    },
}

/// Command failure with its exit code class.
enum CliError {
    Usage(String),
    Io(String),
}

impl From<lifisim_core::Error> for CliError {
    fn from(e: lifisim_core::Error) -> CliError {
        CliError::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Snr {
            scenario,
            theta,
            calibrate_anchor,
        } => cmd_snr(scenario.as_deref(), theta, calibrate_anchor.as_deref()),
        Command::Table3 {
            scenario,
            calibrate_anchor,
        } => cmd_table3(scenario.as_deref(), calibrate_anchor.as_deref()),
        Command::Ber {
            scheme,
            snr_db,
            bits,
            seed,
        } => cmd_ber(&scheme, &snr_db, bits, seed),
        Command::Coverage {
            scenario,
            resolution,
            out,
            heatmap,
            threshold_db,
        } => cmd_coverage(
            scenario.as_deref(),
            resolution,
            &out,
            heatmap.as_deref(),
            threshold_db,
        ),
        Command::Plan {
            scenario,
            tilt_step,
        } => cmd_plan(scenario.as_deref(), tilt_step),
    }
}

// ---------------------------------------------------------------- helpers --

/// Loads the scenario file, or the built-in default room when none is given.
fn load_scenario(path: Option<&Path>) -> Result<Scenario, CliError> {
    match path {
        None => Ok(Scenario::builtin_default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Ok(Scenario::from_json_str(&text)?)
        }
    }
}

/// Parses "THETA,PHI,DB" and recalibrates the scenario's noise to that
/// anchor. No-op when the flag was not given.
fn apply_anchor(scenario: &mut Scenario, anchor: Option<&str>) -> Result<(), CliError> {
    let Some(spec) = anchor else { return Ok(()) };
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let values: Option<Vec<f64>> = parts.iter().map(|p| p.parse().ok()).collect();
    match values.as_deref() {
        Some([theta, phi, db]) => {
            scenario.noise = calibrate_to_anchor(scenario, *theta, *phi, *db)?;
            Ok(())
        }
        _ => Err(CliError::Usage(format!(
            "--calibrate-anchor expects THETA,PHI,DB (got '{spec}')"
        ))),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

// --------------------------------------------------------------- commands --

fn cmd_snr(
    scenario: Option<&Path>,
    theta: f64,
    anchor: Option<&str>,
) -> Result<(), CliError> {
    let mut s = load_scenario(scenario)?;
    apply_anchor(&mut s, anchor)?;
    let (lp, rx, link) = s.primary_link()?;
    let geom = LinkGeometry {
        theta_deg: theta,
        phi_deg: link.phi_deg,
        distance_m: link.distance_m,
    };
    let report = link_snr(lp, rx, &geom, &s.noise)?;
    if report.channel_gain <= 0.0 {
        println!("snr_db={NONE_SENTINEL} gain=0");
        return Ok(());
    }
    println!("theta_deg={}", fmt_sig(theta));
    println!("phi_deg={}", fmt_sig(geom.phi_deg));
    println!("gain={}", fmt_sig(report.channel_gain));
    println!("received_power_w={}", fmt_sig(report.received_power_w));
    println!("snr_linear={}", fmt_sig(report.snr_linear));
    println!("snr_db={}", fmt_sig(report.snr_db));
    Ok(())
}

fn cmd_table3(scenario: Option<&Path>, anchor: Option<&str>) -> Result<(), CliError> {
    let mut s = load_scenario(scenario)?;
    apply_anchor(&mut s, anchor)?;
    let rows = table3_sweep(&s)?;
    print!("{}", table3_csv(&rows));
    Ok(())
}

fn cmd_ber(scheme: &str, snr_db: &str, bits: u64, seed: u64) -> Result<(), CliError> {
    let config = SchemeConfig::parse_name(scheme)?;
    let mut points = Vec::new();
    for part in snr_db.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        points.push(part.parse::<f64>().map_err(|_| {
            CliError::Usage(format!("--snr-db expects comma-separated numbers (got '{part}')"))
        })?);
    }
    let rows = ber_sweep(&config, &points, bits, seed)?;
    print!("{}", ber_csv(&rows));
    Ok(())
}

fn cmd_coverage(
    scenario: Option<&Path>,
    resolution: f64,
    out: &Path,
    heatmap: Option<&Path>,
    threshold_db: Option<f64>,
) -> Result<(), CliError> {
    let s = load_scenario(scenario)?;
    let grid = coverage_grid(&s, resolution)?;
    write_file(out, coverage_csv(&grid).as_bytes())?;
    if let Some(pgm_path) = heatmap {
        write_file(pgm_path, &coverage_pgm(&grid))?;
    }
    if let Some(threshold) = threshold_db {
        let overlap = overlap_report(&s, resolution, threshold)?;
        println!("overlap_cells={overlap}");
    }
    Ok(())
}

fn cmd_plan(scenario: Option<&Path>, tilt_step: f64) -> Result<(), CliError> {
    let s = load_scenario(scenario)?;
    let plan = optimize_tilts(&s, tilt_step)?;
    for (p, &(tilt, az)) in plan.tilts.iter().enumerate() {
        println!("panel={p} tilt={tilt:.1} azimuth={az:.1}");
    }
    for (r, &panel) in plan.assignment.iter().enumerate() {
        let ber = match plan.per_user_ber[r] {
            Some(b) => fmt_sig(b),
            None => NONE_SENTINEL.to_string(),
        };
        println!(
            "user={r} panel={panel} snr_db={} ber={ber}",
            fmt_sig(plan.per_user_snr_db[r])
        );
    }
    println!("min_user_snr_db={}", fmt_sig(plan.min_user_snr_db));
    println!("overlap_cells={}", plan.overlap_cells);
    Ok(())
}
