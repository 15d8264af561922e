//! Desk-scale simulator for indoor Li-Fi links.
//!
//! The crate models Lambertian LED-to-photodiode line-of-sight channels,
//! computes link SNR, runs seeded Monte Carlo bit-error-rate experiments over
//! IM/DD modulation schemes, and evaluates LED-panel placement strategies on
//! receiver-plane coverage grids.
//!
//! Module map:
//! - [`geometry`]: positions, orientations, irradiance/incidence angles, panel tilt.
//! - [`channel`]: Lambertian LOS gain, received power, SNR, analytic OOK BER, calibration.
//! - [`modem`]: IM/DD waveform codecs (OOK/PWM/PPM/VPPM/OPPM, DCO-/ACO-OFDM) and metrics.
//! - [`linksim`]: end-to-end Monte Carlo BER with reproducible seeding.
//! - [`planner`]: coverage grids, user-panel assignment, moveable-panel tilt search.
//! - [`scenario`]: the room/panels/receivers/noise/scheme bundle and its JSON schema.
//! - [`output`]: deterministic CSV/PGM/console formatting shared by front ends.

pub mod channel;
pub mod error;
pub mod geometry;
pub mod linksim;
pub mod modem;
pub mod output;
pub mod planner;
pub mod scenario;

pub use error::{Error, Result};
