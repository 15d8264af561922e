//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Transmitter and receiver coincide (or another unusable layout).
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// Tilt angle outside [0, 90] degrees.
    #[error("invalid tilt: {0}")]
    InvalidTilt(String),

    /// A numeric argument outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A modulation scheme config violating its variant's constraints.
    #[error("invalid scheme config: {0}")]
    InvalidConfig(String),

    /// A waveform whose length is not a whole number of symbols.
    #[error("framing error: {0}")]
    Framing(String),

    /// A Monte Carlo run request below the minimum budget.
    #[error("invalid run: {0}")]
    InvalidRun(String),

    /// Anchor geometry has zero channel gain, so no noise floor reproduces it.
    #[error("calibration impossible: {0}")]
    CalibrationImpossible(String),

    /// Strategy constraints cannot be met (e.g. fewer panels than users).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A scenario that fails schema or cross-field validation.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
