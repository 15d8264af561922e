//! Python bindings for the Li-Fi link simulator.
//!
//! Exposes the channel math, the modem codecs, the Monte Carlo BER engine,
//! and scenario-level operations (survey sweep, coverage, planning).
//! Modulation schemes are selected by the same name strings the CLI uses
//! (`ook`, `pwm`, `ppm4`, `vppm`, `oppm8,4`, `dco-ofdm`, `aco-ofdm`);
//! parameterized forms carry their parameters inline, everything else uses
//! the library defaults. Reports come back as plain dicts.
//!
//! Build with `maturin develop` or `cargo build --features extension-module`
//! and import as `lifisim_py`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use lifisim_core::channel;
use lifisim_core::geometry::LinkGeometry;
use lifisim_core::linksim::{self, BerEstimate, LinkRun};
use lifisim_core::modem::{self, SchemeConfig, Waveform};
use lifisim_core::planner;
use lifisim_core::scenario::Scenario as CoreScenario;

fn value_err(e: lifisim_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn ber_dict<'py>(py: Python<'py>, est: &BerEstimate) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("ber", est.ber)?;
    d.set_item("errors", est.errors)?;
    d.set_item("bits", est.bits)?;
    d.set_item("ci95_halfwidth", est.ci95_halfwidth)?;
    d.set_item("zero_gain", est.zero_gain)?;
    Ok(d)
}

// -------------------------------------------------------- free functions --

/// Lambertian order m = -ln 2 / ln cos(semi_angle). m(60 deg) = 1.
#[pyfunction]
fn lambertian_order(semi_angle_deg: f64) -> PyResult<f64> {
    channel::lambertian_order(semi_angle_deg).map_err(value_err)
}

/// OOK bit error rate Q(sqrt(snr_linear)).
#[pyfunction]
fn ber_ook(snr_linear: f64) -> f64 {
    channel::ber_ook(snr_linear)
}

/// Linear SNR at which OOK reaches the given BER (inverse of ber_ook).
#[pyfunction]
fn ook_snr_for_ber(ber: f64) -> PyResult<f64> {
    channel::ook_snr_for_ber(ber).map_err(value_err)
}

/// Per-scheme efficiency metrics as a dict: bits_per_slot, duty_cycle,
/// rate_factor.
#[pyfunction]
fn scheme_metrics<'py>(py: Python<'py>, scheme: &str) -> PyResult<Bound<'py, PyDict>> {
    let config = SchemeConfig::parse_name(scheme).map_err(value_err)?;
    let m = modem::scheme_metrics(&config).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("bits_per_slot", m.bits_per_slot)?;
    d.set_item("duty_cycle", m.duty_cycle)?;
    d.set_item("rate_factor", m.rate_factor)?;
    Ok(d)
}

/// Encodes a 0/1 bit list into intensity samples for the named scheme.
#[pyfunction]
fn encode(bits: Vec<u8>, scheme: &str) -> PyResult<Vec<f64>> {
    let config = SchemeConfig::parse_name(scheme).map_err(value_err)?;
    Ok(modem::encode(&bits, &config).map_err(value_err)?.samples)
}

/// Decodes intensity samples produced by (a possibly noisy copy of) the
/// named scheme's encoder. Returns bytes, one 0/1 byte per bit.
#[pyfunction]
fn decode(samples: Vec<f64>, scheme: &str) -> PyResult<Vec<u8>> {
    let config = SchemeConfig::parse_name(scheme).map_err(value_err)?;
    let waveform = Waveform {
        samples,
        samples_per_slot: config.samples_per_slot(),
        slot_rate_hz: modem::DEFAULT_SLOT_RATE_HZ,
    };
    modem::decode(&waveform, &config).map_err(value_err)
}

/// Seeded Monte Carlo BER of one scheme at one electrical SNR.
#[pyfunction]
#[pyo3(signature = (scheme, snr_db, bits=1_000_000, seed=1))]
fn run_ber<'py>(
    py: Python<'py>,
    scheme: &str,
    snr_db: f64,
    bits: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let config = SchemeConfig::parse_name(scheme).map_err(value_err)?;
    let est = linksim::run_link(&LinkRun {
        scheme: config,
        snr_db,
        bit_budget: bits,
        seed,
    })
    .map_err(value_err)?;
    ber_dict(py, &est)
}

// -------------------------------------------------------------- Scenario --

/// A room, its LED panels and receivers, a noise model, a modulation scheme,
/// and a placement strategy.
#[pyclass(name = "Scenario", skip_from_py_object)]
#[derive(Clone)]
struct PyScenario {
    inner: CoreScenario,
}

#[pymethods]
impl PyScenario {
    /// The built-in 5x5x3 m default room (anchored at 128 dB / 65 deg).
    #[staticmethod]
    fn default() -> PyScenario {
        PyScenario {
            inner: CoreScenario::builtin_default(),
        }
    }

    /// A two-user room mixing a fixed wide panel with a moveable narrow one.
    #[staticmethod]
    fn hybrid_two_user() -> PyScenario {
        PyScenario {
            inner: CoreScenario::hybrid_two_user(),
        }
    }

    /// Parses and validates a scenario JSON document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<PyScenario> {
        Ok(PyScenario {
            inner: CoreScenario::from_json_str(text).map_err(value_err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    /// Re-solves the noise variance so the primary link hits `snr_db` at
    /// the (theta, phi) anchor.
    fn calibrate(&mut self, theta_deg: f64, phi_deg: f64, snr_db: f64) -> PyResult<()> {
        self.inner.noise =
            channel::calibrate_to_anchor(&self.inner, theta_deg, phi_deg, snr_db)
                .map_err(value_err)?;
        Ok(())
    }

    /// Primary-link SNR at one irradiance angle, as a dict with snr_db,
    /// snr_linear, gain, and received_power_w.
    fn snr_at_theta<'py>(&self, py: Python<'py>, theta_deg: f64) -> PyResult<Bound<'py, PyDict>> {
        let (lp, rx, link) = self.inner.primary_link().map_err(value_err)?;
        let geom = LinkGeometry {
            theta_deg,
            phi_deg: link.phi_deg,
            distance_m: link.distance_m,
        };
        let report = channel::link_snr(lp, rx, &geom, &self.inner.noise).map_err(value_err)?;
        let d = PyDict::new(py);
        d.set_item("snr_db", report.snr_db)?;
        d.set_item("snr_linear", report.snr_linear)?;
        d.set_item("gain", report.channel_gain)?;
        d.set_item("received_power_w", report.received_power_w)?;
        Ok(d)
    }

    /// The (theta_deg, snr_db) survey over the five standard irradiance
    /// angles.
    fn table3(&self) -> PyResult<Vec<(f64, f64)>> {
        channel::table3_sweep(&self.inner).map_err(value_err)
    }

    /// Monte Carlo BER of the primary link at one irradiance angle, using
    /// the scenario's scheme.
    #[pyo3(signature = (theta_deg, bits=1_000_000, seed=1))]
    fn angle_ber<'py>(
        &self,
        py: Python<'py>,
        theta_deg: f64,
        bits: u64,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let est = linksim::angle_ber(&self.inner, theta_deg, &self.inner.scheme, bits, seed)
            .map_err(value_err)?;
        ber_dict(py, &est)
    }

    /// Receiver-plane SNR grid in dB as row-major nested lists (None for
    /// unserved cells); cell (ix, iy) is centered at ((ix+0.5) res,
    /// (iy+0.5) res).
    fn coverage_snr_db(&self, resolution_m: f64) -> PyResult<Vec<Vec<Option<f64>>>> {
        let grid = planner::coverage_grid(&self.inner, resolution_m).map_err(value_err)?;
        Ok(grid
            .values
            .iter()
            .map(|row| {
                row.iter()
                    .map(|r| r.snr_db.is_finite().then_some(r.snr_db))
                    .collect()
            })
            .collect())
    }

    /// The coverage grid in the CLI's CSV format.
    fn coverage_csv(&self, resolution_m: f64) -> PyResult<String> {
        let grid = planner::coverage_grid(&self.inner, resolution_m).map_err(value_err)?;
        Ok(lifisim_core::output::coverage_csv(&grid))
    }

    /// Cells served above the threshold by two or more panels.
    fn overlap_cells(&self, resolution_m: f64, threshold_db: f64) -> PyResult<usize> {
        planner::overlap_report(&self.inner, resolution_m, threshold_db).map_err(value_err)
    }

    /// Aims moveable panels at their assigned users; returns a dict with
    /// assignment, tilts, per_user_snr_db, per_user_ber, min_user_snr_db,
    /// and overlap_cells.
    #[pyo3(signature = (tilt_step_deg=1.0))]
    fn plan<'py>(&self, py: Python<'py>, tilt_step_deg: f64) -> PyResult<Bound<'py, PyDict>> {
        let plan = planner::optimize_tilts(&self.inner, tilt_step_deg).map_err(value_err)?;
        let d = PyDict::new(py);
        d.set_item("assignment", plan.assignment)?;
        d.set_item("tilts", plan.tilts)?;
        d.set_item("per_user_snr_db", plan.per_user_snr_db)?;
        d.set_item("per_user_ber", plan.per_user_ber)?;
        d.set_item("min_user_snr_db", plan.min_user_snr_db)?;
        d.set_item("overlap_cells", plan.overlap_cells)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(panels={}, receivers={}, scheme={}, strategy={:?})",
            self.inner.panels.len(),
            self.inner.receivers.len(),
            self.inner.scheme.name(),
            self.inner.strategy,
        )
    }
}

#[pymodule]
fn lifisim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(lambertian_order, m)?)?;
    m.add_function(wrap_pyfunction!(ber_ook, m)?)?;
    m.add_function(wrap_pyfunction!(ook_snr_for_ber, m)?)?;
    m.add_function(wrap_pyfunction!(scheme_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(decode, m)?)?;
    m.add_function(wrap_pyfunction!(run_ber, m)?)?;
    m.add_class::<PyScenario>()?;
    Ok(())
}
