//! Lambertian LOS channel gain, received power, link SNR, and the analytic
//! OOK bit-error mapping.
//!
//! The channel gain of a line-of-sight link is the generalized-Lambertian
//! closed form
//!
//! ```text
//! H = (m+1)/(2 pi d^2) * A * cos^m(theta) * T_s * g(phi) * cos(phi)
//! ```
//!
//! for 0 <= phi <= Psi_c and theta < 90 deg, zero outside, with the
//! concentrator gain g(phi) = n^2 / sin^2(Psi_c) inside the field of view and
//! the Lambertian order m = -ln 2 / ln cos(Phi_1/2) set by the LED's
//! half-power semi-angle.
//!
//! Link SNR follows the ratio convention
//!
//! ```text
//! SNR = gamma^2 * P_rec / sigma^2_total
//! ```
//!
//! deliberately linear in the received optical power P_rec and weighted by
//! the brightness level gamma. sigma^2_total is a single configurable ambient
//! noise constant; there is no shot/thermal decomposition. Absolute SNR values
//! (e.g. the 128 dB scale of ceiling-panel surveys) are only reachable by
//! calibrating sigma^2_total against an anchor geometry, which
//! [`calibrate_to_anchor`] does.

use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{Error, Result};
use crate::geometry::{Direction3, LinkGeometry, Point3};
use crate::scenario::Scenario;

// ---------------------------------------------------------------- types --

/// An LED panel: one or more LEDs driven as a single Lambertian source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedPanel {
    pub position: Point3,
    pub normal: Direction3,
    /// Half-power semi-angle Phi_1/2, degrees, in (0, 90).
    pub semi_angle_deg: f64,
    /// Radiated optical power per LED, watts.
    pub optical_power_w: f64,
    /// Brightness level gamma in (0, 1].
    pub brightness: f64,
    pub mobility: Mobility,
    /// LEDs on the panel; transmit power scales linearly with the count.
    #[serde(default = "default_led_count")]
    pub led_count: u32,
}

fn default_led_count() -> u32 {
    1
}

impl LedPanel {
    /// Aggregate transmit power: per-LED power times the LED count.
    pub fn transmit_power_w(&self) -> f64 {
        self.optical_power_w * f64::from(self.led_count)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.semi_angle_deg > 0.0 && self.semi_angle_deg < 90.0) {
            return Err(Error::InvalidParameter(format!(
                "semi_angle_deg {} outside (0, 90)",
                self.semi_angle_deg
            )));
        }
        if !(self.optical_power_w > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "optical_power_w {} must be > 0",
                self.optical_power_w
            )));
        }
        if !(self.brightness > 0.0 && self.brightness <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "brightness {} outside (0, 1]",
                self.brightness
            )));
        }
        if self.led_count < 1 {
            return Err(Error::InvalidParameter("led_count must be >= 1".into()));
        }
        if let Mobility::Moveable { max_tilt_deg } = self.mobility {
            if !(0.0..=90.0).contains(&max_tilt_deg) {
                return Err(Error::InvalidParameter(format!(
                    "max_tilt_deg {max_tilt_deg} outside [0, 90]"
                )));
            }
        }
        Ok(())
    }
}

/// Whether a panel may be tilted by the planner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mobility {
    Fixed,
    Moveable { max_tilt_deg: f64 },
}

impl Mobility {
    pub fn is_moveable(&self) -> bool {
        matches!(self, Mobility::Moveable { .. })
    }
}

/// Photodiode front end: active area plus optics gains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Receiver {
    pub position: Point3,
    pub normal: Direction3,
    /// Detector active area A, square meters.
    pub area_m2: f64,
    /// Field of view Psi_c, degrees, in (0, 90].
    pub fov_deg: f64,
    /// Optical filter transmission T_s in (0, 1].
    pub filter_gain: f64,
    /// Concentrator refractive index n >= 1.
    pub concentrator_index: f64,
    #[serde(default)]
    pub detector: DetectorKind,
}

impl Receiver {
    pub fn validate(&self) -> Result<()> {
        if !(self.area_m2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "area_m2 {} must be > 0",
                self.area_m2
            )));
        }
        if !(self.fov_deg > 0.0 && self.fov_deg <= 90.0) {
            return Err(Error::InvalidParameter(format!(
                "fov_deg {} outside (0, 90]",
                self.fov_deg
            )));
        }
        if !(self.filter_gain > 0.0 && self.filter_gain <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "filter_gain {} outside (0, 1]",
                self.filter_gain
            )));
        }
        if !(self.concentrator_index >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "concentrator_index {} must be >= 1",
                self.concentrator_index
            )));
        }
        Ok(())
    }
}

/// Detector technology. Carried as metadata; both kinds currently map to a
/// responsivity advantage of 1.0 (no quantitative APD gain is modeled).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorKind {
    #[default]
    Pin,
    Apd,
}

impl DetectorKind {
    pub fn responsivity_advantage(&self) -> f64 {
        match self {
            DetectorKind::Pin | DetectorKind::Apd => 1.0,
        }
    }
}

/// Total ambient noise variance sigma^2_total, in the same normalized units
/// as the gamma^2-weighted received power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub variance: f64,
}

impl NoiseModel {
    pub fn new(variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise variance {variance} must be positive and finite"
            )));
        }
        Ok(NoiseModel { variance })
    }
}

/// One link evaluation: SNR plus the quantities it was derived from.
/// `snr_db` is -inf when the channel gain is zero (out of FOV / back-facing).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrReport {
    pub snr_linear: f64,
    pub snr_db: f64,
    pub received_power_w: f64,
    pub channel_gain: f64,
}

// ----------------------------------------------------------- operations --

/// Lambertian order m = -ln 2 / ln cos(Phi_1/2). m = 1 at a 60 deg semi-angle.
pub fn lambertian_order(semi_angle_deg: f64) -> Result<f64> {
    if !(semi_angle_deg > 0.0 && semi_angle_deg < 90.0) {
        return Err(Error::InvalidParameter(format!(
            "semi-angle {semi_angle_deg} deg outside (0, 90)"
        )));
    }
    Ok(-std::f64::consts::LN_2 / semi_angle_deg.to_radians().cos().ln())
}

/// LOS channel gain H for one link. Out-of-FOV or back-facing geometry gives
/// exactly zero (not an error), so coverage sweeps can scan entire rooms.
pub fn los_gain(geom: &LinkGeometry, lp: &LedPanel, rx: &Receiver) -> f64 {
    if geom.theta_deg >= 90.0 || geom.phi_deg > rx.fov_deg {
        return 0.0;
    }
    // Unwrap is safe: panel invariants pin the semi-angle inside (0, 90).
    let m = lambertian_order(lp.semi_angle_deg).expect("validated semi-angle");
    let theta = geom.theta_deg.to_radians();
    let phi = geom.phi_deg.to_radians();
    let fov = rx.fov_deg.to_radians();
    let concentrator = rx.concentrator_index * rx.concentrator_index / fov.sin().powi(2);
    (m + 1.0) / (2.0 * std::f64::consts::PI * geom.distance_m * geom.distance_m)
        * rx.area_m2
        * theta.cos().powf(m)
        * rx.filter_gain
        * concentrator
        * phi.cos()
}

/// Received optical power P_rec = P_t * H, with P_t the panel's aggregate
/// transmit power (per-LED power times led_count).
pub fn received_power(lp: &LedPanel, channel_gain: f64) -> f64 {
    lp.transmit_power_w() * channel_gain
}

/// SNR = gamma^2 * P_rec / sigma^2_total. The channel gain is carried through
/// into the report unchanged.
pub fn snr(
    brightness: f64,
    p_rec_w: f64,
    channel_gain: f64,
    noise: &NoiseModel,
) -> Result<SnrReport> {
    if !(noise.variance > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise variance {} must be > 0",
            noise.variance
        )));
    }
    if p_rec_w < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "received power {p_rec_w} must be >= 0"
        )));
    }
    let snr_linear = brightness * brightness * p_rec_w / noise.variance;
    Ok(SnrReport {
        snr_linear,
        snr_db: 10.0 * snr_linear.log10(),
        received_power_w: p_rec_w,
        channel_gain,
    })
}

/// Full-link evaluation: geometry -> H -> P_rec -> SNR.
pub fn link_snr(
    lp: &LedPanel,
    rx: &Receiver,
    geom: &LinkGeometry,
    noise: &NoiseModel,
) -> Result<SnrReport> {
    let h = los_gain(geom, lp, rx);
    let p_rec = received_power(lp, h) * rx.detector.responsivity_advantage();
    snr(lp.brightness, p_rec, h, noise)
}

/// OOK bit error rate under threshold detection: BER = Q(sqrt(SNR)), with Q
/// the Gaussian tail function Q(x) = erfc(x / sqrt 2) / 2.
pub fn ber_ook(snr_linear: f64) -> f64 {
    0.5 * erfc((snr_linear.max(0.0) / 2.0).sqrt())
}

/// Inverse of [`ber_ook`]: the linear SNR at which OOK reaches `ber`.
/// SNR = (sqrt 2 * erfc_inv(2 ber))^2; e.g. ber 1e-5 needs about 18.19.
pub fn ook_snr_for_ber(ber: f64) -> Result<f64> {
    if !(ber > 0.0 && ber <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "ber {ber} outside (0, 0.5]"
        )));
    }
    let x = std::f64::consts::SQRT_2 * erfc_inv(2.0 * ber);
    Ok(x * x)
}

/// The irradiance angles of the ceiling-panel SNR survey, degrees.
pub const TABLE3_THETAS_DEG: [f64; 5] = [65.0, 68.0, 70.0, 75.0, 78.0];

/// Solves for the sigma^2_total that makes the scenario's primary link
/// (panel 0 -> receiver 0 distance, at the given anchor angles) hit
/// `anchor_snr_db` exactly. Returns a new [`NoiseModel`]; the scenario is not
/// mutated.
pub fn calibrate_to_anchor(
    scenario: &Scenario,
    anchor_theta_deg: f64,
    anchor_phi_deg: f64,
    anchor_snr_db: f64,
) -> Result<NoiseModel> {
    let (lp, rx, link) = scenario.primary_link()?;
    let geom = LinkGeometry {
        theta_deg: anchor_theta_deg,
        phi_deg: anchor_phi_deg,
        distance_m: link.distance_m,
    };
    let h = los_gain(&geom, lp, rx);
    if h <= 0.0 {
        return Err(Error::CalibrationImpossible(format!(
            "zero channel gain at anchor (theta {anchor_theta_deg} deg, phi {anchor_phi_deg} deg)"
        )));
    }
    let p_rec = received_power(lp, h) * rx.detector.responsivity_advantage();
    let gamma2 = lp.brightness * lp.brightness;
    NoiseModel::new(gamma2 * p_rec / 10f64.powf(anchor_snr_db / 10.0))
}

/// SNR at each survey angle, holding the primary link's incidence angle and
/// distance constant while the irradiance angle sweeps (the receiver stays
/// put; only the panel aim changes). Output is (theta_deg, snr_db), strictly
/// decreasing in theta.
pub fn table3_sweep(scenario: &Scenario) -> Result<Vec<(f64, f64)>> {
    let (lp, rx, link) = scenario.primary_link()?;
    TABLE3_THETAS_DEG
        .iter()
        .map(|&theta| {
            let geom = LinkGeometry {
                theta_deg: theta,
                phi_deg: link.phi_deg,
                distance_m: link.distance_m,
            };
            let report = link_snr(lp, rx, &geom, &scenario.noise)?;
            Ok((theta, report.snr_db))
        })
        .collect()
}
