//! Scenario schema: the unit of simulation.
//!
//! A scenario bundles a room, LED panels, receivers, a noise model, a
//! modulation scheme, and a placement strategy. Scenarios load from JSON
//! (angles in degrees, lengths in meters, power in watts) with unknown keys
//! rejected and every value range-checked with a field-path message.

use serde::{Deserialize, Serialize};

use crate::channel::{
    self, DetectorKind, LedPanel, Mobility, NoiseModel, Receiver,
};
use crate::error::{Error, Result};
use crate::geometry::{link_geometry, Direction3, LinkGeometry, Point3, Room};
use crate::modem::SchemeConfig;

/// How the planner may place and aim panels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// One wide-beam fixed panel serves everyone; no aiming.
    FixedWide,
    /// One narrow fixed panel per user, assigned by exhaustive matching.
    Dedicated,
    /// Moveable panels tilt toward their assigned users.
    Moveable,
    /// A fixed wide panel for baseline floor coverage plus moveable
    /// narrow panels steered at individual users.
    Hybrid,
}

/// A complete simulation setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub room: Room,
    pub panels: Vec<LedPanel>,
    pub receivers: Vec<Receiver>,
    pub noise: NoiseModel,
    pub scheme: SchemeConfig,
    pub strategy: Strategy,
}

impl Scenario {
    /// Parses and validates a JSON scenario document.
    pub fn from_json_str(json: &str) -> Result<Scenario> {
        let scenario: Scenario = serde_json::from_str(json)
            .map_err(|e| Error::InvalidScenario(format!("scenario JSON: {e}")))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.room
            .validate()
            .map_err(|e| Error::InvalidScenario(format!("room: {e}")))?;
        if self.panels.is_empty() {
            return Err(Error::InvalidScenario("panels: list is empty".into()));
        }
        if self.receivers.is_empty() {
            return Err(Error::InvalidScenario("receivers: list is empty".into()));
        }
        for (i, panel) in self.panels.iter().enumerate() {
            panel
                .validate()
                .map_err(|e| Error::InvalidScenario(format!("panels[{i}]: {e}")))?;
            if !self.room.contains(&panel.position) {
                return Err(Error::InvalidScenario(format!(
                    "panels[{i}].position {:?} outside the room",
                    [panel.position.x, panel.position.y, panel.position.z]
                )));
            }
        }
        for (i, rx) in self.receivers.iter().enumerate() {
            rx.validate()
                .map_err(|e| Error::InvalidScenario(format!("receivers[{i}]: {e}")))?;
            if !self.room.contains(&rx.position) {
                return Err(Error::InvalidScenario(format!(
                    "receivers[{i}].position {:?} outside the room",
                    [rx.position.x, rx.position.y, rx.position.z]
                )));
            }
        }
        NoiseModel::new(self.noise.variance)
            .map_err(|e| Error::InvalidScenario(format!("noise: {e}")))?;
        self.scheme
            .validate()
            .map_err(|e| Error::InvalidScenario(format!("scheme: {e}")))?;
        if self.strategy == Strategy::Dedicated && self.panels.len() < self.receivers.len() {
            return Err(Error::InvalidScenario(format!(
                "strategy dedicated needs at least one panel per receiver ({} panels, {} receivers)",
                self.panels.len(),
                self.receivers.len()
            )));
        }
        Ok(())
    }

    /// The first panel / first receiver link, the one survey sweeps and
    /// anchor calibration refer to.
    pub fn primary_link(&self) -> Result<(&LedPanel, &Receiver, LinkGeometry)> {
        let lp = self
            .panels
            .first()
            .ok_or_else(|| Error::InvalidScenario("panels: list is empty".into()))?;
        let rx = self
            .receivers
            .first()
            .ok_or_else(|| Error::InvalidScenario("receivers: list is empty".into()))?;
        let geom = link_geometry(&lp.position, &lp.normal, &rx.position, &rx.normal)?;
        Ok((lp, rx, geom))
    }

    /// The shipped baseline: a 5 m x 5 m x 3 m room with one moveable
    /// ceiling-center panel (60 deg semi-angle, 1 W, gamma 1) and one
    /// receiver on the 0.85 m plane placed so the incidence angle is exactly
    /// 45 deg. Noise is calibrated so the primary link hits 128 dB at a
    /// 65 deg irradiance angle.
    pub fn builtin_default() -> Scenario {
        let room = Room {
            width: 5.0,
            depth: 5.0,
            height: 3.0,
            receiver_plane_height: 0.85,
        };
        let panel = LedPanel {
            position: Point3::new(2.5, 2.5, 3.0),
            normal: Direction3::down(),
            semi_angle_deg: 60.0,
            optical_power_w: 1.0,
            brightness: 1.0,
            mobility: Mobility::Moveable { max_tilt_deg: 60.0 },
            led_count: 1,
        };
        // Lateral offset equal to the 2.15 m height drop puts the receiver
        // at phi = 45 deg exactly.
        let receiver = Receiver {
            position: Point3::new(2.5 + 2.15, 2.5, 0.85),
            normal: Direction3::up(),
            area_m2: 1e-4,
            fov_deg: 60.0,
            filter_gain: 1.0,
            concentrator_index: 1.5,
            detector: DetectorKind::Pin,
        };
        let mut scenario = Scenario {
            room,
            panels: vec![panel],
            receivers: vec![receiver],
            noise: NoiseModel { variance: 1.0 },
            scheme: SchemeConfig::Ook { dimming: 0.5 },
            strategy: Strategy::Moveable,
        };
        scenario.noise = channel::calibrate_to_anchor(&scenario, 65.0, 45.0, 128.0)
            .expect("default anchor is inside the beam");
        scenario
    }

    /// A two-user hybrid example: one wide fixed ceiling-center panel plus
    /// one narrow moveable panel, with users at unequal distances. Used to
    /// show a hybrid plan beating the same layout with every panel frozen.
    pub fn hybrid_two_user() -> Scenario {
        let room = Room {
            width: 5.0,
            depth: 5.0,
            height: 3.0,
            receiver_plane_height: 0.85,
        };
        let wide = LedPanel {
            position: Point3::new(2.5, 2.5, 3.0),
            normal: Direction3::down(),
            semi_angle_deg: 70.0,
            optical_power_w: 1.0,
            brightness: 1.0,
            mobility: Mobility::Fixed,
            led_count: 1,
        };
        let narrow = LedPanel {
            position: Point3::new(1.25, 2.5, 3.0),
            normal: Direction3::down(),
            semi_angle_deg: 30.0,
            optical_power_w: 1.0,
            brightness: 1.0,
            mobility: Mobility::Moveable { max_tilt_deg: 60.0 },
            led_count: 1,
        };
        let rx = |x: f64, y: f64| Receiver {
            position: Point3::new(x, y, 0.85),
            normal: Direction3::up(),
            area_m2: 1e-4,
            fov_deg: 60.0,
            filter_gain: 1.0,
            concentrator_index: 1.5,
            detector: DetectorKind::Pin,
        };
        Scenario {
            room,
            panels: vec![wide, narrow],
            receivers: vec![rx(3.75, 2.5), rx(1.0, 1.0)],
            noise: NoiseModel { variance: 1e-12 },
            scheme: SchemeConfig::Ook { dimming: 0.5 },
            strategy: Strategy::Hybrid,
        }
    }
}
