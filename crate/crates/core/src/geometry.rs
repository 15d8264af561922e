//! Positions, orientations, and the link angles that feed the channel model.
//!
//! Angle conventions (all I/O in degrees, radians only inside formulas):
//! - theta, angle of irradiance: between the transmitter normal and the
//!   tx -> rx ray.
//! - phi, angle of incidence: between the receiver normal and the rx -> tx
//!   ray.
//!
//! Angles above 90 degrees are legal geometry (a panel facing away from the
//! receiver); they produce zero gain downstream rather than an error, so
//! coverage sweeps can evaluate back-facing layouts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A location in room coordinates, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn distance_to(&self, other: &Point3) -> f64 {
        let (dx, dy, dz) = (other.x - self.x, other.y - self.y, other.z - self.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

impl TryFrom<[f64; 3]> for Point3 {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "point coordinates must be finite, got {v:?}"
            )));
        }
        Ok(Point3::new(v[0], v[1], v[2]))
    }
}

impl From<Point3> for [f64; 3] {
    fn from(p: Point3) -> [f64; 3] {
        [p.x, p.y, p.z]
    }
}

/// A unit vector. The constructor normalizes; serde additionally rejects
/// inputs more than 1e-6 away from unit length (scenario files must state
/// normals, not arbitrary vectors).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Direction3 {
    x: f64,
    y: f64,
    z: f64,
}

/// Unit-norm tolerance accepted when deserializing normals from scenario files.
pub const NORMAL_UNIT_TOLERANCE: f64 = 1e-6;

impl Direction3 {
    /// Builds a unit vector from any non-zero finite vector, normalizing it.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "direction components must be finite, got [{x}, {y}, {z}]"
            )));
        }
        let norm = (x * x + y * y + z * z).sqrt();
        if norm < 1e-12 {
            return Err(Error::InvalidParameter(
                "direction must have non-zero length".into(),
            ));
        }
        Ok(Direction3 {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// The downward vertical, the rest orientation of a ceiling panel.
    pub fn down() -> Self {
        Direction3 { x: 0.0, y: 0.0, z: -1.0 }
    }

    /// The upward vertical, the rest orientation of a desk receiver.
    pub fn up() -> Self {
        Direction3 { x: 0.0, y: 0.0, z: 1.0 }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn dot(&self, other: &Direction3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Angle in degrees between this direction and the (possibly unnormalized)
    /// vector `v`, clamped against rounding before the acos.
    fn angle_to_vector_deg(&self, v: [f64; 3]) -> f64 {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let cos = (self.x * v[0] + self.y * v[1] + self.z * v[2]) / norm;
        cos.clamp(-1.0, 1.0).acos().to_degrees()
    }
}

impl TryFrom<[f64; 3]> for Direction3 {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "normal components must be finite, got {v:?}"
            )));
        }
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if (norm - 1.0).abs() > NORMAL_UNIT_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "normal {v:?} has length {norm}, expected a unit vector (tolerance {NORMAL_UNIT_TOLERANCE})"
            )));
        }
        Direction3::new(v[0], v[1], v[2])
    }
}

impl From<Direction3> for [f64; 3] {
    fn from(d: Direction3) -> [f64; 3] {
        [d.x, d.y, d.z]
    }
}

/// Room extents in meters plus the horizontal plane receivers sit on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Room {
    pub width: f64,
    pub depth: f64,
    pub height: f64,
    pub receiver_plane_height: f64,
}

impl Room {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.depth > 0.0 && self.height > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "room dimensions must be positive, got {} x {} x {}",
                self.width, self.depth, self.height
            )));
        }
        if !(0.0..self.height).contains(&self.receiver_plane_height) {
            return Err(Error::InvalidParameter(format!(
                "receiver_plane_height {} must lie in [0, room height {})",
                self.receiver_plane_height, self.height
            )));
        }
        Ok(())
    }

    pub fn contains(&self, p: &Point3) -> bool {
        (0.0..=self.width).contains(&p.x)
            && (0.0..=self.depth).contains(&p.y)
            && (0.0..=self.height).contains(&p.z)
    }
}

/// The transmitter->receiver angles and distance of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// Angle of irradiance, degrees in [0, 180].
    pub theta_deg: f64,
    /// Angle of incidence, degrees in [0, 180].
    pub phi_deg: f64,
    /// Euclidean tx-rx distance, meters, > 0.
    pub distance_m: f64,
}

/// Computes theta/phi/distance for a transmitter-receiver pair.
///
/// Errors with [`Error::DegenerateGeometry`] when the positions coincide.
pub fn link_geometry(
    tx_pos: &Point3,
    tx_normal: &Direction3,
    rx_pos: &Point3,
    rx_normal: &Direction3,
) -> Result<LinkGeometry> {
    let v = [rx_pos.x - tx_pos.x, rx_pos.y - tx_pos.y, rx_pos.z - tx_pos.z];
    let distance = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if distance < 1e-12 {
        return Err(Error::DegenerateGeometry(format!(
            "transmitter and receiver coincide at ({}, {}, {})",
            tx_pos.x, tx_pos.y, tx_pos.z
        )));
    }
    let theta = tx_normal.angle_to_vector_deg(v);
    let phi = rx_normal.angle_to_vector_deg([-v[0], -v[1], -v[2]]);
    Ok(LinkGeometry {
        theta_deg: theta,
        phi_deg: phi,
        distance_m: distance,
    })
}

/// Tilts a ceiling panel's downward normal by `tilt_deg` away from vertical,
/// in the vertical plane at `azimuth_deg` (x+ is azimuth 0, y+ is 90).
///
/// result = (sin t cos a, sin t sin a, -cos t), which is (0,0,-1) rotated by
/// t about the horizontal axis perpendicular to the azimuth direction.
pub fn tilt_panel(tilt_deg: f64, azimuth_deg: f64) -> Result<Direction3> {
    if !(0.0..=90.0).contains(&tilt_deg) {
        return Err(Error::InvalidTilt(format!(
            "tilt {tilt_deg} deg outside [0, 90]"
        )));
    }
    let t = tilt_deg.to_radians();
    let a = azimuth_deg.to_radians();
    Direction3::new(t.sin() * a.cos(), t.sin() * a.sin(), -t.cos())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dir(x: f64, y: f64, z: f64) -> Direction3 {
        Direction3::new(x, y, z).unwrap()
    }

    #[test]
    fn link_geometry_collinear_axis_aligned() {
        let g = link_geometry(
            &Point3::new(0.0, 0.0, 3.0),
            &Direction3::down(),
            &Point3::new(0.0, 0.0, 0.0),
            &Direction3::up(),
        )
        .unwrap();
        assert!(g.theta_deg.abs() < 1e-12);
        assert!(g.phi_deg.abs() < 1e-12);
        assert!((g.distance_m - 3.0).abs() < 1e-12);
    }

    #[test]
    fn link_geometry_45_degree_offset() {
        let g = link_geometry(
            &Point3::new(0.0, 0.0, 3.0),
            &Direction3::down(),
            &Point3::new(3.0, 0.0, 0.0),
            &Direction3::up(),
        )
        .unwrap();
        assert!((g.theta_deg - 45.0).abs() < 1e-9);
        assert!((g.phi_deg - 45.0).abs() < 1e-9);
        assert!((g.distance_m - 18f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn link_geometry_matches_hand_trigonometry() {
        // tx (0,0,2.5) down, rx (1,1,0.85) up: horizontal run sqrt(2), drop
        // 1.65, so theta = phi = atan(sqrt(2)/1.65) and d = sqrt(2 + 1.65^2).
        let g = link_geometry(
            &Point3::new(0.0, 0.0, 2.5),
            &Direction3::down(),
            &Point3::new(1.0, 1.0, 0.85),
            &Direction3::up(),
        )
        .unwrap();
        let expect_angle = (2f64.sqrt() / 1.65).atan().to_degrees();
        assert!((expect_angle - 40.599850292914205).abs() < 1e-12);
        assert!((g.theta_deg - expect_angle).abs() < 1e-9);
        assert!((g.phi_deg - expect_angle).abs() < 1e-9);
        assert!((g.distance_m - 2.173131381210073).abs() < 1e-9);
    }

    #[test]
    fn link_geometry_rejects_coincident_positions() {
        let p = Point3::new(1.0, 2.0, 3.0);
        let err = link_geometry(&p, &Direction3::down(), &p, &Direction3::up()).unwrap_err();
        assert!(matches!(err, Error::DegenerateGeometry(_)));
    }

    #[test]
    fn link_geometry_symmetric_under_endpoint_swap() {
        let (tx, nt) = (Point3::new(0.3, 1.7, 2.9), dir(0.2, -0.3, -1.0));
        let (rx, nr) = (Point3::new(2.1, 0.4, 0.8), dir(-0.1, 0.4, 1.0));
        let fwd = link_geometry(&tx, &nt, &rx, &nr).unwrap();
        let rev = link_geometry(&rx, &nr, &tx, &nt).unwrap();
        assert!((fwd.theta_deg - rev.phi_deg).abs() < 1e-9);
        assert!((fwd.phi_deg - rev.theta_deg).abs() < 1e-9);
        assert!((fwd.distance_m - rev.distance_m).abs() < 1e-12);
    }

    #[test]
    fn tilt_zero_is_identity() {
        for az in [0.0, 37.0, 180.0, 359.0] {
            let n = tilt_panel(0.0, az).unwrap();
            assert!((n.x()).abs() < 1e-12 && (n.y()).abs() < 1e-12);
            assert!((n.z() + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tilt_quarter_turn_points_along_x() {
        let n = tilt_panel(90.0, 0.0).unwrap();
        assert!((n.x() - 1.0).abs() < 1e-12);
        assert!(n.y().abs() < 1e-12 && n.z().abs() < 1e-12);
    }

    #[test]
    fn tilt_matches_rotation_matrix_oracle() {
        // Oracle: rotate (0,0,-1) by t about the axis (sin a, -cos a, 0)
        // (the horizontal axis that carries -z toward azimuth a under the
        // right-hand rule) using the explicit Rodrigues formula,
        // independently of the implementation's closed form.
        let rotate = |t_deg: f64, a_deg: f64| -> [f64; 3] {
            let (t, a) = (t_deg.to_radians(), a_deg.to_radians());
            let axis = [a.sin(), -a.cos(), 0.0];
            let (ct, st) = (t.cos(), t.sin());
            let v = [0.0, 0.0, -1.0];
            let cross = [
                axis[1] * v[2] - axis[2] * v[1],
                axis[2] * v[0] - axis[0] * v[2],
                axis[0] * v[1] - axis[1] * v[0],
            ];
            let dot = axis[0] * v[0] + axis[1] * v[1] + axis[2] * v[2];
            [
                v[0] * ct + cross[0] * st + axis[0] * dot * (1.0 - ct),
                v[1] * ct + cross[1] * st + axis[1] * dot * (1.0 - ct),
                v[2] * ct + cross[2] * st + axis[2] * dot * (1.0 - ct),
            ]
        };
        for (t, a) in [(30.0, 90.0), (45.0, 0.0), (17.0, 211.0), (90.0, 333.0)] {
            let got = tilt_panel(t, a).unwrap();
            let want = rotate(t, a);
            assert!((got.x() - want[0]).abs() < 1e-12, "tilt {t} az {a}");
            assert!((got.y() - want[1]).abs() < 1e-12, "tilt {t} az {a}");
            assert!((got.z() - want[2]).abs() < 1e-12, "tilt {t} az {a}");
        }
        // Frozen value for the 30/90 case.
        let n = tilt_panel(30.0, 90.0).unwrap();
        assert!((n.y() - 0.5).abs() < 1e-12);
        assert!((n.z() + 0.8660254037844387).abs() < 1e-12);
    }

    #[test]
    fn tilt_norm_is_unit_on_one_degree_grid() {
        for t in 0..=90 {
            for a in (0..360).step_by(5) {
                let n = tilt_panel(t as f64, a as f64).unwrap();
                assert!((n.norm() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn tilt_out_of_range_rejected() {
        assert!(matches!(tilt_panel(-0.1, 0.0), Err(Error::InvalidTilt(_))));
        assert!(matches!(tilt_panel(90.1, 0.0), Err(Error::InvalidTilt(_))));
    }

    #[test]
    fn phi_independent_of_panel_tilt_and_theta_zero_when_aimed() {
        let tx = Point3::new(2.5, 2.5, 3.0);
        let rx = Point3::new(4.0, 2.5, 0.85);
        let up = Direction3::up();
        let base = link_geometry(&tx, &Direction3::down(), &rx, &up).unwrap();
        for t in [0.0, 10.0, 30.0, 60.0] {
            let n = tilt_panel(t, 120.0).unwrap();
            let g = link_geometry(&tx, &n, &rx, &up).unwrap();
            assert!((g.phi_deg - base.phi_deg).abs() < 1e-9);
            assert!((g.distance_m - base.distance_m).abs() < 1e-12);
        }
        // Aiming straight at the receiver drives theta to zero: the panel->user
        // ray runs tilt=atan(1.5/2.15) from vertical at azimuth 0.
        let aim_tilt = (1.5f64 / 2.15).atan().to_degrees();
        let aimed = tilt_panel(aim_tilt, 0.0).unwrap();
        let g = link_geometry(&tx, &aimed, &rx, &up).unwrap();
        assert!(g.theta_deg < 1e-9);
    }

    #[test]
    fn direction_serde_rejects_non_unit_normals() {
        let ok: Direction3 = serde_json::from_str("[0.0, 0.0, -1.0]").unwrap();
        assert!((ok.z() + 1.0).abs() < 1e-12);
        assert!(serde_json::from_str::<Direction3>("[0.0, 0.0, -1.5]").is_err());
        assert!(serde_json::from_str::<Direction3>("[0.0, 0.0, 0.0]").is_err());
        // Within 1e-6 of unit length is accepted and renormalized exactly.
        let near: Direction3 = serde_json::from_str("[0.0, 0.0, -1.0000009]").unwrap();
        assert!((near.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn room_validation() {
        let room = Room {
            width: 5.0,
            depth: 5.0,
            height: 3.0,
            receiver_plane_height: 0.85,
        };
        room.validate().unwrap();
        assert!(room.contains(&Point3::new(2.5, 2.5, 3.0)));
        assert!(!room.contains(&Point3::new(5.1, 2.5, 1.0)));
        let bad = Room {
            receiver_plane_height: 3.0,
            ..room
        };
        assert!(bad.validate().is_err());
    }
}
