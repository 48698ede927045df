use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CameraKind {
    Fisheye,
    Rgbd,
}

/// Horizontal projection is angle-linear: a bearing of ±fov/2 maps to the
/// image edges. Apparent height follows `focal_k * height / distance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    pub kind: CameraKind,
    /// Radians.
    pub horizontal_fov: f64,
    pub max_range: f64,
    pub focal_k: f64,
    pub provides_depth: bool,
    /// Image width over height in pixels; squares in pixel space use it.
    pub aspect: f64,
}

impl CameraModel {
    pub fn fisheye() -> Self {
        Self {
            kind: CameraKind::Fisheye,
            horizontal_fov: 200f64.to_radians(),
            max_range: 3.0,
            focal_k: 0.46,
            provides_depth: false,
            aspect: 4.0 / 3.0,
        }
    }

    pub fn rgbd() -> Self {
        Self {
            kind: CameraKind::Rgbd,
            horizontal_fov: 70f64.to_radians(),
            max_range: 8.0,
            focal_k: 1.0,
            provides_depth: true,
            aspect: 4.0 / 3.0,
        }
    }

    pub fn for_kind(kind: CameraKind) -> Self {
        match kind {
            CameraKind::Fisheye => Self::fisheye(),
            CameraKind::Rgbd => Self::rgbd(),
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        let ok = self.horizontal_fov > 0.0
            && self.horizontal_fov <= 2.0 * std::f64::consts::PI
            && self.max_range > 0.0
            && self.focal_k > 0.0
            && self.aspect > 0.0;
        if ok {
            Ok(())
        } else {
            Err(crate::Error::Config(format!("invalid {:?} camera model", self.kind)))
        }
    }

    /// Image coordinate of a bearing (CCW positive, i.e. left is negative u).
    pub fn u_of_bearing(&self, bearing: f64) -> f64 {
        -bearing / (0.5 * self.horizontal_fov)
    }

    pub fn bearing_of_u(&self, u: f64) -> f64 {
        -u * 0.5 * self.horizontal_fov
    }

    pub fn in_fov(&self, bearing: f64) -> bool {
        bearing.abs() <= 0.5 * self.horizontal_fov
    }

    pub fn apparent_height(&self, height: f64, distance: f64) -> f64 {
        (self.focal_k * height / distance).clamp(0.0, 1.0)
    }
}
