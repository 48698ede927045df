use crate::error::{Error, Result};
use crate::sensing::{BoundingBox, CameraKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CameraSwitchConfig {
    /// Fish-eye → RGBD when the target box is shorter than this.
    pub to_rgbd_height_frac: f64,
    /// RGBD → fish-eye when the target is closer than this (meters).
    pub to_fisheye_distance: f64,
}

impl Default for CameraSwitchConfig {
    fn default() -> Self {
        Self { to_rgbd_height_frac: 0.45, to_fisheye_distance: 1.5 }
    }
}

impl CameraSwitchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.to_rgbd_height_frac > 0.0 && self.to_rgbd_height_frac < 1.0 && self.to_fisheye_distance > 0.0 {
            Ok(())
        } else {
            Err(Error::Config("camera switch thresholds out of range".into()))
        }
    }
}

/// What the active camera currently reports about the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetObservation {
    pub bbox: BoundingBox,
    pub depth: Option<f64>,
}

/// Camera to use next. Each trigger is only evaluated in its own mode: box
/// height in fish-eye mode, depth in RGBD mode.
pub fn select_camera(current: CameraKind, observation: Option<&TargetObservation>, config: &CameraSwitchConfig) -> CameraKind {
    let Some(obs) = observation else { return current };
    match current {
        CameraKind::Fisheye if obs.bbox.height < config.to_rgbd_height_frac => CameraKind::Rgbd,
        CameraKind::Rgbd => match obs.depth {
            Some(d) if d.is_finite() && d < config.to_fisheye_distance => CameraKind::Fisheye,
            _ => current,
        },
        _ => current,
    }
}
