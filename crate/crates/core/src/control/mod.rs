//! Following behavior: camera selection, visual servoing, local-goal
//! navigation, the rollout safety filter and the follow/search state machine.

mod follow;
mod planner;
mod servo;
mod switch;

pub use follow::{follow_step, Decision, FollowController, FollowState, Mode, Perception, Pipeline};
pub use planner::{arc_distance, arc_end, path_clearance, safer_filter, PlannerConfig, PlannerInput};
pub use servo::{goal_from_depth, pursue, visual_servo, PursuitConfig, ServoConfig};
pub use switch::{select_camera, CameraSwitchConfig, TargetObservation};

use crate::error::{Error, Result};
use crate::reid::ReidConfig;
use crate::world::AgentLimits;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Seconds the last local goal is kept after losing the target (RGBD).
    pub goal_hold: f64,
    /// rad/s.
    pub spin_rate: f64,
    /// Seconds of continuous search after which a trial counts the target as lost.
    pub give_up_after: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { goal_hold: 2.0, spin_rate: 0.8, give_up_after: 15.0 }
    }
}

/// Perception timing: the camera rate and the slower re-id rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LatencyConfig {
    pub camera_fps: f64,
    pub reid_fps: f64,
}

impl Default for LatencyConfig {
    fn default() -> Self {
        Self { camera_fps: 30.0, reid_fps: 8.0 }
    }
}

impl LatencyConfig {
    /// Extra ticks a frame that runs re-id occupies: `ceil(camera/reid) − 1`.
    pub fn stall_ticks(&self) -> u32 {
        ((self.camera_fps / self.reid_fps).ceil() as u32).saturating_sub(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ControlConfig {
    pub switch: CameraSwitchConfig,
    pub servo: ServoConfig,
    pub search: SearchConfig,
    pub planner: PlannerConfig,
    pub pursuit: PursuitConfig,
    pub latency: LatencyConfig,
    pub reid: ReidConfig,
    /// Distance kept to the target when driving to a local goal, meters.
    pub standoff: f64,
    /// Largest increase of forward speed per processed frame, m/s. Slowing
    /// down is not limited.
    pub speed_step: f64,
}

impl Default for ControlConfig {
    fn default() -> Self {
        Self {
            switch: CameraSwitchConfig::default(),
            servo: ServoConfig::default(),
            search: SearchConfig::default(),
            planner: PlannerConfig::default(),
            pursuit: PursuitConfig::default(),
            latency: LatencyConfig::default(),
            reid: ReidConfig::default(),
            standoff: 1.2,
            speed_step: 0.05,
        }
    }
}

impl ControlConfig {
    pub fn validate(&self, limits: &AgentLimits) -> Result<()> {
        self.switch.validate()?;
        self.servo.validate(self.switch.to_rgbd_height_frac)?;
        self.planner.validate(limits)?;
        self.reid.validate()?;
        let s = &self.search;
        if !(s.goal_hold > 0.0 && s.spin_rate > 0.0 && s.give_up_after > 0.0) {
            return Err(Error::Config("search timings must be positive".into()));
        }
        if !(self.latency.camera_fps > 0.0 && self.latency.reid_fps > 0.0 && self.latency.reid_fps <= self.latency.camera_fps) {
            return Err(Error::Config("latency: need 0 < reid_fps ≤ camera_fps".into()));
        }
        if !(self.speed_step > 0.0) {
            return Err(Error::Config("speed_step must be positive".into()));
        }
        if !(self.standoff >= 0.0 && self.pursuit.k_linear > 0.0 && self.pursuit.k_angular > 0.0) {
            return Err(Error::Config("standoff and pursuit gains must be positive".into()));
        }
        Ok(())
    }
}
