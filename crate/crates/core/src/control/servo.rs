use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, Pose, Vec2};
use crate::sensing::{BoundingBox, CameraModel};
use crate::world::{AgentLimits, ControlCommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ServoConfig {
    /// rad/s per unit of horizontal box offset.
    pub k_yaw: f64,
    /// m/s per unit of box height deficit.
    pub k_fwd: f64,
    pub height_setpoint: f64,
    pub deadband: f64,
}

impl Default for ServoConfig {
    fn default() -> Self {
        Self { k_yaw: 1.0, k_fwd: 2.0, height_setpoint: 0.6, deadband: 0.02 }
    }
}

impl ServoConfig {
    pub fn validate(&self, to_rgbd_height_frac: f64) -> Result<()> {
        if self.k_yaw > 0.0
            && self.k_fwd > 0.0
            && self.height_setpoint > to_rgbd_height_frac
            && self.height_setpoint < 1.0
            && self.deadband >= 0.0
        {
            Ok(())
        } else {
            Err(Error::Config("servo gains must be positive and the setpoint above the RGBD switch height".into()))
        }
    }
}

/// Box-space proportional control.
///
/// Positive angular velocity turns left, so a target left of center
/// (`center_u < 0`) yields a positive yaw rate. Never reverses.
pub fn visual_servo(target: &BoundingBox, config: &ServoConfig, limits: &AgentLimits) -> ControlCommand {
    let angular = if target.center_u.abs() <= config.deadband { 0.0 } else { -config.k_yaw * target.center_u };
    let deficit = config.height_setpoint - target.height;
    let linear = if deficit <= config.deadband { 0.0 } else { (config.k_fwd * deficit).clamp(0.0, limits.v_max) };
    ControlCommand::new(linear, angular).clamped(limits)
}

/// Local goal behind the target's measured position, `standoff` meters short
/// of it along the line of sight. `None` for a non-finite depth.
pub fn goal_from_depth(target: &BoundingBox, depth: f64, agent: &Pose, camera: &CameraModel, standoff: f64) -> Option<Vec2> {
    if !depth.is_finite() || !target.center_u.is_finite() {
        return None;
    }
    let bearing = camera.bearing_of_u(target.center_u);
    let direction = agent.heading + bearing;
    let reach = (depth - standoff).max(0.0);
    Some(agent.position + Vec2::new(direction.cos(), direction.sin()) * reach)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PursuitConfig {
    /// m/s per meter of goal distance.
    pub k_linear: f64,
    /// rad/s per radian of goal bearing.
    pub k_angular: f64,
}

impl Default for PursuitConfig {
    fn default() -> Self {
        Self { k_linear: 1.0, k_angular: 2.0 }
    }
}

/// Drive straight at a local goal (agent frame) with no obstacle awareness.
pub fn pursue(goal_local: &Vec2, config: &PursuitConfig, limits: &AgentLimits) -> ControlCommand {
    let dist = goal_local.norm();
    if dist < 0.05 {
        return ControlCommand::STOP;
    }
    let bearing = normalize_angle(goal_local.y.atan2(goal_local.x));
    let linear = (config.k_linear * dist * bearing.cos()).max(0.0);
    ControlCommand::new(linear, config.k_angular * bearing).clamped(limits)
}
