use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, point_segment_distance, Vec2};
use crate::world::{AgentLimits, ControlCommand, LidarScan};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    /// Minimum distance from the agent center to any lidar return along a rollout.
    pub safety_radius: f64,
    /// Path length swept at full speed; rollouts last `lookahead / v_max` seconds.
    pub lookahead: f64,
    pub linear_samples: usize,
    pub angular_samples: usize,
    /// Weight of the end-heading error in goal mode, meters per radian.
    pub heading_weight: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self { safety_radius: 0.45, lookahead: 1.0, linear_samples: 11, angular_samples: 13, heading_weight: 0.1 }
    }
}

impl PlannerConfig {
    pub fn validate(&self, limits: &AgentLimits) -> Result<()> {
        if self.safety_radius > limits.radius
            && self.lookahead > 0.0
            && self.linear_samples >= 2
            && self.angular_samples >= 3
            && self.heading_weight >= 0.0
        {
            Ok(())
        } else {
            Err(Error::Config("planner: safety_radius must exceed the agent radius; grid needs ≥2×3 samples".into()))
        }
    }

    pub fn horizon(&self, limits: &AgentLimits) -> f64 {
        self.lookahead / limits.v_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlannerInput {
    Command(ControlCommand),
    /// Goal in the agent frame (x forward, y left).
    Goal(Vec2),
}

/// Pose after driving `cmd` for `t` seconds from the origin, heading 0.
pub fn arc_end(cmd: &ControlCommand, t: f64) -> (Vec2, f64) {
    let (v, w) = (cmd.linear, cmd.angular);
    let th = w * t;
    if w.abs() < 1e-9 {
        (Vec2::new(v * t, 0.0), th)
    } else {
        let r = v / w;
        (Vec2::new(r * th.sin(), r * (1.0 - th.cos())), th)
    }
}

/// Distance from `q` to the path swept by `cmd` over `t` seconds.
pub fn arc_distance(cmd: &ControlCommand, t: f64, q: &Vec2) -> f64 {
    let (v, w) = (cmd.linear, cmd.angular);
    if v.abs() < 1e-12 {
        return q.norm();
    }
    if w.abs() < 1e-9 {
        return point_segment_distance(q, &Vec2::zeros(), &Vec2::new(v * t, 0.0));
    }
    let r = v / w;
    let center = Vec2::new(0.0, r);
    let d = (q - center) / r;
    // Angle travelled along the arc to the point's radial projection.
    let beta = d.x.atan2(-d.y);
    let sweep = (w * t).abs();
    let along = (beta * w.signum()).rem_euclid(TAU);
    if sweep >= TAU || along <= sweep {
        ((q - center).norm() - r.abs()).abs()
    } else {
        let (end, _) = arc_end(cmd, t);
        q.norm().min((q - end).norm())
    }
}

/// Smallest distance from the swept path to any of `points`.
pub fn path_clearance(cmd: &ControlCommand, t: f64, points: &[Vec2]) -> f64 {
    points.iter().map(|p| arc_distance(cmd, t, p)).fold(f64::INFINITY, f64::min)
}

/// Rollout grid filter: returns a command whose swept path keeps at least
/// `safety_radius` from every lidar return.
///
/// In command mode the surviving candidate closest to the input is chosen
/// (the input itself when it is safe); in goal mode the one ending nearest the
/// goal. When the agent already starts inside the safety radius, candidates
/// that never get closer than the current clearance are accepted instead. If
/// nothing survives, the agent turns in place toward the freest direction.
pub fn safer_filter(input: &PlannerInput, scan: &LidarScan, config: &PlannerConfig, limits: &AgentLimits) -> ControlCommand {
    let t = config.horizon(limits);
    let reach = limits.v_max * t + config.safety_radius;
    let points: Vec<Vec2> = scan.points().filter(|p| p.norm() <= reach).collect();
    let start_clearance = points.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min);
    let required = if start_clearance >= config.safety_radius { config.safety_radius } else { start_clearance - 1e-9 };
    let safe = |c: &ControlCommand| {
        let reach = c.linear.abs() * t + required;
        points.iter().filter(|p| p.norm() <= reach + 1e-9).all(|p| arc_distance(c, t, p) >= required)
    };

    let mut candidates = Vec::with_capacity(config.linear_samples * config.angular_samples + 1);
    if let PlannerInput::Command(c) = input {
        let c = c.clamped(limits);
        if c.linear >= 0.0 {
            candidates.push(c);
        }
    }
    for i in 0..config.linear_samples {
        let v = limits.v_max * i as f64 / (config.linear_samples - 1) as f64;
        for j in 0..config.angular_samples {
            let w = limits.omega_max * (2.0 * j as f64 / (config.angular_samples - 1) as f64 - 1.0);
            candidates.push(ControlCommand::new(v, w));
        }
    }

    let cost = |c: &ControlCommand| match input {
        PlannerInput::Command(want) => {
            let dv = (c.linear - want.linear) / limits.v_max;
            let dw = (c.angular - want.angular) / limits.omega_max;
            dv * dv + dw * dw
        }
        PlannerInput::Goal(g) => {
            let (end, heading) = arc_end(c, t);
            let to_goal = g - end;
            let heading_error = if to_goal.norm() > 0.2 { normalize_angle(to_goal.y.atan2(to_goal.x) - heading).abs() } else { 0.0 };
            to_goal.norm() + config.heading_weight * heading_error
        }
    };

    let mut best: Option<(f64, ControlCommand)> = None;
    for c in candidates {
        let k = cost(&c);
        if best.as_ref().is_some_and(|(bk, _)| k >= *bk) {
            continue;
        }
        if safe(&c) {
            best = Some((k, c));
        }
    }
    match best {
        Some((_, c)) => c,
        None => {
            let freest = (0..scan.ranges.len()).max_by(|&a, &b| scan.ranges[a].total_cmp(&scan.ranges[b])).map_or(0.0, |i| scan.bearing(i));
            let sign = if freest < 0.0 { -1.0 } else { 1.0 };
            ControlCommand::new(0.0, sign * limits.omega_max)
        }
    }
}
