use super::{World, WorldConfig, PERSON_RADIUS};
use crate::geometry::{ray_circle, unit, Pose, Vec2};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LidarConfig {
    /// Rays per revolution (360 → 1° resolution).
    pub rays: usize,
    pub max_range: f64,
}

impl Default for LidarConfig {
    fn default() -> Self {
        Self { rays: 360, max_range: 12.0 }
    }
}

/// One 360° planar scan in the agent frame. Ray `i` points at
/// `angle_min + i * angle_increment` relative to the agent heading; a range
/// equal to `max_range` means no return.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LidarScan {
    pub angle_min: f64,
    pub angle_increment: f64,
    pub ranges: Vec<f64>,
    pub max_range: f64,
}

impl LidarScan {
    pub fn empty(rays: usize, max_range: f64) -> Self {
        Self {
            angle_min: -PI,
            angle_increment: 2.0 * PI / rays as f64,
            ranges: vec![max_range; rays],
            max_range,
        }
    }

    pub fn bearing(&self, i: usize) -> f64 {
        self.angle_min + i as f64 * self.angle_increment
    }

    pub fn is_return(&self, i: usize) -> bool {
        self.ranges[i] < self.max_range
    }

    /// Returns as points in the agent frame (x forward, y left).
    pub fn points(&self) -> impl Iterator<Item = Vec2> + '_ {
        self.ranges
            .iter()
            .enumerate()
            .filter(|(_, r)| **r < self.max_range)
            .map(|(i, r)| unit(self.bearing(i)) * *r)
    }

    /// Closest return, or `max_range` when nothing is in range.
    pub fn min_range(&self) -> f64 {
        self.ranges.iter().copied().fold(self.max_range, f64::min)
    }
}

/// Ray-casts from `pose` against arena walls, obstacles and person discs.
pub fn scan_from<'a>(pose: &Pose, world: &WorldConfig, persons: impl Iterator<Item = &'a Vec2>) -> LidarScan {
    let cfg = world.lidar;
    let mut scan = LidarScan::empty(cfg.rays, cfg.max_range);
    let persons: Vec<Vec2> = persons.copied().collect();
    let origin = pose.position;
    let inside = world.arena.contains(&origin);
    for i in 0..cfg.rays {
        let dir = unit(pose.heading + scan.bearing(i));
        let mut best = if inside { world.arena.ray_exit(&origin, &dir) } else { f64::INFINITY };
        for o in &world.obstacles {
            if let Some(t) = o.shape.ray_hit(&origin, &dir) {
                best = best.min(t);
            }
        }
        for c in &persons {
            if let Some(t) = ray_circle(&origin, &dir, c, PERSON_RADIUS) {
                best = best.min(t);
            }
        }
        scan.ranges[i] = best.min(cfg.max_range);
    }
    scan
}

pub fn lidar_scan(world: &World) -> LidarScan {
    scan_from(&world.agent().pose, world.config(), world.persons().map(|p| &p.position))
}
