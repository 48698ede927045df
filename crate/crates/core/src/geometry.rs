//! Planar geometry shared by the world, lidar and sensing models.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type Vec2 = Vector2<f64>;

/// Wraps an angle into (−π, π].
pub fn normalize_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

pub fn unit(angle: f64) -> Vec2 {
    Vec2::new(angle.cos(), angle.sin())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec2,
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self { position: Vec2::new(x, y), heading: normalize_angle(heading) }
    }

    /// Expresses a world point in this pose's body frame (x forward, y left).
    pub fn to_local(&self, p: &Vec2) -> Vec2 {
        let d = p - self.position;
        let (s, c) = self.heading.sin_cos();
        Vec2::new(c * d.x + s * d.y, -s * d.x + c * d.y)
    }

    pub fn to_world(&self, p: &Vec2) -> Vec2 {
        let (s, c) = self.heading.sin_cos();
        self.position + Vec2::new(c * p.x - s * p.y, s * p.x + c * p.y)
    }

    /// Bearing of a world point relative to the heading, CCW positive.
    pub fn bearing_to(&self, p: &Vec2) -> f64 {
        let d = p - self.position;
        normalize_angle(d.y.atan2(d.x) - self.heading)
    }
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec2,
    pub max: Vec2,
}

impl Aabb {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { min: Vec2::new(x0, y0), max: Vec2::new(x1, y1) }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn contains(&self, p: &Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn contains_aabb(&self, other: &Aabb) -> bool {
        self.contains(&other.min) && self.contains(&other.max)
    }

    /// Distance from `p` to the nearest point of the rectangle (0 inside).
    pub fn distance(&self, p: &Vec2) -> f64 {
        let dx = (self.min.x - p.x).max(0.0).max(p.x - self.max.x);
        let dy = (self.min.y - p.y).max(0.0).max(p.y - self.max.y);
        dx.hypot(dy)
    }

    /// Distance from an interior point to the rectangle boundary.
    pub fn inner_distance(&self, p: &Vec2) -> f64 {
        (p.x - self.min.x).min(self.max.x - p.x).min(p.y - self.min.y).min(self.max.y - p.y)
    }

    /// Entry distance along a ray (slab method); `None` if missed.
    pub fn ray_hit(&self, origin: &Vec2, dir: &Vec2) -> Option<f64> {
        let mut t0 = f64::NEG_INFINITY;
        let mut t1 = f64::INFINITY;
        for k in 0..2 {
            if dir[k].abs() < 1e-15 {
                if origin[k] < self.min[k] || origin[k] > self.max[k] {
                    return None;
                }
            } else {
                let a = (self.min[k] - origin[k]) / dir[k];
                let b = (self.max[k] - origin[k]) / dir[k];
                t0 = t0.max(a.min(b));
                t1 = t1.min(a.max(b));
            }
        }
        if t1 < t0 || t1 < 0.0 {
            return None;
        }
        Some(t0.max(0.0))
    }

    /// Exit distance of a ray starting inside the rectangle.
    pub fn ray_exit(&self, origin: &Vec2, dir: &Vec2) -> f64 {
        let mut t = f64::INFINITY;
        for k in 0..2 {
            if dir[k] > 1e-15 {
                t = t.min((self.max[k] - origin[k]) / dir[k]);
            } else if dir[k] < -1e-15 {
                t = t.min((self.min[k] - origin[k]) / dir[k]);
            }
        }
        t.max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Rect(Aabb),
    Circle { center: Vec2, radius: f64 },
}

impl Shape {
    pub fn distance(&self, p: &Vec2) -> f64 {
        match self {
            Shape::Rect(r) => r.distance(p),
            Shape::Circle { center, radius } => ((p - center).norm() - radius).max(0.0),
        }
    }

    pub fn ray_hit(&self, origin: &Vec2, dir: &Vec2) -> Option<f64> {
        match self {
            Shape::Rect(r) => r.ray_hit(origin, dir),
            Shape::Circle { center, radius } => ray_circle(origin, dir, center, *radius),
        }
    }

    /// True if the segment a→b passes through the shape.
    pub fn blocks_segment(&self, a: &Vec2, b: &Vec2) -> bool {
        let d = b - a;
        let len = d.norm();
        if len < 1e-12 {
            return self.distance(a) == 0.0;
        }
        let dir = d / len;
        matches!(self.ray_hit(a, &dir), Some(t) if t <= len)
    }

    pub fn bounds(&self) -> Aabb {
        match self {
            Shape::Rect(r) => *r,
            Shape::Circle { center, radius } => Aabb {
                min: center - Vec2::new(*radius, *radius),
                max: center + Vec2::new(*radius, *radius),
            },
        }
    }

    /// Smallest extent across the shape; bounds the per-tick displacement.
    pub fn thickness(&self) -> f64 {
        match self {
            Shape::Rect(r) => r.width().min(r.height()),
            Shape::Circle { radius, .. } => 2.0 * radius,
        }
    }
}

pub fn ray_circle(origin: &Vec2, dir: &Vec2, center: &Vec2, radius: f64) -> Option<f64> {
    let oc = origin - center;
    let b = oc.dot(dir);
    let c = oc.norm_squared() - radius * radius;
    if c <= 0.0 {
        return Some(0.0);
    }
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let t = -b - disc.sqrt();
    (t >= 0.0).then_some(t)
}

pub fn point_segment_distance(p: &Vec2, a: &Vec2, b: &Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 < 1e-18 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}
