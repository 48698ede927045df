use super::{PersonState, WorldConfig, PERSON_RADIUS};
use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, unit, Vec2};
use crate::rng::SimRng;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Clearance persons keep from obstacle surfaces beyond their own radius.
const OBSTACLE_MARGIN: f64 = 0.05;
const ARRIVAL_TOLERANCE: f64 = 0.05;
const MARKER_DWELL_S: f64 = 0.5;
const MIN_MARKER_SEPARATION: f64 = 2.0;
const STALL_WINDOW_S: f64 = 4.0;
const CROSSING_CAPTURE: f64 = 0.3;
const CROSSING_OVERSHOOT: f64 = 2.0;
const CROSSING_TIMEOUT_S: f64 = 12.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicySpec {
    Stationary,
    Rotate { rate: f64 },
    RandomMarkers { count: usize },
    Course { waypoints: Vec<Vec2> },
    InterfererRandomWalk { crossing_probability: f64 },
}

impl PolicySpec {
    pub fn validate(&self, world: &WorldConfig) -> Result<()> {
        match self {
            PolicySpec::Course { waypoints } => {
                if waypoints.is_empty() {
                    return Err(Error::Config("course has no waypoints".into()));
                }
                for w in waypoints {
                    if !world.arena.contains(w) {
                        return Err(Error::Config(format!("waypoint ({}, {}) lies outside the arena", w.x, w.y)));
                    }
                }
            }
            PolicySpec::InterfererRandomWalk { crossing_probability } => {
                if !(0.0..=1.0).contains(crossing_probability) {
                    return Err(Error::Config("crossing_probability must lie in [0, 1]".into()));
                }
            }
            PolicySpec::RandomMarkers { count } if *count == 0 => {
                return Err(Error::Config("random_markers needs at least one marker".into()));
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Crossing {
    Idle,
    Approach { elapsed: f64 },
    Pass,
}

/// Per-person progress through its policy.
#[derive(Debug, Clone)]
pub struct Walker {
    spec: PolicySpec,
    goal: Option<Vec2>,
    markers_left: usize,
    waypoint: usize,
    dwell: f64,
    avoid_side: f64,
    best_distance: f64,
    stall_timer: f64,
    crossing: Crossing,
    done: bool,
}

impl Walker {
    pub fn new(spec: PolicySpec) -> Self {
        let markers_left = match &spec {
            PolicySpec::RandomMarkers { count } => *count,
            _ => 0,
        };
        Self {
            spec,
            goal: None,
            markers_left,
            waypoint: 0,
            dwell: 0.0,
            avoid_side: 1.0,
            best_distance: f64::INFINITY,
            stall_timer: 0.0,
            crossing: Crossing::Idle,
            done: false,
        }
    }

    pub fn spec(&self) -> &PolicySpec {
        &self.spec
    }

    pub fn goal(&self) -> Option<Vec2> {
        self.goal
    }

    /// Finite protocols report completion; open-ended ones never block it.
    pub fn is_done(&self) -> bool {
        match self.spec {
            PolicySpec::RandomMarkers { .. } | PolicySpec::Course { .. } => self.done,
            _ => true,
        }
    }

    pub fn is_crossing(&self) -> bool {
        !matches!(self.crossing, Crossing::Idle)
    }

    fn set_goal(&mut self, goal: Option<Vec2>) {
        self.goal = goal;
        self.best_distance = f64::INFINITY;
        self.stall_timer = 0.0;
    }
}

/// What a person can see of the world when choosing its next move.
pub struct PolicyContext<'a> {
    pub world: &'a WorldConfig,
    pub agent: Vec2,
    pub target: Option<Vec2>,
    pub self_is_target: bool,
}

impl PolicyContext<'_> {
    fn is_free(&self, p: &Vec2) -> bool {
        self.world.is_free(p, PERSON_RADIUS + OBSTACLE_MARGIN)
            && (p - self.agent).norm() >= PERSON_RADIUS + self.world.agent.radius + 0.02
    }
}

/// Samples a reachable marker position inside the arena.
fn sample_marker(ctx: &PolicyContext, from: &Vec2, rng: &mut SimRng) -> Vec2 {
    let a = &ctx.world.arena;
    let inset = 0.6;
    let mut fallback = None;
    for _ in 0..256 {
        let p = Vec2::new(
            rng.random_range(a.min.x + inset..a.max.x - inset),
            rng.random_range(a.min.y + inset..a.max.y - inset),
        );
        if !ctx.world.is_free(&p, PERSON_RADIUS + 0.4) {
            continue;
        }
        if (p - from).norm() >= MIN_MARKER_SEPARATION {
            return p;
        }
        fallback.get_or_insert(p);
    }
    fallback.unwrap_or(*from)
}

/// Walks one step toward `goal`, sliding around obstacles. Returns true on arrival.
fn walk_toward(person: &mut PersonState, walker: &mut Walker, goal: Vec2, ctx: &PolicyContext, dt: f64) -> bool {
    let to_goal = goal - person.position;
    let dist = to_goal.norm();
    if dist <= ARRIVAL_TOLERANCE {
        return true;
    }
    let step = person.speed * dt;
    if step <= 0.0 {
        return false;
    }
    if dist <= step && ctx.is_free(&goal) {
        person.position = goal;
        return true;
    }
    let desired = to_goal.y.atan2(to_goal.x);
    let straight = person.position + unit(desired) * step;
    if ctx.is_free(&straight) {
        person.position = straight;
        person.heading = desired;
        return false;
    }
    // Keep sliding on the remembered side before trying the other one.
    let side = walker.avoid_side;
    for s in [side, -side] {
        for k in 1..=8 {
            let heading = normalize_angle(desired + s * k as f64 * PI / 9.0);
            let next = person.position + unit(heading) * step;
            if ctx.is_free(&next) {
                person.position = next;
                person.heading = heading;
                walker.avoid_side = s;
                return false;
            }
        }
    }
    person.heading = desired;
    false
}

/// Tracks progress toward the goal; true when the person has been stuck too long.
fn stalled(walker: &mut Walker, person: &PersonState, goal: &Vec2, dt: f64) -> bool {
    let d = (goal - person.position).norm();
    if d < walker.best_distance - 0.1 {
        walker.best_distance = d;
        walker.stall_timer = 0.0;
        return false;
    }
    walker.stall_timer += dt;
    walker.stall_timer > STALL_WINDOW_S
}

/// Advances one person by `dt` under its policy.
pub fn person_policy_step(person: &mut PersonState, walker: &mut Walker, ctx: &PolicyContext, dt: f64, rng: &mut SimRng) {
    match walker.spec.clone() {
        PolicySpec::Stationary => {}
        PolicySpec::Rotate { rate } => {
            person.heading = normalize_angle(person.heading + rate * dt);
        }
        PolicySpec::RandomMarkers { .. } => step_markers(person, walker, ctx, dt, rng),
        PolicySpec::Course { waypoints } => step_course(person, walker, &waypoints, ctx, dt),
        PolicySpec::InterfererRandomWalk { crossing_probability } => {
            step_interferer(person, walker, crossing_probability, ctx, dt, rng)
        }
    }
}

fn step_markers(person: &mut PersonState, walker: &mut Walker, ctx: &PolicyContext, dt: f64, rng: &mut SimRng) {
    if walker.done {
        return;
    }
    if walker.dwell > 0.0 {
        walker.dwell -= dt;
        return;
    }
    let goal = match walker.goal {
        Some(g) => g,
        None => {
            let g = sample_marker(ctx, &person.position, rng);
            walker.set_goal(Some(g));
            g
        }
    };
    if walk_toward(person, walker, goal, ctx, dt) {
        walker.markers_left = walker.markers_left.saturating_sub(1);
        walker.set_goal(None);
        walker.dwell = MARKER_DWELL_S;
        walker.done = walker.markers_left == 0;
    } else if stalled(walker, person, &goal, dt) {
        walker.set_goal(None);
    }
}

fn step_course(person: &mut PersonState, walker: &mut Walker, waypoints: &[Vec2], ctx: &PolicyContext, dt: f64) {
    if walker.done {
        return;
    }
    let goal = waypoints[walker.waypoint];
    if walker.goal != Some(goal) {
        walker.set_goal(Some(goal));
    }
    let arrived = walk_toward(person, walker, goal, ctx, dt);
    if arrived || stalled(walker, person, &goal, dt) {
        walker.waypoint += 1;
        walker.done = walker.waypoint >= waypoints.len();
    }
}

fn step_interferer(
    person: &mut PersonState,
    walker: &mut Walker,
    crossing_probability: f64,
    ctx: &PolicyContext,
    dt: f64,
    rng: &mut SimRng,
) {
    if walker.dwell > 0.0 {
        walker.dwell -= dt;
        return;
    }
    if let (Crossing::Approach { elapsed }, Some(target)) = (walker.crossing, ctx.target) {
        // Head for the moving midpoint of the agent→target segment.
        let mid = (ctx.agent + target) * 0.5;
        walker.goal = Some(mid);
        let close = (mid - person.position).norm() <= CROSSING_CAPTURE;
        walk_toward(person, walker, mid, ctx, dt);
        if close {
            let line = target - ctx.agent;
            let mut normal = Vec2::new(-line.y, line.x);
            if normal.norm() < 1e-9 {
                normal = unit(person.heading);
            }
            normal = normal.normalize();
            if normal.dot(&unit(person.heading)) < 0.0 {
                normal = -normal;
            }
            let mut exit = person.position + normal * CROSSING_OVERSHOOT;
            if !ctx.is_free(&exit) {
                exit = sample_marker(ctx, &person.position, rng);
            }
            walker.set_goal(Some(exit));
            walker.crossing = Crossing::Pass;
        } else if elapsed + dt > CROSSING_TIMEOUT_S {
            walker.crossing = Crossing::Idle;
            walker.set_goal(None);
        } else {
            walker.crossing = Crossing::Approach { elapsed: elapsed + dt };
        }
        return;
    }

    let goal = match walker.goal {
        Some(g) if !matches!(walker.crossing, Crossing::Approach { .. }) => g,
        _ => {
            walker.crossing = Crossing::Idle;
            let g = sample_marker(ctx, &person.position, rng);
            walker.set_goal(Some(g));
            g
        }
    };
    let arrived = walk_toward(person, walker, goal, ctx, dt);
    if arrived || stalled(walker, person, &goal, dt) {
        walker.set_goal(None);
        walker.dwell = MARKER_DWELL_S;
        let cross = ctx.target.is_some() && !ctx.self_is_target && rng.random::<f64>() < crossing_probability;
        walker.crossing = if cross { Crossing::Approach { elapsed: 0.0 } } else { Crossing::Idle };
    }
}
