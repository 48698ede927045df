//! Deterministic 2D world: unicycle agent, scripted persons, obstacles.
//!
//! The world advances on a fixed clock. Collisions never abort a run: the
//! offending body keeps its pre-step position and the event is counted.

mod lidar;
mod person;
mod trajectory;

pub use lidar::{lidar_scan, scan_from, LidarConfig, LidarScan};
pub use person::{person_policy_step, PolicyContext, PolicySpec, Walker};
pub use trajectory::TrajectoryRecorder;

use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, Aabb, Pose, Shape, Vec2};
use crate::rng::{self, SimRng, Stream};
use serde::{Deserialize, Serialize};

/// Persons are lidar- and collision-visible as circles of this radius.
pub const PERSON_RADIUS: f64 = 0.25;
pub const MAX_PERSON_SPEED: f64 = 2.5;
pub const DEFAULT_PERSON_HEIGHT: f64 = 1.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstacleKind {
    Chair,
    Desk,
    Wall,
    Cabinet,
}

impl ObstacleKind {
    /// Whether a standing person behind it is hidden from the cameras.
    /// Chairs and desks are below head and shoulder height.
    pub fn blocks_view(self) -> bool {
        matches!(self, Self::Wall | Self::Cabinet)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub kind: ObstacleKind,
    #[serde(flatten)]
    pub shape: Shape,
}

impl Obstacle {
    pub fn rect(kind: ObstacleKind, x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { kind, shape: Shape::Rect(Aabb::new(x0, y0, x1, y1)) }
    }

    pub fn circle(kind: ObstacleKind, x: f64, y: f64, radius: f64) -> Self {
        Self { kind, shape: Shape::Circle { center: Vec2::new(x, y), radius } }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentLimits {
    pub v_max: f64,
    pub omega_max: f64,
    pub radius: f64,
}

impl Default for AgentLimits {
    fn default() -> Self {
        Self { v_max: 1.5, omega_max: 1.5, radius: 0.3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldConfig {
    pub arena: Aabb,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    #[serde(default = "default_tick_rate")]
    pub tick_rate: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub agent: AgentLimits,
    #[serde(default)]
    pub lidar: LidarConfig,
}

fn default_tick_rate() -> f64 {
    30.0
}

impl WorldConfig {
    pub fn empty(arena: Aabb) -> Self {
        Self {
            arena,
            obstacles: Vec::new(),
            tick_rate: default_tick_rate(),
            seed: 0,
            agent: AgentLimits::default(),
            lidar: LidarConfig::default(),
        }
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.tick_rate
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tick_rate.is_finite() && self.tick_rate > 0.0) {
            return Err(Error::Config(format!("tick_rate must be positive, got {}", self.tick_rate)));
        }
        if !(self.arena.width() > 0.0 && self.arena.height() > 0.0) {
            return Err(Error::Config("arena bounds are degenerate".into()));
        }
        let a = &self.agent;
        if !(a.v_max > 0.0 && a.omega_max > 0.0 && a.radius > 0.0) {
            return Err(Error::Config("agent limits must be positive".into()));
        }
        if self.lidar.rays == 0 || !(self.lidar.max_range > 0.0) {
            return Err(Error::Config("lidar needs at least one ray and a positive range".into()));
        }
        // Largest per-tick displacement of any body must stay below the thinnest
        // obstacle, otherwise a body could step across it between two ticks.
        let max_step = a.v_max.max(MAX_PERSON_SPEED) / self.tick_rate;
        for (i, o) in self.obstacles.iter().enumerate() {
            let ok = match o.shape {
                Shape::Rect(r) => r.width() > 0.0 && r.height() > 0.0,
                Shape::Circle { radius, .. } => radius > 0.0,
            };
            if !ok {
                return Err(Error::Config(format!("obstacle {i} has no area")));
            }
            if !self.arena.contains_aabb(&o.shape.bounds()) {
                return Err(Error::Config(format!("obstacle {i} lies outside the arena")));
            }
            if o.shape.thickness() <= max_step {
                return Err(Error::Config(format!(
                    "obstacle {i} is thinner ({:.3} m) than the per-tick displacement ({max_step:.3} m)",
                    o.shape.thickness()
                )));
            }
        }
        Ok(())
    }

    /// True if a disc of `radius` at `p` lies inside the arena and clear of obstacles.
    pub fn is_free(&self, p: &Vec2, radius: f64) -> bool {
        self.arena.contains(p)
            && self.arena.inner_distance(p) >= radius
            && self.obstacles.iter().all(|o| o.shape.distance(p) >= radius)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Target,
    Interferer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonState {
    pub id: u32,
    pub position: Vec2,
    pub heading: f64,
    pub speed: f64,
    pub height: f64,
    pub role: Role,
}

impl PersonState {
    pub fn new(id: u32, role: Role, position: Vec2, heading: f64, speed: f64) -> Self {
        Self {
            id,
            position,
            heading: normalize_angle(heading),
            speed: speed.clamp(0.0, MAX_PERSON_SPEED),
            height: DEFAULT_PERSON_HEIGHT,
            role,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub pose: Pose,
    pub linear_velocity: f64,
    pub angular_velocity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlCommand {
    pub linear: f64,
    pub angular: f64,
}

impl ControlCommand {
    pub const STOP: ControlCommand = ControlCommand { linear: 0.0, angular: 0.0 };

    pub fn new(linear: f64, angular: f64) -> Self {
        Self { linear, angular }
    }

    pub fn is_finite(&self) -> bool {
        self.linear.is_finite() && self.angular.is_finite()
    }

    /// Clamps into actuator bounds; non-finite components become zero.
    pub fn clamped(&self, limits: &AgentLimits) -> Self {
        let f = |x: f64, m: f64| if x.is_finite() { x.clamp(-m, m) } else { 0.0 };
        Self { linear: f(self.linear, limits.v_max), angular: f(self.angular, limits.omega_max) }
    }

    pub fn within(&self, limits: &AgentLimits) -> bool {
        self.is_finite()
            && self.linear.abs() <= limits.v_max + 1e-12
            && self.angular.abs() <= limits.omega_max + 1e-12
    }
}

#[derive(Debug, Clone)]
pub struct SimPerson {
    pub state: PersonState,
    pub walker: Walker,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepReport {
    pub agent_collision: bool,
}

#[derive(Debug, Clone)]
pub struct World {
    config: WorldConfig,
    agent: AgentState,
    persons: Vec<SimPerson>,
    tick: u64,
    rng: SimRng,
    collisions: u64,
}

impl World {
    pub fn new(config: WorldConfig, agent_start: Pose, persons: Vec<(PersonState, PolicySpec)>) -> Result<Self> {
        config.validate()?;
        if !config.is_free(&agent_start.position, config.agent.radius) {
            return Err(Error::Config("agent start pose is not free".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut sim_persons = Vec::with_capacity(persons.len());
        for (state, spec) in persons {
            if !seen.insert(state.id) {
                return Err(Error::Config(format!("duplicate person id {}", state.id)));
            }
            if !config.arena.contains(&state.position) {
                return Err(Error::Config(format!("person {} starts outside the arena", state.id)));
            }
            spec.validate(&config)?;
            sim_persons.push(SimPerson { state, walker: Walker::new(spec) });
        }
        let rng = rng::stream(config.seed, Stream::World);
        Ok(Self {
            config,
            agent: AgentState { pose: agent_start, linear_velocity: 0.0, angular_velocity: 0.0 },
            persons: sim_persons,
            tick: 0,
            rng,
            collisions: 0,
        })
    }

    pub fn config(&self) -> &WorldConfig {
        &self.config
    }

    pub fn agent(&self) -> &AgentState {
        &self.agent
    }

    pub fn persons(&self) -> impl Iterator<Item = &PersonState> {
        self.persons.iter().map(|p| &p.state)
    }

    pub fn person(&self, id: u32) -> Option<&PersonState> {
        self.persons().find(|p| p.id == id)
    }

    pub fn target(&self) -> Option<&PersonState> {
        self.persons().find(|p| p.role == Role::Target)
    }

    /// Overrides a person's heading, e.g. for scripted registration poses.
    pub fn set_person_heading(&mut self, id: u32, heading: f64) {
        if let Some(p) = self.persons.iter_mut().find(|p| p.state.id == id) {
            p.state.heading = normalize_angle(heading);
        }
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn time(&self) -> f64 {
        self.tick as f64 / self.config.tick_rate
    }

    pub fn collisions(&self) -> u64 {
        self.collisions
    }

    /// True once every person with a finite protocol (markers, course) is done.
    pub fn protocol_complete(&self) -> bool {
        self.persons.iter().all(|p| p.walker.is_done())
    }

    pub fn step(&mut self, command: ControlCommand) -> StepReport {
        let dt = self.config.dt();
        let cmd = command.clamped(&self.config.agent);
        let mut report = StepReport::default();

        let pose = self.agent.pose;
        let next = pose.position + Vec2::new(pose.heading.cos(), pose.heading.sin()) * (cmd.linear * dt);
        let heading = normalize_angle(pose.heading + cmd.angular * dt);
        let r = self.config.agent.radius;
        let blocked = next != pose.position
            && (!self.config.is_free(&next, r)
                || self
                    .persons
                    .iter()
                    .any(|p| (p.state.position - next).norm() < r + PERSON_RADIUS
                        && (p.state.position - next).norm() < (p.state.position - pose.position).norm()));
        if blocked {
            report.agent_collision = true;
            self.collisions += 1;
            self.agent = AgentState {
                pose: Pose { position: pose.position, heading },
                linear_velocity: 0.0,
                angular_velocity: cmd.angular,
            };
        } else {
            self.agent = AgentState {
                pose: Pose { position: next, heading },
                linear_velocity: cmd.linear,
                angular_velocity: cmd.angular,
            };
        }

        let target_pos = self.target().map(|t| t.position);
        for i in 0..self.persons.len() {
            let ctx = PolicyContext {
                world: &self.config,
                agent: self.agent.pose.position,
                target: target_pos,
                self_is_target: self.persons[i].state.role == Role::Target,
            };
            let SimPerson { state, walker } = &mut self.persons[i];
            person_policy_step(state, walker, &ctx, dt, &mut self.rng);
        }
        self.tick += 1;
        report
    }
}
