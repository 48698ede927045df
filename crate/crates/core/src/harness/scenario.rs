use crate::error::{Error, Result};
use crate::geometry::{Aabb, Pose, Vec2};
use crate::reid::RegistrationConfig;
use crate::rng::{keyed, Stream};
use crate::sensing::IdentityProfile;
use crate::world::{Obstacle, ObstacleKind, PersonState, PolicySpec, Role, WorldConfig};
use serde::{Deserialize, Serialize};

pub const TARGET_ID: u32 = 1;
pub const INTERFERER_ID: u32 = 2;

/// How the target moves during a trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Protocol {
    RandomMarkers { count: usize },
    Course { waypoints: Vec<Vec2> },
}

impl Protocol {
    pub fn policy(&self) -> PolicySpec {
        match self {
            Protocol::RandomMarkers { count } => PolicySpec::RandomMarkers { count: *count },
            Protocol::Course { waypoints } => PolicySpec::Course { waypoints: waypoints.clone() },
        }
    }
}

/// The simulated participants: identity profiles drawn from a fixed seed and
/// evenly spaced walking speeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParticipantConfig {
    pub count: usize,
    pub speed_min: f64,
    pub speed_max: f64,
    /// Seed of the identity profiles; independent of trial seeds.
    pub identity_seed: u64,
    pub interferer_speed: f64,
}

impl Default for ParticipantConfig {
    fn default() -> Self {
        Self { count: 5, speed_min: 0.8, speed_max: 1.4, identity_seed: 2024, interferer_speed: 1.0 }
    }
}

impl ParticipantConfig {
    pub fn validate(&self) -> Result<()> {
        let speeds_ok = 0.0 < self.speed_min
            && self.speed_min <= self.speed_max
            && self.speed_max <= crate::world::MAX_PERSON_SPEED
            && (0.0..=crate::world::MAX_PERSON_SPEED).contains(&self.interferer_speed);
        if self.count == 0 || !speeds_ok {
            return Err(Error::Config("participants: need ≥1 participant and speeds within (0, 2.5] m/s".into()));
        }
        Ok(())
    }

    pub fn index_for(&self, seed: u64) -> usize {
        (seed % self.count as u64) as usize
    }

    pub fn speed(&self, index: usize) -> f64 {
        if self.count == 1 {
            return self.speed_min;
        }
        self.speed_min + (self.speed_max - self.speed_min) * index as f64 / (self.count - 1) as f64
    }

    pub fn profile(&self, index: usize, dim: usize) -> IdentityProfile {
        IdentityProfile::random(dim, &mut keyed(self.identity_seed, Stream::Identity, index as u64))
    }

    /// A fresh identity for the interferer of one trial.
    pub fn interferer_profile(&self, seed: u64, dim: usize) -> IdentityProfile {
        IdentityProfile::random(dim, &mut keyed(self.identity_seed, Stream::Identity, (1 << 32) + seed))
    }
}

/// Everything a trial needs besides the pipeline variant and the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioSpec {
    pub name: String,
    pub world: WorldConfig,
    pub protocol: Protocol,
    pub participants: ParticipantConfig,
    pub registration: RegistrationConfig,
    pub crossing_probability: f64,
    pub agent_start: Pose,
    pub target_start: Pose,
    pub interferer_start: Vec2,
    /// Hard stop for a trial, seconds.
    pub max_duration: f64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        office_markers()
    }
}

/// A 10 × 8 m office with desks, chairs, a cabinet and a partition wall; the
/// target visits 15 random markers.
pub fn office_markers() -> ScenarioSpec {
    let mut world = WorldConfig::empty(Aabb::new(0.0, 0.0, 10.0, 8.0));
    world.obstacles = vec![
        Obstacle::rect(ObstacleKind::Desk, 2.0, 5.6, 3.8, 6.4),
        Obstacle::rect(ObstacleKind::Desk, 6.2, 1.4, 7.8, 2.2),
        Obstacle::rect(ObstacleKind::Cabinet, 9.4, 3.0, 10.0, 4.6),
        Obstacle::rect(ObstacleKind::Wall, 5.0, 6.4, 5.2, 8.0),
        Obstacle::circle(ObstacleKind::Chair, 3.2, 2.4, 0.3),
        Obstacle::circle(ObstacleKind::Chair, 7.2, 5.6, 0.3),
        Obstacle::circle(ObstacleKind::Chair, 5.2, 3.8, 0.25),
    ];
    ScenarioSpec {
        name: "office_markers".into(),
        world,
        protocol: Protocol::RandomMarkers { count: 15 },
        participants: ParticipantConfig::default(),
        registration: RegistrationConfig::default(),
        crossing_probability: 0.5,
        agent_start: Pose::new(1.0, 4.0, 0.0),
        target_start: Pose::new(2.6, 4.0, 0.0),
        interferer_start: Vec2::new(8.5, 6.5),
        max_duration: 300.0,
    }
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        self.world.validate()?;
        self.participants.validate()?;
        self.registration.validate()?;
        if !(0.0..=1.0).contains(&self.crossing_probability) {
            return Err(Error::Config("crossing_probability must lie in [0, 1]".into()));
        }
        if !(self.max_duration > 0.0) {
            return Err(Error::Config("max_duration must be positive".into()));
        }
        for (what, p) in [("target", self.target_start.position), ("interferer", self.interferer_start)] {
            if !self.world.is_free(&p, crate::world::PERSON_RADIUS) {
                return Err(Error::Config(format!("{what} start position is blocked")));
            }
        }
        self.protocol.policy().validate(&self.world)
    }

    /// Persons and their policies for one trial.
    pub fn persons(&self, participant: usize) -> Vec<(PersonState, PolicySpec)> {
        let speed = self.participants.speed(participant);
        let t = &self.target_start;
        let heading_in = (self.target_start.position - self.interferer_start).y.atan2((self.target_start.position - self.interferer_start).x);
        vec![
            (PersonState::new(TARGET_ID, Role::Target, t.position, t.heading, speed), self.protocol.policy()),
            (
                PersonState::new(INTERFERER_ID, Role::Interferer, self.interferer_start, heading_in, self.participants.interferer_speed),
                PolicySpec::InterfererRandomWalk { crossing_probability: self.crossing_probability },
            ),
        ]
    }
}
