//! Experiment configuration files.
//!
//! A file describes one scenario (arena, obstacles, persons, protocol) plus
//! optional overrides for every pipeline stage and an optional `[suite]`
//! table. Anything left out takes the value of the built-in office scenario.
//!
//! ```toml
//! seed = 3
//! tick_rate = 30.0
//!
//! [arena]
//! min = [0.0, 0.0]
//! max = [10.0, 8.0]
//!
//! [[obstacles]]
//! kind = "desk"
//! rect = { min = [2.0, 5.6], max = [3.8, 6.4] }
//!
//! [[persons]]
//! role = "target"
//! position = [2.6, 4.0]
//!
//! [protocol]
//! kind = "random_markers"
//! count = 15
//!
//! [suite]
//! variants = ["ours", "ours_wo_reid"]
//! seed_count = 25
//! ```

use crate::control::ControlConfig;
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Pose, Vec2};
use crate::harness::{office_markers, MetricsConfig, ParticipantConfig, Protocol, SimConfig, VariantConfig, PRESET_NAMES};
use crate::reid::RegistrationConfig;
use crate::sensing::SensingConfig;
use crate::tracking::TrackerConfig;
use crate::world::{AgentLimits, LidarConfig, Obstacle, Role};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PersonEntry {
    pub role: Role,
    pub position: Vec2,
    #[serde(default)]
    pub heading: f64,
    /// Walking speed, m/s. For the target this replaces the participant
    /// speed range.
    #[serde(default)]
    pub speed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentEntry {
    #[serde(default)]
    pub start: Option<Pose>,
    #[serde(flatten)]
    pub limits: AgentLimits,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSection {
    /// Preset names; empty means all of them in table order.
    #[serde(default)]
    pub variants: Vec<String>,
    /// Explicit seeds. When empty, `seed_count` seeds starting at the
    /// file's `seed` are used.
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub seed_count: Option<u64>,
    /// Further scenario files, relative to this file. This file's own
    /// scenario is always included first.
    #[serde(default)]
    pub scenarios: Vec<PathBuf>,
}

/// The on-disk configuration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub name: Option<String>,
    /// Default trial seed.
    #[serde(default)]
    pub seed: u64,
    pub tick_rate: Option<f64>,
    pub arena: Option<Aabb>,
    pub obstacles: Option<Vec<Obstacle>>,
    #[serde(default)]
    pub persons: Vec<PersonEntry>,
    pub agent: Option<AgentEntry>,
    pub lidar: Option<LidarConfig>,
    pub protocol: Option<Protocol>,
    pub participants: Option<ParticipantConfig>,
    pub crossing_probability: Option<f64>,
    pub max_duration: Option<f64>,
    pub registration: Option<RegistrationConfig>,
    pub sensing: Option<SensingConfig>,
    pub tracker: Option<TrackerConfig>,
    pub control: Option<ControlConfig>,
    pub metrics: Option<MetricsConfig>,
    pub suite: Option<SuiteSection>,
}

/// Seeds used when neither `seeds` nor `seed_count` is given.
pub const DEFAULT_SEED_COUNT: u64 = 25;

impl ConfigFile {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Builds and validates the simulation configuration.
    pub fn sim_config(&self) -> Result<SimConfig> {
        let mut scenario = office_markers();
        if let Some(name) = &self.name {
            scenario.name = name.clone();
        }
        let world = &mut scenario.world;
        if let Some(rate) = self.tick_rate {
            world.tick_rate = rate;
        }
        if let Some(arena) = self.arena {
            world.arena = arena;
        }
        if let Some(obstacles) = &self.obstacles {
            world.obstacles = obstacles.clone();
        }
        if let Some(agent) = &self.agent {
            world.agent = agent.limits;
            if let Some(start) = agent.start {
                scenario.agent_start = start;
            }
        }
        if let Some(lidar) = self.lidar {
            world.lidar = lidar;
        }
        if let Some(p) = &self.protocol {
            scenario.protocol = p.clone();
        }
        if let Some(p) = &self.participants {
            scenario.participants = p.clone();
        }
        if let Some(p) = self.crossing_probability {
            scenario.crossing_probability = p;
        }
        if let Some(d) = self.max_duration {
            scenario.max_duration = d;
        }
        if let Some(r) = self.registration {
            scenario.registration = r;
        }
        let mut seen = [false; 2];
        for person in &self.persons {
            let slot = match person.role {
                Role::Target => 0,
                Role::Interferer => 1,
            };
            if std::mem::replace(&mut seen[slot], true) {
                return Err(Error::Config(format!("more than one {:?} in persons", person.role)));
            }
            match person.role {
                Role::Target => {
                    scenario.target_start = Pose::new(person.position.x, person.position.y, person.heading);
                    if let Some(v) = person.speed {
                        scenario.participants.speed_min = v;
                        scenario.participants.speed_max = v;
                    }
                }
                Role::Interferer => {
                    scenario.interferer_start = person.position;
                    if let Some(v) = person.speed {
                        scenario.participants.interferer_speed = v;
                    }
                }
            }
        }

        let mut control = self.control.unwrap_or_default();
        if self.control.is_none() {
            control.latency.camera_fps = scenario.world.tick_rate;
        }
        let config = SimConfig {
            scenario,
            sensing: self.sensing.clone().unwrap_or_default(),
            tracker: self.tracker.unwrap_or_default(),
            control,
            metrics: self.metrics.unwrap_or_default(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn variants(&self) -> Result<Vec<VariantConfig>> {
        let names: Vec<&str> = match &self.suite {
            Some(s) if !s.variants.is_empty() => s.variants.iter().map(String::as_str).collect(),
            _ => PRESET_NAMES.to_vec(),
        };
        names
            .into_iter()
            .map(VariantConfig::preset)
            .collect()
    }

    pub fn seeds(&self) -> Vec<u64> {
        match &self.suite {
            Some(s) if !s.seeds.is_empty() => s.seeds.clone(),
            s => {
                let n = s.as_ref().and_then(|s| s.seed_count).unwrap_or(DEFAULT_SEED_COUNT);
                (self.seed..self.seed + n).collect()
            }
        }
    }
}

/// A loaded suite: scenarios × variants × seeds.
#[derive(Debug, Clone)]
pub struct SuitePlan {
    pub scenarios: Vec<SimConfig>,
    pub variants: Vec<VariantConfig>,
    pub seeds: Vec<u64>,
}

/// Loads a suite file and every scenario file it refers to.
pub fn load_suite(path: &Path) -> Result<SuitePlan> {
    let file = ConfigFile::load(path)?;
    let mut scenarios = vec![file.sim_config()?];
    let base = path.parent().unwrap_or(Path::new("."));
    for extra in file.suite.iter().flat_map(|s| &s.scenarios) {
        scenarios.push(ConfigFile::load(&base.join(extra))?.sim_config()?);
    }
    Ok(SuitePlan { scenarios, variants: file.variants()?, seeds: file.seeds() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_office_scenario() {
        let c = ConfigFile::from_toml_str("").unwrap().sim_config().unwrap();
        assert_eq!(c, SimConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ConfigFile::from_toml_str("tickrate = 30").is_err());
    }

    #[test]
    fn persons_override_starts() {
        let f = ConfigFile::from_toml_str(
            r#"
            [[persons]]
            role = "target"
            position = [3.0, 3.0]
            heading = 1.0
            speed = 0.9
            [[persons]]
            role = "interferer"
            position = [8.5, 3.0]
            "#,
        )
        .unwrap();
        let c = f.sim_config().unwrap();
        assert_eq!(c.scenario.target_start.position, Vec2::new(3.0, 3.0));
        assert_eq!(c.scenario.participants.speed(3), 0.9);
        assert_eq!(c.scenario.interferer_start, Vec2::new(8.5, 3.0));
    }

    #[test]
    fn duplicate_target_is_an_error() {
        let f = ConfigFile::from_toml_str(
            "[[persons]]\nrole = \"target\"\nposition = [3.0, 3.0]\n[[persons]]\nrole = \"target\"\nposition = [4.0, 3.0]\n",
        )
        .unwrap();
        assert!(f.sim_config().is_err());
    }

    #[test]
    fn seeds_default_to_a_range_from_seed() {
        let f = ConfigFile::from_toml_str("seed = 10\n[suite]\nseed_count = 3").unwrap();
        assert_eq!(f.seeds(), vec![10, 11, 12]);
        let f = ConfigFile::from_toml_str("[suite]\nseeds = [4, 9]").unwrap();
        assert_eq!(f.seeds(), vec![4, 9]);
        assert_eq!(ConfigFile::default().seeds().len(), DEFAULT_SEED_COUNT as usize);
    }

    #[test]
    fn unknown_variant_is_an_error() {
        let f = ConfigFile::from_toml_str("[suite]\nvariants = [\"nope\"]").unwrap();
        assert!(f.variants().is_err());
    }

    #[test]
    fn blocked_start_fails_validation() {
        let f = ConfigFile::from_toml_str("[[persons]]\nrole = \"target\"\nposition = [3.0, 6.0]").unwrap();
        assert!(f.sim_config().is_err());
    }
}
