use super::log::{LogHeader, TickLog, TickRecord};
use super::metrics::{compute_metrics, TrialMetrics};
use super::scenario::{ScenarioSpec, INTERFERER_ID, TARGET_ID};
use super::variant::VariantConfig;
use crate::control::{ControlConfig, FollowController, Mode, Perception};
use crate::error::{Error, Result};
use crate::reid::{register_target, FeatureBank};
use crate::rng::{stream, Stream};
use crate::sensing::{ProfileBook, Sensor, SensingConfig};
use crate::tracking::TrackerConfig;
use crate::world::{lidar_scan, scan_from, TrajectoryRecorder, World};
use serde::{Deserialize, Serialize};

/// Everything that parameterizes a trial apart from variant and seed.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub scenario: ScenarioSpec,
    pub sensing: SensingConfig,
    pub tracker: TrackerConfig,
    pub control: ControlConfig,
    pub metrics: MetricsConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricsConfig {
    /// Seconds a misbinding must exceed to count as following the wrong person.
    pub wrong_person_min_duration: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self { wrong_person_min_duration: 1.0 }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.sensing.validate()?;
        self.tracker.validate()?;
        self.control.validate(&self.scenario.world.agent)?;
        if !(self.metrics.wrong_person_min_duration >= 0.0) {
            return Err(Error::Config("wrong_person_min_duration must be non-negative".into()));
        }
        if (self.control.latency.camera_fps - self.scenario.world.tick_rate).abs() > 1e-9 {
            return Err(Error::Config("latency.camera_fps must equal the world tick rate".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub scenario: String,
    pub variant: String,
    pub seed: u64,
    pub participant: usize,
    #[serde(flatten)]
    pub metrics: TrialMetrics,
}

#[derive(Debug, Clone)]
pub struct Trial {
    pub result: TrialResult,
    pub log: TickLog,
    /// Present when requested through [`TrialOptions::record_trajectory`].
    pub trajectory: Option<TrajectoryRecorder>,
}

#[derive(Debug, Clone, Default)]
pub struct TrialOptions {
    /// Use this bank instead of registering the participant.
    pub bank: Option<FeatureBank>,
    pub record_trajectory: bool,
}

/// Registers the participant of `seed` with the scenario's registration mode.
pub fn register_participant(config: &SimConfig, seed: u64) -> Result<FeatureBank> {
    let s = &config.scenario;
    let participant = s.participants.index_for(seed);
    let profile = s.participants.profile(participant, config.sensing.embedding.dim);
    Ok(register_target(&profile, &config.sensing, &s.registration, s.world.tick_rate, seed)?.bank)
}

/// Runs one closed-loop trial and derives its metrics from the tick log.
///
/// Variants without any identification model skip registration and follow
/// whichever tracked person is largest in view.
pub fn run_trial(config: &SimConfig, variant: &VariantConfig, seed: u64) -> Result<Trial> {
    run_trial_with(config, variant, seed, TrialOptions::default())
}

pub fn run_trial_with(config: &SimConfig, variant: &VariantConfig, seed: u64, options: TrialOptions) -> Result<Trial> {
    config.validate()?;
    variant.validate()?;
    let s = &config.scenario;
    let participant = s.participants.index_for(seed);
    let dim = config.sensing.embedding.dim;
    let profiles: ProfileBook = [
        (TARGET_ID, s.participants.profile(participant, dim)),
        (INTERFERER_ID, s.participants.interferer_profile(seed, dim)),
    ]
    .into_iter()
    .collect();

    let bank = match (variant.uses_reid(), options.bank) {
        (false, _) => None,
        (true, Some(bank)) => {
            if bank.dim() != dim {
                return Err(Error::Config(format!("bank dimension {} does not match embedding dimension {dim}", bank.dim())));
            }
            Some(bank)
        }
        (true, None) => Some(register_participant(config, seed)?),
    };

    let mut world_config = s.world.clone();
    world_config.seed = seed;
    let mut world = World::new(world_config, s.agent_start, s.persons(participant))?;
    let mut controller =
        FollowController::new(config.control, config.sensing, config.tracker, s.world.agent, variant.pipeline(), bank);
    let mut fisheye = Sensor::new(config.sensing.fisheye, stream(seed, Stream::Fisheye));
    let mut rgbd = Sensor::new(config.sensing.rgbd, stream(seed, Stream::Rgbd));

    let header = LogHeader {
        seed,
        variant: variant.name.clone(),
        scenario: s.name.clone(),
        participant,
        target_id: TARGET_ID,
        tick_rate: s.world.tick_rate,
        give_up_after: config.control.search.give_up_after,
        wrong_person_min_duration: config.metrics.wrong_person_min_duration,
    };
    let max_ticks = (s.max_duration * s.world.tick_rate).ceil() as u64;
    let give_up_ticks = (header.give_up_after * header.tick_rate).round() as u64;
    let mut ticks = Vec::new();
    let mut search_run = 0u64;
    let mut trajectory = options.record_trajectory.then(TrajectoryRecorder::default);

    while world.tick() < max_ticks {
        if let Some(rec) = trajectory.as_mut() {
            rec.record(&world);
        }
        let scan = lidar_scan(&world);
        let fdets = fisheye.observe(&world, &profiles, &config.sensing);
        let rdets = rgbd.observe(&world, &profiles, &config.sensing);
        let pose = world.agent().pose;
        let decision = controller.step(&Perception { time: world.time(), fisheye: &fdets, rgbd: &rdets, lidar: &scan, pose });
        let obstacle_distance = scan_from(&pose, world.config(), std::iter::empty()).min_range();
        let target_distance = world.target().map_or(f64::NAN, |t| (t.position - pose.position).norm());
        let (tick, t) = (world.tick(), world.time());
        let report = world.step(decision.command);
        let agent = world.agent();
        ticks.push(TickRecord {
            tick,
            t,
            mode: decision.mode,
            camera: decision.camera,
            x: pose.position.x,
            y: pose.position.y,
            theta: pose.heading,
            v: agent.linear_velocity,
            omega: agent.angular_velocity,
            target_distance,
            obstacle_distance,
            bound_truth: decision.bound_truth,
            reid_called: decision.reid_called,
            fresh: decision.fresh,
            collision: report.agent_collision,
        });
        search_run = if decision.mode == Mode::Search { search_run + 1 } else { 0 };
        if world.protocol_complete() || search_run >= give_up_ticks {
            break;
        }
    }

    let log = TickLog { header, ticks };
    let metrics = compute_metrics(&log)?;
    Ok(Trial { result: TrialResult { scenario: s.name.clone(), variant: variant.name.clone(), seed, participant, metrics }, log, trajectory })
}
