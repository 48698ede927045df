use super::planner::{safer_filter, PlannerInput};
use super::servo::{goal_from_depth, pursue, visual_servo};
use super::switch::{select_camera, TargetObservation};
use super::ControlConfig;
use crate::geometry::{Pose, Vec2};
use crate::reid::{reidentify, Candidate, FeatureBank, Parts};
use crate::sensing::{BoundingBox, CameraKind, Detection, SensingConfig};
use crate::tracking::{Tracker, TrackerConfig};
use crate::world::{AgentLimits, ControlCommand, LidarScan};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Mode {
    FollowFisheye,
    FollowRgbd,
    Search,
}

impl Mode {
    pub fn following(camera: CameraKind) -> Self {
        match camera {
            CameraKind::Fisheye => Self::FollowFisheye,
            CameraKind::Rgbd => Self::FollowRgbd,
        }
    }

    pub fn is_following(self) -> bool {
        self != Self::Search
    }
}

/// Which pipeline components are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pipeline {
    pub motion_tracker: bool,
    pub parts: Parts,
    pub visual_servo: bool,
    pub path_planning: bool,
}

impl Pipeline {
    pub const FULL: Pipeline = Pipeline { motion_tracker: true, parts: Parts::BOTH, visual_servo: true, path_planning: true };
}

#[derive(Debug, Clone, PartialEq)]
pub struct FollowState {
    pub mode: Mode,
    pub target_track_id: Option<u64>,
    /// Bearing of the target when last seen; positive means to the left.
    pub last_seen_bearing: f64,
    pub last_seen_goal: Option<Vec2>,
    pub last_seen_box: Option<BoundingBox>,
    pub last_depth: Option<f64>,
    pub search_started_at: Option<f64>,
    /// ±1, fixed at search entry.
    pub spin_sign: f64,
}

impl Default for FollowState {
    fn default() -> Self {
        Self {
            mode: Mode::Search,
            target_track_id: None,
            last_seen_bearing: 0.0,
            last_seen_goal: None,
            last_seen_box: None,
            last_depth: None,
            search_started_at: None,
            spin_sign: 1.0,
        }
    }
}

/// Sensor data available to the controller for one tick.
#[derive(Debug, Clone, Copy)]
pub struct Perception<'a> {
    pub time: f64,
    pub fisheye: &'a [Detection],
    pub rgbd: &'a [Detection],
    pub lidar: &'a LidarScan,
    /// Odometry pose, used to place local goals.
    pub pose: Pose,
}

impl Perception<'_> {
    pub fn detections(&self, camera: CameraKind) -> &[Detection] {
        match camera {
            CameraKind::Fisheye => self.fisheye,
            CameraKind::Rgbd => self.rgbd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub command: ControlCommand,
    pub mode: Mode,
    pub camera: CameraKind,
    pub reid_called: bool,
    /// A new frame was processed this tick (false while stalled).
    pub fresh: bool,
    /// Ground-truth id of the person the controller is following. For
    /// evaluation only; the controller never reads it.
    pub bound_truth: Option<u32>,
}

fn other(camera: CameraKind) -> CameraKind {
    match camera {
        CameraKind::Fisheye => CameraKind::Rgbd,
        CameraKind::Rgbd => CameraKind::Fisheye,
    }
}

fn largest(boxes: impl Iterator<Item = (usize, BoundingBox)>) -> Option<usize> {
    boxes
        .max_by(|a, b| (a.1.width * a.1.height).total_cmp(&(b.1.width * b.1.height)).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
}

struct Sighting {
    obs: TargetObservation,
    truth: u32,
}

/// The follow/search state machine with its tracker and re-id latency.
#[derive(Debug, Clone)]
pub struct FollowController {
    config: ControlConfig,
    sensing: SensingConfig,
    limits: AgentLimits,
    pipeline: Pipeline,
    bank: Option<FeatureBank>,
    tracker: Tracker,
    state: FollowState,
    camera: CameraKind,
    stall: u32,
    held: ControlCommand,
    bound_truth: Option<u32>,
    reid_calls: u64,
}

impl FollowController {
    pub fn new(
        config: ControlConfig,
        sensing: SensingConfig,
        tracker: TrackerConfig,
        limits: AgentLimits,
        pipeline: Pipeline,
        bank: Option<FeatureBank>,
    ) -> Self {
        Self {
            config,
            sensing,
            limits,
            pipeline,
            bank,
            tracker: Tracker::new(tracker),
            state: FollowState::default(),
            camera: CameraKind::Rgbd,
            stall: 0,
            held: ControlCommand::STOP,
            bound_truth: None,
            reid_calls: 0,
        }
    }

    pub fn state(&self) -> &FollowState {
        &self.state
    }

    pub fn camera(&self) -> CameraKind {
        self.camera
    }

    pub fn reid_calls(&self) -> u64 {
        self.reid_calls
    }

    pub fn tracker(&self) -> &Tracker {
        &self.tracker
    }

    fn uses_reid(&self) -> bool {
        self.pipeline.parts.any() && self.bank.is_some()
    }

    fn may_switch(&self) -> bool {
        self.pipeline.visual_servo
    }

    /// Picks the target among `candidates` (`(id, detection)`), by re-id or,
    /// without it, by largest box.
    fn acquire(&self, candidates: &[Candidate]) -> Option<usize> {
        if candidates.is_empty() {
            return None;
        }
        match (&self.bank, self.pipeline.parts.any()) {
            (Some(bank), true) => reidentify(candidates, bank, self.pipeline.parts, &self.config.reid, self.state.last_seen_box.as_ref())
                .ok()
                .flatten()
                .map(|m| m.index),
            _ => largest(candidates.iter().enumerate().map(|(i, c)| (i, c.detection.body_box))),
        }
    }

    fn sighting(&self, det: &Detection) -> Sighting {
        Sighting { obs: TargetObservation { bbox: det.body_box, depth: det.depth }, truth: det.truth_id }
    }

    /// Finds the target in the active camera. Returns the sighting and
    /// whether re-id ran.
    fn observe(&mut self, p: &Perception) -> (Option<Sighting>, bool) {
        let dets = p.detections(self.camera);
        let reid;
        if self.pipeline.motion_tracker {
            self.tracker.step(dets);
            if let Some(id) = self.state.target_track_id {
                if let Some(t) = self.tracker.get(id) {
                    let fresh = t.fresh_detection();
                    let obs = TargetObservation {
                        bbox: fresh.map_or_else(|| t.bbox(), |d| d.body_box),
                        depth: fresh.and_then(|d| d.depth).or(self.state.last_depth),
                    };
                    let truth = t.last_detection.as_ref().map(|d| d.truth_id).or(self.bound_truth);
                    return (truth.map(|truth| Sighting { obs, truth }), false);
                }
                self.state.target_track_id = None;
            }
            // Every detection of this frame, tentative tracks included.
            let live: Vec<(u64, &Detection)> =
                self.tracker.tracks().iter().filter_map(|t| t.fresh_detection().map(|d| (t.id, d))).collect();
            let candidates: Vec<Candidate> = live.iter().map(|(id, d)| Candidate { id: *id, detection: d }).collect();
            reid = self.uses_reid() && !candidates.is_empty();
            if let Some(i) = self.acquire(&candidates) {
                let (id, det) = live[i];
                self.state.target_track_id = Some(id);
                return (Some(self.sighting(det)), reid);
            }
        } else {
            let candidates: Vec<Candidate> =
                dets.iter().enumerate().map(|(i, d)| Candidate { id: i as u64, detection: d }).collect();
            reid = self.uses_reid() && !candidates.is_empty();
            if let Some(i) = self.acquire(&candidates) {
                return (Some(self.sighting(&dets[i])), reid);
            }
        }
        (None, reid)
    }

    /// Looks for the target in the inactive camera; on success switches to it.
    fn observe_other(&mut self, p: &Perception) -> (Option<Sighting>, bool) {
        let cam = other(self.camera);
        let dets = p.detections(cam);
        if !self.may_switch() || dets.is_empty() {
            return (None, false);
        }
        let candidates: Vec<Candidate> = dets.iter().enumerate().map(|(i, d)| Candidate { id: i as u64, detection: d }).collect();
        let reid = self.uses_reid();
        let Some(i) = self.acquire(&candidates) else { return (None, reid) };
        let chosen = dets[i].clone();
        self.switch_to(cam);
        if self.pipeline.motion_tracker {
            let tracks = self.tracker.step(dets);
            self.state.target_track_id = tracks.iter().find(|t| t.bbox() == chosen.body_box).map(|t| t.id);
        }
        (Some(self.sighting(&chosen)), reid)
    }

    fn switch_to(&mut self, camera: CameraKind) {
        if camera != self.camera {
            self.camera = camera;
            self.tracker.reset();
            self.state.target_track_id = None;
        }
    }

    fn drive_to(&self, goal: &Vec2, p: &Perception) -> ControlCommand {
        let local = p.pose.to_local(goal);
        if self.pipeline.path_planning {
            safer_filter(&PlannerInput::Goal(local), p.lidar, &self.config.planner, &self.limits)
        } else {
            pursue(&local, &self.config.pursuit, &self.limits)
        }
    }

    fn filtered(&self, c: ControlCommand, p: &Perception) -> ControlCommand {
        if self.pipeline.path_planning {
            safer_filter(&PlannerInput::Command(c), p.lidar, &self.config.planner, &self.limits)
        } else {
            c.clamped(&self.limits)
        }
    }

    fn follow(&mut self, s: &Sighting, p: &Perception) -> ControlCommand {
        let cam = *self.sensing.camera(self.camera);
        self.state.mode = Mode::following(self.camera);
        self.state.search_started_at = None;
        self.state.last_seen_bearing = cam.bearing_of_u(s.obs.bbox.center_u);
        self.state.last_seen_box = Some(s.obs.bbox);
        if s.obs.depth.is_some() {
            self.state.last_depth = s.obs.depth;
        }
        self.bound_truth = Some(s.truth);
        let command = match self.camera {
            CameraKind::Fisheye => {
                self.state.last_seen_goal = None;
                self.filtered(visual_servo(&s.obs.bbox, &self.config.servo, &self.limits), p)
            }
            CameraKind::Rgbd => {
                let goal = s.obs.depth.and_then(|d| goal_from_depth(&s.obs.bbox, d, &p.pose, &cam, self.config.standoff));
                match goal {
                    Some(g) => {
                        self.state.last_seen_goal = Some(g);
                        self.drive_to(&g, p)
                    }
                    None => self.filtered(ControlCommand::new(0.0, -self.config.servo.k_yaw * s.obs.bbox.center_u), p),
                }
            }
        };
        if self.may_switch() {
            let next = select_camera(self.camera, Some(&s.obs), &self.config.switch);
            self.switch_to(next);
        }
        command
    }

    fn search(&mut self, p: &Perception) -> ControlCommand {
        if self.state.mode != Mode::Search || self.state.search_started_at.is_none() {
            self.state.mode = Mode::Search;
            self.state.search_started_at = Some(p.time);
            self.state.spin_sign = if self.state.last_seen_bearing < 0.0 { -1.0 } else { 1.0 };
        }
        self.state.target_track_id = None;
        self.bound_truth = None;
        let started = self.state.search_started_at.unwrap_or(p.time);
        if self.camera == CameraKind::Rgbd && p.time - started < self.config.search.goal_hold {
            if let Some(g) = self.state.last_seen_goal {
                return self.drive_to(&g, p);
            }
        }
        self.filtered(ControlCommand::new(0.0, self.state.spin_sign * self.config.search.spin_rate), p)
    }

    /// Caps the speed-up relative to the previous command.
    fn ramped(&self, c: ControlCommand) -> ControlCommand {
        let step = self.config.speed_step;
        let cap = self.held.linear.max(0.0) + step;
        if c.linear > cap {
            ControlCommand::new(cap, c.angular)
        } else {
            c
        }
    }

    /// Advances the controller by one tick.
    pub fn step(&mut self, p: &Perception) -> Decision {
        if self.stall > 0 {
            self.stall -= 1;
            return self.decision(false, false);
        }
        let (mut sighting, mut reid) = self.observe(p);
        if sighting.is_none() {
            let (s, r) = self.observe_other(p);
            sighting = s;
            reid |= r;
        }
        let command = match sighting {
            Some(s) => self.follow(&s, p),
            None => self.search(p),
        };
        self.held = self.ramped(command);
        if reid {
            self.reid_calls += 1;
        }
        // Without the tracker every frame goes through the re-id pipeline.
        if reid || (!self.pipeline.motion_tracker && self.uses_reid()) {
            self.stall = self.config.latency.stall_ticks();
        }
        self.decision(true, reid)
    }

    fn decision(&self, fresh: bool, reid_called: bool) -> Decision {
        Decision {
            command: self.held,
            mode: self.state.mode,
            camera: self.camera,
            reid_called,
            fresh,
            bound_truth: self.bound_truth,
        }
    }
}

/// One controller tick; see [`FollowController::step`].
pub fn follow_step(controller: &mut FollowController, perception: &Perception) -> Decision {
    controller.step(perception)
}
