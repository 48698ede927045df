use super::bbox::{iou, BoundingBox};
use super::camera::{CameraKind, CameraModel};
use super::embedding::{synth_embedding, BodyPart, Embedding, EmbeddingParams, IdentityProfile};
use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, Pose, Vec2};
use crate::rng::SimRng;
use crate::world::{Obstacle, PersonState, World, PERSON_RADIUS};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

/// IoU a detected face must strictly exceed to be assigned to a body.
pub const FACE_MATCH_IOU: f64 = 0.75;

const TORSO_TOP: f64 = 0.20;
const TORSO_BOTTOM: f64 = 0.55;
const TORSO_WIDTH: f64 = 0.60;
const FACE_SIDE: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensingConfig {
    pub fisheye: CameraModel,
    pub rgbd: CameraModel,
    pub miss_probability: f64,
    /// Std-dev of body box center/size noise, image units.
    pub box_jitter: f64,
    /// Face detector box noise as a fraction of the face side.
    pub face_jitter: f64,
    /// Pose keypoint noise as a fraction of the face side.
    pub keypoint_jitter: f64,
    /// Largest displacement of the pose-induced face box, in face widths,
    /// when the person faces away.
    pub back_face_error: f64,
    pub depth_noise: f64,
    /// Faces are detectable while |view angle| is below this (radians).
    pub face_visibility_angle: f64,
    pub min_face_height: f64,
    /// Lateral offset below which a nearer person hides a farther one.
    pub occlusion_offset: f64,
    pub embedding: EmbeddingParams,
}

impl Default for SensingConfig {
    fn default() -> Self {
        Self {
            fisheye: CameraModel::fisheye(),
            rgbd: CameraModel::rgbd(),
            miss_probability: 0.05,
            box_jitter: 0.01,
            face_jitter: 0.03,
            keypoint_jitter: 0.03,
            back_face_error: 0.5,
            depth_noise: 0.03,
            face_visibility_angle: FRAC_PI_2,
            min_face_height: 0.02,
            occlusion_offset: 0.3,
            embedding: EmbeddingParams::default(),
        }
    }
}

impl SensingConfig {
    pub fn camera(&self, kind: CameraKind) -> &CameraModel {
        match kind {
            CameraKind::Fisheye => &self.fisheye,
            CameraKind::Rgbd => &self.rgbd,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.fisheye.validate()?;
        self.rgbd.validate()?;
        let probs_ok = (0.0..=1.0).contains(&self.miss_probability);
        let noise_ok = [self.box_jitter, self.face_jitter, self.keypoint_jitter, self.back_face_error, self.depth_noise]
            .iter()
            .all(|x| x.is_finite() && *x >= 0.0);
        let emb = &self.embedding;
        if !probs_ok || !noise_ok || emb.dim < 4 || emb.alpha < 0.0 || emb.sigma < 0.0 {
            return Err(Error::Config("sensing noise parameters out of range".into()));
        }
        Ok(())
    }
}

/// One person as seen by a camera.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub body_box: BoundingBox,
    pub torso_box: BoundingBox,
    pub face_box: Option<BoundingBox>,
    pub torso_embedding: Embedding,
    pub face_embedding: Option<Embedding>,
    pub depth: Option<f64>,
    /// Ground-truth identity. Only the harness may read it.
    pub truth_id: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceDetection {
    pub face_box: BoundingBox,
    pub embedding: Embedding,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseBoxes {
    pub face: Option<BoundingBox>,
    pub torso: BoundingBox,
}

fn gauss(rng: &mut SimRng) -> f64 {
    rng.sample::<f64, _>(StandardNormal)
}

/// Face square (in pixels) on the head of `body`.
fn head_box(body: &BoundingBox, aspect: f64) -> BoundingBox {
    let side = FACE_SIDE * body.height;
    BoundingBox::new(body.center_u, body.top() + 0.5 * side, 0.5 * side / aspect, side)
}

/// Face and torso boxes implied by body keypoints.
///
/// The torso box is the 20 %–55 % band of the body height, 60 % of its width.
/// The face box is a square of side 0.15·height on the head; when the person
/// faces away (|view| > 90°) it is displaced by up to `back_face_error` face
/// widths, since ear keypoints are unreliable from behind.
pub fn pose_boxes(body: &BoundingBox, view_angle: f64, aspect: f64, cfg: &SensingConfig, rng: &mut SimRng) -> PoseBoxes {
    let torso = BoundingBox::new(
        body.center_u,
        body.top() + 0.5 * (TORSO_TOP + TORSO_BOTTOM) * body.height,
        TORSO_WIDTH * body.width,
        (TORSO_BOTTOM - TORSO_TOP) * body.height,
    );
    let mut face = head_box(body, aspect);
    if face.height <= 0.0 {
        return PoseBoxes { face: None, torso };
    }
    let side_v = face.height;
    let side_u = 2.0 * face.width;
    face.center_u += cfg.keypoint_jitter * side_u * gauss(rng);
    face.center_v += cfg.keypoint_jitter * side_v * gauss(rng);
    if view_angle.abs() > FRAC_PI_2 {
        let mag = rng.random::<f64>() * cfg.back_face_error;
        let dir = rng.random::<f64>() * std::f64::consts::TAU;
        face.center_u += mag * side_u * dir.cos();
        face.center_v += mag * side_v * dir.sin();
    }
    PoseBoxes { face: Some(face), torso }
}

/// Face detector output for one person, if the face is visible.
///
/// A face is found iff |view angle| < `face_visibility_angle` and its apparent
/// height exceeds `min_face_height`.
pub fn synth_face(
    profile: &IdentityProfile,
    view_angle: f64,
    body: &BoundingBox,
    camera: &CameraModel,
    cfg: &SensingConfig,
    rng: &mut SimRng,
) -> Option<FaceDetection> {
    let mut face = head_box(body, camera.aspect);
    if view_angle.abs() >= cfg.face_visibility_angle || face.height <= cfg.min_face_height {
        return None;
    }
    face.center_u += cfg.face_jitter * 2.0 * face.width * gauss(rng);
    face.center_v += cfg.face_jitter * face.height * gauss(rng);
    let embedding = synth_embedding(profile, BodyPart::Face, view_angle, &cfg.embedding, rng);
    Some(FaceDetection { face_box: face, embedding })
}

/// Greedy best-IoU assignment of detected faces to pose-induced face boxes.
///
/// Returns, per body, the index of its face. Pairs need IoU strictly above
/// [`FACE_MATCH_IOU`]; unmatched faces are dropped.
pub fn match_faces_to_bodies(faces: &[BoundingBox], pose_faces: &[Option<BoundingBox>]) -> Vec<Option<usize>> {
    let mut pairs = Vec::new();
    for (b, pf) in pose_faces.iter().enumerate() {
        let Some(pf) = pf else { continue };
        for (f, fb) in faces.iter().enumerate() {
            let v = iou(fb, pf);
            if v > FACE_MATCH_IOU {
                pairs.push((v, b, f));
            }
        }
    }
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut body_face = vec![None; pose_faces.len()];
    let mut face_used = vec![false; faces.len()];
    for (_, b, f) in pairs {
        if body_face[b].is_none() && !face_used[f] {
            body_face[b] = Some(f);
            face_used[f] = true;
        }
    }
    body_face
}

/// Identity profiles of every simulated person, keyed by ground-truth id.
pub type ProfileBook = BTreeMap<u32, IdentityProfile>;

/// View angle of a person w.r.t. a camera: 0 when facing it.
pub fn view_angle(person: &PersonState, camera_position: &Vec2) -> f64 {
    let to_cam = camera_position - person.position;
    normalize_angle(person.heading - to_cam.y.atan2(to_cam.x))
}

fn occluded(camera: &Vec2, person: &PersonState, persons: &[PersonState], obstacles: &[Obstacle], lateral: f64) -> bool {
    if obstacles.iter().any(|o| o.kind.blocks_view() && o.shape.blocks_segment(camera, &person.position)) {
        return true;
    }
    let d = person.position - camera;
    let dist = d.norm();
    let dir = d / dist;
    persons.iter().any(|q| {
        if q.id == person.id {
            return false;
        }
        let r = q.position - camera;
        let along = r.dot(&dir);
        let side = (r.x * dir.y - r.y * dir.x).abs();
        along > 0.0 && along < dist && side < lateral
    })
}

/// Synthesizes the perception stack's output for one camera frame.
pub fn render_detections(
    camera: &CameraModel,
    agent: &Pose,
    persons: &[PersonState],
    obstacles: &[Obstacle],
    profiles: &ProfileBook,
    cfg: &SensingConfig,
    rng: &mut SimRng,
) -> Vec<Detection> {
    struct Seen<'a> {
        person: &'a PersonState,
        profile: &'a IdentityProfile,
        distance: f64,
        view: f64,
        body_true: BoundingBox,
    }

    let mut seen = Vec::new();
    for person in persons {
        let Some(profile) = profiles.get(&person.id) else { continue };
        let distance = (person.position - agent.position).norm();
        if distance < 1e-6 || distance > camera.max_range {
            continue;
        }
        let bearing = agent.bearing_to(&person.position);
        if !camera.in_fov(bearing) {
            continue;
        }
        if occluded(&agent.position, person, persons, obstacles, cfg.occlusion_offset) {
            continue;
        }
        if rng.random::<f64>() < cfg.miss_probability {
            continue;
        }
        let height = camera.apparent_height(person.height, distance);
        let width = 2.0 * (PERSON_RADIUS / distance).atan() / camera.horizontal_fov;
        let body_true = BoundingBox::new(camera.u_of_bearing(bearing), 0.0, width, height);
        let view = view_angle(person, &agent.position);
        seen.push(Seen { person, profile, distance, view, body_true });
    }

    let mut faces = Vec::new();
    let mut pose_faces = Vec::with_capacity(seen.len());
    let mut partial = Vec::with_capacity(seen.len());
    for s in &seen {
        let jitter = |rng: &mut SimRng| cfg.box_jitter * gauss(rng);
        let b = s.body_true;
        let noisy = BoundingBox::new(
            b.center_u + jitter(rng),
            b.center_v + jitter(rng),
            (b.width + jitter(rng)).max(1e-3),
            (b.height + jitter(rng)).max(1e-3),
        );
        let body_box = noisy.clipped().unwrap_or(b);
        let boxes = pose_boxes(&b, s.view, camera.aspect, cfg, rng);
        if let Some(face) = synth_face(s.profile, s.view, &b, camera, cfg, rng) {
            faces.push(face);
        }
        let torso_embedding = synth_embedding(s.profile, BodyPart::Torso, s.view, &cfg.embedding, rng);
        let depth = camera.provides_depth.then(|| (s.distance + cfg.depth_noise * gauss(rng)).max(0.0));
        pose_faces.push(boxes.face);
        partial.push((body_box, boxes.torso, torso_embedding, depth, s.person.id));
    }

    let face_boxes: Vec<BoundingBox> = faces.iter().map(|f| f.face_box).collect();
    let assignment = match_faces_to_bodies(&face_boxes, &pose_faces);
    partial
        .into_iter()
        .zip(assignment)
        .map(|((body_box, torso_box, torso_embedding, depth, truth_id), face)| {
            let face = face.map(|i| &faces[i]);
            Detection {
                body_box,
                torso_box,
                face_box: face.map(|f| f.face_box),
                torso_embedding,
                face_embedding: face.map(|f| f.embedding.clone()),
                depth,
                truth_id,
            }
        })
        .collect()
}

/// A camera with its own random substream.
#[derive(Debug, Clone)]
pub struct Sensor {
    pub camera: CameraModel,
    rng: SimRng,
}

impl Sensor {
    pub fn new(camera: CameraModel, rng: SimRng) -> Self {
        Self { camera, rng }
    }

    pub fn kind(&self) -> CameraKind {
        self.camera.kind
    }

    pub fn observe(&mut self, world: &World, profiles: &ProfileBook, cfg: &SensingConfig) -> Vec<Detection> {
        let persons: Vec<PersonState> = world.persons().cloned().collect();
        render_detections(
            &self.camera,
            &world.agent().pose,
            &persons,
            &world.config().obstacles,
            profiles,
            cfg,
            &mut self.rng,
        )
    }
}
