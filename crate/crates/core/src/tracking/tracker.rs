use super::assignment::associate;
use super::kalman::{KalmanNoise, KalmanState, MeasVector, StateMatrix};
use crate::error::{Error, Result};
use crate::sensing::{BoundingBox, Detection};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerConfig {
    pub iou_match_min: f64,
    /// Frames a track survives without a match.
    pub max_age: u32,
    /// Consecutive matches before a track is confirmed.
    pub min_hits: u32,
    pub noise: KalmanNoise,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self { iou_match_min: 0.3, max_age: 10, min_hits: 3, noise: KalmanNoise::default() }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.iou_match_min > 0.0 && self.iou_match_min < 1.0) || self.max_age == 0 || self.min_hits == 0 {
            return Err(Error::Config("tracker: iou_match_min in (0,1), max_age and min_hits positive".into()));
        }
        self.noise.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub id: u64,
    pub state: KalmanState,
    pub hits: u32,
    pub hit_streak: u32,
    pub time_since_update: u32,
    pub age: u32,
    pub last_detection: Option<Detection>,
}

impl Track {
    /// Current box estimate.
    pub fn bbox(&self) -> BoundingBox {
        self.state.bbox()
    }

    /// Detection matched in the latest frame, if any.
    pub fn fresh_detection(&self) -> Option<&Detection> {
        if self.time_since_update == 0 {
            self.last_detection.as_ref()
        } else {
            None
        }
    }

    pub fn is_mature(&self, min_hits: u32) -> bool {
        self.hits >= min_hits
    }
}

/// SORT-style multi-object tracker over body boxes.
#[derive(Debug, Clone)]
pub struct Tracker {
    config: TrackerConfig,
    q: StateMatrix,
    tracks: Vec<Track>,
    next_id: u64,
    frame_count: u64,
}

impl Tracker {
    pub fn new(config: TrackerConfig) -> Self {
        Self { q: config.noise.process(), config, tracks: Vec::new(), next_id: 1, frame_count: 0 }
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    pub fn get(&self, id: u64) -> Option<&Track> {
        self.tracks.iter().find(|t| t.id == id)
    }

    /// Drops all tracks. Ids keep increasing so none is ever reused.
    pub fn reset(&mut self) {
        self.tracks.clear();
        self.frame_count = 0;
    }

    fn confirmed(&self, t: &Track) -> bool {
        t.time_since_update == 0
            && (t.hit_streak >= self.config.min_hits || self.frame_count <= u64::from(self.config.min_hits))
    }

    /// Advances one frame and returns the confirmed tracks.
    pub fn step(&mut self, detections: &[Detection]) -> Vec<Track> {
        self.frame_count += 1;
        let detections: Vec<&Detection> = detections.iter().filter(|d| d.body_box.is_valid()).collect();

        for t in &mut self.tracks {
            t.state = t.state.predict(1.0, &self.q);
            t.age += 1;
            if t.time_since_update > 0 {
                t.hit_streak = 0;
            }
            t.time_since_update += 1;
        }
        self.tracks.retain(|t| t.state.mean.iter().all(|x| x.is_finite()));

        let predicted: Vec<BoundingBox> = self.tracks.iter().map(Track::bbox).collect();
        let boxes: Vec<BoundingBox> = detections.iter().map(|d| d.body_box).collect();
        let assoc = associate(&predicted, &boxes, self.config.iou_match_min);

        let r = self.config.noise.measurement();
        for &(ti, di) in &assoc.matches {
            let t = &mut self.tracks[ti];
            if let Ok(s) = t.state.update(&boxes[di], &r) {
                t.state = s;
                t.time_since_update = 0;
                t.hits += 1;
                t.hit_streak += 1;
                t.last_detection = Some(detections[di].clone());
            }
        }
        for &di in &assoc.unmatched_detections {
            if let Ok(state) = KalmanState::from_box(&boxes[di], &self.config.noise) {
                self.tracks.push(Track {
                    id: self.next_id,
                    state,
                    hits: 1,
                    hit_streak: 1,
                    time_since_update: 0,
                    age: 0,
                    last_detection: Some(detections[di].clone()),
                });
                self.next_id += 1;
            }
        }
        let max_age = self.config.max_age;
        self.tracks.retain(|t| t.time_since_update <= max_age);
        self.tracks.iter().filter(|t| self.confirmed(t)).cloned().collect()
    }
}

/// One tracker frame; see [`Tracker::step`].
pub fn tracker_step(tracker: &mut Tracker, detections: &[Detection]) -> Vec<Track> {
    tracker.step(detections)
}

/// Measurement vector of a track's current estimate.
pub fn track_measurement(t: &Track) -> MeasVector {
    t.state.mean.fixed_rows::<4>(0).into_owned()
}
