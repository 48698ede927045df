//! Box tracking: a constant-velocity Kalman filter per person, optimal IoU
//! association and track lifecycle with persistent ids.

mod assignment;
mod kalman;
mod tracker;

pub use assignment::{associate, hungarian, iou_matrix, Association};
pub use kalman::{
    box_to_measurement, kf_predict, kf_update, measurement_to_box, observation, transition, KalmanNoise, KalmanState,
    MeasVector, StateMatrix, StateVector,
};
pub use tracker::{track_measurement, tracker_step, Track, Tracker, TrackerConfig};
