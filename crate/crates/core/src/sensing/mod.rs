//! Synthetic perception: what the body/pose detector, face detector and the
//! face/torso embedding networks would report for each camera frame.

mod bbox;
mod camera;
mod detect;
mod embedding;

pub use bbox::{iou, iou_rect, BoundingBox, Rect};
pub use camera::{CameraKind, CameraModel};
pub use detect::{
    match_faces_to_bodies, pose_boxes, render_detections, synth_face, view_angle, Detection, FaceDetection, PoseBoxes,
    ProfileBook, Sensor, SensingConfig, FACE_MATCH_IOU,
};
pub use embedding::{
    synth_embedding, BodyPart, Embedding, EmbeddingModel, EmbeddingParams, IdentityProfile, SyntheticEmbedder,
    UNIT_TOLERANCE,
};
