//! Person following for a dual-camera mobile agent.
//!
//! The crate is organised along the perception/control pipeline:
//!
//! * [`world`]: deterministic 2D world: agent kinematics, scripted persons,
//!   obstacles and a simulated 2D lidar.
//! * [`sensing`]: synthetic body/face/torso detections and embeddings for a
//!   fish-eye and an RGBD camera.
//! * [`tracking`]: SORT-style Kalman box tracker with optimal IoU association.
//! * [`reid`]: target registration, feature bank and the re-identification
//!   decision.
//! * [`control`]: camera selection, visual servoing, local-goal navigation,
//!   the safety filter and the follow/search state machine.
//! * [`harness`]: seeded trials, the ablation variants and metric tables.

pub mod config;
pub mod control;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod reid;
pub mod rng;
pub mod sensing;
pub mod tracking;
pub mod world;

pub use error::{Error, Result};
