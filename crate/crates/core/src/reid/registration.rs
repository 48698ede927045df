use super::bank::{FeatureBank, RegistrationMode};
use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, Pose, Vec2};
use crate::rng::{stream, SimRng, Stream};
use crate::sensing::{render_detections, view_angle, CameraKind, Embedding, IdentityProfile, ProfileBook, SensingConfig};
use crate::world::{PersonState, Role, DEFAULT_PERSON_HEIGHT};
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegistrationConfig {
    pub mode: RegistrationMode,
    /// Seconds.
    pub duration: f64,
    /// Embeddings kept per part.
    pub sample_cap: usize,
    /// Distance between the person and the camera, meters.
    pub distance: f64,
    pub camera: CameraKind,
    /// Standard mode: half-width of the front and back pose windows, degrees.
    pub standard_tolerance_deg: f64,
    /// Standard mode: period of the sway inside each window, seconds.
    pub sway_period: f64,
}

impl Default for RegistrationConfig {
    fn default() -> Self {
        Self {
            mode: RegistrationMode::Full360,
            duration: 20.0,
            sample_cap: 100,
            distance: 2.0,
            camera: CameraKind::Rgbd,
            standard_tolerance_deg: 30.0,
            sway_period: 4.0,
        }
    }
}

impl RegistrationConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.duration.is_finite()
            && self.duration > 0.0
            && self.sample_cap >= 1
            && self.distance.is_finite()
            && self.distance > 0.0
            && (0.0..=90.0).contains(&self.standard_tolerance_deg)
            && self.sway_period > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config("registration: duration, sample_cap, distance and sway_period must be positive".into()))
        }
    }

    /// View angle presented to the camera at time `t`.
    pub fn view_at(&self, t: f64) -> f64 {
        match self.mode {
            RegistrationMode::Full360 => normalize_angle(TAU * t / self.duration),
            RegistrationMode::Standard => {
                let sway = self.standard_tolerance_deg.to_radians() * (TAU * t / self.sway_period).sin();
                let base = if t < 0.5 * self.duration { 0.0 } else { PI };
                normalize_angle(base + sway)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Registration {
    pub bank: FeatureBank,
    pub face_collected: usize,
    pub torso_collected: usize,
    /// View angle of every frame in which the person was detected.
    pub views: Vec<f64>,
}

/// Uniformly samples at most `cap` items, keeping their original order.
fn subsample(items: Vec<Embedding>, cap: usize, rng: &mut SimRng) -> Vec<Embedding> {
    if items.len() <= cap {
        return items;
    }
    let mut idx = sample(rng, items.len(), cap).into_vec();
    idx.sort_unstable();
    let mut slots: Vec<Option<Embedding>> = items.into_iter().map(Some).collect();
    idx.into_iter().map(|i| slots[i].take().expect("indices are distinct")).collect()
}

/// Runs a registration session for one person standing in front of the
/// camera and builds their feature bank.
pub fn register_target(
    profile: &IdentityProfile,
    sensing: &SensingConfig,
    config: &RegistrationConfig,
    tick_rate: f64,
    seed: u64,
) -> Result<Registration> {
    config.validate()?;
    let camera = sensing.camera(config.camera);
    if config.distance > camera.max_range {
        return Err(Error::Registration("person stands beyond camera range".into()));
    }
    let agent = Pose::new(0.0, 0.0, 0.0);
    let profiles: ProfileBook = [(0, profile.clone())].into_iter().collect();
    let mut rng = stream(seed, Stream::Registration);
    let frames = (config.duration * tick_rate).round() as usize;

    let mut faces = Vec::new();
    let mut torsos = Vec::new();
    let mut views = Vec::new();
    for k in 0..frames {
        let view = config.view_at(k as f64 / tick_rate);
        let mut person = PersonState::new(0, Role::Target, Vec2::new(config.distance, 0.0), normalize_angle(PI + view), 0.0);
        person.height = DEFAULT_PERSON_HEIGHT;
        for det in render_detections(camera, &agent, &[person.clone()], &[], &profiles, sensing, &mut rng) {
            views.push(view_angle(&person, &agent.position));
            torsos.push(det.torso_embedding);
            if let Some(f) = det.face_embedding {
                faces.push(f);
            }
        }
    }
    if torsos.is_empty() {
        return Err(Error::Registration("no torso samples collected".into()));
    }
    let (face_collected, torso_collected) = (faces.len(), torsos.len());
    let mut pick = stream(seed, Stream::BankSampling);
    let face_bank = subsample(faces, config.sample_cap, &mut pick);
    let torso_bank = subsample(torsos, config.sample_cap, &mut pick);
    Ok(Registration { bank: FeatureBank::new(config.mode, face_bank, torso_bank)?, face_collected, torso_collected, views })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_views_stay_near_front_or_back() {
        let cfg = RegistrationConfig { mode: RegistrationMode::Standard, ..Default::default() };
        for k in 0..600 {
            let v = cfg.view_at(k as f64 / 30.0).abs();
            assert!(v <= 30f64.to_radians() + 1e-12 || v >= PI - 30f64.to_radians() - 1e-12);
        }
    }

    #[test]
    fn subsample_keeps_all_below_cap() {
        let items: Vec<Embedding> = (0..50).map(|i| Embedding::normalized(vec![1.0, i as f64]).unwrap()).collect();
        let mut rng = stream(0, Stream::BankSampling);
        assert_eq!(subsample(items.clone(), 100, &mut rng), items);
        assert_eq!(subsample(items, 10, &mut rng).len(), 10);
    }
}
