use super::bank::FeatureBank;
use crate::error::{Error, Result};
use crate::sensing::{BoundingBox, Detection, Embedding, UNIT_TOLERANCE};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReidConfig {
    /// Scores must be strictly above this to re-identify.
    pub sim_threshold: f64,
}

impl Default for ReidConfig {
    fn default() -> Self {
        Self { sim_threshold: 0.8 }
    }
}

impl ReidConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sim_threshold > 0.0 && self.sim_threshold < 1.0 {
            Ok(())
        } else {
            Err(Error::Config("reid.sim_threshold must be in (0, 1)".into()))
        }
    }
}

/// Which identification models are enabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parts {
    pub face: bool,
    pub torso: bool,
}

impl Parts {
    pub const BOTH: Parts = Parts { face: true, torso: true };

    pub fn any(&self) -> bool {
        self.face || self.torso
    }
}

/// Cosine of two unit embeddings.
pub fn cosine_similarity(a: &Embedding, b: &Embedding) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    for e in [a, b] {
        let norm = e.norm();
        if !((norm - 1.0).abs() <= UNIT_TOLERANCE) {
            return Err(Error::NotUnitNorm { norm });
        }
    }
    Ok(a.dot(b).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub face_sim: Option<f64>,
    pub torso_sim: Option<f64>,
    /// Max of the available similarities.
    pub score: f64,
}

/// Similarity of one detection to the bank using the enabled parts.
///
/// The face is compared only when both the detection and the bank have one.
/// Returns `None` when no enabled part is available.
pub fn score_parts(detection: &Detection, bank: &FeatureBank, parts: Parts) -> Result<Option<SimilarityReport>> {
    let face_sim = match (parts.face, &detection.face_embedding, bank.face_mean()) {
        (true, Some(f), Some(m)) => Some(cosine_similarity(f, m)?),
        _ => None,
    };
    let torso_sim = if parts.torso { Some(cosine_similarity(&detection.torso_embedding, bank.torso_mean())?) } else { None };
    let score = match (face_sim, torso_sim) {
        (Some(f), Some(t)) => f.max(t),
        (Some(f), None) => f,
        (None, Some(t)) => t,
        (None, None) => return Ok(None),
    };
    Ok(Some(SimilarityReport { face_sim, torso_sim, score }))
}

/// Similarity of a detection to the bank: the larger of the face and torso
/// cosines, torso only when no face is available.
pub fn score_person(detection: &Detection, bank: &FeatureBank) -> Result<SimilarityReport> {
    Ok(score_parts(detection, bank, Parts::BOTH)?.expect("torso is always scored"))
}

/// A re-id candidate: a detection and the id of the track carrying it.
#[derive(Debug, Clone, Copy)]
pub struct Candidate<'a> {
    pub id: u64,
    pub detection: &'a Detection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReidMatch {
    /// Index into the candidate slice.
    pub index: usize,
    pub id: u64,
    pub score: f64,
}

/// Picks the candidate most similar to the bank if its score is strictly
/// above the threshold.
///
/// Equal scores go to the body box closest to `last_seen` (image center),
/// then to the lowest id.
pub fn reidentify(
    candidates: &[Candidate],
    bank: &FeatureBank,
    parts: Parts,
    config: &ReidConfig,
    last_seen: Option<&BoundingBox>,
) -> Result<Option<ReidMatch>> {
    let mut best: Option<(ReidMatch, f64)> = None;
    for (index, c) in candidates.iter().enumerate() {
        let Some(report) = score_parts(c.detection, bank, parts)? else { continue };
        let dist = last_seen.map_or(0.0, |b| c.detection.body_box.center_distance(b));
        let m = ReidMatch { index, id: c.id, score: report.score };
        let better = match &best {
            None => true,
            Some((b, bd)) => {
                m.score > b.score || (m.score == b.score && (dist < *bd || (dist == *bd && m.id < b.id)))
            }
        };
        if better {
            best = Some((m, dist));
        }
    }
    Ok(best.map(|(m, _)| m).filter(|m| m.score > config.sim_threshold))
}
