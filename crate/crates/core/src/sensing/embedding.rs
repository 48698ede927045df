use crate::error::{Error, Result};
use crate::rng::SimRng;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Tolerance on ‖e‖ = 1 for embeddings accepted by similarity functions.
pub const UNIT_TOLERANCE: f64 = 1e-3;

/// Unit-norm appearance vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding(Vec<f64>);

impl Embedding {
    /// Normalizes `values`; fails on a zero or non-finite vector.
    pub fn normalized(values: Vec<f64>) -> Result<Self> {
        let norm = values.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotUnitNorm { norm });
        }
        Ok(Self(values.into_iter().map(|x| x / norm).collect()))
    }

    /// Wraps values that must already be unit norm.
    pub fn from_unit(values: Vec<f64>) -> Result<Self> {
        let e = Self(values);
        let norm = e.norm();
        if (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::NotUnitNorm { norm });
        }
        Ok(e)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Embedding) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BodyPart {
    Face,
    Torso,
}

/// Synthetic appearance of one person.
///
/// `front` and `side` span the view-dependent subspace; both are orthogonal
/// to each other and to the two identity vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityProfile {
    pub face_identity: Vec<f64>,
    pub torso_identity: Vec<f64>,
    pub front: Vec<f64>,
    pub side: Vec<f64>,
}

fn gaussian_vector(dim: usize, rng: &mut SimRng) -> Vec<f64> {
    (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// Gram–Schmidt of `v` against the (orthonormal) `basis`, then normalized.
fn orthonormalize(mut v: Vec<f64>, basis: &[&[f64]]) -> Vec<f64> {
    // Two passes keep the residual inner products near machine precision.
    for _ in 0..2 {
        for b in basis {
            let p = dot(&v, b);
            v.iter_mut().zip(b.iter()).for_each(|(x, y)| *x -= p * y);
        }
    }
    normalize(&mut v);
    v
}

impl IdentityProfile {
    pub fn random(dim: usize, rng: &mut SimRng) -> Self {
        assert!(dim >= 4, "embedding dimension must be at least 4");
        let mut face = gaussian_vector(dim, rng);
        normalize(&mut face);
        let mut torso = gaussian_vector(dim, rng);
        normalize(&mut torso);
        // Orthonormal basis of span{face, torso} for projecting the view axes.
        let torso_perp = orthonormalize(torso.clone(), &[&face]);
        let front = orthonormalize(gaussian_vector(dim, rng), &[&face, &torso_perp]);
        let side = orthonormalize(gaussian_vector(dim, rng), &[&face, &torso_perp, &front]);
        Self { face_identity: face, torso_identity: torso, front, side }
    }

    pub fn dim(&self) -> usize {
        self.face_identity.len()
    }

    pub fn identity(&self, part: BodyPart) -> &[f64] {
        match part {
            BodyPart::Face => &self.face_identity,
            BodyPart::Torso => &self.torso_identity,
        }
    }
}

/// Parameters of the synthetic embedding model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingParams {
    pub dim: usize,
    /// Weight of the view-dependent component.
    pub alpha: f64,
    /// Expected norm of the additive noise vector.
    pub sigma: f64,
}

impl Default for EmbeddingParams {
    fn default() -> Self {
        Self { dim: 64, alpha: 0.4, sigma: 0.1 }
    }
}

/// Source of appearance embeddings. The simulator uses [`SyntheticEmbedder`];
/// outputs of real face/torso networks can be plugged in behind this trait.
pub trait EmbeddingModel {
    fn embed(&self, profile: &IdentityProfile, part: BodyPart, view_angle: f64, rng: &mut SimRng) -> Embedding;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SyntheticEmbedder {
    pub params: EmbeddingParams,
}

impl EmbeddingModel for SyntheticEmbedder {
    fn embed(&self, profile: &IdentityProfile, part: BodyPart, view_angle: f64, rng: &mut SimRng) -> Embedding {
        synth_embedding(profile, part, view_angle, &self.params, rng)
    }
}

/// `normalize(identity + α·(cos θ·front + sin θ·side) + ε)`.
///
/// ε has i.i.d. components with standard deviation `sigma / √d`, so its
/// expected squared norm is `sigma²` regardless of the dimension.
pub fn synth_embedding(
    profile: &IdentityProfile,
    part: BodyPart,
    view_angle: f64,
    params: &EmbeddingParams,
    rng: &mut SimRng,
) -> Embedding {
    let id = profile.identity(part);
    let (s, c) = view_angle.sin_cos();
    let noise_std = params.sigma / (id.len() as f64).sqrt();
    let values: Vec<f64> = (0..id.len())
        .map(|i| {
            let mut x = id[i] + params.alpha * (c * profile.front[i] + s * profile.side[i]);
            if noise_std > 0.0 {
                x += noise_std * rng.sample::<f64, _>(StandardNormal);
            }
            x
        })
        .collect();
    Embedding::normalized(values).expect("identity component keeps the embedding away from zero")
}
