//! Target registration, the feature bank and the re-identification rule.

mod bank;
mod registration;
mod score;

pub use bank::{bank_mean, FeatureBank, RegistrationMode};
pub use registration::{register_target, Registration, RegistrationConfig};
pub use score::{
    cosine_similarity, reidentify, score_parts, score_person, Candidate, Parts, ReidConfig, ReidMatch, SimilarityReport,
};
