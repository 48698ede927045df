//! Experiment harness: seeded closed-loop trials of the pipeline variants,
//! log-derived metrics and the summary table.

mod log;
mod metrics;
mod scenario;
mod suite;
mod trial;
mod variant;

pub use log::{LogHeader, TickLog, TickRecord};
pub use metrics::{compute_metrics, TrialMetrics};
pub use scenario::{office_markers, ParticipantConfig, Protocol, ScenarioSpec, INTERFERER_ID, TARGET_ID};
pub use suite::{
    check_trends, render_table, run_suite, run_suite_with, summarize, write_summary_csv, write_trials_csv, SuiteOutcome, SummaryRow,
    TrendCheck, TrialFailure,
};
pub use trial::{register_participant, run_trial, run_trial_with, MetricsConfig, SimConfig, Trial, TrialOptions, TrialResult};
pub use variant::{VariantConfig, PRESET_NAMES};
