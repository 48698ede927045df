use super::trial::{run_trial, SimConfig, Trial, TrialResult};
use super::variant::VariantConfig;
use crate::error::Result;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io::Write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub scenario: String,
    pub variant: String,
    pub seed: u64,
    pub error: String,
}

/// Aggregates of one variant over its trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub variant: String,
    pub label: String,
    pub trials: usize,
    pub avg_speed: f64,
    pub avg_follow_distance: f64,
    pub avg_obstacle_distance: f64,
    /// Trials in which the target was lost.
    pub lost: usize,
    /// Trials with at least one wrong-person event.
    pub wrong_person: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub results: Vec<TrialResult>,
    pub failures: Vec<TrialFailure>,
    pub summary: Vec<SummaryRow>,
}

/// Runs every (scenario, variant, seed) combination, trials in parallel.
/// Failed trials are reported and left out of the aggregates.
pub fn run_suite(scenarios: &[SimConfig], variants: &[VariantConfig], seeds: &[u64]) -> SuiteOutcome {
    run_suite_with(scenarios, variants, seeds, &|_| {})
}

/// As [`run_suite`], handing every finished trial (with its tick log) to
/// `on_trial`, possibly from several threads.
pub fn run_suite_with(
    scenarios: &[SimConfig],
    variants: &[VariantConfig],
    seeds: &[u64],
    on_trial: &(dyn Fn(&Trial) + Sync),
) -> SuiteOutcome {
    let jobs: Vec<(usize, usize, u64)> = (0..scenarios.len())
        .flat_map(|s| (0..variants.len()).flat_map(move |v| seeds.iter().map(move |&seed| (s, v, seed))))
        .collect();
    let outcomes: Vec<(usize, usize, u64, Result<TrialResult>)> = jobs
        .into_par_iter()
        .map(|(s, v, seed)| {
            let r = run_trial(&scenarios[s], &variants[v], seed).map(|t| {
                on_trial(&t);
                t.result
            });
            (s, v, seed, r)
        })
        .collect();

    let mut results = Vec::new();
    let mut failures = Vec::new();
    for (s, v, seed, r) in outcomes {
        match r {
            Ok(r) => results.push(r),
            Err(e) => failures.push(TrialFailure {
                scenario: scenarios[s].scenario.name.clone(),
                variant: variants[v].name.clone(),
                seed,
                error: e.to_string(),
            }),
        }
    }
    let summary = summarize(&results, variants);
    SuiteOutcome { results, failures, summary }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

/// One row per variant, in the order given.
pub fn summarize(results: &[TrialResult], variants: &[VariantConfig]) -> Vec<SummaryRow> {
    variants
        .iter()
        .map(|v| {
            let rs: Vec<_> = results.iter().filter(|r| r.variant == v.name).map(|r| &r.metrics).collect();
            SummaryRow {
                variant: v.name.clone(),
                label: v.label(),
                trials: rs.len(),
                avg_speed: mean(rs.iter().map(|m| m.avg_speed)),
                avg_follow_distance: mean(rs.iter().map(|m| m.avg_follow_distance)),
                avg_obstacle_distance: mean(rs.iter().map(|m| m.avg_obstacle_distance)),
                lost: rs.iter().filter(|m| m.lost_target).count(),
                wrong_person: rs.iter().filter(|m| m.wrong_person_events > 0).count(),
            }
        })
        .collect()
}

/// Plain-text table in the usual results layout.
pub fn render_table(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<22} {:>10} {:>11} {:>11} {:>9} {:>9}",
        "Variant", "Speed m/s", "Follow m", "Obstacle m", "Lost", "Wrong"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<22} {:>10.2} {:>11.2} {:>11.2} {:>9} {:>9}",
            r.label,
            r.avg_speed,
            r.avg_follow_distance,
            r.avg_obstacle_distance,
            format!("{} / {}", r.lost, r.trials),
            format!("{} / {}", r.wrong_person, r.trials),
        );
    }
    out
}

/// Writes the summary as CSV, preceded by `# `-prefixed provenance lines.
pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], provenance: &[String], mut out: W) -> Result<()> {
    for line in provenance {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["variant", "avg_speed", "avg_follow_distance", "avg_obstacle_distance", "lost_target", "wrong_person", "trials"])?;
    for r in rows {
        w.write_record([
            r.label.clone(),
            format!("{:.4}", r.avg_speed),
            format!("{:.4}", r.avg_follow_distance),
            format!("{:.4}", r.avg_obstacle_distance),
            r.lost.to_string(),
            r.wrong_person.to_string(),
            r.trials.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-trial results as CSV.
pub fn write_trials_csv<W: Write>(results: &[TrialResult], mut out: W) -> Result<()> {
    writeln!(out, "scenario,variant,seed,participant,avg_speed,avg_follow_distance,avg_obstacle_distance,lost_target,wrong_person_events,collisions,reid_calls,duration")?;
    for r in results {
        let m = &r.metrics;
        writeln!(
            out,
            "{},{},{},{},{:.6},{:.6},{:.6},{},{},{},{},{:.3}",
            r.scenario,
            r.variant,
            r.seed,
            r.participant,
            m.avg_speed,
            m.avg_follow_distance,
            m.avg_obstacle_distance,
            m.lost_target,
            m.wrong_person_events,
            m.collisions,
            m.reid_calls,
            m.duration
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn row<'a>(rows: &'a [SummaryRow], name: &str) -> Option<&'a SummaryRow> {
    rows.iter().find(|r| r.variant == name)
}

/// The four expected orderings between the full system and its ablations.
/// A check whose variants are missing from `rows` fails.
pub fn check_trends(rows: &[SummaryRow]) -> Vec<TrendCheck> {
    let ours = row(rows, "ours");
    let pair = |other: &str| ours.zip(row(rows, other));
    let mut checks = Vec::new();

    let (passed, detail) = match pair("ours_wo_reid") {
        Some((o, x)) => (o.wrong_person <= x.wrong_person, format!("wrong person: ours {} ≤ w/o_reid {}", o.wrong_person, x.wrong_person)),
        None => (false, "variants missing".into()),
    };
    checks.push(TrendCheck { name: "(a) wrong_person(ours) <= wrong_person(w/o_reid)".into(), passed, detail });

    let (passed, detail) = match pair("ours_wo_motion") {
        Some((o, x)) => (o.avg_speed > x.avg_speed, format!("speed: ours {:.3} > w/o_motion {:.3}", o.avg_speed, x.avg_speed)),
        None => (false, "variants missing".into()),
    };
    checks.push(TrendCheck { name: "(b) avg_speed(ours) > avg_speed(w/o_motion)".into(), passed, detail });

    let (passed, detail) = match pair("ours_wo_pathplanning") {
        Some((o, x)) => (
            x.avg_obstacle_distance < o.avg_obstacle_distance,
            format!("obstacle distance: w/o_pathplanning {:.3} < ours {:.3}", x.avg_obstacle_distance, o.avg_obstacle_distance),
        ),
        None => (false, "variants missing".into()),
    };
    checks.push(TrendCheck { name: "(c) obstacle_distance(w/o_pathplanning) < obstacle_distance(ours)".into(), passed, detail });

    let ablations: Vec<&SummaryRow> = rows.iter().filter(|r| r.variant != "ours").collect();
    let (passed, detail) = match (ours, ablations.iter().map(|r| r.lost).min()) {
        (Some(o), Some(min)) => (o.lost <= min, format!("lost: ours {} ≤ min over ablations {}", o.lost, min)),
        _ => (false, "variants missing".into()),
    };
    checks.push(TrendCheck { name: "(d) lost(ours) <= min lost over ablations".into(), passed, detail });
    checks
}
