use super::log::TickLog;
use crate::control::Mode;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The five per-trial metrics, all derived from a tick log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    /// Mean executed speed over follow-mode ticks (m/s).
    pub avg_speed: f64,
    /// Mean agent–target distance over follow-mode ticks (m).
    pub avg_follow_distance: f64,
    /// Mean over all ticks of the closest obstacle return (m).
    pub avg_obstacle_distance: f64,
    pub lost_target: bool,
    pub wrong_person_events: u32,
    pub follow_ticks: usize,
    pub collisions: usize,
    pub reid_calls: usize,
    pub perception_updates: usize,
    pub duration: f64,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Recomputes a trial's metrics from its log.
///
/// Search ticks are excluded from the speed and following-distance means
/// (both are 0 when the agent never followed). The target counts as lost
/// when a search run lasts at least `give_up_after`; a wrong-person event is
/// a run of ticks bound to someone other than the target lasting longer
/// than `wrong_person_min_duration`.
pub fn compute_metrics(log: &TickLog) -> Result<TrialMetrics> {
    if log.ticks.is_empty() {
        return Err(Error::Log("log has no ticks".into()));
    }
    let h = &log.header;
    if !(h.tick_rate > 0.0) {
        return Err(Error::Log("tick_rate must be positive".into()));
    }
    let dt = 1.0 / h.tick_rate;
    let follow = || log.ticks.iter().filter(|t| t.mode != Mode::Search);

    let give_up_ticks = (h.give_up_after * h.tick_rate).round() as usize;
    let mut lost = false;
    let mut search_run = 0usize;
    let mut wrong_events = 0u32;
    let mut wrong_run = 0usize;
    let close_wrong = |run: &mut usize, events: &mut u32| {
        if *run as f64 * dt > h.wrong_person_min_duration {
            *events += 1;
        }
        *run = 0;
    };
    for t in &log.ticks {
        if t.mode == Mode::Search {
            search_run += 1;
            lost |= search_run >= give_up_ticks;
        } else {
            search_run = 0;
        }
        match t.bound_truth {
            Some(id) if id != h.target_id => wrong_run += 1,
            _ => close_wrong(&mut wrong_run, &mut wrong_events),
        }
    }
    close_wrong(&mut wrong_run, &mut wrong_events);

    Ok(TrialMetrics {
        avg_speed: mean(follow().map(|t| t.v.abs())),
        avg_follow_distance: mean(follow().map(|t| t.target_distance)),
        avg_obstacle_distance: mean(log.ticks.iter().map(|t| t.obstacle_distance)),
        lost_target: lost,
        wrong_person_events: wrong_events,
        follow_ticks: follow().count(),
        collisions: log.ticks.iter().filter(|t| t.collision).count(),
        reid_calls: log.ticks.iter().filter(|t| t.reid_called).count(),
        perception_updates: log.ticks.iter().filter(|t| t.fresh).count(),
        duration: log.ticks.len() as f64 * dt,
    })
}
