use serde::{Deserialize, Serialize};

use super::detect::{detect_with, Detection, SensingField};
use super::trace::{ActivityTrace, EventKind};
use crate::error::{invalid, Result};
use crate::geometry::{CoverageMask, Grid};

/// Continuous no-detection time after which the supply is switched off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeoutPolicy {
    pub timeout_s: f64,
}

impl TimeoutPolicy {
    pub fn new(timeout_s: f64) -> Result<Self> {
        if !(timeout_s > 0.0) {
            return invalid(format!("timeout must be positive, got {timeout_s}"));
        }
        Ok(TimeoutPolicy { timeout_s })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimMetrics {
    pub timeout_s: f64,
    /// Share of occupied seconds with the supply on.
    pub comfort_level: f64,
    /// Share of vacant seconds with the supply on.
    pub energy_wastage: f64,
    pub occupied_s: usize,
    pub vacant_s: usize,
    pub occupied_on_s: usize,
    pub vacant_on_s: usize,
    /// (timeout, share of leaves decided correctly within it).
    pub ta_cdf: Vec<(f64, f64)>,
}

/// Per-second replay summary of one trace under one sensing field.
///
/// The supply starts on at t = 0, every detection (doorway events included)
/// switches it on, and it stays on while the last detection is less than the
/// timeout old. A tick s is on iff its detection age is below the timeout, so
/// a single sorted list of ages answers every timeout at once.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReplayLog {
    /// Detection ages at occupied ticks, ascending.
    pub occupied_ages: Vec<f64>,
    /// Detection ages at vacant ticks, ascending.
    pub vacant_ages: Vec<f64>,
    /// Per leave: time since the last detection strictly before it, ascending.
    pub required: Vec<f64>,
}

/// Occupancy flag per whole-second tick.
pub fn occupancy_ticks(trace: &ActivityTrace) -> Vec<bool> {
    let n = trace.duration_s.floor() as usize;
    let mut occ = vec![false; n];
    let mut since: Option<f64> = None;
    let mut spans = Vec::new();
    for e in &trace.events {
        match e.kind {
            EventKind::Enter => since = Some(e.t_s),
            EventKind::Leave => spans.push((since.take().unwrap_or(0.0), e.t_s)),
            EventKind::Motion => {}
        }
    }
    if let Some(s) = since {
        spans.push((s, trace.duration_s));
    }
    // Tick s is occupied iff enter <= s < leave.
    for (a, b) in spans {
        let start = a.ceil().max(0.0) as usize;
        let end = (b.ceil().max(0.0) as usize).min(n);
        for s in occ.iter_mut().take(end).skip(start) {
            *s = true;
        }
    }
    occ
}

impl ReplayLog {
    pub fn from_detections(trace: &ActivityTrace, detections: &[Detection]) -> Self {
        let occ = occupancy_ticks(trace);
        let mut log = ReplayLog::default();
        let mut last = 0.0;
        let mut k = 0;
        for (s, &o) in occ.iter().enumerate() {
            let t = s as f64;
            while k < detections.len() && detections[k].t_s <= t {
                last = detections[k].t_s;
                k += 1;
            }
            if o {
                log.occupied_ages.push(t - last);
            } else {
                log.vacant_ages.push(t - last);
            }
        }
        let mut prev: Option<f64> = None;
        for d in detections {
            if d.kind == EventKind::Leave {
                if let Some(p) = prev {
                    log.required.push(d.t_s - p);
                }
            }
            prev = Some(d.t_s);
        }
        log.sort();
        log
    }

    pub fn build(traces: &[ActivityTrace], field: &SensingField, grid: &Grid) -> Result<Self> {
        let mut all = ReplayLog::default();
        for t in traces {
            let d = detect_with(t, field, grid)?;
            let log = ReplayLog::from_detections(t, &d);
            all.occupied_ages.extend(log.occupied_ages);
            all.vacant_ages.extend(log.vacant_ages);
            all.required.extend(log.required);
        }
        all.sort();
        Ok(all)
    }

    fn sort(&mut self) {
        self.occupied_ages.sort_by(f64::total_cmp);
        self.vacant_ages.sort_by(f64::total_cmp);
        self.required.sort_by(f64::total_cmp);
    }

    /// Share of leaves whose last prior detection is at most `timeout` old.
    pub fn ta(&self, timeout: f64) -> f64 {
        if self.required.is_empty() {
            return 0.0;
        }
        self.required.partition_point(|&r| r <= timeout) as f64 / self.required.len() as f64
    }

    /// Smallest timeout reaching a true-absence share of at least q.
    pub fn ta_quantile(&self, q: f64) -> Option<f64> {
        if self.required.is_empty() || !(0.0..=1.0).contains(&q) {
            return None;
        }
        let n = self.required.len();
        let idx = ((q * n as f64).ceil() as usize).clamp(1, n) - 1;
        Some(self.required[idx])
    }

    pub fn metrics(&self, timeout: f64, ta_grid: &[f64]) -> SimMetrics {
        let occupied_on_s = self.occupied_ages.partition_point(|&a| a < timeout);
        let vacant_on_s = self.vacant_ages.partition_point(|&a| a < timeout);
        let occupied_s = self.occupied_ages.len();
        let vacant_s = self.vacant_ages.len();
        SimMetrics {
            timeout_s: timeout,
            comfort_level: if occupied_s == 0 { 1.0 } else { occupied_on_s as f64 / occupied_s as f64 },
            energy_wastage: if vacant_s == 0 { 0.0 } else { vacant_on_s as f64 / vacant_s as f64 },
            occupied_s,
            vacant_s,
            occupied_on_s,
            vacant_on_s,
            ta_cdf: ta_grid.iter().map(|&t| (t, self.ta(t))).collect(),
        }
    }
}

/// Replays one trace against a timeout policy.
pub fn simulate(trace: &ActivityTrace, masks: &[CoverageMask], grid: &Grid, policy: TimeoutPolicy) -> Result<SimMetrics> {
    TimeoutPolicy::new(policy.timeout_s)?;
    let field = SensingField::new(masks, grid)?;
    let log = ReplayLog::build(std::slice::from_ref(trace), &field, grid)?;
    Ok(log.metrics(policy.timeout_s, &[policy.timeout_s]))
}

/// True-absence CDF over a trace set at each timeout of the grid.
pub fn ta_cdf(traces: &[ActivityTrace], masks: &[CoverageMask], grid: &Grid, timeouts: &[f64]) -> Result<Vec<(f64, f64)>> {
    if traces.is_empty() {
        return invalid("trace set is empty");
    }
    let field = SensingField::new(masks, grid)?;
    let log = ReplayLog::build(traces, &field, grid)?;
    Ok(timeouts.iter().map(|&t| (t, log.ta(t))).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub timeout_s: f64,
    pub comfort: f64,
    pub wastage: f64,
}

/// (comfort, wastage) per timeout for one sensing setup.
pub fn wastage_comfort_frontier(
    traces: &[ActivityTrace],
    masks: &[CoverageMask],
    grid: &Grid,
    timeouts: &[f64],
) -> Result<Vec<FrontierPoint>> {
    if traces.is_empty() {
        return invalid("trace set is empty");
    }
    let field = SensingField::new(masks, grid)?;
    let log = ReplayLog::build(traces, &field, grid)?;
    Ok(frontier_from_log(&log, timeouts))
}

pub fn frontier_from_log(log: &ReplayLog, timeouts: &[f64]) -> Vec<FrontierPoint> {
    timeouts
        .iter()
        .map(|&t| {
            let m = log.metrics(t, &[]);
            FrontierPoint { timeout_s: t, comfort: m.comfort_level, wastage: m.energy_wastage }
        })
        .collect()
}

/// Wastage at a given comfort level, interpolated linearly in comfort between
/// the first pair of frontier points that brackets it.
pub fn wastage_at_comfort(frontier: &[FrontierPoint], comfort: f64) -> Option<f64> {
    frontier.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        if a.comfort <= comfort && comfort <= b.comfort {
            if b.comfort == a.comfort {
                Some(a.wastage)
            } else {
                let f = (comfort - a.comfort) / (b.comfort - a.comfort);
                Some(a.wastage + f * (b.wastage - a.wastage))
            }
        } else {
            None
        }
    })
}
