//! Evaluation metrics over task records.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{CloudletId, Millis, TaskId};
use crate::engine::TaskRecord;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("no task records")]
    Empty,
    #[error("task {0} has a non-positive service time")]
    ZeroService(TaskId),
    #[error("task {task} ran on unknown cloudlet {cloudlet}")]
    UnknownCloudlet { task: TaskId, cloudlet: CloudletId },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub task_count: usize,
    pub awt: f64,
    pub makespan_min: Millis,
    pub makespan_max: Millis,
    pub makespan_avg: Millis,
    pub avg_speedup: f64,
    pub bound_violations: usize,
    /// Tasks delayed at least once.
    pub delayed_tasks: usize,
    pub per_cloudlet_makespan: BTreeMap<CloudletId, Millis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Makespans {
    pub min: Millis,
    pub max: Millis,
    pub avg: Millis,
    pub per_cloudlet: BTreeMap<CloudletId, Millis>,
}

/// Sums in sorted order so the result does not depend on record order.
fn mean(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    values.into_iter().sum::<f64>() / n
}

/// Mean of turnaround over service time.
pub fn awt(records: &[TaskRecord]) -> Result<f64, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut ratios = Vec::with_capacity(records.len());
    for r in records {
        if !(r.service_time > 0.0) {
            return Err(MetricsError::ZeroService(r.task_id));
        }
        ratios.push(r.turnaround / r.service_time);
    }
    Ok(mean(ratios))
}

/// Last completion per cloudlet, 0 for cloudlets that ran nothing. Cloud
/// executions are ignored. Statistics cover all `cloudlet_count` cloudlets.
pub fn makespans(records: &[TaskRecord], cloudlet_count: usize) -> Result<Makespans, MetricsError> {
    let mut per: BTreeMap<CloudletId, Millis> = (0..cloudlet_count).map(|i| (CloudletId(i as u32), 0.0)).collect();
    for r in records {
        if let Some(c) = r.executor() {
            let slot = per.get_mut(&c).ok_or(MetricsError::UnknownCloudlet {
                task: r.task_id,
                cloudlet: c,
            })?;
            *slot = slot.max(r.completion_time);
        }
    }
    if per.is_empty() {
        return Ok(Makespans {
            min: 0.0,
            max: 0.0,
            avg: 0.0,
            per_cloudlet: per,
        });
    }
    let min = per.values().copied().fold(f64::INFINITY, f64::min);
    let max = per.values().copied().fold(f64::NEG_INFINITY, f64::max);
    let avg = per.values().sum::<f64>() / per.len() as f64;
    Ok(Makespans {
        min,
        max,
        avg,
        per_cloudlet: per,
    })
}

pub fn average_speedup(records: &[TaskRecord]) -> Result<f64, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::Empty);
    }
    Ok(mean(records.iter().map(TaskRecord::speedup).collect()))
}

pub fn summarize(records: &[TaskRecord], cloudlet_count: usize) -> Result<RunSummary, MetricsError> {
    let m = makespans(records, cloudlet_count)?;
    Ok(RunSummary {
        task_count: records.len(),
        awt: awt(records)?,
        makespan_min: m.min,
        makespan_max: m.max,
        makespan_avg: m.avg,
        avg_speedup: average_speedup(records)?,
        bound_violations: records.iter().filter(|r| r.bound_violated == Some(true)).count(),
        delayed_tasks: records.iter().filter(|r| r.delays_taken > 0).count(),
        per_cloudlet_makespan: m.per_cloudlet,
    })
}
