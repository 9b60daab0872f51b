//! Benchmark catalog, Poisson arrivals and trace generation.

mod trace_file;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{CloudletId, Millis, Task, TaskClass, TaskId};

pub use trace_file::{load_trace, read_trace, save_trace, write_trace, TraceError, TRACE_HEADER};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorkloadError {
    #[error("arrival rate must be positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("time unit must be positive, got {0}")]
    NonPositiveTimeUnit(f64),
    #[error("benchmark catalog is empty")]
    EmptyCatalog,
    #[error("catalog has {catalog} benchmarks but {weights} weights")]
    WeightCount { catalog: usize, weights: usize },
    #[error("catalog weights must be non-negative and sum to 1, got sum {0}")]
    BadWeights(f64),
    #[error("cloudlet count must be at least 1")]
    NoCloudlets,
    #[error("benchmark {name:?}: {reason}")]
    InvalidBenchmark { name: String, reason: String },
}

/// One application type tasks are drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Benchmark {
    pub name: String,
    pub class: TaskClass,
    pub base_service_ms: Millis,
    pub mobile_ms: Millis,
    pub cloud_ms: Millis,
    pub data_bytes: f64,
    /// Latency bound as a multiple of `base_service_ms`; tolerant only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_factor: Option<f64>,
}

impl Benchmark {
    pub fn validate(&self) -> Result<(), WorkloadError> {
        let bad = |reason: &str| WorkloadError::InvalidBenchmark {
            name: self.name.clone(),
            reason: reason.to_string(),
        };
        for (field, v) in [
            ("base_service_ms", self.base_service_ms),
            ("mobile_ms", self.mobile_ms),
            ("cloud_ms", self.cloud_ms),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(&format!("{field} must be > 0")));
            }
        }
        if !(self.data_bytes >= 0.0 && self.data_bytes.is_finite()) {
            return Err(bad("data_bytes must be >= 0"));
        }
        match (self.class, self.bound_factor) {
            (TaskClass::LatencyTolerant, Some(f)) if f > 1.0 && f.is_finite() => Ok(()),
            (TaskClass::LatencyTolerant, _) => Err(bad("tolerant benchmarks need bound_factor > 1")),
            (TaskClass::LatencySensitive, None) => Ok(()),
            (TaskClass::LatencySensitive, Some(_)) => Err(bad("sensitive benchmarks take no bound_factor")),
        }
    }

    pub fn latency_bound(&self) -> Option<Millis> {
        self.bound_factor.map(|f| f * self.base_service_ms)
    }

    fn instantiate(&self, id: TaskId, arrival_time: Millis, daemon_id: CloudletId) -> Task {
        Task {
            id,
            arrival_time,
            daemon_id,
            benchmark: self.name.clone(),
            class: self.class,
            base_service_time: self.base_service_ms,
            mobile_exec_time: self.mobile_ms,
            cloud_exec_time: self.cloud_ms,
            data_volume: self.data_bytes,
            latency_bound: self.latency_bound(),
        }
    }
}

/// The shipped catalog: one compute-heavy latency-tolerant application and
/// four interactive latency-sensitive ones. Magnitudes are calibrated so
/// that cloud-only execution lands at an average weighted turnaround of
/// about 1.6 under the default network parameters.
pub fn default_catalog() -> Vec<Benchmark> {
    let sensitive = |name: &str, base: f64, cloud: f64, data: f64| Benchmark {
        name: name.to_string(),
        class: TaskClass::LatencySensitive,
        base_service_ms: base,
        mobile_ms: base * 6.0,
        cloud_ms: cloud,
        data_bytes: data,
        bound_factor: None,
    };
    vec![
        Benchmark {
            name: "sandwich".to_string(),
            class: TaskClass::LatencyTolerant,
            base_service_ms: 20_000.0,
            mobile_ms: 150_000.0,
            cloud_ms: 15_000.0,
            data_bytes: 6_000_000.0,
            bound_factor: Some(3.0),
        },
        sensitive("face", 3000.0, 2400.0, 2_000_000.0),
        sensitive("pool", 2000.0, 1600.0, 1_300_000.0),
        sensitive("lego", 4000.0, 3200.0, 2_600_000.0),
        sensitive("ping-pong", 2500.0, 2000.0, 1_600_000.0),
    ]
}

/// Mean base service time of latency-tolerant benchmarks.
pub fn mean_tolerant_service(catalog: &[Benchmark]) -> Option<Millis> {
    let tolerant: Vec<f64> = catalog
        .iter()
        .filter(|b| b.class == TaskClass::LatencyTolerant)
        .map(|b| b.base_service_ms)
        .collect();
    (!tolerant.is_empty()).then(|| tolerant.iter().sum::<f64>() / tolerant.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSpec {
    pub task_count: usize,
    /// Arrivals per time unit.
    pub lambda: f64,
    pub time_unit_ms: Millis,
    pub catalog: Vec<Benchmark>,
    /// `None` means uniform.
    pub catalog_weights: Option<Vec<f64>>,
    pub cloudlet_count: usize,
    pub seed: u64,
}

/// `count` strictly increasing Poisson arrival timestamps with mean
/// interarrival `time_unit_ms / lambda`.
pub fn generate_arrivals(
    lambda: f64,
    count: usize,
    time_unit_ms: Millis,
    seed: u64,
) -> Result<Vec<Millis>, WorkloadError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    arrivals_from(&mut rng, lambda, count, time_unit_ms)
}

fn arrivals_from<R: Rng + ?Sized>(
    rng: &mut R,
    lambda: f64,
    count: usize,
    time_unit_ms: Millis,
) -> Result<Vec<Millis>, WorkloadError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(WorkloadError::NonPositiveLambda(lambda));
    }
    if !(time_unit_ms > 0.0 && time_unit_ms.is_finite()) {
        return Err(WorkloadError::NonPositiveTimeUnit(time_unit_ms));
    }
    let exp = Exp::new(lambda / time_unit_ms).expect("positive rate");
    let mut out = Vec::with_capacity(count);
    let mut t = 0.0f64;
    for _ in 0..count {
        let mut next = t + exp.sample(rng);
        if let Some(&prev) = out.last() {
            if next <= prev {
                next = f64::next_up(prev);
            }
        }
        out.push(next);
        t = next;
    }
    Ok(out)
}

fn weights_for(spec: &TraceSpec) -> Result<Vec<f64>, WorkloadError> {
    let n = spec.catalog.len();
    let weights = match &spec.catalog_weights {
        None => vec![1.0 / n as f64; n],
        Some(w) if w.len() != n => {
            return Err(WorkloadError::WeightCount {
                catalog: n,
                weights: w.len(),
            })
        }
        Some(w) => w.clone(),
    };
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|w| !(*w >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
        return Err(WorkloadError::BadWeights(sum));
    }
    Ok(weights)
}

/// Fully determined by `spec.seed`. Arrivals, benchmark choice and daemon
/// placement use separate streams of the same seed.
pub fn generate_trace(spec: &TraceSpec) -> Result<Vec<Task>, WorkloadError> {
    if spec.catalog.is_empty() {
        return Err(WorkloadError::EmptyCatalog);
    }
    if spec.cloudlet_count == 0 {
        return Err(WorkloadError::NoCloudlets);
    }
    for b in &spec.catalog {
        b.validate()?;
    }
    let weights = weights_for(spec)?;
    let stream = |s: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(s);
        rng
    };
    let arrivals = arrivals_from(&mut stream(0), spec.lambda, spec.task_count, spec.time_unit_ms)?;
    let picker = WeightedIndex::new(&weights).map_err(|_| WorkloadError::BadWeights(weights.iter().sum()))?;
    let mut bench_rng = stream(1);
    let mut daemon_rng = stream(2);
    Ok(arrivals
        .into_iter()
        .enumerate()
        .map(|(i, at)| {
            let b = &spec.catalog[picker.sample(&mut bench_rng)];
            let daemon = CloudletId(daemon_rng.random_range(0..spec.cloudlet_count) as u32);
            b.instantiate(TaskId(i as u32), at, daemon)
        })
        .collect())
}
