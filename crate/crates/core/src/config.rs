//! Experiment configuration.
//!
//! A TOML file where every key has a default; an empty file reproduces the
//! reference setup of 10 cloudlets with 1 to 10 VMs each, 200 tasks, a 10 ms
//! daemon RTT and 50 to 70 ms of additional RTT between cloudlets.
//!
//! ```toml
//! seed = 1
//! time_unit_ms = 1000.0
//!
//! [topology]
//! cloudlet_count = 10
//! vm_count_range = [1, 10]
//! speed_factor_range = [0.5, 1.5]
//!
//! [network]
//! daemon_rtt_ms = 10.0
//! remote_rtt_range_ms = [50.0, 70.0]
//!
//! [workload]
//! tasks = 200
//! lambda = 1.0
//! ```

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Cloudlet, CloudletId, EdgeCloud, Millis, NetworkParams};
use crate::engine::EngineOptions;
use crate::workload::{default_catalog, mean_tolerant_service, Benchmark, TraceSpec};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config key `{key}`: {message}")]
    Parse { key: String, message: String },
    #[error("config key `{key}`: {message}")]
    Invalid { key: &'static str, message: String },
}

fn invalid(key: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopologyConfig {
    pub cloudlet_count: usize,
    /// Inclusive range VM counts are drawn from.
    pub vm_count_range: [usize; 2],
    /// Explicit per-cloudlet VM counts; overrides the range.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vm_counts: Option<Vec<usize>>,
    pub speed_factor_range: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speed_factors: Option<Vec<f64>>,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        TopologyConfig {
            cloudlet_count: 10,
            vm_count_range: [1, 10],
            vm_counts: None,
            speed_factor_range: [0.5, 1.5],
            speed_factors: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub daemon_rtt_ms: Millis,
    pub remote_rtt_range_ms: [Millis; 2],
    pub cloud_rtt_ms: Millis,
    /// Bytes per millisecond.
    pub cloudlet_bandwidth: f64,
    pub cloud_bandwidth: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            daemon_rtt_ms: 10.0,
            remote_rtt_range_ms: [50.0, 70.0],
            cloud_rtt_ms: 150.0,
            cloudlet_bandwidth: 12_500.0,
            cloud_bandwidth: 1_250.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchedulingConfig {
    /// Defaults to the mean service time of latency-tolerant benchmarks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delay_quantum_ms: Option<Millis>,
    pub max_delays: u32,
    pub probe_latency_ms: Millis,
}

impl Default for SchedulingConfig {
    fn default() -> Self {
        SchedulingConfig {
            delay_quantum_ms: None,
            max_delays: 1000,
            probe_latency_ms: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkloadConfig {
    pub tasks: usize,
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog_weights: Option<Vec<f64>>,
    pub catalog: Vec<Benchmark>,
}

impl Default for WorkloadConfig {
    fn default() -> Self {
        WorkloadConfig {
            tasks: 200,
            lambda: 1.0,
            catalog_weights: None,
            catalog: default_catalog(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EdgeCloudConfig {
    pub seed: u64,
    pub time_unit_ms: Millis,
    pub topology: TopologyConfig,
    pub network: NetworkConfig,
    pub scheduling: SchedulingConfig,
    pub workload: WorkloadConfig,
}

impl Default for EdgeCloudConfig {
    fn default() -> Self {
        EdgeCloudConfig {
            seed: 1,
            time_unit_ms: 1000.0,
            topology: TopologyConfig::default(),
            network: NetworkConfig::default(),
            scheduling: SchedulingConfig::default(),
            workload: WorkloadConfig::default(),
        }
    }
}

impl EdgeCloudConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::Parse {
            key: String::new(),
            message: e.message().to_string(),
        })?;
        let cfg: EdgeCloudConfig = serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Parse {
            key: e.path().to_string(),
            message: e.inner().message().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        EdgeCloudConfig::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// Pins the reference topology, network latencies and task count.
    pub fn apply_reference_defaults(&mut self) {
        let topo = TopologyConfig::default();
        self.topology.cloudlet_count = topo.cloudlet_count;
        self.topology.vm_count_range = topo.vm_count_range;
        self.topology.vm_counts = None;
        let net = NetworkConfig::default();
        self.network.daemon_rtt_ms = net.daemon_rtt_ms;
        self.network.remote_rtt_range_ms = net.remote_rtt_range_ms;
        self.workload.tasks = WorkloadConfig::default().tasks;
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.time_unit_ms > 0.0 && self.time_unit_ms.is_finite()) {
            return Err(invalid("time_unit_ms", "must be > 0"));
        }
        let t = &self.topology;
        if t.cloudlet_count == 0 {
            return Err(invalid("topology.cloudlet_count", "must be >= 1"));
        }
        let [lo, hi] = t.vm_count_range;
        if lo == 0 || lo > hi {
            return Err(invalid("topology.vm_count_range", "need 1 <= low <= high"));
        }
        if let Some(v) = &t.vm_counts {
            if v.len() != t.cloudlet_count {
                return Err(invalid("topology.vm_counts", "need one entry per cloudlet"));
            }
            if v.contains(&0) {
                return Err(invalid("topology.vm_counts", "every entry must be >= 1"));
            }
        }
        let [lo, hi] = t.speed_factor_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(invalid("topology.speed_factor_range", "need 0 < low <= high"));
        }
        if let Some(v) = &t.speed_factors {
            if v.len() != t.cloudlet_count {
                return Err(invalid("topology.speed_factors", "need one entry per cloudlet"));
            }
            if v.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
                return Err(invalid("topology.speed_factors", "every entry must be > 0"));
            }
        }
        let n = &self.network;
        for (key, v) in [
            ("network.daemon_rtt_ms", n.daemon_rtt_ms),
            ("network.cloud_rtt_ms", n.cloud_rtt_ms),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(key, "must be >= 0"));
            }
        }
        let [lo, hi] = n.remote_rtt_range_ms;
        if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
            return Err(invalid("network.remote_rtt_range_ms", "need 0 <= low <= high"));
        }
        for (key, v) in [
            ("network.cloudlet_bandwidth", n.cloudlet_bandwidth),
            ("network.cloud_bandwidth", n.cloud_bandwidth),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(key, "must be > 0"));
            }
        }
        let s = &self.scheduling;
        if let Some(d) = s.delay_quantum_ms {
            if !(d > 0.0 && d.is_finite()) {
                return Err(invalid("scheduling.delay_quantum_ms", "must be > 0"));
            }
        }
        if !(s.probe_latency_ms >= 0.0 && s.probe_latency_ms.is_finite()) {
            return Err(invalid("scheduling.probe_latency_ms", "must be >= 0"));
        }
        let w = &self.workload;
        if w.tasks == 0 {
            return Err(invalid("workload.tasks", "must be >= 1"));
        }
        if !(w.lambda > 0.0 && w.lambda.is_finite()) {
            return Err(invalid("workload.lambda", "must be > 0"));
        }
        if w.catalog.is_empty() {
            return Err(invalid("workload.catalog", "needs at least one benchmark"));
        }
        for b in &w.catalog {
            b.validate().map_err(|e| invalid("workload.catalog", e.to_string()))?;
        }
        if let Some(weights) = &w.catalog_weights {
            if weights.len() != w.catalog.len() {
                return Err(invalid("workload.catalog_weights", "need one weight per benchmark"));
            }
            let sum: f64 = weights.iter().sum();
            if weights.iter().any(|x| !(*x >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
                return Err(invalid(
                    "workload.catalog_weights",
                    format!("must be >= 0 and sum to 1, got {sum}"),
                ));
            }
        }
        Ok(())
    }

    pub fn delay_quantum(&self) -> Millis {
        self.scheduling
            .delay_quantum_ms
            .or_else(|| mean_tolerant_service(&self.workload.catalog))
            .unwrap_or(self.time_unit_ms)
    }

    pub fn engine_options(&self) -> EngineOptions {
        EngineOptions {
            max_delays: self.scheduling.max_delays,
            probe_latency_ms: self.scheduling.probe_latency_ms,
        }
    }

    pub fn network_params(&self) -> NetworkParams {
        NetworkParams {
            daemon_rtt: self.network.daemon_rtt_ms,
            cloud_rtt: self.network.cloud_rtt_ms,
            cloudlet_bandwidth: self.network.cloudlet_bandwidth,
            cloud_bandwidth: self.network.cloud_bandwidth,
        }
    }

    /// Draws VM counts, speed factors and pairwise RTTs from `seed`.
    pub fn build_edge_cloud(&self, seed: u64) -> EdgeCloud {
        let t = &self.topology;
        let n = t.cloudlet_count;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vm_counts: Vec<usize> = match &t.vm_counts {
            Some(v) => v.clone(),
            None => (0..n)
                .map(|_| rng.random_range(t.vm_count_range[0]..=t.vm_count_range[1]))
                .collect(),
        };
        let speeds: Vec<f64> = match &t.speed_factors {
            Some(v) => v.clone(),
            None => {
                let [lo, hi] = t.speed_factor_range;
                (0..n)
                    .map(|_| if lo == hi { lo } else { rng.random_range(lo..=hi) })
                    .collect()
            }
        };
        let [lo, hi] = self.network.remote_rtt_range_ms;
        let rtt: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match (i == j, lo == hi) {
                        (true, _) => 0.0,
                        (false, true) => lo,
                        (false, false) => rng.random_range(lo..=hi),
                    })
                    .collect()
            })
            .collect();
        let net = self.network_params();
        let cloudlets = (0..n)
            .map(|i| Cloudlet {
                id: CloudletId(i as u32),
                vm_count: vm_counts[i],
                speed_factor: speeds[i],
                net,
            })
            .collect();
        EdgeCloud::new(cloudlets, rtt).expect("validated config builds a valid edge-cloud")
    }

    pub fn trace_spec(&self, lambda: f64, tasks: usize, seed: u64) -> TraceSpec {
        TraceSpec {
            task_count: tasks,
            lambda,
            time_unit_ms: self.time_unit_ms,
            catalog: self.workload.catalog.clone(),
            catalog_weights: self.workload.catalog_weights.clone(),
            cloudlet_count: self.topology.cloudlet_count,
            seed,
        }
    }
}
