//! Task, cloudlet and network types together with the completion-time model.
//!
//! A task offloaded from a mobile device can run locally, in the cloud, on
//! its daemon cloudlet, or on a remote execution cloudlet reached through the
//! daemon. Each platform has a closed-form completion time:
//!
//! ```text
//! mobile:  T = R_mobile
//! cloud:   T = R_cloud + D / B_cloud + RTT_cloud
//! daemon:  T = R_d + W_d + D / B_d + RTT_d
//! remote:  T = R_e + W_e + D / B_e + RTT_d + RTT_(d->e)
//! ```
//!
//! All durations are milliseconds held in `f64`; bandwidths are bytes/ms.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Milliseconds, used both for timestamps and durations.
pub type Millis = f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaskId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CloudletId(pub u32);

impl CloudletId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for CloudletId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("bandwidth must be positive, got {0}")]
    NonPositiveBandwidth(f64),
    #[error("waiting time must be non-negative, got {0}")]
    NegativeWait(f64),
    #[error("executor cloudlet {0} is the daemon; use the daemon completion time")]
    ExecutorIsDaemon(CloudletId),
    #[error("completion time must be positive, got {0}")]
    NonPositiveCompletion(f64),
    #[error("cannot average an empty record list")]
    Empty,
    #[error("invalid task {task}: {reason}")]
    InvalidTask { task: TaskId, reason: String },
    #[error("invalid cloudlet {cloudlet}: {reason}")]
    InvalidCloudlet { cloudlet: CloudletId, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskClass {
    LatencySensitive,
    LatencyTolerant,
}

impl TaskClass {
    /// Short token used in trace files and reports.
    pub fn token(self) -> &'static str {
        match self {
            TaskClass::LatencySensitive => "sensitive",
            TaskClass::LatencyTolerant => "tolerant",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "sensitive" => Some(TaskClass::LatencySensitive),
            "tolerant" => Some(TaskClass::LatencyTolerant),
            _ => None,
        }
    }
}

/// One offloading request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: TaskId,
    pub arrival_time: Millis,
    pub daemon_id: CloudletId,
    pub benchmark: String,
    pub class: TaskClass,
    /// Execution time on a cloudlet with `speed_factor == 1`.
    pub base_service_time: Millis,
    pub mobile_exec_time: Millis,
    pub cloud_exec_time: Millis,
    pub data_volume: f64,
    /// Present exactly for latency-tolerant tasks.
    pub latency_bound: Option<Millis>,
}

impl Task {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |reason: &str| ModelError::InvalidTask {
            task: self.id,
            reason: reason.to_string(),
        };
        if !(self.arrival_time >= 0.0 && self.arrival_time.is_finite()) {
            return Err(bad("arrival_time must be a finite value >= 0"));
        }
        if !(self.base_service_time > 0.0 && self.base_service_time.is_finite()) {
            return Err(bad("base_service_time must be > 0"));
        }
        if !(self.mobile_exec_time > 0.0 && self.mobile_exec_time.is_finite()) {
            return Err(bad("mobile_exec_time must be > 0"));
        }
        if !(self.cloud_exec_time > 0.0 && self.cloud_exec_time.is_finite()) {
            return Err(bad("cloud_exec_time must be > 0"));
        }
        if !(self.data_volume >= 0.0 && self.data_volume.is_finite()) {
            return Err(bad("data_volume must be >= 0"));
        }
        match (self.class, self.latency_bound) {
            (TaskClass::LatencySensitive, None) => {}
            (TaskClass::LatencySensitive, Some(_)) => {
                return Err(bad("latency-sensitive tasks carry no latency_bound"))
            }
            (TaskClass::LatencyTolerant, None) => return Err(bad("latency-tolerant tasks need a latency_bound")),
            (TaskClass::LatencyTolerant, Some(b)) if !(b > 0.0 && b.is_finite()) => {
                return Err(bad("latency_bound must be > 0"))
            }
            (TaskClass::LatencyTolerant, Some(_)) => {}
        }
        Ok(())
    }

    /// Execution time on a cloudlet of the given speed.
    pub fn exec_on(&self, cloudlet: &Cloudlet) -> Millis {
        self.base_service_time / cloudlet.speed_factor
    }
}

/// Network parameters seen from one cloudlet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    /// Mobile device to this (daemon) cloudlet.
    pub daemon_rtt: Millis,
    pub cloud_rtt: Millis,
    pub cloudlet_bandwidth: f64,
    pub cloud_bandwidth: f64,
}

impl NetworkParams {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [("daemon_rtt", self.daemon_rtt), ("cloud_rtt", self.cloud_rtt)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(format!("{name} must be >= 0"));
            }
        }
        for (name, v) in [
            ("cloudlet_bandwidth", self.cloudlet_bandwidth),
            ("cloud_bandwidth", self.cloud_bandwidth),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be > 0"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cloudlet {
    pub id: CloudletId,
    pub vm_count: usize,
    pub speed_factor: f64,
    pub net: NetworkParams,
}

impl Cloudlet {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |reason: String| ModelError::InvalidCloudlet {
            cloudlet: self.id,
            reason,
        };
        if self.vm_count == 0 {
            return Err(bad("vm_count must be >= 1".into()));
        }
        if !(self.speed_factor > 0.0 && self.speed_factor.is_finite()) {
            return Err(bad("speed_factor must be > 0".into()));
        }
        self.net.validate().map_err(bad)
    }
}

/// Where a task ran.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Allocation {
    Mobile,
    Cloud,
    Cloudlet(CloudletId),
}

impl fmt::Display for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Allocation::Mobile => f.write_str("mobile"),
            Allocation::Cloud => f.write_str("cloud"),
            Allocation::Cloudlet(id) => write!(f, "{id}"),
        }
    }
}

/// Completion time split into its execution, waiting and communication parts.
/// `exec + wait + comm` equals `total` to within one unit in the last place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompletionBreakdown {
    pub exec: Millis,
    pub wait: Millis,
    pub comm: Millis,
    pub total: Millis,
}

impl CompletionBreakdown {
    fn new(exec: Millis, wait: Millis, comm: Millis) -> Self {
        CompletionBreakdown {
            exec,
            wait,
            comm,
            total: exec + wait + comm,
        }
    }

    /// Adds a round trip on top of an existing breakdown. The total grows by
    /// one rounded addition and `comm` takes up the remainder.
    fn plus_rtt(self, rtt: Millis) -> Self {
        if rtt == 0.0 {
            return self;
        }
        let total = self.total + rtt;
        CompletionBreakdown {
            comm: total - (self.exec + self.wait),
            total,
            ..self
        }
    }
}

pub fn completion_time_mobile(task: &Task) -> CompletionBreakdown {
    CompletionBreakdown::new(task.mobile_exec_time, 0.0, 0.0)
}

/// The cloud has unlimited capacity, so waiting is always zero.
pub fn completion_time_cloud(task: &Task, net: &NetworkParams) -> Result<CompletionBreakdown, ModelError> {
    if !(net.cloud_bandwidth > 0.0) {
        return Err(ModelError::NonPositiveBandwidth(net.cloud_bandwidth));
    }
    let comm = task.data_volume / net.cloud_bandwidth + net.cloud_rtt;
    Ok(CompletionBreakdown::new(task.cloud_exec_time, 0.0, comm))
}

/// Communication time for a task executed on its daemon cloudlet.
pub fn daemon_comm(task: &Task, daemon: &Cloudlet) -> Millis {
    task.data_volume / daemon.net.cloudlet_bandwidth + daemon.net.daemon_rtt
}

/// Communication time for a task redirected from `daemon` to `executor`.
pub fn remote_comm(task: &Task, daemon: &Cloudlet, executor: &Cloudlet, remote_rtt: Millis) -> Millis {
    task.data_volume / executor.net.cloudlet_bandwidth + daemon.net.daemon_rtt + remote_rtt
}

pub fn completion_time_daemon(
    task: &Task,
    cloudlet: &Cloudlet,
    wait: Millis,
) -> Result<CompletionBreakdown, ModelError> {
    if !(wait >= 0.0) {
        return Err(ModelError::NegativeWait(wait));
    }
    if !(cloudlet.net.cloudlet_bandwidth > 0.0) {
        return Err(ModelError::NonPositiveBandwidth(cloudlet.net.cloudlet_bandwidth));
    }
    Ok(CompletionBreakdown::new(
        task.exec_on(cloudlet),
        wait,
        daemon_comm(task, cloudlet),
    ))
}

/// `remote_rtt` is the additional round trip from `daemon` to `executor`.
pub fn completion_time_remote(
    task: &Task,
    daemon: &Cloudlet,
    executor: &Cloudlet,
    remote_rtt: Millis,
    wait: Millis,
) -> Result<CompletionBreakdown, ModelError> {
    if executor.id == daemon.id {
        return Err(ModelError::ExecutorIsDaemon(executor.id));
    }
    if !(wait >= 0.0) {
        return Err(ModelError::NegativeWait(wait));
    }
    if !(executor.net.cloudlet_bandwidth > 0.0) {
        return Err(ModelError::NonPositiveBandwidth(executor.net.cloudlet_bandwidth));
    }
    let local_path = CompletionBreakdown::new(
        task.exec_on(executor),
        wait,
        task.data_volume / executor.net.cloudlet_bandwidth + daemon.net.daemon_rtt,
    );
    Ok(local_path.plus_rtt(remote_rtt))
}

/// Mobile execution time over the completion time of the chosen platform.
///
/// For [`Allocation::Mobile`] the completion time is the mobile execution
/// time by definition and the result is exactly 1.
pub fn speedup(task: &Task, alloc: Allocation, completion: Millis) -> Result<f64, ModelError> {
    if alloc == Allocation::Mobile {
        return Ok(1.0);
    }
    if !(completion > 0.0) {
        return Err(ModelError::NonPositiveCompletion(completion));
    }
    Ok(task.mobile_exec_time / completion)
}

pub fn average_speedup<'a, I>(records: I) -> Result<f64, ModelError>
where
    I: IntoIterator<Item = (&'a Task, Allocation, Millis)>,
{
    let mut sum = 0.0;
    let mut n = 0usize;
    for (task, alloc, completion) in records {
        sum += speedup(task, alloc, completion)?;
        n += 1;
    }
    if n == 0 {
        return Err(ModelError::Empty);
    }
    Ok(sum / n as f64)
}

/// Topology of one edge-cloud: the cloudlets plus the fixed additional RTT
/// for every ordered pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeCloud {
    pub cloudlets: Vec<Cloudlet>,
    /// Row-major `n x n`; the diagonal is zero.
    remote_rtt: Vec<Millis>,
}

impl EdgeCloud {
    /// Cloudlet ids must equal their position in `cloudlets`.
    pub fn new(cloudlets: Vec<Cloudlet>, remote_rtt: Vec<Vec<Millis>>) -> Result<Self, ModelError> {
        let n = cloudlets.len();
        for (i, c) in cloudlets.iter().enumerate() {
            if c.id.index() != i {
                return Err(ModelError::InvalidCloudlet {
                    cloudlet: c.id,
                    reason: format!("id must equal its position {i}"),
                });
            }
            c.validate()?;
        }
        if remote_rtt.len() != n || remote_rtt.iter().any(|row| row.len() != n) {
            return Err(ModelError::InvalidCloudlet {
                cloudlet: CloudletId(0),
                reason: format!("remote RTT matrix must be {n}x{n}"),
            });
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in remote_rtt.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(ModelError::InvalidCloudlet {
                        cloudlet: CloudletId(i as u32),
                        reason: format!("remote RTT to {j} must be >= 0"),
                    });
                }
                flat.push(if i == j { 0.0 } else { v });
            }
        }
        Ok(EdgeCloud {
            cloudlets,
            remote_rtt: flat,
        })
    }

    /// Every ordered pair shares the same additional RTT.
    pub fn uniform(cloudlets: Vec<Cloudlet>, remote_rtt: Millis) -> Result<Self, ModelError> {
        let n = cloudlets.len();
        EdgeCloud::new(cloudlets, vec![vec![remote_rtt; n]; n])
    }

    pub fn len(&self) -> usize {
        self.cloudlets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cloudlets.is_empty()
    }

    pub fn get(&self, id: CloudletId) -> Option<&Cloudlet> {
        self.cloudlets.get(id.index())
    }

    pub fn cloudlet(&self, id: CloudletId) -> &Cloudlet {
        &self.cloudlets[id.index()]
    }

    pub fn remote_rtt(&self, from: CloudletId, to: CloudletId) -> Millis {
        self.remote_rtt[from.index() * self.len() + to.index()]
    }

    pub fn ids(&self) -> impl Iterator<Item = CloudletId> + '_ {
        self.cloudlets.iter().map(|c| c.id)
    }

    /// Communication time for `task` executed on `executor`, picking the
    /// daemon or redirected path as appropriate.
    pub fn comm_time(&self, task: &Task, executor: CloudletId) -> Millis {
        let daemon = self.cloudlet(task.daemon_id);
        if executor == task.daemon_id {
            daemon_comm(task, daemon)
        } else {
            remote_comm(
                task,
                daemon,
                self.cloudlet(executor),
                self.remote_rtt(task.daemon_id, executor),
            )
        }
    }
}
