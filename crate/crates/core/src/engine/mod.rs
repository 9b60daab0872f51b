//! Deterministic discrete-event simulation of one edge-cloud run.
//!
//! The clock advances over three event kinds: task arrivals at their daemon,
//! delay wake-ups and task completions. Each arrival or wake-up invokes the
//! scheduler once; an assignment is committed immediately against the
//! executor's [`VmSchedule`], which is what makes per-VM service FCFS.
//! Events at equal timestamps are processed in insertion order.

mod vm;

use std::borrow::Cow;
use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{
    completion_time_cloud, Allocation, CloudletId, EdgeCloud, Millis, ModelError, Task, TaskClass, TaskId,
};
use crate::schedulers::{ProbeResult, ScheduleError, Scheduler, SchedulingDecision};

pub use vm::VmSchedule;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("edge-cloud has no cloudlets")]
    NoCloudlets,
    #[error("task {task} names unknown daemon cloudlet {daemon}")]
    UnknownDaemon { task: TaskId, daemon: CloudletId },
    #[error("task {task} names unknown executor cloudlet {cloudlet}")]
    UnknownExecutor { task: TaskId, cloudlet: CloudletId },
    #[error("trace is not sorted by arrival time at task {task}")]
    UnsortedTrace { task: TaskId },
    #[error("duplicate task id {0}")]
    DuplicateTask(TaskId),
    #[error("cannot delay latency-sensitive task {0}")]
    DelaySensitive(TaskId),
    #[error("delay for task {task} must be positive, got {delay}")]
    NonPositiveDelay { task: TaskId, delay: Millis },
    #[error("task {task} exceeded the cap of {cap} delays")]
    TooManyDelays { task: TaskId, cap: u32 },
    #[error("event at {event} precedes clock {clock}")]
    Causality { event: Millis, clock: Millis },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineOptions {
    /// Abort once a single task has been delayed this many times.
    pub max_delays: u32,
    /// Remote probes observe cloudlet state as of `now - probe_latency_ms`.
    pub probe_latency_ms: Millis,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            max_delays: 1000,
            probe_latency_ms: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EventKind {
    TaskArrival(TaskId),
    DelayExpired(TaskId),
    TaskCompleted {
        task: TaskId,
        executor: Allocation,
        vm: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: Millis,
    pub sequence: u64,
    pub kind: EventKind,
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.sequence.cmp(&other.sequence))
    }
}

/// Outcome of one task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task_id: TaskId,
    pub class: TaskClass,
    pub daemon_id: CloudletId,
    pub allocation: Allocation,
    pub vm_index: Option<usize>,
    pub arrival_time: Millis,
    pub assign_time: Millis,
    pub start_time: Millis,
    pub completion_time: Millis,
    pub turnaround: Millis,
    /// Execution time on the executor, excluding waiting and communication.
    pub service_time: Millis,
    pub comm_time: Millis,
    pub mobile_exec_time: Millis,
    pub latency_bound: Option<Millis>,
    pub delays_taken: u32,
    pub bound_violated: Option<bool>,
}

impl TaskRecord {
    pub fn weighted_turnaround(&self) -> f64 {
        self.turnaround / self.service_time
    }

    pub fn speedup(&self) -> f64 {
        self.mobile_exec_time / self.turnaround
    }

    pub fn executor(&self) -> Option<CloudletId> {
        match self.allocation {
            Allocation::Cloudlet(c) => Some(c),
            _ => None,
        }
    }
}

/// One scheduler invocation, in processing order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionEntry {
    pub time: Millis,
    pub task_id: TaskId,
    pub decision: SchedulingDecision,
    /// For `Delay`: the daemon completion time projected for a commit after
    /// the delay, computed from the engine's own state.
    pub delayed_projection: Option<Millis>,
    /// For `Delay`: wall-clock deadline `arrival + bound`.
    pub deadline: Option<Millis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutput {
    /// One record per input task, in trace order.
    pub records: Vec<TaskRecord>,
    pub decisions: Vec<DecisionEntry>,
    /// Every processed event in processing order.
    pub events: Vec<Event>,
}

/// Tentative completion on `executor` if `task` were committed at `now`.
/// The daemon path is used when `executor` is the task's daemon, the
/// redirected path otherwise. `vms` is not modified.
pub fn expected_completion_time(
    task: &Task,
    edge: &EdgeCloud,
    executor: CloudletId,
    vms: &VmSchedule,
    now: Millis,
) -> ProbeResult {
    let (earliest, _) = vms.earliest();
    let start = now.max(earliest);
    let exec = task.exec_on(edge.cloudlet(executor));
    ProbeResult {
        cloudlet: executor,
        start,
        expected_completion: start + exec + edge.comm_time(task, executor),
        has_idle_vm: earliest <= now,
    }
}

/// Commits `task` to `executor`. Returns `(vm_index, start, completion)`.
pub fn commit_assignment(
    task: &Task,
    edge: &EdgeCloud,
    executor: CloudletId,
    vms: &mut VmSchedule,
    now: Millis,
) -> (usize, Millis, Millis) {
    let exec = task.exec_on(edge.cloudlet(executor));
    let (vm, start) = vms.commit(now, exec);
    (vm, start, start + exec + edge.comm_time(task, executor))
}

/// Builds the wake-up event for a delayed task.
pub fn schedule_delay(task: &Task, delay: Millis, now: Millis, sequence: u64) -> Result<Event, SimError> {
    if task.class != TaskClass::LatencyTolerant {
        return Err(SimError::DelaySensitive(task.id));
    }
    if !(delay > 0.0 && delay.is_finite()) {
        return Err(SimError::NonPositiveDelay { task: task.id, delay });
    }
    Ok(Event {
        time: now + delay,
        sequence,
        kind: EventKind::DelayExpired(task.id),
    })
}

type Snapshots = Vec<(Millis, Vec<Millis>)>;

/// What a scheduler may observe at one decision point.
pub struct ClusterView<'a> {
    now: Millis,
    edge: &'a EdgeCloud,
    vms: &'a [VmSchedule],
    history: Option<&'a [Snapshots]>,
    probe_latency: Millis,
}

impl<'a> ClusterView<'a> {
    /// A view with perfectly fresh state.
    pub fn new(now: Millis, edge: &'a EdgeCloud, vms: &'a [VmSchedule]) -> Self {
        ClusterView {
            now,
            edge,
            vms,
            history: None,
            probe_latency: 0.0,
        }
    }

    pub fn now(&self) -> Millis {
        self.now
    }

    pub fn edge(&self) -> &'a EdgeCloud {
        self.edge
    }

    /// Cloudlet state as seen by `task`'s daemon. The daemon's own state is
    /// always fresh; remote state may lag by the probe latency.
    pub fn state(&self, task: &Task, id: CloudletId) -> Cow<'a, VmSchedule> {
        let fresh = &self.vms[id.index()];
        match self.history {
            Some(history) if id != task.daemon_id && self.probe_latency > 0.0 => {
                let as_of = self.now - self.probe_latency;
                let snaps = &history[id.index()];
                let n = snaps.partition_point(|(t, _)| *t <= as_of);
                if n == 0 {
                    Cow::Owned(VmSchedule::new(fresh.vm_count()))
                } else {
                    Cow::Owned(VmSchedule::from_ready_times(&snaps[n - 1].1))
                }
            }
            _ => Cow::Borrowed(fresh),
        }
    }

    pub fn probe(&self, task: &Task, id: CloudletId) -> ProbeResult {
        expected_completion_time(task, self.edge, id, &self.state(task, id), self.now)
    }

    /// Expected completion on `id` if the commit happened `delay` from now
    /// against the currently observed ready times.
    pub fn probe_delayed(&self, task: &Task, id: CloudletId, delay: Millis) -> Millis {
        expected_completion_time(task, self.edge, id, &self.state(task, id), self.now + delay).expected_completion
    }
}

struct Pending {
    assign_time: Millis,
    start_time: Millis,
    completion_time: Millis,
    allocation: Allocation,
    vm_index: Option<usize>,
    service_time: Millis,
    comm_time: Millis,
}

/// Single-threaded simulation state for one run.
pub struct Simulation<'a> {
    edge: &'a EdgeCloud,
    trace: &'a [Task],
    options: EngineOptions,
    clock: Millis,
    sequence: u64,
    queue: BinaryHeap<Reverse<Event>>,
    vms: Vec<VmSchedule>,
    history: Vec<Snapshots>,
    index_of: std::collections::HashMap<TaskId, usize>,
    delays: Vec<u32>,
    pending: Vec<Option<Pending>>,
    records: Vec<Option<TaskRecord>>,
    decisions: Vec<DecisionEntry>,
    events: Vec<Event>,
}

impl<'a> Simulation<'a> {
    pub fn new(edge: &'a EdgeCloud, trace: &'a [Task], options: EngineOptions) -> Result<Self, SimError> {
        if edge.is_empty() {
            return Err(SimError::NoCloudlets);
        }
        let mut index_of = std::collections::HashMap::with_capacity(trace.len());
        let mut seen = HashSet::with_capacity(trace.len());
        let mut prev = f64::NEG_INFINITY;
        for (i, task) in trace.iter().enumerate() {
            task.validate()?;
            if edge.get(task.daemon_id).is_none() {
                return Err(SimError::UnknownDaemon {
                    task: task.id,
                    daemon: task.daemon_id,
                });
            }
            if task.arrival_time < prev {
                return Err(SimError::UnsortedTrace { task: task.id });
            }
            prev = task.arrival_time;
            if !seen.insert(task.id) {
                return Err(SimError::DuplicateTask(task.id));
            }
            index_of.insert(task.id, i);
        }
        let mut sim = Simulation {
            edge,
            trace,
            options,
            clock: 0.0,
            sequence: 0,
            queue: BinaryHeap::new(),
            vms: edge.cloudlets.iter().map(|c| VmSchedule::new(c.vm_count)).collect(),
            history: vec![Vec::new(); edge.len()],
            index_of,
            delays: vec![0; trace.len()],
            pending: (0..trace.len()).map(|_| None).collect(),
            records: vec![None; trace.len()],
            decisions: Vec::new(),
            events: Vec::new(),
        };
        for task in trace {
            sim.push(task.arrival_time, EventKind::TaskArrival(task.id));
        }
        Ok(sim)
    }

    fn next_sequence(&mut self) -> u64 {
        let s = self.sequence;
        self.sequence += 1;
        s
    }

    fn push(&mut self, time: Millis, kind: EventKind) {
        let sequence = self.next_sequence();
        self.queue.push(Reverse(Event { time, sequence, kind }));
    }

    pub fn run(mut self, scheduler: &mut dyn Scheduler) -> Result<SimOutput, SimError> {
        while let Some(Reverse(event)) = self.queue.pop() {
            if event.time < self.clock {
                return Err(SimError::Causality {
                    event: event.time,
                    clock: self.clock,
                });
            }
            self.clock = event.time;
            self.events.push(event);
            match event.kind {
                EventKind::TaskArrival(id) | EventKind::DelayExpired(id) => {
                    self.dispatch(self.index_of[&id], scheduler)?
                }
                EventKind::TaskCompleted { task, .. } => self.complete(self.index_of[&task]),
            }
        }
        let records = self
            .records
            .into_iter()
            .map(|r| r.expect("every task completes"))
            .collect();
        Ok(SimOutput {
            records,
            decisions: self.decisions,
            events: self.events,
        })
    }

    fn dispatch(&mut self, idx: usize, scheduler: &mut dyn Scheduler) -> Result<(), SimError> {
        let task = &self.trace[idx];
        let now = self.clock;
        let view = ClusterView {
            now,
            edge: self.edge,
            vms: &self.vms,
            history: Some(&self.history),
            probe_latency: self.options.probe_latency_ms,
        };
        let decision = scheduler.decide(task, &view)?;
        let mut entry = DecisionEntry {
            time: now,
            task_id: task.id,
            decision,
            delayed_projection: None,
            deadline: None,
        };
        match decision {
            SchedulingDecision::Assign(cloudlet) => {
                if self.edge.get(cloudlet).is_none() {
                    return Err(SimError::UnknownExecutor {
                        task: task.id,
                        cloudlet,
                    });
                }
                let vms = &mut self.vms[cloudlet.index()];
                let (vm, start, completion) = commit_assignment(task, self.edge, cloudlet, vms, now);
                if self.options.probe_latency_ms > 0.0 {
                    self.history[cloudlet.index()].push((now, vms.ready_times()));
                }
                self.pending[idx] = Some(Pending {
                    assign_time: now,
                    start_time: start,
                    completion_time: completion,
                    allocation: Allocation::Cloudlet(cloudlet),
                    vm_index: Some(vm),
                    service_time: task.exec_on(self.edge.cloudlet(cloudlet)),
                    comm_time: self.edge.comm_time(task, cloudlet),
                });
                self.push(
                    completion,
                    EventKind::TaskCompleted {
                        task: task.id,
                        executor: Allocation::Cloudlet(cloudlet),
                        vm: Some(vm),
                    },
                );
            }
            SchedulingDecision::AssignCloud => {
                let daemon = self.edge.cloudlet(task.daemon_id);
                let b = completion_time_cloud(task, &daemon.net)?;
                let completion = now + b.total;
                self.pending[idx] = Some(Pending {
                    assign_time: now,
                    start_time: now,
                    completion_time: completion,
                    allocation: Allocation::Cloud,
                    vm_index: None,
                    service_time: b.exec,
                    comm_time: b.comm,
                });
                self.push(
                    completion,
                    EventKind::TaskCompleted {
                        task: task.id,
                        executor: Allocation::Cloud,
                        vm: None,
                    },
                );
            }
            SchedulingDecision::Delay(delay) => {
                let sequence = self.next_sequence();
                let wake = schedule_delay(task, delay, now, sequence)?;
                self.delays[idx] += 1;
                if self.delays[idx] > self.options.max_delays {
                    return Err(SimError::TooManyDelays {
                        task: task.id,
                        cap: self.options.max_delays,
                    });
                }
                let daemon = task.daemon_id;
                entry.delayed_projection = Some(
                    expected_completion_time(task, self.edge, daemon, &self.vms[daemon.index()], now + delay)
                        .expected_completion,
                );
                entry.deadline = task.latency_bound.map(|b| task.arrival_time + b);
                self.queue.push(Reverse(wake));
            }
        }
        self.decisions.push(entry);
        Ok(())
    }

    fn complete(&mut self, idx: usize) {
        let task = &self.trace[idx];
        let p = self.pending[idx].take().expect("completion follows assignment");
        let turnaround = p.completion_time - task.arrival_time;
        self.records[idx] = Some(TaskRecord {
            task_id: task.id,
            class: task.class,
            daemon_id: task.daemon_id,
            allocation: p.allocation,
            vm_index: p.vm_index,
            arrival_time: task.arrival_time,
            assign_time: p.assign_time,
            start_time: p.start_time,
            completion_time: p.completion_time,
            turnaround,
            service_time: p.service_time,
            comm_time: p.comm_time,
            mobile_exec_time: task.mobile_exec_time,
            latency_bound: task.latency_bound,
            delays_taken: self.delays[idx],
            bound_violated: task.latency_bound.map(|b| turnaround > b),
        });
    }
}

/// Runs `trace` on `edge` under `scheduler`.
pub fn simulate(
    edge: &EdgeCloud,
    trace: &[Task],
    scheduler: &mut dyn Scheduler,
    options: EngineOptions,
) -> Result<SimOutput, SimError> {
    Simulation::new(edge, trace, options)?.run(scheduler)
}

/// Delay decisions whose projected daemon completion after the delay had
/// already reached the task's deadline.
pub fn unsafe_delays(decisions: &[DecisionEntry]) -> Vec<&DecisionEntry> {
    decisions
        .iter()
        .filter(|d| matches!(d.decision, SchedulingDecision::Delay(_)))
        .filter(|d| match (d.delayed_projection, d.deadline) {
            (Some(p), Some(deadline)) => p >= deadline,
            _ => true,
        })
        .collect()
}

/// Checks that no VM runs two tasks at once. Returns the offending pair.
pub fn find_vm_overlap(records: &[TaskRecord]) -> Option<(TaskId, TaskId)> {
    let mut by_vm: std::collections::BTreeMap<(CloudletId, usize), Vec<&TaskRecord>> = Default::default();
    for r in records {
        if let (Some(c), Some(vm)) = (r.executor(), r.vm_index) {
            by_vm.entry((c, vm)).or_default().push(r);
        }
    }
    for list in by_vm.values_mut() {
        list.sort_by(|a, b| a.start_time.total_cmp(&b.start_time));
        for w in list.windows(2) {
            if w[0].start_time + w[0].service_time > w[1].start_time {
                return Some((w[0].task_id, w[1].task_id));
            }
        }
    }
    None
}
