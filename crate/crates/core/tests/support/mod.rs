#![allow(dead_code)]

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use petrel::engine::DecisionEntry;
use petrel::{
    Cloudlet, CloudletId, EdgeCloud, Millis, NetworkParams, SchedulingDecision, Task, TaskClass, TaskId, TaskRecord,
};

/// A random small instance plus the raw parameters it was built from, so the
/// oracle never has to read numbers back through the library.
pub struct Instance {
    pub edge: EdgeCloud,
    pub trace: Vec<Task>,
    pub vm_counts: Vec<usize>,
    pub speeds: Vec<f64>,
    pub nets: Vec<NetworkParams>,
    pub rtt: Vec<Vec<f64>>,
    pub delay: Millis,
}

pub fn random_instance(rng: &mut ChaCha8Rng, max_cloudlets: usize, max_vms: usize, max_tasks: usize) -> Instance {
    let n = rng.random_range(1..=max_cloudlets);
    let vm_counts: Vec<usize> = (0..n).map(|_| rng.random_range(1..=max_vms)).collect();
    let speeds: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let nets: Vec<NetworkParams> = (0..n)
        .map(|_| NetworkParams {
            daemon_rtt: rng.random_range(1.0..20.0),
            cloud_rtt: rng.random_range(50.0..300.0),
            cloudlet_bandwidth: rng.random_range(1_000.0..20_000.0),
            cloud_bandwidth: rng.random_range(500.0..5_000.0),
        })
        .collect();
    let rtt: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 0.0 } else { rng.random_range(20.0..100.0) })
                .collect()
        })
        .collect();
    let cloudlets = (0..n)
        .map(|i| Cloudlet {
            id: CloudletId(i as u32),
            vm_count: vm_counts[i],
            speed_factor: speeds[i],
            net: nets[i],
        })
        .collect();
    let edge = EdgeCloud::new(cloudlets, rtt.clone()).unwrap();

    let count = rng.random_range(1..=max_tasks);
    let mut now = 0.0;
    let trace = (0..count)
        .map(|i| {
            // occasional simultaneous arrivals
            if rng.random_bool(0.8) {
                now += rng.random_range(0.0..3_000.0);
            }
            let base = rng.random_range(200.0..6_000.0);
            let tolerant = rng.random_bool(0.4);
            Task {
                id: TaskId(i as u32),
                arrival_time: now,
                daemon_id: CloudletId(rng.random_range(0..n) as u32),
                benchmark: if tolerant { "sandwich" } else { "face" }.into(),
                class: if tolerant {
                    TaskClass::LatencyTolerant
                } else {
                    TaskClass::LatencySensitive
                },
                base_service_time: base,
                mobile_exec_time: base * rng.random_range(2.0..10.0),
                cloud_exec_time: base * rng.random_range(0.3..1.0),
                data_volume: rng.random_range(0.0..5e6),
                latency_bound: tolerant.then(|| base * rng.random_range(1.0..6.0)),
            }
        })
        .collect();
    Instance {
        edge,
        trace,
        vm_counts,
        speeds,
        nets,
        rtt,
        delay: rng.random_range(100.0..3_000.0),
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replayed {
    pub assign: Millis,
    pub start: Millis,
    pub completion: Millis,
    pub executor: Option<usize>,
    pub delays: u32,
}

/// Per-cloudlet VM ready times rebuilt by brute force.
pub struct Replay<'a> {
    pub inst: &'a Instance,
    pub ready: Vec<Vec<Millis>>,
}

impl<'a> Replay<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        Replay {
            inst,
            ready: inst.vm_counts.iter().map(|&v| vec![0.0; v]).collect(),
        }
    }

    pub fn exec(&self, task: &Task, c: usize) -> Millis {
        task.base_service_time / self.inst.speeds[c]
    }

    pub fn comm(&self, task: &Task, c: usize) -> Millis {
        let d = task.daemon_id.0 as usize;
        let extra = if c == d { 0.0 } else { self.inst.rtt[d][c] };
        task.data_volume / self.inst.nets[c].cloudlet_bandwidth + self.inst.nets[d].daemon_rtt + extra
    }

    /// Earliest VM of `c` and the start a task committed at `now` would get.
    pub fn slot(&self, c: usize, now: Millis) -> (usize, Millis) {
        let mut best = 0;
        for (i, &r) in self.ready[c].iter().enumerate() {
            if r < self.ready[c][best] {
                best = i;
            }
        }
        (best, now.max(self.ready[c][best]))
    }

    pub fn expected(&self, task: &Task, c: usize, now: Millis) -> Millis {
        let (_, start) = self.slot(c, now);
        start + self.exec(task, c) + self.comm(task, c)
    }

    pub fn commit(&mut self, task: &Task, c: usize, now: Millis) -> (Millis, Millis) {
        let (vm, start) = self.slot(c, now);
        let exec = self.exec(task, c);
        self.ready[c][vm] = start + exec;
        (start, start + exec + self.comm(task, c))
    }
}

/// Recomputes every start and completion from the decision log alone. The
/// `observe` hook sees each decision together with the state it was made in.
pub fn replay_with(
    inst: &Instance,
    decisions: &[DecisionEntry],
    mut observe: impl FnMut(&Replay<'_>, &Task, &DecisionEntry),
) -> Result<HashMap<TaskId, Replayed>, String> {
    let by_id: HashMap<TaskId, &Task> = inst.trace.iter().map(|t| (t.id, t)).collect();
    let mut state = Replay::new(inst);
    let mut out = HashMap::new();
    let mut delays: HashMap<TaskId, u32> = HashMap::new();
    let mut due: HashMap<TaskId, Millis> = inst.trace.iter().map(|t| (t.id, t.arrival_time)).collect();
    let mut last_time = f64::NEG_INFINITY;
    for entry in decisions {
        let task = by_id.get(&entry.task_id).ok_or("decision for an unknown task")?;
        if entry.time < last_time {
            return Err(format!("decision log goes back in time at task {}", task.id));
        }
        last_time = entry.time;
        let expected_time = due
            .remove(&task.id)
            .ok_or(format!("task {} decided after assignment", task.id))?;
        if entry.time != expected_time {
            return Err(format!(
                "task {} decided at {} but was due at {}",
                task.id, entry.time, expected_time
            ));
        }
        observe(&state, task, entry);
        let k = *delays.get(&task.id).unwrap_or(&0);
        match entry.decision {
            SchedulingDecision::Delay(d) => {
                delays.insert(task.id, k + 1);
                due.insert(task.id, entry.time + d);
            }
            SchedulingDecision::AssignCloud => {
                let net = inst.nets[task.daemon_id.0 as usize];
                let total = task.cloud_exec_time + (task.data_volume / net.cloud_bandwidth + net.cloud_rtt);
                out.insert(
                    task.id,
                    Replayed {
                        assign: entry.time,
                        start: entry.time,
                        completion: entry.time + total,
                        executor: None,
                        delays: k,
                    },
                );
            }
            SchedulingDecision::Assign(c) => {
                let (start, completion) = state.commit(task, c.0 as usize, entry.time);
                out.insert(
                    task.id,
                    Replayed {
                        assign: entry.time,
                        start,
                        completion,
                        executor: Some(c.0 as usize),
                        delays: k,
                    },
                );
            }
        }
    }
    if let Some(id) = due.keys().next() {
        return Err(format!("task {id} was never assigned"));
    }
    Ok(out)
}

pub fn replay(inst: &Instance, decisions: &[DecisionEntry]) -> Result<HashMap<TaskId, Replayed>, String> {
    replay_with(inst, decisions, |_, _, _| {})
}

/// Exact comparison of engine records against the oracle.
pub fn check_records(records: &[TaskRecord], oracle: &HashMap<TaskId, Replayed>) -> Result<(), String> {
    if records.len() != oracle.len() {
        return Err(format!("{} records but {} replayed tasks", records.len(), oracle.len()));
    }
    for r in records {
        let o = oracle
            .get(&r.task_id)
            .ok_or(format!("task {} missing from replay", r.task_id))?;
        let got = Replayed {
            assign: r.assign_time,
            start: r.start_time,
            completion: r.completion_time,
            executor: r.executor().map(|c| c.0 as usize),
            delays: r.delays_taken,
        };
        if got != *o {
            return Err(format!("task {}: engine {got:?} oracle {o:?}", r.task_id));
        }
    }
    Ok(())
}
