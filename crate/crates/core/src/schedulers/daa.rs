//! Distributed application-aware scheduling.
//!
//! A daemon with an idle VM keeps the task. Otherwise the daemon samples two
//! other cloudlets and takes the less loaded one as the candidate executor.
//! Latency-sensitive tasks go wherever the expected completion is strictly
//! earlier. Latency-tolerant tasks go to the candidate only if it has an
//! idle VM; otherwise they are delayed by one quantum as long as the daemon
//! completion projected after the delay stays below the task's deadline.

use rand_chacha::ChaCha8Rng;

use super::{less_loaded, sample_candidates, Policy, ProbeResult, ScheduleError, Scheduler, SchedulingDecision};
use crate::domain::{Millis, Task, TaskClass};
use crate::engine::ClusterView;

/// Everything the DAA decision reads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DaaObservation {
    pub daemon: ProbeResult,
    /// The less loaded of the sampled cloudlets, if any were sampled.
    pub candidate: Option<ProbeResult>,
    /// Daemon expected completion if the task were committed one delay
    /// quantum from now.
    pub delayed_daemon_completion: Millis,
}

pub fn daa_decide(task: &Task, obs: &DaaObservation, delay: Millis) -> SchedulingDecision {
    let daemon = obs.daemon.cloudlet;
    if obs.daemon.has_idle_vm {
        return SchedulingDecision::Assign(daemon);
    }
    let t_daemon = obs.daemon.expected_completion;
    match task.class {
        TaskClass::LatencySensitive => match obs.candidate {
            Some(e) if e.expected_completion < t_daemon => SchedulingDecision::Assign(e.cloudlet),
            _ => SchedulingDecision::Assign(daemon),
        },
        TaskClass::LatencyTolerant => {
            if let Some(e) = obs.candidate.filter(|e| e.has_idle_vm) {
                return SchedulingDecision::Assign(e.cloudlet);
            }
            match task.latency_bound {
                Some(bound) if obs.delayed_daemon_completion < task.arrival_time + bound => {
                    SchedulingDecision::Delay(delay)
                }
                _ => SchedulingDecision::Assign(daemon),
            }
        }
    }
}

pub struct Daa {
    rng: ChaCha8Rng,
    delay: Millis,
}

impl Daa {
    pub fn new(rng: ChaCha8Rng, delay: Millis) -> Self {
        Daa { rng, delay }
    }
}

impl Scheduler for Daa {
    fn policy(&self) -> Policy {
        Policy::Daa
    }

    fn decide(&mut self, task: &Task, view: &ClusterView<'_>) -> Result<SchedulingDecision, ScheduleError> {
        let daemon = view.probe(task, task.daemon_id);
        if daemon.has_idle_vm {
            return Ok(SchedulingDecision::Assign(task.daemon_id));
        }
        let candidate = sample_candidates(view.edge(), task.daemon_id, &mut self.rng)
            .into_iter()
            .map(|c| view.probe(task, c))
            .reduce(less_loaded);
        let obs = DaaObservation {
            daemon,
            candidate,
            delayed_daemon_completion: view.probe_delayed(task, task.daemon_id, self.delay),
        };
        Ok(daa_decide(task, &obs, self.delay))
    }
}
