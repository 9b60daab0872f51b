use rand_chacha::ChaCha8Rng;

use super::{less_loaded, sample_candidates, Policy, ProbeResult, ScheduleError, Scheduler, SchedulingDecision};
use crate::domain::{CloudletId, Task};
use crate::engine::ClusterView;

pub fn daemon_only_decide(task: &Task) -> SchedulingDecision {
    SchedulingDecision::Assign(task.daemon_id)
}

pub fn cloud_only_decide(_task: &Task) -> SchedulingDecision {
    SchedulingDecision::AssignCloud
}

/// Argmin of expected completion over `probes`; ties prefer `daemon`, then
/// the lowest cloudlet id.
pub fn greedy_decide(daemon: CloudletId, probes: &[ProbeResult]) -> SchedulingDecision {
    let best = probes
        .iter()
        .min_by(|a, b| {
            a.expected_completion
                .total_cmp(&b.expected_completion)
                .then((a.cloudlet != daemon).cmp(&(b.cloudlet != daemon)))
                .then(a.cloudlet.cmp(&b.cloudlet))
        })
        .map(|p| p.cloudlet)
        .unwrap_or(daemon);
    SchedulingDecision::Assign(best)
}

/// The earlier of the sampled probes; no daemon comparison. Falls back to
/// the daemon when there is nothing to sample.
pub fn two_choices_decide(daemon: CloudletId, probes: &[ProbeResult]) -> SchedulingDecision {
    let target = probes
        .iter()
        .copied()
        .reduce(less_loaded)
        .map(|p| p.cloudlet)
        .unwrap_or(daemon);
    SchedulingDecision::Assign(target)
}

pub struct DaemonOnly;

impl Scheduler for DaemonOnly {
    fn policy(&self) -> Policy {
        Policy::DaemonOnly
    }

    fn decide(&mut self, task: &Task, _view: &ClusterView<'_>) -> Result<SchedulingDecision, ScheduleError> {
        Ok(daemon_only_decide(task))
    }
}

/// One cursor per daemon over the full cloudlet list.
pub struct RoundRobin {
    cursors: Vec<usize>,
}

impl RoundRobin {
    pub fn new(cloudlets: usize) -> Self {
        RoundRobin {
            cursors: vec![0; cloudlets],
        }
    }

    pub fn next_for(&mut self, daemon: CloudletId) -> SchedulingDecision {
        let n = self.cursors.len();
        let cursor = &mut self.cursors[daemon.index()];
        let target = CloudletId(*cursor as u32);
        *cursor = (*cursor + 1) % n;
        SchedulingDecision::Assign(target)
    }
}

impl Scheduler for RoundRobin {
    fn policy(&self) -> Policy {
        Policy::RoundRobin
    }

    fn decide(&mut self, task: &Task, _view: &ClusterView<'_>) -> Result<SchedulingDecision, ScheduleError> {
        Ok(self.next_for(task.daemon_id))
    }
}

pub struct Greedy;

impl Scheduler for Greedy {
    fn policy(&self) -> Policy {
        Policy::Greedy
    }

    fn decide(&mut self, task: &Task, view: &ClusterView<'_>) -> Result<SchedulingDecision, ScheduleError> {
        let probes: Vec<ProbeResult> = view.edge().ids().map(|c| view.probe(task, c)).collect();
        Ok(greedy_decide(task.daemon_id, &probes))
    }
}

pub struct TwoChoices {
    rng: ChaCha8Rng,
}

impl TwoChoices {
    pub fn new(rng: ChaCha8Rng) -> Self {
        TwoChoices { rng }
    }
}

impl Scheduler for TwoChoices {
    fn policy(&self) -> Policy {
        Policy::TwoChoices
    }

    fn decide(&mut self, task: &Task, view: &ClusterView<'_>) -> Result<SchedulingDecision, ScheduleError> {
        let probes: Vec<ProbeResult> = sample_candidates(view.edge(), task.daemon_id, &mut self.rng)
            .into_iter()
            .map(|c| view.probe(task, c))
            .collect();
        Ok(two_choices_decide(task.daemon_id, &probes))
    }
}

pub struct CloudOnly;

impl Scheduler for CloudOnly {
    fn policy(&self) -> Policy {
        Policy::CloudOnly
    }

    fn decide(&mut self, task: &Task, _view: &ClusterView<'_>) -> Result<SchedulingDecision, ScheduleError> {
        Ok(cloud_only_decide(task))
    }
}
