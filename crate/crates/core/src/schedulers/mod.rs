//! Scheduling policies.
//!
//! Every policy implements [`Scheduler`]: given one task and a
//! [`ClusterView`] it returns a [`SchedulingDecision`]. The engine applies
//! the decision. Policies own only a seeded rng and small cursors, so
//! replaying the same observations reproduces the same decisions.

mod baselines;
mod daa;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{CloudletId, EdgeCloud, Millis, Task};
use crate::engine::ClusterView;

pub use baselines::{
    cloud_only_decide, daemon_only_decide, greedy_decide, two_choices_decide, CloudOnly, DaemonOnly, Greedy,
    RoundRobin, TwoChoices,
};
pub use daa::{daa_decide, Daa, DaaObservation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error(
        "daemon {daemon} has {available} other cloudlet(s); two-choice sampling needs at least 2, \
         configure more cloudlets"
    )]
    TooFewCloudlets { daemon: CloudletId, available: usize },
    #[error("unknown scheduler {0:?}; expected one of daa, daemon-only, round-robin, greedy, two-choices, cloud-only")]
    UnknownPolicy(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SchedulingDecision {
    Assign(CloudletId),
    AssignCloud,
    Delay(Millis),
}

/// Answer to a tentative assignment probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub cloudlet: CloudletId,
    pub start: Millis,
    /// Wall-clock time at which the cloudlet would finish the task.
    pub expected_completion: Millis,
    pub has_idle_vm: bool,
}

/// The earlier expected completion wins; ties go to the lower cloudlet id.
pub fn less_loaded(a: ProbeResult, b: ProbeResult) -> ProbeResult {
    match a.expected_completion.total_cmp(&b.expected_completion) {
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Equal if a.cloudlet <= b.cloudlet => a,
        std::cmp::Ordering::Equal => b,
    }
}

pub trait Scheduler {
    fn policy(&self) -> Policy;

    fn decide(&mut self, task: &Task, view: &ClusterView<'_>) -> Result<SchedulingDecision, ScheduleError>;
}

/// Draws two distinct non-daemon cloudlets uniformly without replacement.
pub fn sample_two<R: Rng + ?Sized>(
    edge: &EdgeCloud,
    daemon: CloudletId,
    rng: &mut R,
) -> Result<(CloudletId, CloudletId), ScheduleError> {
    let others = edge.len().saturating_sub(1);
    if others < 2 {
        return Err(ScheduleError::TooFewCloudlets {
            daemon,
            available: others,
        });
    }
    let a = rng.random_range(0..others);
    let mut b = rng.random_range(0..others - 1);
    if b >= a {
        b += 1;
    }
    // skip over the daemon's slot
    let lift = |k: usize| {
        if k < daemon.index() {
            CloudletId(k as u32)
        } else {
            CloudletId(k as u32 + 1)
        }
    };
    Ok((lift(a), lift(b)))
}

/// Up to two probe targets: a sampled pair, or the single other cloudlet
/// when the edge-cloud has exactly two, or none.
pub fn sample_candidates<R: Rng + ?Sized>(edge: &EdgeCloud, daemon: CloudletId, rng: &mut R) -> Vec<CloudletId> {
    match edge.len() {
        0 | 1 => Vec::new(),
        2 => edge.ids().filter(|&c| c != daemon).collect(),
        _ => {
            let (a, b) = sample_two(edge, daemon, rng).expect("at least two candidates");
            vec![a, b]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    Daa,
    DaemonOnly,
    RoundRobin,
    Greedy,
    TwoChoices,
    CloudOnly,
}

impl Policy {
    pub const ALL: [Policy; 6] = [
        Policy::Daa,
        Policy::DaemonOnly,
        Policy::RoundRobin,
        Policy::Greedy,
        Policy::TwoChoices,
        Policy::CloudOnly,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Policy::Daa => "daa",
            Policy::DaemonOnly => "daemon-only",
            Policy::RoundRobin => "round-robin",
            Policy::Greedy => "greedy",
            Policy::TwoChoices => "two-choices",
            Policy::CloudOnly => "cloud-only",
        }
    }

    /// Instantiates the policy. `delay_quantum` is only used by DAA.
    pub fn build(self, edge: &EdgeCloud, seed: u64, delay_quantum: Millis) -> Box<dyn Scheduler + Send> {
        let rng = ChaCha8Rng::seed_from_u64(seed);
        match self {
            Policy::Daa => Box::new(Daa::new(rng, delay_quantum)),
            Policy::DaemonOnly => Box::new(DaemonOnly),
            Policy::RoundRobin => Box::new(RoundRobin::new(edge.len())),
            Policy::Greedy => Box::new(Greedy),
            Policy::TwoChoices => Box::new(TwoChoices::new(rng)),
            Policy::CloudOnly => Box::new(CloudOnly),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Policy {
    type Err = ScheduleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Policy::ALL
            .into_iter()
            .find(|p| p.token() == s)
            .ok_or_else(|| ScheduleError::UnknownPolicy(s.to_string()))
    }
}
