//! Distributed, application-aware task scheduling for edge-clouds.
//!
//! The crate is organised bottom-up:
//!
//! - [`domain`]: tasks, cloudlets and the closed-form completion-time model.
//! - [`engine`]: the deterministic discrete-event simulator.
//! - [`schedulers`]: DAA plus the baseline policies.
//! - [`workload`]: benchmark catalog, Poisson traces and trace files.
//! - [`metrics`]: weighted turnaround, makespan and speedup.
//! - [`config`] and [`experiment`]: configuration, seeded runs and sweeps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod domain;
pub mod engine;
pub mod experiment;
pub mod metrics;
pub mod schedulers;
pub mod workload;

pub use config::{ConfigError, EdgeCloudConfig};
pub use domain::{Allocation, Cloudlet, CloudletId, EdgeCloud, Millis, NetworkParams, Task, TaskClass, TaskId};
pub use engine::{simulate, EngineOptions, SimError, SimOutput, TaskRecord};
pub use metrics::RunSummary;
pub use schedulers::{Policy, Scheduler, SchedulingDecision};
