//! C ABI for the petrel simulator.
//!
//! Every fallible function returns a [`PetrelStatus`]. On failure a message
//! is stored per thread and can be read with [`petrel_last_error_message`].
//! Objects are opaque handles returned through out-pointers by the
//! constructors and released with the matching `*_free` function.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use petrel::experiment::{build_edge_cloud, build_trace, run_simulation, write_records};
use petrel::metrics::{summarize, RunSummary};
use petrel::workload::{load_trace, save_trace};
use petrel::{Allocation, EdgeCloudConfig, Policy, SimOutput, Task, TaskClass, TaskRecord};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PetrelStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ConfigError = 3,
    TraceError = 4,
    SimulationError = 5,
    IoError = 6,
    OutOfRange = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PetrelTaskClass {
    Sensitive = 0,
    Tolerant = 1,
}

/// Aggregate metrics for one run.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PetrelSummary {
    pub task_count: u64,
    pub awt: f64,
    pub makespan_min_ms: f64,
    pub makespan_max_ms: f64,
    pub makespan_avg_ms: f64,
    pub avg_speedup: f64,
    pub bound_violations: u64,
    pub delayed_tasks: u64,
}

/// One task outcome. `executor` is -1 for cloud execution and
/// `bound_violated` is -1 for latency-sensitive tasks.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PetrelRecord {
    pub task_id: u32,
    pub task_class: PetrelTaskClass,
    pub daemon_id: u32,
    pub executor: i32,
    pub arrival_ms: f64,
    pub assign_ms: f64,
    pub start_ms: f64,
    pub completion_ms: f64,
    pub turnaround_ms: f64,
    pub service_ms: f64,
    pub comm_ms: f64,
    pub speedup: f64,
    pub delays: u32,
    pub bound_violated: i8,
}

pub struct PetrelConfig {
    inner: EdgeCloudConfig,
}

pub struct PetrelTrace {
    tasks: Vec<Task>,
}

pub struct PetrelRun {
    output: SimOutput,
    summary: RunSummary,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(PetrelStatus, String);

fn fail<T>(status: PetrelStatus, msg: impl ToString) -> Result<T, Failure> {
    Err(Failure(status, msg.to_string()))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PetrelStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PetrelStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PetrelStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return fail(PetrelStatus::NullPointer, format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(PetrelStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .map_or_else(|| fail(PetrelStatus::NullPointer, format!("{what} is null")), Ok)
}

fn out_arg<T>(p: *mut *mut T) -> Result<(), Failure> {
    if p.is_null() {
        return fail(PetrelStatus::NullPointer, "output pointer is null");
    }
    Ok(())
}

fn boxed<T>(out: *mut *mut T, value: T) {
    // SAFETY: callers checked `out` with `out_arg`.
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next petrel call on the same thread.
#[no_mangle]
pub extern "C" fn petrel_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static, NUL-terminated crate version.
#[no_mangle]
pub extern "C" fn petrel_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates the default configuration.
#[no_mangle]
pub extern "C" fn petrel_config_default(out: *mut *mut PetrelConfig) -> PetrelStatus {
    guard(|| {
        out_arg(out)?;
        boxed(
            out,
            PetrelConfig {
                inner: EdgeCloudConfig::default(),
            },
        );
        Ok(())
    })
}

/// Parses a configuration from TOML text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn petrel_config_from_toml(text: *const c_char, out: *mut *mut PetrelConfig) -> PetrelStatus {
    guard(|| {
        out_arg(out)?;
        let text = str_arg(text, "text")?;
        let inner = EdgeCloudConfig::from_toml(text).or_else(|e| fail(PetrelStatus::ConfigError, e))?;
        boxed(out, PetrelConfig { inner });
        Ok(())
    })
}

/// Loads a configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn petrel_config_load(path: *const c_char, out: *mut *mut PetrelConfig) -> PetrelStatus {
    guard(|| {
        out_arg(out)?;
        let path = str_arg(path, "path")?;
        let inner = EdgeCloudConfig::load(path).or_else(|e| fail(PetrelStatus::ConfigError, e))?;
        boxed(out, PetrelConfig { inner });
        Ok(())
    })
}

/// Overrides the number of generated tasks.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn petrel_config_set_tasks(config: *mut PetrelConfig, tasks: u64) -> PetrelStatus {
    guard(|| {
        let cfg = config
            .as_mut()
            .map_or_else(|| fail(PetrelStatus::NullPointer, "config is null"), Ok)?;
        if tasks == 0 {
            return fail(PetrelStatus::InvalidArgument, "tasks must be > 0");
        }
        cfg.inner.workload.tasks = tasks as usize;
        Ok(())
    })
}

/// Number of cloudlets in the configured topology.
///
/// # Safety
/// `config` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn petrel_config_cloudlet_count(config: *const PetrelConfig) -> u64 {
    config.as_ref().map_or(0, |c| c.inner.topology.cloudlet_count as u64)
}

/// # Safety
/// `config` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn petrel_config_free(config: *mut PetrelConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Generates a Poisson trace of the configured task count.
///
/// # Safety
/// `config` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn petrel_trace_generate(
    config: *const PetrelConfig,
    lambda: f64,
    seed: u64,
    out: *mut *mut PetrelTrace,
) -> PetrelStatus {
    guard(|| {
        out_arg(out)?;
        let cfg = &ref_arg(config, "config")?.inner;
        if !(lambda > 0.0 && lambda.is_finite()) {
            return fail(
                PetrelStatus::InvalidArgument,
                format!("lambda must be > 0, got {lambda}"),
            );
        }
        let tasks =
            build_trace(cfg, lambda, cfg.workload.tasks, seed).or_else(|e| fail(PetrelStatus::TraceError, e))?;
        boxed(out, PetrelTrace { tasks });
        Ok(())
    })
}

/// Reads a trace file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn petrel_trace_load(path: *const c_char, out: *mut *mut PetrelTrace) -> PetrelStatus {
    guard(|| {
        out_arg(out)?;
        let path = str_arg(path, "path")?;
        let tasks = load_trace(path).or_else(|e| fail(PetrelStatus::TraceError, e))?;
        boxed(out, PetrelTrace { tasks });
        Ok(())
    })
}

/// Writes a trace file.
///
/// # Safety
/// `trace` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn petrel_trace_save(trace: *const PetrelTrace, path: *const c_char) -> PetrelStatus {
    guard(|| {
        let trace = ref_arg(trace, "trace")?;
        let path = str_arg(path, "path")?;
        save_trace(&trace.tasks, path).or_else(|e| fail(PetrelStatus::IoError, e))
    })
}

/// # Safety
/// `trace` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn petrel_trace_len(trace: *const PetrelTrace) -> u64 {
    trace.as_ref().map_or(0, |t| t.tasks.len() as u64)
}

/// # Safety
/// `trace` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn petrel_trace_free(trace: *mut PetrelTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Runs `scheduler` over `trace` on the topology drawn from `seed`. A null
/// `trace` generates one from the configuration.
///
/// # Safety
/// `config` must be a live handle, `trace` a live handle or null,
/// `scheduler` a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn petrel_run(
    config: *const PetrelConfig,
    trace: *const PetrelTrace,
    scheduler: *const c_char,
    lambda: f64,
    seed: u64,
    out: *mut *mut PetrelRun,
) -> PetrelStatus {
    guard(|| {
        out_arg(out)?;
        let cfg = &ref_arg(config, "config")?.inner;
        let policy: Policy = str_arg(scheduler, "scheduler")?
            .parse()
            .or_else(|e| fail(PetrelStatus::InvalidArgument, e))?;
        if !(lambda > 0.0 && lambda.is_finite()) {
            return fail(
                PetrelStatus::InvalidArgument,
                format!("lambda must be > 0, got {lambda}"),
            );
        }
        let generated;
        let tasks: &[Task] = match trace.as_ref() {
            Some(t) => &t.tasks,
            None => {
                generated = build_trace(cfg, lambda, cfg.workload.tasks, seed)
                    .or_else(|e| fail(PetrelStatus::TraceError, e))?;
                &generated
            }
        };
        let edge = build_edge_cloud(cfg, seed);
        let output = run_simulation(cfg, &edge, tasks, policy, lambda, seed)
            .or_else(|e| fail(PetrelStatus::SimulationError, e))?;
        let summary = summarize(&output.records, edge.len()).or_else(|e| fail(PetrelStatus::SimulationError, e))?;
        boxed(out, PetrelRun { output, summary });
        Ok(())
    })
}

/// # Safety
/// `run` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn petrel_run_summary(run: *const PetrelRun, out: *mut PetrelSummary) -> PetrelStatus {
    guard(|| {
        let run = ref_arg(run, "run")?;
        if out.is_null() {
            return fail(PetrelStatus::NullPointer, "output pointer is null");
        }
        let s = &run.summary;
        *out = PetrelSummary {
            task_count: s.task_count as u64,
            awt: s.awt,
            makespan_min_ms: s.makespan_min,
            makespan_max_ms: s.makespan_max,
            makespan_avg_ms: s.makespan_avg,
            avg_speedup: s.avg_speedup,
            bound_violations: s.bound_violations as u64,
            delayed_tasks: s.delayed_tasks as u64,
        };
        Ok(())
    })
}

/// # Safety
/// `run` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn petrel_run_record_count(run: *const PetrelRun) -> u64 {
    run.as_ref().map_or(0, |r| r.output.records.len() as u64)
}

fn record(r: &TaskRecord) -> PetrelRecord {
    PetrelRecord {
        task_id: r.task_id.0,
        task_class: match r.class {
            TaskClass::LatencySensitive => PetrelTaskClass::Sensitive,
            TaskClass::LatencyTolerant => PetrelTaskClass::Tolerant,
        },
        daemon_id: r.daemon_id.0,
        executor: match r.allocation {
            Allocation::Cloudlet(c) => c.0 as i32,
            Allocation::Cloud | Allocation::Mobile => -1,
        },
        arrival_ms: r.arrival_time,
        assign_ms: r.assign_time,
        start_ms: r.start_time,
        completion_ms: r.completion_time,
        turnaround_ms: r.turnaround,
        service_ms: r.service_time,
        comm_ms: r.comm_time,
        speedup: r.speedup(),
        delays: r.delays_taken,
        bound_violated: r.bound_violated.map_or(-1, i8::from),
    }
}

/// Copies record `index`, in task id order.
///
/// # Safety
/// `run` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn petrel_run_record(run: *const PetrelRun, index: u64, out: *mut PetrelRecord) -> PetrelStatus {
    guard(|| {
        let run = ref_arg(run, "run")?;
        if out.is_null() {
            return fail(PetrelStatus::NullPointer, "output pointer is null");
        }
        let n = run.output.records.len();
        let r = usize::try_from(index)
            .ok()
            .and_then(|i| run.output.records.get(i))
            .map_or_else(|| fail(PetrelStatus::OutOfRange, format!("record {index} of {n}")), Ok)?;
        *out = record(r);
        Ok(())
    })
}

/// Writes the per-task CSV.
///
/// # Safety
/// `run` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn petrel_run_write_records(run: *const PetrelRun, path: *const c_char) -> PetrelStatus {
    guard(|| {
        let run = ref_arg(run, "run")?;
        let path = PathBuf::from(str_arg(path, "path")?);
        let file = std::fs::File::create(&path).or_else(|e| fail(PetrelStatus::IoError, e))?;
        write_records(&run.output.records, std::io::BufWriter::new(file)).or_else(|e| fail(PetrelStatus::IoError, e))
    })
}

/// # Safety
/// `run` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn petrel_run_free(run: *mut PetrelRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}
