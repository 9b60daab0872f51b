//! Comma-separated trace files.
//!
//! ```text
//! task_id,arrival_ms,daemon_id,benchmark,class,base_service_ms,mobile_ms,cloud_ms,data_bytes,bound_ms
//! 0,812.5,3,face,sensitive,3000,18000,2400,2000000,
//! ```
//!
//! `bound_ms` is empty for latency-sensitive tasks. Numbers are written in
//! shortest round-trip form, so loading a saved trace is exact.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::domain::{CloudletId, Task, TaskClass, TaskId};

pub const TRACE_HEADER: [&str; 10] = [
    "task_id",
    "arrival_ms",
    "daemon_id",
    "benchmark",
    "class",
    "base_service_ms",
    "mobile_ms",
    "cloud_ms",
    "data_bytes",
    "bound_ms",
];

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace i/o: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("line {line}: field {field}: {message}")]
    Field {
        line: u64,
        field: &'static str,
        message: String,
    },
    #[error("line {line}: duplicate task id {id}")]
    DuplicateId { line: u64, id: TaskId },
    #[error("line {line}: arrival {arrival} precedes the previous row")]
    Unsorted { line: u64, arrival: f64 },
}

pub fn write_trace<W: Write>(trace: &[Task], writer: W) -> Result<(), TraceError> {
    let mut w = csv::Writer::from_writer(writer);
    let csv_err = |e: csv::Error| TraceError::Io(io::Error::other(e));
    w.write_record(TRACE_HEADER).map_err(csv_err)?;
    for t in trace {
        w.write_record([
            t.id.to_string(),
            t.arrival_time.to_string(),
            t.daemon_id.to_string(),
            t.benchmark.clone(),
            t.class.token().to_string(),
            t.base_service_time.to_string(),
            t.mobile_exec_time.to_string(),
            t.cloud_exec_time.to_string(),
            t.data_volume.to_string(),
            t.latency_bound.map(|b| b.to_string()).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_trace(trace: &[Task], path: impl AsRef<Path>) -> Result<(), TraceError> {
    write_trace(trace, io::BufWriter::new(File::create(path)?))
}

pub fn load_trace(path: impl AsRef<Path>) -> Result<Vec<Task>, TraceError> {
    read_trace(File::open(path)?)
}

fn number(line: u64, field: &'static str, raw: &str) -> Result<f64, TraceError> {
    let v: f64 = raw.trim().parse().map_err(|_| TraceError::Field {
        line,
        field,
        message: format!("not a number: {raw:?}"),
    })?;
    if !v.is_finite() {
        return Err(TraceError::Field {
            line,
            field,
            message: "must be finite".into(),
        });
    }
    Ok(v)
}

fn positive(line: u64, field: &'static str, raw: &str) -> Result<f64, TraceError> {
    let v = number(line, field, raw)?;
    if v <= 0.0 {
        return Err(TraceError::Field {
            line,
            field,
            message: format!("must be > 0, got {v}"),
        });
    }
    Ok(v)
}

fn non_negative(line: u64, field: &'static str, raw: &str) -> Result<f64, TraceError> {
    let v = number(line, field, raw)?;
    if v < 0.0 {
        return Err(TraceError::Field {
            line,
            field,
            message: format!("must be >= 0, got {v}"),
        });
    }
    Ok(v)
}

fn integer(line: u64, field: &'static str, raw: &str) -> Result<u32, TraceError> {
    raw.trim().parse().map_err(|_| TraceError::Field {
        line,
        field,
        message: format!("not a non-negative integer: {raw:?}"),
    })
}

pub fn read_trace<R: Read>(reader: R) -> Result<Vec<Task>, TraceError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut rows = r.records();
    match rows.next() {
        None => {
            return Err(TraceError::Malformed {
                line: 1,
                message: "missing header".into(),
            })
        }
        Some(header) => {
            let header = header.map_err(|e| TraceError::Malformed {
                line: 1,
                message: e.to_string(),
            })?;
            if header.iter().ne(TRACE_HEADER.iter().copied()) {
                return Err(TraceError::Malformed {
                    line: 1,
                    message: format!("expected header {}", TRACE_HEADER.join(",")),
                });
            }
        }
    }

    let mut out: Vec<Task> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for row in rows {
        let row = row.map_err(|e| TraceError::Malformed {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.len() != TRACE_HEADER.len() {
            return Err(TraceError::Malformed {
                line,
                message: format!("expected {} columns, found {}", TRACE_HEADER.len(), row.len()),
            });
        }
        let id = TaskId(integer(line, "task_id", &row[0])?);
        let class = TaskClass::from_token(row[4].trim()).ok_or_else(|| TraceError::Field {
            line,
            field: "class",
            message: format!("expected sensitive or tolerant, got {:?}", &row[4]),
        })?;
        let latency_bound = match (class, row[9].trim()) {
            (TaskClass::LatencySensitive, "") => None,
            (TaskClass::LatencySensitive, _) => {
                return Err(TraceError::Field {
                    line,
                    field: "bound_ms",
                    message: "must be empty for sensitive tasks".into(),
                })
            }
            (TaskClass::LatencyTolerant, raw) => Some(positive(line, "bound_ms", raw)?),
        };
        let task = Task {
            id,
            arrival_time: non_negative(line, "arrival_ms", &row[1])?,
            daemon_id: CloudletId(integer(line, "daemon_id", &row[2])?),
            benchmark: row[3].to_string(),
            class,
            base_service_time: positive(line, "base_service_ms", &row[5])?,
            mobile_exec_time: positive(line, "mobile_ms", &row[6])?,
            cloud_exec_time: positive(line, "cloud_ms", &row[7])?,
            data_volume: non_negative(line, "data_bytes", &row[8])?,
            latency_bound,
        };
        if !seen.insert(id) {
            return Err(TraceError::DuplicateId { line, id });
        }
        if let Some(prev) = out.last() {
            if task.arrival_time < prev.arrival_time {
                return Err(TraceError::Unsorted {
                    line,
                    arrival: task.arrival_time,
                });
            }
        }
        out.push(task);
    }
    Ok(out)
}
