use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::bench::BenchError;

pub const SCHEMA_VERSION: u32 = 1;

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Feasible,
    Infeasible,
    Error,
}

/// Outcome of one solver run on one instance with one seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    #[serde(default = "schema_version")]
    pub schema: u32,
    pub instance_id: String,
    pub solver_id: String,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obj: Option<i64>,
    pub elapsed_ms: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl RunRecord {
    pub fn feasible(instance: &str, solver: &str, obj: i64, seed: u64, elapsed_ms: u64) -> RunRecord {
        RunRecord {
            schema: SCHEMA_VERSION,
            instance_id: instance.to_string(),
            solver_id: solver.to_string(),
            status: RunStatus::Feasible,
            obj: Some(obj),
            elapsed_ms,
            seed,
            note: None,
        }
    }

    pub fn infeasible(instance: &str, solver: &str, seed: u64, elapsed_ms: u64) -> RunRecord {
        RunRecord {
            status: RunStatus::Infeasible,
            obj: None,
            ..RunRecord::feasible(instance, solver, 0, seed, elapsed_ms)
        }
    }

    pub fn error(instance: &str, solver: &str, seed: u64, elapsed_ms: u64, note: impl Into<String>) -> RunRecord {
        RunRecord {
            status: RunStatus::Error,
            obj: None,
            note: Some(note.into()),
            ..RunRecord::feasible(instance, solver, 0, seed, elapsed_ms)
        }
    }

    /// Objective of a feasible run.
    pub fn solution(&self) -> Option<i64> {
        match self.status {
            RunStatus::Feasible => self.obj,
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.schema != SCHEMA_VERSION {
            return Err(BenchError::DataIntegrity(format!(
                "unsupported record schema {}",
                self.schema
            )));
        }
        if (self.status == RunStatus::Feasible) != self.obj.is_some() {
            return Err(BenchError::DataIntegrity(format!(
                "record {}/{}: obj must be present exactly when status is feasible",
                self.solver_id, self.instance_id
            )));
        }
        Ok(())
    }
}

pub fn write_jsonl<W: Write>(mut out: W, records: &[RunRecord]) -> Result<(), BenchError> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<RunRecord>, BenchError> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: RunRecord = serde_json::from_str(&line)?;
        r.validate()?;
        out.push(r);
    }
    Ok(out)
}

/// Keeps, per (solver, instance), the best record over all seeds:
/// lowest objective among feasible runs, else the first record seen.
pub fn best_over_seeds(records: &[RunRecord]) -> Vec<RunRecord> {
    let mut best: std::collections::BTreeMap<(&str, &str), &RunRecord> = Default::default();
    for r in records {
        let key = (r.solver_id.as_str(), r.instance_id.as_str());
        match best.get(&key) {
            Some(cur) => {
                let better = match (r.solution(), cur.solution()) {
                    (Some(a), Some(b)) => a < b,
                    (Some(_), None) => true,
                    _ => false,
                };
                if better {
                    best.insert(key, r);
                }
            }
            None => {
                best.insert(key, r);
            }
        }
    }
    best.into_values().cloned().collect()
}
