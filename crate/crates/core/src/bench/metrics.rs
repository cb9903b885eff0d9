//! Competition metrics: per-instance score, #win and average score.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bench::records::SCHEMA_VERSION;
use crate::bench::{BenchError, RunRecord};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceScore {
    pub value: f64,
    /// Amount added to numerator and denominator because `best + 1 <= 0`.
    pub shift: i64,
}

/// `(best + 1) / (sol + 1)`, or 0 when no solution was reported.
///
/// When `best + 1 <= 0` both sides are shifted by `-best`, so the best
/// solver still scores exactly 1 and worse ones fall in (0, 1).
pub fn compute_instance_score(best: i64, sol: Option<i64>) -> Result<InstanceScore, BenchError> {
    let shift = if best.saturating_add(1) <= 0 { best.checked_neg().ok_or_else(|| {
        BenchError::DataIntegrity("objective too small to shift".into())
    })? } else { 0 };
    let Some(sol) = sol else {
        return Ok(InstanceScore { value: 0.0, shift });
    };
    if sol < best {
        return Err(BenchError::DataIntegrity(format!(
            "solution {sol} is better than the recorded best {best}"
        )));
    }
    let num = best as i128 + 1 + shift as i128;
    let den = sol as i128 + 1 + shift as i128;
    Ok(InstanceScore {
        value: num as f64 / den as f64,
        shift,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMetrics {
    pub schema: u32,
    pub solver_id: String,
    pub win_count: usize,
    pub avg_score: f64,
    pub per_instance_scores: BTreeMap<String, f64>,
    /// Best objective over all compared solvers; instances nobody solved
    /// are absent.
    pub best_per_instance: BTreeMap<String, i64>,
    /// Non-zero score shifts applied for negative objectives.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub score_shifts: BTreeMap<String, i64>,
}

/// Aggregates one record per (solver, instance) into per-solver metrics,
/// sorted by solver id. Ties for the best objective count as a win for
/// every tied solver.
pub fn compute_dataset_metrics(records: &[RunRecord]) -> Result<Vec<DatasetMetrics>, BenchError> {
    let mut table: BTreeMap<&str, BTreeMap<&str, &RunRecord>> = BTreeMap::new();
    let mut instances: BTreeSet<&str> = BTreeSet::new();
    for r in records {
        r.validate()?;
        instances.insert(&r.instance_id);
        let per = table.entry(&r.solver_id).or_default();
        if per.insert(&r.instance_id, r).is_some() {
            return Err(BenchError::DuplicateRecord {
                solver: r.solver_id.clone(),
                instance: r.instance_id.clone(),
            });
        }
    }
    for (solver, per) in &table {
        if let Some(missing) = instances.iter().find(|i| !per.contains_key(*i)) {
            return Err(BenchError::MissingRecord {
                solver: solver.to_string(),
                instance: missing.to_string(),
            });
        }
    }

    let best: BTreeMap<&str, i64> = instances
        .iter()
        .filter_map(|&i| {
            table
                .values()
                .filter_map(|per| per[i].solution())
                .min()
                .map(|b| (i, b))
        })
        .collect();

    let mut out = Vec::with_capacity(table.len());
    for (solver, per) in &table {
        let mut scores = BTreeMap::new();
        let mut shifts = BTreeMap::new();
        let mut wins = 0;
        for &i in &instances {
            let sol = per[i].solution();
            let score = match best.get(i) {
                Some(&b) => {
                    let s = compute_instance_score(b, sol)?;
                    if s.shift != 0 {
                        shifts.insert(i.to_string(), s.shift);
                    }
                    if sol == Some(b) {
                        wins += 1;
                    }
                    s.value
                }
                None => 0.0,
            };
            scores.insert(i.to_string(), score);
        }
        let avg = if scores.is_empty() {
            0.0
        } else {
            scores.values().sum::<f64>() / scores.len() as f64
        };
        out.push(DatasetMetrics {
            schema: SCHEMA_VERSION,
            solver_id: solver.to_string(),
            win_count: wins,
            avg_score: avg,
            per_instance_scores: scores,
            best_per_instance: best.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            score_shifts: shifts,
        });
    }
    Ok(out)
}

/// Writes one row per solver: `solver_id,win_count,avg_score,instances`.
pub fn write_metrics_csv<W: Write>(out: W, metrics: &[DatasetMetrics]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["solver_id", "win_count", "avg_score", "instances"])?;
    for m in metrics {
        w.write_record([
            m.solver_id.clone(),
            m.win_count.to_string(),
            format!("{:.4}", m.avg_score),
            m.per_instance_scores.len().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
