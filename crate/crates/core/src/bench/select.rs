//! Greedy choice between candidate solver versions and the incumbent.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bench::{BenchError, RunRecord};

/// Id of the verdict that stands for keeping the current version.
pub const INCUMBENT_ID: &str = "incumbent";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersionVerdict {
    pub candidate_id: String,
    pub feasible_count: usize,
    /// Grid cells where this version beats the incumbent's objective, or
    /// is feasible where the incumbent is not.
    pub win_count_vs_baseline: usize,
    pub selected: bool,
}

type Grid<'a> = BTreeMap<(&'a str, u64), &'a RunRecord>;

fn grid<'a>(id: &str, records: &'a [RunRecord]) -> Result<Grid<'a>, BenchError> {
    let mut g = Grid::new();
    for r in records {
        r.validate()?;
        if g.insert((r.instance_id.as_str(), r.seed), r).is_some() {
            return Err(BenchError::GridMismatch(format!(
                "{id}: duplicate run for {} seed {}",
                r.instance_id, r.seed
            )));
        }
    }
    Ok(g)
}

/// Compares each candidate against the incumbent on the same
/// (instance, seed) grid and selects one version: most feasible runs
/// first, then most wins over the incumbent. The incumbent keeps its
/// place unless a candidate is strictly better; among equal candidates
/// the earliest wins.
///
/// The returned list starts with the incumbent's verdict (id
/// [`INCUMBENT_ID`]), followed by the candidates in input order. Exactly
/// one verdict is selected.
pub fn select_best_version(
    candidates: &[(String, Vec<RunRecord>)],
    baseline: &[RunRecord],
) -> Result<Vec<VersionVerdict>, BenchError> {
    let base = grid(INCUMBENT_ID, baseline)?;
    let mut verdicts = vec![VersionVerdict {
        candidate_id: INCUMBENT_ID.to_string(),
        feasible_count: base.values().filter(|r| r.solution().is_some()).count(),
        win_count_vs_baseline: 0,
        selected: false,
    }];
    for (id, records) in candidates {
        let g = grid(id, records)?;
        if !g.keys().eq(base.keys()) {
            return Err(BenchError::GridMismatch(format!(
                "{id}: runs do not match the incumbent's instance/seed grid"
            )));
        }
        let mut feasible = 0;
        let mut wins = 0;
        for (key, r) in &g {
            let Some(obj) = r.solution() else { continue };
            feasible += 1;
            match base[key].solution() {
                Some(b) if obj < b => wins += 1,
                None => wins += 1,
                _ => {}
            }
        }
        verdicts.push(VersionVerdict {
            candidate_id: id.clone(),
            feasible_count: feasible,
            win_count_vs_baseline: wins,
            selected: false,
        });
    }
    let key = |v: &VersionVerdict| (v.feasible_count, v.win_count_vs_baseline);
    let mut winner = 0;
    for (i, v) in verdicts.iter().enumerate().skip(1) {
        if key(v) > key(&verdicts[winner]) {
            winner = i;
        }
    }
    verdicts[winner].selected = true;
    Ok(verdicts)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `feas` feasible runs out of `n`, the first `wins` of them strictly
    /// better than the incumbent's objective 10.
    fn records(n: usize, feas: usize, wins: usize) -> Vec<RunRecord> {
        (0..n)
            .map(|i| {
                let inst = format!("i{i}");
                if i < feas {
                    let obj = if i < wins { 5 } else { 10 };
                    RunRecord::feasible(&inst, "c", obj, 0, 0)
                } else {
                    RunRecord::infeasible(&inst, "c", 0, 0)
                }
            })
            .collect()
    }

    fn selected(v: &[VersionVerdict]) -> &str {
        let s: Vec<_> = v.iter().filter(|v| v.selected).collect();
        assert_eq!(s.len(), 1);
        &s[0].candidate_id
    }

    #[test]
    fn feasibility_dominates() {
        let base = records(12, 8, 0);
        let v = select_best_version(
            &[("A".into(), records(12, 10, 4)), ("B".into(), records(12, 9, 6))],
            &base,
        )
        .unwrap();
        assert_eq!(v[1].feasible_count, 10);
        assert_eq!(v[1].win_count_vs_baseline, 4 + 2);
        assert_eq!(selected(&v), "A");
    }

    #[test]
    fn wins_break_feasibility_ties() {
        let base = records(12, 10, 0);
        let v = select_best_version(
            &[("A".into(), records(12, 10, 4)), ("B".into(), records(12, 10, 6))],
            &base,
        )
        .unwrap();
        assert_eq!(selected(&v), "B");
    }

    #[test]
    fn full_tie_keeps_incumbent() {
        let base = records(5, 3, 0);
        let v = select_best_version(&[("A".into(), records(5, 3, 0))], &base).unwrap();
        assert_eq!(selected(&v), INCUMBENT_ID);
        let v = select_best_version(&[], &base).unwrap();
        assert_eq!(selected(&v), INCUMBENT_ID);
    }

    #[test]
    fn grid_mismatch_is_error() {
        let base = records(3, 3, 0);
        assert!(matches!(
            select_best_version(&[("A".into(), records(2, 2, 0))], &base),
            Err(BenchError::GridMismatch(_))
        ));
    }
}
