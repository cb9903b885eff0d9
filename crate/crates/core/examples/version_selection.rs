//! Pick between the incumbent solver and candidate versions: most
//! feasible runs first, then most runs beating the incumbent.

use pbls::bench::{select_best_version, RunRecord, INCUMBENT_ID};

fn grid(solver: &str, objs: &[Option<i64>]) -> Vec<RunRecord> {
    objs.iter()
        .enumerate()
        .map(|(i, o)| {
            let inst = format!("inst-{}", i / 2);
            let seed = (i % 2) as u64 + 1;
            match o {
                Some(v) => RunRecord::feasible(&inst, solver, *v, seed, 1_000),
                None => RunRecord::infeasible(&inst, solver, seed, 60_000),
            }
        })
        .collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let incumbent = grid(INCUMBENT_ID, &[Some(10), Some(12), None, None, Some(7), Some(7)]);
    let candidates = vec![
        // better objectives but loses a feasible run
        ("v1-tighter".to_string(), grid("v1", &[Some(8), Some(9), None, None, None, Some(6)])),
        // same feasibility, two wins
        ("v2-escape".to_string(), grid("v2", &[Some(9), Some(12), None, None, Some(6), Some(7)])),
        // one more feasible run, no wins elsewhere
        ("v3-init".to_string(), grid("v3", &[Some(10), Some(12), Some(40), None, Some(7), Some(7)])),
    ];
    for v in select_best_version(&candidates, &incumbent)? {
        println!(
            "{:<11} feasible {} wins {} {}",
            v.candidate_id,
            v.feasible_count,
            v.win_count_vs_baseline,
            if v.selected { "<= selected" } else { "" }
        );
    }
    Ok(())
}
