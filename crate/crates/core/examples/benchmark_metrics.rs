//! Competition metrics from run records: per-instance score
//! `(best + 1) / (sol + 1)`, average score and number of wins.

use pbls::bench::{compute_dataset_metrics, compute_instance_score, read_jsonl, write_jsonl, write_metrics_csv, RunRecord};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let records = vec![
        RunRecord::feasible("knap-1", "solver-a", 9, 1, 810),
        RunRecord::feasible("knap-1", "solver-b", 19, 1, 1_200),
        RunRecord::feasible("cover-7", "solver-a", 4, 1, 95),
        RunRecord::feasible("cover-7", "solver-b", 4, 1, 130),
        // negative objectives are shifted before scoring
        RunRecord::feasible("sched-3", "solver-a", -12, 1, 3_000),
        RunRecord::feasible("sched-3", "solver-b", -20, 1, 2_400),
        RunRecord::feasible("mis-2", "solver-a", 30, 1, 60_000),
        RunRecord::infeasible("mis-2", "solver-b", 1, 60_000),
    ];

    // records travel between tools as JSON lines
    let mut jsonl = Vec::new();
    write_jsonl(&mut jsonl, &records)?;
    print!("{}", String::from_utf8_lossy(&jsonl[..jsonl.iter().position(|&b| b == b'\n').unwrap() + 1]));
    let records = read_jsonl(jsonl.as_slice())?;

    let s = compute_instance_score(9, Some(19))?;
    println!("score(best 9, sol 19) = {}", s.value);

    let metrics = compute_dataset_metrics(&records)?;
    for m in &metrics {
        println!("{}: #win {} avg_score {:.4}", m.solver_id, m.win_count, m.avg_score);
        for (inst, score) in &m.per_instance_scores {
            println!("    {inst:<8} {score:.4}");
        }
    }
    write_metrics_csv(std::io::stdout(), &metrics)?;
    Ok(())
}
