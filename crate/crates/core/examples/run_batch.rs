//! Run the `pbls` executable over the bundled instances with several
//! seeds in parallel, then summarize the records.
//!
//! cargo build --bin pbls && cargo run --example run_batch -- [path/to/pbls]

use std::path::PathBuf;

use pbls::bench::{best_over_seeds, compute_dataset_metrics, run_batch, BatchConfig, SolverCommand};

/// `target/<profile>/pbls`, next to the `examples/` directory this binary
/// was built into.
fn sibling_solver() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let p = exe.parent()?.parent()?.join(format!("pbls{}", std::env::consts::EXE_SUFFIX));
    p.is_file().then_some(p)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let Some(program) = std::env::args().nth(1).map(PathBuf::from).or_else(sibling_solver) else {
        eprintln!("pbls binary not found; run `cargo build --bin pbls` first or pass its path");
        std::process::exit(2);
    };
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let mut instances: Vec<PathBuf> = std::fs::read_dir(&data)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "opb"))
        .collect();
    instances.sort();

    let config = BatchConfig::new(500, vec![1, 2, 3], 4);
    let mut records = Vec::new();
    for (id, extra) in [("baseline", vec![]), ("sp-0.01", vec!["--sp", "0.01"])] {
        let mut solver = SolverCommand::new(&program, id);
        solver.extra_args = extra.into_iter().map(String::from).collect();
        let recs = run_batch(&solver, &instances, &config)?;
        for r in &recs {
            println!("{:<9} {:<8} seed {} {:?} {:?}", r.solver_id, r.instance_id, r.seed, r.status, r.obj);
        }
        records.extend(best_over_seeds(&recs));
    }
    for m in compute_dataset_metrics(&records)? {
        println!("{}: #win {} avg_score {:.4}", m.solver_id, m.win_count, m.avg_score);
    }
    Ok(())
}
