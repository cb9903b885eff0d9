//! Parse an OPB file and run the baseline solver on it.
//!
//! cargo run --example solve_opb -- [path.opb] [cutoff_ms] [seed]

use std::path::PathBuf;

use pbls::opb::parse_file;
use pbls::{baseline_suite, run_search, SearchStatus};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/cover.opb"));
    let cutoff_ms = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1_000);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let (instance, report) = parse_file(&path)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{}: {} variables, {} constraints after normalization",
        instance.name(),
        instance.num_vars(),
        instance.constraints().len()
    );

    let outcome = run_search(&instance, &baseline_suite(), cutoff_ms, seed)?;
    match outcome.status {
        SearchStatus::SolutionFound => {
            let values = outcome.best_assignment.unwrap();
            let chosen: Vec<String> = instance
                .vars()
                .filter(|v| values[v.index()])
                .map(|v| format!("x{}", v.number()))
                .collect();
            println!("best objective {} after {} steps", outcome.best_obj.unwrap(), outcome.steps_executed);
            println!("true: {}", chosen.join(" "));
        }
        SearchStatus::NoSolution => println!("no feasible assignment within {cutoff_ms} ms"),
    }
    Ok(())
}
