//! Command-line front end.
//!
//! ```text
//! pbls --instance <path> --cutoff-ms <n> --seed <n> --output json
//! ```
//!
//! JSON output is a single line `{"status", "obj"?, "steps", "elapsed_ms", ...}`.
//! Exit status is 0 whenever the search ran (with or without a solution),
//! 2 for unreadable input or bad flags, 1 if a heuristic slot misbehaved.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::heuristics::baseline_suite;
use crate::opb::parse_file;
use crate::search::{run_search_with, HeuristicSuite, SearchLimits, SearchOptions, SearchStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Json,
    Human,
}

#[derive(Debug, Parser)]
#[command(name = "pbls", version, about = "Local search solver for pseudo-Boolean optimization (OPB input)")]
pub struct SolverConfig {
    /// OPB instance file.
    #[arg(long)]
    pub instance: PathBuf,
    /// Wall-clock budget in milliseconds.
    #[arg(long, default_value_t = 300_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub cutoff_ms: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Replace a heuristic slot, e.g. `update_weights=noop.update_weights.v0`.
    #[arg(long = "slot", value_name = "SLOT=IMPL")]
    pub slots: Vec<String>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub hard_increment: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub obj_increment: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub obj_weight_cap: Option<u64>,
    /// Probability of smoothing weights instead of increasing them.
    #[arg(long)]
    pub sp: Option<f64>,
    /// Sample size for escape moves.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub bms: Option<u64>,
    /// Step budget in addition to the cutoff.
    #[arg(long)]
    pub max_steps: Option<u64>,
    #[arg(long, value_enum, default_value_t = OutputMode::Human)]
    pub output: OutputMode,
    /// Include the best assignment in the output.
    #[arg(long)]
    pub print_model: bool,
    /// Score every variable each step instead of only those in violated
    /// constraints.
    #[arg(long)]
    pub full_scan: bool,
}

#[derive(Debug, thiserror::Error)]
enum ConfigError {
    #[error("--slot expects SLOT=IMPL, got '{0}'")]
    SlotSyntax(String),
    #[error(transparent)]
    Slot(#[from] crate::heuristics::SlotError),
    #[error("--sp must be within [0, 1], got {0}")]
    Probability(f64),
}

impl SolverConfig {
    /// Builds the heuristic suite described by the flags.
    pub fn suite(&self) -> Result<HeuristicSuite, String> {
        self.build_suite().map_err(|e| e.to_string())
    }

    fn build_suite(&self) -> Result<HeuristicSuite, ConfigError> {
        let mut suite = baseline_suite();
        for entry in &self.slots {
            let (slot, imp) = entry
                .split_once('=')
                .ok_or_else(|| ConfigError::SlotSyntax(entry.clone()))?;
            suite.set_slot(slot.trim(), imp.trim())?;
        }
        let w = &mut suite.params.weights;
        if let Some(v) = self.hard_increment {
            w.hard_increment = v;
        }
        if let Some(v) = self.obj_increment {
            w.obj_increment = v;
        }
        if self.obj_weight_cap.is_some() {
            w.obj_weight_cap = self.obj_weight_cap;
        }
        if let Some(p) = self.sp {
            if !(0.0..=1.0).contains(&p) {
                return Err(ConfigError::Probability(p));
            }
            w.smoothing_probability = p;
        }
        if let Some(b) = self.bms {
            suite.params.bms = b as usize;
        }
        Ok(suite)
    }
}

#[derive(Debug, Serialize)]
struct JsonReport<'a> {
    status: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    obj: Option<i64>,
    steps: u64,
    elapsed_ms: u64,
    seed: u64,
    slots: BTreeMap<&'static str, &'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    assignment: Option<String>,
}

fn bits(values: &[bool]) -> String {
    values.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Runs the solver with `args` (including the program name) and returns
/// the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match SolverConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(err, "pbls: {}", first.trim_start_matches("error: "));
            return 2;
        }
    };
    let suite = match config.suite() {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "pbls: {e}");
            return 2;
        }
    };
    let (instance, _report) = match parse_file(&config.instance) {
        Ok(x) => x,
        Err(e) => {
            let _ = writeln!(err, "pbls: {}: {e}", config.instance.display());
            return 2;
        }
    };
    let mut limits = SearchLimits::cutoff_ms(config.cutoff_ms);
    limits.max_steps = config.max_steps;
    let options = SearchOptions {
        full_scan: config.full_scan,
    };
    let outcome = match run_search_with(&instance, &suite, limits, config.seed, options) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "pbls: engine fault: {e}");
            return 1;
        }
    };
    let feasible = outcome.status == SearchStatus::SolutionFound;
    match config.output {
        OutputMode::Json => {
            let report = JsonReport {
                status: if feasible { "feasible" } else { "infeasible" },
                obj: outcome.best_obj,
                steps: outcome.steps_executed,
                elapsed_ms: outcome.elapsed_ms,
                seed: config.seed,
                slots: suite.slot_ids().into_iter().collect(),
                assignment: if config.print_model {
                    outcome.best_assignment.as_deref().map(bits)
                } else {
                    None
                },
            };
            let line = serde_json::to_string(&report).expect("report serializes");
            let _ = writeln!(out, "{line}");
        }
        OutputMode::Human => {
            let _ = writeln!(out, "c instance {} ({} vars, {} constraints)", instance.name(), instance.num_vars(), instance.constraints().len());
            let _ = writeln!(out, "c steps {} elapsed_ms {}", outcome.steps_executed, outcome.elapsed_ms);
            match outcome.best_obj {
                Some(obj) => {
                    let _ = writeln!(out, "o {obj}");
                    let proven = obj == instance.objective().lower_bound();
                    let _ = writeln!(out, "s {}", if proven { "OPTIMUM FOUND" } else { "SATISFIABLE" });
                    if config.print_model {
                        if let Some(values) = &outcome.best_assignment {
                            let lits: Vec<String> = values
                                .iter()
                                .enumerate()
                                .map(|(i, &b)| format!("{}x{}", if b { "" } else { "-" }, i + 1))
                                .collect();
                            let _ = writeln!(out, "v {}", lits.join(" "));
                        }
                    }
                }
                None => {
                    let _ = writeln!(out, "s UNKNOWN");
                }
            }
        }
    }
    0
}
