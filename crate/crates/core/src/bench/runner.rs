//! Runs a solver executable over instances as isolated child processes.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Deserialize;

use crate::bench::{BenchError, RunRecord};

/// A solver executable and the id its records carry.
#[derive(Debug, Clone)]
pub struct SolverCommand {
    pub program: PathBuf,
    /// Passed after the contract flags, e.g. `--slot` overrides.
    pub extra_args: Vec<String>,
    pub solver_id: String,
}

impl SolverCommand {
    pub fn new(program: impl Into<PathBuf>, solver_id: impl Into<String>) -> SolverCommand {
        SolverCommand {
            program: program.into(),
            extra_args: Vec::new(),
            solver_id: solver_id.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BatchConfig {
    pub cutoff_ms: u64,
    pub seeds: Vec<u64>,
    pub parallelism: usize,
    /// Runs are killed at `cutoff * (1 + grace)`.
    pub grace: f64,
}

impl BatchConfig {
    pub fn new(cutoff_ms: u64, seeds: Vec<u64>, parallelism: usize) -> BatchConfig {
        BatchConfig {
            cutoff_ms,
            seeds,
            parallelism,
            grace: 0.1,
        }
    }

    fn kill_after(&self) -> Duration {
        Duration::from_millis(self.cutoff_ms) + Duration::from_millis(self.cutoff_ms).mul_f64(self.grace)
    }
}

/// Output document of a solver run.
#[derive(Debug, Deserialize)]
struct SolverReport {
    status: String,
    obj: Option<i64>,
    elapsed_ms: Option<u64>,
}

fn resolve_program(program: &Path) -> Option<PathBuf> {
    if program.components().count() > 1 {
        return program.is_file().then(|| program.to_path_buf());
    }
    std::env::var_os("PATH").and_then(|paths| {
        std::env::split_paths(&paths)
            .map(|dir| dir.join(program))
            .find(|p| p.is_file())
    })
}

pub fn instance_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Interprets the solver's standard output.
fn parse_report(stdout: &str) -> Result<SolverReport, String> {
    let line = stdout
        .lines()
        .rev()
        .find(|l| !l.trim().is_empty())
        .ok_or("solver printed nothing")?;
    serde_json::from_str(line).map_err(|e| format!("unparsable solver output: {e}"))
}

fn run_one(solver: &SolverCommand, program: &Path, instance: &Path, seed: u64, config: &BatchConfig) -> RunRecord {
    let id = instance_id(instance);
    let sid = solver.solver_id.as_str();
    let started = Instant::now();
    let spawned = Command::new(program)
        .arg("--instance")
        .arg(instance)
        .args(["--cutoff-ms", &config.cutoff_ms.to_string()])
        .args(["--seed", &seed.to_string()])
        .args(["--output", "json"])
        .args(&solver.extra_args)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn();
    let mut child = match spawned {
        Ok(c) => c,
        Err(e) => return RunRecord::error(&id, sid, seed, 0, format!("spawn failed: {e}")),
    };
    let mut stdout = child.stdout.take().expect("stdout is piped");
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let deadline = config.kill_after();
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break Some(status),
            Ok(None) if started.elapsed() >= deadline => {
                let _ = child.kill();
                let _ = child.wait();
                break None;
            }
            Ok(None) => std::thread::sleep(Duration::from_millis(2)),
            Err(_) => break None,
        }
    };
    let output = reader.join().unwrap_or_default();
    let wall_ms = started.elapsed().as_millis() as u64;
    let Some(status) = status else {
        let mut r = RunRecord::infeasible(&id, sid, seed, wall_ms);
        r.note = Some("killed at cutoff".into());
        return r;
    };
    if !status.success() {
        return RunRecord::error(&id, sid, seed, wall_ms, format!("solver exited with {status}"));
    }
    match parse_report(&output) {
        Ok(rep) => {
            let ms = rep.elapsed_ms.unwrap_or(wall_ms);
            match (rep.status.as_str(), rep.obj) {
                ("feasible", Some(obj)) => RunRecord::feasible(&id, sid, obj, seed, ms),
                ("infeasible", None) => RunRecord::infeasible(&id, sid, seed, ms),
                (s, _) => RunRecord::error(&id, sid, seed, ms, format!("inconsistent report status '{s}'")),
            }
        }
        Err(e) => RunRecord::error(&id, sid, seed, wall_ms, e),
    }
}

/// Runs every (instance, seed) pair with at most `parallelism` concurrent
/// child processes. A failing run only affects its own record. Records
/// come back in instance-major, seed-minor order.
pub fn run_batch(
    solver: &SolverCommand,
    instances: &[PathBuf],
    config: &BatchConfig,
) -> Result<Vec<RunRecord>, BenchError> {
    let program = resolve_program(&solver.program)
        .ok_or_else(|| BenchError::SolverMissing(solver.program.display().to_string()))?;
    let jobs: Vec<(&PathBuf, u64)> = instances
        .iter()
        .flat_map(|i| config.seeds.iter().map(move |&s| (i, s)))
        .collect();
    let results: Mutex<Vec<Option<RunRecord>>> = Mutex::new(vec![None; jobs.len()]);
    let next = AtomicUsize::new(0);
    let workers = config.parallelism.max(1).min(jobs.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(inst, seed)) = jobs.get(i) else { break };
                let rec = run_one(solver, &program, inst, seed, config);
                results.lock().unwrap()[i] = Some(rec);
            });
        }
    });
    Ok(results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect())
}
