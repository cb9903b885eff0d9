mod common;

use std::path::PathBuf;

use common::*;
use pbls::bench::{
    compute_dataset_metrics, read_jsonl, run_batch, select_best_version, write_jsonl, BatchConfig, RunStatus,
    SolverCommand, INCUMBENT_ID,
};
use pbls::opb::serialize_instance;

const BIN: &str = env!("CARGO_BIN_EXE_pbls");

fn write_instances(dir: &std::path::Path) -> Vec<PathBuf> {
    let mut r = rng(11);
    (0..3)
        .map(|i| {
            let f = random_instance(&mut r, &format!("b{i}"), 12, 10, true);
            let p = dir.join(format!("b{i}.opb"));
            std::fs::write(&p, serialize_instance(&f)).unwrap();
            p
        })
        .collect()
}

fn capped(program: &str, id: &str) -> SolverCommand {
    let mut s = SolverCommand::new(program, id);
    s.extra_args = vec!["--max-steps".into(), "3000".into()];
    s
}

#[test]
fn batch_of_real_solver_runs() {
    let dir = tempfile::tempdir().unwrap();
    let instances = write_instances(dir.path());
    let config = BatchConfig::new(10_000, vec![1, 2], 3);
    let recs = run_batch(&capped(BIN, "pbls"), &instances, &config).unwrap();
    assert_eq!(recs.len(), 6);
    let order: Vec<_> = recs.iter().map(|r| (r.instance_id.as_str(), r.seed)).collect();
    assert_eq!(order, [("b0", 1), ("b0", 2), ("b1", 1), ("b1", 2), ("b2", 1), ("b2", 2)]);
    for r in &recs {
        r.validate().unwrap();
        assert_eq!(r.status, RunStatus::Feasible, "{r:?}");
    }
    let again = run_batch(&capped(BIN, "pbls"), &instances, &config).unwrap();
    let objs = |v: &[pbls::bench::RunRecord]| v.iter().map(|r| r.obj).collect::<Vec<_>>();
    assert_eq!(objs(&recs), objs(&again));

    let mut buf = Vec::new();
    write_jsonl(&mut buf, &recs).unwrap();
    assert_eq!(read_jsonl(buf.as_slice()).unwrap(), recs);
}

#[cfg(unix)]
#[test]
fn crashing_solver_yields_error_records() {
    use std::os::unix::fs::PermissionsExt;
    let dir = tempfile::tempdir().unwrap();
    let instances = write_instances(dir.path());
    let script = dir.path().join("crash.sh");
    std::fs::write(&script, "#!/bin/sh\necho boom >&2\nexit 3\n").unwrap();
    std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755)).unwrap();
    let recs = run_batch(
        &SolverCommand::new(&script, "crash"),
        &instances,
        &BatchConfig::new(1_000, vec![1], 2),
    )
    .unwrap();
    assert_eq!(recs.len(), 3);
    assert!(recs.iter().all(|r| r.status == RunStatus::Error && r.obj.is_none()));
}

#[cfg(unix)]
#[test]
fn hung_solver_is_killed_as_infeasible() {
    use std::os::unix::fs::PermissionsExt;
    let dir = tempfile::tempdir().unwrap();
    let instances = write_instances(dir.path());
    let script = dir.path().join("hang.sh");
    std::fs::write(&script, "#!/bin/sh\nexec sleep 30\n").unwrap();
    std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755)).unwrap();
    let started = std::time::Instant::now();
    let recs = run_batch(
        &SolverCommand::new(&script, "hang"),
        &instances[..1],
        &BatchConfig::new(200, vec![1], 1),
    )
    .unwrap();
    assert!(started.elapsed().as_secs() < 10);
    assert_eq!(recs[0].status, RunStatus::Infeasible);
    assert_eq!(recs[0].note.as_deref(), Some("killed at cutoff"));
}

#[test]
fn batch_records_feed_metrics_and_selection() {
    let dir = tempfile::tempdir().unwrap();
    let instances = write_instances(dir.path());
    let config = BatchConfig::new(10_000, vec![1], 2);
    let base = run_batch(&capped(BIN, INCUMBENT_ID), &instances, &config).unwrap();
    let mut greedy = capped(BIN, "greedy");
    greedy.extra_args.extend(["--slot".into(), "update_weights=noop.update_weights.v0".into()]);
    let cand = run_batch(&greedy, &instances, &config).unwrap();

    let mut all = base.clone();
    all.extend(cand.iter().cloned());
    let metrics = compute_dataset_metrics(&all).unwrap();
    assert_eq!(metrics.len(), 2);
    assert!(metrics.iter().all(|m| m.avg_score > 0.0 && m.avg_score <= 1.0));

    let verdicts = select_best_version(&[("greedy".into(), cand)], &base).unwrap();
    assert_eq!(verdicts[0].candidate_id, INCUMBENT_ID);
    assert_eq!(verdicts[0].feasible_count, 3);
    assert_eq!(verdicts.iter().filter(|v| v.selected).count(), 1);
}
