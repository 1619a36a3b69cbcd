use std::{fs, path::Path, process::Command};

fn qoinfo(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qoinfo")).args(args).output().unwrap()
}

fn lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(str::to_string).collect()
}

#[test]
fn table1_writes_every_row_and_exits_2_on_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t1.csv");
    let run = qoinfo(&["table1", "--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    let rows = lines(&out);
    assert_eq!(rows[0], "state,n,omega_q,paper_value,abs_dev");
    assert_eq!(rows.len(), 22);
    assert!(String::from_utf8_lossy(&run.stderr).contains("HS"));
}

#[test]
fn fig1a_row_count_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f1a.csv");
    let run = qoinfo(&["fig1a", "--out", out.to_str().unwrap()]);
    assert!(run.status.success());
    let rows = lines(&out);
    assert_eq!(rows[0], "experiment,n,sample,omega_q");
    assert_eq!(rows.len(), 65_536);
}

#[test]
fn fig1b_rows_cover_every_size() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f1b.csv");
    let run = qoinfo(&["fig1b", "--samples", "50", "--diagnostics", "--out", out.to_str().unwrap()]);
    assert!(run.status.success());
    let rows = lines(&out);
    assert!(rows[0].starts_with("experiment,n,sample,omega_q"), "{}", rows[0]);
    assert!(rows[0].contains("traced_spread"));
    assert_eq!(rows.len(), 1 + 4 * 50);
}

#[test]
fn fig2_rows_and_worker_independence() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, workers) in [(&a, "1"), (&b, "4")] {
        let run = qoinfo(&["fig2", "--steps", "21", "--workers", workers, "--out", path.to_str().unwrap()]);
        assert!(run.status.success());
    }
    let rows = lines(&a);
    assert_eq!(rows[0], "experiment,hamiltonian_order,state,seed,step,t,omega_q");
    assert_eq!(rows.len(), 1 + 16 * 21);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn fig2_json_output_parses() {
    let run = qoinfo(&["fig2", "--steps", "3", "--format", "json"]);
    assert!(run.status.success());
    let value: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert!(value.to_string().contains("omega_q"));
}

#[test]
fn qinfo_reports_ghz_value() {
    let run = qoinfo(&["qinfo", "--state", "GHZ", "--n", "6"]);
    assert!(run.status.success());
    let line = String::from_utf8(run.stdout).unwrap();
    let omega: f64 = line.trim().split(',').nth(3).unwrap().parse().unwrap();
    assert!((omega - 3.0).abs() < 1e-12);
}

#[test]
fn qinfo_ghz_phase_and_unknown_state() {
    let run = qoinfo(&["qinfo", "--state", "GHZ_PHASE", "--alpha", "-0.7"]);
    assert!(run.status.success());
    let omega: f64 = String::from_utf8(run.stdout).unwrap().trim().split(',').nth(3).unwrap().parse().unwrap();
    assert!((omega - 1.0).abs() < 1e-12);
    assert_eq!(qoinfo(&["qinfo", "--state", "NOPE"]).status.code(), Some(1));
}

#[test]
fn mmes_search_output_round_trips_through_qinfo() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mmes5.csv");
    let run = qoinfo(&["mmes-search", "--n", "5", "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let run = qoinfo(&["qinfo", "--amplitudes", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let omega: f64 = String::from_utf8(run.stdout).unwrap().trim().split(',').nth(3).unwrap().parse().unwrap();
    assert!((omega + 2.0).abs() < 1e-2);
}

#[test]
fn mmes_search_budget_exhaustion_exits_3() {
    let run = qoinfo(&["mmes-search", "--n", "6", "--max-iters", "5"]);
    assert_eq!(run.status.code(), Some(3));
}

#[test]
fn malformed_registry_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "name,n_qubits,basis_index,re,im,source,expected_omega\nX,2,7,1,0,test,\n").unwrap();
    let run = qoinfo(&["qinfo", "--amplitudes", bad.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(1));
    assert!(!run.stderr.is_empty());
}
