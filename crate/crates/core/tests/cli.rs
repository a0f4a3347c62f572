//! End-to-end runs of the `tetraglue` binary through its public
//! subcommands, checking the on-disk artifacts.

use std::path::Path;
use std::process::Command;

use tetraglue::model::GluingInstance;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tetraglue"))
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().expect("spawn tetraglue");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn sample_writes_parseable_text() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.txt");
    run_ok(bin().args([
        "sample",
        "--n",
        "12",
        "--seed",
        "42",
        "--out",
        out.to_str().unwrap(),
    ]));
    let text = read(&out);
    let inst = GluingInstance::from_text(&text).unwrap();
    assert_eq!(inst.n(), 12);
    assert_eq!(inst.to_text(), text, "round trip must be bit-exact");
    // Same seed, same file.
    let out2 = dir.path().join("g2.txt");
    run_ok(bin().args([
        "sample",
        "--n",
        "12",
        "--seed",
        "42",
        "--out",
        out2.to_str().unwrap(),
    ]));
    assert_eq!(read(&out2), text);
}

#[test]
fn sample_simple_has_simple_dual() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.txt");
    run_ok(bin().args([
        "sample", "--n", "9", "--seed", "7", "--simple", "--out",
        out.to_str().unwrap(),
    ]));
    let inst = GluingInstance::from_text(&read(&out)).unwrap();
    assert!(tetraglue::dual_graph::build_dual(&inst).is_simple());
}

#[test]
fn enumerate_n1_writes_27_instances() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("all.txt");
    run_ok(bin().args(["enumerate", "--n", "1", "--out", out.to_str().unwrap()]));
    let text = read(&out);
    // Each instance is 1 header line + 2n gluing lines = 3 lines at n = 1.
    assert_eq!(text.lines().count(), 27 * 3);
    let mut lines = text.lines().peekable();
    let mut count = 0;
    while lines.peek().is_some() {
        let chunk: Vec<&str> = (0..3).map(|_| lines.next().unwrap()).collect();
        let inst = GluingInstance::from_text(&(chunk.join("\n") + "\n")).unwrap();
        assert_eq!(inst.n(), 1);
        count += 1;
    }
    assert_eq!(count, 27);
}

#[test]
fn enumerate_rejects_large_n() {
    let out = bin()
        .args(["enumerate", "--n", "3", "--out", "/dev/null"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn peel_algorithm1_trace_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    run_ok(bin().args([
        "peel",
        "--algorithm",
        "1",
        "--n",
        "20",
        "--trials",
        "3",
        "--seed",
        "5",
        "--trace-out",
        out.to_str().unwrap(),
    ]));
    let text = read(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("trial,t,E_t,F_sing_t,f_regular"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3 * 40, "trials x 2n rows");
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 5);
        assert!(cols[4] == "0" || cols[4] == "1");
    }
}

#[test]
fn peel_algorithm2_closure_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("kl.csv");
    run_ok(bin().args([
        "peel",
        "--algorithm",
        "2",
        "--n",
        "15",
        "--trials",
        "4",
        "--trace-out",
        out.to_str().unwrap(),
    ]));
    let text = read(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("trial,k,l"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn sweep_then_theory_report() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.jsonl");
    let aggregates = dir.path().join("agg.csv");
    let config_path = dir.path().join("config.json");
    let config = serde_json::json!({
        "n_list": [10, 30, 100],
        "trials": 40,
        "master_seed": 9,
        "conditioning": "uniform",
        "panels": ["edges", "boundary", "dual", "homology", "peeling"],
        "out_records": records,
        "out_aggregates": aggregates,
    });
    std::fs::write(&config_path, serde_json::to_vec(&config).unwrap()).unwrap();
    let stdout = run_ok(bin().args(["sweep", "--config", config_path.to_str().unwrap()]));
    assert!(stdout.contains("n = 100"), "stdout: {stdout}");

    let jsonl = read(&records);
    assert_eq!(jsonl.lines().count(), 3 * 40);
    let first: serde_json::Value = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
    for key in [
        "n",
        "V",
        "E",
        "genus_list",
        "edge_histogram",
        "E_KL",
        "b1_rel",
        "b1_abs",
        "b1_double",
        "heegaard_lower",
        "heegaard_upper",
        "homology_skipped",
        "dual_simple",
        "dual_connected",
    ] {
        assert!(first.get(key).is_some(), "record missing {key}");
    }

    let csv = read(&aggregates);
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("n,trials,mean_E,var_E"));
    assert!(header.ends_with("mean_Ek_simple_10"));
    assert_eq!(csv.lines().count(), 1 + 3);

    // The span 10..100 covers a decade, so the report must materialize.
    let report_path = dir.path().join("report.txt");
    run_ok(bin().args([
        "theory-report",
        "--in",
        dir.path().to_str().unwrap(),
        "--out",
        report_path.to_str().unwrap(),
    ]));
    let report = read(&report_path);
    assert!(report.contains("theory comparison"));
    assert!(report.contains("mean E grows like (1/2) ln n"));
    for verdict in report.lines().filter(|l| l.starts_with('[')) {
        assert!(
            verdict.starts_with("[PASS]")
                || verdict.starts_with("[FAIL]")
                || verdict.starts_with("[SKIP]"),
            "unexpected line: {verdict}"
        );
    }
}

#[test]
fn homology_subcommand_prints_table() {
    let stdout = run_ok(bin().args(["homology", "--n", "6", "--trials", "3", "--seed", "2"]));
    let mut lines = stdout.lines();
    assert_eq!(
        lines.next(),
        Some("trial,E,b1_rel,b1_abs,b1_double,torsion,heegaard_lower,heegaard_upper")
    );
    assert_eq!(lines.count(), 3);
}
