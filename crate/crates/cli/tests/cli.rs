use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/data")
        .join(name)
}

fn qls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qls-sat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const REPORT_KEYS: [&str; 12] = [
    "goal",
    "status",
    "makespan",
    "depth",
    "cx_depth",
    "swap_count",
    "cx_count",
    "initial_mapping",
    "time_total_s",
    "time_solve_s",
    "lower_bound",
    "swaps_minimal",
];

fn assert_schema(report: &Value) {
    let obj = report.as_object().unwrap();
    assert_eq!(obj.len(), REPORT_KEYS.len());
    for k in REPORT_KEYS {
        assert!(obj.contains_key(k), "missing {k}");
    }
}

#[test]
fn triangle_circuit_on_line4() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.qasm");
    let rep = dir.path().join("report.json");
    let tri = data("triangle4.qasm");
    let o = qls(&[
        "map",
        s(&tri),
        "--platform",
        "line-4",
        "--goal",
        "cx-depth",
        "--minimize-swaps",
        "-o",
        s(&out),
        "--report",
        s(&rep),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&rep);
    assert_schema(&r);
    assert_eq!(r["status"], "ok");
    assert_eq!(r["cx_depth"], 6);
    assert_eq!(r["swap_count"], 1);
    assert_eq!(r["swaps_minimal"], true);

    let c = qls(&["check", s(&tri), s(&out), "--platform", "line-4", "--report", s(&rep)]);
    assert_eq!(c.status.code(), Some(0));
    let verdict: Value = serde_json::from_slice(&c.stdout).unwrap();
    assert_eq!(verdict["status"], "pass");
}

#[test]
fn legal_circuit_needs_no_swaps() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.qasm");
    fs::write(
        &input,
        "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\nh q[0];\ncx q[0],q[1];\ncx q[1],q[2];\nt q[2];\ncx q[0],q[1];\n",
    )
    .unwrap();
    let rep = dir.path().join("r.json");
    let o = qls(&["map", s(&input), "--platform", "line-3", "--report", s(&rep)]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&rep);
    assert_eq!(r["depth"], 4);
    assert_eq!(r["swap_count"], 0);
    let qasm = String::from_utf8(o.stdout).unwrap();
    assert!(qasm.contains("OPENQASM 2.0;"));
}

#[test]
fn timeout_writes_partial_report() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("r.json");
    let tof5 = data("benchmarks/tof_5.qasm");
    let o = qls(&[
        "map",
        s(&tof5),
        "--platform",
        "guadalupe",
        "--timeout",
        "1",
        "--report",
        s(&rep),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let r = json(&rep);
    assert_schema(&r);
    assert_eq!(r["status"], "timeout");
    assert!(r["lower_bound"].as_u64().unwrap() >= 61, "{r}");
    assert!(r["depth"].is_null());
}

#[test]
fn invalid_inputs_exit_one() {
    let tri = data("triangle4.qasm");
    let missing = qls(&["map", "no/such/file.qasm", "--platform", "line-4"]);
    assert_eq!(missing.status.code(), Some(1));
    let too_small = qls(&["map", s(&tri), "--platform", "line-3"]);
    assert_eq!(too_small.status.code(), Some(1));
    let both = qls(&["map", s(&tri), "--platform", "line-4", "--coupling", "x.txt"]);
    assert_eq!(both.status.code(), Some(1));
    let zero = qls(&["map", s(&tri), "--platform", "line-4", "--timeout", "0"]);
    assert_eq!(zero.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.qasm");
    fs::write(&bad, "OPENQASM 2.0;\nqreg q[2];\nccx q[0],q[1];\n").unwrap();
    assert_eq!(qls(&["map", s(&bad), "--platform", "line-4"]).status.code(), Some(1));
}

#[test]
fn coupling_file_and_swap_gates() {
    let dir = tempfile::tempdir().unwrap();
    let cmap = dir.path().join("line4.txt");
    fs::write(&cmap, "n 4\n0 1\n1 2\n2 3\n").unwrap();
    let out = dir.path().join("out.qasm");
    let tri = data("triangle4.qasm");
    let o = qls(&[
        "map",
        s(&tri),
        "--coupling",
        s(&cmap),
        "--goal",
        "cx-depth",
        "--swap-style",
        "swap-gate",
        "-o",
        s(&out),
        "--report",
        s(&dir.path().join("r.json")),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(&out).unwrap().contains("swap q["));
    let c = qls(&["check", s(&tri), s(&out), "--coupling", s(&cmap)]);
    assert_eq!(c.status.code(), Some(0), "{}", String::from_utf8_lossy(&c.stdout));
}

#[test]
fn check_rejects_broken_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.qasm");
    fs::write(&input, "OPENQASM 2.0;\nqreg q[3];\ncx q[0],q[1];\ncx q[1],q[2];\n").unwrap();
    let output = dir.path().join("out.qasm");
    fs::write(&output, "OPENQASM 2.0;\nqreg q[3];\ncx q[0],q[2];\ncx q[1],q[2];\n").unwrap();
    let c = qls(&[
        "check",
        s(&input),
        s(&output),
        "--platform",
        "line-3",
        "--initial-mapping",
        "0,1,2",
    ]);
    assert_eq!(c.status.code(), Some(3));
    let verdict: Value = serde_json::from_slice(&c.stdout).unwrap();
    assert_eq!(verdict["status"], "fail");
    assert_eq!(verdict["diagnostics"][0]["kind"], "connectivity");
    let unmapped = qls(&["check", s(&input), s(&output), "--platform", "line-3"]);
    assert_eq!(unmapped.status.code(), Some(1));
}

#[test]
fn oracle_subcommand() {
    let o = qls(&[
        "oracle",
        s(&data("triangle4.qasm")),
        "--platform",
        "line-4",
        "--goal",
        "cx-depth",
        "--min-swaps",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["makespan"], 6);
    assert_eq!(v["min_swaps"], 1);
    let capped = qls(&[
        "oracle",
        s(&data("triangle4.qasm")),
        "--platform",
        "line-4",
        "--max-depth",
        "3",
    ]);
    assert_eq!(capped.status.code(), Some(2));
}

#[test]
fn batch_mode_with_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let inputs: Vec<PathBuf> = ["toffoli", "or", "4gt13_92"]
        .iter()
        .map(|n| data(&format!("benchmarks/{n}.qasm")))
        .collect();
    let outdir = dir.path().join("out");
    let cnfdir = dir.path().join("cnf");
    let mut args = vec!["map", "--platform", "tenerife", "--goal", "cx-depth", "--jobs", "2"];
    args.extend(["--out-dir", s(&outdir), "--dump-cnf", s(&cnfdir)]);
    args.extend(inputs.iter().map(|p| s(p)));
    let o = qls(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for n in ["toffoli", "or", "4gt13_92"] {
        let r = json(&outdir.join(format!("{n}.json")));
        assert_schema(&r);
        assert_eq!(r["status"], "ok");
        assert!(outdir.join(format!("{n}.mapped.qasm")).exists());
        assert!(fs::read_to_string(cnfdir.join(format!("{n}.cnf")))
            .unwrap()
            .starts_with("p cnf"));
        let c = qls(&[
            "check",
            s(&data(&format!("benchmarks/{n}.qasm"))),
            s(&outdir.join(format!("{n}.mapped.qasm"))),
            "--platform",
            "tenerife",
        ]);
        assert_eq!(c.status.code(), Some(0), "{n}");
    }
    let no_dir = qls(&["map", s(&inputs[0]), s(&inputs[1]), "--platform", "tenerife"]);
    assert_eq!(no_dir.status.code(), Some(1));
}
