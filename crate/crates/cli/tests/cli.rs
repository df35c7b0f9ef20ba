use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ailfem_cli::mesh_dump::MeshDump;
use ailfem_cli::records::read_records;

fn ailfem(args: &[&str], env_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ailfem"));
    cmd.args(args).env_remove("AILFEM_OUTPUT_DIR");
    if let Some(d) = env_dir {
        cmd.env("AILFEM_OUTPUT_DIR", d);
    }
    cmd.output().unwrap()
}

fn small_run(dir: &Path, problem: &str, extra: &[&str]) -> Output {
    let d = dir.to_str().unwrap();
    let mut args = vec!["run", "--problem", problem, "--budget", "3e4", "--threads", "1", "--out-dir", d];
    args.extend_from_slice(extra);
    ailfem(&args, None)
}

#[test]
fn run_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = small_run(dir.path(), "sine_gordon", &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("sine_gordon_practical_m1.csv");
    let records = read_records(fs::File::open(&csv).unwrap()).unwrap();
    assert!(!records.is_empty());
    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("sine_gordon_practical_m1.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], "work_budget");
    assert_eq!(summary["threads"], 1);
    assert_eq!(summary["refinement"], "bisec3");
    assert_eq!(summary["final"]["work"], records.last().unwrap().work);
}

#[test]
fn identical_config_gives_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        assert!(small_run(d.path(), "singular_perturbation", &["--m", "2"]).status.success());
    }
    let name = "singular_perturbation_practical_m2.csv";
    let x = fs::read(a.path().join(name)).unwrap();
    assert!(!x.is_empty());
    assert_eq!(x, fs::read(b.path().join(name)).unwrap());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    fs::write(&cfg, "# comment\nproblem = goal\ndriver = gailfem\nbudget = 1e4\ncsv = from_file.csv\n").unwrap();
    let d = dir.path().to_str().unwrap();
    let out = ailfem(
        &["run", "--config", cfg.to_str().unwrap(), "--csv", "from_flag.csv", "--out-dir", d],
        None,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("from_flag.csv").exists());
    assert!(!dir.path().join("from_file.csv").exists());
    let text = fs::read_to_string(dir.path().join("from_flag.csv")).unwrap();
    assert!(text.lines().next().unwrap().ends_with("zeta,product_estimator,goal_value,goal_error"));
}

#[test]
fn output_dir_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = ailfem(&["run", "--problem", "sine_gordon", "--budget", "1e3"], Some(dir.path()));
    assert!(out.status.success());
    assert!(dir.path().join("sine_gordon_practical_m1.csv").exists());
}

#[test]
fn missing_problem_exits_with_2() {
    let out = ailfem(&["run", "--budget", "1e3"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("usage"));
}

#[test]
fn bad_values_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    for extra in [["--theta", "1.5"], ["--m", "9"], ["--driver", "idealized"], ["--stopping", "ib3"]] {
        let out = small_run(dir.path(), "sine_gordon", &extra);
        assert_eq!(out.status.code(), Some(2), "{extra:?}");
    }
    let missing = ailfem(&["run", "--config", "/nonexistent/x.cfg"], None);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn list_problems_names_every_builtin() {
    let out = ailfem(&["list-problems"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["sine_gordon", "singular_perturbation", "goal"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn mesh_dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mesh.json");
    let out = ailfem(&["mesh", "--problem", "goal", "--refine", "2", "--out", path.to_str().unwrap()], None);
    assert!(out.status.success());
    let dump: MeshDump = serde_json::from_slice(&fs::read(&path).unwrap()).unwrap();
    let mesh = dump.to_mesh().unwrap();
    assert!(mesh.is_conforming());
    assert_eq!(MeshDump::from_mesh(&mesh).vertices, dump.vertices);
    assert!((mesh.total_area() - 1.0).abs() < 1e-12);
    assert_eq!(ailfem(&["mesh", "--domain", "disk"], None).status.code(), Some(2));
}
