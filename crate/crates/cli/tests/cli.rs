use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SMALL: &str = r#"
k = 2.5132741228718345
ell = 2.0

[geometry]
shapes = [{ kind = "rectangle", x = [-1.0, 1.0], y = [0.0, 1.0] }]

[discretization]
nx = 80
ny = 10
order = 2
dtn_terms = 8
"#;

fn cloak(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cloak"));
    cmd.args(args).env_remove("CLOAK_OUTPUT_DIR");
    if let Some(p) = env_out {
        cmd.env("CLOAK_OUTPUT_DIR", p);
    }
    cmd.output().expect("spawn cloak")
}

fn write_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, format!("{SMALL}\n{extra}")).unwrap();
    path.display().to_string()
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout json")
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("stderr json")
}

#[test]
fn modes_at_k4_has_two_propagating() {
    let v = stdout_json(&cloak(&["modes", "--k", "4"], None));
    assert_eq!(v["N"], 2);
    assert_eq!(v["modes"].as_array().unwrap().len(), 4);
    assert_eq!(v["modes"][2]["propagating"], false);
}

#[test]
fn modes_at_cutoff_is_a_config_error() {
    let o = cloak(&["modes", "--k", "3.141592653589793"], None);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "cutoff");
}

#[test]
fn oracle_conserves_flux() {
    let v = stdout_json(&cloak(&["oracle", "--k", "2.5132741228718345", "--rho", "0.1"], None));
    let n = |z: &Value| z[0].as_f64().unwrap().powi(2) + z[1].as_f64().unwrap().powi(2);
    assert!((n(&v["r"]) + n(&v["t"]) - 1.0).abs() < 1e-12);
}

#[test]
fn scatter_writes_matrix_and_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[material]\nconstant = 0.1\n");
    let out = dir.path().join("out");
    let v = stdout_json(&cloak(&["scatter", "-c", &cfg, "-o", out.to_str().unwrap()], None));
    assert_eq!(v["N"], 1);
    assert!(v["unitarity"].as_f64().unwrap() < 1e-10);
    let csv = std::fs::read_to_string(out.join("s.csv")).unwrap();
    assert!(csv.starts_with("block,m,n,re,im"));
    assert_eq!(csv.lines().count(), 5);
    let vtk = std::fs::read_to_string(out.join("u_plus_0.vtk")).unwrap();
    assert!(vtk.starts_with("# vtk DataFile Version 3.0"));
    assert!(out.join("u_minus_0.csv").exists());
}

#[test]
fn output_directory_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let env_dir = dir.path().join("from_env");
    stdout_json(&cloak(&["scatter", "-c", &cfg], Some(&env_dir)));
    assert!(env_dir.join("s.csv").exists());
    let flag_dir = dir.path().join("from_flag");
    stdout_json(&cloak(&["scatter", "-c", &cfg, "-o", flag_dir.to_str().unwrap()], Some(&env_dir)));
    assert!(flag_dir.join("s.csv").exists());
}

#[test]
fn differential_matches_finite_differences() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[material]\nconstant = 0.2\n");
    let out = dir.path().join("out");
    let v = stdout_json(&cloak(&["differential", "-c", &cfg, "-o", out.to_str().unwrap()], None));
    assert!(v["max_relative_error"].as_f64().unwrap() < 1e-4);
    assert!(out.join("ds_fd.csv").exists());
}

#[test]
fn cloak_run_is_deterministic_and_self_verifying() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[continuation]\nfunctional = \"reflection_only\"\naleph = 1\n");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let va = stdout_json(&cloak(&["cloak", "-c", &cfg, "-o", a.to_str().unwrap()], None));
    stdout_json(&cloak(&["cloak", "-c", &cfg, "-o", b.to_str().unwrap()], None));
    assert_eq!(va["accepted_steps"], 1);
    assert!(va["final_residual"].as_f64().unwrap() < 1e-6);
    for f in ["run.json", "rho_step_1.csv", "s_step_1.csv", "rho_step_1.vtk"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let log: Value = serde_json::from_slice(&std::fs::read(a.join("run.json")).unwrap()).unwrap();
    let step = &log["report"]["steps"][0];
    for key in ["n", "epsilon", "iterations", "tau_norm", "f_residual", "gram_condition"] {
        assert!(!step[key].is_null(), "{key}");
    }
}

#[test]
fn partitioned_run_exports_cell_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
[continuation]
functional = "reflection_only"
aleph = 1

[[partition]]
id = 1
shape = { kind = "rectangle", x = [-1.0, -0.3], y = [0.0, 1.0] }

[[partition]]
id = 2
shape = { kind = "rectangle", x = [-0.3, 0.4], y = [0.0, 1.0] }

[[partition]]
id = 3
shape = { kind = "rectangle", x = [0.4, 1.0], y = [0.0, 1.0] }
"#,
    );
    let out = dir.path().join("out");
    stdout_json(&cloak(&["cloak", "-c", &cfg, "-o", out.to_str().unwrap()], None));
    let cells = std::fs::read_to_string(out.join("cells_step_1.csv")).unwrap();
    assert_eq!(cells.lines().next(), Some("cell,value"));
    assert_eq!(cells.lines().count(), 4);
}

#[test]
fn infeasible_partition_reports_singular_gram() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
[continuation]
functional = "full_invisibility"

[[partition]]
id = 1
shape = { kind = "rectangle", x = [-1.0, 0.0], y = [0.0, 1.0] }

[[partition]]
id = 2
shape = { kind = "rectangle", x = [0.0, 1.0], y = [0.0, 1.0] }
"#,
    );
    let o = cloak(&["cloak", "-c", &cfg, "-o", dir.path().join("out").to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(3));
    let e = stderr_json(&o);
    assert_eq!(e["error"], "singular_gram");
    assert!(e["message"].as_str().unwrap().contains("infeasible"));
}

#[test]
fn exhausted_iterations_exit_with_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[continuation]\nfunctional = \"reflection_only\"\nmax_iter = 1\neta = 1e-14\n");
    let o = cloak(&["cloak", "-c", &cfg, "-o", dir.path().join("out").to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stderr_json(&o)["error"], "divergence");
    assert!(dir.path().join("out").join("run.json").exists());
}

#[test]
fn malformed_config_exits_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "k = \"fast\"\n").unwrap();
    let o = cloak(&["scatter", "-c", path.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "invalid_config");
    let missing = cloak(&["verify", "-c", dir.path().join("none.toml").to_str().unwrap()], None);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn verify_reports_structure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[material]\nconstant = 0.3\n");
    let v = stdout_json(&cloak(&["verify", "-c", &cfg, "-o", dir.path().join("out").to_str().unwrap()], None));
    assert!(v["structure"]["symmetry"].as_f64().unwrap() < 1e-10);
    assert!(v["structure"]["energy_derivative"].as_f64().unwrap() < 1e-6);
    assert!(v["ontoness"]["predicate"]["onto"].as_bool().unwrap());
}
