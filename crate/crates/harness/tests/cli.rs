use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn model(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wordseries")).args(args).output().expect("binary runs")
}

fn run_model(cmd: &str, name: &str, out: &Path, extra: &[&str]) -> Output {
    let m = model(name);
    let mut args = vec![cmd, "--model", m.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn normal_form_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_model("normal-form", "toy.toml", dir.path(), &["--order", "4"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["kappa.json", "beta_hat.json", "resonant_words.txt", "normal_form.json", "summary.json", "summary.txt"] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
    let kappa = json(&dir.path().join("kappa.json"));
    assert_eq!(kappa["mode"], "exact");
    assert_eq!(kappa["order"], 4);
    let table = std::fs::read_to_string(dir.path().join("resonant_words.txt")).unwrap();
    assert!(table.lines().any(|l| l.starts_with("1\t0\t")), "{table}");
}

#[test]
fn zero_perturbation_gives_empty_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_model("normal-form", "toy.toml", dir.path(), &["--beta", "zero"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("beta_hat = 0"));
    let table = std::fs::read_to_string(dir.path().join("resonant_words.txt")).unwrap();
    assert_eq!(table.lines().count(), 2, "{table}");
}

#[test]
fn nonresonant_model_reports_zero_beta_hat() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_model("normal-form", "nonresonant.toml", dir.path(), &["--order", "4"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("beta_hat = 0"));
    let data = json(&dir.path().join("normal_form.json"));
    assert_eq!(data["beta_hat_is_zero"], true);
    assert_eq!(data["mode"], "float");
}

#[test]
fn verify_revalidates_normal_form_output() {
    let nf = tempfile::tempdir().unwrap();
    assert_eq!(code(&run_model("normal-form", "toy.toml", nf.path(), &[])), 0);
    let out = tempfile::tempdir().unwrap();
    let o = run_model("verify", "toy.toml", out.path(), &["--input", nf.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("input-residual"));

    let broken = tempfile::tempdir().unwrap();
    assert_eq!(code(&run_model("normal-form", "toy.toml", broken.path(), &["--mutate", "gauge"])), 2);
    let o = run_model("verify", "toy.toml", out.path(), &["--input", broken.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let summary = json(&out.path().join("summary.json"));
    let suites = summary["data"]["suites"].as_array().unwrap();
    let input = suites.iter().find(|s| s["name"] == "input-residual").unwrap();
    assert_eq!(input["passed"], false);
}

#[test]
fn frequency_mutation_fails_assumption() {
    let dir = tempfile::tempdir().unwrap();
    for seed in ["1", "2"] {
        let o = run_model("verify", "angle2.toml", dir.path(), &["--mutate", "frequency", "--seed", seed]);
        assert_eq!(code(&o), 2);
        let summary = json(&dir.path().join("summary.json"));
        let first = &summary["data"]["suites"][0];
        assert_eq!(first["name"], "assumption");
        assert_eq!(first["passed"], false);
    }
}

#[test]
fn gauge_mutation_fails_residual() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_model("verify", "hamiltonian.toml", dir.path(), &["--mutate", "gauge"]);
    assert_eq!(code(&o), 2);
    let summary = json(&dir.path().join("summary.json"));
    let suites = summary["data"]["suites"].as_array().unwrap();
    let nf = suites.iter().find(|s| s["name"] == "normal-form").unwrap();
    assert_eq!(nf["passed"], false);
}

#[test]
fn shipped_models_verify() {
    for name in ["toy.toml", "angle2.toml", "polynomial.toml", "resonant-pair.toml", "hamiltonian-pair.toml"] {
        let dir = tempfile::tempdir().unwrap();
        let o = run_model("verify", name, dir.path(), &["--order", "3"]);
        assert_eq!(code(&o), 0, "{name}: {}", stdout(&o));
    }
}

#[test]
fn invalid_model_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "name = \"bad\"\ndim = 2\nangles = \"one\"\n").unwrap();
    let o = run(&["normal-form", "--model", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn invalid_eps_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_model("drift", "hamiltonian.toml", dir.path(), &["--eps", "0.05,0.1"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("descending"));
    let o = run_model("drift", "hamiltonian.toml", dir.path(), &["--order", "0"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn exact_mode_needs_explicit_frequencies() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_model("normal-form", "nonresonant.toml", dir.path(), &["--mode", "exact"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("float"));
}

#[test]
fn small_divisor_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("twopi.toml");
    std::fs::write(
        &path,
        r#"
name = "twopi"
dim = 2
angles = 1

[frequency]
model = "generic"
v = [6.283185307179586]

[[commuting]]
rates = ["0", "1"]

[[letters]]
name = "1"
payload = [1]
nu = ["i"]
field = [[{ c = "1", e = [0, 1] }], []]
"#,
    )
    .unwrap();
    let o = run(&["verify", "--model", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("small divisor"));
}

#[test]
fn runs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        assert_eq!(code(&run_model("verify", "toy.toml", d.path(), &["--seed", "11"])), 0);
    }
    let read = |d: &tempfile::TempDir| std::fs::read_to_string(d.path().join("summary.json")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        format!(
            "model = {:?}\norder = 2\neps = [0.1, 0.05]\nout = \"run\"\n[tolerances]\nflow_margin = 0.7\n",
            model("angle2.toml").to_str().unwrap()
        ),
    )
    .unwrap();
    let o = run(&["flow-compare", "--config", cfg.to_str().unwrap(), "--order", "3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let flow = json(&dir.path().join("run/flow.json"));
    assert_eq!(flow["order"], 3);
    assert_eq!(flow["rows"].as_array().unwrap().len(), 4);

    std::fs::write(&cfg, "model = \"m.toml\"\nordr = 2\n").unwrap();
    let o = run(&["flow-compare", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn invariants_of_hamiltonian_models() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_model("invariants", "hamiltonian.toml", dir.path(), &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(json(&dir.path().join("invariants.json"))["count"], 1);

    let o = run_model("invariants", "hamiltonian-pair.toml", dir.path(), &["--order", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let inv = json(&dir.path().join("invariants.json"));
    assert_eq!(inv["count"], 1);
    assert_eq!(inv["invariants"][0]["u"]["v"], serde_json::json!(["1", "2"]));

    let o = run_model("invariants", "toy.toml", dir.path(), &[]);
    assert_eq!(code(&o), 1);
    let o = run_model("invariants", "hamiltonian.toml", dir.path(), &["--mutate", "frequency", "--seed", "3"]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn drift_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_model("drift", "hamiltonian.toml", dir.path(), &["--order", "2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let csv = std::fs::read_to_string(dir.path().join("drift.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("invariant,eps,step,max_drift"));
    assert_eq!(lines.count(), 9);
}

#[test]
fn decompose_reports_brackets() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_model("decompose", "toy.toml", dir.path(), &["--order", "4"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let data = json(&dir.path().join("decomposition.json"));
    assert_eq!(data["resonance_basis"].as_array().unwrap().len(), 2);
    assert!(data["brackets"].as_array().unwrap().iter().all(|b| b["vanishes"] == true));
    assert_eq!(data["recursions"]["beta_bar"], true);
    assert!(dir.path().join("rho_u2.json").exists());
}
