use kolmo_cli::output::read_table;
use std::path::{Path, PathBuf};
use std::process::Command;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn kolmo(args: &[&str]) -> (i32, String) {
    kolmo_env(args, None)
}

fn kolmo_env(args: &[&str], seed_env: Option<&str>) -> (i32, String) {
    let mut c = Command::new(env!("CARGO_BIN_EXE_kolmo"));
    c.args(args).env_remove("KOLMO_SEED");
    if let Some(s) = seed_env {
        c.env("KOLMO_SEED", s);
    }
    let out = c.output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn run(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> (i32, String) {
    let mut args = vec![sub, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    kolmo(&args)
}

fn cell(file: &Path, row: usize, col: &str) -> String {
    let t = read_table(file).unwrap();
    t.rows[row][t.column(col).unwrap()].clone()
}

#[test]
fn exit_status_contract() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path();
    assert_eq!(run("verify-rn", &fixture("rn_holds.toml"), o, &[]).0, 0);
    assert_eq!(run("verify-rn", &fixture("rn_sweep.toml"), o, &[]).0, 2);
    assert_eq!(run("verify-wang", &fixture("wang_inconclusive.toml"), o, &[]).0, 3);
    let (code, err) = run("verify-rn", &fixture("empty_grid.toml"), o, &[]);
    assert_eq!(code, 1);
    assert!(err.contains("rn.q"), "{err}");
}

#[test]
fn malformed_documents_report_the_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "seed = 1\n[rn]\nq = [2.0]\nt = [1.0]\nshifts = [[0.0, 1.0]]\nstyle = [\"decoupled\"]\n").unwrap();
    let (code, err) = run("verify-rn", &bad, dir.path(), &[]);
    assert_eq!(code, 1);
    assert!(err.contains("line 6") && err.contains("style"), "{err}");
    std::fs::write(&bad, "seed = \"one\"\n").unwrap();
    let (code, err) = run("verify-rn", &bad, dir.path(), &[]);
    assert_eq!(code, 1);
    assert!(err.contains("line 1"), "{err}");
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path();
    // wrong subcommand for the document
    assert_eq!(run("kernel", &fixture("rn_holds.toml"), o, &[]).0, 1);
    assert_eq!(run("kernel", &o.join("missing.toml"), o, &[]).0, 1);
    assert_eq!(kolmo(&["verify-rn"]).0, 1);
    assert_eq!(kolmo(&["frobnicate"]).0, 1);
    assert_eq!(run("verify-rn", &fixture("rn_holds.toml"), o, &["--workers", "0"]).0, 1);
    let noseed = o.join("noseed.toml");
    std::fs::write(&noseed, "[kernel]\nt = [1.0]\npoints = [[0.0, 0.0]]\n").unwrap();
    let (code, err) = run("kernel", &noseed, o, &[]);
    assert_eq!(code, 1);
    assert!(err.contains("seed"), "{err}");
    let (code, _) = kolmo_env(&["kernel", "--config", noseed.to_str().unwrap(), "--out", o.to_str().unwrap()], Some("4"));
    assert_eq!(code, 0);
}

#[test]
fn kernel_row_at_origin() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run("kernel", &fixture("kernel.toml"), dir.path(), &[]).0, 0);
    let csv = dir.path().join("kernel.csv");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("# schema=1\n# table=kernel\n"));
    let v: f64 = cell(&csv, 0, "density").parse().unwrap();
    assert!((v - 3f64.sqrt() / std::f64::consts::PI).abs() < 1e-15);
    assert!(cell(&csv, 0, "density").starts_with("5.513288954217920"));
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path();
    let cfg = fixture("wang_inconclusive.toml");
    let args = |s: &'static str| vec!["verify-wang", "--config", cfg.to_str().unwrap(), "--out", s];
    let (a, b, c) = (o.join("a"), o.join("b"), o.join("c"));
    let seed_of = |d: &Path| {
        let m: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(d.join("wang_inconclusive.manifest.json")).unwrap()).unwrap();
        m["seed"].as_u64().unwrap()
    };
    let mut v = args("");
    v[4] = a.to_str().unwrap();
    kolmo_env(&v, Some("99"));
    assert_eq!(seed_of(&a), 99);
    v[4] = b.to_str().unwrap();
    v.extend(["--seed", "5"]);
    kolmo_env(&v, Some("99"));
    assert_eq!(seed_of(&b), 5);
    v.truncate(5);
    v[4] = c.to_str().unwrap();
    kolmo_env(&v, None);
    assert_eq!(seed_of(&c), 3);
}

#[test]
fn manifest_replay_is_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let (first, second) = (dir.path().join("first"), dir.path().join("second"));
    let cfg = dir.path().join("sim.toml");
    std::fs::write(&cfg, "kind = \"simulate\"\nname = \"sim\"\n[simulate]\nt = 0.7\nsamples = 20000\nstart = [0.3, -0.2]\n")
        .unwrap();
    assert_eq!(run("simulate", &cfg, &first, &["--seed", "41"]).0, 0);
    assert_eq!(run("verify-wang", &fixture("wang_drift.toml"), &first, &[]).0, 0);
    for (sub, name) in [("simulate", "sim"), ("verify-wang", "wang_drift")] {
        let manifest = first.join(format!("{name}.manifest.json"));
        assert_eq!(run(sub, &manifest, &second, &["--workers", "3"]).0, 0);
        let a = std::fs::read(first.join(format!("{name}.csv"))).unwrap();
        let b = std::fs::read(second.join(format!("{name}.csv"))).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn sweep_takes_the_worst_status() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run("sweep", &fixture("sweep.toml"), dir.path(), &[]).0, 2);
    let csv = dir.path().join("sweep.csv");
    assert_eq!(cell(&csv, 2, "status"), "2");
    assert!(dir.path().join("rn_holds.csv").exists());
}

#[test]
fn plotdata_columns_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path();
    assert_eq!(run("convergence", &fixture("convergence.toml"), o, &[]).0, 0);
    assert_eq!(run("verify-rn", &fixture("rn_holds.toml"), o, &[]).0, 0);
    let conv = o.join("convergence.csv");
    let rn = o.join("rn_holds.csv");
    let plots = o.join("plots");
    let p = plots.to_str().unwrap();
    assert_eq!(kolmo(&["plotdata", conv.to_str().unwrap(), "--kind", "convergence", "--out", p]).0, 0);
    let text = std::fs::read_to_string(plots.join("convergence.dat")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# n mean_error se");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("2 ") && lines[1].split_whitespace().count() == 3);
    // idempotent
    assert_eq!(kolmo(&["plotdata", conv.to_str().unwrap(), "--kind", "convergence", "--out", p]).0, 0);
    assert_eq!(std::fs::read_to_string(plots.join("convergence.dat")).unwrap(), text);
    assert_eq!(kolmo(&["plotdata", rn.to_str().unwrap(), "--kind", "rn", "--out", p]).0, 0);
    let text = std::fs::read_to_string(plots.join("rn_holds.dat")).unwrap();
    assert_eq!(text.matches("# style=").count(), 2);
    assert_eq!(text.lines().filter(|l| !l.is_empty() && !l.starts_with('#')).count(), 16);
    assert_eq!(kolmo(&["plotdata", rn.to_str().unwrap(), "--kind", "convergence", "--out", p]).0, 1);
    assert_eq!(kolmo(&["plotdata", o.join("none.csv").to_str().unwrap(), "--kind", "rn", "--out", p]).0, 1);
    let old = o.join("old.csv");
    std::fs::write(&old, std::fs::read_to_string(&rn).unwrap().replace("schema=1", "schema=0")).unwrap();
    assert_eq!(kolmo(&["plotdata", old.to_str().unwrap(), "--kind", "rn", "--out", p]).0, 1);
}

#[test]
fn overflowing_bounds_keep_log_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("big.toml");
    std::fs::write(
        &cfg,
        "kind = \"verify-rn\"\nname = \"big\"\nseed = 1\n[rn]\nq = [4.0]\nt = [0.01]\nshifts = [[0.0, 1.0]]\nstyles = [\"decoupled\"]\n",
    )
    .unwrap();
    assert_eq!(run("verify-rn", &cfg, dir.path(), &[]).0, 0);
    let csv = dir.path().join("big.csv");
    assert_eq!(cell(&csv, 0, "lhs"), "OVERFLOW");
    assert_eq!(cell(&csv, 0, "rhs"), "OVERFLOW");
    let lhs: f64 = cell(&csv, 0, "lhs_log").parse().unwrap();
    assert!((lhs - 18e6).abs() < 1e-6);
}
