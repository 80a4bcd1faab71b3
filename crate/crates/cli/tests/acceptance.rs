//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Library-level oracles run in process; the reporting criteria go
//! through the `kolmo` binary.

use anyhow::{ensure, Context, Result};
use kolmo_cli::output::{read_table, ParsedTable};
use kolmo_core::bounds::{girsanov_path, rn_bound, RnStyle};
use kolmo_core::drift::{validate_assumption, AssumptionMode, DriftComponent, DriftSpec, DriftState, Profile, Verdict};
use kolmo_core::gauss::{
    heat_kernel_density, log_lq_norm_exact, log_lq_norm_quadratic, map_exact_blocks, KolmogorovState, ShiftVector,
};
use kolmo_core::harness::{check_rlsi, check_wang, CheckVerdict, Diffusion, Method, REGISTRY};
use kolmo_core::quad::adaptive_2d;
use kolmo_core::rng::domain;
use kolmo_core::stats::{Moments, Z99};
use kolmo_core::Seed;
use rand::Rng;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/acceptance").join(name)
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn kolmo(sub: &str, cfg: &Path, out: &Path, workers: Option<usize>) -> Result<i32> {
    let mut c = Command::new(env!("CARGO_BIN_EXE_kolmo"));
    c.env_remove("KOLMO_SEED").arg(sub).arg("--config").arg(cfg).arg("--out").arg(out);
    if let Some(w) = workers {
        c.arg("--workers").arg(w.to_string());
    }
    let o = c.output().context("cannot start kolmo")?;
    if !o.stderr.is_empty() {
        eprint!("{}", String::from_utf8_lossy(&o.stderr));
    }
    o.status.code().context("kolmo was killed")
}

fn f64_cell(t: &ParsedTable, row: usize, col: &str) -> Result<f64> {
    let i = t.column(col).with_context(|| format!("no column {col}"))?;
    t.rows[row][i].parse::<f64>().with_context(|| format!("bad number in {col}"))
}

fn str_cell<'a>(t: &'a ParsedTable, row: usize, col: &str) -> &'a str {
    &t.rows[row][t.column(col).expect("column")]
}

fn bivariate_normal(cov: [[f64; 2]; 2], mean: [f64; 2], x: [f64; 2]) -> f64 {
    let det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
    let inv = [[cov[1][1] / det, -cov[0][1] / det], [-cov[1][0] / det, cov[0][0] / det]];
    let (u, v) = (x[0] - mean[0], x[1] - mean[1]);
    let q = u * (inv[0][0] * u + inv[0][1] * v) + v * (inv[1][0] * u + inv[1][1] * v);
    (-0.5 * q).exp() / (2.0 * std::f64::consts::PI * det.sqrt())
}

fn kernel_exactness() -> Result<String> {
    let o = KolmogorovState::zeros(1);
    let v = heat_kernel_density(1.0, &o, &o)?;
    let want = 3f64.sqrt() / std::f64::consts::PI;
    ensure!((v - want).abs() < 1e-12, "origin value {v} vs {want}");
    let f = |p: f64, xi: f64| heat_kernel_density(1.0, &o, &KolmogorovState::scalar(p, xi)).unwrap();
    let total = adaptive_2d(&f, (-8.0, 8.0), (-5.0, 5.0), 1e-9)?;
    ensure!((total - 1.0).abs() < 1e-6, "mass {total}");
    let mut rng = Seed(1).stream(domain("acceptance.kernel"), 0);
    let cov = [[1.0, 0.5], [0.5, 1.0 / 3.0]];
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let (p, xi) = (rng.random_range(-4.0..4.0), rng.random_range(-3.0..3.0));
        let want = bivariate_normal(cov, [0.0, 0.0], [p, xi]);
        let got = heat_kernel_density(1.0, &o, &KolmogorovState::scalar(p, xi))?;
        worst = worst.max(((got - want) / want).abs());
    }
    ensure!(worst < 1e-10, "worst relative error {worst:e}");
    Ok(format!("p1(0)={v:.15}, mass-1={:.1e}, worst rel err {worst:.1e}", total - 1.0))
}

fn sampling_exactness(dir: &Path) -> Result<String> {
    let code = kolmo("simulate", &config("sampling.toml"), dir, None)?;
    ensure!(code == 0, "exit status {code}");
    let t = read_table(&dir.join("sampling.csv"))?;
    ensure!(t.rows.len() == 5, "expected 2 means and 3 covariances");
    let mut worst = 0.0f64;
    for r in 0..t.rows.len() {
        let z = f64_cell(&t, r, "z")?.abs();
        ensure!(z <= 3.0, "{} {} {}: |z| = {z}", str_cell(&t, r, "quantity"), str_cell(&t, r, "i"), str_cell(&t, r, "j"));
        worst = worst.max(z);
    }
    // the expected means are the shift map (h, k + h)
    ensure!(f64_cell(&t, 0, "expected")? == 0.3 && (f64_cell(&t, 1, "expected")? - 0.1).abs() < 1e-15);
    Ok(format!("5 moments within 3 SE, largest |z| = {worst:.2}"))
}

fn rn_algebra(dir: &Path) -> Result<String> {
    let code = kolmo("verify-rn", &config("rn_oracle.toml"), dir, None)?;
    ensure!(code == 0, "exit status {code}");
    let t = read_table(&dir.join("rn_oracle.csv"))?;
    ensure!(t.rows.len() == 36, "{} rows", t.rows.len());
    for r in 0..t.rows.len() {
        let note = str_cell(&t, r, "note");
        ensure!(note.contains("confirms"), "row {r}: {note}");
    }
    let mut worst = 0.0f64;
    for q in [1.5, 2.0, 3.0, 4.0] {
        for tt in [0.5, 1.0, 2.0] {
            for (h, k) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
                let s = ShiftVector::scalar(h, k);
                let a = log_lq_norm_exact(tt, &s, q)?;
                let b = log_lq_norm_quadratic(tt, &s, q)?;
                let rel = (a - b).abs() / a.abs().max(1.0);
                ensure!(rel < 1e-12, "routes differ at q={q} t={tt} ({h},{k}): {a} vs {b}");
                worst = worst.max(rel);
            }
        }
    }
    Ok(format!("36/36 cells inside the oracle interval, closed-form routes agree to {worst:.1e}"))
}

fn girsanov_consistency() -> Result<String> {
    let t = 1.0;
    let g = girsanov_path(t, &ShiftVector::scalar(1.0, 0.0))?;
    ensure!((g.gamma(t)[0] + 1.0).abs() < 1e-12, "γ(t) = {}", g.gamma(t)[0]);
    ensure!((g.gamma_integral(t)[0] + 1.0).abs() < 1e-12, "∫γ = {}", g.gamma_integral(t)[0]);
    ensure!((g.norm_sq - 4.0).abs() < 1e-12, "‖γ‖² = {}", g.norm_sq);
    let parts = map_exact_blocks(t, &KolmogorovState::zeros(1), 1_000_000, Seed(20260805), |s| {
        let (mut one, mut two) = (Moments::default(), Moments::default());
        for (b, int_b) in s.rows() {
            let j = g.log_density_from_state(b, int_b).exp();
            one.push(j);
            two.push(j * j);
        }
        (one, two)
    })?;
    let (one, two) =
        parts.iter().fold((Moments::default(), Moments::default()), |(a, b), (c, d)| (a.merge(c), b.merge(d)));
    let want2 = g.norm_sq.exp();
    ensure!((one.mean - 1.0).abs() <= Z99 * one.std_error(), "E[J] = {} ± {}", one.mean, one.std_error());
    ensure!((two.mean - want2).abs() <= Z99 * two.std_error(), "E[J²] = {} ± {}", two.mean, two.std_error());
    Ok(format!("E[J]={:.4}±{:.4}, E[J²]={:.2}±{:.2} (target {want2:.3})", one.mean, one.std_error(), two.mean, two.std_error()))
}

fn bound_domination() -> Result<String> {
    let mut rng = Seed(20260806).stream(domain("acceptance.domination"), 0);
    let mut least = f64::INFINITY;
    for _ in 0..1000 {
        let q = rng.random_range(1.01..8.0);
        let t = rng.random_range(0.05..5.0);
        let (h, k): (f64, f64) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let exact = log_lq_norm_exact(t, &ShiftVector::scalar(h, k), q)?;
        let bound = rn_bound(RnStyle::Decoupled, q, t, &[h], &[k], None)?.log_value();
        ensure!(bound >= exact, "q={q} t={t} h={h} k={k}: {bound} < {exact}");
        least = least.min(bound - exact);
    }
    Ok(format!("1000 points, smallest log margin {least:.3e}"))
}

fn at(p: f64, xi: f64) -> DriftState {
    DriftState { p: vec![p], xi: vec![xi] }
}

fn wang_standard() -> Result<String> {
    let pairs = [
        (at(0.0, 0.0), at(0.0, 0.0)),
        (at(1.0, 0.0), at(0.0, 0.0)),
        (at(0.0, 1.0), at(0.0, 0.0)),
        (at(0.5, -0.5), at(-0.5, 0.5)),
        (at(1.2, 1.6), at(0.0, 0.0)),
    ];
    let (mut n, mut holds, mut violated) = (0, 0, 0);
    for f in REGISTRY.iter() {
        for alpha in [1.5, 2.0, 4.0] {
            for t in [0.5, 1.0] {
                for (x, y) in &pairs {
                    let g = |p: &[f64], xi: &[f64]| f.eval(p, xi);
                    let r = check_wang(&g, alpha, t, x, y, &Diffusion::Standard, &Method::Quadrature)?;
                    n += 1;
                    match r.verdict {
                        CheckVerdict::Holds => holds += 1,
                        CheckVerdict::Violated => violated += 1,
                        CheckVerdict::Inconclusive => {}
                    }
                }
            }
        }
    }
    ensure!(n == 300 && violated == 0 && holds == n, "{n} checks: {holds} HOLDS, {violated} VIOLATED");
    Ok(format!("{n} checks, {holds} HOLDS, 0 VIOLATED"))
}

fn rlsi_standard() -> Result<String> {
    let (mut n, mut worst) = (0, f64::INFINITY);
    for f in REGISTRY.iter().filter(|f| f.strictly_positive) {
        for t in [0.5, 1.0] {
            for x in [at(0.0, 0.0), at(1.0, 0.0), at(0.0, 1.0)] {
                let g = |p: &[f64], xi: &[f64]| f.eval(p, xi);
                let r = check_rlsi(&g, t, &x, &Diffusion::Standard, &Method::Quadrature)?;
                ensure!(r.verdict == CheckVerdict::Holds, "{} t={t} x={x:?}: {}", f.name, r.verdict);
                worst = worst.min(r.margin());
                n += 1;
            }
        }
    }
    Ok(format!("{n} checks HOLD, smallest margin {worst:.2e}"))
}

fn generalized_drift(dir: &Path) -> Result<String> {
    let spec = DriftSpec::finite(
        "tanh-2x-1d",
        1,
        vec![DriftComponent::certified(vec![0], Profile::LinearTanh { slope: 2.0, amplitude: 1.0 })],
    );
    let v = validate_assumption(&spec, AssumptionMode::A, 10_000, Seed(20260807));
    ensure!(v.verdict == Verdict::Pass, "validator: {} ({})", v.verdict, v.reasons.join("; "));
    let c = &v.components[0];
    ensure!(c.certified == Some((2.0, 3.0)), "certified range {:?}", c.certified);
    ensure!(c.violations == 0 && c.probes == 10_000, "{} violations in {} probes", c.violations, c.probes);
    let code = kolmo("verify-wang", &config("generalized_wang.toml"), dir, None)?;
    let t = read_table(&dir.join("generalized_wang.csv"))?;
    ensure!(t.rows.len() == 20, "{} rows", t.rows.len());
    let violated = (0..20).filter(|&r| str_cell(&t, r, "verdict") == "VIOLATED").count();
    let holds = (0..20).filter(|&r| str_cell(&t, r, "verdict") == "HOLDS").count();
    ensure!(violated == 0 && code != 2, "{violated} VIOLATED (exit {code})");
    Ok(format!("(m, M) = (2, 3), 0/10000 probe violations; 20 configurations: {holds} HOLDS, 0 VIOLATED (exit {code})"))
}

fn convergence(dir: &Path) -> Result<String> {
    let code = kolmo("convergence", &config("convergence.toml"), dir, None)?;
    let t = read_table(&dir.join("convergence.csv"))?;
    ensure!(t.rows.len() == 8, "{} ranks", t.rows.len());
    let mut ratios = Vec::new();
    for r in 0..t.rows.len() {
        ensure!(str_cell(&t, r, "increase") != "true", "significant increase after n={}", str_cell(&t, r, "n"));
        if !str_cell(&t, r, "envelope_ratio").is_empty() {
            ensure!(str_cell(&t, r, "envelope_ok") == "true", "envelope ratio off at n={}", str_cell(&t, r, "n"));
            ratios.push(f64_cell(&t, r, "envelope_ratio")?);
        }
    }
    ensure!(code == 0, "exit status {code}");
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    Ok(format!("trend test passes; MSE/envelope in [{lo:.2}, {hi:.2}] over {} ranks", ratios.len()))
}

fn discrepancy(dir: &Path) -> Result<String> {
    let code = kolmo("verify-rn", &fixture("rn_sweep.toml"), dir, None)?;
    let t = read_table(&dir.join("rn_sweep.csv"))?;
    for style in ["exact", "cross_term", "decoupled"] {
        let n = (0..t.rows.len()).filter(|&r| str_cell(&t, r, "style") == style).count();
        ensure!(n == 4, "{n} rows for {style}");
    }
    let row = (0..t.rows.len())
        .find(|&r| str_cell(&t, r, "style") == "cross_term" && f64_cell(&t, r, "q").ok() == Some(4.0))
        .context("no cross_term row at q=4")?;
    ensure!(str_cell(&t, row, "note").contains("confirms"), "oracle: {}", str_cell(&t, row, "note"));
    let (lhs, rhs) = (f64_cell(&t, row, "lhs_log")?, f64_cell(&t, row, "rhs_log")?);
    ensure!((lhs - 18.0).abs() <= 1e-9 && (rhs - 15.0).abs() <= 1e-9, "lhs_log {lhs}, rhs_log {rhs}");
    ensure!(str_cell(&t, row, "verdict") == "VIOLATED", "verdict {}", str_cell(&t, row, "verdict"));
    let others = (0..t.rows.len()).filter(|&r| r != row && str_cell(&t, r, "verdict") == "VIOLATED").count();
    ensure!(others == 0, "{others} other rows VIOLATED");
    ensure!(code == 2, "exit status {code}");
    Ok(format!("cross_term at q=4: lhs_log={lhs}, rhs_log={rhs}, VIOLATED, exit 2"))
}

fn reproducibility(dir: &Path) -> Result<String> {
    let runs = [
        ("simulate", config("sampling.toml"), "sampling"),
        ("verify-rn", config("rn_oracle.toml"), "rn_oracle"),
        ("verify-wang", config("generalized_wang_slice.toml"), "generalized_wang_slice"),
    ];
    let mut compared = 0;
    for (sub, cfg, name) in &runs {
        let mut first: Option<Vec<u8>> = None;
        for w in [1, 4, 16] {
            let out = dir.join(format!("w{w}"));
            let code = kolmo(sub, cfg, &out, Some(w))?;
            ensure!(code == 0, "{name} with {w} workers: exit {code}");
            let bytes = std::fs::read(out.join(format!("{name}.csv")))?;
            match &first {
                None => first = Some(bytes),
                Some(f) => ensure!(*f == bytes, "{name}: workers {w} differs from workers 1"),
            }
        }
        let t = read_table(&dir.join("w1").join(format!("{name}.csv")))?;
        compared += t.rows.len();
    }
    Ok(format!("{compared} rows bitwise identical across 1, 4 and 16 workers"))
}

fn main() {
    let root = tempfile::tempdir().expect("temporary directory");
    let sub = |n: u32| {
        let d = root.path().join(format!("c{n}"));
        std::fs::create_dir_all(&d).unwrap();
        d
    };
    type Check<'a> = Box<dyn FnOnce() -> Result<String> + 'a>;
    let (d2, d3, d8, d9, d10, d11) = (sub(2), sub(3), sub(8), sub(9), sub(10), sub(11));
    let criteria: Vec<(u32, &str, u64, Check)> = vec![
        (1, "kernel exactness", 10, Box::new(kernel_exactness)),
        (2, "sampling exactness", 30, Box::new(|| sampling_exactness(&d2))),
        (3, "RN algebra", 300, Box::new(|| rn_algebra(&d3))),
        (4, "Girsanov consistency", 60, Box::new(girsanov_consistency)),
        (5, "bound domination", 5, Box::new(bound_domination)),
        (6, "Wang Harnack, standard", 300, Box::new(wang_standard)),
        (7, "reverse log-Sobolev, standard", 120, Box::new(rlsi_standard)),
        (8, "generalized drift", 600, Box::new(|| generalized_drift(&d8))),
        (9, "convergence", 300, Box::new(|| convergence(&d9))),
        (10, "discrepancy surfacing", 60, Box::new(|| discrepancy(&d10))),
        (11, "reproducibility", 0, Box::new(|| reproducibility(&d11))),
    ];
    let mut failed = 0;
    for (n, title, budget, check) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err(anyhow::anyhow!("panicked")));
        let took = start.elapsed();
        let over = budget > 0 && took > Duration::from_secs(budget);
        let (ok, detail) = match result {
            Ok(d) if !over => (true, d),
            Ok(d) => (false, format!("{d}; over the {budget} s budget")),
            Err(e) => (false, format!("{e:#}")),
        };
        if !ok {
            failed += 1;
        }
        println!("{} criterion {n:>2} ({title}) [{:.1} s]: {detail}", if ok { "PASS" } else { "FAIL" }, took.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
