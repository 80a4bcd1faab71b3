//! Experiment dispatch: configuration in, tables and a manifest out.

use crate::config::{self, ExperimentConfig, Kind, LoadedConfig};
use crate::output::{num, report_table, write_manifest, Counts, Manifest, Table};
use anyhow::{anyhow, bail, ensure, Context, Result};
use kolmo_core::bounds::RnStyle;
use kolmo_core::drift::{map_endpoint_blocks, AssumptionMode, DriftSpec, DriftState, EndpointOptions, ValidatedDrift};
use kolmo_core::gauss::{log_heat_kernel_density, map_exact_blocks, KolmogorovState, ShiftVector};
use kolmo_core::harness::{
    check_rlsi, check_rn_bounds, check_wang, convergence_study, envelope_ratios, monotone_trend_test,
    ConvergenceTarget, Diffusion, InequalityReport, McOptions, RnOracle, TestFunction, REGISTRY,
};
use kolmo_core::rng::pairwise_reduce;
use kolmo_core::stats::MultiMoments;
use kolmo_core::wiener::{TimeGrid, WienerSpaceModel};
use kolmo_core::Seed;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Tolerated ratio between mean squared error and tail-sum envelope.
pub const ENVELOPE_FACTOR: f64 = 4.0;

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Seed from the command line or environment; overrides the document.
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: PathBuf,
}

/// What one experiment produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub name: String,
    pub kind: Kind,
    pub status: i32,
    pub counts: Counts,
    pub outputs: Vec<PathBuf>,
}

struct Produced {
    tables: Vec<(String, Table)>,
    counts: Counts,
    status: i32,
}

impl Produced {
    fn verdicts(kind: &str, extra: &[&str], reports: &[(Vec<String>, InequalityReport)]) -> Self {
        let (t, counts) = report_table(kind, extra, reports);
        Produced { tables: vec![(String::new(), t)], counts, status: counts.status() }
    }

    fn plain(t: Table) -> Self {
        let counts = Counts { rows: t.rows.len(), ..Counts::default() };
        Produced { tables: vec![(String::new(), t)], counts, status: 0 }
    }
}

/// Runs one experiment and writes `<out>/<name>.csv` and
/// `<out>/<name>.manifest.json`.
pub fn run(kind: Kind, loaded: &LoadedConfig, opts: &RunOptions) -> Result<RunSummary> {
    let cfg = &loaded.config;
    if let Some(k) = cfg.kind {
        ensure!(k == kind, "configuration is for `{}` but `{}` was requested", k.name(), kind.name());
    }
    let seed = opts
        .seed
        .or(cfg.seed)
        .ok_or_else(|| anyhow!("no seed: set `seed` in the configuration, pass --seed or set KOLMO_SEED"))?;
    let name = cfg.name.clone().unwrap_or_else(|| kind.name().to_string());
    ensure!(
        !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)),
        "name `{name}` must be non-empty and use only letters, digits, `-`, `_` and `.`"
    );
    std::fs::create_dir_all(&opts.out).with_context(|| format!("cannot create {}", opts.out.display()))?;
    let started = Instant::now();
    let produced = match kind {
        Kind::Simulate => simulate(cfg, &loaded.base, seed)?,
        Kind::Kernel => kernel(cfg, &loaded.base, seed)?,
        Kind::VerifyWang => wang(cfg, &loaded.base, seed)?,
        Kind::VerifyRlsi => rlsi(cfg, &loaded.base, seed)?,
        Kind::VerifyRn => rn(cfg, &loaded.base, seed)?,
        Kind::Convergence => convergence(cfg, &loaded.base, seed)?,
        Kind::Sweep => return sweep(loaded, opts, seed, &name, started),
    };
    let mut outputs = Vec::new();
    for (suffix, table) in &produced.tables {
        let path = opts.out.join(format!("{name}{suffix}.csv"));
        table.write(&path)?;
        outputs.push(path);
    }
    let echo = echo_config(cfg, kind, seed, &loaded.base);
    let manifest_path = opts.out.join(format!("{name}.manifest.json"));
    write_manifest(
        &manifest_path,
        &Manifest {
            tool: "kolmo",
            version: env!("CARGO_PKG_VERSION"),
            schema: crate::output::SCHEMA,
            kind: kind.name(),
            config: &echo,
            seed,
            workers: opts.workers,
            wall_time_s: started.elapsed().as_secs_f64(),
            outputs: outputs.clone(),
            counts: produced.counts,
            status: produced.status,
        },
    )?;
    outputs.push(manifest_path);
    Ok(RunSummary { name, kind, status: produced.status, counts: produced.counts, outputs })
}

/// The configuration as actually run: kind and seed filled in, relative paths
/// made absolute so the manifest can be replayed from anywhere.
fn echo_config(cfg: &ExperimentConfig, kind: Kind, seed: u64, base: &Path) -> ExperimentConfig {
    let mut c = cfg.clone();
    c.kind = Some(kind);
    c.seed = Some(seed);
    let abs = |p: &Path| {
        let j = base.join(p);
        std::fs::canonicalize(&j).unwrap_or(j)
    };
    if let Some(d) = c.diffusion.drift.as_mut() {
        if let Some(p) = d.path.as_mut() {
            *p = abs(p);
        }
    }
    if let Some(s) = c.sweep.as_mut() {
        for r in s.runs.iter_mut() {
            *r = abs(r);
        }
    }
    c
}

fn row_seed(seed: u64, row: usize) -> Seed {
    Seed(seed).derive(row as u64)
}

fn joined(v: &[f64]) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ")
}

fn state(v: &[f64], d: usize, r: usize, what: &str) -> Result<DriftState> {
    ensure!(v.len() == d + r, "{what}: expected {} entries ([p; {d}], [ξ; {r}]), got {}", d + r, v.len());
    ensure!(v.iter().all(|x| x.is_finite()), "{what}: entries must be finite");
    Ok(DriftState { p: v[..d].to_vec(), xi: v[d..].to_vec() })
}

fn functions(names: &[String], positive_only: bool) -> Result<Vec<TestFunction>> {
    config::non_empty(names, "functions")?;
    if names.len() == 1 && names[0] == "all" {
        return Ok(REGISTRY.iter().copied().filter(|f| !positive_only || f.strictly_positive).collect());
    }
    names
        .iter()
        .map(|n| {
            kolmo_core::harness::test_function(n).ok_or_else(|| {
                let known: Vec<&str> = REGISTRY.iter().map(|f| f.name).collect();
                anyhow!("unknown test function `{n}` (known: {})", known.join(", "))
            })
        })
        .collect()
}

fn diffusion(cfg: &ExperimentConfig, base: &Path, seed: u64) -> Result<(Diffusion, usize, usize)> {
    let d = cfg.diffusion.build(base, Seed(seed))?;
    let (p, r) = cfg.diffusion.dims(&d);
    Ok((d, p, r))
}

fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T> {
    s.as_ref().ok_or_else(|| anyhow!("missing [{name}] section"))
}

fn simulate(cfg: &ExperimentConfig, base: &Path, seed: u64) -> Result<Produced> {
    let s = section(&cfg.simulate, "simulate")?;
    let (diff, d, r) = diffusion(cfg, base, seed)?;
    ensure!(s.t.is_finite() && s.t > 0.0, "simulate.t must be positive");
    ensure!(s.samples >= 2, "simulate.samples must be at least 2");
    let zero = vec![0.0; d + r];
    let start = state(s.start.as_deref().unwrap_or(&zero), d, r, "simulate.start")?;
    let n = d + r;
    let t = s.t;
    // centring point: the mean of the standard process, the drift-free
    // transport otherwise
    let centre: Vec<f64> = match &diff {
        Diffusion::Standard => start.p.iter().cloned().chain((0..d).map(|i| start.xi[i] + t * start.p[i])).collect(),
        Diffusion::Generalized(_) => start.p.iter().chain(&start.xi).cloned().collect(),
    };
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let width = n + pairs.len();
    let push = |mm: &mut MultiMoments, row: &[f64], buf: &mut Vec<f64>| {
        buf.clear();
        buf.extend_from_slice(row);
        buf.extend(pairs.iter().map(|&(i, j)| (row[i] - centre[i]) * (row[j] - centre[j])));
        mm.push(buf);
    };
    let sample_seed = row_seed(seed, 0);
    let keep = s.write_samples;
    let parts: Vec<(MultiMoments, Vec<f64>)> = match &diff {
        Diffusion::Standard => {
            let ks = KolmogorovState::new(start.p.clone(), start.xi.clone())?;
            map_exact_blocks(t, &ks, s.samples, sample_seed, |smp| {
                let mut mm = MultiMoments::new(width);
                let mut buf = Vec::with_capacity(width);
                for row in smp.data.chunks(n) {
                    push(&mut mm, row, &mut buf);
                }
                (mm, if keep { smp.data.clone() } else { Vec::new() })
            })?
        }
        Diffusion::Generalized(drift) => {
            let method = cfg.method.method(sample_seed)?;
            let steps = match method {
                kolmo_core::harness::Method::MonteCarlo(o) => o.steps,
                _ => cfg.method.steps,
            };
            let eo = EndpointOptions { steps, antithetic: false };
            map_endpoint_blocks(drift, std::slice::from_ref(&start), t, s.samples, sample_seed, eo, |rows, w| {
                let mut mm = MultiMoments::new(width);
                let mut buf = Vec::with_capacity(width);
                for row in rows.chunks(w) {
                    push(&mut mm, row, &mut buf);
                }
                (mm, if keep { rows.to_vec() } else { Vec::new() })
            })?
        }
    };
    let samples: Vec<f64> = if keep { parts.iter().flat_map(|p| p.1.iter().copied()).collect() } else { Vec::new() };
    let mm = pairwise_reduce(parts.into_iter().map(|p| p.0).collect(), |a, b| a.merge(b)).expect("one block");
    let label = |i: usize| if i < d { format!("p{}", i + 1) } else { format!("xi{}", i - d + 1) };
    let standard = matches!(diff, Diffusion::Standard);
    let expected_cov = |i: usize, j: usize| -> f64 {
        let (a, b) = (i % d, j % d);
        if a != b {
            return 0.0;
        }
        match (i < d, j < d) {
            (true, true) => t,
            (false, false) => t.powi(3) / 3.0,
            _ => t * t / 2.0,
        }
    };
    let mut table = Table::new(
        "simulate",
        &["quantity", "i", "j", "t", "estimate", "se", "expected", "z", "samples", "seed", "diffusion"],
    );
    let mut add = |q: &str, i: String, j: String, est: f64, se: f64, expected: Option<f64>| {
        let (e, z) = match expected {
            Some(e) => (num(e), num((est - e) / se)),
            None => (String::new(), String::new()),
        };
        table.push(vec![
            q.into(),
            i,
            j,
            num(t),
            num(est),
            num(se),
            e,
            z,
            s.samples.to_string(),
            sample_seed.0.to_string(),
            diff.label(),
        ]);
    };
    for i in 0..n {
        add("mean", label(i), String::new(), mm.mean[i], mm.mean_se(i), standard.then(|| centre[i]));
    }
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let est = mm.mean[n + k] - (mm.mean[i] - centre[i]) * (mm.mean[j] - centre[j]);
        add("cov", label(i), label(j), est, mm.mean_se(n + k), standard.then(|| expected_cov(i, j)));
    }
    let mut produced = Produced::plain(table);
    if keep {
        let header: Vec<String> = (0..n).map(label).collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut st = Table::new("samples", &header);
        for row in samples.chunks(n) {
            st.push(row.iter().map(|v| num(*v)).collect());
        }
        produced.tables.push((".samples".into(), st));
    }
    Ok(produced)
}

fn kernel(cfg: &ExperimentConfig, base: &Path, seed: u64) -> Result<Produced> {
    let k = section(&cfg.kernel, "kernel")?;
    let (diff, d, _) = diffusion(cfg, base, seed)?;
    ensure!(matches!(diff, Diffusion::Standard), "the explicit kernel exists for the standard diffusion only");
    config::non_empty(&k.t, "kernel.t")?;
    config::non_empty(&k.points, "kernel.points")?;
    let zero = vec![0.0; 2 * d];
    let s = state(k.start.as_deref().unwrap_or(&zero), d, d, "kernel.start")?;
    let start = KolmogorovState::new(s.p, s.xi)?;
    let mut table = Table::new("kernel", &["t", "start_p", "start_xi", "p", "xi", "density", "density_log"]);
    for &t in &k.t {
        for (i, pt) in k.points.iter().enumerate() {
            let e = state(pt, d, d, &format!("kernel.points[{i}]"))?;
            let end = KolmogorovState::new(e.p, e.xi)?;
            let log = log_heat_kernel_density(t, &start, &end)?;
            table.push(vec![
                num(t),
                joined(&start.p),
                joined(&start.xi),
                joined(&end.p),
                joined(&end.xi),
                crate::output::linear_from_log(log),
                num(log),
            ]);
        }
    }
    Ok(Produced::plain(table))
}

fn wang(cfg: &ExperimentConfig, base: &Path, seed: u64) -> Result<Produced> {
    let w = section(&cfg.wang, "wang")?;
    let (diff, d, r) = diffusion(cfg, base, seed)?;
    let fs = functions(&w.functions, false)?;
    config::non_empty(&w.alpha, "wang.alpha")?;
    config::non_empty(&w.t, "wang.t")?;
    config::non_empty(&w.pairs, "wang.pairs")?;
    let pairs = w
        .pairs
        .iter()
        .enumerate()
        .map(|(i, v)| {
            ensure!(v.len() == 2 * (d + r), "wang.pairs[{i}]: expected {} entries (x then x′)", 2 * (d + r));
            Ok((state(&v[..d + r], d, r, "wang.pairs")?, state(&v[d + r..], d, r, "wang.pairs")?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut reports = Vec::new();
    let mut row = 0;
    for f in &fs {
        for &alpha in &w.alpha {
            for &t in &w.t {
                for (x, y) in &pairs {
                    let method = cfg.method.method(row_seed(seed, row))?;
                    let g = |p: &[f64], xi: &[f64]| f.eval(p, xi);
                    let rep = check_wang(&g, alpha, t, x, y, &diff, &method)
                        .with_context(|| format!("wang row {row} ({})", f.name))?;
                    reports.push((vec![f.name.to_string()], rep));
                    row += 1;
                }
            }
        }
    }
    Ok(Produced::verdicts("wang", &["function"], &reports))
}

fn rlsi(cfg: &ExperimentConfig, base: &Path, seed: u64) -> Result<Produced> {
    let l = section(&cfg.rlsi, "rlsi")?;
    let (diff, d, r) = diffusion(cfg, base, seed)?;
    let fs = functions(&l.functions, true)?;
    config::non_empty(&l.t, "rlsi.t")?;
    config::non_empty(&l.points, "rlsi.points")?;
    let points = l
        .points
        .iter()
        .enumerate()
        .map(|(i, v)| state(v, d, r, &format!("rlsi.points[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let mut reports = Vec::new();
    let mut row = 0;
    for f in &fs {
        for &t in &l.t {
            for x in &points {
                let method = cfg.method.method(row_seed(seed, row))?;
                let g = |p: &[f64], xi: &[f64]| f.eval(p, xi);
                let rep =
                    check_rlsi(&g, t, x, &diff, &method).with_context(|| format!("rlsi row {row} ({})", f.name))?;
                reports.push((vec![f.name.to_string()], rep));
                row += 1;
            }
        }
    }
    Ok(Produced::verdicts("rlsi", &["function"], &reports))
}

fn rn(cfg: &ExperimentConfig, base: &Path, seed: u64) -> Result<Produced> {
    let c = section(&cfg.rn, "rn")?;
    let (diff, d, r) = diffusion(cfg, base, seed)?;
    config::non_empty(&c.q, "rn.q")?;
    config::non_empty(&c.t, "rn.t")?;
    config::non_empty(&c.shifts, "rn.shifts")?;
    config::non_empty(&c.styles, "rn.styles")?;
    let styles = c
        .styles
        .iter()
        .map(|s| RnStyle::parse(s).ok_or_else(|| anyhow!("rn.styles: unknown style `{s}`")))
        .collect::<Result<Vec<_>>>()?;
    let drift = match &diff {
        Diffusion::Standard => None,
        Diffusion::Generalized(v) => Some(v),
    };
    let mut reports = Vec::new();
    let mut group = 0;
    for &q in &c.q {
        for &t in &c.t {
            for (i, v) in c.shifts.iter().enumerate() {
                ensure!(v.len() == d + r, "rn.shifts[{i}]: expected {} entries ([h; {d}], [k; {r}])", d + r);
                ensure!(v.iter().all(|x| x.is_finite()), "rn.shifts[{i}]: entries must be finite");
                // a drift shift has one k entry per component, so h and k may differ in length
                let shift = ShiftVector { h: v[..d].to_vec(), k: v[d..].to_vec() };
                let oracle = match &c.oracle {
                    Some(o) => {
                        ensure!(o.confidence > 0.0 && o.confidence < 1.0, "rn.oracle.confidence must lie in (0, 1)");
                        let mut opts = McOptions::new(o.samples, row_seed(seed, group));
                        opts.confidence = o.confidence;
                        Some(RnOracle { opts })
                    }
                    None => None,
                };
                let reps = check_rn_bounds(q, t, &shift, &styles, drift, oracle.as_ref())
                    .with_context(|| format!("rn group {group} (q={q}, t={t}, shift {i})"))?;
                reports.extend(reps.into_iter().map(|r| (Vec::new(), r)));
                group += 1;
            }
        }
    }
    Ok(Produced::verdicts("rn", &[], &reports))
}

fn sequence_drift(name: &str, n: usize, probes: usize, seed: u64) -> Result<ValidatedDrift> {
    let spec = match name {
        "identity" => DriftSpec::identity(n),
        "smoothed-log" => DriftSpec::smoothed_log_sequence(n, 0.25, 1.0, 0.5),
        other => bail!("convergence.sequence: unknown drift `{other}` (expected identity or smoothed-log)"),
    };
    ValidatedDrift::new(spec, AssumptionMode::B4, probes, Seed(seed).derive(kolmo_core::rng::domain("cli.probe")))
        .map_err(|e| anyhow!("{e}"))
}

fn convergence(cfg: &ExperimentConfig, base: &Path, seed: u64) -> Result<Produced> {
    let c = section(&cfg.convergence, "convergence")?;
    config::non_empty(&c.ranks, "convergence.ranks")?;
    let model = WienerSpaceModel::inverse_square(c.truncation)?;
    let grid = TimeGrid::uniform(c.horizon, c.steps)?;
    let target = match c.target.as_str() {
        "standard-x" => ConvergenceTarget::StandardX,
        "generalized-y" => match cfg.diffusion.build(base, Seed(seed))? {
            Diffusion::Generalized(v) => ConvergenceTarget::GeneralizedY(v),
            Diffusion::Standard => bail!("generalized-y needs a [diffusion] of kind drift"),
        },
        "sequence-y" => {
            let name = c.sequence.as_deref().ok_or_else(|| anyhow!("sequence-y needs convergence.sequence"))?;
            ConvergenceTarget::SequenceY(sequence_drift(name, c.truncation, 1000, seed)?)
        }
        other => bail!("convergence.target: unknown target `{other}`"),
    };
    let study_seed = Seed(seed);
    let records = convergence_study(&model, &target, &c.ranks, &grid, c.replicates, study_seed)?;
    let trend = monotone_trend_test(&records, None);
    let ratios = envelope_ratios(&records, ENVELOPE_FACTOR);
    let check_envelope = matches!(target, ConvergenceTarget::StandardX);
    let mut table = Table::new(
        "convergence",
        &[
            "target",
            "n",
            "mean_error",
            "se",
            "max_error",
            "mean_sq",
            "se_sq",
            "envelope",
            "envelope_ratio",
            "envelope_ok",
            "drop_to_next",
            "drop_se",
            "increase",
            "replicates",
            "seed",
        ],
    );
    let mut counts = Counts::default();
    let mut failed = !trend.pass;
    for (i, rec) in records.iter().enumerate() {
        let ratio = ratios.iter().find(|(n, _, _)| *n == rec.n);
        let ok = ratio.map(|r| r.2);
        if check_envelope && ok == Some(false) {
            failed = true;
        }
        let step = trend.steps.get(i);
        let bad = step.is_some_and(|s| s.increase) || (check_envelope && ok == Some(false));
        counts.add(if bad {
            kolmo_core::harness::CheckVerdict::Violated
        } else {
            kolmo_core::harness::CheckVerdict::Holds
        });
        table.push(vec![
            target.label(),
            rec.n.to_string(),
            num(rec.mean),
            num(rec.se),
            num(rec.max),
            num(rec.mean_sq),
            num(rec.se_sq),
            num(rec.envelope),
            ratio.map(|r| num(r.1)).unwrap_or_default(),
            ok.map(|b| b.to_string()).unwrap_or_default(),
            step.map(|s| num(s.mean_drop)).unwrap_or_default(),
            step.map(|s| num(s.se)).unwrap_or_default(),
            step.map(|s| s.increase.to_string()).unwrap_or_default(),
            rec.replicates().to_string(),
            study_seed.0.to_string(),
        ]);
    }
    Ok(Produced { tables: vec![(String::new(), table)], counts, status: if failed { 2 } else { 0 } })
}

/// Worst of two statuses: input error, then violation, then inconclusive.
pub fn worst(a: i32, b: i32) -> i32 {
    let rank = |s: i32| match s {
        1 => 3,
        2 => 2,
        3 => 1,
        _ => 0,
    };
    if rank(a) >= rank(b) {
        a
    } else {
        b
    }
}

fn sweep(loaded: &LoadedConfig, opts: &RunOptions, seed: u64, name: &str, started: Instant) -> Result<RunSummary> {
    let s = section(&loaded.config.sweep, "sweep")?;
    config::non_empty(&s.runs, "sweep.runs")?;
    let mut table = Table::new(
        "sweep",
        &["run", "config", "kind", "name", "status", "rows", "holds", "violated", "inconclusive", "error"],
    );
    let mut status = 0;
    let mut counts = Counts::default();
    let mut outputs = Vec::new();
    for (i, path) in s.runs.iter().enumerate() {
        let full = loaded.base.join(path);
        // a child keeps its own seed; otherwise it gets one derived from the sweep
        let result = config::load(&full).and_then(|child| {
            let kind = child.config.kind.ok_or_else(|| anyhow!("{}: `kind` is required in a sweep", full.display()))?;
            ensure!(kind != Kind::Sweep, "{}: nested sweeps are not allowed", full.display());
            let child_seed = child.config.seed.unwrap_or_else(|| row_seed(seed, i).0);
            run(kind, &child, &RunOptions { seed: Some(child_seed), ..opts.clone() })
        });
        match result {
            Ok(sum) => {
                status = worst(status, sum.status);
                counts.merge(&sum.counts);
                table.push(vec![
                    i.to_string(),
                    path.display().to_string(),
                    sum.kind.name().into(),
                    sum.name.clone(),
                    sum.status.to_string(),
                    sum.counts.rows.to_string(),
                    sum.counts.holds.to_string(),
                    sum.counts.violated.to_string(),
                    sum.counts.inconclusive.to_string(),
                    String::new(),
                ]);
                outputs.extend(sum.outputs);
            }
            Err(e) => {
                eprintln!("error: sweep run {i}: {e:#}");
                status = worst(status, 1);
                let mut row = vec![i.to_string(), path.display().to_string()];
                row.extend(std::iter::repeat_n(String::new(), 7));
                row.push(format!("{e:#}"));
                table.push(row);
            }
        }
    }
    let csv = opts.out.join(format!("{name}.csv"));
    table.write(&csv)?;
    outputs.push(csv);
    let echo = echo_config(&loaded.config, Kind::Sweep, seed, &loaded.base);
    let manifest_path = opts.out.join(format!("{name}.manifest.json"));
    write_manifest(
        &manifest_path,
        &Manifest {
            tool: "kolmo",
            version: env!("CARGO_PKG_VERSION"),
            schema: crate::output::SCHEMA,
            kind: Kind::Sweep.name(),
            config: &echo,
            seed,
            workers: opts.workers,
            wall_time_s: started.elapsed().as_secs_f64(),
            outputs: outputs.clone(),
            counts,
            status,
        },
    )?;
    outputs.push(manifest_path);
    Ok(RunSummary { name: name.into(), kind: Kind::Sweep, status, counts, outputs })
}
