//! Finite-rank approximation studies: sup-over-time distance between a
//! process and its rank-`n` approximant, both driven by the same path.

use crate::drift::{Target, ValidatedDrift};
use crate::error::{ensure, Error, Result};
use crate::rng::{map_blocks, Seed};
use crate::stats::{z_two_sided, Moments, Z99_ONE_SIDED};
use crate::wiener::{running_integral, sample_coordinates, IntegrationRule, TimeGrid, WienerSpaceModel};

#[derive(Debug, Clone)]
pub enum ConvergenceTarget {
    /// `X = (B, ∫B)` against `(P_n B, ∫P_n B)` in `W × W`.
    StandardX,
    /// `Y = (B, ∫F(B))` against `(P_n B, ∫F(P_n B))` in `W × ℝ^r`.
    GeneralizedY(ValidatedDrift),
    /// Sequence-valued drift against `(P_n B, ∫Q_n F(P_n B))` with `Q_n = P_n`,
    /// in `W × W`.
    SequenceY(ValidatedDrift),
}

impl ConvergenceTarget {
    pub fn label(&self) -> String {
        match self {
            ConvergenceTarget::StandardX => "standard-x".into(),
            ConvergenceTarget::GeneralizedY(d) => format!("generalized-y:{}", d.spec().name),
            ConvergenceTarget::SequenceY(d) => format!("sequence-y:{}", d.spec().name),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub n: usize,
    /// Mean over replicates of the sup-over-grid error.
    pub mean: f64,
    pub se: f64,
    pub max: f64,
    /// Mean squared error and its standard error.
    pub mean_sq: f64,
    pub se_sq: f64,
    /// `T · Σ_{i≥n} λ_i`.
    pub envelope: f64,
    /// Per-replicate errors, in replicate order.
    pub errors: Vec<f64>,
}

impl ConvergenceRecord {
    pub fn replicates(&self) -> usize {
        self.errors.len()
    }
}

/// `max_k sqrt(Σ_i wp_i Δp_i(t_k)² + Σ_j wx_j Δξ_j(t_k)²)`, accumulated in index
/// order so that identical inputs give identical bits.
fn sup_error(dp: &[Vec<f64>], wp: &[f64], dxi: &[Vec<f64>], wx: &[f64], steps: usize) -> f64 {
    let mut sup = 0.0f64;
    for k in 0..steps {
        let mut s = 0.0;
        for (c, w) in dp.iter().zip(wp) {
            s += w * c[k] * c[k];
        }
        for (c, w) in dxi.iter().zip(wx) {
            s += w * c[k] * c[k];
        }
        sup = sup.max(s.sqrt());
    }
    sup
}

/// Per-rank errors of one replicate.
fn replicate_errors(
    model: &WienerSpaceModel,
    target: &ConvergenceTarget,
    ranks: &[usize],
    grid: &TimeGrid,
    seed: Seed,
) -> Vec<f64> {
    let big_n = model.truncation_dim();
    let times = grid.times();
    let steps = grid.len();
    let path = sample_coordinates(big_n, grid, seed);
    let lambda = model.weights();
    let rule = IntegrationRule::Trapezoid;
    let zero = vec![0.0; steps];

    let dp_for = |n: usize| -> Vec<Vec<f64>> {
        (0..big_n).map(|i| if i < n { zero.clone() } else { path.values[i].clone() }).collect()
    };

    match target {
        ConvergenceTarget::StandardX => {
            let integrals: Vec<Vec<f64>> =
                path.values.iter().map(|c| running_integral(c, times, rule)).collect();
            ranks
                .iter()
                .map(|&n| {
                    let dxi: Vec<Vec<f64>> =
                        (0..big_n).map(|i| if i < n { zero.clone() } else { integrals[i].clone() }).collect();
                    sup_error(&dp_for(n), lambda, &dxi, lambda, steps)
                })
                .collect()
        }
        ConvergenceTarget::GeneralizedY(drift) | ConvergenceTarget::SequenceY(drift) => {
            let spec = drift.spec();
            let (d, r) = (spec.input_dim, spec.output_dim());
            let sequence = matches!(target, ConvergenceTarget::SequenceY(_));
            let drift_path = |n: usize| -> Vec<Vec<f64>> {
                let mut vals = vec![vec![0.0; steps]; r];
                let mut w = vec![0.0; d];
                let mut fv = vec![0.0; r];
                for k in 0..steps {
                    for (i, wi) in w.iter_mut().enumerate() {
                        *wi = if i < n { path.values[i][k] } else { 0.0 };
                    }
                    spec.eval_into(&w, &mut fv);
                    for j in 0..r {
                        vals[j][k] = fv[j];
                    }
                }
                vals.iter().map(|v| running_integral(v, times, rule)).collect()
            };
            let reference = drift_path(big_n);
            let wx: Vec<f64> = if sequence { lambda[..r].to_vec() } else { vec![1.0; r] };
            ranks
                .iter()
                .map(|&n| {
                    let approx = drift_path(n);
                    let dxi: Vec<Vec<f64>> = (0..r)
                        .map(|j| {
                            if sequence && j >= n {
                                reference[j].clone()
                            } else {
                                reference[j].iter().zip(&approx[j]).map(|(a, b)| a - b).collect()
                            }
                        })
                        .collect();
                    sup_error(&dp_for(n), lambda, &dxi, &wx, steps)
                })
                .collect()
        }
    }
}

/// Coupled convergence study: every rank of a replicate sees the same path,
/// and replicate `i` uses `seed.derive(i)`.
pub fn convergence_study(
    model: &WienerSpaceModel,
    target: &ConvergenceTarget,
    ranks: &[usize],
    grid: &TimeGrid,
    replicates: usize,
    seed: Seed,
) -> Result<Vec<ConvergenceRecord>> {
    let big_n = model.truncation_dim();
    ensure(!ranks.is_empty(), || "rank list is empty".into())?;
    ensure(ranks.windows(2).all(|w| w[0] < w[1]), || "ranks must be strictly increasing".into())?;
    ensure(ranks[0] >= 1, || "ranks must be positive".into())?;
    if let Some(&n) = ranks.iter().find(|&&n| n > big_n) {
        return Err(Error::InvalidInput(format!("rank {n} exceeds truncation dimension {big_n}")));
    }
    ensure(replicates >= 2, || "need at least two replicates".into())?;
    ensure(grid.len() >= 2, || "grid needs at least two points".into())?;
    if let ConvergenceTarget::GeneralizedY(d) | ConvergenceTarget::SequenceY(d) = target {
        let spec = d.spec();
        ensure(spec.input_dim == big_n, || {
            format!("drift reads {} coordinates; the model materializes {big_n}", spec.input_dim)
        })?;
        if matches!(target, ConvergenceTarget::SequenceY(_)) {
            ensure(spec.target == Target::Sequence && spec.output_dim() <= big_n, || {
                "sequence target needs a sequence-valued drift".into()
            })?;
        }
    }
    let per_rep = map_blocks(replicates, 1, |b, _| replicate_errors(model, target, ranks, grid, seed.derive(b as u64)));
    let horizon = grid.horizon();
    Ok(ranks
        .iter()
        .enumerate()
        .map(|(ri, &n)| {
            let errors: Vec<f64> = per_rep.iter().map(|e| e[ri]).collect();
            let m = Moments::from_slice(&errors);
            let sq: Vec<f64> = errors.iter().map(|e| e * e).collect();
            let msq = Moments::from_slice(&sq);
            ConvergenceRecord {
                n,
                mean: m.mean,
                se: m.std_error(),
                max: errors.iter().copied().fold(0.0, f64::max),
                mean_sq: msq.mean,
                se_sq: msq.std_error(),
                envelope: horizon * model.tail_sum(n),
                errors,
            }
        })
        .collect())
}

/// One paired comparison between consecutive ranks.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendStep {
    pub n: usize,
    pub next: usize,
    /// Mean of `error(n) − error(next)` over replicates.
    pub mean_drop: f64,
    pub se: f64,
    /// True when the error increase is significant at the test level.
    pub increase: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendOutcome {
    pub steps: Vec<TrendStep>,
    pub pass: bool,
}

/// Paired one-sided test between consecutive ranks: the study fails if any
/// step shows a significant mean increase of the error (99% by default).
pub fn monotone_trend_test(records: &[ConvergenceRecord], confidence: Option<f64>) -> TrendOutcome {
    let z = match confidence {
        None => Z99_ONE_SIDED,
        // one-sided level `c` is the two-sided level `2c − 1`
        Some(c) => z_two_sided(2.0 * c - 1.0),
    };
    let steps: Vec<TrendStep> = records
        .windows(2)
        .map(|w| {
            let diffs: Vec<f64> = w[0].errors.iter().zip(&w[1].errors).map(|(a, b)| a - b).collect();
            let m = Moments::from_slice(&diffs);
            let se = m.std_error();
            TrendStep { n: w[0].n, next: w[1].n, mean_drop: m.mean, se, increase: m.mean < -z * se }
        })
        .collect();
    let pass = steps.iter().all(|s| !s.increase);
    TrendOutcome { steps, pass }
}

/// `mean_sq / envelope` per rank with a positive envelope, and whether it lies
/// within `[1/factor, factor]`.
pub fn envelope_ratios(records: &[ConvergenceRecord], factor: f64) -> Vec<(usize, f64, bool)> {
    records
        .iter()
        .filter(|r| r.envelope > 0.0)
        .map(|r| {
            let ratio = r.mean_sq / r.envelope;
            (r.n, ratio, ratio <= factor && ratio >= 1.0 / factor)
        })
        .collect()
}
