//! Estimators of `P_t f(x) = E[f(Z_t) | Z_0 = x]` for the standard and the
//! generalized diffusion.

use crate::drift::{map_endpoint_blocks, DriftState, EndpointOptions, ValidatedDrift};
use crate::error::{ensure, ensure_time, Error, Result};
use crate::gauss::{cholesky, map_exact_blocks, KolmogorovState};
use crate::quad::StdNormalRule;
use crate::rng::{pairwise_reduce, Seed};
use crate::stats::{Estimate, MultiMoments};
use std::sync::OnceLock;

pub type Observable<'a> = &'a (dyn Fn(&[f64], &[f64]) -> f64 + Sync);

#[derive(Debug, Clone)]
pub enum Diffusion {
    /// `(B_t, ∫B)` in `ℝ^d × ℝ^d`.
    Standard,
    Generalized(ValidatedDrift),
}

impl Diffusion {
    pub fn label(&self) -> String {
        match self {
            Diffusion::Standard => "standard".into(),
            Diffusion::Generalized(d) => d.spec().name.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    pub samples: usize,
    pub seed: Seed,
    /// Time steps for generalized-path integration.
    pub steps: usize,
    pub antithetic: bool,
    pub confidence: f64,
}

impl McOptions {
    pub fn new(samples: usize, seed: Seed) -> Self {
        McOptions { samples, seed, steps: 64, antithetic: false, confidence: 0.99 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    MonteCarlo(McOptions),
    /// Tensor Gauss–Legendre quadrature against the explicit kernel (standard
    /// diffusion, `d = 1`).
    Quadrature,
}

/// Absolute tolerance targeted by the quadrature method.
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;

fn rules() -> &'static (StdNormalRule, StdNormalRule) {
    static RULES: OnceLock<(StdNormalRule, StdNormalRule)> = OnceLock::new();
    RULES.get_or_init(|| (StdNormalRule::fine(), StdNormalRule::coarse()))
}

/// Fine and coarse quadrature values of `E[g(X_t^x)]` for the standard
/// diffusion with `d = 1`.
pub fn quadrature_pair(t: f64, x: &DriftState, g: &dyn Fn(f64, f64) -> f64) -> Result<(f64, f64)> {
    ensure_time(t)?;
    if x.p.len() != 1 || x.xi.len() != 1 {
        return Err(Error::Unsupported("quadrature is implemented for d = 1 only".into()));
    }
    let (l11, l21, l22) = cholesky(t);
    let (p0, m) = (x.p[0], x.xi[0] + t * x.p[0]);
    let h = |z1: f64, z2: f64| g(p0 + l11 * z1, m + l21 * z1 + l22 * z2);
    let (fine, coarse) = rules();
    Ok((fine.expect_2d(&h), coarse.expect_2d(&h)))
}

pub(crate) fn quadrature_estimate(t: f64, x: &DriftState, f: Observable) -> Result<Estimate> {
    let (fine, coarse) = quadrature_pair(t, x, &|p, xi| f(&[p], &[xi]))?;
    ensure(fine.is_finite(), || "quadrature produced a non-finite value".into())?;
    let err = (fine - coarse).abs().max(4.0 * f64::EPSILON * fine.abs());
    Ok(Estimate::with_tolerance(fine, err))
}

/// Position and integrated block of start `i` inside a multi-start row.
pub(crate) fn split(row: &[f64], d: usize, r: usize, i: usize) -> (&[f64], &[f64]) {
    let o = i * (d + r);
    (&row[o..o + d], &row[o + d..o + d + r])
}

/// Joint moments of `k` observables of the terminal values started from every
/// point of `starts` with common random numbers. `obs` receives one row, the
/// concatenation over starts of `[p, ξ]` (see [`split`]). With antithetic
/// sampling each observation is the average over a mirrored pair.
pub(crate) fn mc_moments(
    diffusion: &Diffusion,
    t: f64,
    starts: &[DriftState],
    opts: &McOptions,
    k: usize,
    obs: &(dyn Fn(&[f64], &mut [f64]) + Sync),
) -> Result<MultiMoments> {
    ensure_time(t)?;
    ensure(!starts.is_empty(), || "need at least one start".into())?;
    ensure(opts.samples >= 2, || "need at least two Monte Carlo samples".into())?;
    ensure(!opts.antithetic || opts.samples % 2 == 0, || {
        "antithetic sampling needs an even sample count".into()
    })?;
    let push_pair = |mm: &mut MultiMoments, a: &mut [f64], b: &mut [f64], r1: &[f64], r2: &[f64]| {
        obs(r1, a);
        obs(r2, b);
        for j in 0..k {
            a[j] = 0.5 * (a[j] + b[j]);
        }
        mm.push(a);
    };
    let parts = match diffusion {
        Diffusion::Standard => {
            let d = starts[0].p.len();
            for s in starts {
                ensure(s.p.len() == d && s.xi.len() == d, || {
                    "standard diffusion starts need matching p and xi dimensions".into()
                })?;
            }
            let width = 2 * d * starts.len();
            // X^x = X^0 + (p, ξ + t p) for every start x.
            let means: Vec<f64> = starts
                .iter()
                .flat_map(|s| {
                    let xi: Vec<f64> = (0..d).map(|i| s.xi[i] + t * s.p[i]).collect();
                    s.p.iter().copied().chain(xi).collect::<Vec<_>>()
                })
                .collect();
            let fill = |base: &[f64], sign: f64, row: &mut [f64]| {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = means[j] + sign * base[j % (2 * d)];
                }
            };
            let n = if opts.antithetic { opts.samples / 2 } else { opts.samples };
            let zero = KolmogorovState::zeros(d);
            map_exact_blocks(t, &zero, n, opts.seed, |s| {
                let mut mm = MultiMoments::new(k);
                let (mut a, mut b) = (vec![0.0; k], vec![0.0; k]);
                let (mut r1, mut r2) = (vec![0.0; width], vec![0.0; width]);
                for base in s.data.chunks(2 * d) {
                    fill(base, 1.0, &mut r1);
                    if opts.antithetic {
                        fill(base, -1.0, &mut r2);
                        push_pair(&mut mm, &mut a, &mut b, &r1, &r2);
                    } else {
                        obs(&r1, &mut a);
                        mm.push(&a);
                    }
                }
                mm
            })?
        }
        Diffusion::Generalized(drift) => {
            let eo = EndpointOptions { steps: opts.steps, antithetic: opts.antithetic };
            map_endpoint_blocks(drift, starts, t, opts.samples, opts.seed, eo, |rows, width| {
                let mut mm = MultiMoments::new(k);
                let (mut a, mut b) = (vec![0.0; k], vec![0.0; k]);
                if opts.antithetic {
                    for pair in rows.chunks(2 * width) {
                        push_pair(&mut mm, &mut a, &mut b, &pair[..width], &pair[width..]);
                    }
                } else {
                    for r in rows.chunks(width) {
                        obs(r, &mut a);
                        mm.push(&a);
                    }
                }
                mm
            })?
        }
    };
    Ok(pairwise_reduce(parts, |a, b| a.merge(b)).expect("at least one block"))
}

pub fn estimate_semigroup(
    f: Observable,
    t: f64,
    x: &DriftState,
    method: &Method,
    diffusion: &Diffusion,
) -> Result<Estimate> {
    match method {
        Method::Quadrature => match diffusion {
            Diffusion::Standard => quadrature_estimate(t, x, f),
            Diffusion::Generalized(_) => Err(Error::Unsupported(
                "quadrature needs the explicit kernel of the standard diffusion".into(),
            )),
        },
        Method::MonteCarlo(opts) => {
            let (d, r) = (x.p.len(), x.xi.len());
            let mm = mc_moments(diffusion, t, std::slice::from_ref(x), opts, 1, &|row, out| {
                let (p, xi) = split(row, d, r, 0);
                out[0] = f(p, xi)
            })?;
            let se = mm.mean_se(0);
            Ok(Estimate {
                value: mm.mean[0],
                se,
                half_width: crate::stats::z_two_sided(opts.confidence) * se,
                samples: opts.samples as u64,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin() -> DriftState {
        DriftState::zeros(1, 1)
    }

    #[test]
    fn constants_are_conserved() {
        let one = |_: &[f64], _: &[f64]| 1.0;
        let q = estimate_semigroup(&one, 1.0, &origin(), &Method::Quadrature, &Diffusion::Standard).unwrap();
        assert!((q.value - 1.0).abs() < 1e-14);
        let mc = estimate_semigroup(
            &one,
            1.0,
            &origin(),
            &Method::MonteCarlo(McOptions::new(1000, Seed(1))),
            &Diffusion::Standard,
        )
        .unwrap();
        assert_eq!(mc.value, 1.0);
    }

    #[test]
    fn second_moment_by_quadrature() {
        let f = |p: &[f64], xi: &[f64]| p[0] * p[0] + xi[0] * xi[0];
        let q = estimate_semigroup(&f, 1.0, &origin(), &Method::Quadrature, &Diffusion::Standard).unwrap();
        assert!((q.value - 4.0 / 3.0).abs() < 1e-12);
        assert!(q.half_width <= QUADRATURE_TOLERANCE);
    }

    #[test]
    fn mean_map() {
        let f = |_: &[f64], xi: &[f64]| xi[0];
        let x = DriftState { p: vec![0.7], xi: vec![-0.2] };
        let q = estimate_semigroup(&f, 1.0, &x, &Method::Quadrature, &Diffusion::Standard).unwrap();
        assert!((q.value - 0.5).abs() < 1e-12);
        let mut o = McOptions::new(20_000, Seed(4));
        o.antithetic = true;
        let mc = estimate_semigroup(&f, 1.0, &x, &Method::MonteCarlo(o), &Diffusion::Standard).unwrap();
        assert!((mc.value - 0.5).abs() < 1e-12, "antithetic mirror cancels linear terms");
    }

    #[test]
    fn quadrature_rejects_unsupported() {
        let f = |_: &[f64], _: &[f64]| 1.0;
        let x = DriftState::zeros(2, 2);
        assert!(estimate_semigroup(&f, 1.0, &x, &Method::Quadrature, &Diffusion::Standard).is_err());
    }
}
