//! Wang–Harnack and reverse log-Sobolev checks.

use super::report::{InequalityReport, Scale, Side};
use super::semigroup::{mc_moments, quadrature_pair, split, Diffusion, McOptions, Method, Observable};
use crate::bounds::{wang_constant_general, wang_constant_kolmogorov};
use crate::drift::DriftState;
use crate::error::{ensure, ensure_time, Error, Result};
use crate::gauss::KolmogorovState;
use crate::stats::{z_two_sided, MultiMoments};
use std::cell::Cell;

/// Central-difference step for gradients of quadrature values.
pub const RLSI_QUAD_STEP: f64 = 1e-4;
/// Base step for gradients of Monte Carlo values (common random numbers).
pub const RLSI_MC_STEP: f64 = 1e-2;

fn fmt_state(x: &DriftState) -> String {
    let join = |v: &[f64]| v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ");
    format!("({} | {})", join(&x.p), join(&x.xi))
}

fn method_label(method: &Method) -> &'static str {
    match method {
        Method::Quadrature => "quadrature",
        Method::MonteCarlo(_) => "mc",
    }
}

fn quad_err(fine: f64, coarse: f64) -> f64 {
    (fine - coarse).abs().max(4.0 * f64::EPSILON * fine.abs())
}

fn standard_state(x: &DriftState) -> Result<KolmogorovState> {
    KolmogorovState::new(x.p.clone(), x.xi.clone())
}

/// Checks `(P_t f)^α(x) ≤ C · P_t f^α(x′)` in log scale.
pub fn check_wang(
    f: Observable,
    alpha: f64,
    t: f64,
    x: &DriftState,
    y: &DriftState,
    diffusion: &Diffusion,
    method: &Method,
) -> Result<InequalityReport> {
    ensure_time(t)?;
    ensure(alpha.is_finite() && alpha > 1.0, || format!("α must exceed 1, got {alpha}"))?;
    ensure(x.p.len() == y.p.len() && x.xi.len() == y.xi.len(), || {
        "both points must have the same dimensions".into()
    })?;
    let constant = match diffusion {
        Diffusion::Standard => wang_constant_kolmogorov(alpha, t, &standard_state(x)?, &standard_state(y)?)?,
        Diffusion::Generalized(drift) => wang_constant_general(alpha, t, x, y, drift)?,
    };
    let log_c = constant.log_value();
    let negative = |v: f64| {
        Error::InvalidInput(format!("test function takes the negative value {v}; it must be nonnegative"))
    };
    let (lhs, rhs, samples, seed) = match method {
        Method::Quadrature => {
            if matches!(diffusion, Diffusion::Generalized(_)) {
                return Err(Error::Unsupported(
                    "quadrature needs the explicit kernel of the standard diffusion".into(),
                ));
            }
            let worst = Cell::new(0.0f64);
            let g = |p: f64, xi: f64| {
                let v = f(&[p], &[xi]);
                worst.set(worst.get().min(v));
                v
            };
            let (pf, pfc) = quadrature_pair(t, x, &g)?;
            let (pa, pac) = quadrature_pair(t, y, &|p, xi| g(p, xi).max(0.0).powf(alpha))?;
            if worst.get() < 0.0 {
                return Err(negative(worst.get()));
            }
            let lhs = log_side(pf, quad_err(pf, pfc)).scaled(alpha);
            let rhs = log_side(pa, quad_err(pa, pac)).shifted(log_c);
            (lhs, rhs, 0, None)
        }
        Method::MonteCarlo(opts) => {
            let (d, r) = (x.p.len(), x.xi.len());
            let starts = [x.clone(), y.clone()];
            let mm = mc_moments(diffusion, t, &starts, opts, 3, &|row, out| {
                let (p, xi) = split(row, d, r, 0);
                let v = f(p, xi);
                let (p, xi) = split(row, d, r, 1);
                let w = f(p, xi);
                out[0] = v;
                out[1] = w.max(0.0).powf(alpha);
                out[2] = if v < 0.0 || w < 0.0 { 1.0 } else { 0.0 };
            })?;
            if mm.mean[2] > 0.0 {
                return Err(Error::InvalidInput(
                    "test function takes negative values at sampled points; it must be nonnegative".into(),
                ));
            }
            let z = z_two_sided(opts.confidence);
            let lhs = log_side(mm.mean[0], z * mm.mean_se(0)).scaled(alpha);
            let rhs = log_side(mm.mean[1], z * mm.mean_se(1)).shifted(log_c);
            (lhs, rhs, opts.samples as u64, Some(opts.seed.0))
        }
    };
    Ok(InequalityReport::new("wang", Scale::Log, lhs, rhs)
        .with_samples(samples, seed)
        .param("alpha", alpha)
        .param("t", t)
        .param("x", fmt_state(x))
        .param("y", fmt_state(y))
        .param("diffusion", diffusion.label())
        .param("method", method_label(method))
        .param("constant_log", log_c))
}

fn log_side(value: f64, err: f64) -> Side {
    let ln = |v: f64| if v > 0.0 { v.ln() } else { f64::NEG_INFINITY };
    Side { value: ln(value), lo: ln(value - err), hi: ln(value + err) }
}

/// The gradient side as a quadratic form `vᵀQv` in
/// `v = (∂_p ln P_t f, ∂_ξ ln P_t f)` together with the entropy coefficient.
struct RlsiForm {
    d: usize,
    r: usize,
    q: Vec<f64>,
    /// `rhs = coef · Ent / P_t f`.
    coef: f64,
    label: &'static str,
}

impl RlsiForm {
    fn new(diffusion: &Diffusion, t: f64, d: usize, r: usize) -> Result<Self> {
        let n = d + r;
        let mut form = RlsiForm { d, r, q: vec![0.0; n * n], coef: 0.0, label: "" };
        match diffusion {
            Diffusion::Standard => {
                ensure(d == r, || "standard diffusion needs matching p and xi dimensions".into())?;
                for i in 0..d {
                    form.add_square(&[(i, 1.0), (d + i, -0.5 * t)]);
                    form.add_square(&[(d + i, t / 12f64.sqrt())]);
                }
                form.coef = 2.0 / t;
                form.label = "2/(tP)";
            }
            Diffusion::Generalized(drift) => {
                let spec = drift.spec();
                if r != 1 || spec.components.len() != 1 {
                    return Err(Error::Unsupported(
                        "the log-Sobolev check for generalized drifts needs one scalar component".into(),
                    ));
                }
                ensure(d == spec.input_dim, || format!("point must have {} positions", spec.input_dim))?;
                let (m, big) = (spec.components[0].lower, spec.components[0].upper);
                for i in 0..d {
                    form.add_square(&[(i, 1.0), (d, -0.5 * m * t)]);
                }
                form.add_square(&[(d, m * t / 12f64.sqrt())]);
                form.coef = big / (m * t);
                form.label = "M/(mtP)";
            }
        }
        Ok(form)
    }

    fn add_square(&mut self, u: &[(usize, f64)]) {
        let n = self.d + self.r;
        for &(i, a) in u {
            for &(j, b) in u {
                self.q[i * n + j] += a * b;
            }
        }
    }

    fn value(&self, v: &[f64]) -> f64 {
        let n = v.len();
        (0..n).map(|i| (0..n).map(|j| v[i] * self.q[i * n + j] * v[j]).sum::<f64>()).sum()
    }

    /// Exact bound on `|vᵀQv − wᵀQw|` over `|w_i − v_i| ≤ e_i`.
    fn spread(&self, v: &[f64], e: &[f64]) -> f64 {
        let n = v.len();
        let mut s = 0.0;
        for i in 0..n {
            let g: f64 = (0..n).map(|j| 2.0 * self.q[i * n + j] * v[j]).sum();
            s += g.abs() * e[i];
            for j in 0..n {
                s += self.q[i * n + j].abs() * e[i] * e[j];
            }
        }
        s
    }
}

fn shifted_start(x: &DriftState, coord: usize, delta: f64) -> DriftState {
    let mut s = x.clone();
    let d = s.p.len();
    if coord < d {
        s.p[coord] += delta;
    } else {
        s.xi[coord - d] += delta;
    }
    s
}

fn rlsi_report(
    form: &RlsiForm,
    lhs: Side,
    rhs: Side,
    t: f64,
    x: &DriftState,
    diffusion: &Diffusion,
    method: &Method,
) -> InequalityReport {
    let lhs = Side { lo: lhs.lo.max(0.0), ..lhs };
    let rhs = Side { lo: rhs.lo.max(0.0), ..rhs };
    InequalityReport::new("rlsi", Scale::Linear, lhs, rhs)
        .param("t", t)
        .param("x", fmt_state(x))
        .param("diffusion", diffusion.label())
        .param("method", method_label(method))
        .param("entropy_factor", form.label)
}

/// Checks the reverse log-Sobolev inequality
/// `Σ(∂_p ln P_tf − (m/2)t ∂_ξ ln P_tf)² + (m²t²/12)(∂_ξ ln P_tf)² ≤ c/(P_tf) · Ent`
/// in linear scale. Both sides carry their numerical error budget: quadrature
/// and finite-difference error for the quadrature method, a delta-method
/// interval plus a step-halving bias estimate for Monte Carlo.
pub fn check_rlsi(
    f: Observable,
    t: f64,
    x: &DriftState,
    diffusion: &Diffusion,
    method: &Method,
) -> Result<InequalityReport> {
    ensure_time(t)?;
    let (d, r) = (x.p.len(), x.xi.len());
    let form = RlsiForm::new(diffusion, t, d, r)?;
    match method {
        Method::Quadrature => {
            if matches!(diffusion, Diffusion::Generalized(_)) {
                return Err(Error::Unsupported(
                    "quadrature needs the explicit kernel of the standard diffusion".into(),
                ));
            }
            let (lhs, rhs) = rlsi_quadrature(f, t, x, &form)?;
            Ok(rlsi_report(&form, lhs, rhs, t, x, diffusion, method))
        }
        Method::MonteCarlo(opts) => {
            let (lhs, rhs) = rlsi_mc(f, t, x, &form, diffusion, opts)?;
            Ok(rlsi_report(&form, lhs, rhs, t, x, diffusion, method)
                .with_samples(opts.samples as u64, Some(opts.seed.0)))
        }
    }
}

fn non_positive(v: f64) -> Error {
    Error::InvalidInput(format!("test function takes the value {v}; it must be strictly positive"))
}

fn rlsi_quadrature(f: Observable, t: f64, x: &DriftState, form: &RlsiForm) -> Result<(Side, Side)> {
    let worst = Cell::new(f64::INFINITY);
    let g = |p: f64, xi: f64| {
        let v = f(&[p], &[xi]);
        worst.set(worst.get().min(v));
        v
    };
    let (p0, p0c) = quadrature_pair(t, x, &g)?;
    let p0_err = quad_err(p0, p0c);
    let n = form.d + form.r;
    let mut v = vec![0.0; n];
    let mut e = vec![0.0; n];
    let h = RLSI_QUAD_STEP;
    for (c, (vc, ec)) in v.iter_mut().zip(e.iter_mut()).enumerate() {
        let diff = |s: f64| -> Result<(f64, f64)> {
            let (up, upc) = quadrature_pair(t, &shifted_start(x, c, s), &g)?;
            let (dn, dnc) = quadrature_pair(t, &shifted_start(x, c, -s), &g)?;
            Ok((up - dn, (up - dn) - (upc - dnc)))
        };
        let (d1, d1_err) = diff(h)?;
        let (d2, _) = diff(2.0 * h)?;
        let g1 = d1 / (2.0 * h * p0);
        let g2 = d2 / (4.0 * h * p0);
        *vc = g1;
        // the h/2h gap also absorbs rounding noise in the differences
        *ec = (g1 - g2).abs() + d1_err.abs() / (2.0 * h * p0) + g1.abs() * p0_err / p0;
    }
    // Bregman form: nonnegative integrand, no 0·ln 0
    let bregman = |p: f64, xi: f64| {
        let v = g(p, xi);
        if v > 0.0 {
            v * (v / p0).ln() - v + p0
        } else {
            p0
        }
    };
    let (ent, entc) = quadrature_pair(t, x, &bregman)?;
    if worst.get() <= 0.0 {
        return Err(non_positive(worst.get()));
    }
    let ent_err = quad_err(ent, entc) + 8.0 * f64::EPSILON * p0;
    let lhs_v = form.value(&v);
    let lhs_e = form.spread(&v, &e);
    let rhs_v = form.coef * ent / p0;
    let rhs_e = form.coef * (ent_err / p0 + ent.abs() * p0_err / (p0 * (p0 - p0_err).max(f64::MIN_POSITIVE)));
    Ok((
        Side { value: lhs_v, lo: lhs_v - lhs_e, hi: lhs_v + lhs_e },
        Side { value: rhs_v, lo: rhs_v - rhs_e, hi: rhs_v + rhs_e },
    ))
}

/// `(value, standard error)` of `g(mean)` by the delta method.
fn delta_method(mm: &MultiMoments, g: &dyn Fn(&[f64]) -> f64) -> (f64, f64) {
    let k = mm.dim();
    let mu = mm.mean.clone();
    let value = g(&mu);
    let mut grad = vec![0.0; k];
    let mut w = mu.clone();
    for i in 0..k {
        let s = 1e-6 * mu[i].abs().max(1e-3);
        w[i] = mu[i] + s;
        let up = g(&w);
        w[i] = mu[i] - s;
        let dn = g(&w);
        w[i] = mu[i];
        grad[i] = (up - dn) / (2.0 * s);
    }
    let mut var = 0.0;
    for i in 0..k {
        for j in 0..k {
            var += grad[i] * grad[j] * mm.covariance(i, j);
        }
    }
    (value, (var.max(0.0) / mm.count as f64).sqrt())
}

fn rlsi_mc(
    f: Observable,
    t: f64,
    x: &DriftState,
    form: &RlsiForm,
    diffusion: &Diffusion,
    opts: &McOptions,
) -> Result<(Side, Side)> {
    let (d, r) = (form.d, form.r);
    let n = d + r;
    // starts: x, then x ± h e_c and x ± 2h e_c for every coordinate
    let mut starts = vec![x.clone()];
    let mut steps = Vec::with_capacity(n);
    for c in 0..n {
        let base = if c < d { x.p[c] } else { x.xi[c - d] };
        let h = RLSI_MC_STEP * (1.0 + base.abs());
        steps.push(h);
        for s in [h, -h, 2.0 * h, -2.0 * h] {
            starts.push(shifted_start(x, c, s));
        }
    }
    // observables: f(x), f ln f(x), then per coordinate the h and 2h differences
    let k = 2 + 2 * n + 1;
    let mm = mc_moments(diffusion, t, &starts, opts, k, &|row, out| {
        let val = |i: usize| {
            let (p, xi) = split(row, d, r, i);
            f(p, xi)
        };
        let v0 = val(0);
        let mut bad = v0 <= 0.0;
        out[0] = v0;
        out[1] = if v0 > 0.0 { v0 * v0.ln() } else { 0.0 };
        for c in 0..n {
            let o = 1 + 4 * c;
            let (a, b, a2, b2) = (val(o), val(o + 1), val(o + 2), val(o + 3));
            bad |= a <= 0.0 || b <= 0.0 || a2 <= 0.0 || b2 <= 0.0;
            out[2 + 2 * c] = a - b;
            out[3 + 2 * c] = a2 - b2;
        }
        out[k - 1] = if bad { 1.0 } else { 0.0 };
    })?;
    if mm.mean[k - 1] > 0.0 {
        return Err(Error::InvalidInput(
            "test function is not strictly positive at sampled points".into(),
        ));
    }
    let grads = |mu: &[f64], level: usize| -> Vec<f64> {
        (0..n)
            .map(|c| {
                let h = steps[c] * (1 + level) as f64;
                mu[2 + 2 * c + level] / (2.0 * h * mu[0])
            })
            .collect()
    };
    let z = z_two_sided(opts.confidence);
    let (lhs_v, lhs_se) = delta_method(&mm, &|mu| form.value(&grads(mu, 0)));
    let bias = {
        let (g1, g2) = (grads(&mm.mean, 0), grads(&mm.mean, 1));
        // the step-h error is a third of the h/2h gap for a second-order rule
        let e: Vec<f64> = g1.iter().zip(&g2).map(|(a, b)| (a - b).abs() / 3.0).collect();
        form.spread(&g1, &e)
    };
    let coef = form.coef;
    let (rhs_v, rhs_se) = delta_method(&mm, &|mu| coef * (mu[1] - mu[0] * mu[0].ln()) / mu[0]);
    let lhs_w = z * lhs_se + bias;
    let rhs_w = z * rhs_se;
    Ok((
        Side { value: lhs_v, lo: lhs_v - lhs_w, hi: lhs_v + lhs_w },
        Side { value: rhs_v, lo: rhs_v - rhs_w, hi: rhs_v + rhs_w },
    ))
}
