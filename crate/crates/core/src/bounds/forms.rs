//! Twisted gradient forms `Γ^{α,β}`, their iterated form `Γ₂^{α,β}`, and the
//! associated control distance, on `ℝ^d × ℝ`.

use crate::error::{ensure, Error, Result};

/// Coefficient of `Δ_p` in the generator `c Δ_p + F(p) ∂_ξ` of the standard
/// normalization.
pub const HALF_LAPLACIAN: f64 = 0.5;

pub type ScalarFn<'a> = &'a (dyn Fn(&[f64], f64) -> f64 + Sync);
pub type DriftFn<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaForm {
    pub alpha: f64,
    pub beta: f64,
    pub dim: usize,
}

impl GammaForm {
    pub fn new(alpha: f64, beta: f64, dim: usize) -> Result<Self> {
        ensure(alpha >= 0.0 && beta >= 0.0, || format!("need α ≥ 0 and β ≥ 0, got ({alpha}, {beta})"))?;
        ensure(dim >= 1, || "dimension must be at least 1".into())?;
        Ok(GammaForm { alpha, beta, dim })
    }

    /// `Γ^{α,β}(f, g)` from the gradients `(∇_p f, ∂_ξ f)` and `(∇_p g, ∂_ξ g)`.
    pub fn bilinear(&self, df: &[f64], dg: &[f64]) -> f64 {
        let d = self.dim;
        let (fx, gx) = (df[d], dg[d]);
        let mut s = 0.0;
        for i in 0..d {
            s += (df[i] - self.alpha * fx) * (dg[i] - self.alpha * gx);
        }
        s + self.beta * fx * gx
    }
}

/// `d_{α,β}((p,ξ),(p',ξ'))² = (α Σ(p'_i − p_i) + ξ' − ξ)²/β + ‖p' − p‖²`.
pub fn control_distance(alpha: f64, beta: f64, x: (&[f64], f64), y: (&[f64], f64)) -> Result<f64> {
    ensure(beta > 0.0 && beta.is_finite(), || format!("β must be positive, got {beta}"))?;
    ensure(alpha >= 0.0, || format!("α must be non-negative, got {alpha}"))?;
    ensure(x.0.len() == y.0.len(), || "points must have equal dimension".into())?;
    let dp: Vec<f64> = x.0.iter().zip(y.0).map(|(a, b)| b - a).collect();
    let twisted = alpha * dp.iter().sum::<f64>() + (y.1 - x.1);
    let sq = twisted * twisted / beta + dp.iter().map(|v| v * v).sum::<f64>();
    Ok(sq.sqrt())
}

fn step(x: f64) -> f64 {
    1e-3 * (1.0 + x.abs())
}

/// Richardson-extrapolated central difference of `g` along one coordinate.
fn richardson(g: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    let h = step(x);
    let d1 = (g(x + h) - g(x - h)) / (2.0 * h);
    let d2 = (g(x + h / 2.0) - g(x - h / 2.0)) / h;
    (4.0 * d2 - d1) / 3.0
}

fn richardson2(g: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    let h = step(x);
    let g0 = g(x);
    let s1 = (g(x + h) - 2.0 * g0 + g(x - h)) / (h * h);
    let hh = h / 2.0;
    let s2 = (g(x + hh) - 2.0 * g0 + g(x - hh)) / (hh * hh);
    (4.0 * s2 - s1) / 3.0
}

/// `(∂_{p_1} f, …, ∂_{p_d} f, ∂_ξ f)` by extrapolated central differences.
pub fn gradient(f: &dyn Fn(&[f64], f64) -> f64, p: &[f64], xi: f64) -> Vec<f64> {
    let d = p.len();
    let mut out = Vec::with_capacity(d + 1);
    for i in 0..d {
        let g = |v: f64| {
            let mut q = p.to_vec();
            q[i] = v;
            f(&q, xi)
        };
        out.push(richardson(&g, p[i]));
    }
    out.push(richardson(&|v| f(p, v), xi));
    out
}

fn laplacian_p(f: &dyn Fn(&[f64], f64) -> f64, p: &[f64], xi: f64) -> f64 {
    (0..p.len())
        .map(|i| {
            let g = |v: f64| {
                let mut q = p.to_vec();
                q[i] = v;
                f(&q, xi)
            };
            richardson2(&g, p[i])
        })
        .sum()
}

/// `L f = c Δ_p f + F(p) ∂_ξ f` evaluated by finite differences.
pub fn generator(
    f: &dyn Fn(&[f64], f64) -> f64,
    drift: &dyn Fn(&[f64]) -> f64,
    scale: f64,
    p: &[f64],
    xi: f64,
) -> f64 {
    scale * laplacian_p(f, p, xi) + drift(p) * richardson(&|v| f(p, v), xi)
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what.into()))
    }
}

pub fn gamma_eval(form: &GammaForm, f: ScalarFn, p: &[f64], xi: f64) -> Result<f64> {
    ensure(p.len() == form.dim, || "point dimension differs from form".into())?;
    let g = gradient(f, p, xi);
    finite(form.bilinear(&g, &g), "Γ probe")
}

/// `Γ₂^{α,β}(f) = ½ L Γ^{α,β}(f) − Γ^{α,β}(f, L f)`, computed literally by
/// nesting finite differences.
pub fn gamma2_eval(
    form: &GammaForm,
    f: ScalarFn,
    drift: DriftFn,
    generator_scale: f64,
    p: &[f64],
    xi: f64,
) -> Result<f64> {
    ensure(p.len() == form.dim, || "point dimension differs from form".into())?;
    let gamma_f = |q: &[f64], x: f64| {
        let g = gradient(f, q, x);
        form.bilinear(&g, &g)
    };
    let lf = |q: &[f64], x: f64| generator(f, drift, generator_scale, q, x);
    let l_gamma = generator(&gamma_f, drift, generator_scale, p, xi);
    let df = gradient(f, p, xi);
    let dlf = gradient(&lf, p, xi);
    finite(0.5 * l_gamma - form.bilinear(&df, &dlf), "Γ₂ probe")
}
