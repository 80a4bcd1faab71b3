//! Exact Gaussian law of `X_t = (B_t, ∫_0^t B_s ds)`.
//!
//! Coordinates are independent; each carries the 2×2 covariance
//! `[[t, t²/2], [t²/2, t³/3]]`. A process started at `(p₀, ξ₀)` has mean
//! `(p₀, ξ₀ + t p₀)`.

use crate::error::{ensure, ensure_time, Result};
use crate::rng::{domain, map_blocks, Seed, BLOCK};
use rand_distr::{Distribution, StandardNormal};

const EXACT_DOMAIN: u64 = domain("gauss.exact");

/// `ln(√3/π)`.
const LOG_KERNEL_CONST: f64 = -0.595_423_741_515_345_3;

#[derive(Debug, Clone, PartialEq)]
pub struct KolmogorovState {
    pub p: Vec<f64>,
    pub xi: Vec<f64>,
}

impl KolmogorovState {
    pub fn new(p: Vec<f64>, xi: Vec<f64>) -> Result<Self> {
        ensure(!p.is_empty(), || "state dimension must be at least 1".into())?;
        ensure(p.len() == xi.len(), || {
            format!("p has length {} but xi has length {}", p.len(), xi.len())
        })?;
        ensure(p.iter().chain(&xi).all(|v| v.is_finite()), || "non-finite state".into())?;
        Ok(KolmogorovState { p, xi })
    }

    pub fn zeros(d: usize) -> Self {
        KolmogorovState { p: vec![0.0; d], xi: vec![0.0; d] }
    }

    pub fn scalar(p: f64, xi: f64) -> Self {
        KolmogorovState { p: vec![p], xi: vec![xi] }
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }
}

/// Shift `(h, k)` acting by `Φ_t(p, ξ) = (p + h, ξ + k + t h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftVector {
    pub h: Vec<f64>,
    pub k: Vec<f64>,
}

impl ShiftVector {
    pub fn new(h: Vec<f64>, k: Vec<f64>) -> Result<Self> {
        ensure(h.len() == k.len(), || "h and k must have equal length".into())?;
        ensure(h.iter().chain(&k).all(|v| v.is_finite()), || "non-finite shift".into())?;
        Ok(ShiftVector { h, k })
    }

    pub fn scalar(h: f64, k: f64) -> Self {
        ShiftVector { h: vec![h], k: vec![k] }
    }

    pub fn dim(&self) -> usize {
        self.h.len()
    }

    pub fn h_sq(&self) -> f64 {
        self.h.iter().map(|v| v * v).sum()
    }

    pub fn k_sq(&self) -> f64 {
        self.k.iter().map(|v| v * v).sum()
    }

    pub fn hk(&self) -> f64 {
        self.h.iter().zip(&self.k).map(|(a, b)| a * b).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.h.iter().chain(&self.k).all(|v| *v == 0.0)
    }

    pub fn apply(&self, t: f64, x: &KolmogorovState) -> Result<KolmogorovState> {
        ensure(x.dim() == self.dim(), || "shift and state dimensions differ".into())?;
        Ok(KolmogorovState {
            p: x.p.iter().zip(&self.h).map(|(p, h)| p + h).collect(),
            xi: (0..x.dim()).map(|i| x.xi[i] + self.k[i] + t * self.h[i]).collect(),
        })
    }

    pub fn as_start(&self) -> KolmogorovState {
        KolmogorovState { p: self.h.clone(), xi: self.k.clone() }
    }
}

/// Per-coordinate covariances between `(B_s, ∫_0^s B)` and `(B_t, ∫_0^t B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceBlock {
    pub s: f64,
    pub t: f64,
    /// `E[B_s B_t]`
    pub b_b: f64,
    /// `E[B_s ∫_0^t B]`
    pub b_int: f64,
    /// `E[∫_0^s B · B_t]`
    pub int_b: f64,
    /// `E[∫_0^s B ∫_0^t B]`
    pub int_int: f64,
}

/// `∫_0^t min(v, s) dv`.
fn min_integral(s: f64, t: f64) -> f64 {
    if t <= s {
        0.5 * t * t
    } else {
        s * t - 0.5 * s * s
    }
}

pub fn covariance(s: f64, t: f64) -> Result<CovarianceBlock> {
    ensure(s >= 0.0 && t >= 0.0 && s.is_finite() && t.is_finite(), || {
        format!("times must be non-negative, got s={s}, t={t}")
    })?;
    let (lo, hi) = (s.min(t), s.max(t));
    Ok(CovarianceBlock {
        s,
        t,
        b_b: lo,
        b_int: min_integral(s, t),
        int_b: min_integral(t, s),
        int_int: lo * lo * (3.0 * hi - lo) / 6.0,
    })
}

/// Equal-time covariance `[[t, t²/2], [t²/2, t³/3]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Marginal {
    pub var_b: f64,
    pub cov_b_int: f64,
    pub var_int: f64,
}

impl Marginal {
    pub fn at(t: f64) -> Self {
        Marginal { var_b: t, cov_b_int: 0.5 * t * t, var_int: t * t * t / 3.0 }
    }

    pub fn det(&self) -> f64 {
        self.var_b * self.var_int - self.cov_b_int * self.cov_b_int
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.var_b, self.cov_b_int], [self.cov_b_int, self.var_int]]
    }
}

/// Entries of the inverse covariance: `[[4/t, -6/t²], [-6/t², 12/t³]]`.
pub fn precision(t: f64) -> [[f64; 2]; 2] {
    [[4.0 / t, -6.0 / (t * t)], [-6.0 / (t * t), 12.0 / (t * t * t)]]
}

/// Lower Cholesky factor entries `(l11, l21, l22)`.
pub fn cholesky(t: f64) -> (f64, f64, f64) {
    let st = t.sqrt();
    (st, 0.5 * t * st, t * st / 12f64.sqrt())
}

/// `log p_t(start, end)`.
pub fn log_heat_kernel_density(
    t: f64,
    start: &KolmogorovState,
    end: &KolmogorovState,
) -> Result<f64> {
    ensure_time(t)?;
    ensure(start.dim() == end.dim(), || "start and end dimensions differ".into())?;
    let norm = LOG_KERNEL_CONST - 2.0 * t.ln();
    let mut total = 0.0;
    for i in 0..start.dim() {
        let dp = end.p[i] - start.p[i];
        let dx = end.xi[i] - start.xi[i] - t * start.p[i];
        total += norm - 2.0 * dp * dp / t + 6.0 * dp * dx / (t * t) - 6.0 * dx * dx / (t * t * t);
    }
    Ok(total)
}

pub fn heat_kernel_density(t: f64, start: &KolmogorovState, end: &KolmogorovState) -> Result<f64> {
    Ok(log_heat_kernel_density(t, start, end)?.exp())
}

/// Samples stored row-major: each row is `[p_1..p_d, ξ_1..ξ_d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KolmogorovSamples {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl KolmogorovSamples {
    pub fn len(&self) -> usize {
        self.data.len() / (2 * self.dim)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn p(&self, row: usize) -> &[f64] {
        let o = row * 2 * self.dim;
        &self.data[o..o + self.dim]
    }

    pub fn xi(&self, row: usize) -> &[f64] {
        let o = row * 2 * self.dim + self.dim;
        &self.data[o..o + self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[f64], &[f64])> {
        self.data.chunks(2 * self.dim).map(move |r| r.split_at(self.dim))
    }
}

fn fill_exact_block(
    t: f64,
    start: &KolmogorovState,
    rows: usize,
    seed: Seed,
    block: usize,
) -> Vec<f64> {
    let d = start.dim();
    let (l11, l21, l22) = cholesky(t);
    let mut rng = seed.stream(EXACT_DOMAIN, block as u64);
    let mut out = vec![0.0; rows * 2 * d];
    for r in 0..rows {
        let row = &mut out[r * 2 * d..(r + 1) * 2 * d];
        for i in 0..d {
            let z1: f64 = StandardNormal.sample(&mut rng);
            let z2: f64 = StandardNormal.sample(&mut rng);
            row[i] = start.p[i] + l11 * z1;
            row[d + i] = start.xi[i] + t * start.p[i] + l21 * z1 + l22 * z2;
        }
    }
    out
}

/// Runs `f` on consecutive blocks of exact samples; results come back in block
/// order regardless of thread count.
pub fn map_exact_blocks<T, F>(
    t: f64,
    start: &KolmogorovState,
    n: usize,
    seed: Seed,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&KolmogorovSamples) -> T + Sync,
{
    ensure_time(t)?;
    ensure(n >= 1, || "sample count must be at least 1".into())?;
    Ok(map_blocks(n, BLOCK, |b, r| {
        let data = fill_exact_block(t, start, r.len(), seed, b);
        f(&KolmogorovSamples { dim: start.dim(), data })
    }))
}

pub fn sample_exact(
    t: f64,
    start: &KolmogorovState,
    n: usize,
    seed: Seed,
) -> Result<KolmogorovSamples> {
    let parts = map_exact_blocks(t, start, n, seed, |s| s.data.clone())?;
    Ok(KolmogorovSamples { dim: start.dim(), data: parts.concat() })
}

/// `mᵀ Σ_t⁻¹ m` summed over coordinates, with `m = (h, k + t h)`.
pub fn shift_quadratic_form(t: f64, shift: &ShiftVector) -> Result<f64> {
    ensure_time(t)?;
    let q = precision(t);
    Ok((0..shift.dim())
        .map(|i| {
            let (a, b) = (shift.h[i], shift.k[i] + t * shift.h[i]);
            q[0][0] * a * a + 2.0 * q[0][1] * a * b + q[1][1] * b * b
        })
        .sum())
}

/// `log dν_t^{h,k}/dν_t` at `point`, i.e. `mᵀΣ⁻¹y − ½ mᵀΣ⁻¹m`.
pub fn log_rn_derivative_exact(t: f64, shift: &ShiftVector, point: &KolmogorovState) -> Result<f64> {
    ensure_time(t)?;
    ensure(shift.dim() == point.dim(), || "shift and point dimensions differ".into())?;
    Ok(log_rn_derivative_slices(t, shift, &point.p, &point.xi))
}

pub(crate) fn log_rn_derivative_slices(t: f64, shift: &ShiftVector, p: &[f64], xi: &[f64]) -> f64 {
    let q = precision(t);
    let mut total = 0.0;
    for i in 0..shift.dim() {
        let (a, b) = (shift.h[i], shift.k[i] + t * shift.h[i]);
        let (u, v) = (q[0][0] * a + q[0][1] * b, q[1][0] * a + q[1][1] * b);
        total += u * p[i] + v * xi[i] - 0.5 * (u * a + v * b);
    }
    total
}

pub fn rn_derivative_exact(t: f64, shift: &ShiftVector, point: &KolmogorovState) -> Result<f64> {
    Ok(log_rn_derivative_exact(t, shift, point)?.exp())
}

fn ensure_q(q: f64) -> Result<()> {
    ensure(q.is_finite() && q > 1.0, || format!("q must exceed 1, got {q}"))
}

/// `log ‖dν_t^{h,k}/dν_t‖_{L^q(ν_t)} = 2(q−1)(‖h‖²/t + 3⟨h,k⟩/t² + 3‖k‖²/t³)`.
pub fn log_lq_norm_exact(t: f64, shift: &ShiftVector, q: f64) -> Result<f64> {
    ensure_time(t)?;
    ensure_q(q)?;
    Ok(2.0
        * (q - 1.0)
        * (shift.h_sq() / t + 3.0 * shift.hk() / (t * t) + 3.0 * shift.k_sq() / (t * t * t)))
}

/// `log E[(dν_t^{h,k}/dν_t)^q] = ((q²−q)/2) mᵀΣ⁻¹m`.
pub fn log_rn_moment(t: f64, shift: &ShiftVector, q: f64) -> Result<f64> {
    ensure_q(q)?;
    Ok(0.5 * (q * q - q) * shift_quadratic_form(t, shift)?)
}

/// The same norm obtained as the `1/q` power of the Gaussian moment.
pub fn log_lq_norm_quadratic(t: f64, shift: &ShiftVector, q: f64) -> Result<f64> {
    Ok(log_rn_moment(t, shift, q)? / q)
}

pub fn lq_norm_exact(t: f64, shift: &ShiftVector, q: f64) -> Result<f64> {
    Ok(log_lq_norm_exact(t, shift, q)?.exp())
}
