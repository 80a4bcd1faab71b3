//! Cameron–Martin path `γ(s) = s a + s² b` realizing a shift of `(B_t, ∫B)`,
//! and its exponential density.

use crate::error::{ensure, ensure_time, Result};
use crate::gauss::ShiftVector;
use crate::wiener::PathGrid;

#[derive(Debug, Clone, PartialEq)]
pub struct GirsanovPath {
    pub t: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// `∫_0^t |γ'(s)|² ds`.
    pub norm_sq: f64,
}

impl GirsanovPath {
    pub fn gamma(&self, s: f64) -> Vec<f64> {
        self.a.iter().zip(&self.b).map(|(a, b)| s * a + s * s * b).collect()
    }

    /// `∫_0^s γ(u) du`.
    pub fn gamma_integral(&self, s: f64) -> Vec<f64> {
        self.a.iter().zip(&self.b).map(|(a, b)| 0.5 * s * s * a + s * s * s / 3.0 * b).collect()
    }

    pub fn velocity(&self, s: f64) -> Vec<f64> {
        self.a.iter().zip(&self.b).map(|(a, b)| a + 2.0 * s * b).collect()
    }

    /// `log J` from the terminal pair `(B_t, ∫_0^t B)`:
    /// `Σ a_i B_t + 2 b_i (t B_t − ∫B) − ½‖γ‖²`.
    pub fn log_density_from_state(&self, b_t: &[f64], int_b: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.a.len() {
            s += self.a[i] * b_t[i] + 2.0 * self.b[i] * (self.t * b_t[i] - int_b[i]);
        }
        s - 0.5 * self.norm_sq
    }
}

/// `a = −4h/t − 6k/t²`, `b = 3h/t² + 6k/t³`, so that `γ(t) = −h` and
/// `∫_0^t γ = −(t h + k)`.
pub fn girsanov_path(t: f64, shift: &ShiftVector) -> Result<GirsanovPath> {
    ensure_time(t)?;
    let a: Vec<f64> = shift.h.iter().zip(&shift.k).map(|(h, k)| -4.0 * h / t - 6.0 * k / (t * t)).collect();
    let b: Vec<f64> =
        shift.h.iter().zip(&shift.k).map(|(h, k)| 3.0 * h / (t * t) + 6.0 * k / (t * t * t)).collect();
    let aa: f64 = a.iter().map(|v| v * v).sum();
    let ab: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    let bb: f64 = b.iter().map(|v| v * v).sum();
    let norm_sq = t * aa + 2.0 * t * t * ab + 4.0 / 3.0 * t * t * t * bb;
    Ok(GirsanovPath { t, a, b, norm_sq })
}

fn terminal_index(path: &PathGrid, t: f64) -> Result<usize> {
    let times = path.times();
    let idx = times.iter().position(|s| (s - t).abs() <= 1e-12 * t.max(1.0));
    idx.ok_or_else(|| {
        crate::Error::InvalidInput(format!("grid does not contain the time {t}"))
    })
}

/// `J` from a sampled path, with `∫B` by the trapezoid rule on the grid.
pub fn girsanov_density(path: &PathGrid, g: &GirsanovPath) -> Result<f64> {
    ensure(path.n_coords() >= g.a.len(), || "path has too few coordinates".into())?;
    let end = terminal_index(path, g.t)?;
    let times = path.times();
    let mut b_t = Vec::with_capacity(g.a.len());
    let mut int_b = Vec::with_capacity(g.a.len());
    for i in 0..g.a.len() {
        let v = &path.values[i];
        b_t.push(v[end]);
        int_b.push((1..=end).map(|k| 0.5 * (v[k] + v[k - 1]) * (times[k] - times[k - 1])).sum());
    }
    Ok(g.log_density_from_state(&b_t, &int_b).exp())
}

/// `J` with the stochastic integral discretized as `Σ γ'(t_k)(B_{t_{k+1}} − B_{t_k})`.
pub fn girsanov_density_ito(path: &PathGrid, g: &GirsanovPath) -> Result<f64> {
    ensure(path.n_coords() >= g.a.len(), || "path has too few coordinates".into())?;
    let end = terminal_index(path, g.t)?;
    let times = path.times();
    let mut s = 0.0;
    for k in 0..end {
        let vel = g.velocity(times[k]);
        for (i, v) in vel.iter().enumerate() {
            s += v * (path.values[i][k + 1] - path.values[i][k]);
        }
    }
    Ok((s - 0.5 * g.norm_sq).exp())
}
