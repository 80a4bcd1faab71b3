//! Path integration of `Y_t = (h + B_t, k + ∫_0^t F(B_s + h) ds)`.

use super::validate::ValidatedDrift;
use crate::error::{ensure, ensure_time, Result};
use crate::rng::{domain, map_blocks, Seed, BLOCK};
use crate::wiener::{running_integral, sample_coordinates, IntegrationRule, PathGrid, TimeGrid};
use rand_distr::{Distribution, StandardNormal};

const ENDPOINT_DOMAIN: u64 = domain("drift.endpoint");

/// Shift for the generalized diffusion: `h` acts on the `d` position
/// coordinates, `k` on the `r` integrated components.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftShift {
    pub h: Vec<f64>,
    pub k: Vec<f64>,
}

/// A state `(p, ξ) ∈ ℝ^d × ℝ^r` of the generalized diffusion.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftState {
    pub p: Vec<f64>,
    pub xi: Vec<f64>,
}

impl DriftState {
    pub fn zeros(d: usize, r: usize) -> Self {
        DriftState { p: vec![0.0; d], xi: vec![0.0; r] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedPath {
    /// Unshifted Brownian coordinates.
    pub base: PathGrid,
    /// Position shift `h` (zero-padded to the number of coordinates).
    pub h: Vec<f64>,
    /// `integral[j][k] = k_j + ∫_0^{t_k} F_j(B_s + h) ds`.
    pub integral: Vec<Vec<f64>>,
    pub rule: IntegrationRule,
    pub warnings: Vec<String>,
}

impl GeneralizedPath {
    pub fn position(&self, coord: usize, k: usize) -> f64 {
        self.base.values[coord][k] + self.h[coord]
    }
}

pub fn simulate_y(
    drift: &ValidatedDrift,
    shift: Option<&DriftShift>,
    grid: &TimeGrid,
    n_coords: usize,
    seed: Seed,
    rule: IntegrationRule,
) -> Result<GeneralizedPath> {
    let spec = drift.spec();
    ensure(grid.len() >= 2, || "grid needs at least two points".into())?;
    ensure(n_coords >= spec.input_dim, || {
        format!("drift reads {} coordinates but only {n_coords} sampled", spec.input_dim)
    })?;
    let mut h = vec![0.0; n_coords];
    let mut k = vec![0.0; spec.output_dim()];
    if let Some(s) = shift {
        ensure(s.h.len() <= n_coords, || "shift h longer than sampled coordinates".into())?;
        ensure(s.k.len() == spec.output_dim(), || "shift k must match drift output".into())?;
        h[..s.h.len()].copy_from_slice(&s.h);
        k.copy_from_slice(&s.k);
    }
    let mut warnings = Vec::new();
    if grid.intervals() == 1 {
        warnings.push("single-interval grid: integral uses one quadrature panel".to_string());
    }
    let base = sample_coordinates(n_coords, grid, seed);
    let times = grid.times();
    let mut w = vec![0.0; n_coords];
    let mut values = vec![vec![0.0; grid.len()]; spec.output_dim()];
    for t in 0..grid.len() {
        for (i, wi) in w.iter_mut().enumerate() {
            *wi = base.values[i][t] + h[i];
        }
        for (j, c) in spec.components.iter().enumerate() {
            values[j][t] = c.eval(&w);
        }
    }
    let integral = values
        .iter()
        .zip(&k)
        .map(|(v, kj)| running_integral(v, times, rule).into_iter().map(|x| x + kj).collect())
        .collect();
    Ok(GeneralizedPath { base, h, integral, rule, warnings })
}

/// Options for terminal-value sampling of the generalized diffusion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointOptions {
    pub steps: usize,
    pub antithetic: bool,
}

impl Default for EndpointOptions {
    fn default() -> Self {
        EndpointOptions { steps: 64, antithetic: false }
    }
}

/// Simulates `n` terminal values `(p + B_t, ξ + ∫_0^t F(p + B_s) ds)` in fixed
/// blocks and hands each block to `f`. Every start in `starts` is driven by the
/// same Brownian increments; a row is the concatenation over starts of
/// `[p_1..p_d, ξ_1..ξ_r]`, and `f` receives the rows and the row width.
///
/// With `antithetic`, rows come in consecutive pairs driven by `±` the same
/// normals; `BLOCK` is even so pairs never straddle blocks.
pub fn map_endpoint_blocks<T, F>(
    drift: &ValidatedDrift,
    starts: &[DriftState],
    t: f64,
    n: usize,
    seed: Seed,
    opts: EndpointOptions,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&[f64], usize) -> T + Sync,
{
    ensure_time(t)?;
    let spec = drift.spec();
    let d = spec.input_dim;
    let r = spec.output_dim();
    ensure(!starts.is_empty(), || "need at least one start".into())?;
    for s in starts {
        ensure(s.p.len() == d && s.xi.len() == r, || {
            format!("start state must have {d} positions and {r} integrated components")
        })?;
    }
    ensure(n >= 1, || "sample count must be at least 1".into())?;
    ensure(opts.steps >= 1, || "need at least one time step".into())?;
    ensure(!opts.antithetic || n % 2 == 0, || "antithetic sampling needs an even count".into())?;
    let dt = t / opts.steps as f64;
    let sdt = dt.sqrt();
    let block_width = d + r;
    let width = block_width * starts.len();
    Ok(map_blocks(n, BLOCK, |b, range| {
        let mut rng = seed.stream(ENDPOINT_DOMAIN, b as u64);
        let rows = range.len();
        let mut out = vec![0.0; rows * width];
        let mut z = vec![0.0; opts.steps * d];
        let mut walk = vec![0.0; d];
        let mut w = vec![0.0; d];
        let mut fv = vec![0.0; r];
        let mut acc = vec![0.0; r * starts.len()];
        for row in 0..rows {
            let sign = if opts.antithetic && row % 2 == 1 {
                -1.0
            } else {
                for zi in z.iter_mut() {
                    *zi = StandardNormal.sample(&mut rng);
                }
                1.0
            };
            walk.iter_mut().for_each(|v| *v = 0.0);
            for (si, s) in starts.iter().enumerate() {
                spec.eval_into(&s.p, &mut fv);
                for j in 0..r {
                    acc[si * r + j] = 0.5 * fv[j];
                }
            }
            for step in 0..opts.steps {
                for i in 0..d {
                    walk[i] += sign * sdt * z[step * d + i];
                }
                let weight = if step + 1 == opts.steps { 0.5 } else { 1.0 };
                for (si, s) in starts.iter().enumerate() {
                    for i in 0..d {
                        w[i] = s.p[i] + walk[i];
                    }
                    spec.eval_into(&w, &mut fv);
                    for j in 0..r {
                        acc[si * r + j] += weight * fv[j];
                    }
                }
            }
            for (si, s) in starts.iter().enumerate() {
                let o = &mut out[row * width + si * block_width..row * width + (si + 1) * block_width];
                for i in 0..d {
                    o[i] = s.p[i] + walk[i];
                }
                for j in 0..r {
                    o[d + j] = s.xi[j] + dt * acc[si * r + j];
                }
            }
        }
        f(&out, width)
    }))
}

#[cfg(test)]
mod tests {
    use super::super::profile::Profile;
    use super::super::spec::{DriftComponent, DriftSpec};
    use super::super::validate::AssumptionMode;
    use super::*;

    fn identity() -> ValidatedDrift {
        let spec = DriftSpec::finite(
            "id",
            1,
            vec![DriftComponent::certified(vec![0], Profile::Linear { slope: 1.0 })],
        );
        ValidatedDrift::new(spec, AssumptionMode::A, 100, Seed(0)).unwrap()
    }

    #[test]
    fn integral_starts_at_shift() {
        let g = TimeGrid::uniform(1.0, 16).unwrap();
        let shift = DriftShift { h: vec![0.5], k: vec![0.25] };
        let y = simulate_y(&identity(), Some(&shift), &g, 1, Seed(3), IntegrationRule::Trapezoid).unwrap();
        assert_eq!(y.integral[0][0], 0.25);
        assert!(y.warnings.is_empty());
        assert_eq!(y.position(0, 0), 0.5);
    }

    #[test]
    fn one_interval_grid_warns() {
        let g = TimeGrid::new(vec![0.0, 1.0]).unwrap();
        let y = simulate_y(&identity(), None, &g, 1, Seed(3), IntegrationRule::Trapezoid).unwrap();
        assert_eq!(y.warnings.len(), 1);
        let b1 = y.base.values[0][1];
        assert!((y.integral[0][1] - 0.5 * b1).abs() < 1e-15);
        let single = TimeGrid::new(vec![0.0]).unwrap();
        assert!(simulate_y(&identity(), None, &single, 1, Seed(3), IntegrationRule::Trapezoid).is_err());
    }

    #[test]
    fn endpoint_sampler_trapezoid_matches_path_integrator() {
        let drift = identity();
        let rows = map_endpoint_blocks(
            &drift,
            &[DriftState::zeros(1, 1)],
            1.0,
            4,
            Seed(9),
            EndpointOptions { steps: 8, antithetic: true },
            |rows, _| rows.to_vec(),
        )
        .unwrap()
        .concat();
        assert_eq!(rows[0], -rows[2]);
        assert_eq!(rows[1], -rows[3]);
    }
}
