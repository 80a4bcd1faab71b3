//! Weighted sequence-space model of a Wiener space.
//!
//! `W` is ℓ² with weights `λ_i` (‖w‖²_W = Σ λ_i w_i²), `H` is plain ℓ², and the
//! basis is the coordinate basis. Coordinates are 0-based in the API: index 0
//! is the first basis vector.

use crate::error::{ensure, invalid, Result};
use crate::rng::{domain, Seed};
use rand_distr::{Distribution, StandardNormal};

pub const DEFAULT_TRUNCATION: usize = 256;

const PATH_DOMAIN: u64 = domain("wiener.path");

#[derive(Debug, Clone, PartialEq)]
pub struct WienerSpaceModel {
    weights: Vec<f64>,
}

impl WienerSpaceModel {
    /// Weights `λ_i = i^{-2}` for `i = 1..=truncation`.
    pub fn inverse_square(truncation: usize) -> Result<Self> {
        ensure(truncation > 0, || "truncation must be positive".into())?;
        Ok(WienerSpaceModel {
            weights: (1..=truncation).map(|i| 1.0 / (i as f64 * i as f64)).collect(),
        })
    }

    pub fn with_weights(weights: Vec<f64>) -> Result<Self> {
        ensure(!weights.is_empty(), || "weights must be non-empty".into())?;
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return invalid(format!("weights must be positive and finite, got {w}"));
        }
        Ok(WienerSpaceModel { weights })
    }

    pub fn truncation_dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ_{i<n} λ_i` over the first `n` materialized weights.
    pub fn partial_sum(&self, n: usize) -> f64 {
        self.weights.iter().take(n).sum()
    }

    /// `Σ_{i≥n} λ_i` over the materialized weights, summed from the smallest
    /// term upward.
    pub fn tail_sum(&self, n: usize) -> f64 {
        self.weights.iter().skip(n).rev().sum()
    }

    pub fn w_norm(&self, x: &[f64]) -> Result<f64> {
        Ok(self.w_norm_sq(x)?.sqrt())
    }

    pub fn w_norm_sq(&self, x: &[f64]) -> Result<f64> {
        ensure(x.len() <= self.weights.len(), || {
            format!("vector length {} exceeds truncation {}", x.len(), self.weights.len())
        })?;
        ensure(x.iter().all(|v| v.is_finite()), || "non-finite coefficient".into())?;
        Ok(x.iter().zip(&self.weights).map(|(v, l)| l * v * v).sum())
    }
}

pub fn h_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `⟨x, e_index⟩`; coefficients beyond the stored length are zero.
pub fn pairing(x: &[f64], index: usize) -> f64 {
    x.get(index).copied().unwrap_or(0.0)
}

/// Coordinate projection onto a set of basis vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionSpec {
    indices: Vec<usize>,
}

impl ProjectionSpec {
    /// Projection onto the first `n` coordinates.
    pub fn rank(n: usize) -> Result<Self> {
        ensure(n > 0, || "projection rank must be positive".into())?;
        Ok(ProjectionSpec { indices: (0..n).collect() })
    }

    pub fn from_indices(indices: Vec<usize>) -> Result<Self> {
        ensure(!indices.is_empty(), || "projection index set is empty".into())?;
        ensure(indices.windows(2).all(|w| w[0] < w[1]), || {
            "projection indices must be strictly increasing".into()
        })?;
        Ok(ProjectionSpec { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn rank_of(&self) -> usize {
        self.indices.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn max_index(&self) -> usize {
        *self.indices.last().expect("non-empty")
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        ensure(self.max_index() < x.len(), || {
            format!("projection index {} outside {} coordinates", self.max_index(), x.len())
        })?;
        let mut out = vec![0.0; x.len()];
        for &i in &self.indices {
            out[i] = x[i];
        }
        Ok(out)
    }

    /// `P ∘ Q` for coordinate projections is the projection onto the common
    /// indices.
    pub fn compose(&self, other: &ProjectionSpec) -> Result<ProjectionSpec> {
        let common: Vec<usize> =
            self.indices.iter().copied().filter(|i| other.contains(*i)).collect();
        ProjectionSpec::from_indices(common)
    }
}

/// Sampling times `0 = t_0 < t_1 < … < t_K`. The single-point grid `{0}` is
/// accepted and yields paths that are identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        ensure(!times.is_empty(), || "time grid is empty".into())?;
        ensure(times[0] == 0.0, || format!("time grid must start at 0, got {}", times[0]))?;
        ensure(times.iter().all(|t| t.is_finite()), || "non-finite grid time".into())?;
        ensure(times.windows(2).all(|w| w[0] < w[1]), || {
            "time grid must be strictly increasing".into()
        })?;
        Ok(TimeGrid { times })
    }

    pub fn uniform(horizon: f64, steps: usize) -> Result<Self> {
        ensure(horizon.is_finite() && horizon > 0.0, || "horizon must be positive".into())?;
        ensure(steps > 0, || "need at least one step".into())?;
        let times = (0..=steps).map(|k| horizon * k as f64 / steps as f64).collect();
        TimeGrid::new(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    pub fn intervals(&self) -> usize {
        self.times.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathGrid {
    pub grid: TimeGrid,
    /// `values[coordinate][time index]`.
    pub values: Vec<Vec<f64>>,
    pub seed: Option<u64>,
}

impl PathGrid {
    pub fn n_coords(&self) -> usize {
        self.values.len()
    }

    pub fn times(&self) -> &[f64] {
        self.grid.times()
    }

    /// The vector of coordinates at time index `k`.
    pub fn at(&self, k: usize) -> Vec<f64> {
        self.values.iter().map(|c| c[k]).collect()
    }

    pub fn terminal(&self) -> Vec<f64> {
        self.at(self.grid.len() - 1)
    }
}

/// Fills `out` with one Brownian path on `times`, drawing from `rng`.
pub(crate) fn fill_brownian<R: rand::Rng>(times: &[f64], rng: &mut R, out: &mut [f64]) {
    out[0] = 0.0;
    for k in 1..times.len() {
        let z: f64 = StandardNormal.sample(rng);
        out[k] = out[k - 1] + (times[k] - times[k - 1]).sqrt() * z;
    }
}

/// Exact Brownian paths for coordinates `0..n_coords`, one independent stream
/// per coordinate.
pub fn sample_brownian_path(
    model: &WienerSpaceModel,
    n_coords: usize,
    grid: &TimeGrid,
    seed: Seed,
) -> Result<PathGrid> {
    ensure(n_coords > 0, || "n_coords must be positive".into())?;
    ensure(n_coords <= model.truncation_dim(), || {
        format!("n_coords {n_coords} exceeds truncation {}", model.truncation_dim())
    })?;
    Ok(sample_coordinates(n_coords, grid, seed))
}

pub(crate) fn sample_coordinates(n_coords: usize, grid: &TimeGrid, seed: Seed) -> PathGrid {
    let values = (0..n_coords)
        .map(|i| {
            let mut rng = seed.stream(PATH_DOMAIN, i as u64);
            let mut v = vec![0.0; grid.len()];
            fill_brownian(grid.times(), &mut rng, &mut v);
            v
        })
        .collect();
    PathGrid { grid: grid.clone(), values, seed: Some(seed.0) }
}

/// Keeps projected coordinates and zeroes the others.
pub fn project_path(path: &PathGrid, proj: &ProjectionSpec) -> Result<PathGrid> {
    ensure(proj.max_index() < path.n_coords(), || {
        format!("projection index {} outside {} coordinates", proj.max_index(), path.n_coords())
    })?;
    let values = path
        .values
        .iter()
        .enumerate()
        .map(|(i, c)| if proj.contains(i) { c.clone() } else { vec![0.0; c.len()] })
        .collect();
    Ok(PathGrid { grid: path.grid.clone(), values, seed: path.seed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntegrationRule {
    #[default]
    Trapezoid,
    LeftRiemann,
}

/// Running integral `∫_0^{t_k} g` of grid values, starting at 0.
pub fn running_integral(values: &[f64], times: &[f64], rule: IntegrationRule) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    for k in 1..values.len() {
        let dt = times[k] - times[k - 1];
        let piece = match rule {
            IntegrationRule::Trapezoid => 0.5 * (values[k - 1] + values[k]) * dt,
            IntegrationRule::LeftRiemann => values[k - 1] * dt,
        };
        out[k] = out[k - 1] + piece;
    }
    out
}
