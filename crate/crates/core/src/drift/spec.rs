use super::profile::{Outer, Profile, Smoothed};
use crate::error::{ensure, Result};
use crate::wiener::ProjectionSpec;

/// `F_j(w) = offset + Σ_{i ∈ I_j} φ(w_i)` with declared slope bounds.
#[derive(Debug, Clone)]
pub struct DriftComponent {
    /// 0-based coordinate indices `I_j`.
    pub indices: Vec<usize>,
    pub profile: Profile,
    pub lower: f64,
    pub upper: f64,
    pub offset: f64,
}

impl DriftComponent {
    pub fn new(indices: Vec<usize>, profile: Profile, lower: f64, upper: f64) -> Self {
        DriftComponent { indices, profile, lower, upper, offset: 0.0 }
    }

    /// Bounds taken from the profile's exact slope range.
    pub fn certified(indices: Vec<usize>, profile: Profile) -> Self {
        let (lo, hi) = profile.slope_range().expect("built-in profile");
        DriftComponent::new(indices, profile, lo, hi)
    }

    pub fn eval(&self, w: &[f64]) -> f64 {
        self.offset + self.indices.iter().map(|&i| self.profile.value(w[i])).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// `F: ℝ^d → ℝ^r`.
    Finite,
    /// `F: W → W` with coefficient functions `F_j = ⟨F, e_j⟩`.
    Sequence,
}

/// Coefficients scaling the nonlinear part of a sequence-target drift.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientSequence {
    Explicit(Vec<f64>),
    /// `a_k = scale · k^{-exponent}`, `k ≥ 1`.
    PowerLaw { scale: f64, exponent: f64 },
}

impl CoefficientSequence {
    pub fn is_square_summable(&self) -> bool {
        match self {
            CoefficientSequence::Explicit(v) => v.iter().all(|a| a.is_finite()),
            CoefficientSequence::PowerLaw { scale, exponent } => *scale == 0.0 || *exponent > 0.5,
        }
    }

    pub fn coefficient(&self, k: usize) -> f64 {
        match self {
            CoefficientSequence::Explicit(v) => v.get(k - 1).copied().unwrap_or(0.0),
            CoefficientSequence::PowerLaw { scale, exponent } => scale * (k as f64).powf(-exponent),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DriftSpec {
    pub name: String,
    /// Number of input coordinates the drift reads.
    pub input_dim: usize,
    pub target: Target,
    pub components: Vec<DriftComponent>,
    pub coefficients: Option<CoefficientSequence>,
}

impl DriftSpec {
    pub fn finite(name: &str, input_dim: usize, components: Vec<DriftComponent>) -> Self {
        DriftSpec {
            name: name.to_string(),
            input_dim,
            target: Target::Finite,
            components,
            coefficients: None,
        }
    }

    pub fn output_dim(&self) -> usize {
        self.components.len()
    }

    pub fn eval(&self, w: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval(w)).collect()
    }

    pub fn eval_into(&self, w: &[f64], out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.eval(w);
        }
    }

    /// Coordinates covered by some `I_j`; the complement is `I^c`.
    pub fn covered(&self) -> Vec<bool> {
        let mut seen = vec![false; self.input_dim];
        for c in &self.components {
            for &i in &c.indices {
                if i < seen.len() {
                    seen[i] = true;
                }
            }
        }
        seen
    }

    /// `F(w) = w` on the first `n` coordinates.
    pub fn identity(n: usize) -> Self {
        DriftSpec {
            name: format!("identity-{n}"),
            input_dim: n,
            target: Target::Sequence,
            components: (0..n)
                .map(|j| DriftComponent::certified(vec![j], Profile::Linear { slope: 1.0 }))
                .collect(),
            coefficients: Some(CoefficientSequence::Explicit(vec![])),
        }
    }

    /// `F_k(w) = φ_k(w_k)` with smoothed log profiles and `a_k = scale·k^{-exponent}`.
    pub fn smoothed_log_sequence(n: usize, scale: f64, exponent: f64, eps: f64) -> Self {
        let coeffs = CoefficientSequence::PowerLaw { scale, exponent };
        let components = (0..n)
            .map(|j| {
                let a = coeffs.coefficient(j + 1);
                let s = Smoothed { c: 1.0, a, eps, outer: Outer::Log };
                DriftComponent::certified(vec![j], Profile::Smoothed(s))
            })
            .collect();
        DriftSpec {
            name: format!("smoothed-log-{n}"),
            input_dim: n,
            target: Target::Sequence,
            components,
            coefficients: Some(coeffs),
        }
    }
}

/// Catalog of the built-in drifts, each with certified slope bounds.
pub fn builtin_drifts() -> Vec<DriftSpec> {
    let tanh = Profile::LinearTanh { slope: 2.0, amplitude: 1.0 };
    vec![
        DriftSpec::identity(8),
        DriftSpec::finite(
            "affine-2x",
            1,
            vec![DriftComponent::certified(vec![0], Profile::Linear { slope: 2.0 })],
        ),
        DriftSpec::finite("tanh-2x", 2, vec![DriftComponent::certified(vec![0, 1], tanh.clone())]),
        DriftSpec::finite(
            "cylinder-pair",
            4,
            vec![
                DriftComponent::certified(vec![0, 1], tanh),
                DriftComponent::certified(vec![2], Profile::Linear { slope: 1.5 }),
            ],
        ),
        DriftSpec::smoothed_log_sequence(8, 0.25, 1.0, 0.5),
        DriftSpec::finite(
            "smoothed-power",
            1,
            vec![DriftComponent::certified(
                vec![0],
                Profile::Smoothed(Smoothed { c: 2.0, a: 0.5, eps: 0.5, outer: Outer::Power(0.5) }),
            )],
        ),
    ]
}

pub fn builtin_drift(name: &str) -> Option<DriftSpec> {
    builtin_drifts().into_iter().find(|d| d.name == name)
}

/// The finite-dimensional approximant `Q F(P ·)`: components outside `out_proj`
/// are dropped, and coordinates outside `proj` are frozen at zero.
pub fn project_drift(
    spec: &DriftSpec,
    proj: &ProjectionSpec,
    out_proj: &ProjectionSpec,
) -> Result<DriftSpec> {
    let mut components = Vec::new();
    for (j, c) in spec.components.iter().enumerate() {
        if !out_proj.contains(j) {
            continue;
        }
        let kept: Vec<usize> = c.indices.iter().copied().filter(|i| proj.contains(*i)).collect();
        ensure(!kept.is_empty(), || format!("component {j} loses every input under projection"))?;
        let frozen = (c.indices.len() - kept.len()) as f64 * c.profile.value(0.0);
        components.push(DriftComponent {
            indices: kept,
            profile: c.profile.clone(),
            lower: c.lower,
            upper: c.upper,
            offset: c.offset + frozen,
        });
    }
    ensure(!components.is_empty(), || "projection removes every component".into())?;
    Ok(DriftSpec {
        name: format!("{}|P{}Q{}", spec.name, proj.rank_of(), out_proj.rank_of()),
        input_dim: spec.input_dim,
        target: spec.target,
        components,
        coefficients: spec.coefficients.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_bounds() {
        let id = builtin_drift("identity-8").unwrap();
        assert!(id.components.iter().all(|c| c.lower == 1.0 && c.upper == 1.0));
        let t = builtin_drift("tanh-2x").unwrap();
        assert_eq!((t.components[0].lower, t.components[0].upper), (2.0, 3.0));
        let l = builtin_drift("smoothed-log-8").unwrap();
        assert!((l.components[0].lower - 5.0 / 6.0).abs() < 1e-12);
        assert!(l.components.windows(2).all(|w| w[1].lower >= w[0].lower));
    }

    #[test]
    fn coefficients() {
        let c = CoefficientSequence::PowerLaw { scale: 1.0, exponent: 1.0 };
        assert!(c.is_square_summable());
        assert_eq!(c.coefficient(4), 0.25);
        assert!(!CoefficientSequence::PowerLaw { scale: 1.0, exponent: 0.5 }.is_square_summable());
    }

    #[test]
    fn identity_projection_truncates() {
        let id = DriftSpec::identity(8);
        let p = ProjectionSpec::rank(3).unwrap();
        let pr = project_drift(&id, &p, &p).unwrap();
        assert_eq!(pr.output_dim(), 3);
        let w = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        assert_eq!(pr.eval(&w), vec![1.0, 2.0, 3.0]);
        let full = ProjectionSpec::rank(8).unwrap();
        assert_eq!(project_drift(&id, &full, &full).unwrap().eval(&w), id.eval(&w));
    }

    #[test]
    fn frozen_coordinates_contribute_profile_at_zero() {
        let spec = DriftSpec::finite(
            "shifted",
            2,
            vec![DriftComponent::new(vec![0, 1], Profile::Custom {
                name: "x+1".into(),
                f: std::sync::Arc::new(|x| x + 1.0),
            }, 1.0, 1.0)],
        );
        let pr = project_drift(&spec, &ProjectionSpec::rank(1).unwrap(), &ProjectionSpec::rank(1).unwrap())
            .unwrap();
        assert_eq!(pr.eval(&[2.0, 5.0]), vec![3.0 + 1.0]);
    }
}
