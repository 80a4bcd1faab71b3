//! Checks a drift description against the slope assumptions.

use super::spec::{DriftSpec, Target};
use crate::error::{Error, Result};
use crate::rng::{domain, Seed};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::fmt;

const PROBE_DOMAIN: u64 = domain("drift.probe");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssumptionMode {
    /// One scalar component reading every coordinate.
    A,
    /// One scalar component reading a non-empty subset `I`.
    A2,
    /// Several components on disjoint subsets `I_j`.
    A3,
    /// Finitely many cylinder components on disjoint subsets of the sequence
    /// coordinates.
    B3,
    /// Sequence-valued drift with square-summable coefficients.
    B4,
}

impl AssumptionMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Some(Self::A),
            "A2" => Some(Self::A2),
            "A3" => Some(Self::A3),
            "B3" => Some(Self::B3),
            "B4" => Some(Self::B4),
            _ => None,
        }
    }
}

impl fmt::Display for AssumptionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentCheck {
    pub component: usize,
    pub declared: (f64, f64),
    pub certified: Option<(f64, f64)>,
    pub observed_min: f64,
    pub observed_max: f64,
    pub probes: usize,
    pub violations: usize,
    /// Largest finite-difference slope seen along a coordinate outside `I_j`.
    pub max_off_support: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub mode: AssumptionMode,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
    pub components: Vec<ComponentCheck>,
    pub assumed: Vec<String>,
}

fn fd_step(x: f64) -> f64 {
    1e-5 * (1.0 + x.abs())
}

/// Truncation plus rounding budget for a central difference of step `h` on a
/// function of magnitude `scale`.
fn fd_tolerance(h: f64, scale: f64) -> f64 {
    1e-6 + h + 4.0 * f64::EPSILON * scale.max(1.0) / h
}

fn structural(spec: &DriftSpec, mode: AssumptionMode, reasons: &mut Vec<String>) {
    if spec.components.is_empty() {
        reasons.push("no components".into());
    }
    for (j, c) in spec.components.iter().enumerate() {
        if c.indices.is_empty() {
            reasons.push(format!("component {j} has an empty index set"));
        }
        if let Some(i) = c.indices.iter().find(|&&i| i >= spec.input_dim) {
            reasons.push(format!("component {j} reads coordinate {i} beyond input dimension"));
        }
        let mut sorted = c.indices.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            reasons.push(format!("component {j} repeats a coordinate"));
        }
        if !(c.lower > 0.0) {
            reasons.push(format!("component {j} lower bound {} is not positive", c.lower));
        }
        if !(c.lower <= c.upper) || !c.upper.is_finite() {
            reasons.push(format!("component {j} bounds [{}, {}] are not ordered", c.lower, c.upper));
        }
    }
    for a in 0..spec.components.len() {
        for b in a + 1..spec.components.len() {
            let ia = &spec.components[a].indices;
            if spec.components[b].indices.iter().any(|i| ia.contains(i)) {
                reasons.push(format!("index sets of components {a} and {b} overlap"));
            }
        }
    }
    let r = spec.components.len();
    match mode {
        AssumptionMode::A => {
            if r != 1 {
                reasons.push(format!("mode A needs one component, found {r}"));
            } else {
                let mut idx = spec.components[0].indices.clone();
                idx.sort_unstable();
                if idx != (0..spec.input_dim).collect::<Vec<_>>() {
                    reasons.push("mode A needs the component to read every coordinate".into());
                }
            }
        }
        AssumptionMode::A2 => {
            if r != 1 {
                reasons.push(format!("mode A2 needs one component, found {r}"));
            }
        }
        AssumptionMode::A3 | AssumptionMode::B3 => {}
        AssumptionMode::B4 => {
            if spec.target != Target::Sequence {
                reasons.push("mode B4 needs a sequence-valued drift".into());
            }
            match &spec.coefficients {
                None => reasons.push("mode B4 needs a coefficient sequence".into()),
                Some(c) if !c.is_square_summable() => {
                    reasons.push("coefficient sequence is not square summable".into())
                }
                _ => {}
            }
        }
    }
}

pub fn validate_assumption(
    spec: &DriftSpec,
    mode: AssumptionMode,
    probe_count: usize,
    seed: Seed,
) -> ValidationReport {
    let mut reasons = Vec::new();
    structural(spec, mode, &mut reasons);
    let mut assumed = Vec::new();
    if mode == AssumptionMode::B4 {
        assumed.push("almost-sure convergence of the coefficient expansion".to_string());
    }
    if !reasons.is_empty() {
        return ValidationReport { mode, verdict: Verdict::Fail, reasons, components: vec![], assumed };
    }

    let mut any_custom = false;
    let mut checks = Vec::with_capacity(spec.components.len());
    for (j, c) in spec.components.iter().enumerate() {
        let certified = c.profile.slope_range();
        if let Some((lo, hi)) = certified {
            if lo < c.lower - 1e-12 || hi > c.upper + 1e-12 {
                reasons.push(format!(
                    "component {j}: profile slopes span [{lo}, {hi}], outside declared [{}, {}]",
                    c.lower, c.upper
                ));
            }
        } else {
            any_custom = true;
        }
        let mut rng = seed.stream(PROBE_DOMAIN, j as u64);
        let mut check = ComponentCheck {
            component: j,
            declared: (c.lower, c.upper),
            certified,
            observed_min: f64::INFINITY,
            observed_max: f64::NEG_INFINITY,
            probes: probe_count,
            violations: 0,
            max_off_support: 0.0,
        };
        let mut w = vec![0.0; spec.input_dim];
        for _ in 0..probe_count {
            // mix scales so that probes land in every piece of piecewise profiles
            let scale = [0.5, 1.0, 2.0, 6.0][rng.random_range(0..4)];
            for v in w.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *v = scale * z;
            }
            let i = c.indices[rng.random_range(0..c.indices.len())];
            let h = fd_step(w[i]);
            let x0 = w[i];
            w[i] = x0 + h;
            let up = c.eval(&w);
            w[i] = x0 - h;
            let down = c.eval(&w);
            w[i] = x0;
            let slope = (up - down) / (2.0 * h);
            let tol = fd_tolerance(h, up.abs().max(down.abs()));
            check.observed_min = check.observed_min.min(slope);
            check.observed_max = check.observed_max.max(slope);
            if !slope.is_finite() || slope < c.lower - tol || slope > c.upper + tol {
                check.violations += 1;
            }
            if spec.input_dim > c.indices.len() {
                let off = rng.random_range(0..spec.input_dim);
                if !c.indices.contains(&off) {
                    let h = fd_step(w[off]);
                    let x0 = w[off];
                    w[off] = x0 + h;
                    let up = c.eval(&w);
                    w[off] = x0 - h;
                    let down = c.eval(&w);
                    w[off] = x0;
                    let s = ((up - down) / (2.0 * h)).abs();
                    check.max_off_support = check.max_off_support.max(s);
                    if s > fd_tolerance(h, up.abs()) {
                        check.violations += 1;
                    }
                }
            }
        }
        if check.violations > 0 {
            reasons.push(format!("component {j}: {} probe violations", check.violations));
        }
        checks.push(check);
    }

    let verdict = if !reasons.is_empty() {
        Verdict::Fail
    } else if any_custom {
        reasons.push("custom profile slopes observed by probes only".into());
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    ValidationReport { mode, verdict, reasons, components: checks, assumed }
}

/// A drift description that did not fail validation for its mode.
#[derive(Debug, Clone)]
pub struct ValidatedDrift {
    spec: DriftSpec,
    report: ValidationReport,
}

impl ValidatedDrift {
    pub fn new(spec: DriftSpec, mode: AssumptionMode, probe_count: usize, seed: Seed) -> Result<Self> {
        let report = validate_assumption(&spec, mode, probe_count, seed);
        if report.verdict == Verdict::Fail {
            return Err(Error::Unvalidated(format!(
                "{} under mode {mode}: {}",
                spec.name,
                report.reasons.join("; ")
            )));
        }
        Ok(ValidatedDrift { spec, report })
    }

    pub fn spec(&self) -> &DriftSpec {
        &self.spec
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn mode(&self) -> AssumptionMode {
        self.report.mode
    }
}

#[cfg(test)]
mod tests {
    use super::super::profile::Profile;
    use super::super::spec::{builtin_drifts, DriftComponent, DriftSpec};
    use super::*;
    use std::sync::Arc;

    #[test]
    fn identity_passes_a2() {
        let spec = DriftSpec::finite(
            "id",
            1,
            vec![DriftComponent::certified(vec![0], Profile::Linear { slope: 1.0 })],
        );
        let r = validate_assumption(&spec, AssumptionMode::A2, 100, Seed(1));
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.components[0].certified, Some((1.0, 1.0)));
    }

    #[test]
    fn tanh_observed_slopes_in_range() {
        let spec = DriftSpec::finite(
            "t",
            2,
            vec![DriftComponent::certified(
                vec![0, 1],
                Profile::LinearTanh { slope: 2.0, amplitude: 1.0 },
            )],
        );
        let r = validate_assumption(&spec, AssumptionMode::A2, 2000, Seed(2));
        assert_eq!(r.verdict, Verdict::Pass);
        let c = &r.components[0];
        assert!(c.observed_min >= 2.0 - 1e-6 && c.observed_max <= 3.0 + 1e-6);
    }

    #[test]
    fn overlap_fails() {
        let p = Profile::Linear { slope: 1.0 };
        let spec = DriftSpec::finite(
            "o",
            3,
            vec![
                DriftComponent::certified(vec![0, 1], p.clone()),
                DriftComponent::certified(vec![1, 2], p),
            ],
        );
        let r = validate_assumption(&spec, AssumptionMode::A3, 10, Seed(3));
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(ValidatedDrift::new(spec, AssumptionMode::A3, 10, Seed(3)).is_err());
    }

    #[test]
    fn structural_failures() {
        let bad = DriftSpec::finite(
            "neg",
            1,
            vec![DriftComponent::new(vec![0], Profile::Linear { slope: -1.0 }, -1.0, -1.0)],
        );
        assert_eq!(validate_assumption(&bad, AssumptionMode::A, 10, Seed(0)).verdict, Verdict::Fail);
        let empty = DriftSpec::finite(
            "e",
            1,
            vec![DriftComponent::new(vec![], Profile::Linear { slope: 1.0 }, 1.0, 1.0)],
        );
        assert_eq!(validate_assumption(&empty, AssumptionMode::A3, 10, Seed(0)).verdict, Verdict::Fail);
        let narrow = DriftSpec::finite(
            "n",
            1,
            vec![DriftComponent::new(vec![0], Profile::LinearTanh { slope: 2.0, amplitude: 1.0 }, 2.0, 2.5)],
        );
        assert_eq!(validate_assumption(&narrow, AssumptionMode::A, 10, Seed(0)).verdict, Verdict::Fail);
    }

    #[test]
    fn custom_profiles_are_inconclusive_or_fail() {
        let spec = DriftSpec::finite(
            "c",
            1,
            vec![DriftComponent::new(
                vec![0],
                Profile::Custom { name: "3x".into(), f: Arc::new(|x| 3.0 * x) },
                2.0,
                4.0,
            )],
        );
        assert_eq!(validate_assumption(&spec, AssumptionMode::A, 500, Seed(4)).verdict, Verdict::Inconclusive);
        let lying = DriftSpec::finite(
            "c",
            1,
            vec![DriftComponent::new(
                vec![0],
                Profile::Custom { name: "x+sin".into(), f: Arc::new(|x| x + 0.9 * x.sin()) },
                0.5,
                2.0,
            )],
        );
        assert_eq!(validate_assumption(&lying, AssumptionMode::A, 500, Seed(4)).verdict, Verdict::Fail);
    }

    #[test]
    fn builtins_validate() {
        for spec in builtin_drifts() {
            let mode = if spec.target == super::super::spec::Target::Sequence {
                AssumptionMode::B4
            } else {
                AssumptionMode::A3
            };
            let r = validate_assumption(&spec, mode, 2000, Seed(5));
            assert_eq!(r.verdict, Verdict::Pass, "{}: {:?}", spec.name, r.reasons);
        }
    }
}
