//! Closed-form Harnack constants and `L^q` bounds, carried in log space.

use crate::drift::{AssumptionMode, DriftState, ValidatedDrift};
use crate::error::{ensure, ensure_time, Error, Result};
use crate::gauss::{KolmogorovState, ShiftVector};
use std::fmt;

/// `3 / (4 − √13)`.
pub fn sharp_factor() -> f64 {
    3.0 / (4.0 - 13f64.sqrt())
}

/// Largest log value representable after exponentiation.
pub fn log_overflow() -> f64 {
    f64::MAX.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundStatus {
    Finite,
    /// The log-sum exceeded the overflow budget.
    Divergent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    /// Named additive terms of the log of the bound.
    pub terms: Vec<(String, f64)>,
    pub status: BoundStatus,
    pub note: Option<String>,
}

impl BoundResult {
    fn finite(terms: Vec<(String, f64)>) -> Self {
        BoundResult { terms, status: BoundStatus::Finite, note: None }
    }

    pub fn log_value(&self) -> f64 {
        self.terms.iter().map(|(_, v)| v).sum()
    }

    pub fn value(&self) -> f64 {
        self.log_value().exp()
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

fn ensure_alpha(alpha: f64) -> Result<()> {
    ensure(alpha.is_finite() && alpha > 1.0, || format!("α must exceed 1, got {alpha}"))
}

fn ensure_q(q: f64) -> Result<()> {
    ensure(q.is_finite() && q > 1.0, || format!("q must exceed 1, got {q}"))
}

fn sq_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn kolmogorov_terms(factor: f64, t: f64, dp_sq: f64, dxi_sq: f64) -> Vec<(String, f64)> {
    vec![
        ("p".to_string(), factor * dp_sq / t),
        ("xi".to_string(), factor * dxi_sq / (t * t * t)),
    ]
}

/// Harnack constant for the standard diffusion:
/// `exp(3/(4−√13) · α/(α−1) · (‖Δp‖²/t + ‖Δξ‖²/t³))`.
pub fn wang_constant_kolmogorov(
    alpha: f64,
    t: f64,
    x: &KolmogorovState,
    y: &KolmogorovState,
) -> Result<BoundResult> {
    ensure_alpha(alpha)?;
    ensure_time(t)?;
    ensure(x.dim() == y.dim(), || "points must have equal dimension".into())?;
    let factor = sharp_factor() * alpha / (alpha - 1.0);
    Ok(BoundResult::finite(kolmogorov_terms(factor, t, sq_diff(&x.p, &y.p), sq_diff(&x.xi, &y.xi))))
}

/// `exp(3(1+q)/(4−√13) · (‖p‖²/t + ‖ξ‖²/t³))`.
pub fn integrated_harnack_bound_kolmogorov(q: f64, t: f64, x: &KolmogorovState) -> Result<BoundResult> {
    ensure_q(q)?;
    ensure_time(t)?;
    let p_sq = x.p.iter().map(|v| v * v).sum();
    let xi_sq = x.xi.iter().map(|v| v * v).sum();
    Ok(BoundResult::finite(kolmogorov_terms(sharp_factor() * (1.0 + q), t, p_sq, xi_sq)))
}

/// Log of the one-component factor
/// `coef·M/m · (12/(m²t²)(m t/2 Σ Δp + Δξ)² + ‖Δp‖²)/(4t)`, split into its
/// two summands.
fn component_terms(coef: f64, lower: f64, upper: f64, t: f64, dp: &[f64], dxi: f64) -> (f64, f64) {
    let twisted = 0.5 * lower * t * dp.iter().sum::<f64>() + dxi;
    let square = 3.0 * coef * upper / (lower.powi(3) * t.powi(3)) * twisted * twisted;
    let energy = coef * upper / (4.0 * lower * t) * dp.iter().map(|v| v * v).sum::<f64>();
    (square, energy)
}

fn general_terms(
    coef: f64,
    t: f64,
    dp: &[f64],
    dxi: &[f64],
    drift: &ValidatedDrift,
) -> Result<Vec<(String, f64)>> {
    let spec = drift.spec();
    ensure(dp.len() == spec.input_dim, || {
        format!("position difference must have {} entries", spec.input_dim)
    })?;
    ensure(dxi.len() == spec.output_dim(), || {
        format!("integrated difference must have {} entries", spec.output_dim())
    })?;
    let mut terms = Vec::new();
    if drift.mode() == AssumptionMode::A {
        let c = &spec.components[0];
        let twisted = 0.5 * c.lower * t * dp.iter().sum::<f64>() + dxi[0];
        let inner = 12.0 / (c.lower * c.lower * t * t) * twisted * twisted
            + dp.iter().map(|v| v * v).sum::<f64>();
        terms.push(("component_0".to_string(), coef * c.upper / (4.0 * c.lower * t) * inner));
        return Ok(terms);
    }
    for (j, c) in spec.components.iter().enumerate() {
        let sub: Vec<f64> = c.indices.iter().map(|&i| dp[i]).collect();
        let (square, energy) = component_terms(coef, c.lower, c.upper, t, &sub, dxi[j]);
        terms.push((format!("component_{j}"), square + energy));
    }
    let covered = spec.covered();
    let rest: f64 = dp
        .iter()
        .zip(&covered)
        .filter(|(_, c)| !**c)
        .map(|(v, _)| v * v)
        .sum();
    terms.push(("complement".to_string(), coef / (4.0 * t) * rest));
    Ok(terms)
}

/// Harnack constant for a generalized diffusion, dispatched on the mode the
/// drift was validated under.
pub fn wang_constant_general(
    alpha: f64,
    t: f64,
    x: &DriftState,
    y: &DriftState,
    drift: &ValidatedDrift,
) -> Result<BoundResult> {
    ensure_alpha(alpha)?;
    ensure_time(t)?;
    let dp: Vec<f64> = x.p.iter().zip(&y.p).map(|(a, b)| a - b).collect();
    let dxi: Vec<f64> = x.xi.iter().zip(&y.xi).map(|(a, b)| a - b).collect();
    Ok(BoundResult::finite(general_terms(alpha / (alpha - 1.0), t, &dp, &dxi, drift)?))
}

pub fn integrated_harnack_bound_general(
    q: f64,
    t: f64,
    x: &DriftState,
    drift: &ValidatedDrift,
) -> Result<BoundResult> {
    ensure_q(q)?;
    ensure_time(t)?;
    Ok(BoundResult::finite(general_terms(1.0 + q, t, &x.p, &x.xi, drift)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RnStyle {
    /// `exp(3(1+q)/(4−√13)(‖h‖²/t + ‖k‖²/t³))`.
    Decoupled,
    /// Product of per-component factors for finitely many components.
    Componentwise,
    /// The same product over a sequence-valued drift, with divergence check.
    Product,
    /// `exp((1+q)(‖h‖²/t + 3⟨h,k⟩/t² + 3‖k‖²/t³))`.
    CrossTerm,
    /// The exact Gaussian value `exp(2(q−1)(‖h‖²/t + 3⟨h,k⟩/t² + 3‖k‖²/t³))`.
    Exact,
}

impl RnStyle {
    pub const ALL: [RnStyle; 5] =
        [RnStyle::Decoupled, RnStyle::Componentwise, RnStyle::Product, RnStyle::CrossTerm, RnStyle::Exact];

    pub fn name(&self) -> &'static str {
        match self {
            RnStyle::Decoupled => "decoupled",
            RnStyle::Componentwise => "componentwise",
            RnStyle::Product => "product",
            RnStyle::CrossTerm => "cross_term",
            RnStyle::Exact => "exact",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        RnStyle::ALL.into_iter().find(|st| st.name() == s)
    }

    pub fn needs_drift(&self) -> bool {
        matches!(self, RnStyle::Componentwise | RnStyle::Product)
    }
}

impl fmt::Display for RnStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn gaussian_cross_terms(coef: f64, t: f64, shift: &ShiftVector) -> Vec<(String, f64)> {
    vec![
        ("h".to_string(), coef * shift.h_sq() / t),
        ("hk".to_string(), coef * 3.0 * shift.hk() / (t * t)),
        ("k".to_string(), coef * 3.0 * shift.k_sq() / (t * t * t)),
    ]
}

/// Displayed upper bounds on `‖dν_t^{h,k}/dν_t‖_{L^q}`.
///
/// For the drift-based styles `shift.h` holds the position shift (padded with
/// zeros to the drift input dimension) and `shift.k` one entry per drift
/// component; the other styles need `h` and `k` of equal length.
pub fn rn_bound(
    style: RnStyle,
    q: f64,
    t: f64,
    h: &[f64],
    k: &[f64],
    drift: Option<&ValidatedDrift>,
) -> Result<BoundResult> {
    ensure_q(q)?;
    ensure_time(t)?;
    match style {
        RnStyle::Decoupled | RnStyle::CrossTerm | RnStyle::Exact => {
            let shift = ShiftVector::new(h.to_vec(), k.to_vec())?;
            let terms = match style {
                RnStyle::Decoupled => vec![
                    ("h".to_string(), sharp_factor() * (1.0 + q) * shift.h_sq() / t),
                    ("k".to_string(), sharp_factor() * (1.0 + q) * shift.k_sq() / t.powi(3)),
                ],
                RnStyle::CrossTerm => gaussian_cross_terms(1.0 + q, t, &shift),
                _ => gaussian_cross_terms(2.0 * (q - 1.0), t, &shift),
            };
            Ok(BoundResult::finite(terms))
        }
        RnStyle::Componentwise | RnStyle::Product => {
            let drift = drift.ok_or_else(|| {
                Error::InvalidInput(format!("style {style} needs a drift specification"))
            })?;
            let spec = drift.spec();
            ensure(h.len() <= spec.input_dim, || "h longer than drift input dimension".into())?;
            let mut hp = h.to_vec();
            hp.resize(spec.input_dim, 0.0);
            let mut kp = k.to_vec();
            if style == RnStyle::Product {
                ensure(k.len() <= spec.output_dim(), || "k longer than materialized components".into())?;
                kp.resize(spec.output_dim(), 0.0);
            }
            let terms = general_terms(1.0 + q, t, &hp, &kp, drift)?;
            let mut result = BoundResult::finite(terms);
            if style == RnStyle::Product {
                result.note = Some(format!(
                    "product over {} materialized components; shift coordinates beyond {} are zero",
                    spec.output_dim(),
                    h.len().max(k.len())
                ));
                if !(result.log_value() <= log_overflow()) {
                    result.status = BoundStatus::Divergent;
                }
            }
            Ok(result)
        }
    }
}
