//! Deterministic quadrature: Gauss–Legendre rules, adaptive Gauss–Kronrod,
//! and a tensor rule for expectations under the standard bivariate normal.

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on [-1, 1] via Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let step = pn / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre nodes/weights on [a,b] with equal panels.
pub fn composite_rule(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(mid + 0.5 * h * xi);
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration to absolute tolerance `tol`.
pub fn adaptive(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (v, e) = adaptive_with_error(f, a, b, tol, 2000);
    if e <= tol {
        Ok(v)
    } else {
        Err(Error::Quadrature { tolerance: tol, estimate: e })
    }
}

/// Bisects the interval with the largest error estimate until the total is
/// below `tol` or `max_intervals` is reached. Returns value and error estimate.
pub fn adaptive_with_error(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    max_intervals: usize,
) -> (f64, f64) {
    let (v, e) = gk15(f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total_err: f64 = parts.iter().map(|p| p.3).sum();
        if total_err <= tol || parts.len() >= max_intervals {
            let total: f64 = parts.iter().map(|p| p.2).sum();
            return (total, total_err);
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(f, lo, mid);
        let (v2, e2) = gk15(f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Nested adaptive integration of `f(x, y)` over a rectangle.
pub fn adaptive_2d(
    f: &dyn Fn(f64, f64) -> f64,
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    tol: f64,
) -> Result<f64> {
    let inner_tol = tol / (10.0 * (x1 - x0));
    let mut worst = 0.0f64;
    let mut outer = |x: f64| {
        let (v, e) = adaptive_with_error(&mut |y| f(x, y), y0, y1, inner_tol, 2000);
        worst = worst.max(e);
        v
    };
    let (v, e) = adaptive_with_error(&mut outer, x0, x1, tol / 2.0, 2000);
    let total = e + worst * (x1 - x0);
    if total <= tol {
        Ok(v)
    } else {
        Err(Error::Quadrature { tolerance: tol, estimate: total })
    }
}

/// Tensor-product rule for `E[g(Z_1, Z_2)]` with `Z` standard bivariate normal,
/// truncated to `[-8.5, 8.5]²` (neglected mass below 1e-16).
#[derive(Debug, Clone)]
pub struct StdNormalRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

pub const NORMAL_CUTOFF: f64 = 8.5;

impl StdNormalRule {
    pub fn new(panels: usize, order: usize) -> Self {
        let (nodes, w) = composite_rule(-NORMAL_CUTOFF, NORMAL_CUTOFF, panels, order);
        let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        let weights = nodes.iter().zip(&w).map(|(z, wi)| wi * norm * (-0.5 * z * z).exp()).collect();
        StdNormalRule { nodes, weights }
    }

    pub fn fine() -> Self {
        StdNormalRule::new(32, 12)
    }

    pub fn coarse() -> Self {
        StdNormalRule::new(16, 12)
    }

    pub fn expect_2d(&self, g: &dyn Fn(f64, f64) -> f64) -> f64 {
        let mut total = 0.0;
        for (z1, w1) in self.nodes.iter().zip(&self.weights) {
            let mut row = 0.0;
            for (z2, w2) in self.nodes.iter().zip(&self.weights) {
                row += w2 * g(*z1, *z2);
            }
            total += w1 * row;
        }
        total
    }

    pub fn expect_1d(&self, g: &dyn Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(z, w)| w * g(*z)).sum()
    }
}
