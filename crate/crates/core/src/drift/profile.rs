//! One-dimensional component profiles `φ` and their exact slope ranges.

use std::fmt;
use std::sync::Arc;

/// Far-field part of a smoothed profile, used on `|x| > 1 + ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outer {
    /// `ln|x|`, extended evenly.
    Log,
    /// `−x + x^{−p}` for `x > 0`, extended oddly.
    Power(f64),
}

impl Outer {
    fn value(&self, y: f64) -> f64 {
        match *self {
            Outer::Log => y.ln(),
            Outer::Power(p) => -y + y.powf(-p),
        }
    }

    fn slope(&self, y: f64) -> f64 {
        match *self {
            Outer::Log => 1.0 / y,
            Outer::Power(p) => -1.0 - p * y.powf(-p - 1.0),
        }
    }

    /// Range of the slope over `y ≥ start` (the supremum or infimum at infinity
    /// is included, which only widens the interval).
    fn slope_range(&self, start: f64) -> (f64, f64) {
        let at_start = self.slope(start);
        let at_infinity = match *self {
            Outer::Log => 0.0,
            Outer::Power(_) => -1.0,
        };
        (at_start.min(at_infinity), at_start.max(at_infinity))
    }

    /// `g(-y)` expressed through `g(y)`: `+1` for even, `-1` for odd extension.
    fn parity(&self) -> f64 {
        match self {
            Outer::Log => 1.0,
            Outer::Power(_) => -1.0,
        }
    }
}

/// `φ(x) = c·x + a·g(x)` where `g` vanishes on `|x| < 1−ε`, equals the outer
/// function on `|x| > 1+ε`, and in between is the cubic `α v² + β v³`,
/// `v = (|x| − (1−ε)) / 2ε`, matching value and slope at both ends of the
/// band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Smoothed {
    pub c: f64,
    pub a: f64,
    pub eps: f64,
    pub outer: Outer,
}

impl Smoothed {
    fn band(&self) -> (f64, f64, f64) {
        (1.0 - self.eps, 1.0 + self.eps, 2.0 * self.eps)
    }

    fn cubic(&self) -> (f64, f64) {
        let (_, s1, w) = self.band();
        let g1 = self.outer.value(s1);
        let d1 = self.outer.slope(s1) * w;
        let beta = d1 - 2.0 * g1;
        (g1 - beta, beta)
    }

    /// `g` and `g'` on the positive half-line.
    fn g_positive(&self, y: f64) -> (f64, f64) {
        let (s0, s1, w) = self.band();
        if y < s0 {
            (0.0, 0.0)
        } else if y <= s1 {
            let (alpha, beta) = self.cubic();
            let v = (y - s0) / w;
            (alpha * v * v + beta * v * v * v, (2.0 * alpha * v + 3.0 * beta * v * v) / w)
        } else {
            (self.outer.value(y), self.outer.slope(y))
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        let (g, _) = self.g_positive(x.abs());
        let g = if x < 0.0 { self.outer.parity() * g } else { g };
        self.c * x + self.a * g
    }

    pub fn slope(&self, x: f64) -> f64 {
        let (_, dg) = self.g_positive(x.abs());
        // g even ⇒ g' odd; g odd ⇒ g' even
        let dg = if x < 0.0 { -self.outer.parity() * dg } else { dg };
        self.c + self.a * dg
    }

    /// Exact range of `g'` over `y ≥ 0`.
    fn g_slope_range(&self) -> (f64, f64) {
        let (_, s1, w) = self.band();
        let (alpha, beta) = self.cubic();
        let mut lo = 0.0f64;
        let mut hi = 0.0f64;
        let end = (2.0 * alpha + 3.0 * beta) / w;
        lo = lo.min(end);
        hi = hi.max(end);
        if beta != 0.0 {
            let v = -alpha / (3.0 * beta);
            if v > 0.0 && v < 1.0 {
                let inner = (2.0 * alpha * v + 3.0 * beta * v * v) / w;
                lo = lo.min(inner);
                hi = hi.max(inner);
            }
        }
        let (olo, ohi) = self.outer.slope_range(s1);
        (lo.min(olo), hi.max(ohi))
    }

    pub fn slope_range(&self) -> (f64, f64) {
        let (glo, ghi) = self.g_slope_range();
        let mut cands = vec![self.c + self.a * glo, self.c + self.a * ghi];
        if self.outer.parity() > 0.0 {
            cands.push(self.c - self.a * glo);
            cands.push(self.c - self.a * ghi);
        }
        let lo = cands.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = cands.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

pub type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Profile {
    Linear { slope: f64 },
    /// `slope·x + amplitude·tanh(x)`.
    LinearTanh { slope: f64, amplitude: f64 },
    Smoothed(Smoothed),
    /// A user function; slopes are only observed by finite differences.
    Custom { name: String, f: ProfileFn },
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Linear { slope } => write!(f, "Linear({slope})"),
            Profile::LinearTanh { slope, amplitude } => write!(f, "LinearTanh({slope}, {amplitude})"),
            Profile::Smoothed(s) => write!(f, "{s:?}"),
            Profile::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl Profile {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Profile::Linear { slope } => slope * x,
            Profile::LinearTanh { slope, amplitude } => slope * x + amplitude * x.tanh(),
            Profile::Smoothed(s) => s.value(x),
            Profile::Custom { f, .. } => f(x),
        }
    }

    pub fn slope(&self, x: f64) -> f64 {
        match self {
            Profile::Linear { slope } => *slope,
            Profile::LinearTanh { slope, amplitude } => {
                let c = x.cosh();
                slope + amplitude / (c * c)
            }
            Profile::Smoothed(s) => s.slope(x),
            Profile::Custom { f, .. } => {
                let h = 1e-5 * (1.0 + x.abs());
                (f(x + h) - f(x - h)) / (2.0 * h)
            }
        }
    }

    /// Exact slope range for built-in profiles, `None` for custom ones.
    pub fn slope_range(&self) -> Option<(f64, f64)> {
        match self {
            Profile::Linear { slope } => Some((*slope, *slope)),
            Profile::LinearTanh { slope, amplitude } => {
                Some((slope.min(slope + amplitude), slope.max(slope + amplitude)))
            }
            Profile::Smoothed(s) => Some(s.slope_range()),
            Profile::Custom { .. } => None,
        }
    }

    pub fn is_custom(&self) -> bool {
        matches!(self, Profile::Custom { .. })
    }

    pub fn describe(&self) -> String {
        format!("{self:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_profile() -> Smoothed {
        Smoothed { c: 1.0, a: 0.25, eps: 0.5, outer: Outer::Log }
    }

    #[test]
    fn smoothed_is_continuous_with_matching_slopes() {
        for s in [
            log_profile(),
            Smoothed { c: 2.0, a: 0.5, eps: 0.5, outer: Outer::Power(0.5) },
            Smoothed { c: 2.0, a: 0.3, eps: 0.25, outer: Outer::Power(-0.5) },
        ] {
            for edge in [1.0 - s.eps, 1.0 + s.eps] {
                for sign in [-1.0, 1.0] {
                    let x = sign * edge;
                    let d = 1e-9;
                    assert!((s.value(x + d) - s.value(x - d)).abs() < 1e-7, "{s:?} at {x}");
                    assert!((s.slope(x + d) - s.slope(x - d)).abs() < 1e-6, "{s:?} at {x}");
                }
            }
        }
    }

    #[test]
    fn slope_matches_finite_difference() {
        let s = log_profile();
        for i in -40..=40 {
            let x = i as f64 * 0.137;
            let h = 1e-6;
            let fd = (s.value(x + h) - s.value(x - h)) / (2.0 * h);
            assert!((fd - s.slope(x)).abs() < 1e-6, "x={x}");
        }
    }

    #[test]
    fn log_profile_range() {
        let (lo, hi) = log_profile().slope_range();
        assert!((lo - 5.0 / 6.0).abs() < 1e-12);
        assert!((hi - 7.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn dense_scan_within_certified_range() {
        let profiles = [
            log_profile(),
            Smoothed { c: 2.0, a: 0.5, eps: 0.5, outer: Outer::Power(0.5) },
            Smoothed { c: 2.0, a: 0.4, eps: 0.3, outer: Outer::Power(-0.5) },
        ];
        for s in profiles {
            let (lo, hi) = s.slope_range();
            for i in -20_000..=20_000 {
                let x = i as f64 * 5e-4;
                let v = s.slope(x);
                assert!(v >= lo - 1e-12 && v <= hi + 1e-12, "{s:?} x={x} slope={v}");
            }
        }
    }

    #[test]
    fn tanh_range() {
        let p = Profile::LinearTanh { slope: 2.0, amplitude: 1.0 };
        assert_eq!(p.slope_range(), Some((2.0, 3.0)));
        assert_eq!(p.slope(0.0), 3.0);
    }
}
