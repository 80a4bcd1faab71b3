//! Fixed registry of bounded smooth test functions on `ℝ^d × ℝ^r`; each reads
//! the first position and first integrated coordinate.

pub type TestFn = fn(&[f64], &[f64]) -> f64;

#[derive(Debug, Clone, Copy)]
pub struct TestFunction {
    pub name: &'static str,
    pub f: TestFn,
    /// Certified range `[lower, upper]` of the function.
    pub lower: f64,
    pub upper: f64,
    /// Positive everywhere (required by the log-Sobolev check).
    pub strictly_positive: bool,
}

impl TestFunction {
    pub fn eval(&self, p: &[f64], xi: &[f64]) -> f64 {
        (self.f)(p, xi)
    }
}

fn rational(p: &[f64], xi: &[f64]) -> f64 {
    1.0 / (1.0 + p[0] * p[0] + xi[0] * xi[0])
}

fn rational_shifted(p: &[f64], xi: &[f64]) -> f64 {
    let a = p[0] - 1.0;
    1.0 / (1.0 + a * a + xi[0] * xi[0])
}

fn rational_ratio(p: &[f64], xi: &[f64]) -> f64 {
    (1.0 + xi[0] * xi[0]) / (2.0 + p[0] * p[0] + xi[0] * xi[0])
}

fn gaussian_wide(p: &[f64], xi: &[f64]) -> f64 {
    (-(p[0] * p[0] + xi[0] * xi[0]) / 4.0).exp()
}

fn gaussian_narrow(p: &[f64], xi: &[f64]) -> f64 {
    (-0.5 * p[0] * p[0] - 2.0 * xi[0] * xi[0]).exp()
}

fn gaussian_offset(p: &[f64], xi: &[f64]) -> f64 {
    let (a, b) = (p[0] - 0.5, xi[0] + 0.5);
    (-(a * a + b * b)).exp()
}

fn cosine(p: &[f64], xi: &[f64]) -> f64 {
    1.0 + (p[0] + xi[0]).cos()
}

fn sine_product(p: &[f64], xi: &[f64]) -> f64 {
    2.0 + p[0].sin() * xi[0].cos()
}

fn logistic(p: &[f64], xi: &[f64]) -> f64 {
    1.0 / (1.0 + (p[0] - xi[0]).exp())
}

fn arctan_bump(p: &[f64], xi: &[f64]) -> f64 {
    1.5 + (p[0] - 2.0 * xi[0]).atan() / std::f64::consts::PI
}

pub const REGISTRY: [TestFunction; 10] = [
    TestFunction { name: "rational", f: rational, lower: 0.0, upper: 1.0, strictly_positive: true },
    TestFunction { name: "rational_shifted", f: rational_shifted, lower: 0.0, upper: 1.0, strictly_positive: true },
    TestFunction { name: "rational_ratio", f: rational_ratio, lower: 0.0, upper: 1.0, strictly_positive: true },
    TestFunction { name: "gaussian_wide", f: gaussian_wide, lower: 0.0, upper: 1.0, strictly_positive: true },
    TestFunction { name: "gaussian_narrow", f: gaussian_narrow, lower: 0.0, upper: 1.0, strictly_positive: true },
    TestFunction { name: "gaussian_offset", f: gaussian_offset, lower: 0.0, upper: 1.0, strictly_positive: true },
    TestFunction { name: "cosine", f: cosine, lower: 0.0, upper: 2.0, strictly_positive: false },
    TestFunction { name: "sine_product", f: sine_product, lower: 1.0, upper: 3.0, strictly_positive: true },
    TestFunction { name: "logistic", f: logistic, lower: 0.0, upper: 1.0, strictly_positive: true },
    TestFunction { name: "arctan", f: arctan_bump, lower: 1.0, upper: 2.0, strictly_positive: true },
];

pub fn test_function(name: &str) -> Option<TestFunction> {
    REGISTRY.iter().copied().find(|t| t.name == name)
}
