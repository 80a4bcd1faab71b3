//! Streaming moments with order-fixed merging and CLT confidence intervals.

use statrs::distribution::{ContinuousCDF, Normal};

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.575_829_303_548_900_4;
/// One-sided 99% standard normal quantile.
pub const Z99_ONE_SIDED: f64 = 2.326_347_874_040_840_8;

/// Two-sided normal quantile for the given confidence level in (0,1).
pub fn z_two_sided(confidence: f64) -> f64 {
    assert!(confidence > 0.0 && confidence < 1.0, "confidence must lie in (0,1)");
    if (confidence - 0.99).abs() < 1e-15 {
        return Z99;
    }
    Normal::standard().inverse_cdf(0.5 + confidence / 2.0)
}

/// Running count, mean and centred second moment (Welford / Chan).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn from_slice(xs: &[f64]) -> Self {
        let mut m = Moments::default();
        for &x in xs {
            m.push(x);
        }
        m
    }

    pub fn merge(&self, other: &Moments) -> Moments {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let n = self.count + other.count;
        let (na, nb) = (self.count as f64, other.count as f64);
        let delta = other.mean - self.mean;
        Moments {
            count: n,
            mean: self.mean + delta * nb / n as f64,
            m2: self.m2 + other.m2 + delta * delta * na * nb / n as f64,
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return f64::INFINITY;
        }
        (self.variance() / self.count as f64).sqrt()
    }

    pub fn estimate(&self, confidence: f64) -> Estimate {
        let se = self.std_error();
        Estimate {
            value: self.mean,
            se,
            half_width: z_two_sided(confidence) * se,
            samples: self.count,
        }
    }
}

/// Joint moments of a fixed-length vector observation.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiMoments {
    pub count: u64,
    pub mean: Vec<f64>,
    /// Row-major centred cross-product sums.
    pub comoment: Vec<f64>,
}

impl MultiMoments {
    pub fn new(dim: usize) -> Self {
        MultiMoments { count: 0, mean: vec![0.0; dim], comoment: vec![0.0; dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn push(&mut self, x: &[f64]) {
        let d = self.dim();
        assert_eq!(x.len(), d);
        self.count += 1;
        let n = self.count as f64;
        let delta: Vec<f64> = x.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        for (m, dl) in self.mean.iter_mut().zip(&delta) {
            *m += dl / n;
        }
        for i in 0..d {
            let after = x[i] - self.mean[i];
            for j in 0..d {
                self.comoment[i * d + j] += delta[j] * after;
            }
        }
    }

    pub fn merge(&self, other: &MultiMoments) -> MultiMoments {
        if self.count == 0 {
            return other.clone();
        }
        if other.count == 0 {
            return self.clone();
        }
        let d = self.dim();
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta: Vec<f64> = other.mean.iter().zip(&self.mean).map(|(b, a)| b - a).collect();
        let mean = self.mean.iter().zip(&delta).map(|(a, dl)| a + dl * nb / n).collect();
        let mut comoment = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                comoment[i * d + j] = self.comoment[i * d + j]
                    + other.comoment[i * d + j]
                    + delta[i] * delta[j] * na * nb / n;
            }
        }
        MultiMoments { count: self.count + other.count, mean, comoment }
    }

    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        self.comoment[i * self.dim() + j] / (self.count - 1) as f64
    }

    pub fn mean_se(&self, i: usize) -> f64 {
        (self.covariance(i, i) / self.count as f64).sqrt()
    }
}

/// A point estimate with standard error and confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
    pub half_width: f64,
    pub samples: u64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, se: 0.0, half_width: 0.0, samples: 0 }
    }

    pub fn with_tolerance(value: f64, tolerance: f64) -> Self {
        Estimate { value, se: 0.0, half_width: tolerance, samples: 0 }
    }

    pub fn lo(&self) -> f64 {
        self.value - self.half_width
    }

    pub fn hi(&self) -> f64 {
        self.value + self.half_width
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo() <= x && x <= self.hi()
    }
}

/// Sample covariance of two equal-length series, with the CLT standard error
/// of the product estimator.
pub fn covariance_with_se(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    let mx = Moments::from_slice(x).mean;
    let my = Moments::from_slice(y).mean;
    let mut prod = Moments::default();
    for (a, b) in x.iter().zip(y) {
        prod.push((a - mx) * (b - my));
    }
    let scale = n as f64 / (n as f64 - 1.0);
    (prod.mean * scale, prod.std_error() * scale)
}
