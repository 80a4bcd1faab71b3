use crate::stats::Estimate;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Sides hold natural logarithms.
    Log,
    Linear,
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Log => "log",
            Scale::Linear => "linear",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckVerdict {
    Holds,
    Violated,
    Inconclusive,
}

impl CheckVerdict {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "HOLDS" => Some(Self::Holds),
            "VIOLATED" => Some(Self::Violated),
            "INCONCLUSIVE" => Some(Self::Inconclusive),
            _ => None,
        }
    }
}

impl fmt::Display for CheckVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckVerdict::Holds => "HOLDS",
            CheckVerdict::Violated => "VIOLATED",
            CheckVerdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// One side of an inequality with its confidence bounds, in the report scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Side {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Side {
    pub fn exact(value: f64) -> Self {
        Side { value, lo: value, hi: value }
    }

    /// Maps a linear-scale estimate to log scale; a non-positive lower bound
    /// becomes `-inf`.
    pub fn log_of(e: &Estimate) -> Self {
        let ln = |v: f64| if v > 0.0 { v.ln() } else { f64::NEG_INFINITY };
        Side { value: ln(e.value), lo: ln(e.lo()), hi: ln(e.hi()) }
    }

    pub fn linear(e: &Estimate) -> Self {
        Side { value: e.value, lo: e.lo(), hi: e.hi() }
    }

    pub fn scaled(self, factor: f64) -> Self {
        let (a, b) = (self.lo * factor, self.hi * factor);
        Side { value: self.value * factor, lo: a.min(b), hi: a.max(b) }
    }

    pub fn shifted(self, offset: f64) -> Self {
        Side { value: self.value + offset, lo: self.lo + offset, hi: self.hi + offset }
    }
}

pub fn verdict_of(lhs: &Side, rhs: &Side) -> CheckVerdict {
    if lhs.hi <= rhs.lo {
        CheckVerdict::Holds
    } else if lhs.lo > rhs.hi {
        CheckVerdict::Violated
    } else {
        CheckVerdict::Inconclusive
    }
}

/// Outcome of one inequality check `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub name: String,
    pub scale: Scale,
    pub lhs: Side,
    pub rhs: Side,
    pub verdict: CheckVerdict,
    pub samples: u64,
    pub seed: Option<u64>,
    pub params: Vec<(String, String)>,
    pub note: Option<String>,
}

impl InequalityReport {
    pub fn new(name: impl Into<String>, scale: Scale, lhs: Side, rhs: Side) -> Self {
        InequalityReport {
            name: name.into(),
            scale,
            lhs,
            rhs,
            verdict: verdict_of(&lhs, &rhs),
            samples: 0,
            seed: None,
            params: Vec::new(),
            note: None,
        }
    }

    pub fn with_samples(mut self, samples: u64, seed: Option<u64>) -> Self {
        self.samples = samples;
        self.seed = seed;
        self
    }

    pub fn param(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn recompute_verdict(&self) -> CheckVerdict {
        verdict_of(&self.lhs, &self.rhs)
    }

    /// `rhs − lhs` in the report scale (the log margin for log reports).
    pub fn margin(&self) -> f64 {
        self.rhs.value - self.lhs.value
    }

    pub fn lhs_log(&self) -> f64 {
        match self.scale {
            Scale::Log => self.lhs.value,
            Scale::Linear => self.lhs.value.ln(),
        }
    }

    pub fn rhs_log(&self) -> f64 {
        match self.scale {
            Scale::Log => self.rhs.value,
            Scale::Linear => self.rhs.value.ln(),
        }
    }

    pub fn params_string(&self) -> String {
        self.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }
}
