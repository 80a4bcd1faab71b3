//! Experiment configuration documents (TOML) and their translation into
//! library types.

use anyhow::{anyhow, bail, ensure, Context, Result};
use kolmo_core::drift::{
    builtin_drift, AssumptionMode, DriftComponent, DriftSpec, Outer, Profile, Smoothed, ValidatedDrift,
};
use kolmo_core::harness::{Diffusion, McOptions, Method};
use kolmo_core::rng::domain;
use kolmo_core::Seed;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Simulate,
    Kernel,
    VerifyWang,
    VerifyRlsi,
    VerifyRn,
    Convergence,
    Sweep,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Simulate => "simulate",
            Kind::Kernel => "kernel",
            Kind::VerifyWang => "verify-wang",
            Kind::VerifyRlsi => "verify-rlsi",
            Kind::VerifyRn => "verify-rn",
            Kind::Convergence => "convergence",
            Kind::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Option<Kind>,
    /// Base name of the output files; defaults to the kind.
    pub name: Option<String>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub diffusion: DiffusionConfig,
    #[serde(default)]
    pub method: MethodConfig,
    pub kernel: Option<KernelConfig>,
    pub simulate: Option<SimulateConfig>,
    pub wang: Option<WangConfig>,
    pub rlsi: Option<RlsiConfig>,
    pub rn: Option<RnConfig>,
    pub convergence: Option<ConvergenceConfig>,
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffusionConfig {
    /// `standard` or `drift`.
    #[serde(default = "standard")]
    pub kind: String,
    /// Dimension `d` of the standard diffusion.
    #[serde(default = "one")]
    pub dim: usize,
    pub drift: Option<DriftConfig>,
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        DiffusionConfig { kind: standard(), dim: 1, drift: None }
    }
}

fn standard() -> String {
    "standard".into()
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftConfig {
    /// Name of a built-in drift; excludes `path` and `components`.
    pub builtin: Option<String>,
    /// A TOML file holding this same table.
    pub path: Option<PathBuf>,
    pub name: Option<String>,
    pub input_dim: Option<usize>,
    pub mode: Option<String>,
    pub probes: Option<usize>,
    #[serde(default)]
    pub components: Vec<ComponentConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentConfig {
    pub indices: Vec<usize>,
    /// `linear`, `linear-tanh` or `smoothed`.
    pub profile: String,
    pub slope: Option<f64>,
    pub amplitude: Option<f64>,
    pub c: Option<f64>,
    pub a: Option<f64>,
    pub eps: Option<f64>,
    /// `log` or `power` for smoothed profiles.
    pub outer: Option<String>,
    pub power: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodConfig {
    /// `quadrature` or `mc`.
    #[serde(default = "quadrature")]
    pub kind: String,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub antithetic: bool,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
}

impl Default for MethodConfig {
    fn default() -> Self {
        MethodConfig {
            kind: quadrature(),
            samples: default_samples(),
            antithetic: false,
            steps: default_steps(),
            confidence: default_confidence(),
        }
    }
}

fn quadrature() -> String {
    "quadrature".into()
}

fn default_samples() -> usize {
    100_000
}

fn default_steps() -> usize {
    64
}

fn default_confidence() -> f64 {
    0.99
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub t: Vec<f64>,
    /// Start `[p.., ξ..]`; zero when absent.
    pub start: Option<Vec<f64>>,
    /// End points `[p.., ξ..]`.
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub t: f64,
    pub samples: usize,
    pub start: Option<Vec<f64>>,
    /// Also write every sample to `<name>.samples.csv`.
    #[serde(default)]
    pub write_samples: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WangConfig {
    /// Registry names, or `["all"]`.
    pub functions: Vec<String>,
    pub alpha: Vec<f64>,
    pub t: Vec<f64>,
    /// Pairs `[x.., x′..]`, each point laid out as `[p.., ξ..]`.
    pub pairs: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RlsiConfig {
    pub functions: Vec<String>,
    pub t: Vec<f64>,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RnConfig {
    pub q: Vec<f64>,
    pub t: Vec<f64>,
    /// Shifts `[h.., k..]`.
    pub shifts: Vec<Vec<f64>>,
    pub styles: Vec<String>,
    pub oracle: Option<OracleConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub samples: usize,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    /// `standard-x`, `generalized-y` or `sequence-y`.
    pub target: String,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    pub ranks: Vec<usize>,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_grid")]
    pub steps: usize,
    pub replicates: usize,
    /// Sequence drift for `sequence-y`: `identity` or `smoothed-log`.
    pub sequence: Option<String>,
}

fn default_truncation() -> usize {
    kolmo_core::wiener::DEFAULT_TRUNCATION
}

fn default_horizon() -> f64 {
    1.0
}

fn default_grid() -> usize {
    256
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Experiment documents, relative to this file.
    pub runs: Vec<PathBuf>,
}

/// A configuration together with the directory its relative paths refer to.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub base: PathBuf,
    pub source: PathBuf,
}

/// Reads a TOML experiment document, or the `config` echo of a JSON manifest.
pub fn load(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let config = if path.extension().is_some_and(|e| e == "json") {
        let v: serde_json::Value =
            serde_json::from_str(&text).with_context(|| format!("{}: invalid JSON", path.display()))?;
        let echo = v.get("config").ok_or_else(|| anyhow!("{}: manifest has no config field", path.display()))?;
        serde_json::from_value(echo.clone()).with_context(|| format!("{}: invalid config echo", path.display()))?
    } else {
        parse(&text).with_context(|| format!("{}: invalid configuration", path.display()))?
    };
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(LoadedConfig { config, base, source: path.to_path_buf() })
}

pub fn parse(text: &str) -> Result<ExperimentConfig> {
    toml::from_str(text).map_err(|e| anyhow!("{e}"))
}

pub fn non_empty<T>(v: &[T], field: &str) -> Result<()> {
    ensure!(!v.is_empty(), "parameter grid `{field}` is empty");
    Ok(())
}

impl MethodConfig {
    pub fn method(&self, seed: Seed) -> Result<Method> {
        match self.kind.as_str() {
            "quadrature" => Ok(Method::Quadrature),
            "mc" => {
                ensure!(self.confidence > 0.0 && self.confidence < 1.0, "method.confidence must lie in (0, 1)");
                Ok(Method::MonteCarlo(McOptions {
                    samples: self.samples,
                    seed,
                    steps: self.steps,
                    antithetic: self.antithetic,
                    confidence: self.confidence,
                }))
            }
            other => bail!("method.kind: unknown method `{other}` (expected quadrature or mc)"),
        }
    }
}

impl DiffusionConfig {
    /// Builds the diffusion; drifts are validated with probes seeded from `seed`.
    pub fn build(&self, base: &Path, seed: Seed) -> Result<Diffusion> {
        match self.kind.as_str() {
            "standard" => {
                ensure!(self.drift.is_none(), "diffusion.drift given for a standard diffusion");
                ensure!(self.dim >= 1, "diffusion.dim must be at least 1");
                Ok(Diffusion::Standard)
            }
            "drift" => {
                let cfg = self.drift.as_ref().ok_or_else(|| anyhow!("diffusion.drift is required"))?;
                Ok(Diffusion::Generalized(cfg.validated(base, seed)?))
            }
            other => bail!("diffusion.kind: unknown kind `{other}` (expected standard or drift)"),
        }
    }

    /// `(d, r)` for state vectors.
    pub fn dims(&self, diffusion: &Diffusion) -> (usize, usize) {
        match diffusion {
            Diffusion::Standard => (self.dim, self.dim),
            Diffusion::Generalized(d) => (d.spec().input_dim, d.spec().output_dim()),
        }
    }
}

impl DriftConfig {
    fn resolved(&self, base: &Path) -> Result<(DriftConfig, PathBuf)> {
        match &self.path {
            None => Ok((self.clone(), base.to_path_buf())),
            Some(p) => {
                let full = base.join(p);
                let text = std::fs::read_to_string(&full)
                    .with_context(|| format!("cannot read drift file {}", full.display()))?;
                let inner: DriftConfig = toml::from_str(&text)
                    .map_err(|e| anyhow!("{}: invalid drift document: {e}", full.display()))?;
                ensure!(inner.path.is_none(), "{}: nested drift paths are not allowed", full.display());
                let dir = full.parent().map(Path::to_path_buf).unwrap_or_default();
                Ok((inner, dir))
            }
        }
    }

    pub fn spec(&self, base: &Path) -> Result<DriftSpec> {
        let (cfg, _) = self.resolved(base)?;
        if let Some(name) = &cfg.builtin {
            ensure!(cfg.components.is_empty(), "drift: `builtin` and `components` are exclusive");
            return builtin_drift(name).ok_or_else(|| anyhow!("drift.builtin: unknown drift `{name}`"));
        }
        ensure!(!cfg.components.is_empty(), "drift: give `builtin`, `path` or at least one component");
        let input_dim = cfg.input_dim.ok_or_else(|| anyhow!("drift.input_dim is required"))?;
        let components = cfg
            .components
            .iter()
            .enumerate()
            .map(|(j, c)| c.component().with_context(|| format!("drift.components[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        Ok(DriftSpec::finite(cfg.name.as_deref().unwrap_or("custom"), input_dim, components))
    }

    pub fn validated(&self, base: &Path, seed: Seed) -> Result<ValidatedDrift> {
        let (cfg, _) = self.resolved(base)?;
        let spec = self.spec(base)?;
        let mode = cfg.mode.as_deref().unwrap_or("A");
        let mode = AssumptionMode::parse(mode).ok_or_else(|| anyhow!("drift.mode: unknown mode `{mode}`"))?;
        let probes = cfg.probes.unwrap_or(10_000);
        let probe_seed = seed.derive(domain("cli.probe"));
        ValidatedDrift::new(spec, mode, probes, probe_seed).map_err(|e| anyhow!("{e}"))
    }
}

impl ComponentConfig {
    fn need(&self, v: Option<f64>, field: &str) -> Result<f64> {
        v.ok_or_else(|| anyhow!("profile `{}` needs `{field}`", self.profile))
    }

    fn component(&self) -> Result<DriftComponent> {
        ensure!(!self.indices.is_empty(), "indices must be non-empty");
        let profile = match self.profile.as_str() {
            "linear" => Profile::Linear { slope: self.need(self.slope, "slope")? },
            "linear-tanh" => Profile::LinearTanh {
                slope: self.need(self.slope, "slope")?,
                amplitude: self.need(self.amplitude, "amplitude")?,
            },
            "smoothed" => {
                let outer = match self.outer.as_deref() {
                    Some("log") | None => Outer::Log,
                    Some("power") => Outer::Power(self.need(self.power, "power")?),
                    Some(o) => bail!("unknown outer function `{o}`"),
                };
                Profile::Smoothed(Smoothed {
                    c: self.need(self.c, "c")?,
                    a: self.need(self.a, "a")?,
                    eps: self.need(self.eps, "eps")?,
                    outer,
                })
            }
            other => bail!("unknown profile `{other}`"),
        };
        let (lo, hi) = profile.slope_range().ok_or_else(|| anyhow!("profile has no certified range"))?;
        Ok(DriftComponent::new(self.indices.clone(), profile, self.lower.unwrap_or(lo), self.upper.unwrap_or(hi)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document() {
        let c = parse("seed = 3\n[rn]\nq = [2.0]\nt = [1.0]\nshifts = [[1.0, 0.0]]\nstyles = [\"decoupled\"]\n").unwrap();
        assert_eq!(c.seed, Some(3));
        assert_eq!(c.rn.unwrap().styles, vec!["decoupled"]);
        assert_eq!(c.method.kind, "quadrature");
    }

    #[test]
    fn unknown_fields_are_reported_with_location() {
        let err = parse("seed = 3\n[rn]\nq = [2.0]\nqq = 1\n").unwrap_err().to_string();
        assert!(err.contains("line 4") || err.contains("qq"), "{err}");
    }

    #[test]
    fn inline_drift() {
        let c = parse(
            "[diffusion]\nkind = \"drift\"\n[diffusion.drift]\ninput_dim = 1\nprobes = 500\n\
             [[diffusion.drift.components]]\nindices = [0]\nprofile = \"linear-tanh\"\nslope = 2.0\namplitude = 1.0\n",
        )
        .unwrap();
        let d = c.diffusion.build(Path::new("."), Seed(1)).unwrap();
        match d {
            Diffusion::Generalized(v) => {
                let comp = &v.spec().components[0];
                assert_eq!((comp.lower, comp.upper), (2.0, 3.0));
            }
            _ => panic!("expected a drift"),
        }
    }
}
