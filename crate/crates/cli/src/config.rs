use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use henon_core::function::EntireFunction;
use henon_core::lacunary::{EntropyProfile, DEFAULT_CERTIFY_CAP, DEFAULT_N_CAP};
use henon_core::symbolic::DiskLayout;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A function given inline or as a path to a JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSource {
    Path(PathBuf),
    Inline(EntireFunction),
}

impl Default for FunctionSource {
    fn default() -> Self {
        FunctionSource::Inline(EntireFunction::exp())
    }
}

impl FunctionSource {
    /// Parses a command-line value: inline JSON when it starts with `{`,
    /// otherwise a path.
    pub fn from_arg(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            let f: EntireFunction = serde_json::from_str(s).context("malformed inline function")?;
            Ok(FunctionSource::Inline(f))
        } else {
            Ok(FunctionSource::Path(PathBuf::from(s)))
        }
    }

    pub fn load(&self) -> Result<EntireFunction> {
        let f = match self {
            FunctionSource::Inline(f) => f.clone(),
            FunctionSource::Path(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading function file {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("malformed function file {}", p.display()))?
            }
        };
        f.validate()?;
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Geometry {
    /// Explicit disk centers; when absent, `k` centers `i, 2i, ..., ki`.
    pub centers: Option<Vec<Complex64>>,
    pub k: usize,
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry { centers: None, k: 5, r: 0.3, big_r: 0.45 }
    }
}

impl Geometry {
    pub fn layout(&self) -> DiskLayout {
        match &self.centers {
            Some(c) => DiskLayout::new(c.clone(), self.r, self.big_r),
            None => DiskLayout::imaginary_axis(self.k, self.r, self.big_r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertifyMode {
    MonomialDominated,
    PolynomialLike,
    HenonLike,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertifyOptions {
    pub mode: CertifyMode,
    pub radius: f64,
    pub samples: usize,
    /// Horizontal lines for the degree independence sweep.
    pub lines: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { mode: CertifyMode::MonomialDominated, radius: 2.0, samples: 1024, lines: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeOptions {
    pub half_width: f64,
    pub step: f64,
    pub n_values: Vec<u32>,
    pub epsilon: f64,
    pub proximity: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { half_width: 2.0, step: 0.05, n_values: vec![5, 10, 20, 40], epsilon: 0.5, proximity: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransitionOptions {
    pub n_min: u32,
    pub n_max: u32,
    /// Richness threshold on `#J(i, l)`; `k - 2` when absent.
    pub required: Option<usize>,
}

impl Default for TransitionOptions {
    fn default() -> Self {
        TransitionOptions { n_min: 1, n_max: 60, required: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EntropyOptions {
    pub depth: usize,
    pub grid_step: f64,
    /// Separation threshold; half the smallest disk gap when absent.
    pub epsilon: Option<f64>,
    pub max_word_length: usize,
    pub max_seeds: usize,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions { depth: 2, grid_step: 0.1, epsilon: None, max_word_length: 10, max_seeds: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LacunaryOptions {
    pub profile: EntropyProfile,
    pub terms: usize,
    pub n_cap: u64,
    pub certify_cap: u64,
}

impl Default for LacunaryOptions {
    fn default() -> Self {
        LacunaryOptions {
            profile: EntropyProfile::Log1p,
            terms: 3,
            n_cap: DEFAULT_N_CAP,
            certify_cap: DEFAULT_CERTIFY_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeedGrid {
    pub lo: f64,
    pub hi: f64,
    pub per_axis: usize,
}

impl Default for SeedGrid {
    fn default() -> Self {
        SeedGrid { lo: -5.0, hi: 5.0, per_axis: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PeriodicOptions {
    pub period: usize,
    /// When set, the orbit is built from this itinerary over the
    /// transition structure of `geometry`; otherwise a Newton sweep runs.
    pub itinerary: Option<Vec<usize>>,
    pub seed_grid: SeedGrid,
    /// Rescaling index for the sweep map.
    pub n: u32,
}

impl Default for PeriodicOptions {
    fn default() -> Self {
        PeriodicOptions { period: 3, itinerary: None, seed_grid: SeedGrid::default(), n: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub residual: f64,
    pub graph: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { residual: 1e-9, graph: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub function: FunctionSource,
    pub delta: Complex64,
    pub geometry: Geometry,
    pub tolerances: Tolerances,
    pub certify: CertifyOptions,
    pub probe: ProbeOptions,
    pub transition: TransitionOptions,
    pub entropy: EntropyOptions,
    pub lacunary: LacunaryOptions,
    pub periodic: PeriodicOptions,
    pub out: PathBuf,
    pub emit_csv: bool,
    pub emit_svg: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            function: FunctionSource::default(),
            delta: Complex64::new(0.1, 0.0),
            geometry: Geometry::default(),
            tolerances: Tolerances::default(),
            certify: CertifyOptions::default(),
            probe: ProbeOptions::default(),
            transition: TransitionOptions::default(),
            entropy: EntropyOptions::default(),
            lacunary: LacunaryOptions::default(),
            periodic: PeriodicOptions::default(),
            out: PathBuf::from("out"),
            emit_csv: true,
            emit_svg: false,
        }
    }
}

impl RunConfig {
    /// Reads a config file; a relative function path is resolved against
    /// the file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("malformed config {}", path.display()))?;
        if let FunctionSource::Path(p) = &cfg.function {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    cfg.function = FunctionSource::Path(dir.join(p));
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("delta modulus", self.delta.norm()),
            ("geometry.r", self.geometry.r),
            ("geometry.R", self.geometry.big_r),
            ("tolerances.residual", self.tolerances.residual),
            ("tolerances.graph", self.tolerances.graph),
            ("certify.radius", self.certify.radius),
            ("probe.step", self.probe.step),
            ("probe.epsilon", self.probe.epsilon),
            ("probe.proximity", self.probe.proximity),
            ("probe.half_width", self.probe.half_width),
            ("entropy.grid_step", self.entropy.grid_step),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name} must be positive and finite (got {v})");
            }
        }
        if let Some(e) = self.entropy.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                bail!("entropy.epsilon must be positive and finite (got {e})");
            }
        }
        if self.transition.n_min == 0 || self.transition.n_min > self.transition.n_max {
            bail!("transition n range must satisfy 1 <= n_min <= n_max");
        }
        if self.periodic.seed_grid.per_axis == 0 || !(self.periodic.seed_grid.lo < self.periodic.seed_grid.hi) {
            bail!("periodic.seed_grid needs per_axis >= 1 and lo < hi");
        }
        if self.periodic.n == 0 {
            bail!("periodic.n must be at least 1");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let cfg = RunConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn partial_config_fills_defaults() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"delta": [0.5, 0.0], "function": {"kind": "poly", "coefficients": [[0,0],[0,0],[1,0]]}}"#,
        )
        .unwrap();
        assert_eq!(cfg.delta, Complex64::new(0.5, 0.0));
        assert_eq!(cfg.geometry, Geometry::default());
        assert!(matches!(cfg.function, FunctionSource::Inline(_)));
    }

    #[test]
    fn unknown_field_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"deltta": [0.5, 0.0]}"#).is_err());
    }

    #[test]
    fn nonpositive_tolerance_rejected() {
        let mut cfg = RunConfig::default();
        cfg.tolerances.residual = 0.0;
        assert!(cfg.validate().is_err());
    }
}
