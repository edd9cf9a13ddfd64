//! Experiment configuration, read from TOML.
//!
//! Every field except `preset` is optional; unset fields take the preset's
//! defaults, which are the acceptance settings.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Module {
    Transport1d,
    Hyp1d,
    Pipe3d,
    Divcurl,
    Trace,
    Compare,
    Suite,
}

impl Module {
    pub fn name(self) -> &'static str {
        match self {
            Module::Transport1d => "transport1d",
            Module::Hyp1d => "hyp1d",
            Module::Pipe3d => "pipe3d",
            Module::Divcurl => "divcurl",
            Module::Trace => "trace",
            Module::Compare => "compare",
            Module::Suite => "suite",
        }
    }

    pub fn presets(self) -> &'static [&'static str] {
        match self {
            Module::Transport1d => &["translation", "flush-test"],
            Module::Hyp1d => &["burgers-small", "shock-contrast"],
            Module::Pipe3d => &["product-cosine", "plug-pulse", "compat-vectors", "divcurl-manufactured"],
            Module::Divcurl => &["manufactured", "divcurl-manufactured"],
            Module::Trace => &["lateral-invariance"],
            Module::Compare => &["compare"],
            Module::Suite => &["acceptance"],
        }
    }

    /// Dimension of the grids the module runs on, if any.
    fn grid_dim(self) -> Option<usize> {
        match self {
            Module::Transport1d | Module::Hyp1d => Some(1),
            Module::Pipe3d | Module::Divcurl => Some(3),
            _ => None,
        }
    }
}

/// Shear profile selection for `pipe3d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileConfig {
    Plug { c: f64 },
    CosineShear { c: f64, m: u32 },
    ProductCosine { c: f64 },
}

/// Boundary data selection for `pipe3d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryConfig {
    /// Uniform pulse through both end faces.
    Pulse,
    Zero,
}

/// A scalar coefficient function for `transport1d`: a named shape or the
/// coefficients of a polynomial, lowest degree first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FnSpec {
    Named(String),
    Coefficients(Vec<f64>),
}

impl FnSpec {
    /// Named shapes accepted for each role.
    pub fn names(role: &str) -> &'static [&'static str] {
        match role {
            "speed" => &["unit", "quadratic"],
            "f0" => &["wave", "flush", "zero"],
            "b" => &["zero", "wave"],
            _ => &["zero", "unit"],
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FnSpec::Named(n) => n == "zero",
            FnSpec::Coefficients(c) => c.iter().all(|&a| a == 0.0),
        }
    }

    fn validate(&self, role: &str) -> std::result::Result<(), String> {
        match self {
            FnSpec::Named(n) if !Self::names(role).contains(&n.as_str()) => {
                Err(format!("unknown {role} shape `{n}`; known: {}", Self::names(role).join(", ")))
            }
            FnSpec::Coefficients(c) if c.is_empty() || c.iter().any(|a| !a.is_finite()) => {
                Err(format!("{role} coefficients must be finite and non-empty"))
            }
            _ => Ok(()),
        }
    }
}

pub const SYSTEMS: [&str; 3] = ["burgers", "linear2", "psystem"];

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Filled from the subcommand when absent; must agree with it otherwise.
    pub module: Option<Module>,
    pub preset: String,
    /// Grid sizes (nodes per direction), coarse to fine.
    pub grids: Option<Vec<usize>>,
    pub horizon: Option<f64>,
    pub amplitude: Option<f64>,
    pub dt: Option<f64>,
    /// Lebesgue exponent for the 3D norms.
    pub p: Option<f64>,
    /// Iteration stopping tolerance.
    pub tol: Option<f64>,
    /// Number of random samples, where the preset draws any.
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub profile: Option<ProfileConfig>,
    pub boundary: Option<BoundaryConfig>,
    /// `compare`: the two reports and the relative tolerance.
    pub report_a: Option<PathBuf>,
    pub report_b: Option<PathBuf>,
    pub tolerance: Option<f64>,
    /// `compare`: the columns (`name` or `table:name`) the tolerance applies
    /// to; all when absent.
    pub columns: Option<Vec<String>>,
    /// `suite`: which criteria to run (all when absent).
    pub criteria: Option<Vec<u8>>,
    /// `transport1d` flush-test: speed `lambda(x)`, initial datum, inflow
    /// datum `b(t)`, forcing `h(x)` and the weight exponent.
    pub speed: Option<FnSpec>,
    pub f0: Option<FnSpec>,
    pub b: Option<FnSpec>,
    pub h: Option<FnSpec>,
    pub alpha: Option<f64>,
    /// `hyp1d` burgers-small: catalog system, bump mode of the datum,
    /// outer level cap, iterate budget and data budget.
    pub system: Option<String>,
    pub mode: Option<u32>,
    pub l_max: Option<usize>,
    pub delta: Option<f64>,
    pub eps0: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(module: Module, preset: &str) -> Self {
        Self { module: Some(module), preset: preset.into(), ..Self::default() }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn module(&self) -> Module {
        self.module.expect("module is set by bind")
    }

    /// Sets the module from the subcommand and validates.
    pub fn bind(mut self, module: Module) -> Result<Self> {
        match self.module {
            Some(m) if m != module => {
                return Err(HarnessError::Config(format!(
                    "config is for module `{}`, not `{}`",
                    m.name(),
                    module.name()
                )))
            }
            _ => self.module = Some(module),
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let module = self.module.ok_or_else(|| HarnessError::Config("module not set".into()))?;
        let bad = |m: String| Err(HarnessError::Config(m));
        if !module.presets().contains(&self.preset.as_str()) {
            return bad(format!(
                "unknown preset `{}` for `{}`; known: {}",
                self.preset,
                module.name(),
                module.presets().join(", ")
            ));
        }
        if let Some(grids) = &self.grids {
            let Some(dim) = module.grid_dim() else {
                return bad(format!("module `{}` takes no grids", module.name()));
            };
            let (lo, hi) = if dim == 1 { (16, 1024) } else { (16, 64) };
            if grids.is_empty() {
                return bad("grids must not be empty".into());
            }
            for &n in grids {
                if !n.is_power_of_two() || n < lo || n > hi {
                    return bad(format!("grid size {n} must be a power of two in [{lo}, {hi}]"));
                }
            }
        }
        for (name, v) in [
            ("horizon", self.horizon),
            ("dt", self.dt),
            ("tol", self.tol),
            ("tolerance", self.tolerance),
            ("amplitude", self.amplitude),
            ("alpha", self.alpha),
            ("delta", self.delta),
            ("eps0", self.eps0),
        ] {
            if let Some(x) = v {
                if !(x.is_finite() && x > 0.0) {
                    return bad(format!("{name} must be positive and finite, got {x}"));
                }
            }
        }
        if let Some(p) = self.p {
            if !(p.is_finite() && p > 3.0) {
                return bad(format!("p must exceed 3, got {p}"));
            }
        }
        if self.samples == Some(0) {
            return bad("samples must be positive".into());
        }
        if let Some(ProfileConfig::Plug { c } | ProfileConfig::CosineShear { c, .. } | ProfileConfig::ProductCosine { c }) =
            self.profile
        {
            if !(c.is_finite() && c > 0.0) {
                return bad(format!("profile constant must be positive, got {c}"));
            }
        }
        if module == Module::Compare && (self.report_a.is_none() || self.report_b.is_none()) {
            return bad("compare needs report_a and report_b".into());
        }
        let one_d = [("speed", &self.speed), ("f0", &self.f0), ("b", &self.b), ("h", &self.h)];
        for (role, spec) in one_d {
            if let Some(spec) = spec {
                if module != Module::Transport1d {
                    return bad(format!("`{role}` applies to transport1d only"));
                }
                spec.validate(role).or_else(bad)?;
            }
        }
        if let Some(FnSpec::Coefficients(c)) = &self.speed {
            let lo = (0..=2000).map(|j| polynomial(c, -1.0 + j as f64 / 1000.0)).fold(f64::INFINITY, f64::min);
            let hi = (0..=2000).map(|j| polynomial(c, -1.0 + j as f64 / 1000.0)).fold(f64::NEG_INFINITY, f64::max);
            if lo <= 0.0 && hi >= 0.0 {
                return bad("speed must not vanish on [-1, 1]".into());
            }
        }
        let hyp = self.system.is_some() || self.mode.is_some() || self.l_max.is_some() || self.delta.is_some() || self.eps0.is_some();
        if hyp && module != Module::Hyp1d {
            return bad("system, mode, l_max, delta and eps0 apply to hyp1d only".into());
        }
        if self.alpha.is_some() && module != Module::Transport1d {
            return bad("`alpha` applies to transport1d only".into());
        }
        if let Some(system) = &self.system {
            if !SYSTEMS.contains(&system.as_str()) {
                return bad(format!("unknown system `{system}`; known: {}", SYSTEMS.join(", ")));
            }
        }
        if self.mode == Some(0) || self.l_max == Some(0) {
            return bad("mode and l_max must be positive".into());
        }
        if let Some(ids) = &self.criteria {
            if let Some(id) = ids.iter().find(|&&i| !(1..=9).contains(&i)) {
                return bad(format!("unknown criterion {id}"));
            }
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON of the config, hex encoded. The
    /// output directory does not take part.
    pub fn hash(&self, seed: u64) -> String {
        let mut c = self.clone();
        c.out = None;
        c.seed = Some(seed);
        let json = serde_json::to_vec(&c).expect("config serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// `c[0] + c[1] x + c[2] x^2 + ...`.
pub fn polynomial(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

/// Derivative of [`polynomial`].
pub fn polynomial_dx(c: &[f64], x: f64) -> f64 {
    c.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, a)| acc * x + k as f64 * a)
}
