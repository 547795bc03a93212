//! JSON run configuration. Unknown keys are rejected everywhere.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

fn default_side() -> usize {
    24
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    /// Absolute tolerance for quadratures and series; per-component defaults when absent.
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub u_grid: Option<UGrid>,
    #[serde(default)]
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub sup: Option<SupConfig>,
    #[serde(default)]
    pub growth: Option<GrowthConfig>,
    #[serde(default)]
    pub covering: Option<CoveringConfig>,
    #[serde(default)]
    pub simulate: Option<SimulateConfig>,
}

/// Either explicit levels or `num` points from `start` to `stop`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UGrid {
    List(Vec<f64>),
    Range(URange),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct URange {
    pub start: f64,
    pub stop: f64,
    pub num: usize,
    /// Geometric spacing.
    #[serde(default)]
    pub log: bool,
}

impl UGrid {
    pub fn levels(&self) -> Result<Vec<f64>> {
        match self {
            UGrid::List(v) => Ok(v.clone()),
            UGrid::Range(r) => {
                if r.num == 0 {
                    bail!("u_grid.num must be positive");
                }
                if r.num == 1 {
                    return Ok(vec![r.start]);
                }
                if r.log && !(r.start > 0.0 && r.stop > 0.0) {
                    bail!("log-spaced u_grid needs positive start and stop");
                }
                let n = (r.num - 1) as f64;
                Ok((0..r.num)
                    .map(|i| {
                        let f = i as f64 / n;
                        if i == 0 {
                            r.start
                        } else if i + 1 == r.num {
                            r.stop
                        } else if r.log {
                            (r.start.ln() + f * (r.stop.ln() - r.start.ln())).exp()
                        } else {
                            r.start + f * (r.stop - r.start)
                        }
                    })
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub h: f64,
    #[serde(default = "one")]
    pub rho: f64,
    #[serde(default = "one")]
    pub l: f64,
    #[serde(default = "one")]
    pub c0: f64,
    #[serde(default = "one")]
    pub c_phi: f64,
    #[serde(default = "two")]
    pub alpha: f64,
    #[serde(default)]
    pub spectral: Option<SpectralConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectralConfig {
    /// Density `sigma2 / (1 + λ²)^{2 alpha}` with moment order `eps`.
    Matern { sigma2: f64, alpha: f64, eps: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectConfig {
    pub t: [f64; 2],
    pub x: [f64; 2],
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxConfig {
    pub t: [f64; 2],
    pub x: [f64; 2],
    pub exponents: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Power { scale: f64, exponent: f64 },
    Tabulated { h: Vec<f64>, sigma: Vec<f64> },
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum ThetaConfig {
    #[default]
    Optimize,
    Fixed { value: f64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyMode {
    #[default]
    Closed,
    Numeric,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupConfig {
    pub field: SupField,
    #[serde(default)]
    pub theta: ThetaConfig,
    #[serde(default)]
    pub entropy: EntropyMode,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SupField {
    /// Any field given by its `ε₀`, box and Hölder profile.
    Generic {
        #[serde(default = "two")]
        alpha: f64,
        #[serde(rename = "box")]
        bx: BoxConfig,
        profile: ProfileConfig,
        eps0: f64,
        #[serde(default)]
        gamma0: Option<f64>,
    },
    /// Noise part of the heat equation, from `model`.
    V { rect: RectConfig },
    /// Initial-condition part, from `model`.
    Omega { rect: RectConfig },
    /// Initial-condition part with the stationary spectral initial condition of `model.spectral`.
    OmegaSpectral { rect: RectConfig },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthConfig {
    pub spec: GrowthKind,
    #[serde(default)]
    pub max_terms: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GrowthKind {
    /// Noise part of the heat equation with weight `max(t^{H/2} |ln t|^p, 1)`.
    She { p: f64, half_width: f64 },
    /// Cells `[e^{k−1}, e^k]`, weight `max(t^a |ln t|^p, 1)`, envelope `c_delta t^delta`.
    Generic {
        half_width: f64,
        gamma: f64,
        exponents: [f64; 2],
        #[serde(default = "two")]
        alpha: f64,
        weight_exponent: f64,
        log_power: f64,
        c_delta: f64,
        delta: f64,
        cell_constant: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringConfig {
    #[serde(rename = "box")]
    pub bx: BoxConfig,
    pub eps: Vec<f64>,
    #[serde(default)]
    pub resolution: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimField {
    V,
    OmegaSpectral,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub field: SimField,
    pub rect: RectConfig,
    #[serde(default = "default_side")]
    pub nt: usize,
    #[serde(default = "default_side")]
    pub nx: usize,
    pub samples: usize,
    #[serde(default)]
    pub theta: ThetaConfig,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("invalid configuration")
    }

    /// SHA-256 of the canonical (key-sorted, compact) JSON form.
    pub fn hash(&self) -> Result<String> {
        let canonical = serde_json::to_vec(&serde_json::to_value(self)?)?;
        Ok(hex::encode(Sha256::digest(&canonical)))
    }

    pub fn u_levels(&self) -> Result<Vec<f64>> {
        self.u_grid.as_ref().context("config needs a u_grid")?.levels()
    }
}
