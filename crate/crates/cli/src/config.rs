//! Run configuration: a TOML file with nested sections. Numbers may be
//! written as decimals or as exact rationals (`"1/3200"`), which are parsed
//! as integer ratios before conversion; the standard parameter schedules
//! are all rational.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use diskgap_core::boundary::{BoundaryKind, FourierBoundaryData};
use serde::{Deserialize, Serialize};

/// A number that deserializes from a TOML float/integer or a rational
/// string.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Float(f64),
    Int(i64),
    Rational(String),
}

impl Num {
    pub fn value(&self) -> Result<f64> {
        match self {
            Num::Float(v) => Ok(*v),
            Num::Int(v) => Ok(*v as f64),
            Num::Rational(s) => parse_rational(s),
        }
    }
}

fn parse_rational(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num
            .trim()
            .parse()
            .with_context(|| format!("bad rational numerator in {s:?}"))?;
        let d: i64 = den
            .trim()
            .parse()
            .with_context(|| format!("bad rational denominator in {s:?}"))?;
        if d == 0 {
            bail!("zero denominator in {s:?}");
        }
        Ok(n as f64 / d as f64)
    } else {
        s.parse::<f64>()
            .with_context(|| format!("not a number: {s:?}"))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometrySection {
    pub r_i: Num,
    pub r_e: Num,
    /// Gap for the single-configuration tasks.
    pub eps: Option<Num>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConductivitySection {
    pub k: Option<Num>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundarySection {
    /// `"neumann"` or `"dirichlet"`.
    pub kind: String,
    #[serde(default)]
    pub cos: Vec<Num>,
    #[serde(default)]
    pub sin: Vec<Num>,
    pub mode_cap: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileSection {
    /// `"inner"` or `"outer"` one-sided limit on `∂D`.
    #[serde(default = "default_side")]
    pub side: String,
    /// `"xi"` or `"theta"` gradient component for the asymptotic columns.
    #[serde(default = "default_component")]
    pub component: String,
    #[serde(default = "default_profile_n")]
    pub n_theta: usize,
}

fn default_side() -> String {
    "outer".into()
}
fn default_component() -> String {
    "xi".into()
}
fn default_profile_n() -> usize {
    1024
}

impl Default for ProfileSection {
    fn default() -> Self {
        ProfileSection {
            side: default_side(),
            component: default_component(),
            n_theta: default_profile_n(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSection {
    pub resolution: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSection {
    /// Gap schedule, coarsest first.
    pub eps: Vec<Num>,
    /// Explicit conductivities, one per gap …
    pub k: Option<Vec<Num>>,
    /// … or a rule: `"k2eps=<c>"` (k²ε = c) or `"k2overEps=<c>"` (k²/ε = c).
    pub schedule: Option<String>,
    #[serde(default = "default_sweep_theta")]
    pub n_theta: usize,
    #[serde(default = "default_sweep_levels")]
    pub n_levels: usize,
}

fn default_sweep_theta() -> usize {
    4096
}
fn default_sweep_levels() -> usize {
    24
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveSection {
    /// Evaluation points in the un-translated frame.
    pub points: Vec<[Num; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct OutputSection {
    pub path: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToleranceSection {
    /// Relative dual-solver agreement required by profiles and solve.
    #[serde(default = "default_agreement")]
    pub agreement: f64,
    /// Truncation tolerance of the reflection series.
    #[serde(default = "default_series_tol")]
    pub series_tol: f64,
}

fn default_agreement() -> f64 {
    1e-8
}
fn default_series_tol() -> f64 {
    1e-10
}

impl Default for ToleranceSection {
    fn default() -> Self {
        ToleranceSection {
            agreement: default_agreement(),
            series_tol: default_series_tol(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct ValidateSection {
    /// Also run the sweep-scale invariants (minutes instead of seconds).
    #[serde(default)]
    pub deep: bool,
}

/// Whole configuration file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub geometry: GeometrySection,
    #[serde(default)]
    pub conductivity: Option<ConductivitySection>,
    pub boundary: BoundarySection,
    #[serde(default)]
    pub profile: Option<ProfileSection>,
    #[serde(default)]
    pub grid: Option<GridSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub solve: Option<SolveSection>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub tolerances: ToleranceSection,
    #[serde(default)]
    pub validate: Option<ValidateSection>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let cfg: RunConfig = toml::from_str(&text).context("cannot parse config file")?;
        Ok(cfg)
    }

    pub fn geometry_values(&self) -> Result<(f64, f64)> {
        Ok((self.geometry.r_i.value()?, self.geometry.r_e.value()?))
    }

    pub fn eps(&self) -> Result<f64> {
        self.geometry
            .eps
            .as_ref()
            .ok_or_else(|| anyhow!("config needs geometry.eps for this task"))?
            .value()
    }

    pub fn k(&self) -> Result<f64> {
        self.conductivity
            .as_ref()
            .and_then(|c| c.k.as_ref())
            .ok_or_else(|| anyhow!("config needs conductivity.k for this task"))?
            .value()
    }

    pub fn boundary_kind(&self) -> Result<BoundaryKind> {
        match self.boundary.kind.to_ascii_lowercase().as_str() {
            "neumann" => Ok(BoundaryKind::Neumann),
            "dirichlet" => Ok(BoundaryKind::Dirichlet),
            other => bail!("boundary.kind must be neumann or dirichlet, got {other:?}"),
        }
    }

    pub fn boundary_data(&self) -> Result<FourierBoundaryData> {
        let kind = self.boundary_kind()?;
        let cos: Vec<f64> = self
            .boundary
            .cos
            .iter()
            .map(Num::value)
            .collect::<Result<_>>()?;
        let sin: Vec<f64> = self
            .boundary
            .sin
            .iter()
            .map(Num::value)
            .collect::<Result<_>>()?;
        let cap = self.boundary.mode_cap.unwrap_or(64);
        FourierBoundaryData::with_mode_cap(kind, &cos, &sin, cap)
            .map_err(|e| anyhow!("invalid boundary data: {e}"))
    }

    /// Resolves the sweep schedule into `(ε, k)` pairs.
    pub fn sweep_points(&self) -> Result<Vec<(f64, f64)>> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| anyhow!("config needs a [sweep] section"))?;
        let eps: Vec<f64> = sweep.eps.iter().map(Num::value).collect::<Result<_>>()?;
        if eps.is_empty() {
            bail!("sweep.eps must list at least one gap");
        }
        let ks: Vec<f64> = match (&sweep.k, &sweep.schedule) {
            (Some(list), None) => {
                let ks: Vec<f64> = list.iter().map(Num::value).collect::<Result<_>>()?;
                if ks.len() != eps.len() {
                    bail!("sweep.k must have one entry per sweep.eps entry");
                }
                ks
            }
            (None, Some(rule)) => {
                let (name, val) = rule
                    .split_once('=')
                    .ok_or_else(|| anyhow!("schedule must look like k2eps=<c>"))?;
                let c = parse_rational(val)?;
                if !(c.is_finite() && c > 0.0) {
                    bail!("schedule constant must be positive, got {c}");
                }
                match name.trim() {
                    "k2eps" => eps
                        .iter()
                        .map(|e| Ok((c / e).sqrt()))
                        .collect::<Result<_>>()?,
                    "k2overEps" => eps
                        .iter()
                        .map(|e| Ok((c * e).sqrt()))
                        .collect::<Result<_>>()?,
                    other => bail!("unknown schedule rule {other:?}"),
                }
            }
            (Some(_), Some(_)) => bail!("give either sweep.k or sweep.schedule, not both"),
            (None, None) => bail!("sweep needs sweep.k or sweep.schedule"),
        };
        if ks.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
            bail!("schedule produced a non-positive conductivity");
        }
        Ok(eps.into_iter().zip(ks).collect())
    }

    /// Re-serialization for the self-describing output headers.
    pub fn describe(&self) -> String {
        toml::to_string(self).unwrap_or_else(|_| String::from("<unprintable config>"))
    }
}
