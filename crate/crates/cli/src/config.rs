//! JSON run configuration with dot-path overrides.

use std::path::{Path, PathBuf};

use dpem_core::{
    ComponentPrior, Drift, ExtrapolationConfig, InitialPrior, Intensity, KnotConfig, PriorSpec, RjConfig,
    SamplerConfig, SchemeKind, SigmaPrior,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{resolve, CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataConfig,
    pub baseline: ComponentConfig,
    /// One entry per entry of `data.covariates`.
    #[serde(default)]
    pub covariates: Vec<ComponentConfig>,
    #[serde(default)]
    pub sampler: SamplerSection,
    #[serde(default)]
    pub extrapolation: ExtrapolationConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    /// CSV path, relative to the configuration file.
    pub path: PathBuf,
    /// Administrative censoring time `y+`.
    pub y_plus: f64,
    #[serde(default)]
    pub covariates: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentConfig {
    pub drift: Drift,
    #[serde(default = "skew")]
    pub scheme: SchemeKind,
    #[serde(default = "initial")]
    pub initial: InitialPrior,
    #[serde(default = "sigma")]
    pub sigma: SigmaPrior,
    #[serde(default = "omega")]
    pub omega: f64,
    pub intensity: Intensity,
}

fn skew() -> SchemeKind {
    SchemeKind::SkewSymmetric
}
fn initial() -> InitialPrior {
    InitialPrior::Normal { sd: 2.0 }
}
fn sigma() -> SigmaPrior {
    SigmaPrior::Exponential { rate: 2.0 }
}
fn omega() -> f64 {
    0.5
}

impl ComponentConfig {
    pub fn to_prior(&self, y_plus: f64) -> ComponentPrior {
        ComponentPrior {
            drift: self.drift.clone(),
            scheme: self.scheme,
            initial: self.initial,
            sigma: self.sigma,
            knots: KnotConfig {
                omega: self.omega,
                intensity: self.intensity,
                window: y_plus,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Pdmp,
    Rj,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSection {
    pub method: Method,
    pub chains: usize,
    pub seed: u64,
    pub pdmp: SamplerConfig,
    pub rj: RjConfig,
}

impl Default for SamplerSection {
    fn default() -> Self {
        Self {
            method: Method::Pdmp,
            chains: 2,
            seed: 1,
            pdmp: SamplerConfig::default(),
            rj: RjConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Number of points in curve grids.
    pub grid_points: usize,
    /// Covariate vectors at which estimands are reported; empty means the
    /// all-zero vector. With two profiles the summary also reports the
    /// difference of the second minus the first.
    pub profiles: Vec<Vec<f64>>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            grid_points: 100,
            profiles: Vec::new(),
        }
    }
}

impl RunConfig {
    /// Reads a configuration, applying `key.path=value` overrides first.
    pub fn load(path: &Path, overrides: &[String]) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::missing(path, e))?;
        let mut value: Value =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        let mut cfg: RunConfig =
            serde_json::from_value(value).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.data.path = resolve(path.parent(), &cfg.data.path);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.data.y_plus > 0.0 && self.data.y_plus.is_finite()) {
            return bad(format!("data.y_plus must be positive, got {}", self.data.y_plus));
        }
        if self.covariates.len() != self.data.covariates.len() {
            return bad(format!(
                "covariates: {} priors given for {} data covariates",
                self.covariates.len(),
                self.data.covariates.len()
            ));
        }
        if self.sampler.chains == 0 {
            return bad("sampler.chains must be at least 1".into());
        }
        if self.output.grid_points == 0 {
            return bad("output.grid_points must be at least 1".into());
        }
        if let Some(p) = self.output.profiles.iter().find(|p| p.len() != self.data.covariates.len()) {
            return bad(format!("output.profiles: {p:?} does not match {} covariates", self.data.covariates.len()));
        }
        let field = |name: &str, r: dpem_core::Result<()>| r.map_err(|e| CliError::Config(format!("{name}: {e}")));
        let prior = self.prior();
        field("baseline", prior.baseline.validate())?;
        for (i, c) in prior.covariates.iter().enumerate() {
            field(&format!("covariates.{i}"), c.validate())?;
        }
        field("sampler.pdmp", self.sampler.pdmp.validate())?;
        field("sampler.rj", self.sampler.rj.validate())?;
        field("extrapolation", self.extrapolation.validate(self.data.y_plus))?;
        if self.sampler.method == Method::Rj && !self.covariates.is_empty() {
            return bad("sampler.method: rj supports baseline-only models".into());
        }
        Ok(())
    }

    pub fn prior(&self) -> PriorSpec {
        let y = self.data.y_plus;
        PriorSpec {
            baseline: self.baseline.to_prior(y),
            covariates: self.covariates.iter().map(|c| c.to_prior(y)).collect(),
        }
    }

    pub fn profiles(&self) -> Vec<Vec<f64>> {
        if self.output.profiles.is_empty() {
            vec![vec![0.0; self.data.covariates.len()]]
        } else {
            self.output.profiles.clone()
        }
    }

    /// SHA-256 of the configuration without the output directory, as hex.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.dir = PathBuf::new();
        let bytes = serde_json::to_vec(&c).expect("config serialises");
        hex::encode(&Sha256::digest(&bytes)[..8])
    }
}

/// Sets `a.b.0.c=value`; the value is parsed as JSON, falling back to a string.
pub fn apply_override(root: &mut Value, spec: &str) -> CliResult<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{spec}` is not key=value")))?;
    let new: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let keys: Vec<&str> = path.split('.').collect();
    let mut node = root;
    for (depth, key) in keys.iter().enumerate() {
        let last = depth + 1 == keys.len();
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(key.to_string(), new);
                    return Ok(());
                }
                map.entry(key.to_string()).or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let i: usize = key
                    .parse()
                    .map_err(|_| CliError::Config(format!("override `{path}`: `{key}` is not an index")))?;
                let len = items.len();
                let slot = items
                    .get_mut(i)
                    .ok_or_else(|| CliError::Config(format!("override `{path}`: index {i} out of {len}")))?;
                if last {
                    *slot = new;
                    return Ok(());
                }
                slot
            }
            _ => return Err(CliError::Config(format!("override `{path}`: `{key}` is not inside an object"))),
        };
    }
    Err(CliError::Config(format!("override `{spec}` has an empty key")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn overrides_nested_scalars_and_indices() {
        let mut v = json!({"a": {"b": 1}, "xs": [{"y": 1}]});
        apply_override(&mut v, "a.b=2.5").unwrap();
        apply_override(&mut v, "xs.0.y=\"z\"").unwrap();
        apply_override(&mut v, "a.new=word").unwrap();
        assert_eq!(v, json!({"a": {"b": 2.5, "new": "word"}, "xs": [{"y": "z"}]}));
        assert!(apply_override(&mut v, "xs.3.y=1").is_err());
        assert!(apply_override(&mut v, "novalue").is_err());
    }
}
