//! Reproducible experiment runs: parameter validation, execution, and the
//! `results.json` / `results.csv` artifacts.

mod experiments;
pub mod output;
pub mod params;
pub mod symbols;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

pub use experiments::{random_jet, random_weights, u_power_real};
pub use output::{Outcome, Row};
pub use params::Params;
pub use symbols::{parse_jet, parse_kernel_poly, symbol_parse, ParsedSymbol};

/// Recorded with every result so that numbers can be traced to the
/// conventions they were computed under.
pub const CONVENTIONS: &str =
    "btq-conventions/1: int omega = 1, dv = omega; chart z = (x1 - i x2)/(1 + x3); {x1,x2} = 2 x3; [T_f,T_g] ~ (i/p) T_{f,g}; P(Z,Z') = prod(a_j/2pi) exp(-1/4 sum a_j(|z_j|^2 + |z'_j|^2 - 2 z_j zbar'_j))";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl HarnessError {
    /// 2 for configuration problems, 1 for failed assertions.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io { .. } => 2,
            HarnessError::Assertion(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Ktable,
    Spectrum,
    C1Identity,
    FockVerify,
    SphereNorm,
    SphereCommutator,
    SphereProduct,
    BergmanDiag,
    OrbifoldCommutator,
    OrbifoldBergman,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::Ktable,
        Experiment::Spectrum,
        Experiment::C1Identity,
        Experiment::FockVerify,
        Experiment::SphereNorm,
        Experiment::SphereCommutator,
        Experiment::SphereProduct,
        Experiment::BergmanDiag,
        Experiment::OrbifoldCommutator,
        Experiment::OrbifoldBergman,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Ktable => "ktable",
            Experiment::Spectrum => "spectrum",
            Experiment::C1Identity => "c1-identity",
            Experiment::FockVerify => "fock-verify",
            Experiment::SphereNorm => "sphere-norm",
            Experiment::SphereCommutator => "sphere-commutator",
            Experiment::SphereProduct => "sphere-product",
            Experiment::BergmanDiag => "bergman-diag",
            Experiment::OrbifoldCommutator => "orbifold-commutator",
            Experiment::OrbifoldBergman => "orbifold-bergman",
        }
    }

    pub fn from_name(name: &str) -> Option<Experiment> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    experiment: String,
    #[serde(default)]
    params: BTreeMap<String, Value>,
    #[serde(default)]
    out: Option<PathBuf>,
    #[serde(default)]
    oracle: bool,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub params: BTreeMap<String, Value>,
    /// Directory for `results.json` and `results.csv`; nothing is written when absent.
    pub out: Option<PathBuf>,
    pub oracle: bool,
}

impl RunConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self { experiment, params: BTreeMap::new(), out: None, oracle: false }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        let experiment = Experiment::from_name(&file.experiment)
            .ok_or_else(|| HarnessError::Config(format!("unknown experiment `{}`", file.experiment)))?;
        Ok(Self { experiment, params: file.params, out: file.out, oracle: file.oracle })
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, HarnessError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("BTQ_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| HarnessError::Config(format!("BTQ_THREADS must be a positive integer, got `{v}`")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| HarnessError::Config(e.to_string()))
}

/// Validates the parameters, runs the experiment and writes the artifacts.
/// The returned outcome may have `pass == false`; [`run`] turns that into an
/// error.
pub fn execute(config: &RunConfig) -> Result<Outcome, HarnessError> {
    let mut params = Params::new(config.experiment, config.params.clone())?;
    let pool = thread_pool()?;
    let outcome = pool.install(|| experiments::dispatch(config.experiment, &mut params, config.oracle))?;
    if let Some(dir) = &config.out {
        output::write_artifacts(dir, &outcome)?;
    }
    Ok(outcome)
}

/// [`execute`], failing with [`HarnessError::Assertion`] when a check fails.
pub fn run(config: &RunConfig) -> Result<Outcome, HarnessError> {
    let outcome = execute(config)?;
    if !outcome.pass {
        let msg = outcome.failures.first().cloned().unwrap_or_else(|| "experiment checks failed".to_string());
        return Err(HarnessError::Assertion(format!("{}: {msg}", outcome.experiment)));
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(Experiment::from_name(e.name()), Some(e));
        }
        assert_eq!(Experiment::from_name("sphere"), None);
    }

    #[test]
    fn config_json() {
        let c = RunConfig::from_json(r#"{"experiment": "spectrum", "params": {"weights": "2,6", "cutoff": 10}}"#).unwrap();
        assert_eq!(c.experiment, Experiment::Spectrum);
        assert!(!c.oracle);
        let err = RunConfig::from_json(r#"{"experiment": "spectrum", "colour": 1}"#).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(RunConfig::from_json(r#"{"experiment": "spectra"}"#).is_err());
    }
}
