use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use grkhs::{Criterion, ShapeSequence};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InfoClass {
    All,
    Std,
}

impl fmt::Display for InfoClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InfoClass::All => "all",
            InfoClass::Std => "std",
        })
    }
}

impl FromStr for InfoClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(InfoClass::All),
            "std" => Ok(InfoClass::Std),
            other => Err(format!("unknown information class '{other}' (expected all or std)")),
        }
    }
}

/// One string or a list of them in the JSON config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> From<OneOrMany<T>> for Vec<T> {
    fn from(v: OneOrMany<T>) -> Self {
        match v {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(xs) => xs,
        }
    }
}

/// Experiment parameters as read from a JSON file; every key is optional
/// and command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<String>,
    pub shape: Option<OneOrMany<String>>,
    pub d: Option<OneOrMany<usize>>,
    pub n: Option<OneOrMany<usize>>,
    #[serde(rename = "N")]
    pub big_n: Option<usize>,
    pub eps: Option<Vec<f64>>,
    pub criterion: Option<String>,
    pub class: Option<String>,
    pub m: Option<usize>,
    pub seed: Option<u64>,
    pub design_file: Option<PathBuf>,
    pub designs: Option<usize>,
    pub gamma: Option<OneOrMany<f64>>,
    pub k: Option<usize>,
    pub window: Option<[usize; 2]>,
    pub output: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("invalid config {}: {e}", path.display())))
    }
}

/// Fully resolved parameters of one run; echoed into every output header.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub shape: Vec<String>,
    pub d: Vec<usize>,
    pub n: Vec<usize>,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub eps: Vec<f64>,
    pub criterion: Criterion,
    pub class: InfoClass,
    pub m: Option<usize>,
    pub seed: u64,
    pub design_file: Option<PathBuf>,
    pub designs: usize,
    pub gamma: Vec<f64>,
    pub k: usize,
    pub window: [usize; 2],
    pub output: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn shapes(&self) -> Result<Vec<ShapeSequence>, CliError> {
        self.shape
            .iter()
            .map(|s| s.parse::<ShapeSequence>().map_err(CliError::from))
            .collect()
    }

    pub fn single_shape(&self) -> Result<ShapeSequence, CliError> {
        match self.shapes()?.as_slice() {
            [s] => Ok(s.clone()),
            other => Err(CliError::Validation(format!(
                "{} expects exactly one shape, got {}",
                self.command,
                other.len()
            ))),
        }
    }

    pub fn single_d(&self) -> Result<usize, CliError> {
        match self.d.as_slice() {
            [d] => Ok(*d),
            other => Err(CliError::Validation(format!(
                "{} expects exactly one dimension, got {}",
                self.command,
                other.len()
            ))),
        }
    }

    pub fn single_n(&self) -> Result<usize, CliError> {
        match self.n.as_slice() {
            [n] => Ok(*n),
            other => Err(CliError::Validation(format!(
                "{} expects exactly one n, got {}",
                self.command,
                other.len()
            ))),
        }
    }

    /// Range checks shared by all commands.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.d.contains(&0) {
            return Err(CliError::Validation("dimensions must be at least 1".into()));
        }
        if let Some(e) = self.eps.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(CliError::Validation(format!("epsilon must lie in (0,1), got {e}")));
        }
        if let Some(g) = self.gamma.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            return Err(CliError::Validation(format!("gamma must be positive, got {g}")));
        }
        if self.window[0] == 0 || self.window[0] >= self.window[1] {
            return Err(CliError::Validation(format!(
                "window must satisfy 1 <= lo < hi, got {:?}",
                self.window
            )));
        }
        self.shapes()?;
        Ok(())
    }
}

pub fn parse_criterion(s: &str) -> Result<Criterion, CliError> {
    s.parse::<Criterion>().map_err(CliError::from)
}
