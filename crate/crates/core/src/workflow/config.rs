use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dirac::{ChannelConfig, SplitKind};
use crate::forms::SplitSpace;
use crate::{Error, Result, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    Sweep,
    Converge,
    PollutionDemo,
    CheckForms,
    AbstractSolve,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Sweep => "sweep",
            Command::Converge => "converge",
            Command::PollutionDemo => "pollution-demo",
            Command::CheckForms => "check-forms",
            Command::AbstractSolve => "abstract-solve",
        }
    }
}

/// How `D±` is given next to Matrix Market inputs.
///
/// `{"plus_indices": [0, 2]}` selects coordinate vectors (the rest span
/// `D-`); `{"split": "sign-of-Q"}` takes the positive and non-positive
/// eigenspaces of the pencil `(Q, M)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SplitDescriptor {
    Indices { plus_indices: Vec<usize> },
    Named { split: NamedSplit },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NamedSplit {
    #[serde(rename = "sign-of-Q")]
    SignOfQ,
}

impl SplitDescriptor {
    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn build<T: Scalar>(&self, m: &nalgebra::DMatrix<T>, q: &nalgebra::DMatrix<T>) -> Result<SplitSpace<T>> {
        match self {
            SplitDescriptor::Indices { plus_indices } => SplitSpace::from_indices(m.nrows(), plus_indices),
            SplitDescriptor::Named {
                split: NamedSplit::SignOfQ,
            } => Ok(SplitSpace::sign_of(q, m)?.0),
        }
    }
}

/// Matrix Market inputs of `check-forms` and `abstract-solve`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixInputs {
    pub m: PathBuf,
    pub q: PathBuf,
    pub v: PathBuf,
    pub split: PathBuf,
}

/// Seeded random pairs for `abstract-solve` without matrix inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomSuite {
    pub count: usize,
    /// Fixed dimension; drawn from `2..=40` per pair when absent.
    pub dim: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub channel: ChannelConfig,
    /// Single coupling for `solve`, `converge` and `pollution-demo`; the grid
    /// of `sweep`.
    pub nu: Vec<f64>,
    pub splits: Vec<SplitKind>,
    pub k_max: usize,
    pub eps: f64,
    pub sizes: Vec<usize>,
    pub seed: u64,
    pub force: bool,
    /// Overrides the command's numeric assertion tolerance.
    pub tolerance: Option<f64>,
    pub matrices: Option<MatrixInputs>,
    pub random: Option<RandomSuite>,
    /// Ceiling for `abstract-solve`; the surrogate is used when absent.
    pub b: Option<f64>,
    pub out: Option<PathBuf>,
    /// Directory for Matrix Market exports of the assembled channel.
    pub export: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            channel: ChannelConfig::new(-1),
            nu: vec![0.5],
            splits: vec![SplitKind::P],
            k_max: 1,
            eps: 0.0,
            sizes: vec![50, 100, 200],
            seed: 1,
            force: false,
            tolerance: None,
            matrices: None,
            random: None,
            b: None,
            out: None,
            export: None,
        }
    }

    /// The assertion tolerance of the command unless overridden.
    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(match self.command {
            Command::Solve => 1e-6,
            Command::Sweep => 1e-4,
            Command::Converge => 0.1,
            Command::PollutionDemo => crate::dirac::MINIMAX_TOLERANCE,
            Command::CheckForms => 1e-10,
            Command::AbstractSolve => 1e-9,
        })
    }

    pub fn single_nu(&self) -> Result<f64> {
        match self.nu.as_slice() {
            [nu] => Ok(*nu),
            other => Err(Error::InvalidParameter(format!(
                "{} needs exactly one nu, got {}",
                self.command.name(),
                other.len()
            ))),
        }
    }

    /// Input validation done before any computation.
    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        if self.k_max == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !(self.eps >= 0.0) {
            return Err(Error::InvalidParameter(format!("eps must be nonnegative, got {}", self.eps)));
        }
        if self.nu.iter().any(|nu| !(nu.is_finite() && *nu >= 0.0)) {
            return Err(Error::InvalidParameter("nu values must be finite and nonnegative".into()));
        }
        match self.command {
            Command::Solve | Command::PollutionDemo => {
                self.single_nu()?;
            }
            Command::Converge => {
                self.single_nu()?;
                if self.sizes.is_empty() {
                    return Err(Error::InvalidParameter("converge needs at least one size".into()));
                }
            }
            Command::CheckForms => {
                if self.matrices.is_none() {
                    return Err(Error::InvalidParameter("check-forms needs --m, --q, --v and --split-file".into()));
                }
            }
            Command::AbstractSolve => {
                if self.matrices.is_none() && self.random.is_none() {
                    return Err(Error::InvalidParameter(
                        "abstract-solve needs matrix inputs or a random suite".into(),
                    ));
                }
                if let Some(RandomSuite { dim: Some(d), .. }) = &self.random {
                    if *d < 2 {
                        return Err(Error::InvalidParameter("random dimension must be at least 2".into()));
                    }
                }
            }
            Command::Sweep => {}
        }
        if let Some(inputs) = &self.matrices {
            for path in [&inputs.m, &inputs.q, &inputs.v, &inputs.split] {
                if !path.is_file() {
                    return Err(Error::Io(std::io::Error::new(
                        std::io::ErrorKind::NotFound,
                        format!("input file {} does not exist", path.display()),
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `"a:b:step"` (inclusive, rounded to the step) or a comma-separated list.
/// An empty string is an empty grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let bad = || Error::InvalidParameter(format!("cannot parse grid {text:?}"));
    if text.contains(':') {
        let parts: Vec<f64> = text
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [lo, hi, step] = parts[..] else { return Err(bad()) };
        if !(step > 0.0) || hi < lo {
            return Err(bad());
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        // Round so that 0.1:0.9:0.1 yields 0.3 rather than 0.30000000000000004.
        let digits = 12;
        let scale = 10f64.powi(digits);
        return Ok((0..count)
            .map(|i| ((lo + i as f64 * step) * scale).round() / scale)
            .collect());
    }
    text.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect()
}

pub fn parse_sizes(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("cannot parse size {p:?}")))
        })
        .collect()
}

pub fn parse_splits(text: &str) -> Result<Vec<SplitKind>> {
    text.split(',').filter(|p| !p.trim().is_empty()).map(|p| p.trim().parse()).collect()
}
