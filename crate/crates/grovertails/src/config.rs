use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("cannot parse complex number {0:?}")]
    BadComplex(String),
    #[error("cannot parse vertex id {0:?}")]
    BadVertex(String),
    #[error("no tails given")]
    NoTails,
    #[error("expected {expected} inflow amplitudes (one per tail), got {got}")]
    InflowLength { expected: usize, got: usize },
    #[error("drive frequency z = {0} is not on the unit circle")]
    NotUnitModulus(Complex64),
    #[error("mode {mode} needs z = 1, got {z}")]
    NeedsStationaryDrive { mode: Mode, z: Complex64 },
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("truncation length must be at least 2, got {0}")]
    TruncationTooShort(usize),
    #[error("a scattering matrix needs at least two tails, got {0}")]
    TooFewTails(usize),
    #[error("csv output covers a single table; pick a mode other than {0}")]
    CsvNeedsSingleTable(Mode),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Evolve,
    Stationary,
    Spectrum,
    Scatter,
    Verify,
    All,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Evolve => "evolve",
            Mode::Stationary => "stationary",
            Mode::Spectrum => "spectrum",
            Mode::Scatter => "scatter",
            Mode::Verify => "verify",
            Mode::All => "all",
        }
    }

    /// Whether the mode solves the `z = 1` stationary problem.
    pub fn is_stationary(self) -> bool {
        matches!(
            self,
            Mode::Stationary | Mode::Scatter | Mode::Verify | Mode::All
        )
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_TRUNCATION: usize = 64;

/// Everything a run needs, already parsed. Produced by the CLI front end or
/// built directly in tests.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub graph_path: PathBuf,
    pub tails: Vec<usize>,
    /// `None` means unit inflow on the first tail.
    pub inflow: Option<Vec<Complex64>>,
    pub z: Complex64,
    pub mode: Mode,
    /// `None` picks a budget from the spectral gap.
    pub steps: Option<usize>,
    pub tol: f64,
    pub truncation: usize,
    pub format: OutputFormat,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(graph_path: impl Into<PathBuf>, tails: Vec<usize>, mode: Mode) -> Self {
        RunConfig {
            graph_path: graph_path.into(),
            tails,
            inflow: None,
            z: Complex64::new(1.0, 0.0),
            mode,
            steps: None,
            tol: DEFAULT_TOL,
            truncation: DEFAULT_TRUNCATION,
            format: OutputFormat::Json,
            seed: 0,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.tails.is_empty() {
            return Err(ConfigError::NoTails);
        }
        if let Some(inflow) = &self.inflow {
            if inflow.len() != self.tails.len() {
                return Err(ConfigError::InflowLength {
                    expected: self.tails.len(),
                    got: inflow.len(),
                });
            }
        }
        if (self.z.norm() - 1.0).abs() > 1e-12 {
            return Err(ConfigError::NotUnitModulus(self.z));
        }
        if self.mode.is_stationary() && self.mode != Mode::All && (self.z - 1.0).norm() > 1e-12 {
            return Err(ConfigError::NeedsStationaryDrive {
                mode: self.mode,
                z: self.z,
            });
        }
        if self.mode == Mode::Scatter && self.tails.len() < 2 {
            return Err(ConfigError::TooFewTails(self.tails.len()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(ConfigError::NonPositiveTolerance(self.tol));
        }
        if self.truncation < 2 {
            return Err(ConfigError::TruncationTooShort(self.truncation));
        }
        if self.format == OutputFormat::Csv && self.mode == Mode::All {
            return Err(ConfigError::CsvNeedsSingleTable(self.mode));
        }
        Ok(())
    }

    pub fn inflow_or_default(&self) -> Vec<Complex64> {
        self.inflow.clone().unwrap_or_else(|| {
            let mut v = vec![Complex64::new(0.0, 0.0); self.tails.len()];
            if let Some(first) = v.first_mut() {
                *first = Complex64::new(1.0, 0.0);
            }
            v
        })
    }
}

/// Parses `1`, `-0.5`, `2i`, `-i`, `1+0i`, `0.6-0.8i`, `1e-3+2.5e-1i`.
pub fn parse_complex(text: &str) -> Result<Complex64, ConfigError> {
    let bad = || ConfigError::BadComplex(text.to_string());
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return f64::from_str(&s)
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| bad());
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (f64::from_str(&body[..k]).map_err(|_| bad())?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => f64::from_str(other).map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

pub fn parse_complex_list(text: &str) -> Result<Vec<Complex64>, ConfigError> {
    text.split(',').map(parse_complex).collect()
}

pub fn parse_vertex_list(text: &str) -> Result<Vec<usize>, ConfigError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| ConfigError::BadVertex(t.trim().to_string()))
        })
        .collect()
}
