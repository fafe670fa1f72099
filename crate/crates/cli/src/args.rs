use std::path::PathBuf;

use clap::{Args, ValueEnum};
use walkzeta::laurent::LaurentPolynomial;
use walkzeta::quadrature::QuadratureSpec;
use walkzeta::ronkin::{p_simplified, WalkFamily};
use walkzeta::walk::CoinMatrix;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Rw,
    QwM,
    QwF,
    CustomCoinFile,
    CustomLaurentFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dump {
    Measure,
    State,
}

/// Flags shared by every subcommand; each one reads what it needs.
#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, value_enum, default_value = "rw")]
    pub model: Model,
    /// Coin (JSON) or Laurent polynomial (JSON) for the custom models.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Torus side length; omitted means the infinite torus or lattice.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// A value, a comma list, or `start:stop:count` (inclusive).
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<f64>,
    #[arg(long = "r-max", default_value_t = 10)]
    pub r_max: usize,
    /// Initial quadrature nodes per dimension.
    #[arg(long, default_value_t = 16)]
    pub nodes: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Half-width of the square window `[-b, b]^k`.
    #[arg(long = "box", default_value_t = 3.0)]
    pub box_half: f64,
    /// Grid points (or raster cells) per axis.
    #[arg(long, default_value_t = 200)]
    pub resolution: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Walk steps for `simulate`.
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    /// Initial internal state for `simulate`: comma list of real amplitudes.
    #[arg(long, allow_hyphen_values = true)]
    pub psi0: Option<String>,
    #[arg(long, value_enum, default_value = "measure")]
    pub dump: Dump,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

pub fn parse_f64(s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Config(format!("not a finite number: {s:?}")))
}

/// Parses `v`, `v1,v2,...` or `start:stop:count`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s.split(',').map(parse_f64).collect(),
        3 => {
            let a = parse_f64(parts[0])?;
            let b = parse_f64(parts[1])?;
            let n: usize = parts[2]
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("bad count in range {s:?}")))?;
            match n {
                0 => Err(CliError::Config("range count must be >= 1".into())),
                1 => Ok(vec![a]),
                _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
            }
        }
        _ => Err(CliError::Config(format!("cannot parse grid {s:?}"))),
    }
}

impl Common {
    pub fn model_name(&self) -> &'static str {
        match self.model {
            Model::Rw => "rw",
            Model::QwM => "qw-m",
            Model::QwF => "qw-f",
            Model::CustomCoinFile => "custom-coin",
            Model::CustomLaurentFile => "custom-laurent",
        }
    }

    pub fn u_values(&self) -> Result<Vec<f64>, CliError> {
        let s = self.u.as_deref().ok_or_else(|| CliError::Config("--u is required".into()))?;
        parse_grid(s)
    }

    pub fn single_u(&self) -> Result<Option<f64>, CliError> {
        match &self.u {
            None => Ok(None),
            Some(s) => match parse_grid(s)?.as_slice() {
                [u] => Ok(Some(*u)),
                _ => Err(CliError::Config("this command takes a single --u".into())),
            },
        }
    }

    pub fn quad(&self) -> Result<QuadratureSpec, CliError> {
        Ok(QuadratureSpec::new(self.nodes, self.tol)?)
    }

    fn xi(&self) -> Result<f64, CliError> {
        let xi = self
            .xi
            .ok_or_else(|| CliError::Config("--xi is required for quantum walk models".into()))?;
        if !xi.is_finite() {
            return Err(CliError::Config("--xi must be finite".into()));
        }
        Ok(xi)
    }

    fn read_file(&self) -> Result<String, CliError> {
        let path = self
            .file
            .as_ref()
            .ok_or_else(|| CliError::Config("--file is required for custom models".into()))?;
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
    }

    /// The walk family for the built-in models.
    pub fn family(&self) -> Result<Option<WalkFamily>, CliError> {
        match self.model {
            Model::Rw => {
                if self.d == 0 {
                    return Err(CliError::Config("--d must be >= 1".into()));
                }
                Ok(Some(WalkFamily::Rw { d: self.d }))
            }
            Model::QwM => Ok(Some(WalkFamily::QwM { xi: self.xi()? })),
            Model::QwF => Ok(Some(WalkFamily::QwF { xi: self.xi()? })),
            _ => Ok(None),
        }
    }

    pub fn coin(&self) -> Result<CoinMatrix, CliError> {
        match self.family()? {
            Some(f) => Ok(f.coin()?),
            None if self.model == Model::CustomCoinFile => Ok(CoinMatrix::from_json(&self.read_file()?)?),
            None => Err(CliError::Config("this command needs a coin model".into())),
        }
    }

    /// The model's Laurent polynomial at `--u`, or the rescaled `u = 1`
    /// polynomial when `--u` is absent.
    pub fn polynomial(&self) -> Result<LaurentPolynomial, CliError> {
        match self.family()? {
            Some(f) => match self.single_u()? {
                Some(u) => Ok(f.polynomial(u)?),
                None => Ok(p_simplified(f)?),
            },
            None if self.model == Model::CustomLaurentFile => Ok(LaurentPolynomial::from_json(&self.read_file()?)?),
            None => Err(CliError::Config("this command needs a polynomial model".into())),
        }
    }

    pub fn torus_label(&self) -> String {
        self.n.map_or_else(|| "inf".to_string(), |n| n.to_string())
    }
}
