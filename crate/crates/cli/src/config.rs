//! Experiment configuration files.

use num_complex::Complex64;
use serde::Deserialize;
use wvctx::bounds::TheoremTag;
use wvctx::qmath::{CMatrix, DensityState, Effect};
use wvctx::schemes::{SchemeKind, SchemeSpec};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
const NORM_TOL: f64 = 1e-9;

/// A number written either as a decimal string or as a JSON number.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Text(String),
    Value(f64),
}

impl Number {
    pub fn value(&self) -> Result<f64, CliError> {
        match self {
            Number::Value(v) => Ok(*v),
            Number::Text(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|_| CliError::input(format!("not a number: {s:?}"))),
        }
    }
}

/// Real number, or `[re, im]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(Number),
    Complex([Number; 2]),
}

impl Scalar {
    fn value(&self) -> Result<Complex64, CliError> {
        match self {
            Scalar::Real(x) => Ok(Complex64::new(x.value()?, 0.0)),
            Scalar::Complex([re, im]) => Ok(Complex64::new(re.value()?, im.value()?)),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    /// A unit vector; the operator is its projector (or pure state).
    Amplitudes(Vec<Scalar>),
    Matrix(Vec<Vec<Scalar>>),
}

impl OperatorSpec {
    fn ket(amps: &[Scalar]) -> Result<Vec<Complex64>, CliError> {
        let v: Vec<Complex64> = amps.iter().map(Scalar::value).collect::<Result<_, _>>()?;
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(CliError::input(format!("amplitudes have squared norm {norm}, expected 1")));
        }
        Ok(v)
    }

    fn matrix(rows: &[Vec<Scalar>]) -> Result<CMatrix, CliError> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(Scalar::value).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CMatrix::from_rows(rows)?)
    }

    pub fn state(&self) -> Result<DensityState, CliError> {
        match self {
            OperatorSpec::Amplitudes(a) => Ok(DensityState::pure(&Self::ket(a)?)?),
            OperatorSpec::Matrix(m) => Ok(DensityState::new(Self::matrix(m)?)?),
        }
    }

    pub fn projector(&self) -> Result<Effect, CliError> {
        let e = match self {
            OperatorSpec::Amplitudes(a) => Effect::projector_onto(&Self::ket(a)?)?,
            OperatorSpec::Matrix(m) => Effect::new(Self::matrix(m)?)?,
        };
        if !e.is_projector() {
            return Err(CliError::input("operator is not a projector"));
        }
        Ok(e)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    #[serde(default)]
    pub s: Option<Number>,
    #[serde(default)]
    pub epsilon: Option<Number>,
    #[serde(default)]
    pub noise_eps: Option<Number>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Sweep {
    S(Vec<Number>),
    Epsilon(Vec<Number>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub scheme: SchemeConfig,
    pub state: OperatorSpec,
    pub projector: OperatorSpec,
    pub postselection: OperatorSpec,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    /// Defaults to the scheme's own theorem, plus thm4 for Gaussian position.
    #[serde(default)]
    pub theorems: Option<Vec<String>>,
    #[serde(default)]
    pub bins: Option<usize>,
}

/// Everything a run needs, parsed and validated.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub rho: DensityState,
    pub e: Effect,
    pub pi: Effect,
    pub points: Vec<SchemeSpec>,
    pub theorems: Vec<TheoremTag>,
    pub bins: Option<usize>,
}

pub fn default_theorems(kind: SchemeKind) -> Vec<TheoremTag> {
    match kind {
        SchemeKind::GaussianPosition => vec![TheoremTag::Thm1, TheoremTag::Thm4],
        SchemeKind::GaussianMomentum => vec![TheoremTag::Thm2],
        SchemeKind::QubitPointer | SchemeKind::CoarseGrained => vec![TheoremTag::Thm3],
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::input(format!("config: {e}")))?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(CliError::input(format!(
                "unsupported schema {}, expected {SCHEMA_VERSION}",
                cfg.schema
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn experiment(&self) -> Result<Experiment, CliError> {
        let sc = &self.scheme;
        let noise = sc.noise_eps.as_ref().map(Number::value).transpose()?.unwrap_or(0.0);
        let kind = sc.kind;
        let strengths: Vec<f64> = match (&self.sweep, kind.uses_spread()) {
            (Some(Sweep::S(v)), true) | (Some(Sweep::Epsilon(v)), false) => {
                v.iter().map(Number::value).collect::<Result<_, _>>()?
            }
            (Some(_), true) => return Err(CliError::input("this scheme sweeps \"s\"")),
            (Some(_), false) => return Err(CliError::input("the qubit pointer sweeps \"epsilon\"")),
            (None, true) => vec![sc.s.as_ref().ok_or_else(|| CliError::input("scheme needs \"s\""))?.value()?],
            (None, false) => vec![sc
                .epsilon
                .as_ref()
                .ok_or_else(|| CliError::input("scheme needs \"epsilon\""))?
                .value()?],
        };
        if strengths.is_empty() {
            return Err(CliError::input("sweep is empty"));
        }
        if kind.uses_spread() && sc.epsilon.is_some() {
            return Err(CliError::input("\"epsilon\" only applies to the qubit pointer"));
        }
        if !kind.uses_spread() && sc.s.is_some() {
            return Err(CliError::input("\"s\" does not apply to the qubit pointer"));
        }
        let points = strengths
            .iter()
            .map(|&v| {
                if kind.uses_spread() {
                    SchemeSpec::with_spread(kind, v, noise)
                } else {
                    SchemeSpec::qubit_pointer(v, noise)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let theorems = match &self.theorems {
            Some(list) => list.iter().map(|t| TheoremTag::parse(t)).collect::<Result<_, _>>()?,
            None => default_theorems(kind),
        };
        let rho = self.state.state()?;
        let e = self.projector.projector()?;
        let pi = self.postselection.projector()?;
        if e.dim() != rho.dim() || pi.dim() != rho.dim() {
            return Err(CliError::input("state, projector and postselection dimensions differ"));
        }
        Ok(Experiment {
            rho,
            e,
            pi,
            points,
            theorems,
            bins: self.bins,
        })
    }
}
