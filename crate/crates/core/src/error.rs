//! Error type shared by every module.

use thiserror::Error;

/// Failure modes of the library. Each variant maps to a stable short code
/// (see [`KerrError::code`]) that the CLI reports in its JSON error payload.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum KerrError {
    #[error("negative loss rate {name} = {value} (set allow_negative_loss to permit)")]
    NegativeLoss { name: &'static str, value: f64 },
    #[error("effective Kerr K - i*kappa2 vanishes; derived constants diverge")]
    DegenerateKerr,
    #[error("gauge roots coincide (eps = {eps_re} + {eps_im}i) with a nonzero drive term; r1 is undefined")]
    DegenerateGauge { eps_re: f64, eps_im: f64 },
    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },
    #[error("denominator parameter {re} + {im}i is a nonpositive integer")]
    PoleAtParameter { re: f64, im: f64 },
    #[error("unsupported argument: {0}")]
    Unsupported(String),
    #[error("no one-dimensional solution: {0}")]
    NoSolution(String),
    #[error("cutoff {cutoff} too small: tail bound {tail:e} exceeds tolerance")]
    CutoffTooSmall { cutoff: usize, tail: f64 },
    #[error("truncation loss {loss:e} exceeds tolerance")]
    TruncationLoss { loss: f64 },
    #[error("parameters are not at a bistable point: {0}")]
    NotBistable(String),
    #[error("parameters are not near a bistable point: {0}")]
    NotNearBistable(String),
    #[error("wrong parameter regime: {0}")]
    WrongRegime(String),
    #[error("steady-state kernel is degenerate (condition estimate {condition:e}, solution spread {spread:e})")]
    DegenerateKernel { condition: f64, spread: f64 },
    #[error("eigensolver failed to converge: {0}")]
    ConvergenceFailure(String),
    #[error("bistable basis is rank deficient: kept {kept} of {total} operators")]
    RankDeficiency { kept: usize, total: usize },
    #[error("phase-diagram inversion failed: {0}")]
    InversionFailure(String),
    #[error("singular linear system: {0}")]
    Singular(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl KerrError {
    /// Stable identifier used in machine-readable error output.
    pub fn code(&self) -> &'static str {
        match self {
            KerrError::NegativeLoss { .. } => "NegativeLoss",
            KerrError::DegenerateKerr => "DegenerateKerr",
            KerrError::DegenerateGauge { .. } => "DegenerateGauge",
            KerrError::NonConvergence { .. } => "NonConvergence",
            KerrError::PoleAtParameter { .. } => "PoleAtParameter",
            KerrError::Unsupported(_) => "Unsupported",
            KerrError::NoSolution(_) => "NoSolution",
            KerrError::CutoffTooSmall { .. } => "CutoffTooSmall",
            KerrError::TruncationLoss { .. } => "TruncationLoss",
            KerrError::NotBistable(_) => "NotBistable",
            KerrError::NotNearBistable(_) => "NotNearBistable",
            KerrError::WrongRegime(_) => "WrongRegime",
            KerrError::DegenerateKernel { .. } => "DegenerateKernel",
            KerrError::ConvergenceFailure(_) => "ConvergenceFailure",
            KerrError::RankDeficiency { .. } => "RankDeficiency",
            KerrError::InversionFailure(_) => "InversionFailure",
            KerrError::Singular(_) => "Singular",
            KerrError::Config(_) => "Config",
        }
    }

    /// True for errors caused by the caller's input rather than by numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            KerrError::NegativeLoss { .. }
                | KerrError::DegenerateKerr
                | KerrError::Config(_)
                | KerrError::WrongRegime(_)
                | KerrError::NotBistable(_)
                | KerrError::NotNearBistable(_)
                | KerrError::Unsupported(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, KerrError>;
