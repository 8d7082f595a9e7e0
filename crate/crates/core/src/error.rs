use thiserror::Error;

use crate::bivector::MetricKind;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure class, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    Domain,
    Contract,
    Borderline,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: unknown function `{name}`")]
    UnknownFunction { line: usize, name: String },
    #[error("line {line}: unknown identifier `{name}`")]
    UnknownIdentifier { line: usize, name: String },
    #[error("chart document: {0}")]
    Chart(String),
    #[error("evaluation domain error: {0}")]
    Domain(String),
    #[error("metric is singular at the evaluation point (|det| = {det:e})")]
    SingularMetric { det: f64 },
    #[error("metric signature does not match the declared {expected:?} kind")]
    SignatureMismatch { expected: MetricKind },
    #[error("operand kinds differ: expected {expected:?}, found {found:?}")]
    KindMismatch {
        expected: MetricKind,
        found: MetricKind,
    },
    #[error("operator does not commute with the Hodge star (residual {residual:e})")]
    NotCommuting { residual: f64 },
    #[error("bivector is not decomposable (Plücker residual {residual:e})")]
    NotDecomposable { residual: f64 },
    #[error("2-plane is degenerate (lightlike)")]
    DegeneratePlane,
    #[error("vector is not unit length: <T,T> = {norm}")]
    NonUnitVector { norm: f64 },
    #[error("W(T,.,.,T) does not vanish (residual {residual:e})")]
    AnnihilationViolated { residual: f64 },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("borderline numerical structure: {0}")]
    Borderline(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Syntax { .. }
            | Error::UnknownFunction { .. }
            | Error::UnknownIdentifier { .. }
            | Error::Chart(_) => ErrorClass::Parse,
            Error::Domain(_) | Error::SingularMetric { .. } | Error::SignatureMismatch { .. } => {
                ErrorClass::Domain
            }
            Error::Borderline(_) => ErrorClass::Borderline,
            _ => ErrorClass::Contract,
        }
    }
}
