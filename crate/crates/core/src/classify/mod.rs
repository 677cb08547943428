//! Discrepancy, stationarity residual and observed information of a
//! candidate; the solution-pattern verdict; and the numeric fitters.

mod fit;
pub mod linalg;
mod measure;
pub mod optimize;

use std::fmt::Debug;
use std::iter::Sum;

use num_traits::Float;
use thiserror::Error;

pub use fit::{
    best_fit, classify_numeric, fit, fit_em, fit_jennrich, fit_lawley, multi_start, numeric_options, profile_discrepancy,
    uniform_starts,
    Algorithm, FitOptions, FitResult,
};
pub use linalg::{symmetric_eigen, Matrix, SymEigen};
pub use measure::{
    classify_pattern, discrepancy, eqdiff0_residual, observed_fisher, ClassifyOptions, Fisher, Pattern, ReportJson,
    SolutionReport,
};

/// Real scalar used by the numeric side.
pub trait Scalar: Float + Sum + Debug + Send + Sync + 'static {}

impl Scalar for f32 {}
impl Scalar for f64 {}

pub(crate) fn cst<T: Scalar>(x: f64) -> T {
    T::from(x).unwrap()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("implied covariance L L' + Psi is singular")]
    SingularSigma,
    #[error("implied covariance L L' + Psi is not positive definite")]
    IndefiniteSigma,
    #[error("sample covariance is not positive definite")]
    SingularCovariance,
    #[error("no candidate solutions to classify")]
    NoCandidates,
    #[error("observed information could not be evaluated: {0}")]
    FisherProbe(String),
    #[error("{0}")]
    Invalid(String),
}
