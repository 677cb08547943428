//! Likelihood ideals of the factor model, their splitting tree, and the
//! complete set of real candidate solutions.

mod decompose;
mod ideal;
mod problem;
mod solutions;

use thiserror::Error;

use crate::groebner::GroebnerError;
use crate::realsolve::SolveError;

pub use decompose::{decompose, DecomposeOptions, DecompositionNode, LeafStatus};
pub use ideal::{build_explicit_ideal, build_likelihood_ideal, explicit_var_names, loading_var_names, var_names, Formulation};
pub use problem::{parse_covariance, parse_rational, rational_matrix_inverse, FactorProblem, RationalMatrix};
pub use solutions::{
    canonicalize_sign, enumerate_solutions, enumerate_with, recover_psi, recover_psi_exact, sign_classes,
    CandidateSolution, Enumeration, LeafSummary, SolutionJson, SolutionSetJson,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamlError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("covariance matrix is not positive definite (leading minor {0} is not positive); try a ridge term")]
    NotPositiveDefinite(usize),
    #[error("covariance matrix is singular; add a ridge term S + lambda*I")]
    SingularCovariance,
    #[error("cannot parse covariance input: {0}")]
    Parse(String),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

impl FamlError {
    /// Budget exhaustion, as opposed to a bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, FamlError::Groebner(GroebnerError::ResourceExceeded { .. }))
    }
}
