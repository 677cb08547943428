//! Simulated covariances, Monte-Carlo pattern tables and the covariance
//! interpolation study.

mod simulate;
mod study;

use thiserror::Error;

use crate::classify::ClassifyError;
use crate::faml::FamlError;

pub use simulate::{round_to_rational, sample_covariance, simulate_covariance, Rounding, SimulationModel};
pub use study::{
    blend, classify_problem, interpolate_study, monte_carlo, GridRow, InterpolationStudy, Mode, MonteCarloTable,
    ProfileRow, RunRow, StudyConfig, Transition,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid model: {0}")]
    Model(String),
    #[error("resource budget exhausted: {0}")]
    Resource(String),
    #[error("cannot write output: {0}")]
    Output(String),
    #[error(transparent)]
    Faml(#[from] FamlError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

impl HarnessError {
    pub fn is_resource(&self) -> bool {
        matches!(self, HarnessError::Resource(_)) || matches!(self, HarnessError::Faml(e) if e.is_resource())
    }
}
