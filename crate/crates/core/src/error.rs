// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    /// A structural hypothesis (symmetry, Hamiltonian, ...) does not hold.
    #[error("structure violated: {0}")]
    Structure(&'static str),

    #[error("exceptional matrix: det(I +/- M) is numerically zero")]
    ExceptionalMatrix,

    #[error("ill-conditioned solve: condition estimate {estimate:e}")]
    Conditioning { estimate: f64 },

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("state outside system domain: {0}")]
    Domain(&'static str),

    /// A step failed inside a multi-step run.
    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Self {
        match self {
            Error::AtStep { .. } => self,
            other => Error::AtStep {
                step,
                source: alloc::boxed::Box::new(other),
            },
        }
    }

    /// Strips step context, returning the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            other => other,
        }
    }
}
