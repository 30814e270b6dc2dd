use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("matrix is not hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("Jacobi eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("point lies in chamber {found:?} but {expected} was required")]
    ChamberMismatch {
        expected: &'static str,
        found: crate::ensembles::Chamber,
    },
    #[error("dimension {0} is not supported by this operation")]
    UnsupportedDimension(usize),
    #[error("invalid specification: {0}")]
    Spec(String),
    #[error("step size collapsed below {0:e} while keeping the path in its chamber")]
    StepCollapse(f64),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("Radon-Nikodym weight undefined: terminal coordinate {0} is not positive")]
    ZeroWeight(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
