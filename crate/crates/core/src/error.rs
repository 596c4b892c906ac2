use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("potential is singular at z = 0 (centrifugal term present)")]
    SingularPoint,
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("sector {sector} is not compatible with basis family {family}")]
    IncompatibleSector { family: String, sector: String },
    #[error("basis {basis} cannot represent potential term {term}")]
    UnsupportedPair { basis: String, term: String },
    #[error("parameters outside the validity region: {0}")]
    InvalidParams(String),
    #[error("point {0} lies outside the basis domain")]
    DomainViolation(f64),
    #[error("no valid stationary point of the trace was found")]
    NoValidRoot,
    #[error("empty candidate list")]
    EmptyCandidates,
    #[error("Newton iteration failed to converge from every start")]
    NewtonFailed,
    #[error("QR iteration failed to converge at eigenvalue index {index}")]
    QrNonConvergence { index: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
