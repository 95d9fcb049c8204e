use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("propagator magnitude out of range: |g1 {sign} g2| = {magnitude}")]
    PropagatorOutOfRange { sign: char, magnitude: f64 },

    #[error("Hermitian eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("bound-state bracketing failed: {0}")]
    Bracketing(String),

    #[error("bound-state root did not reach residual tolerance: residual {residual:e}")]
    RootResidual { residual: f64 },

    #[error("quadrature did not converge: estimated error {error:e} after {intervals} intervals")]
    Quadrature { error: f64, intervals: usize },

    #[error("norm drift {drift:e} at t = {time}; reduce dt (currently {dt})")]
    NormDrift { drift: f64, time: f64, dt: f64 },

    #[error("at {point}: {source}")]
    AtGridPoint { point: String, source: Box<Error> },
}

impl Error {
    /// True for failures of a numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        if let Error::AtGridPoint { source, .. } = self {
            return source.is_numerical();
        }
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::Bracketing(_)
                | Error::RootResidual { .. }
                | Error::Quadrature { .. }
                | Error::NormDrift { .. }
                | Error::PropagatorOutOfRange { .. }
        )
    }

    pub fn at(self, point: impl Into<String>) -> Error {
        Error::AtGridPoint {
            point: point.into(),
            source: Box::new(self),
        }
    }
}
