use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid ramp protocol: {0}")]
    InvalidProtocol(String),

    #[error("operation requires a linear ramp, got {0}")]
    NotLinear(String),

    #[error("invalid propagation config: {0}")]
    InvalidConfig(String),

    #[error("invalid sampling grid: {0}")]
    InvalidGrid(String),

    #[error("evaluation at band-touching point (k = {k})")]
    BandTouching { k: f64 },

    #[error("spectrum gap closes on the (k, tau) torus: minimum gap {min_gap:e}")]
    GapClosed { min_gap: f64 },

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("quadrature did not converge on [{a}, {b}]: estimated error {error:e} after {subdivisions} subdivisions")]
    NonConvergence {
        a: f64,
        b: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("duplicate sweep row: protocol {protocol}, T = {period}, delta2/delta1 = {ratio}")]
    DuplicateRow {
        protocol: String,
        period: f64,
        ratio: f64,
    },

    #[error(
        "sweep row failed (protocol {protocol}, T = {period}, delta2/delta1 = {ratio}): {source}"
    )]
    RowFailed {
        protocol: String,
        period: f64,
        ratio: f64,
        source: Box<Error>,
    },

    #[error("calibration fit failed: {0}")]
    Calibration(String),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::BandTouching { .. }
            | Error::GapClosed { .. }
            | Error::Divergent(_)
            | Error::NonConvergence { .. } => true,
            Error::RowFailed { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
