use thiserror::Error;

/// Errors raised by the scattering engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("frequency {omega} is below the cutoff {cutoff} of TM{m}{n}")]
    BelowCutoff { omega: f64, cutoff: f64, m: u32, n: u32 },

    /// The frequency sits exactly on a coupled-mode cutoff where the density
    /// of states diverges. Callers must use one-sided limits instead.
    #[error("frequency {omega} sits on the cutoff of TM{m}{n}; evaluate one-sided limits instead")]
    BandEdge { omega: f64, m: u32, n: u32 },

    #[error("quadrature did not converge: value {value}, estimated error {error:e} after {evaluations} evaluations")]
    Quadrature {
        value: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("no coupled mode propagates at frequency {0}")]
    NoPropagatingMode(f64),

    #[error("invalid input state: {0}")]
    InvalidInput(String),

    #[error("channel {n} is not propagating at frequency {omega} (j_max = {j_max})")]
    ChannelOutOfRange { n: usize, omega: f64, j_max: usize },

    #[error("no dark state exists with a single propagating mode")]
    NoDarkState,

    #[error("invalid band: {0}")]
    InvalidBand(String),
}

pub type Result<T> = std::result::Result<T, Error>;
