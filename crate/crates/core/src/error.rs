use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid register shape: {0}")]
    InvalidShape(String),

    #[error("basis index {index} out of range for database size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("digit {digit} at position {position} is not a valid level for d = {d}")]
    InvalidDigit { digit: usize, position: usize, d: usize },

    #[error("qudit position {position} out of range for n = {n}")]
    PositionOutOfRange { position: usize, n: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("gate is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("database size {size} too large for dense matrix (limit {limit})")]
    TooLarge { size: usize, limit: usize },

    #[error("integrator failed at t = {t:.6} after {steps} steps: {reason}")]
    Integrator { t: f64, steps: usize, reason: String },

    #[error("ancilla leakage {leakage:.3e} exceeds threshold {threshold:.1e}; the pulse did not return population to the qudit manifold")]
    Leakage { leakage: f64, threshold: f64 },

    #[error("pulse area {area:.6} rad is not of the form 2(2l+1)π (nearest {nearest:.6}); the propagator is not a reflection of the requested kind")]
    AreaContract { area: f64, nearest: f64 },
}

impl Error {
    /// True for errors caused by bad input rather than a failed computation.
    pub fn is_usage(&self) -> bool {
        !matches!(
            self,
            Error::Integrator { .. } | Error::Leakage { .. } | Error::AreaContract { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
