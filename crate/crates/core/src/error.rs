use alloc::string::String;

/// Errors raised by the core operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A caller broke an operation's contract (shape mismatch, stale cache).
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("configuration error: {0}")]
    Config(String),
    /// The probe protocol cannot be followed for the given data.
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("training diverged at step {step}: loss {loss}, max |grad| {max_grad}")]
    Divergence { step: u64, loss: f64, max_grad: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
