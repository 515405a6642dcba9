use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported number of dimensions {0} (supported: 1, 2)")]
    UnsupportedDimension(usize),

    #[error("axis {axis} out of range for a {n_dims}-dimensional grid")]
    Index { axis: usize, n_dims: usize },

    #[error("state does not fit the grid window: {0}")]
    Boundary(String),

    #[error("oscillator level {0} is above the supported maximum of 64")]
    UnsupportedLevel(usize),

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("superposition cancels to zero norm")]
    DegenerateState,

    #[error("symbol has zero Hilbert-Schmidt norm on the grid")]
    DegenerateSymbol,

    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error("frame is inconsistent: c*d = {product} on axis {axis} (must be 1)")]
    FrameInconsistent { axis: usize, product: f64 },

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
