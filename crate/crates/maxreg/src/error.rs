//! Error type shared across the toolkit.

use thiserror::Error;

/// Errors reported by grid, space, symbol, and solver operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Two grid-based values do not live on the same grid.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Row/column dimensions are incompatible.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A frequency symbol could not be evaluated at a node.
    #[error("symbol not evaluable at tau = {tau}: {reason}")]
    SymbolSingular { tau: f64, reason: String },

    /// Node-wise inversion failed or is numerically meaningless.
    #[error("symbol singular at tau = {tau} (condition estimate {cond:.3e})")]
    SingularAtNode { tau: f64, cond: f64 },

    /// The pencil symbol has non-invertible values on the grid.
    #[error("pencil symbol not invertible at {} grid node(s), first at tau = {}",
            nodes.len(), nodes.first().copied().unwrap_or(f64::NAN))]
    NonInvertiblePencil { nodes: Vec<f64> },

    /// The operation is not defined for the given space descriptor.
    #[error("not supported: {0}")]
    NotSupported(String),

    /// An argument is outside its admissible range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An input that must be nontrivial is identically zero.
    #[error("zero input: {0}")]
    ZeroInput(String),

    /// The requested dyadic level does not fit under the grid Nyquist band.
    #[error("band overflow: level {requested} needs 2^{} <= pi/h, grid allows J <= {max}",
            requested + 1)]
    BandOverflow { requested: usize, max: usize },

    /// A dyadic block index is outside 0..=J.
    #[error("block index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    /// Triebel-Lizorkin aggregation needs q strictly between 1 and infinity.
    #[error("invalid q = {0}: Triebel-Lizorkin aggregation requires q in (1, inf)")]
    InvalidQ(f64),

    /// A weighted-derivative supremum keeps growing at the sweep boundary.
    #[error("weighted derivative of order {order} diverges over the outermost decades \
             (decade maxima {decade_maxima:?})")]
    DivergentWeightedDerivative { order: usize, decade_maxima: Vec<f64> },
}

pub type Result<T> = std::result::Result<T, Error>;
