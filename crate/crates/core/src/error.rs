use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not unitary: residual {residual:.3e} exceeds {tolerance:.3e}")]
    NotUnitary { residual: f64, tolerance: f64 },

    #[error("matrix contains NaN or infinite entries")]
    NonFinite,

    #[error("tolerance `{name}` must be finite and strictly positive, got {value}")]
    InvalidTolerance { name: &'static str, value: f64 },

    #[error("unknown gate name `{0}`")]
    UnknownGateName(String),

    #[error("factor reconstruction failed: best residual {best_residual:.3e}")]
    ReconstructionFailed { best_residual: f64 },

    #[error("separability verdict disagrees with the realignment oracle: {0}")]
    InternalInconsistency(String),

    #[error("circuit has {0} lines; the unitary verifier supports at most 4")]
    TooManyLines(usize),

    #[error("line index {index} is out of range for a {num_lines}-line circuit")]
    LineOutOfRange { index: usize, num_lines: usize },

    #[error("gate touches line {0} more than once")]
    DuplicateLine(usize),

    #[error("a circuit needs at least one line")]
    EmptyCircuit,
}
