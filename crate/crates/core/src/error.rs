use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value at cell {cell}, velocity node {node}")]
    NonFinite { cell: usize, node: usize },

    #[error("degenerate macroscopic state at cell {cell}: rho = {rho}, T = {temperature}")]
    Degenerate {
        cell: usize,
        rho: f64,
        temperature: f64,
    },

    #[error("negative distribution value {value} at cell {cell}, velocity node {node}")]
    NegativeDistribution { cell: usize, node: usize, value: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("FFT-based collision needs a power-of-two velocity grid, got Nv = {0}")]
    NonPowerOfTwo(usize),

    #[error("{n_cells} cells cannot hold a stencil that needs {required} cells")]
    StencilTooWide { n_cells: usize, required: usize },

    #[error("unknown tableau `{0}`")]
    UnknownTableau(String),

    #[error("Shu-Osher system under beta = alpha (c_i - c_j) is singular at row {row}, column {col}")]
    SingularShuOsher { row: usize, col: usize },

    #[error("d2 distance is infinite unless mass and momentum agree: {0}")]
    MomentMismatch(String),

    #[error("non-finite value in stage {stage} at cell {cell}")]
    StageNotFinite { stage: usize, cell: usize },

    #[error(
        "exponent {exponent:.3e} overflows at stage {stage}, cell {cell}; \
         use a tableau with nondecreasing abscissae"
    )]
    ExponentOverflow {
        stage: usize,
        cell: usize,
        exponent: f64,
    },

    #[error("negative temperature {temperature:.3e} at cell {cell} in stage {stage}")]
    NegativeTemperature {
        stage: usize,
        cell: usize,
        temperature: f64,
    },

    #[error("vacuum or non-admissible state at cell {cell}: rho = {rho}, T = {temperature}")]
    Vacuum {
        cell: usize,
        rho: f64,
        temperature: f64,
    },

    #[error("non-finite state after step {step}")]
    Diverged { step: usize },
}
