use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid cycle size {0}: n must be odd and at least 5")]
    InvalidCycle(i64),

    #[error("index {index} out of range (expected < {len})")]
    IndexOutOfRange { index: i64, len: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("expectation value has imaginary residue {0:.3e}")]
    ImaginaryResidue(f64),

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error(
        "dead level of register `{register}` populated after `{stage}` (amplitude {amplitude:.3e})"
    )]
    DeadLevelPopulated {
        register: String,
        stage: String,
        amplitude: f64,
    },

    #[error("empty parameter grid")]
    EmptyGrid,

    #[error("margins do not cross on (0, pi/2) for n = {0}")]
    NoIntersection(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
