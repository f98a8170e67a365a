use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid spin: 2J must be at least 1, got {0}")]
    InvalidSpin(u32),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("generator is not Hermitian (max |A - A^H| = {0:e})")]
    NonHermitianGenerator(f64),
    #[error("the Yurke state needs an even particle number, got N = {0}")]
    OddParticleNumber(u32),
    #[error("mean spin vanishes; the spin squeezing parameter is undefined")]
    MeanSpinZero,
    #[error("Ramsey precision diverges at cos(phi) = 0")]
    DivergentAtQuadrature,
    #[error("grid too coarse: need at least {required} points, got {got}")]
    GridTooCoarse { required: usize, got: usize },
    #[error("grids do not match")]
    GridMismatch,
    #[error("no interior minimum found in the coarse scan over [{lo}, {hi}]")]
    NoInteriorMinimum { lo: f64, hi: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("Clebsch-Gordan intermediate out of range (factorial index {0})")]
    MagnitudeOverflow(usize),
    #[error("malformed state record: {0}")]
    Format(String),
}
