use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{context}: non-finite entry at index {index}")]
    NonFinite { context: &'static str, index: usize },
    #[error("matrix is not symmetric (largest asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("matrix is not orthogonal (defect {defect:e})")]
    NotOrthonormal { defect: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("sequence increases at index {index}")]
    NotNonincreasing { index: usize },
    #[error("negative value {value:e} at index {index}")]
    Negative { index: usize, value: f64 },
    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("index set is not strictly increasing")]
    UnsortedIndexSet,
    #[error("sequences do not interlace")]
    NotInterlacing,
    #[error("negative radicand {value:e} at position {index}")]
    NegativeRadicand { index: usize, value: f64 },
    #[error("reduced spectra contain a repeated value at position {index}")]
    DuplicateValue { index: usize },
    #[error("no frame exists: spectrum does not majorize the lengths")]
    InfeasibleTarget,
    #[error("eigenstep sampler gave up after {attempts} restarts")]
    SamplerExhausted { attempts: usize },
    #[error("invalid eigenstep table ({violations} violations)")]
    InvalidTable { violations: usize },
    #[error("zero-rank step with nonzero length increment {increment:e}")]
    ZeroRankStep { increment: f64 },
    #[error("{value} is not an eigenvalue of the current spectrum")]
    NotAnEigenvalue { value: f64 },
    #[error("point lies outside the parameter region")]
    OutsideRegion,
    #[error("point lies on the boundary of the parameter region")]
    BoundaryPoint,
}
