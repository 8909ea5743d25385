use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("trace is {0:.12}, expected 1")]
    BadTrace(f64),
    #[error("vector norm is {0:.12}, expected 1")]
    NotNormalized(f64),
    #[error("basis vectors are not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("optimizer stalled: restarts disagree by {0:.3e}")]
    OptimizerStalled(f64),
    #[error("bound violated: {0}")]
    BoundViolation(String),
    #[error("Kraus operators are not complete (deviation {0:.3e})")]
    IncompleteKraus(f64),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("local quantum uncertainty is zero")]
    ZeroLqu,
    #[error("invalid Gram matrix: {0}")]
    InvalidGram(String),
    #[error("state is not Bell-diagonal")]
    NotBellDiagonal,
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("incoherent part has a zero diagonal entry at index {0}")]
    SingularDiagonal(usize),
    #[error("bases are not mutually unbiased (max overlap deviation {0:.3e})")]
    NotMub(f64),
    #[error("Fock truncation insufficient: tail weight {0:.3e}")]
    TruncationInsufficient(f64),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
