use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("affine map is singular")]
    SingularMap,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial has linear factor {0}")]
    LinearFactor(String),
    #[error("matrix is not triorthogonal")]
    NotTriorthogonal,
    #[error("space is not unital")]
    NotUnital,
    #[error("generator matrix first row is not all-one")]
    FirstRowNotAllOne,
    #[error("repeated column {0}")]
    RepeatedColumn(usize),
    #[error("restriction to the puncture set is rank deficient")]
    RankDeficient,
    #[error("puncture set of size {p} too large for {c} coordinates")]
    PunctureTooLarge { p: usize, c: usize },
    #[error("coordinate {0} is not in the puncture set")]
    NotInPunctureSet(usize),
    #[error("code has no logical qubits")]
    NoLogicalQubits,
    #[error("no puncture set of size {0} has full-rank restriction")]
    NoValidPuncture(usize),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid base-pair case {0}")]
    InvalidCase(u8),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
