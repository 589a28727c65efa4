use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not unimodular (determinant {0})")]
    NotUnimodular(i128),
    #[error("form has zero leading coefficient")]
    ZeroLeading,
    #[error("form has zero discriminant")]
    ZeroDiscriminant,
    #[error("form is reducible")]
    Reducible,
    #[error("root certification failed: radius {radius:e} exceeds {target:e}")]
    NotCertified { radius: f64, target: f64 },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is singular or rank deficient")]
    Singular,
    #[error("point ({x}, {y}) lies outside the fundamental domain")]
    OutsideDomain { x: f64, y: f64 },
    #[error("factorization of {0} failed")]
    Factorization(u128),
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("unsupported prime {0} for exhaustive density")]
    PrimeTooLarge(u64),
    #[error("degenerate test function support: {0}")]
    DegenerateSupport(String),
    #[error("sampling box too small: {0}")]
    BoxTooSmall(String),
    #[error("line {line}, column {column}: {kind}")]
    Parse { line: usize, column: usize, kind: ParseErrorKind },
    #[error("record {label}: covolume mismatch, relative error {rel:e}")]
    Covolume { label: String, rel: f64 },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing field")]
    MissingField,
    #[error("malformed integer `{0}`")]
    BadInteger(String),
    #[error("malformed rational `{0}`")]
    BadRational(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("basis matrix is singular")]
    SingularBasis,
    #[error("first basis row must be (1,0,...,0)")]
    FirstRowNotOne,
    #[error("signature mismatch: declared i={declared}, found {found}")]
    Signature { declared: usize, found: usize },
    #[error("malformed residue line: {0}")]
    BadResidue(String),
}

impl Error {
    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidTask(_) | Error::PrimeTooLarge(_) => 1,
            Error::Invariant(_) | Error::NotCertified { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
