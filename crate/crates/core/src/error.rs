use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("points do not span a full-dimensional polytope (affine rank {rank} < {dim})")]
    DegeneratePolytope { dim: usize, rank: usize },

    #[error("dimension {0} is not supported (1 <= n <= 4)")]
    UnsupportedDimension(usize),

    #[error("polytope is not reflexive")]
    NonReflexive,

    #[error("fan is not simplicial (cone {cone} has {rays} rays in dimension {dim})")]
    NonSimplicialFan { cone: usize, rays: usize, dim: usize },

    #[error("divisor is not Cartier on cone {cone}")]
    NotCartier { cone: usize },

    #[error("point is not in the torus: coordinate {0} is zero")]
    NotInTorus(usize),

    #[error("source complex is not a subcomplex of the target")]
    NotASubcomplex,

    #[error("cohomology dimensions disagree across seeds after {attempts} attempts: {detail}")]
    GenericityFailure { attempts: usize, detail: String },

    #[error("no stable ghost number found within depth {depth}")]
    ScanExhausted { depth: usize },

    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    #[error("character search region could not be certified after {0} enlargements")]
    RegionNotCertified(usize),

    #[error("integer overflow: {0}")]
    Overflow(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
