use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("vertex set must be nonempty")]
    EmptyVertexSet,
    #[error("graph is not chordal")]
    NotChordal,
    #[error("identity element has no {0}")]
    Identity(&'static str),
    #[error("word is not cyclically reduced")]
    NotCyclicallyReduced,
    #[error("vertex set is not a clique")]
    NotClique,
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("bound exceeded: block root of length {length} is longer than the bound {bound}")]
    BoundExceeded { length: usize, bound: usize },
    #[error("no representative found for {0}")]
    NoRepresentative(String),
    #[error("extension of non-abelian centraliser unsupported: C({0}) is non-abelian")]
    NonAbelianCentralizer(String),
    #[error("element does not belong to this group: {0}")]
    ForeignElement(String),
    #[error("generator name clash: {0}")]
    NameClash(String),
    #[error("tuple is not generic: [{0}, {1}] = 1")]
    NonGeneric(String, String),
    #[error("centralisers of {0} and {1} are conjugate within one batch")]
    ConjugateCentralizers(String, String),
    #[error("truncation exceeded: exponent of degree {degree} needs a level of degree at least {degree}, have {available}")]
    TruncationExceeded { degree: usize, available: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Budget and truncation limits, as opposed to bad input or mathematical failure.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded(_) | Error::BoundExceeded { .. } | Error::TruncationExceeded { .. }
        )
    }
}
