use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("d∘d ≠ 0 at degree {degree}")]
    ComplexInvalid { degree: i64 },
    #[error("unknown element: {0}")]
    UnknownElement(String),
    #[error("cannot contract loop edge {0}")]
    LoopContraction(usize),
    #[error("cannot contract external edge {0}")]
    ExternalEdge(usize),
    #[error("graph has no vertex of valence at least 3 and is not reduced")]
    NotReducible,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("thickening is only defined for graphs without legs")]
    LegsPresent,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("label mismatch: {0}")]
    LabelMismatch(String),
    #[error("rewriting did not terminate within {bound} steps")]
    NonTermination { bound: usize },
    #[error("generator not supported by evaluation: {0}")]
    UnsupportedGenerator(String),
    #[error("pairing is degenerate on {0}; copairing unavailable")]
    NondegeneracyRequired(String),
    #[error("differential does not descend to the quotient in degree {degree}")]
    DescentFailure { degree: i64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
