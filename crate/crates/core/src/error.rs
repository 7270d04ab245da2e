use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),

    #[error("edge {{{0}, {1}}} is not present in the graph")]
    MissingEdge(usize, usize),

    #[error("edge {{{0}, {1}}} is not a cut edge")]
    NotACutEdge(usize, usize),

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("labeling must be total but vertex {0} is unlabeled")]
    PartialLabeling(usize),

    #[error("labeling covers {labeling} vertices but graph has {graph}")]
    SizeMismatch { labeling: usize, graph: usize },

    #[error("noise rate {0} is infeasible (must lie in [0, 0.5))")]
    InfeasibleNoise(f64),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0} is undefined for an empty cut set")]
    UndefinedParameter(&'static str),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by parameter combinations that cannot be satisfied, as
    /// opposed to malformed input.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::InfeasibleNoise(_) | Error::Infeasible(_) | Error::Generation(_)
        )
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
