use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph order {order} exceeds the supported bound {bound}")]
    OrderBound { order: usize, bound: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search bound exceeded: {0}")]
    BoundExceeded(String),

    #[error("malformed vertex map: {0}")]
    MalformedMap(String),

    #[error("graph6: {0}")]
    Graph6(String),

    #[error("unknown class identifier `{0}`")]
    UnknownClass(String),

    #[error("unsupported certificate schema version {found} (this build reads up to {supported})")]
    SchemaVersion { found: u32, supported: u32 },

    #[error("internal invariant broken: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
