use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point was evaluated outside the open domain of a map piece.
    #[error("domain error in {piece}: {detail}")]
    Domain { piece: &'static str, detail: String },

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("usage error: {0}")]
    Usage(String),

    /// The requested object cannot be built with the given margins.
    #[error("construction error: {0}")]
    Construction(String),
}

impl Error {
    pub(crate) fn domain(piece: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            piece,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
