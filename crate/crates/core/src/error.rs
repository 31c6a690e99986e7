use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point lies where the operation is not defined (outside the bounding
    /// box, outside Ω̄_ε, inside an excluded ball).
    #[error("domain error: {0}")]
    Domain(String),

    /// A lattice lookup fell outside the grid extents.
    #[error("range error: {0}")]
    Range(String),

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("logic error: {0}")]
    Logic(String),

    #[error("estimation error: {0}")]
    Estimation(String),
}
