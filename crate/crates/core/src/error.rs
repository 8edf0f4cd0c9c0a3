use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("unsupported torus dimension {0} (expected 1, 2 or 3)")]
    UnsupportedDimension(usize),

    #[error("{name} = {value} lies outside [-1, 1]")]
    Domain { name: &'static str, value: f64 },

    #[error("{what}: resolution {available} is insufficient, order {required} required")]
    Resolution {
        what: &'static str,
        required: usize,
        available: usize,
    },

    #[error("support not thin: nominal dimension {k} is not below manifold dimension {d}")]
    NotThin { k: f64, d: usize },

    #[error("the {0} is zero, ratio undefined")]
    UndefinedRatio(&'static str),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("objects belong to different manifolds or spectrum tables")]
    ManifoldMismatch,

    #[error("measure has empty support")]
    EmptySupport,
}

impl Error {
    pub(crate) fn arg(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}
