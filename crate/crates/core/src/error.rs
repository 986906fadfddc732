use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid mesh parameters: {0}")]
    InvalidMesh(String),

    #[error("invalid quadrature request: {0}")]
    InvalidQuadrature(String),

    #[error("unsupported polynomial degree {0} (supported: 0..=4)")]
    UnsupportedDegree(usize),

    #[error("non-finite value in {stage} (element {element})")]
    NonFinite { stage: &'static str, element: usize },

    #[error("cell averages outside [{lower}, {upper}] in {} element(s), first: {}", elements.len(), elements.first().copied().unwrap_or_default())]
    AverageOutOfBounds {
        lower: f64,
        upper: f64,
        elements: Vec<usize>,
    },

    #[error("model `{0}` has no exact solution")]
    MissingExactSolution(String),

    #[error("time integration stopped after {0} steps without reaching the final time")]
    StepLimit(usize),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
