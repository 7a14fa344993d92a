use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("non-finite values: {0}")]
    Overflow(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("singular transform: phi = {value:e} at node {node:?}")]
    SingularTransform { node: Vec<usize>, value: f64 },
    #[error("special function: {0}")]
    SpecialFunction(String),
    #[error("eigensolver: {0}")]
    Eigen(String),
    #[error("unknown example id {0}")]
    UnknownExample(u32),
    #[error("config: {0}")]
    Config(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn at(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.at(stage))
    }
}
