use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("scenario rejected: need {needed} base stations, found {found}")]
    ScenarioRejected { needed: usize, found: usize },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch { context: &'static str, expected: usize, found: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("no model for sweep point {point}")]
    MissingModel { point: String },

    #[error("malformed model file at `{field}`: {detail}")]
    ModelParse { field: String, detail: String },

    #[error("unsupported model file version {found} (expected {expected})")]
    UnsupportedVersion { found: u64, expected: u64 },

    #[error("malformed dataset: {0}")]
    DatasetParse(String),

    #[error("trial {trial} rejected after {retries} regenerations")]
    RetriesExhausted { trial: u64, retries: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
