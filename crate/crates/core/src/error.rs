use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed CSV at line {line}: {message}")]
    MalformedCsv { line: u64, message: String },

    #[error("duplicate subject id `{0}`")]
    DuplicateSubject(String),

    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),

    #[error("panel needs at least 2 subjects and 1 biomarker, got {subjects}x{columns}")]
    EmptyPanel { subjects: usize, columns: usize },

    #[error("non-finite value at row {row} (subject `{subject}`), column `{column}`")]
    NonFiniteValue {
        row: usize,
        subject: String,
        column: String,
    },

    #[error("column `{0}` has zero variance")]
    ZeroVariance(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("screening report does not match the panel's subjects")]
    StaleReport,

    #[error("cluster model does not match the panel")]
    StaleModel,

    #[error("k = {k} outside the valid range [2, {n}]")]
    KOutOfRange { k: usize, n: usize },

    #[error("silhouette needs at least two distinct clusters")]
    SingleCluster,

    #[error("{n} observations cannot support {components} mixture components")]
    TooFewObservations { n: usize, components: usize },

    #[error("r = {r} outside the valid range [1, {max}]")]
    ROutOfRange { r: usize, max: usize },

    #[error("invalid seed spec: {0}")]
    SpecInvalid(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("rule file line {line}: {message}")]
    RuleParse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line()).unwrap_or(0);
        match err.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::MalformedCsv {
                line,
                message: format!("{other:?}"),
            },
        }
    }
}
