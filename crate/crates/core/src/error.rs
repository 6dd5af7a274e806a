use std::path::PathBuf;

/// Errors produced anywhere in the quality-assessment pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unsupported image format")]
    UnsupportedFormat,

    #[error("corrupt image stream: {0}")]
    CorruptStream(String),

    #[error("gamma must be positive, got {0}")]
    NonPositiveGamma(f64),

    #[error("plane has no samples")]
    EmptyPlane,

    #[error("{scales} scales need a {needed}x{needed} image, got {width}x{height}")]
    TooManyScales {
        scales: usize,
        needed: usize,
        width: usize,
        height: usize,
    },

    #[error("malformed wavelet pyramid: {0}")]
    MalformedPyramid(String),

    #[error("grouplet depth {depth} needs at least {needed} samples along the pairing axis, got {extent}")]
    DepthTooLarge {
        depth: usize,
        needed: usize,
        extent: usize,
    },

    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("similarity map is empty")]
    EmptyMap,

    #[error("image too small: minimum dimension {min} required, got {width}x{height}")]
    ImageTooSmall {
        min: usize,
        width: usize,
        height: usize,
    },

    #[error("feature kind mismatch: {0} vs {1}")]
    KindMismatch(String, String),

    #[error("weight map has zero total mass")]
    ZeroWeightMass,

    #[error("map is constant and cannot be normalized for display")]
    DegenerateMap,

    #[error("expected color space {expected}, got {actual}")]
    WrongColorSpace {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("manifest is missing column `{0}`")]
    MissingColumn(String),

    #[error("line {line}: unknown distortion code `{code}` for database {database}")]
    UnknownDistortionCode {
        database: String,
        code: String,
        line: usize,
    },

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("manifest line {line}: {message}")]
    BadRecord { line: usize, message: String },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("input is degenerate (all values equal)")]
    DegenerateInput,

    #[error("sample too small for significance testing: n = {0}, need at least 4")]
    SampleTooSmall(usize),

    #[error("correlation magnitude must be below 1 for the Fisher transform, got {0}")]
    PerfectCorrelation(f64),

    #[error("no records available for {0}")]
    EmptyCategory(String),

    #[error("score for estimator {0} missing from record {1}")]
    MissingScore(String, String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
