use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o failure on {path:?}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("not a NIfTI-1 single file: {0}")]
    BadMagic(String),
    #[error("unsupported NIfTI datatype code {0}")]
    UnsupportedDatatype(i16),
    #[error("unsupported dim layout {0:?}")]
    UnsupportedLayout([i16; 8]),
    #[error("payload truncated: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("non-finite value at voxel {0}")]
    NonFiniteData(usize),
    #[error("invalid header: {0}")]
    InvalidHeader(String),
    #[error("value {value} at voxel {index} cannot be stored as a label")]
    InvalidLabel { index: usize, value: f64 },
    #[error("value {value} does not fit datatype {datatype}")]
    ValueOutOfRange { value: f64, datatype: &'static str },

    #[error("malformed landmark row {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("duplicate landmark name {0:?}")]
    DuplicateName(String),
    #[error("non-finite landmark coordinate on row {0}")]
    NonFiniteCoordinate(usize),

    #[error("grid dimension mismatch: {0:?} vs {1:?}")]
    DimMismatch([usize; 3], [usize; 3]),
    #[error("data length {found} does not match grid size {expected}")]
    LengthMismatchData { expected: usize, found: usize },
    #[error("no voxels left to evaluate")]
    EmptyEvaluationSet,
    #[error("label list is empty")]
    EmptyLabelList,
    #[error("mask has no foreground voxels")]
    EmptyMask,
    #[error("landmark sets are not paired: {0}")]
    UnpairedLandmarks(String),
    #[error("landmark {name:?} at {p:?} lies outside the grid")]
    OutOfBoundsLandmark { name: String, p: [f64; 3] },
    #[error("velocity field contains non-finite values")]
    NonFiniteVelocity,

    #[error("empty input")]
    EmptyInput,
    #[error("quantile {0} outside [0, 100]")]
    BadQuantile(f64),
    #[error("sample lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("inconsistent method sets: {0}")]
    InconsistentMethodSets(String),
    #[error("invalid metric matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid phantom spec: {0}")]
    SpecInvalid(String),
    #[error("invalid field parameters: {0}")]
    BadParams(String),

    #[error("invalid registration config: {0}")]
    InvalidConfig(String),
    #[error("loss diverged (non-finite) at level {level}, iteration {iteration}")]
    DivergedLoss { level: usize, iteration: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
