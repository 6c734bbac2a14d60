use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precision too low: {bits} mantissa bits requested, at least {min} required")]
    PrecisionTooLow { bits: u32, min: u32 },

    #[error("quadrature did not converge after {doublings} doublings (last {last}, previous {previous})")]
    QuadratureDiverged {
        doublings: u32,
        last: String,
        previous: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("weight parameters must be positive, got p = {p}, q = {q}")]
    InvalidWeightParams { p: f64, q: f64 },

    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian: entry ({row}, {col}) deviates by {deviation}")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: String,
    },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual})")]
    EigenNotConverged { sweeps: u32, residual: String },

    #[error("cluster {id} out of range ({count} clusters)")]
    InvalidCluster { id: usize, count: usize },

    #[error("state vector is not normalized: norm {norm}")]
    NotNormalized { norm: String },

    #[error("density operator trace is {trace}, expected 1")]
    TraceNotOne { trace: String },

    #[error("density operator is not positive semidefinite: smallest eigenvalue {min_eigenvalue}")]
    NotPositive { min_eigenvalue: String },

    #[error("expectation has imaginary part {imag}; observable or state is not Hermitian")]
    ImaginaryExpectation { imag: String },

    #[error("frequency {freq} is resonant (within {tolerance} of an integer)")]
    ResonantFrequency { freq: String, tolerance: String },

    #[error("fit window [{lo}, {hi}] has {got} usable points, need at least {min}")]
    FitWindow {
        lo: u64,
        hi: u64,
        got: usize,
        min: usize,
    },

    #[error("{count} errors in window [{lo}, {hi}] are at or below the precision floor 1e-{floor_digits}; raise the mantissa bits")]
    PrecisionLimited {
        lo: u64,
        hi: u64,
        count: usize,
        floor_digits: u32,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
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
