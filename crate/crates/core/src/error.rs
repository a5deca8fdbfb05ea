use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("angle {0} rad lies outside [-pi/2, pi/2]")]
    AngleOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    #[error("no eigenmode can carry a positive power budget")]
    NoUsableMode,

    #[error("training symbol {0} is zero")]
    ZeroTrainingSymbol(usize),

    #[error("training sequence violates its power constraints: {0}")]
    TrainingPower(String),

    #[error("degenerate training sequence (zero sample power)")]
    DegenerateTraining,

    #[error("angle {0} rad is unidentifiable: the Fisher information vanishes")]
    Unidentifiable(f64),

    #[error("no observations supplied")]
    EmptyObservations,

    #[error("angle grid is empty")]
    EmptyGrid,

    #[error("observation carries no energy along any steering vector")]
    DegenerateSpectrum,

    #[error("trial {index} failed: {source}")]
    Trial {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
