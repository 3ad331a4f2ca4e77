use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("step size {step:e} fell below the minimum {min_step:e} at t = {t}")]
    StepUnderflow { t: f64, step: f64, min_step: f64 },

    #[error("solution exceeded the blow-up threshold at t = {t}")]
    BlowupDetected { t: f64 },

    #[error("maximum number of steps ({0}) exceeded")]
    MaxStepsExceeded(usize),

    #[error("no sign change on bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("root finder did not converge after {0} iterations")]
    MaxIterations(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shooting failed: {0}")]
    ShootingFailed(String),

    #[error("complete blow-up: alpha = {alpha} is below the critical exponent -1/10")]
    CompleteBlowup { alpha: f64 },

    #[error("insufficient oscillatory tail: {0}")]
    InsufficientTail(String),

    #[error("no singularity model fits the data")]
    Unclassified,

    #[error("no admissible zero found for the next saw hump left of z = {0}")]
    RootNotFound(f64),

    #[error("at least {needed} humps are required, got {got}")]
    InsufficientHumps { needed: usize, got: usize },

    #[error("value jump is zero")]
    ZeroJump,

    #[error("evaluation at or past the blow-up time")]
    AtBlowup,

    #[error("C3 = {0} does not blow up")]
    NonBlowup(f64),

    #[error("x = {x} outside [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("initial coefficient J0 = {0} is not positive")]
    NonpositiveJ0(f64),

    #[error("cut-off integral c0 does not converge")]
    DivergentC0,

    #[error("at least {needed} samples are required, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("time step {dt:e} exceeds the stability limit {limit:e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("requested similarity window is outside the computed region: {0}")]
    OutOfWindow(String),

    #[error("profile is singular at the origin for a negative exponent")]
    SingularAtOrigin,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by parameter values rather than by the computation.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidInput(_) | Error::InvalidGrid(_) | Error::InsufficientHumps { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
