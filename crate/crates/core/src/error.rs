use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quadrature order {0} outside the supported range 1..=2000")]
    RuleOrderOutOfRange(usize),

    #[error("non-finite integrand sample at x = {0}")]
    NonFiniteSample(f64),

    #[error("rule order {order} is too small for n_max = {n_max} (need at least {needed})")]
    RuleTooSmall {
        order: usize,
        n_max: usize,
        needed: usize,
    },

    #[error("contour radius must be positive, got {0}")]
    BadRadius(f64),

    #[error("contour sample count {samples} below the floor {floor} for n = {n}")]
    TooFewSamples {
        samples: usize,
        floor: usize,
        n: usize,
    },

    #[error("contour index n must be at least 1")]
    DegenerateContour,

    #[error("Mehler kernel needs |r| <= 0.95, got |r| = {0}")]
    MehlerRadius(f64),

    #[error("coefficient index {index} outside the available range 0..={n_max}")]
    IndexOutOfRange { index: usize, n_max: usize },

    #[error("Fock norm truncation did not settle: |N(r_max) - N(r_max + 2)| = {0:e}")]
    FockTruncation(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fit needs at least 8 positive points: {0}")]
    BadFitData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
