use thiserror::Error;

use crate::shiftspace::{EventuallyPeriodicPoint, PeriodicOrbit};

#[derive(Debug, Error)]
pub enum Error {
    #[error("symbol `{0}` is not in the alphabet")]
    InvalidSymbol(String),
    #[error("operands live on different shift spaces")]
    SpaceMismatch,
    #[error("word is not admissible: {0}")]
    Inadmissible(String),
    #[error("set is not a feedback set; a point whose orbit avoids it: {witness}")]
    NotFeedback { witness: EventuallyPeriodicPoint },
    #[error("space has a periodic orbit `{}` of period {} < {n}", orbit.label(), orbit.period())]
    HasShortPeriod { orbit: PeriodicOrbit, n: usize },
    #[error("deepening loop `{stage}` exceeded the configured bound {max_depth}")]
    DepthExhausted { stage: &'static str, max_depth: usize },
    #[error("`{stage}` would need {needed} items, over the limit {limit}")]
    BlockLimit {
        stage: &'static str,
        needed: u128,
        limit: usize,
    },
    #[error("not a tower: base meets its own image under T^{0}")]
    NotATower(usize),
    #[error("castle is not a partition: {0}")]
    NotPartition(String),
    #[error("construction invariant violated: {0}")]
    Internal(String),
    #[error("matrix is singular to working precision (sigma_min / sigma_max = {0:e})")]
    Singular(f64),
    #[error("numerical routine failed: {0}")]
    NumericalFailure(String),
    #[error("eigenvalue lemma needs d >= 3 over the reals (got d = {0})")]
    FieldDimUnsupported(usize),
    #[error("propagated subspace lost rank (ratio {0:e})")]
    IllConditionedFrame(f64),
    #[error("matrices have inconsistent field or dimension")]
    ShapeMismatch,
    #[error("cocycle has no value for central word `{0}`")]
    MissingValue(String),
    #[error("real 2-dimensional cocycle over a space with periodic orbit `{}` of period < {n}", orbit.label())]
    ShortTowerUnsupported { orbit: PeriodicOrbit, n: usize },
    #[error("cocycle is not constant on floor {floor} of tower {tower}")]
    NotConstantOnFloor { tower: usize, floor: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
