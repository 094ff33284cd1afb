use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown catalog entry `{0}`")]
    Catalog(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("invalid stochastic map: {0}")]
    InvalidMap(String),
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("invalid correlation: {0}")]
    InvalidCorrelation(String),
    #[error("parameter `{name}` = {value} outside {range}")]
    Parameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("unknown target set `{0}`")]
    UnknownTarget(String),
    #[error("grid of {points:.3e} points exceeds the {limit:.0e} guard")]
    GridTooLarge { points: f64, limit: f64 },
    #[error("point ({x}, {y}) is off the normalization line of task {task}")]
    OffLine { x: f64, y: f64, task: u32 },
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),
    #[error("invalid box-world state: {0}")]
    InvalidBwState(String),
    #[error("index {index} out of range {range}")]
    Index { index: usize, range: &'static str },
    #[error("empty search space")]
    EmptySearch,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Parameter {
            name,
            value,
            range: "[0, 1]",
        })
    }
}
