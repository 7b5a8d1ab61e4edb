use thiserror::Error;

use crate::measures::ClassVerdict;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{name} = {value} is out of range ({expected})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("degenerate measure: density vanishes identically")]
    DegenerateMeasure,

    #[error("measure is not certified as class A (verdict: {0})")]
    NotInClass(ClassVerdict),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("unsupported function: {0}")]
    UnsupportedFunction(String),

    #[error("function evaluated on its singular set at {re}{im:+}i")]
    SingularPoint { re: f64, im: f64 },

    #[error("segment mismatch: expected [{expected_a}, {expected_b}], found [{found_a}, {found_b}]")]
    SegmentMismatch {
        expected_a: f64,
        expected_b: f64,
        found_a: f64,
        found_b: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn out_of_range(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::OutOfRange {
        name,
        value,
        expected,
    }
}
