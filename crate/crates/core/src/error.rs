use crate::rational::Rational;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// A piece whose image leaves the interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Escape {
    pub left: Rational,
    pub right: Rational,
    pub a: Rational,
    pub b: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: zero slope")]
    ZeroSlope { line: usize },
    #[error("pieces do not cover the interval: {0}")]
    Coverage(String),
    #[error("image of piece ({}, {}) escapes [{}, {}]", .0.left, .0.right, .0.a, .0.b)]
    ImageEscapes(Box<Escape>),
    #[error("empty interval: need a < b")]
    EmptyInterval,
    #[error("{0} lies outside the interval")]
    OutOfDomain(Rational),
    #[error("no {side} side at {point}")]
    NoSide { point: Rational, side: &'static str },
    #[error("maps are defined on different intervals")]
    IntervalMismatch,
    #[error("piece count exceeds the limit of {0}")]
    PieceLimit(usize),
    #[error("power {power} exceeds the limit of {limit}")]
    PowerLimit { power: usize, limit: usize },
    #[error("{count} discontinuities exceed the variant limit of {limit}")]
    VariantLimit { count: usize, limit: usize },
    #[error("the structure of {0} is not closed")]
    NotConfined(Rational),
    #[error("{0} is not a node of the structure")]
    NotInStructure(Rational),
    #[error("{0} is not a special point")]
    NotSpecial(Rational),
    #[error("orbit of {0} meets a discontinuity")]
    HitsDiscontinuity(Rational),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no one-sided window at {0}")]
    DegenerateWindow(Rational),
    #[error("invariant violated: {0}")]
    Violation(String),
    #[error("generator gave up after {0} rejected samples")]
    RejectionBudget(usize),
    #[error("bundle does not fail")]
    NotFailing,
    #[error("{0}")]
    Invalid(String),
}
