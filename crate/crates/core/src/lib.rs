//! Exact dynamics of well-behaved piecewise continuous interval maps.
//!
//! Maps are piecewise affine with rational coefficients, so every quantity
//! the library reports (special points, preimages, compositions, periodic
//! orbits, stability verdicts) is computed without rounding.

pub mod cli;
pub mod codes;
pub mod error;
pub mod harness;
pub mod map;
pub mod orbit;
pub mod plot;
pub mod rational;
pub mod stability;
pub mod taxonomy;

pub use error::{Error, Result};
pub use map::{AffinePiece, Limits, PiecewiseMap, Side, SpecialPoints};
pub use rational::Rational;
