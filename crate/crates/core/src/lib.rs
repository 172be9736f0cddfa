//! Disc potentials of toric moment-map fibers, computed in exact arithmetic.
//!
//! The crate is organized around one computation path:
//! truncated series ([`series`]) feed fan combinatorics ([`toric`]), which
//! feeds the correction series and coordinate change ([`mirror`]), which
//! assembles the equivariant potential ([`potential`]). Two satellites share
//! the series kernel: chart gluing for the immersed sphere ([`immersed`]) and
//! Morse complexes on sphere-bundle approximation spaces ([`borel_morse`]).

pub mod borel_morse;
pub mod error;
pub mod immersed;
pub mod linalg;
pub mod mirror;
pub mod potential;
pub mod rational;
pub mod series;
pub mod toric;

pub use error::{Error, Result};
pub use rational::Rational;
pub use series::{reverse_family, SeriesContext, TruncatedSeries};
pub use toric::{CurveClass, EnumerateConstraints, ToricInput, ValidationReport};
