pub mod analysis;
pub mod cli;
pub mod coding;
pub mod diagram;
pub mod error;
pub mod ldp;
pub mod map;
pub mod mapspec;
pub mod measures;
pub mod periodic;
pub mod scalar;
pub mod surd;

pub use error::{Error, Result};
pub use map::{MapParams, Side, SidedPoint, Sign, Symbol, Word};
pub use scalar::{Rational, Scalar};
pub use surd::QuadSurd;

pub use analysis::{Component, ComponentReport};
pub use coding::{KneadingData, Line};
pub use diagram::{CutTimes, MarkovDiagram};
pub use measures::EmpiricalMeasure;

/// Map with rational parameters and exact arithmetic.
pub type ExactMap = MapParams<Rational>;
/// Map with parameters in a real quadratic field.
pub type SurdMap = MapParams<QuadSurd>;
/// Map evaluated in double precision.
pub type FloatMap = MapParams<f64>;
