//! Finite-field and continued-fraction machinery for sum-product
//! experiments in F_p and PSL₂(F_p).

pub mod bounded_cf;
pub mod cayley;
pub mod contfrac;
pub mod error;
pub mod group_sets;
pub mod incidence;
pub mod measures;
pub mod modp;
pub mod scalar;
pub mod stats;

pub use error::{Error, Result};
pub use incidence::ProjSet;
pub use measures::GroupFunction;
pub use modp::{is_prime, Mat2, PrimeContext, ProjPoint, Psl2Elem, Psl2Group, ResidueSet};
pub use scalar::Weight;

use num_rational::{BigRational, Ratio};

pub type FloatMeasure = GroupFunction<f64>;
pub type SingleMeasure = GroupFunction<f32>;
pub type ExactMeasure = GroupFunction<BigRational>;
/// Exact with fixed-width rationals (faster; overflow panics).
pub type SmallExactMeasure = GroupFunction<Ratio<i128>>;
