//! Efron–Stein decompositions, Laplacians and hypercontractive inequalities on
//! weighted partite complexes, with numeric checks for each bound.

pub mod bounds;
pub mod calculus;
pub mod check;
pub mod decomposition;
pub mod error;
pub mod generators;
pub mod harness;
pub mod measure;
pub mod numeric;
pub mod operators;
pub mod subset;
pub mod walks;

pub use check::{CheckRecord, Status};
pub use error::{Error, Result};
pub use measure::{Fn, PartialAssignment, PartiteUniverse, WeightedComplex};
pub use subset::Subset;
