//! Non-orientable 4-genus bounds for knots.
//!
//! The pipeline combines lower bounds — a mod-8 congruence on signature and
//! Arf invariant, a definite-lattice embedding obstruction applied to
//! checkerboard Goeritz forms, and a linking-form obstruction on the double
//! branched cover — with trusted upper-bound certificates (slice facts and
//! non-oriented band moves) propagated over a certificate graph, and resolves
//! the value for every knot in the bundled 10-crossing census.

// dense small-matrix code reads better with explicit indices
#![allow(clippy::needless_range_loop, clippy::manual_is_multiple_of)]

pub mod census;
pub mod certify;
pub mod diagram;
pub mod goeritz;
pub mod lattice;
pub mod matrix;
pub mod obstruct;

pub use census::{run_census, CensusConfig, CensusReport};
pub use diagram::KnotDiagram;
pub use goeritz::{Definiteness, GoeritzForm};
pub use lattice::{embed, square_divisors, EmbeddingProblem, EmbeddingStatus};
pub use obstruct::{InvariantRecord, LinkingForm};
