//! Exact computation in groups of piecewise-projective homeomorphisms of the
//! real line with coefficients in rings of S-integers `Z[1/S]`.
//!
//! The crate is layered bottom-up:
//!
//! - [`numbers`]: rationals, p-adic valuations, real quadratic irrationals;
//! - [`moebius`]: `SL2(Q)` matrices acting on the projective line;
//! - [`piecewise`]: the group elements themselves;
//! - [`constructions`]: witness constructions (compactly supported
//!   extensions, commutator certificates, commensuration and unconfinement
//!   witnesses);
//! - [`text`]: the textual grammar for numbers, matrices and elements.

pub mod constructions;
pub mod moebius;
pub mod numbers;
pub mod par;
pub mod piecewise;
pub mod text;

pub use moebius::{FixedPointData, MobiusClass, ProjPoint, Sl2};
pub use numbers::{ExtReal, PrimeSet, Quadratic, Rational};
pub use piecewise::{PPMap, Piece, Support};
