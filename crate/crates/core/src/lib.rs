//! Exact geometric invariant theory for self-maps of projective space:
//! stability verdicts, semistable models over discrete valuation rings,
//! splitting types of the resulting bundles over `P^1`, and invariants of
//! quadratic maps.

pub mod algebra;
pub mod bundles;
pub mod corpus;
pub mod error;
pub mod json;
pub mod map_space;
pub mod moduli;
pub mod reduction;
pub mod stability;

pub use algebra::field::{int, parse_rat, rat, rat_to_string, Field, Rat};
pub use algebra::form::HomogForm;
pub use algebra::fp::Fp;
pub use algebra::matrix::SquareMatrix;
pub use algebra::place::{LocalField, Place};
pub use algebra::poly::UniPoly;
pub use algebra::quotient::QuotientElem;
pub use algebra::ratfunc::RatFunc;
pub use error::{Error, Result};
pub use map_space::RationalMap;
pub use stability::{Certificate, OnePS, StabilityVerdict, VerdictKind};

/// Maps over `Q`.
pub type QMap = RationalMap<Rat>;
/// Families over `Q(c)`.
pub type QcMap = RationalMap<RatFunc>;
/// Maps over a prime field, as produced by `p`-adic reduction.
pub type FpMap = RationalMap<Fp>;
/// Elements of a simple algebraic extension of `Q`.
pub type AlgebraElem = QuotientElem<Rat>;
pub type QMatrix = SquareMatrix<Rat>;
pub type QcMatrix = SquareMatrix<RatFunc>;
