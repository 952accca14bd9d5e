//! Exact decision procedures for ubiquity and strict positive definiteness
//! of character sets on compact abelian groups of the form `F x T^r`
//! (`F` finite abelian, `T` the circle group).
//!
//! The dual group of `F x T^r` is identified with `F^ x Z^r`. Subsets of the
//! dual are described by finite unions of shifted subgroups of `Z^r` (and
//! complements thereof), attached slice-wise to the characters of `F`. On
//! that set algebra the library decides, in exact integer/cyclotomic
//! arithmetic:
//!
//! * whether a set meets every coset of every finite-index subgroup
//!   ("ubiquity"), producing a disjoint finite-index coset as witness when
//!   it does not;
//! * whether a set supports a strictly positive definite function, with a
//!   nonzero trigonometric polynomial vanishing on the set as the negative
//!   certificate;
//! * brute-force oracles on finite groups, and a floating-point harness that
//!   checks the Bochner-side quadratic-form identities on synthesized
//!   functions.

pub mod cosets;
pub mod cyclo;
pub mod findual;
pub mod json;
pub mod lattice;
pub mod phase;
pub mod product;
pub mod trigpoly;
pub mod verify;

pub(crate) mod util;

pub use cosets::{Coset, CosetUnion, CoverOutcome, SetExpr, SpdVerdict, UbiquityVerdict};
pub use cyclo::CycloNumber;
pub use findual::{FiniteCharacter, FiniteElement, FiniteGroupSpec};
pub use lattice::{AdaptedBasis, IndexValue, IntMatrix, LatticeSubgroup};
pub use phase::Phase;
pub use product::DualSliceMap;
pub use trigpoly::{Character, GroupPoint, TrigPoly};
