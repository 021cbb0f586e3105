//! Exact symbolic calculus for full groups of two minimal ample groupoids on
//! the Cantor set: the base-`b` odometer and the full-shift Deaconu–Renault
//! groupoid.
//!
//! Everything here is finitary and exact. Clopen sets are canonical antichains
//! of cylinders, group elements are finitely piecewise prefix maps in a
//! canonical form (so syntactic equality is semantic equality), and measures
//! are rationals whose denominators are powers of the base.
//!
//! On top of the element algebra sit the witness synthesizers:
//!
//! * [`transfer`] moves clopen sets into one another by involutions,
//!   commutators and exact swaps, and runs the truncated alternating
//!   intertwining construction;
//! * [`decompose`] splits elements into factors with small support;
//! * [`certificate`] expresses commutators as products of conjugates of an
//!   arbitrary nontrivial element and checks such expressions.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod backend;
pub mod certificate;
pub mod clopen;
pub mod decompose;
pub mod element;
pub mod encoding;
pub mod error;
pub mod measure;
pub mod transfer;
pub mod word;

pub use backend::{Backend, BackendKind, Bisection, MeasureClass, OdometerPiece, Piece, ShiftPiece};
pub use certificate::{ConjugateFactor, ConjugateProduct, Environment, GroupWord, ProofTrace, Token};
pub use clopen::{ClopenSet, Cylinder, DiameterBound};
pub use decompose::{DecompositionResult, SplitResult};
pub use element::{DerivedWitness, GroupElement, WitnessExpr};
pub use error::{Error, Result};
pub use measure::MeasureValue;
pub use transfer::{GwRound, GwState, TransferKind, TransferResult};
pub use word::{PointName, Word};

/// Exact nonnegative rational used for thresholds such as `ε` that need not
/// have a power-of-base denominator.
pub type Ratio = num_rational::Ratio<u128>;
