//! Few-term permutation polynomials over GF(q^2).
//!
//! Low-degree permutation rational functions of the projective line are
//! conjugated by degree-one bijections μ_{q+1} <-> P^1(GF(q)) and turned into
//! polynomials of the form X^r h(X^(q-1)). The crate builds those families,
//! checks the permutation property two independent ways and decides
//! quasi-multiplicative equivalence at small field sizes.

pub mod catalog;
pub mod constructions;
pub mod field;
pub mod poly;
pub mod qm;
pub mod rational;
pub mod registry;
pub mod repro;
pub mod verification;
pub mod wire;

pub use field::{ArithOp, FieldCtx, FieldElement, FieldError, QuadExtension, Subfield};
pub use poly::{PolyError, SparsePolynomial};
pub use rational::{MobiusMap, ProjMap, ProjPoint, RationalFunction};
