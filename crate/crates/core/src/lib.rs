//! Gröbner-basis engine for the subring of `H*(G~(n,3); Z/2)` generated by
//! `w2` and `w3`, presented as `Z/2[w2, w3] / J_n`.
//!
//! - [`f2poly`]: polynomials over GF(2) in two variables, lex order, division.
//! - [`binexp`]: binary-expansion combinatorics and Lucas parity.
//! - [`grassmann_ideal`]: generators of `J_n` and the closed-form basis family.
//! - [`groebner`]: Buchberger completion, verification, reduced bases.
//! - [`invariants`]: cup-length, heights, Stiefel-Whitney computations.

pub mod binexp;
pub mod f2poly;
pub mod grassmann_ideal;
pub mod groebner;
pub mod invariants;

pub use f2poly::{Monomial, Polynomial};
pub use groebner::{GroebnerBasis, Provenance};
