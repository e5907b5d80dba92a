//! Exact-arithmetic engine for free-field vertex algebras.
//!
//! The crate computes with three families of free-field algebras and the
//! invariant subalgebras sitting inside them:
//!
//! - the rank-n beta-gamma system `S(n)` (even generators, symplectic symmetry),
//! - the free-fermion algebra `F(n)` (odd generators, orthogonal symmetry),
//! - the mixed system `S(n) (x) F(1)` (orthosymplectic symmetry).
//!
//! Everything is done over arbitrary-precision rationals; there is no floating
//! point anywhere. The main layers, bottom up:
//!
//! - [`arith`]: rationals, exact dense/sparse linear solving, determinants.
//! - [`freefield`]: canonical normally ordered monomials and all circle
//!   products `a o_n b` (OPE coefficients for `n >= 0`, derivative-weighted
//!   Wick products for `n < 0`).
//! - [`wbasis`]: the abstract generator layer — words in the quadratics
//!   `Om_{a,b}`, the change of basis to `d^k W^m`, realization maps into the
//!   free-field algebras, and the weight-raising mode action.
//! - [`classical`]: commutative polynomials in `Q_{a,b}`, Pfaffian and
//!   determinant-analogue relation generators, and a truncated
//!   (super)symmetric-algebra oracle for kernel membership.
//! - [`remainder`]: the remainder numbers attached to quantum-corrected
//!   relations — base formulas, recursions, the closed product formula, and
//!   the constant-term (large-index limit) map.
//! - [`corrections`]: normal ordering of classical relations, the correction
//!   loop that pushes them into the kernel of the realization, remainder and
//!   decoupling extraction, and the weight-16 regression fixture.
//!
//! The crate is `no_std` (with `alloc`); IO, parsing of the text grammar and
//! the command-line front end live in the companion crate.

#![no_std]

extern crate alloc;

pub mod arith;
pub mod classical;
pub mod corrections;
pub mod freefield;
pub mod remainder;
pub mod wbasis;

pub use arith::{Rational, RationalMatrix};
pub use freefield::VPoly;
pub use wbasis::{Family, WPoly};
