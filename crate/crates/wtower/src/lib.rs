//! Exact symbolic computation with labeled unitrivalent trees and the
//! link-invariant bookkeeping built on top of them.
//!
//! The building blocks are non-associative bracketings ([`tree::RootedTree`]),
//! unrooted trees obtained by gluing two bracketings at their roots
//! ([`tree::FramedTree`]), and bracketings whose root vertex carries a twist
//! mark ([`tree::TwistedTree`]). On top of those sit:
//!
//! * [`forest`] — weighted multisets of trees with a knowledge frontier, and
//!   the order/invariant extraction functions defined on them;
//! * [`laurent`] — exact integer Laurent polynomials, the `t -> 1/t`
//!   involution, and the change of variables `x = (1-t)(1-t^-1)`;
//! * [`eta`] — null-homotopy crossing-change accounting producing Laurent
//!   polynomials and their x-power-series;
//! * [`ihx`] — signed canonical forms for oriented trees and reduction
//!   modulo the IHX + antisymmetry relation lattice;
//! * [`normalize`] — the elimination moves that turn a forest into one whose
//!   certified order is a requested even bound, with a replayable move log;
//! * [`clasper`] — classification of single surgeries and their aggregate
//!   effect on the extracted invariants.
//!
//! Everything is exact: integers are `i64` (arbitrary precision where
//! polynomial coefficients are involved) and all predicates are decided
//! symbolically, never numerically.

pub mod clasper;
pub mod eta;
pub mod forest;
pub mod ihx;
pub mod laurent;
pub mod normalize;
pub mod sign;
pub mod tree;

pub use sign::Sign;
