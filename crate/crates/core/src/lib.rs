//! Square-difference-quotient sequences over prime fields.
//!
//! The central predicate: a sequence `f(0..L)` over `F_p` with `f(0)=0`,
//! `f(1)=1` is admissible when every difference quotient
//! `(f(x)-f(y))/(x-y)` is a square (zero allowed). This crate counts such
//! sequences (`W(p,L)`), finds the minimal length forcing the identity
//! (`L(p)`), compares the counts against a Gaussian model, classifies all
//! self-maps of small fields satisfying the condition, decides Paley-graph
//! simplicity, verifies the related conic/quartic curve identities, and
//! checks rational sequences exactly.
//!
//! Module map:
//! - [`ffield`] — prime fields, small extensions, the quadratic character
//! - [`search`] — the sieve-pruned parallel enumeration engine
//! - [`gauss`] — the probabilistic model `G(p,L)` and size diagnostics
//! - [`carlitz`] — condition-map enumeration/classification, Paley graphs
//! - [`curves`] — conic parametrizations and the quartic family
//! - [`rational`] — exact rational verification and reduction mod p

pub mod carlitz;
pub mod curves;
pub mod ffield;
pub mod gauss;
pub mod rational;
pub mod search;

pub use ffield::OddPrime;
