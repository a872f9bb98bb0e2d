//! Positive-characteristic singularity invariants of a polynomial over a
//! prime field: Frobenius powers and roots of ideals, test ideals,
//! F-jumping exponents, F-thresholds and the Bernstein-Sato polynomials
//! `b_f^(e)`, together with an exact model of the D-module `B_f` in the
//! `δ_m` basis and its Euler-operator eigenbasis.

pub mod arith;
pub mod bfmod;
pub mod bsato;
pub mod error;
pub mod frobenius;
pub mod par;
pub mod ideals;
pub mod poly;
pub mod report;
pub mod singular;

pub use error::{Error, Result};
