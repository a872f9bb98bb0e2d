//! Frobenius powers `J^[q]` and Frobenius roots `b^[1/q]`, `q = p^e`.
//!
//! Over F_p every coefficient is fixed by Frobenius, so splitting a
//! polynomial over the basis `{x^a : 0 <= a_i < q}` of R over R^q is plain
//! term bucketing: `c x^(q u + a)` contributes `c x^u` to the bucket `a`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ideals::{interreduce_linear, Ideal};
use crate::par::Exec;
use crate::poly::{Monomial, MvPoly, Term};

fn q_of(p: u64, e: u32) -> Result<u64> {
    p.checked_pow(e).ok_or(Error::ExponentOverflow)
}

pub fn frobenius_power(ideal: &Ideal, e: u32) -> Result<Ideal> {
    let gens = ideal
        .generators()
        .iter()
        .map(|g| g.frobenius_pow(e))
        .collect::<Result<Vec<_>>>()?;
    Ideal::new(ideal.ring(), gens)
}

/// The components `g_a` of `h = Σ_a g_a^q x^a`, in increasing bucket order.
pub fn basis_components(h: &MvPoly, e: u32) -> Result<Vec<MvPoly>> {
    let q = q_of(h.ring().prime(), e)?;
    let mut buckets: BTreeMap<Monomial, Vec<Term>> = BTreeMap::new();
    for (m, c) in h.terms() {
        let (quot, rem) = m.split(q);
        buckets.entry(rem).or_default().push((quot, *c));
    }
    Ok(buckets
        .into_values()
        .map(|t| MvPoly::from_terms(h.ring(), t))
        .collect())
}

pub fn frobenius_root(ideal: &Ideal, e: u32) -> Result<Ideal> {
    frobenius_root_with(ideal, e, Exec::default())
}

pub fn frobenius_root_with(ideal: &Ideal, e: u32, exec: Exec) -> Result<Ideal> {
    let parts = exec.map(ideal.generators().to_vec(), |g| basis_components(&g, e));
    let mut all = Vec::new();
    for p in parts {
        all.extend(p?);
    }
    Ideal::new(ideal.ring(), interreduce_linear(&all))
}

/// `(h)^[1/q]` for a single polynomial.
pub fn root_of_poly(h: &MvPoly, e: u32) -> Result<Ideal> {
    Ideal::new(h.ring(), interreduce_linear(&basis_components(h, e)?))
}
