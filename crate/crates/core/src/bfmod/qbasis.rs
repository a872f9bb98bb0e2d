//! The common eigenbasis `Q^m_(i_1..i_e)` of `θ_1, θ_p, .., θ_(p^(e-1))`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::{act_theta, BfContext, BfElement};
use crate::arith::{p_digits, DigitTuple};
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::poly::MvPoly;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QIndex {
    pub digits: DigitTuple,
    pub m: u64,
}

impl QIndex {
    pub fn new(digits: DigitTuple, m: u64) -> Self {
        Self { digits, m }
    }

    pub fn level(&self) -> usize {
        self.digits.level()
    }
}

impl fmt::Display for QIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q^{}{}", self.m, self.digits)
    }
}

fn sign(digits: &[u64]) -> bool {
    digits.iter().sum::<u64>() % 2 == 1
}

/// The explicit δ-expansion of `Q^m_i`:
/// `(-1)^Σi Σ_j Π_l C(i_l + j_l, i_l) f^(Σ j_l p^(l-1)) δ_(m q + Σ (i_l + j_l) p^(l-1))`
/// over `0 <= j_l <= p - 1 - i_l`.
pub fn q_element(ctx: &Arc<BfContext>, idx: &QIndex) -> Result<BfElement> {
    let p = ctx.prime();
    if idx.digits.prime() != p {
        return Err(Error::domain("digit tuple over a different prime"));
    }
    let field = ctx.field();
    let digits = idx.digits.digits();
    let e = digits.len() as u32;
    let q = p.checked_pow(e).ok_or(Error::ExponentOverflow)?;
    let base = idx.m.checked_mul(q).ok_or(Error::ExponentOverflow)?;
    let neg = sign(digits);

    let jmax: u64 = digits
        .iter()
        .enumerate()
        .map(|(l, i)| (p - 1 - i) * p.pow(l as u32))
        .sum();
    let mut fpow = vec![MvPoly::one(ctx.ring())];
    for _ in 0..jmax {
        let next = fpow.last().unwrap().checked_mul(ctx.f())?;
        fpow.push(next);
    }

    let mut out = BfElement::zero(ctx);
    let mut j = vec![0u64; digits.len()];
    loop {
        let mut coef = 1u64;
        let (mut jsum, mut shift, mut place) = (0u64, 0u64, 1u64);
        for (l, &i) in digits.iter().enumerate() {
            coef = field.mul(coef, field.binom(i + j[l], i));
            jsum += j[l] * place;
            shift += (i + j[l]) * place;
            place *= p;
        }
        if neg {
            coef = field.neg(coef);
        }
        out.add_term(base + shift, &fpow[jsum as usize].scalar_mul(coef));
        // next j in the box
        let mut l = 0;
        loop {
            if l == j.len() {
                return Ok(out);
            }
            j[l] += 1;
            if j[l] + digits[l] < p {
                break;
            }
            j[l] = 0;
            l += 1;
        }
    }
}

/// Coordinates of `w` in the Q-basis at level `e`, by back-substitution:
/// `Q^m_i = ±δ_n + (higher δ in the same block of length p^e)`.
pub fn q_coordinates(w: &BfElement, e: u32) -> Result<BTreeMap<QIndex, MvPoly>> {
    let ctx = w.context().clone();
    let p = ctx.prime();
    let q = p.checked_pow(e).ok_or(Error::ExponentOverflow)?;
    let mut rest = w.clone();
    let mut out = BTreeMap::new();
    while let Some((&n, a)) = rest.coeffs().iter().next() {
        let idx = QIndex::new(p_digits(n % q, p, e as usize)?, n / q);
        let coord = if sign(idx.digits.digits()) { a.neg() } else { a.clone() };
        let qe = q_element(&ctx, &idx)?;
        rest = rest.sub(&qe.mul_poly(&coord));
        if rest.coeffs().contains_key(&n) {
            return Err(Error::Invariant(format!("{idx} does not lead with δ_{n}")));
        }
        out.insert(idx, coord);
    }
    Ok(out)
}

pub fn reconstruct(ctx: &Arc<BfContext>, coords: &BTreeMap<QIndex, MvPoly>) -> Result<BfElement> {
    let mut out = BfElement::zero(ctx);
    for (idx, a) in coords {
        out = out.add(&q_element(ctx, idx)?.mul_poly(a));
    }
    Ok(out)
}

/// `P_i(θ) w = -Π_(j≠i) (θ + j) w`; the sign is `1/(p-1)!`.
fn project(w: &BfElement, k: u32, i: u64) -> Result<BfElement> {
    let p = w.context().prime();
    let mut acc = w.clone();
    for j in (0..p).filter(|&j| j != i) {
        if acc.is_zero() {
            break;
        }
        acc = act_theta(&acc, k)?.add(&acc.scale(j));
    }
    Ok(acc.scale(p - 1))
}

/// Simultaneous eigencomponents of `w` at level `e`, keyed by the tuple
/// `(i_1..i_e)` on which `θ_(p^(l-1))` acts by `-i_l`; zero parts omitted.
pub fn eigen_decompose(w: &BfElement, e: u32) -> Result<BTreeMap<DigitTuple, BfElement>> {
    eigen_decompose_with(w, e, Exec::default())
}

pub fn eigen_decompose_with(
    w: &BfElement,
    e: u32,
    exec: Exec,
) -> Result<BTreeMap<DigitTuple, BfElement>> {
    let p = w.context().prime();
    let mut parts: Vec<(Vec<u64>, BfElement)> = vec![(Vec::new(), w.clone())];
    for k in 0..e {
        let jobs: Vec<(Vec<u64>, BfElement, u64)> = parts
            .into_iter()
            .flat_map(|(key, c)| (0..p).map(move |i| (key.clone(), c.clone(), i)))
            .collect();
        let done = exec.map(jobs, |(mut key, c, i)| -> Result<(Vec<u64>, BfElement)> {
            let proj = project(&c, k, i)?;
            key.push(i);
            Ok((key, proj))
        });
        parts = Vec::new();
        for r in done {
            let (key, c) = r?;
            if !c.is_zero() {
                parts.push((key, c));
            }
        }
    }
    parts
        .into_iter()
        .map(|(key, c)| Ok((DigitTuple::new(key, p)?, c)))
        .collect()
}

/// The expansion `δ = Σ_i (-1)^Σi C(p^e - 1, n_i) f^(n_i) Q^0_i` with
/// `n_i = Σ i_l p^(l-1)`, as tuple-keyed components.
pub fn delta_decomposition(ctx: &Arc<BfContext>, e: u32) -> Result<BTreeMap<DigitTuple, BfElement>> {
    let p = ctx.prime();
    let field = ctx.field();
    let q = p.checked_pow(e).ok_or(Error::ExponentOverflow)?;
    let mut out = BTreeMap::new();
    for n in 0..q {
        let digits = p_digits(n, p, e as usize)?;
        let mut c = field.binom(q - 1, n);
        if sign(digits.digits()) {
            c = field.neg(c);
        }
        let coef = ctx.f().pow(n)?.scalar_mul(c);
        let comp = q_element(ctx, &QIndex::new(digits.clone(), 0))?.mul_poly(&coef);
        if !comp.is_zero() {
            out.insert(digits, comp);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::{act_t, from_fraction};
    use super::*;
    use crate::poly::tests::{poly, ring};

    fn ctx(p: u64, src: &str) -> Arc<BfContext> {
        BfContext::new(&poly(&ring(p, &["x", "y"]), src)).unwrap()
    }

    fn qi(p: u64, d: &[u64], m: u64) -> QIndex {
        QIndex::new(DigitTuple::new(d.to_vec(), p).unwrap(), m)
    }

    #[test]
    fn q_examples() {
        let c = ctx(5, "x^2 + y^3");
        let top = q_element(&c, &qi(5, &[4], 0)).unwrap();
        assert_eq!(top, BfElement::delta(&c, 4));
        let bottom = q_element(&c, &qi(5, &[0], 0)).unwrap();
        let expect = BfElement::from_coeffs(&c, (0..5).map(|j| (j, c.f().pow(j).unwrap())));
        assert_eq!(bottom, expect);
        // p = 2, e = 2, i = (0,0): j ranges over {0,1}^2
        let c2 = ctx(2, "x^2 + y^3");
        let f = c2.f().clone();
        let expect = BfElement::from_coeffs(
            &c2,
            [
                (0, MvPoly::one(c2.ring())),
                (1, f.clone()),
                (2, f.pow(2).unwrap()),
                (3, f.pow(3).unwrap()),
            ],
        );
        assert_eq!(q_element(&c2, &qi(2, &[0, 0], 0)).unwrap(), expect);
    }

    /// `Q^m_i` is the class of `t^n / (f-t)^((m+1) p^e)` with
    /// `n = Σ (p - 1 - i_l) p^(l-1)`.
    #[test]
    fn q_matches_fraction() {
        for (p, e) in [(2u64, 1u32), (2, 2), (3, 1), (3, 2), (5, 1)] {
            let c = ctx(p, "x^2 + y^3 + x*y");
            let q = p.pow(e);
            let rt = c.ring_t().clone();
            let t = MvPoly::var(&rt, rt.nvars() - 1);
            for idx in 0..q {
                let d = p_digits(idx, p, e as usize).unwrap();
                let n: u64 = d
                    .digits()
                    .iter()
                    .enumerate()
                    .map(|(l, i)| (p - 1 - i) * p.pow(l as u32))
                    .sum();
                for m in 0..3 {
                    let expect = from_fraction(&c, &t.pow(n).unwrap(), (m + 1) * q).unwrap();
                    let got = q_element(&c, &QIndex::new(d.clone(), m)).unwrap();
                    assert_eq!(got, expect, "p={p} e={e} {d} m={m}");
                    // and t^n applied to δ_((m+1)q - 1)
                    let mut w = BfElement::delta(&c, (m + 1) * q - 1);
                    for _ in 0..n {
                        w = act_t(&w).unwrap();
                    }
                    assert_eq!(w, got);
                }
            }
        }
    }

    #[test]
    fn coordinates_round_trip() {
        let c = ctx(3, "x^2 + y^3");
        for e in 1..=2 {
            let idx = qi(3, &[1, 2][..e as usize], 1);
            let w = q_element(&c, &idx).unwrap();
            let coords = q_coordinates(&w, e).unwrap();
            assert_eq!(coords.len(), 1);
            assert!(coords[&idx].is_unit() && coords[&idx].lc() == Some(1));
        }
        let w = BfElement::delta(&c, 3);
        let coords = q_coordinates(&w, 1).unwrap();
        assert!(coords.keys().all(|k| k.m == 1));
        assert_eq!(reconstruct(&c, &coords).unwrap(), w);
    }

    #[test]
    fn delta_zero_decomposition() {
        let c = ctx(5, "x^2 + y^3");
        let coords = q_coordinates(&BfElement::delta(&c, 0), 1).unwrap();
        let field = c.field();
        for i in 0..5u64 {
            let mut k = field.binom(4, i);
            if i % 2 == 1 {
                k = field.neg(k);
            }
            assert_eq!(coords[&qi(5, &[i], 0)], c.f().pow(i).unwrap().scalar_mul(k));
        }
    }

    #[test]
    fn decomposition_of_delta_one() {
        // f = x, p = 3: δ_1 = -Q_(1) + x Q_(2), so only two components survive
        let c = BfContext::new(&poly(&ring(3, &["x"]), "x")).unwrap();
        let w = BfElement::delta(&c, 1);
        let parts = eigen_decompose(&w, 1).unwrap();
        let coords = q_coordinates(&w, 1).unwrap();
        assert_eq!(parts.keys().map(|d| d.digits()[0]).collect::<Vec<_>>(), vec![1, 2]);
        for (d, part) in &parts {
            let mut via_q = BfElement::zero(&c);
            for (idx, a) in &coords {
                if &idx.digits == d {
                    via_q = via_q.add(&q_element(&c, idx).unwrap().mul_poly(a));
                }
            }
            assert_eq!(part, &via_q, "{d}");
        }
    }
}
