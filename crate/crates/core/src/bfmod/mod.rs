//! The D-module `B_f = R[t]_(f-t) / R[t]` in the R-basis `δ_m`, the class
//! of `1/(f-t)^(m+1)`.
//!
//! Operators act by
//!
//! ```text
//! t^q · δ_m      = f^q δ_m - δ_(m-q)
//! ∂_t^[q] · δ_m  = C(m+q, q) δ_(m+q)
//! ```
//!
//! and `θ_m = ∂_t^[m] t^m`. Elements can also be moved to the fraction
//! model `g / (f-t)^N`, which gives an independent route for every action.

mod qbasis;
pub mod rt;
mod verify;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::arith::PrimeField;
use crate::error::{Error, Result};
use crate::poly::{Monomial, MvPoly, Ring};

pub use qbasis::{
    delta_decomposition, eigen_decompose, eigen_decompose_with, q_coordinates, q_element,
    reconstruct, QIndex,
};
pub use verify::{
    mfe_component_ideals, verify_basis_actions, verify_binomial_series, verify_frobenius_structure,
    verify_level_transformation, verify_structure, ComponentIdeal,
};

/// Fixed data of `B_f`: the polynomial and the ring `R[t]`.
#[derive(Debug)]
pub struct BfContext {
    f: MvPoly,
    ring_t: Ring,
}

impl BfContext {
    pub fn new(f: &MvPoly) -> Result<Arc<Self>> {
        if f.is_zero() {
            return Err(Error::domain("B_f needs a nonzero f"));
        }
        Ok(Arc::new(Self {
            f: f.clone(),
            ring_t: f.ring().extended("t"),
        }))
    }

    pub fn f(&self) -> &MvPoly {
        &self.f
    }

    pub fn ring(&self) -> &Ring {
        self.f.ring()
    }

    /// `R[t]`, with `t` the last variable.
    pub fn ring_t(&self) -> &Ring {
        &self.ring_t
    }

    pub fn prime(&self) -> u64 {
        self.f.ring().prime()
    }

    pub fn field(&self) -> PrimeField {
        self.f.ring().field()
    }

    fn q(&self, k: u32) -> Result<u64> {
        self.prime().checked_pow(k).ok_or(Error::ExponentOverflow)
    }
}

/// `Σ_m coeffs[m] δ_m` with no zero coefficients.
#[derive(Clone, Debug)]
pub struct BfElement {
    ctx: Arc<BfContext>,
    coeffs: BTreeMap<u64, MvPoly>,
}

impl PartialEq for BfElement {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for BfElement {}

impl BfElement {
    pub fn zero(ctx: &Arc<BfContext>) -> Self {
        Self {
            ctx: ctx.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn delta(ctx: &Arc<BfContext>, m: u64) -> Self {
        Self::term(ctx, m, MvPoly::one(ctx.ring()))
    }

    pub fn term(ctx: &Arc<BfContext>, m: u64, a: MvPoly) -> Self {
        let mut out = Self::zero(ctx);
        out.add_term(m, &a);
        out
    }

    pub fn from_coeffs(ctx: &Arc<BfContext>, coeffs: impl IntoIterator<Item = (u64, MvPoly)>) -> Self {
        let mut out = Self::zero(ctx);
        for (m, a) in coeffs {
            out.add_term(m, &a);
        }
        out
    }

    pub fn context(&self) -> &Arc<BfContext> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &BTreeMap<u64, MvPoly> {
        &self.coeffs
    }

    pub fn coeff(&self, m: u64) -> MvPoly {
        self.coeffs
            .get(&m)
            .cloned()
            .unwrap_or_else(|| MvPoly::zero(self.ctx.ring()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_index(&self) -> Option<u64> {
        self.coeffs.keys().next_back().copied()
    }

    pub(crate) fn add_term(&mut self, m: u64, a: &MvPoly) {
        if a.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&m) {
            Some(c) => {
                *c = &*c + a;
                if c.is_zero() {
                    self.coeffs.remove(&m);
                }
            }
            None => {
                self.coeffs.insert(m, a.clone());
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, a) in &other.coeffs {
            out.add_term(*m, a);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, a) in &other.coeffs {
            out.add_term(*m, &a.neg());
        }
        out
    }

    pub fn scale(&self, c: u64) -> Self {
        let c = self.ctx.field().from_u64(c);
        Self::from_coeffs(&self.ctx, self.coeffs.iter().map(|(m, a)| (*m, a.scalar_mul(c))))
    }

    pub fn mul_poly(&self, a: &MvPoly) -> Self {
        Self::from_coeffs(&self.ctx, self.coeffs.iter().map(|(m, b)| (*m, a * b)))
    }
}

impl fmt::Display for BfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(m, a)| {
                if a.is_unit() && a.lc() == Some(1) {
                    format!("δ_{m}")
                } else {
                    format!("({a})·δ_{m}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `t^(p^k) · w`.
pub fn act_t_power(w: &BfElement, k: u32) -> Result<BfElement> {
    let q = w.ctx.q(k)?;
    let fq = w.ctx.f.frobenius_pow(k)?;
    let mut out = BfElement::zero(&w.ctx);
    for (m, a) in &w.coeffs {
        out.add_term(*m, &a.checked_mul(&fq)?);
        if *m >= q {
            out.add_term(m - q, &a.neg());
        }
    }
    Ok(out)
}

/// `t · w`.
pub fn act_t(w: &BfElement) -> Result<BfElement> {
    act_t_power(w, 0)
}

/// `∂_t^[q] · w` for any `q`.
pub fn act_dt_general(w: &BfElement, q: u64) -> Result<BfElement> {
    let field = w.ctx.field();
    let mut out = BfElement::zero(&w.ctx);
    for (m, a) in &w.coeffs {
        let top = m.checked_add(q).ok_or(Error::ExponentOverflow)?;
        let c = field.binom(top, q);
        if c != 0 {
            out.add_term(top, &a.scalar_mul(c));
        }
    }
    Ok(out)
}

/// `∂_t^[p^k] · w`.
pub fn act_dt(w: &BfElement, k: u32) -> Result<BfElement> {
    act_dt_general(w, w.ctx.q(k)?)
}

/// `θ_(p^k) · w`.
pub fn act_theta(w: &BfElement, k: u32) -> Result<BfElement> {
    act_dt(&act_t_power(w, k)?, k)
}

/// `θ_m · w` through the factorization of `θ_m` over the digits of `m`.
pub fn act_theta_general(w: &BfElement, m: u64) -> Result<BfElement> {
    let p = w.ctx.prime();
    let field = w.ctx.field();
    let mut out = w.clone();
    let (mut rest, mut k) = (m, 0u32);
    while rest > 0 {
        let a = rest % p;
        for j in 0..a {
            out = act_theta(&out, k)?.add(&out.scale(j));
        }
        if a > 1 {
            out = out.scale(field.inv(field.factorial(a)));
        }
        rest /= p;
        k += 1;
    }
    Ok(out)
}

/// `θ_m · w` computed literally as `∂_t^[m]` after `m` multiplications by `t`.
pub fn act_theta_direct(w: &BfElement, m: u64) -> Result<BfElement> {
    let mut out = w.clone();
    for _ in 0..m {
        out = act_t(&out)?;
    }
    act_dt_general(&out, m)
}

/// The Frobenius `a δ_m ↦ a^p δ_(p(m+1)-1)`, i.e. `u ↦ u^p` on fractions.
pub fn frobenius(w: &BfElement) -> Result<BfElement> {
    let p = w.ctx.prime();
    let mut out = BfElement::zero(&w.ctx);
    for (m, a) in &w.coeffs {
        let idx = m
            .checked_add(1)
            .and_then(|n| n.checked_mul(p))
            .ok_or(Error::ExponentOverflow)?
            - 1;
        out.add_term(idx, &a.frobenius_pow(1)?);
    }
    Ok(out)
}

/// Numerator `g ∈ R[t]` with `w = g / (f-t)^n`; needs every index `< n`.
pub fn to_fraction(w: &BfElement, n: u64) -> Result<MvPoly> {
    let ctx = &w.ctx;
    if w.max_index().is_some_and(|m| m >= n) {
        return Err(Error::Range(format!("δ index exceeds denominator power {n}")));
    }
    let rt = ctx.ring_t();
    let s = &ctx.f.embed(rt)? - &MvPoly::var(rt, rt.nvars() - 1);
    let mut g = MvPoly::zero(rt);
    for (m, a) in &w.coeffs {
        g = &g + &(&a.embed(rt)? * &s.pow(n - m - 1)?);
    }
    Ok(g)
}

/// Class of `g / (f-t)^n` for `g ∈ R[t]`.
pub fn from_fraction(ctx: &Arc<BfContext>, g: &MvPoly, n: u64) -> Result<BfElement> {
    let rt = ctx.ring_t();
    let tv = rt.nvars() - 1;
    // substitute t = f - s and read off powers of s
    let mut by_deg: BTreeMap<u64, Vec<(Monomial, u64)>> = BTreeMap::new();
    for (m, c) in g.terms() {
        let mut exps = m.exps().to_vec();
        let d = exps[tv];
        exps[tv] = 0;
        by_deg.entry(d).or_default().push((Monomial::from_exps(&exps), *c));
    }
    let f_minus_s = &ctx.f.embed(rt)? - &MvPoly::var(rt, tv);
    let top = by_deg.keys().next_back().copied().unwrap_or(0);
    let mut acc = MvPoly::zero(rt);
    for d in (0..=top).rev() {
        acc = acc.checked_mul(&f_minus_s)?;
        if let Some(ts) = by_deg.remove(&d) {
            acc = &acc + &MvPoly::from_terms(rt, ts);
        }
    }
    let mut out = BfElement::zero(ctx);
    let mut parts: BTreeMap<u64, Vec<(Monomial, u64)>> = BTreeMap::new();
    for (m, c) in acc.terms() {
        let k = m.exps()[tv];
        if k < n {
            let mut exps = m.exps().to_vec();
            exps.truncate(tv);
            parts.entry(n - k - 1).or_default().push((Monomial::from_exps(&exps), *c));
        }
    }
    for (idx, ts) in parts {
        out.add_term(idx, &MvPoly::from_terms(ctx.ring(), ts));
    }
    Ok(out)
}

/// Applies `op` to `w` block by block: the indices `[b q, (b+1) q)` share
/// the denominator `(f-t)^((b+1) q)`, a `q`-th power, so any operator that is
/// linear over `q`-th powers acts on the numerator alone. The numerators
/// only involve `(f-t)^k` with `k < q`.
fn by_blocks(
    w: &BfElement,
    e: u32,
    op: impl Fn(&MvPoly) -> Result<MvPoly>,
) -> Result<BfElement> {
    let ctx = &w.ctx;
    let q = ctx.q(e)?;
    let rt = ctx.ring_t();
    let s = &ctx.f.embed(rt)? - &MvPoly::var(rt, rt.nvars() - 1);
    let mut spow = vec![MvPoly::one(rt)];
    let mut blocks: BTreeMap<u64, MvPoly> = BTreeMap::new();
    for (n, a) in &w.coeffs {
        let b = n / q;
        let k = ((b + 1) * q - n - 1) as usize;
        while spow.len() <= k {
            let next = spow.last().unwrap().checked_mul(&s)?;
            spow.push(next);
        }
        let g = blocks.entry(b).or_insert_with(|| MvPoly::zero(rt));
        *g = &*g + &(&a.embed(rt)? * &spow[k]);
    }
    let mut out = BfElement::zero(ctx);
    for (b, g) in blocks {
        let n = (b + 1).checked_mul(q).ok_or(Error::ExponentOverflow)?;
        out = out.add(&from_fraction(ctx, &op(&g)?, n)?);
    }
    Ok(out)
}

/// An operator of `D_R^e` acting on `R` and, through fractions with a
/// `p^e`-th power denominator, on `B_f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DrOp {
    Mul(MvPoly),
    /// `∂_(x_var)^[j]` with `j < p^e`.
    Hasse { var: usize, j: u64 },
}

impl DrOp {
    pub fn apply_poly(&self, a: &MvPoly) -> Result<MvPoly> {
        match self {
            DrOp::Mul(g) => a.checked_mul(g),
            DrOp::Hasse { var, j } => Ok(a.hasse_derivative(*var, *j)),
        }
    }

    /// `P · w` computed on `g / (f-t)^N` with `p^e | N`.
    pub fn apply(&self, w: &BfElement, e: u32) -> Result<BfElement> {
        if let DrOp::Hasse { j, .. } = self {
            if *j >= w.ctx.q(e)? {
                return Err(Error::Range(format!("∂^[{j}] is not in D^{e}")));
            }
        }
        let rt = w.ctx.ring_t().clone();
        by_blocks(w, e, |g| match self {
            DrOp::Mul(a) => g.checked_mul(&a.embed(&rt)?),
            DrOp::Hasse { var, j } => Ok(g.hasse_derivative(*var, *j)),
        })
    }
}

/// `∂_t^[j] · w` through fractions, valid for `j < p^e`.
pub fn act_dt_by_fraction(w: &BfElement, j: u64, e: u32) -> Result<BfElement> {
    if j >= w.ctx.q(e)? {
        return Err(Error::Range(format!("∂_t^[{j}] is not in D^{e}")));
    }
    let tv = w.ctx.ring_t().nvars() - 1;
    by_blocks(w, e, |g| Ok(g.hasse_derivative(tv, j)))
}

/// `t · w` through fractions.
pub fn act_t_by_fraction(w: &BfElement) -> Result<BfElement> {
    let rt = w.ctx.ring_t();
    let t = MvPoly::var(rt, rt.nvars() - 1);
    by_blocks(w, 0, |g| g.checked_mul(&t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::tests::{poly, ring};

    fn cusp_ctx(p: u64) -> Arc<BfContext> {
        BfContext::new(&poly(&ring(p, &["x", "y"]), "x^2 + y^3")).unwrap()
    }

    fn d(ctx: &Arc<BfContext>, m: u64) -> BfElement {
        BfElement::delta(ctx, m)
    }

    #[test]
    fn t_examples() {
        let ctx = cusp_ctx(5);
        let f = ctx.f().clone();
        assert_eq!(act_t(&d(&ctx, 0)).unwrap(), BfElement::term(&ctx, 0, f.clone()));
        let fp = f.frobenius_pow(1).unwrap();
        let expect = BfElement::term(&ctx, 5, fp).sub(&d(&ctx, 0));
        assert_eq!(act_t_power(&d(&ctx, 5), 1).unwrap(), expect);
        let w = BfElement::term(&ctx, 1, f.clone());
        let expect = BfElement::term(&ctx, 1, &f * &f).sub(&BfElement::term(&ctx, 0, f.clone()));
        assert_eq!(act_t(&w).unwrap(), expect);
    }

    #[test]
    fn dt_examples() {
        let ctx = cusp_ctx(5);
        assert_eq!(act_dt(&d(&ctx, 0), 0).unwrap(), d(&ctx, 1));
        assert!(act_dt(&d(&ctx, 4), 0).unwrap().is_zero());
        // C(8, 5) = 56 ≡ 1 mod 5 by direct computation; Lucas: C(3,0) C(1,1) = 1
        assert_eq!(act_dt(&d(&ctx, 3), 1).unwrap(), d(&ctx, 8));
        let ctx7 = cusp_ctx(7);
        // C(3+7, 7) = 120 ≡ 1 mod 7
        assert_eq!(act_dt(&d(&ctx7, 3), 1).unwrap(), d(&ctx7, 10));
    }

    #[test]
    fn theta_examples() {
        let ctx = cusp_ctx(5);
        let expect = BfElement::term(&ctx, 1, ctx.f().clone());
        assert_eq!(act_theta(&d(&ctx, 0), 0).unwrap(), expect);
        let w = BfElement::term(&ctx, 2, poly(ctx.ring(), "x+y")).add(&d(&ctx, 7));
        assert_eq!(act_theta_general(&w, 1).unwrap(), act_theta(&w, 0).unwrap());
        assert_eq!(act_theta_general(&w, 5).unwrap(), act_theta(&w, 1).unwrap());
        for m in [2u64, 3, 6, 7, 12] {
            assert_eq!(
                act_theta_general(&w, m).unwrap(),
                act_theta_direct(&w, m).unwrap(),
                "m = {m}"
            );
        }
        // θ_6 = θ_1 θ_5 at p = 5
        let two_step = act_theta(&act_theta(&d(&ctx, 0), 0).unwrap(), 1).unwrap();
        assert_eq!(act_theta_direct(&d(&ctx, 0), 6).unwrap(), two_step);
    }

    #[test]
    fn theta_is_annihilated() {
        for p in [2u64, 3, 5] {
            let ctx = cusp_ctx(p);
            let w = BfElement::term(&ctx, 3, poly(ctx.ring(), "x*y + 1")).add(&d(&ctx, p + 1));
            for k in 0..2 {
                let mut acc = w.clone();
                for j in 0..p {
                    acc = act_theta(&acc, k).unwrap().add(&acc.scale(j));
                }
                assert!(acc.is_zero(), "p={p} k={k}");
            }
        }
    }

    #[test]
    fn fraction_round_trip_and_actions() {
        let ctx = cusp_ctx(3);
        let w = BfElement::term(&ctx, 4, poly(ctx.ring(), "x + y^2"))
            .add(&d(&ctx, 0))
            .add(&BfElement::term(&ctx, 7, poly(ctx.ring(), "2*x*y")));
        for n in [8u64, 9, 12] {
            let g = to_fraction(&w, n).unwrap();
            assert_eq!(from_fraction(&ctx, &g, n).unwrap(), w);
        }
        assert_eq!(act_t_by_fraction(&w).unwrap(), act_t(&w).unwrap());
        for e in 1..=2u32 {
            for k in 0..e {
                let j = 3u64.pow(k);
                assert_eq!(act_dt_by_fraction(&w, j, e).unwrap(), act_dt(&w, k).unwrap());
            }
            assert_eq!(
                act_dt_by_fraction(&w, 3u64.pow(e) - 1, e).unwrap(),
                act_dt_general(&w, 3u64.pow(e) - 1).unwrap()
            );
        }
        assert!(to_fraction(&w, 5).is_err());
    }

    #[test]
    fn frobenius_of_delta() {
        let ctx = cusp_ctx(3);
        let w = BfElement::term(&ctx, 1, poly(ctx.ring(), "x + 1"));
        let fw = frobenius(&w).unwrap();
        assert_eq!(fw, BfElement::term(&ctx, 5, poly(ctx.ring(), "x^3 + 1")));
        // u^p on fractions: (x+1)^3 / (f-t)^6
        let g = poly(ctx.ring(), "x + 1").frobenius_pow(1).unwrap().embed(ctx.ring_t()).unwrap();
        assert_eq!(from_fraction(&ctx, &g, 6).unwrap(), fw);
    }

    #[test]
    fn hasse_ops_are_r_linear_on_delta() {
        // ∂_x^[j] (a δ_m) = (∂_x^[j] a) δ_m when p^e | m + 1
        let ctx = cusp_ctx(3);
        let a = poly(ctx.ring(), "x^4*y + x^2");
        let w = BfElement::term(&ctx, 8, a.clone());
        let op = DrOp::Hasse { var: 0, j: 2 };
        let got = op.apply(&w, 2).unwrap();
        assert_eq!(got, BfElement::term(&ctx, 8, op.apply_poly(&a).unwrap()));
        assert!(op.apply(&w, 0).is_err());
    }
}
