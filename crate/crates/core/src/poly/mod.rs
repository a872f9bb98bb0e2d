//! Sparse multivariate polynomials over F_p.

mod monomial;
mod parse;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{FpScalar, PrimeField};
use crate::error::{Error, Result};

pub use monomial::{Monomial, MonomialOrder};

pub type Ring = Arc<PolyRing>;

/// `F_p[x_1, ..., x_n]` with named variables and a fixed term order.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct PolyRing {
    field: PrimeField,
    names: Vec<String>,
    order: MonomialOrder,
}

fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl PolyRing {
    pub fn new<S: AsRef<str>>(p: u64, names: &[S]) -> Result<Ring> {
        Self::with_order(p, names, MonomialOrder::default())
    }

    pub fn with_order<S: AsRef<str>>(p: u64, names: &[S], order: MonomialOrder) -> Result<Ring> {
        let field = PrimeField::new(p)?;
        let names: Vec<String> = names.iter().map(|s| s.as_ref().trim().to_string()).collect();
        if names.is_empty() {
            return Err(Error::domain("a ring needs at least one variable"));
        }
        for (i, n) in names.iter().enumerate() {
            if !valid_identifier(n) {
                return Err(Error::domain(format!("`{n}` is not a valid variable name")));
            }
            if names[..i].contains(n) {
                return Err(Error::domain(format!("variable `{n}` declared twice")));
            }
        }
        Ok(Arc::new(Self { field, names, order }))
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn prime(&self) -> u64 {
        self.field.p()
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Same variables and prime under a different term order.
    pub fn reordered(&self, order: MonomialOrder) -> Ring {
        Arc::new(Self {
            field: self.field,
            names: self.names.clone(),
            order,
        })
    }

    /// Appends one variable whose name avoids the existing ones.
    pub fn extended(&self, hint: &str) -> Ring {
        let mut name = hint.to_string();
        while self.names.contains(&name) {
            name.push('_');
        }
        let mut names = self.names.clone();
        names.push(name);
        Arc::new(Self {
            field: self.field,
            names,
            order: self.order,
        })
    }
}

pub fn same_ring(a: &Ring, b: &Ring) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub type Term = (Monomial, u64);

/// A polynomial: nonzero terms sorted in decreasing ring order.
#[derive(Clone, Debug)]
pub struct MvPoly {
    ring: Ring,
    terms: Vec<Term>,
}

impl PartialEq for MvPoly {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for MvPoly {}

impl std::hash::Hash for MvPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl MvPoly {
    pub fn zero(ring: &Ring) -> Self {
        Self {
            ring: ring.clone(),
            terms: Vec::new(),
        }
    }

    pub fn constant(ring: &Ring, c: u64) -> Self {
        let c = ring.field.from_u64(c);
        let terms = if c == 0 {
            Vec::new()
        } else {
            vec![(Monomial::one(ring.nvars()), c)]
        };
        Self {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, 1)
    }

    pub fn var(ring: &Ring, i: usize) -> Self {
        let mut e = vec![0; ring.nvars()];
        e[i] = 1;
        Self::monomial(ring, Monomial::from_exps(&e), 1)
    }

    pub fn monomial(ring: &Ring, m: Monomial, c: u64) -> Self {
        assert_eq!(m.nvars(), ring.nvars(), "monomial arity");
        let c = ring.field.from_u64(c);
        let terms = if c == 0 { Vec::new() } else { vec![(m, c)] };
        Self {
            ring: ring.clone(),
            terms,
        }
    }

    /// Builds a polynomial from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms(ring: &Ring, terms: impl IntoIterator<Item = Term>) -> Self {
        let mut acc: HashMap<Monomial, u64> = HashMap::new();
        let f = ring.field;
        for (m, c) in terms {
            assert_eq!(m.nvars(), ring.nvars(), "monomial arity");
            let e = acc.entry(m).or_insert(0);
            *e = f.add(*e, f.from_u64(c));
        }
        Self::from_map(ring, acc)
    }

    fn from_map(ring: &Ring, acc: HashMap<Monomial, u64>) -> Self {
        let mut terms: Vec<Term> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        let order = ring.order;
        terms.sort_unstable_by(|a, b| order.cmp(&b.0, &a.0));
        Self {
            ring: ring.clone(),
            terms,
        }
    }

    /// Trusts that `terms` are sorted, nonzero and distinct.
    pub(crate) fn from_sorted(ring: &Ring, terms: Vec<Term>) -> Self {
        debug_assert!(terms.iter().all(|t| t.1 != 0));
        debug_assert!(terms.windows(2).all(|w| ring.order.cmp(&w[0].0, &w[1].0).is_gt()));
        Self {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn parse(src: &str, ring: &Ring) -> Result<Self> {
        parse::parse(src, ring)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Term> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    /// Nonzero constants are the units of the polynomial ring.
    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.is_constant()
    }

    pub fn leading_term(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn lm(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn lc(&self) -> Option<u64> {
        self.terms.first().map(|t| t.1)
    }

    pub fn total_degree(&self) -> Option<u128> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn coeff(&self, m: &Monomial) -> u64 {
        self.terms.iter().find(|(t, _)| t == m).map_or(0, |t| t.1)
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    fn merge(&self, other: &Self, negate_other: bool) -> Self {
        let f = self.ring.field;
        let order = self.ring.order;
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let fix = |c: u64| if negate_other { f.neg(c) } else { c };
        while i < a.len() && j < b.len() {
            match order.cmp(&a[i].0, &b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push((b[j].0.clone(), fix(b[j].1)));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = f.add(a[i].1, fix(b[j].1));
                    if c != 0 {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), fix(*c))));
        Self::from_sorted(&self.ring, out)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        Ok(self.merge(other, false))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        Ok(self.merge(other, true))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.ring));
        }
        if other.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_term(m, *c);
        }
        if self.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_term(m, *c);
        }
        let f = self.ring.field;
        let mut acc: HashMap<Monomial, u64> = HashMap::with_capacity(self.len() * other.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.checked_mul(mb).ok_or(Error::ExponentOverflow)?;
                let e = acc.entry(m).or_insert(0);
                *e = f.add(*e, f.mul(*ca, *cb));
            }
        }
        Ok(Self::from_map(&self.ring, acc))
    }

    /// `self * c * x^m`.
    pub fn mul_term(&self, m: &Monomial, c: u64) -> Result<Self> {
        let f = self.ring.field;
        let c = f.from_u64(c);
        if c == 0 {
            return Ok(Self::zero(&self.ring));
        }
        let terms = self
            .terms
            .iter()
            .map(|(t, a)| Ok((t.checked_mul(m).ok_or(Error::ExponentOverflow)?, f.mul(*a, c))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_sorted(&self.ring, terms))
    }

    pub fn scalar_mul(&self, c: u64) -> Self {
        let f = self.ring.field;
        let c = f.from_u64(c);
        if c == 0 {
            return Self::zero(&self.ring);
        }
        let terms = self.terms.iter().map(|(m, a)| (m.clone(), f.mul(*a, c))).collect();
        Self::from_sorted(&self.ring, terms)
    }

    pub fn neg(&self) -> Self {
        self.scalar_mul(self.ring.prime() - 1)
    }

    pub fn monic(&self) -> Self {
        match self.lc() {
            None | Some(1) => self.clone(),
            Some(c) => self.scalar_mul(self.ring.field.inv(c)),
        }
    }

    /// `f^(p^e)`: with coefficients in F_p this only scales exponents.
    pub fn frobenius_pow(&self, e: u32) -> Result<Self> {
        let q = self.ring.prime().checked_pow(e).ok_or(Error::ExponentOverflow)?;
        if q == 1 {
            return Ok(self.clone());
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| Ok((m.checked_scale(q).ok_or(Error::ExponentOverflow)?, *c)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_sorted(&self.ring, terms))
    }

    fn pow_small(&self, mut k: u64) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `f^m` via the p-adic digits of `m`: `∏_i (f^(d_i))^(p^i)`.
    pub fn pow(&self, m: u64) -> Result<Self> {
        self.pow_big(&BigUint::from(m))
    }

    pub fn pow_big(&self, m: &BigUint) -> Result<Self> {
        if m.is_zero() {
            return Ok(Self::one(&self.ring));
        }
        if self.is_zero() {
            return Ok(Self::zero(&self.ring));
        }
        let p = self.ring.prime();
        let mut acc = Self::one(&self.ring);
        let mut rest = m.clone();
        let mut level = 0u32;
        while !rest.is_zero() {
            let d = (&rest % p).to_u64().expect("digit");
            rest /= p;
            if d > 0 {
                let part = self.pow_small(d)?;
                // a constant raised to p^level is itself
                let part = if part.is_constant() {
                    part
                } else {
                    part.frobenius_pow(level)?
                };
                acc = acc.checked_mul(&part)?;
            }
            level += 1;
        }
        Ok(acc)
    }

    /// Formal partial derivative.
    pub fn derivative(&self, var: usize) -> Self {
        let f = self.ring.field;
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.exps()[var];
            let c = f.mul(*c, f.from_u64(e));
            (c != 0).then(|| {
                let mut exps = m.exps().to_vec();
                exps[var] -= 1;
                (Monomial::from_exps(&exps), c)
            })
        });
        Self::from_terms(&self.ring, terms)
    }

    /// Divided-power derivative `∂^[j]`: `x^u ↦ C(u, j) x^(u-j)`.
    pub fn hasse_derivative(&self, var: usize, j: u64) -> Self {
        let f = self.ring.field;
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.exps()[var];
            if e < j {
                return None;
            }
            let c = f.mul(*c, f.binom(e, j));
            (c != 0).then(|| {
                let mut exps = m.0.clone();
                exps[var] -= j;
                (Monomial(exps), c)
            })
        });
        Self::from_terms(&self.ring, terms)
    }

    /// Moves the polynomial into `target`, whose variables must extend ours
    /// (same leading names, same prime). The term order may differ.
    pub fn embed(&self, target: &Ring) -> Result<Self> {
        if target.prime() != self.ring.prime()
            || target.nvars() < self.ring.nvars()
            || target.names[..self.ring.nvars()] != self.ring.names[..]
        {
            return Err(Error::RingMismatch);
        }
        let pad = target.nvars() - self.ring.nvars();
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e = m.0.clone();
            e.extend(std::iter::repeat_n(0, pad));
            (Monomial(e), *c)
        });
        Ok(Self::from_terms(target, terms))
    }

    /// Inverse of [`embed`](Self::embed); fails if an extra variable occurs.
    pub fn restrict(&self, target: &Ring) -> Result<Self> {
        let n = target.nvars();
        if target.prime() != self.ring.prime()
            || n > self.ring.nvars()
            || target.names[..] != self.ring.names[..n]
        {
            return Err(Error::RingMismatch);
        }
        let mut terms = Vec::with_capacity(self.len());
        for (m, c) in &self.terms {
            if m.exps()[n..].iter().any(|&e| e > 0) {
                return Err(Error::domain("polynomial involves variables outside the target ring"));
            }
            terms.push((Monomial::from_exps(&m.exps()[..n]), *c));
        }
        Ok(Self::from_terms(target, terms))
    }

    pub fn coefficient_scalar(&self, m: &Monomial) -> FpScalar {
        self.ring.field.scalar(self.coeff(m))
    }
}

impl fmt::Display for MvPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = m
                .exps()
                .iter()
                .zip(&self.ring.names)
                .filter(|(e, _)| **e > 0)
                .map(|(e, n)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
                .collect();
            match (vars.is_empty(), *c) {
                (true, c) => write!(f, "{c}")?,
                (false, 1) => write!(f, "{}", vars.join("*"))?,
                (false, c) => write!(f, "{c}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

macro_rules! forward_op {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&MvPoly> for &MvPoly {
            type Output = MvPoly;
            fn $method(self, rhs: &MvPoly) -> MvPoly {
                self.$checked(rhs).expect(concat!("polynomial ", stringify!($method)))
            }
        }
        impl std::ops::$tr<MvPoly> for MvPoly {
            type Output = MvPoly;
            fn $method(self, rhs: MvPoly) -> MvPoly {
                (&self).$checked(&rhs).expect(concat!("polynomial ", stringify!($method)))
            }
        }
    };
}

forward_op!(Add, add, checked_add);
forward_op!(Sub, sub, checked_sub);
forward_op!(Mul, mul, checked_mul);

impl std::ops::Neg for &MvPoly {
    type Output = MvPoly;
    fn neg(self) -> MvPoly {
        MvPoly::neg(self)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn ring(p: u64, vars: &[&str]) -> Ring {
        PolyRing::new(p, vars).unwrap()
    }

    pub(crate) fn poly(r: &Ring, s: &str) -> MvPoly {
        MvPoly::parse(s, r).unwrap()
    }

    fn naive_pow(f: &MvPoly, m: u64) -> MvPoly {
        (0..m).fold(MvPoly::one(f.ring()), |acc, _| &acc * f)
    }

    #[test]
    fn basic_arithmetic() {
        let r = ring(5, &["x", "y"]);
        let f = poly(&r, "x^2 + y^3 + 3*x*y");
        assert!((&f + &f.neg()).is_zero());
        assert_eq!(&poly(&r, "x+y") * &poly(&r, "x-y"), poly(&r, "x^2 - y^2"));
        let r2 = ring(2, &["x", "y"]);
        let g = poly(&r2, "x^2+y^3");
        assert_eq!(&g * &g, poly(&r2, "x^4 + y^6"));
        assert_eq!(naive_pow(&g, 2), g.pow(2).unwrap());
    }

    #[test]
    fn frobenius_pow_examples() {
        let r = ring(3, &["x", "y"]);
        assert_eq!(poly(&r, "x+y").frobenius_pow(1).unwrap(), poly(&r, "x^3+y^3"));
        let f = poly(&r, "x^2+2*x*y");
        assert_eq!(f.frobenius_pow(0).unwrap(), f);
        let r5 = ring(5, &["x", "y"]);
        let g = poly(&r5, "x^2+y^3");
        assert_eq!(g.frobenius_pow(2).unwrap(), poly(&r5, "x^50+y^75"));
        assert_eq!(g.frobenius_pow(2).unwrap(), naive_pow(&g, 25));
        let big = MvPoly::monomial(&r5, Monomial::from_exps(&[1 << 62, 0]), 1);
        assert_eq!(big.frobenius_pow(1), Err(Error::ExponentOverflow));
    }

    #[test]
    fn pow_examples() {
        let r = ring(5, &["x", "y"]);
        let f = poly(&r, "x^2+y^3");
        assert_eq!(f.pow(0).unwrap(), MvPoly::one(&r));
        assert_eq!(f.pow(3).unwrap(), poly(&r, "x^6 + 3*x^4*y^3 + 3*x^2*y^6 + y^9"));
        assert_eq!(f.pow(3).unwrap(), naive_pow(&f, 3));
        assert_eq!(f.pow(37).unwrap(), naive_pow(&f, 37));
    }

    #[test]
    fn cusp_top_power_has_witness_monomial() {
        // y^q * x^(q-1) * y^((q-3)/2) occurs in f^(q-1)
        for (p, e) in [(5u64, 1u32), (5, 2), (7, 2), (7, 3), (11, 1)] {
            let r = ring(p, &["x", "y"]);
            let f = poly(&r, "x^2+y^3");
            let q = p.pow(e);
            let g = f.pow(q - 1).unwrap();
            let m = Monomial::from_exps(&[q - 1, q + (q - 3) / 2]);
            assert_ne!(g.coeff(&m), 0, "p={p} e={e}");
            assert_eq!(g.coeff(&Monomial::from_exps(&[2 * (q - 1), 0])), 1);
        }
    }

    #[test]
    fn derivative_and_embedding() {
        let r = ring(5, &["x", "y"]);
        let f = poly(&r, "x^2+y^3");
        assert_eq!(f.derivative(0), poly(&r, "2*x"));
        assert_eq!(f.derivative(1), poly(&r, "3*y^2"));
        let rz = r.extended("z");
        let g = f.embed(&rz).unwrap();
        assert_eq!(g.restrict(&r).unwrap(), f);
        let z = MvPoly::var(&rz, 2);
        assert!((&g * &z).restrict(&r).is_err());
        let other = ring(7, &["x", "y"]);
        assert_eq!(f.checked_add(&poly(&other, "x")), Err(Error::RingMismatch));
    }

    fn arb_poly(p: u64, max_terms: usize, max_deg: u64) -> impl Strategy<Value = Vec<(u64, u64, u64)>> {
        prop::collection::vec((0..=max_deg, 0..=max_deg, 0..p), 0..=max_terms)
    }

    fn build(r: &Ring, t: &[(u64, u64, u64)]) -> MvPoly {
        MvPoly::from_terms(r, t.iter().map(|&(a, b, c)| (Monomial::from_exps(&[a, b]), c)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn ring_axioms(pi in 0usize..4, a in arb_poly(7, 5, 4), b in arb_poly(7, 5, 4), c in arb_poly(7, 5, 4)) {
            let p = [2u64, 3, 5, 7][pi];
            let r = ring(p, &["x", "y"]);
            let (a, b, c) = (build(&r, &a), build(&r, &b), build(&r, &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        }

        #[test]
        fn frobenius_pow_is_power(pi in 0usize..4, a in arb_poly(7, 6, 3), e in 0u32..=2) {
            let p = [2u64, 3, 5, 7][pi];
            let r = ring(p, &["x", "y"]);
            let a = build(&r, &a);
            let q = p.pow(e);
            prop_assert_eq!(a.frobenius_pow(e).unwrap(), a.pow_small(q).unwrap());
        }

        #[test]
        fn parse_render_round_trip(pi in 0usize..4, a in arb_poly(7, 6, 5)) {
            let p = [2u64, 3, 5, 7][pi];
            let r = ring(p, &["x", "y"]);
            let a = build(&r, &a);
            prop_assert_eq!(MvPoly::parse(&a.to_string(), &r).unwrap(), a);
        }
    }
}
