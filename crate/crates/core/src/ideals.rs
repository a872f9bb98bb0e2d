//! Gröbner bases over F_p and the ideal-theoretic decision procedures built
//! on them: membership, containment, equality and radical membership.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::poly::{same_ring, Monomial, MvPoly, Ring, Term};

pub use crate::poly::MonomialOrder;

/// Default cap on the number of S-pairs reduced by one Gröbner computation.
pub const DEFAULT_PAIR_CAP: usize = 2_000_000;

static PAIR_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_PAIR_CAP);

/// Sets the process-wide S-pair cap used by [`Ideal::groebner`].
pub fn set_pair_cap(cap: usize) {
    PAIR_CAP.store(cap.max(1), AtomicOrdering::Relaxed);
}

pub fn pair_cap() -> usize {
    PAIR_CAP.load(AtomicOrdering::Relaxed)
}

/// A reduced Gröbner basis together with the order it was computed under.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    order: MonomialOrder,
    polys: Vec<MvPoly>,
}

impl GroebnerBasis {
    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn polys(&self) -> &[MvPoly] {
        &self.polys
    }

    pub fn is_unit(&self) -> bool {
        self.polys.len() == 1 && self.polys[0].is_unit()
    }
}

/// An ideal given by generators, with a write-once Gröbner basis cache.
#[derive(Clone, Debug)]
pub struct Ideal {
    ring: Ring,
    gens: Vec<MvPoly>,
    gb: OnceLock<GroebnerBasis>,
}

impl Ideal {
    pub fn new(ring: &Ring, gens: impl IntoIterator<Item = MvPoly>) -> Result<Self> {
        let mut out = Vec::new();
        for g in gens {
            if !same_ring(g.ring(), ring) {
                return Err(Error::RingMismatch);
            }
            if !g.is_zero() {
                out.push(g);
            }
        }
        Ok(Self {
            ring: ring.clone(),
            gens: out,
            gb: OnceLock::new(),
        })
    }

    pub fn zero(ring: &Ring) -> Self {
        Self {
            ring: ring.clone(),
            gens: Vec::new(),
            gb: OnceLock::new(),
        }
    }

    pub fn unit(ring: &Ring) -> Self {
        Self::principal(&MvPoly::one(ring))
    }

    pub fn principal(f: &MvPoly) -> Self {
        Self::new(f.ring(), [f.clone()]).expect("same ring")
    }

    pub fn parse_list(src: &str, ring: &Ring) -> Result<Self> {
        let gens = src
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| MvPoly::parse(s, ring))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ring, gens)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn generators(&self) -> &[MvPoly] {
        &self.gens
    }

    fn check_ring(&self, other: &Ring) -> Result<()> {
        if same_ring(&self.ring, other) {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    /// Reduced Gröbner basis under the ring's order; cached after the first call.
    pub fn groebner(&self) -> Result<&GroebnerBasis> {
        if let Some(gb) = self.gb.get() {
            return Ok(gb);
        }
        let polys = buchberger(&self.gens, pair_cap())?;
        let gb = GroebnerBasis {
            order: self.ring.order(),
            polys,
        };
        // a concurrent duplicate computation may have won; both are identical
        Ok(self.gb.get_or_init(|| gb))
    }

    /// Reduced Gröbner basis under an arbitrary order (not cached unless it
    /// is the ring's own order).
    pub fn groebner_in(&self, order: MonomialOrder) -> Result<GroebnerBasis> {
        if order == self.ring.order() {
            return self.groebner().cloned();
        }
        let ring = self.ring.reordered(order);
        let gens = self
            .gens
            .iter()
            .map(|g| g.embed(&ring))
            .collect::<Result<Vec<_>>>()?;
        Ok(GroebnerBasis {
            order,
            polys: buchberger(&gens, pair_cap())?,
        })
    }

    pub fn is_unit(&self) -> Result<bool> {
        Ok(self.groebner()?.is_unit())
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn remainder(&self, f: &MvPoly) -> Result<MvPoly> {
        self.check_ring(f.ring())?;
        Ok(normal_form(f, &self.groebner()?.polys))
    }

    pub fn member(&self, f: &MvPoly) -> Result<bool> {
        Ok(self.remainder(f)?.is_zero())
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Ideal) -> Result<bool> {
        self.check_ring(&other.ring)?;
        let gb = &self.groebner()?.polys;
        Ok(other.gens.iter().all(|g| normal_form(g, gb).is_zero()))
    }

    pub fn equals(&self, other: &Ideal) -> Result<bool> {
        Ok(self.contains(other)? && other.contains(self)?)
    }

    /// `f ∈ Rad(self)`, by the Rabinowitsch trick: `1 ∈ self + (1 - z f)`.
    pub fn radical_member(&self, f: &MvPoly) -> Result<bool> {
        self.check_ring(f.ring())?;
        let ext = self.ring.extended("z");
        let z = MvPoly::var(&ext, ext.nvars() - 1);
        let zf = &z * &f.embed(&ext)?;
        let mut gens = self
            .gens
            .iter()
            .map(|g| g.embed(&ext))
            .collect::<Result<Vec<_>>>()?;
        gens.push(&MvPoly::one(&ext) - &zf);
        let gb = buchberger(&gens, pair_cap())?;
        Ok(gb.len() == 1 && gb[0].is_unit())
    }

    /// The canonical generator list: the reduced Gröbner basis.
    pub fn canonical(&self) -> Result<Vec<MvPoly>> {
        Ok(self.groebner()?.polys.clone())
    }

    pub fn render(&self) -> Result<String> {
        let gb = self.groebner()?;
        if gb.polys.is_empty() {
            return Ok("(0)".into());
        }
        let parts: Vec<String> = gb.polys.iter().map(|g| g.to_string()).collect();
        Ok(format!("({})", parts.join(", ")))
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.gens.iter().map(|g| g.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Subtracts `c * x^shift * g` from an ascending term list.
fn sub_scaled_asc(
    work: &[Term],
    c: u64,
    shift: &Monomial,
    g: &MvPoly,
    order: MonomialOrder,
) -> Vec<Term> {
    let f = g.ring().field();
    let neg = f.neg(c);
    let mut out = Vec::with_capacity(work.len() + g.len());
    let mut i = 0;
    // g's terms are descending, walk them backwards
    let gt = g.terms();
    let mut j = gt.len();
    while i < work.len() && j > 0 {
        let m = gt[j - 1].0.checked_mul(shift).expect("reduction stays below the reducee");
        match order.cmp(&work[i].0, &m) {
            Ordering::Less => {
                out.push(work[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push((m, f.mul(neg, gt[j - 1].1)));
                j -= 1;
            }
            Ordering::Equal => {
                let v = f.add(work[i].1, f.mul(neg, gt[j - 1].1));
                if v != 0 {
                    out.push((m, v));
                }
                i += 1;
                j -= 1;
            }
        }
    }
    out.extend_from_slice(&work[i..]);
    while j > 0 {
        let m = gt[j - 1].0.checked_mul(shift).expect("reduction stays below the reducee");
        out.push((m, f.mul(neg, gt[j - 1].1)));
        j -= 1;
    }
    out
}

/// Full normal form of `f` modulo `basis` (any finite list of nonzero polys).
pub fn normal_form(f: &MvPoly, basis: &[MvPoly]) -> MvPoly {
    let ring = f.ring();
    let order = ring.order();
    let field = ring.field();
    let mut work: Vec<Term> = f.terms().iter().rev().cloned().collect();
    let mut rem: Vec<Term> = Vec::new();
    while let Some((m, c)) = work.last() {
        match basis.iter().find(|g| g.lm().is_some_and(|lm| lm.divides(m))) {
            Some(g) => {
                let (lm, lc) = g.leading_term().expect("nonzero");
                let shift = m.div(lm);
                let k = field.mul(*c, field.inv(*lc));
                work = sub_scaled_asc(&work, k, &shift, g, order);
            }
            None => rem.push(work.pop().expect("nonempty")),
        }
    }
    MvPoly::from_sorted(ring, rem)
}

/// Result of multivariate division `f = Σ q_i g_i + r`.
#[derive(Clone, Debug)]
pub struct Division {
    pub quotients: Vec<MvPoly>,
    pub remainder: MvPoly,
}

/// Multivariate division with cofactor bookkeeping.
pub fn divide(f: &MvPoly, divisors: &[MvPoly]) -> Result<Division> {
    let ring = f.ring();
    if divisors.iter().any(|g| !same_ring(g.ring(), ring)) {
        return Err(Error::RingMismatch);
    }
    let order = ring.order();
    let field = ring.field();
    let mut quotients: Vec<Vec<Term>> = vec![Vec::new(); divisors.len()];
    let mut work: Vec<Term> = f.terms().iter().rev().cloned().collect();
    let mut rem: Vec<Term> = Vec::new();
    while let Some((m, c)) = work.last() {
        let hit = divisors
            .iter()
            .position(|g| g.lm().is_some_and(|lm| lm.divides(m)));
        match hit {
            Some(i) => {
                let g = &divisors[i];
                let (lm, lc) = g.leading_term().expect("nonzero");
                let shift = m.div(lm);
                let k = field.mul(*c, field.inv(*lc));
                quotients[i].push((shift.clone(), k));
                work = sub_scaled_asc(&work, k, &shift, g, order);
            }
            None => rem.push(work.pop().expect("nonempty")),
        }
    }
    Ok(Division {
        quotients: quotients
            .into_iter()
            .map(|q| MvPoly::from_terms(ring, q))
            .collect(),
        remainder: MvPoly::from_sorted(ring, rem),
    })
}

/// Row-echelon form of the F_p-span of `polys`: the result generates the
/// same ideal, has pairwise distinct leading monomials, and is monic.
pub fn interreduce_linear(polys: &[MvPoly]) -> Vec<MvPoly> {
    let mut pivots: BTreeMap<Vec<u64>, MvPoly> = BTreeMap::new();
    for p in polys {
        let mut cur = p.clone();
        while let Some((lm, lc)) = cur.leading_term() {
            let key = lm.exps().to_vec();
            match pivots.get(&key) {
                Some(row) => cur = &cur - &row.scalar_mul(*lc),
                None => break,
            }
        }
        if !cur.is_zero() {
            let key = cur.lm().expect("nonzero").exps().to_vec();
            pivots.insert(key, cur.monic());
        }
    }
    let mut out: Vec<MvPoly> = pivots.into_values().collect();
    if let Some(first) = out.first() {
        let order = first.ring().order();
        out.sort_by(|a, b| order.cmp(a.lm().unwrap(), b.lm().unwrap()));
    }
    out
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

fn s_poly(a: &MvPoly, b: &MvPoly, lcm: &Monomial) -> MvPoly {
    let (la, ca) = a.leading_term().expect("nonzero");
    let (lb, cb) = b.leading_term().expect("nonzero");
    let field = a.ring().field();
    let left = a
        .mul_term(&lcm.div(la), field.inv(*ca))
        .expect("lcm bounds the product");
    let right = b
        .mul_term(&lcm.div(lb), field.inv(*cb))
        .expect("lcm bounds the product");
    &left - &right
}

struct Buchberger {
    order: MonomialOrder,
    polys: Vec<MvPoly>,
    active: Vec<bool>,
    pairs: Vec<Pair>,
}

impl Buchberger {
    fn lm(&self, i: usize) -> &Monomial {
        self.polys[i].lm().expect("nonzero")
    }

    fn active_polys(&self) -> Vec<MvPoly> {
        self.polys
            .iter()
            .zip(&self.active)
            .filter(|(_, a)| **a)
            .map(|(p, _)| p.clone())
            .collect()
    }

    /// Gebauer-Möller pair update for a freshly reduced `h`.
    fn insert(&mut self, h: MvPoly) {
        let hi = self.polys.len();
        let lh = h.lm().expect("nonzero").clone();
        self.polys.push(h);
        self.active.push(true);

        let mut cand: Vec<(usize, Monomial, bool)> = (0..hi)
            .filter(|&g| self.active[g])
            .map(|g| (g, lh.lcm(self.lm(g)), lh.coprime(self.lm(g))))
            .collect();
        // chain criterion among the new pairs
        let mut kept: Vec<(usize, Monomial, bool)> = Vec::new();
        while let Some((g1, l1, coprime)) = cand.pop() {
            let dominated = cand.iter().chain(kept.iter()).any(|(_, l2, _)| l2.divides(&l1));
            if coprime || !dominated {
                kept.push((g1, l1, coprime));
            }
        }
        let fresh: Vec<Pair> = kept
            .into_iter()
            .filter(|(_, _, coprime)| !coprime)
            .map(|(g, lcm, _)| Pair { i: g, j: hi, lcm })
            .collect();
        // drop old pairs that h makes redundant
        let old = std::mem::take(&mut self.pairs);
        for pr in old {
            let keep = !lh.divides(&pr.lcm)
                || lh.lcm(self.lm(pr.i)) == pr.lcm
                || lh.lcm(self.lm(pr.j)) == pr.lcm;
            if keep {
                self.pairs.push(pr);
            }
        }
        self.pairs.extend(fresh);
        for g in 0..hi {
            if self.active[g] && lh.divides(self.lm(g)) {
                self.active[g] = false;
            }
        }
    }

    fn pop_pair(&mut self) -> Option<Pair> {
        let order = self.order;
        let best = self
            .pairs
            .iter()
            .enumerate()
            .min_by(|a, b| order.cmp(&a.1.lcm, &b.1.lcm))
            .map(|(k, _)| k)?;
        Some(self.pairs.swap_remove(best))
    }
}

/// Reduced Gröbner basis of the ideal generated by `gens` under their
/// ring's order. Fails with [`Error::ResourceExceeded`] after `cap` S-pairs.
pub fn buchberger(gens: &[MvPoly], cap: usize) -> Result<Vec<MvPoly>> {
    let Some(first) = gens.iter().find(|g| !g.is_zero()) else {
        return Ok(Vec::new());
    };
    let ring = first.ring().clone();
    let order = ring.order();
    if gens.iter().any(|g| g.is_unit()) {
        return Ok(vec![MvPoly::one(&ring)]);
    }
    let start = interreduce_linear(gens);
    let mut bb = Buchberger {
        order,
        polys: Vec::new(),
        active: Vec::new(),
        pairs: Vec::new(),
    };
    for g in start {
        let h = normal_form(&g, &bb.active_polys());
        if !h.is_zero() {
            if h.is_unit() {
                return Ok(vec![MvPoly::one(&ring)]);
            }
            bb.insert(h.monic());
        }
    }
    let mut processed = 0usize;
    let mut active = bb.active_polys();
    while let Some(pr) = bb.pop_pair() {
        processed += 1;
        if processed > cap {
            return Err(Error::ResourceExceeded(format!(
                "Gröbner basis computation exceeded {cap} S-pairs"
            )));
        }
        let s = s_poly(&bb.polys[pr.i], &bb.polys[pr.j], &pr.lcm);
        let h = normal_form(&s, &active);
        if !h.is_zero() {
            if h.is_unit() {
                return Ok(vec![MvPoly::one(&ring)]);
            }
            bb.insert(h.monic());
            active = bb.active_polys();
        }
    }
    Ok(reduce_basis(active, order))
}

fn reduce_basis(mut basis: Vec<MvPoly>, order: MonomialOrder) -> Vec<MvPoly> {
    basis.sort_by(|a, b| order.cmp(a.lm().unwrap(), b.lm().unwrap()));
    let mut out = Vec::with_capacity(basis.len());
    for k in 0..basis.len() {
        let g = &basis[k];
        let others: Vec<MvPoly> = basis
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, p)| p.clone())
            .collect();
        let (lm, lc) = g.leading_term().unwrap().clone();
        let tail = MvPoly::from_sorted(g.ring(), g.terms()[1..].to_vec());
        let tail = normal_form(&tail, &others);
        let lead = MvPoly::monomial(g.ring(), lm, lc);
        out.push((&lead + &tail).monic());
    }
    out
}
