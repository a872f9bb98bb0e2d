use std::cmp::Ordering;

use smallvec::SmallVec;

/// Term orders on exponent vectors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    #[default]
    GRevLex,
    Lex,
    GrLex,
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex => a.0.iter().cmp(b.0.iter()),
            MonomialOrder::GrLex => a
                .degree()
                .cmp(&b.degree())
                .then_with(|| a.0.iter().cmp(b.0.iter())),
            MonomialOrder::GRevLex => a.degree().cmp(&b.degree()).then_with(|| {
                // the smaller trailing exponent wins
                for (x, y) in a.0.iter().rev().zip(b.0.iter().rev()) {
                    match x.cmp(y) {
                        Ordering::Equal => continue,
                        o => return o.reverse(),
                    }
                }
                Ordering::Equal
            }),
        }
    }
}

/// An exponent vector. Arithmetic is overflow-checked.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub(crate) SmallVec<[u64; 4]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn from_exps(exps: &[u64]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn exps(&self) -> &[u64] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u128 {
        self.0.iter().map(|&e| e as u128).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        let mut out = self.0.clone();
        for (a, b) in out.iter_mut().zip(other.0.iter()) {
            *a = a.checked_add(*b)?;
        }
        Some(Monomial(out))
    }

    pub fn checked_scale(&self, k: u64) -> Option<Self> {
        let mut out = self.0.clone();
        for a in out.iter_mut() {
            *a = a.checked_mul(k)?;
        }
        Some(Monomial(out))
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `self / other`; caller guarantees `other | self`.
    pub fn div(&self, other: &Self) -> Self {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Self) -> Self {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn coprime(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Splits `u = q * quot + rem` componentwise with `0 <= rem < q`.
    pub fn split(&self, q: u64) -> (Self, Self) {
        let quot = self.0.iter().map(|a| a / q).collect();
        let rem = self.0.iter().map(|a| a % q).collect();
        (Monomial(quot), Monomial(rem))
    }

    pub fn is_pure_power_of(&self, var: usize) -> bool {
        self.0.iter().enumerate().all(|(i, &e)| (i == var) == (e > 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u64]) -> Monomial {
        Monomial::from_exps(e)
    }

    #[test]
    fn grevlex_basics() {
        let o = MonomialOrder::GRevLex;
        // x > y > z in degree one
        assert_eq!(o.cmp(&m(&[1, 0, 0]), &m(&[0, 1, 0])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[0, 1, 0]), &m(&[0, 0, 1])), Ordering::Greater);
        // x*z < y^2 in grevlex but x*z > y^2 in lex
        assert_eq!(o.cmp(&m(&[1, 0, 1]), &m(&[0, 2, 0])), Ordering::Less);
        assert_eq!(MonomialOrder::Lex.cmp(&m(&[1, 0, 1]), &m(&[0, 2, 0])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[0, 0, 0]), &m(&[0, 0, 1])), Ordering::Less);
    }

    #[test]
    fn overflow_is_detected() {
        assert!(m(&[u64::MAX, 0]).checked_mul(&m(&[1, 0])).is_none());
        assert!(m(&[u64::MAX / 2 + 1]).checked_scale(2).is_none());
    }

    #[test]
    fn split_components() {
        let (q, r) = m(&[7, 3]).split(5);
        assert_eq!(q, m(&[1, 0]));
        assert_eq!(r, m(&[2, 3]));
    }
}
