//! Test ideals, F-jumping exponents, the digit sets Γ and F-thresholds.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::arith::{ceil_scaled, p_digits, DigitTuple, PPowRational};
use crate::error::{Error, Result};
use crate::frobenius::{frobenius_power, root_of_poly};
use crate::ideals::Ideal;
use crate::par::Exec;
use crate::poly::MvPoly;

/// Largest `p^e` for which a full chain `m = 0..p^e` is attempted.
pub const MAX_CHAIN_LEN: u64 = 1 << 16;

/// Default bound on `k` in the search for `f^k ∈ J`.
pub const DEFAULT_NU_POWER_CAP: u64 = 256;

fn check_nonzero(f: &MvPoly) -> Result<()> {
    if f.is_zero() {
        return Err(Error::domain("the zero polynomial has no test ideals"));
    }
    Ok(())
}

fn check_nonunit(f: &MvPoly) -> Result<()> {
    check_nonzero(f)?;
    if f.is_unit() {
        return Err(Error::domain("f is a unit"));
    }
    Ok(())
}

fn chain_len(p: u64, e: u32) -> Result<u64> {
    match p.checked_pow(e) {
        Some(q) if q <= MAX_CHAIN_LEN => Ok(q),
        _ => Err(Error::ResourceExceeded(format!(
            "chain of length {p}^{e} exceeds {MAX_CHAIN_LEN}"
        ))),
    }
}

/// `τ(f^(m/p^e)) = (f^m)^[1/p^e]`.
pub fn test_ideal_padic(f: &MvPoly, m: u64, e: u32) -> Result<Ideal> {
    check_nonzero(f)?;
    root_of_poly(&f.pow(m)?, e)
}

#[derive(Clone, Debug)]
pub struct TestIdeal {
    pub ideal: Ideal,
    /// First level of the stable run, or the last level tried.
    pub level: u32,
    pub stabilized: bool,
}

/// `τ(f^λ)` as the first value of `(f^⌈λp^e⌉)^[1/p^e]` repeated at two
/// consecutive levels `e_start <= e <= e_cap`.
pub fn test_ideal(f: &MvPoly, lambda: &BigRational, e_start: u32, e_cap: u32) -> Result<TestIdeal> {
    check_nonzero(f)?;
    if lambda.is_negative() {
        return Err(Error::domain("λ must be nonnegative"));
    }
    if e_cap < e_start {
        return Err(Error::Range(format!("e_cap {e_cap} < e_start {e_start}")));
    }
    let p = f.ring().prime();
    let at = |e: u32| -> Result<Ideal> {
        let n: BigUint = if lambda.is_zero() {
            BigUint::zero()
        } else {
            ceil_scaled(lambda, p, e)
        };
        root_of_poly(&f.pow_big(&n)?, e)
    };
    let mut prev = at(e_start)?;
    for e in e_start + 1..=e_cap {
        let cur = at(e)?;
        if !cur.contains(&prev)? {
            return Err(Error::Invariant(format!(
                "test ideal chain not increasing between levels {} and {e}",
                e - 1
            )));
        }
        if prev.contains(&cur)? {
            return Ok(TestIdeal {
                ideal: prev,
                level: e - 1,
                stabilized: true,
            });
        }
        prev = cur;
    }
    Ok(TestIdeal {
        ideal: prev,
        level: e_cap,
        stabilized: false,
    })
}

/// The chain `I_m = (h f^m)^[1/p^e]`, `m = 0..=p^e`, with its strict drops.
#[derive(Clone, Debug)]
pub struct Chain {
    pub level: u32,
    pub ideals: Vec<Ideal>,
    /// `drops[m]` iff `I_m != I_(m+1)`.
    pub drops: Vec<bool>,
}

pub fn padic_chain(f: &MvPoly, h: Option<&MvPoly>, e: u32, exec: Exec) -> Result<Chain> {
    let q = chain_len(f.ring().prime(), e)?;
    let len = q as usize + 1;
    let nb = exec.blocks(len);
    let step = len.div_ceil(nb);
    let ranges: Vec<(usize, usize)> = (0..len)
        .step_by(step)
        .map(|s| (s, (s + step).min(len)))
        .collect();
    let blocks = exec.map(ranges, |(lo, hi)| -> Result<Vec<Ideal>> {
        let mut g = f.pow(lo as u64)?;
        if let Some(h) = h {
            g = g.checked_mul(h)?;
        }
        let mut out = Vec::with_capacity(hi - lo);
        for m in lo..hi {
            if m > lo {
                g = g.checked_mul(f)?;
            }
            let ideal = root_of_poly(&g, e)?;
            ideal.groebner()?;
            out.push(ideal);
        }
        Ok(out)
    });
    let mut ideals = Vec::with_capacity(len);
    for b in blocks {
        ideals.extend(b?);
    }
    let checks = exec.map((0..q as usize).collect(), |m| -> Result<bool> {
        if !ideals[m].contains(&ideals[m + 1])? {
            return Err(Error::Invariant(format!("chain not decreasing at m = {m}")));
        }
        Ok(!ideals[m + 1].contains(&ideals[m])?)
    });
    let drops = checks.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Chain {
        level: e,
        ideals,
        drops,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaSet {
    pub level: u32,
    pub tuples: BTreeSet<DigitTuple>,
}

impl GammaSet {
    fn from_chain(chain: &Chain, p: u64) -> Result<Self> {
        let mut tuples = BTreeSet::new();
        for (m, d) in chain.drops.iter().enumerate() {
            if *d {
                tuples.insert(p_digits(m as u64, p, chain.level as usize)?);
            }
        }
        Ok(GammaSet {
            level: chain.level,
            tuples,
        })
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &DigitTuple) -> bool {
        self.tuples.contains(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &DigitTuple> {
        self.tuples.iter()
    }

    /// `(i_1..i_e) -> (i_(k+1)..i_e)`.
    pub fn drop_low(&self, k: usize) -> BTreeSet<DigitTuple> {
        self.tuples.iter().map(|t| t.drop_low(k)).collect()
    }

    /// `(i_1..i_e) -> (i_1..i_len)`.
    pub fn keep_low(&self, len: usize) -> BTreeSet<DigitTuple> {
        self.tuples.iter().map(|t| t.keep_low(len)).collect()
    }
}

impl fmt::Display for GammaSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.tuples.iter().rev().map(|t| t.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn gamma_set(f: &MvPoly, e: u32) -> Result<GammaSet> {
    gamma_set_with(f, e, Exec::default())
}

pub fn gamma_set_with(f: &MvPoly, e: u32, exec: Exec) -> Result<GammaSet> {
    check_nonunit(f)?;
    if e == 0 {
        return Err(Error::Range("level must be at least 1".into()));
    }
    GammaSet::from_chain(&padic_chain(f, None, e, exec)?, f.ring().prime())
}

pub fn gamma_set_relative(f: &MvPoly, h: &MvPoly, e: u32) -> Result<GammaSet> {
    gamma_set_relative_with(f, h, e, Exec::default())
}

pub fn gamma_set_relative_with(f: &MvPoly, h: &MvPoly, e: u32, exec: Exec) -> Result<GammaSet> {
    check_nonzero(f)?;
    check_nonzero(h)?;
    if e == 0 {
        return Err(Error::Range("level must be at least 1".into()));
    }
    if !crate::poly::same_ring(f.ring(), h.ring()) {
        return Err(Error::RingMismatch);
    }
    GammaSet::from_chain(&padic_chain(f, Some(h), e, exec)?, f.ring().prime())
}

#[derive(Clone, Debug)]
pub struct JumpReport {
    pub level: u32,
    /// Intervals `(lo, hi]` each containing an F-jumping exponent.
    pub jumps: Vec<(PPowRational, PPowRational)>,
    /// `τ(f^(m/p^e))` for `m = 0..=p^e`.
    pub ideals: Vec<Ideal>,
}

pub fn f_jumping_exponents(f: &MvPoly, e: u32) -> Result<JumpReport> {
    f_jumping_exponents_with(f, e, Exec::default())
}

pub fn f_jumping_exponents_with(f: &MvPoly, e: u32, exec: Exec) -> Result<JumpReport> {
    check_nonunit(f)?;
    if e == 0 {
        return Err(Error::Range("level must be at least 1".into()));
    }
    let p = f.ring().prime();
    let chain = padic_chain(f, None, e, exec)?;
    let jumps = chain
        .drops
        .iter()
        .enumerate()
        .filter(|(_, d)| **d)
        .map(|(m, _)| {
            (
                PPowRational::new(m as u64, e, p),
                PPowRational::new(m as u64 + 1, e, p),
            )
        })
        .collect();
    Ok(JumpReport {
        level: e,
        jumps,
        ideals: chain.ideals,
    })
}

/// `ν^J(p^e)`: the largest `r` with `f^r ∉ J^[p^e]`.
pub fn nu(f: &MvPoly, j: &Ideal, e: u32) -> Result<u64> {
    nu_with_cap(f, j, e, DEFAULT_NU_POWER_CAP)
}

pub fn nu_with_cap(f: &MvPoly, j: &Ideal, e: u32, power_cap: u64) -> Result<u64> {
    check_nonzero(f)?;
    if j.is_unit()? {
        return Err(Error::domain("J is the unit ideal"));
    }
    if !j.radical_member(f)? {
        return Err(Error::domain("f is not in the radical of J"));
    }
    let mut k = 1u64;
    let mut fk = f.clone();
    while !j.member(&fk)? {
        k += 1;
        if k > power_cap {
            return Err(Error::ResourceExceeded(format!(
                "no power f^k in J for k <= {power_cap}"
            )));
        }
        fk = fk.checked_mul(f)?;
    }
    let q = f.ring().prime().checked_pow(e).ok_or(Error::ExponentOverflow)?;
    let frob = frobenius_power(j, e)?;
    // f^lo ∉ J^[q], f^hi ∈ J^[q]
    let (mut lo, mut hi) = (0u64, k.checked_mul(q).ok_or(Error::ExponentOverflow)?);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if frob.member(&f.pow(mid)?)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::tests::{poly, ring};
    use num_bigint::BigInt;

    fn tuples(p: u64, ts: &[&[u64]]) -> BTreeSet<DigitTuple> {
        ts.iter().map(|t| DigitTuple::new(t.to_vec(), p).unwrap()).collect()
    }

    fn cusp(p: u64) -> MvPoly {
        poly(&ring(p, &["x", "y"]), "x^2 + y^3")
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn padic_examples() {
        let f = cusp(5);
        let r = f.ring().clone();
        assert!(test_ideal_padic(&f, 0, 2).unwrap().is_unit().unwrap());
        let mx = Ideal::parse_list("x, y", &r).unwrap();
        assert!(test_ideal_padic(&f, 4, 1).unwrap().equals(&mx).unwrap());
        assert!(test_ideal_padic(&f, 3, 1).unwrap().is_unit().unwrap());
        assert!(test_ideal_padic(&MvPoly::zero(&r), 1, 1).is_err());
    }

    #[test]
    fn stabilized_examples() {
        let f = cusp(7);
        let r = f.ring().clone();
        let t = test_ideal(&f, &rat(5, 6), 1, 4).unwrap();
        assert!(t.stabilized);
        assert_eq!(t.level, 1);
        assert!(t.ideal.equals(&Ideal::parse_list("x, y", &r).unwrap()).unwrap());
        assert!(test_ideal(&f, &rat(0, 1), 1, 3).unwrap().ideal.is_unit().unwrap());
        let one = test_ideal(&f, &rat(1, 1), 1, 3).unwrap();
        assert!(one.ideal.equals(&Ideal::principal(&f)).unwrap());
        assert!(test_ideal(&f, &rat(-1, 2), 1, 3).is_err());
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_set(&cusp(7), 1).unwrap().tuples, tuples(7, &[&[6], &[5]]));
        assert_eq!(gamma_set(&cusp(5), 1).unwrap().tuples, tuples(5, &[&[4], &[3]]));
        let q = poly(&ring(5, &["x", "y", "z"]), "x^2 + y^2 + z^2");
        assert_eq!(gamma_set(&q, 2).unwrap().tuples, tuples(5, &[&[4, 4]]));
        let r = ring(3, &["x"]);
        assert!(gamma_set(&MvPoly::one(&r), 1).is_err());
    }

    /// Drop detection by adjunction: `I_m ⊄ I_(m+1)` iff `h f^m ∉ I_(m+1)^[q]`.
    fn gamma_by_adjunction(f: &MvPoly, h: &MvPoly, e: u32) -> BTreeSet<DigitTuple> {
        let p = f.ring().prime();
        let q = p.pow(e);
        let mut out = BTreeSet::new();
        for m in 0..q {
            let g = &f.pow(m).unwrap() * h;
            let next = root_of_poly(&(&g * f), e).unwrap();
            if !frobenius_power(&next, e).unwrap().member(&g).unwrap() {
                out.insert(p_digits(m, p, e as usize).unwrap());
            }
        }
        out
    }

    #[test]
    fn relative_examples() {
        let f = cusp(5);
        let r = f.ring().clone();
        let one = MvPoly::one(&r);
        assert_eq!(gamma_set_relative(&f, &one, 2).unwrap(), gamma_set(&f, 2).unwrap());
        let y = poly(&r, "y");
        assert_eq!(gamma_set_relative(&f, &y, 1).unwrap().tuples, gamma_by_adjunction(&f, &y, 1));
        assert_eq!(gamma_set(&f, 2).unwrap().tuples, gamma_by_adjunction(&f, &one, 2));

        // h = f shifts the chain by one factor of f
        for (p, e) in [(5u64, 1u32), (3, 2), (7, 1)] {
            let f = cusp(p);
            let q = p.pow(e);
            let rel = gamma_set_relative(&f, &f, e).unwrap();
            let ideals: Vec<Ideal> = (1..=q + 1)
                .map(|m| root_of_poly(&f.pow(m).unwrap(), e).unwrap())
                .collect();
            let expect: BTreeSet<DigitTuple> = (0..q as usize)
                .filter(|&m| !ideals[m + 1].equals(&ideals[m]).unwrap())
                .map(|m| p_digits(m as u64, p, e as usize).unwrap())
                .collect();
            assert_eq!(rel.tuples, expect);
        }
    }

    #[test]
    fn jump_examples() {
        let rep = f_jumping_exponents(&cusp(7), 2).unwrap();
        let lows: Vec<String> = rep.jumps.iter().map(|(lo, _)| lo.to_string()).collect();
        assert_eq!(lows, vec!["40/49", "48/49"]);
        assert_eq!(rep.ideals.len(), 50);
        let rep = f_jumping_exponents(&cusp(5), 1).unwrap();
        let ints: Vec<String> = rep.jumps.iter().map(|(a, b)| format!("({a}, {b}]")).collect();
        assert_eq!(ints, vec!["(3/5, 4/5]", "(4/5, 1]"]);
        for p in [2u64, 3, 5, 7] {
            let x = poly(&ring(p, &["x", "y"]), "x");
            let rep = f_jumping_exponents(&x, 1).unwrap();
            assert_eq!(rep.jumps.len(), 1);
            assert_eq!(rep.jumps[0].1.to_string(), "1");
        }
    }

    #[test]
    fn nu_examples() {
        for (p, e) in [(5u64, 1u32), (7, 2), (5, 2)] {
            let f = cusp(p);
            assert_eq!(nu(&f, &Ideal::principal(&f), e).unwrap(), p.pow(e) - 1);
        }
        let f = cusp(7);
        let m = Ideal::parse_list("x, y", f.ring()).unwrap();
        assert_eq!(nu(&f, &m, 2).unwrap(), 40);
        let r = ring(3, &["x"]);
        let x = poly(&r, "x");
        assert_eq!(nu(&x, &Ideal::principal(&x), 1).unwrap(), 2);
        let r2 = f.ring().clone();
        assert!(matches!(nu(&f, &Ideal::parse_list("x", &r2).unwrap(), 1), Err(Error::Domain(_))));
        assert!(matches!(nu(&f, &Ideal::unit(&r2), 1), Err(Error::Domain(_))));
    }

    fn small_corpus() -> Vec<(u64, Vec<&'static str>, &'static str)> {
        vec![
            (2, vec!["x", "y"], "x^2 + y^3"),
            (3, vec!["x", "y"], "x^2 + y^3"),
            (3, vec!["x", "y"], "x*y*(x + y)"),
            (5, vec!["x", "y"], "x^3 + y^4"),
            (5, vec!["x", "y", "z"], "x*y + z^2"),
            (7, vec!["x", "y"], "x^2 + y^5"),
            (2, vec!["x", "y", "z"], "x*y*z"),
        ]
    }

    #[test]
    fn levels_are_compatible() {
        for (p, vars, src) in small_corpus() {
            let f = poly(&ring(p, &vars), src);
            let g1 = gamma_set(&f, 1).unwrap();
            let g2 = gamma_set(&f, 2).unwrap();
            assert_eq!(g2.drop_low(1), g1.tuples, "{src} p={p}");
            assert!(g2.keep_low(1).is_subset(&g1.tuples), "{src} p={p}");
            assert!(g1.contains(&p_digits(p - 1, p, 1).unwrap()));
            for m in 0..=p {
                let a = test_ideal_padic(&f, m * p, 2).unwrap();
                let b = test_ideal_padic(&f, m, 1).unwrap();
                assert!(a.contains(&b).unwrap() && b.contains(&a).unwrap());
            }
        }
    }

    #[test]
    fn nu_levels_are_consistent() {
        for (p, vars, src) in small_corpus() {
            let f = poly(&ring(p, &vars), src);
            let m = Ideal::new(f.ring(), (0..vars.len()).map(|i| MvPoly::var(f.ring(), i))).unwrap();
            let n1 = nu(&f, &m, 1).unwrap();
            let n2 = nu(&f, &m, 2).unwrap();
            assert!(n2 >= p * n1 && n2 < p * n1 + p, "{src} p={p}: {n1} {n2}");
        }
    }

    #[test]
    fn sequential_chain_matches_parallel() {
        let f = cusp(5);
        let a = gamma_set_with(&f, 2, Exec::Sequential).unwrap();
        let b = gamma_set_with(&f, 2, Exec::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "{(4,4), (4,3)}");
    }
}
