//! Bernstein-Sato polynomials `b_f^(e)` in characteristic p, stored by their
//! (simple) roots, and the cross-checks tying them to F-jumping exponents.

use std::collections::BTreeSet;

use crate::arith::{p_digits, DigitTuple, FpScalar, PPowRational};
use crate::error::{Error, Result};
use crate::ideals::Ideal;
use crate::par::Exec;
use crate::poly::{Monomial, MvPoly};
use crate::report::Report;
use crate::singular::{gamma_set_with, GammaSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BSFactorization {
    pub level: u32,
    /// Roots `Σ_l i_l p^(l-1) / p^e`, ascending.
    pub roots: BTreeSet<PPowRational>,
    /// Roots of `b_f` in F_p (level 1 only).
    pub char_p_roots: Option<Vec<FpScalar>>,
}

impl BSFactorization {
    pub fn from_gamma(gamma: &GammaSet, p: u64) -> Self {
        let roots = gamma.iter().map(PPowRational::from_digits).collect();
        let char_p_roots = (gamma.level == 1).then(|| {
            let mut r: Vec<FpScalar> = gamma
                .iter()
                .map(|t| FpScalar::new(t.digits()[0], p))
                .collect();
            r.sort_by_key(|s| s.value());
            r
        });
        Self {
            level: gamma.level,
            roots,
            char_p_roots,
        }
    }
}

pub fn bs_poly(f: &MvPoly, e: u32) -> Result<BSFactorization> {
    bs_poly_with(f, e, Exec::default())
}

pub fn bs_poly_with(f: &MvPoly, e: u32, exec: Exec) -> Result<BSFactorization> {
    let g = gamma_set_with(f, e, exec)?;
    Ok(BSFactorization::from_gamma(&g, f.ring().prime()))
}

fn show(set: &BTreeSet<DigitTuple>) -> String {
    let parts: Vec<String> = set.iter().rev().map(|t| t.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Compares Γ at levels `e` and `e + refinement`: dropping the low
/// `refinement` digits must give Γ^e exactly, keeping the low `e` digits
/// must land inside Γ^e, and the top tuple is always present.
pub fn verify_main_theorem(f: &MvPoly, e: u32, refinement: u32) -> Result<Report> {
    verify_main_theorem_with(f, e, refinement, Exec::default())
}

pub fn verify_main_theorem_with(f: &MvPoly, e: u32, refinement: u32, exec: Exec) -> Result<Report> {
    if refinement == 0 {
        return Err(Error::Range("refinement must be at least 1".into()));
    }
    let p = f.ring().prime();
    let coarse = gamma_set_with(f, e, exec)?;
    let fine = gamma_set_with(f, e + refinement, exec)?;
    let mut rep = Report::new(format!("main theorem f={f} p={p} e={e} k={refinement}"));

    let projected = fine.drop_low(refinement as usize);
    rep.check(projected == coarse.tuples, || {
        format!(
            "high-digit projection {} != Γ^{e} {}",
            show(&projected),
            show(&coarse.tuples)
        )
    });
    let kept = fine.keep_low(e as usize);
    rep.check(kept.is_subset(&coarse.tuples), || {
        format!("low-digit projection {} ⊄ Γ^{e} {}", show(&kept), show(&coarse.tuples))
    });
    for (level, g) in [(e, &coarse), (e + refinement, &fine)] {
        let top = p_digits(p.pow(level) - 1, p, level as usize)?;
        rep.check(g.contains(&top), || format!("top tuple missing at level {level}"));
    }
    rep.check(coarse.len() <= fine.len(), || {
        format!("root count fell from {} to {}", coarse.len(), fine.len())
    });
    // each root of b^(e) is the level-e truncation of a refined root
    let fine_roots = BSFactorization::from_gamma(&fine, p).roots;
    let coarse_roots = BSFactorization::from_gamma(&coarse, p).roots;
    let q = num_bigint::BigInt::from(p).pow(refinement);
    let truncated: BTreeSet<PPowRational> = fine_roots
        .iter()
        .map(|r| {
            let n = r.numer() * num_bigint::BigInt::from(p).pow(e + refinement - r.den_exp());
            PPowRational::new(n / &q, e, p)
        })
        .collect();
    rep.check(truncated == coarse_roots, || "root truncation mismatch".into());
    rep.note(format!("Γ^{e} = {}", show(&coarse.tuples)));
    rep.note(format!("Γ^{} = {}", e + refinement, show(&fine.tuples)));
    Ok(rep)
}

fn staircase(gb: &[MvPoly], nvars: usize) -> Result<Vec<Monomial>> {
    let mut bounds = vec![0u64; nvars];
    for (i, b) in bounds.iter_mut().enumerate() {
        *b = gb
            .iter()
            .filter_map(|g| g.lm())
            .filter(|m| m.is_pure_power_of(i))
            .map(|m| m.exps()[i])
            .min()
            .ok_or_else(|| {
                Error::domain(format!(
                    "Jacobian ideal has infinite colength: no pure power of variable {} leads",
                    i + 1
                ))
            })?;
    }
    let mut out = Vec::new();
    let mut cur = vec![0u64; nvars];
    loop {
        let m = Monomial::from_exps(&cur);
        if !gb.iter().any(|g| g.lm().is_some_and(|lm| lm.divides(&m))) {
            out.push(m);
        }
        let mut k = 0;
        loop {
            if k == nvars {
                return Ok(out);
            }
            cur[k] += 1;
            if cur[k] < bounds[k] {
                break;
            }
            cur[k] = 0;
            k += 1;
        }
    }
}

/// Checks that every root `i ≠ -1` of `b_f` is `-Σ w_i (u_i + 1) / d` mod p
/// for some monomial `x^u` outside the initial ideal of the Jacobian ideal.
pub fn quasihomogeneous_check(f: &MvPoly, w: &[i64], d: i64) -> Result<Report> {
    let ring = f.ring();
    let field = ring.field();
    let p = ring.prime();
    let n = ring.nvars();
    if w.len() != n {
        return Err(Error::domain(format!("expected {n} weights, got {}", w.len())));
    }
    let dm = field.from_i64(d);
    if dm == 0 {
        return Err(Error::domain(format!("degree {d} vanishes mod {p}")));
    }
    for (u, _) in f.terms() {
        let s = u
            .exps()
            .iter()
            .zip(w)
            .fold(0, |acc, (&e, &wi)| field.add(acc, field.mul(field.from_u64(e), field.from_i64(wi))));
        if s != dm {
            let shown = MvPoly::monomial(ring, u.clone(), 1);
            return Err(Error::domain(format!("monomial {shown} has weighted degree ≢ {d} mod {p}")));
        }
    }
    let jac = Ideal::new(ring, (0..n).map(|i| f.derivative(i)))?;
    let gb = jac.groebner()?.polys().to_vec();
    let stairs = staircase(&gb, n)?;
    let dinv = field.inv(dm);
    let predicted: Vec<(u64, &Monomial)> = stairs
        .iter()
        .map(|u| {
            let s = u.exps().iter().zip(w).fold(0, |acc, (&e, &wi)| {
                field.add(acc, field.mul(field.from_u64(e + 1), field.from_i64(wi)))
            });
            (field.neg(field.mul(s, dinv)), u)
        })
        .collect();

    let bf = bs_poly(f, 1)?;
    let mut rep = Report::new(format!("quasihomogeneous f={f} p={p}"));
    let minus_one = p - 1;
    for root in bf.char_p_roots.as_deref().unwrap_or_default() {
        if root.value() == minus_one {
            continue;
        }
        let hits: Vec<String> = predicted
            .iter()
            .filter(|(v, _)| *v == root.value())
            .map(|(_, u)| MvPoly::monomial(ring, (*u).clone(), 1).to_string())
            .collect();
        rep.check(!hits.is_empty(), || format!("root {root} matches no staircase monomial"));
        if !hits.is_empty() {
            rep.note(format!("root {root} <- {}", hits.join(", ")));
        }
    }
    if rep.checked == 0 {
        rep.note("only the root -1");
    }
    Ok(rep)
}
