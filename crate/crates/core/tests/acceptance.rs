//! Acceptance criteria 1-10. Each test prints one `[PASS]` or `[FAIL]` line.

use std::collections::BTreeSet;
use std::io::Write;

use charp_core::arith::{p_digits, PPowRational, PrimeField};
use charp_core::bfmod::rt::verify_rt_identities;
use charp_core::bfmod::{verify_binomial_series, verify_structure};
use charp_core::bsato::{bs_poly, quasihomogeneous_check, verify_main_theorem};
use charp_core::frobenius::{frobenius_power, frobenius_root};
use charp_core::ideals::Ideal;
use charp_core::par::Exec;
use charp_core::poly::{Monomial, MvPoly, PolyRing, Ring};
use charp_core::singular::{gamma_set, nu, padic_chain, test_ideal};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ring(p: u64, vars: &[&str]) -> Ring {
    PolyRing::new(p, vars).unwrap()
}

fn poly(r: &Ring, s: &str) -> MvPoly {
    MvPoly::parse(s, r).unwrap()
}

fn cusp(p: u64) -> MvPoly {
    poly(&ring(p, &["x", "y"]), "x^2 + y^3")
}

/// Writes to the raw stderr handle so the verdict shows without `--nocapture`.
fn verdict(n: u32, failures: &[String]) {
    let mut err = std::io::stderr().lock();
    if failures.is_empty() {
        let _ = writeln!(err, "[PASS] criterion {n}");
    } else {
        let _ = writeln!(err, "[FAIL] criterion {n}");
        for f in failures {
            let _ = writeln!(err, "  {f}");
        }
    }
    assert!(failures.is_empty(), "criterion {n}: {} failures", failures.len());
}

fn gamma_digits(f: &MvPoly, e: u32) -> BTreeSet<Vec<u64>> {
    gamma_set(f, e).unwrap().iter().map(|t| t.digits().to_vec()).collect()
}

fn root_set(f: &MvPoly, e: u32) -> BTreeSet<PPowRational> {
    bs_poly(f, e).unwrap().roots
}

/// `num / p^e` as a root.
fn r(num: u64, e: u32, p: u64) -> PPowRational {
    PPowRational::new(num, e, p)
}

#[test]
fn criterion_1_cusp_p_1_mod_3() {
    let mut fails = Vec::new();
    for (p, e) in [(7u64, 1u32), (7, 2), (7, 3), (13, 1), (13, 2)] {
        let f = cusp(p);
        let q = p.pow(e);
        let a = 5 * (p - 1) / 6;
        let expect: BTreeSet<Vec<u64>> = [vec![p - 1; e as usize], vec![a; e as usize]].into();
        let got = gamma_digits(&f, e);
        if got != expect {
            fails.push(format!("p={p} e={e}: Γ = {got:?}, expected {expect:?}"));
        }
        let roots: BTreeSet<_> = [r(q - 1, e, p), r(5 * (q - 1) / 6, e, p)].into();
        let got = root_set(&f, e);
        if got != roots {
            fails.push(format!("p={p} e={e}: roots {got:?}"));
        }
    }
    verdict(1, &fails);
}

#[test]
fn criterion_2_cusp_p_2_mod_3() {
    let mut fails = Vec::new();
    for p in [5u64, 11] {
        let f = cusp(p);
        let a = (5 * p - 7) / 6;
        let g1 = gamma_digits(&f, 1);
        if g1 != BTreeSet::from([vec![p - 1], vec![a]]) {
            fails.push(format!("p={p}: Γ^1 = {g1:?}"));
        }
        let g2 = gamma_digits(&f, 2);
        if g2 != BTreeSet::from([vec![p - 1, p - 1], vec![p - 1, a]]) {
            fails.push(format!("p={p}: Γ^2 = {g2:?}"));
        }
        for e in 1..=2u32 {
            let q = p.pow(e);
            // (5p-1)/(6p) - 1/p^e = ((5p-1) p^(e-1) / 6 - 1) / p^e
            let second = (5 * p - 1) * p.pow(e - 1) / 6 - 1;
            let roots: BTreeSet<_> = [r(q - 1, e, p), r(second, e, p)].into();
            let got = root_set(&f, e);
            if got != roots {
                fails.push(format!("p={p} e={e}: roots {got:?}"));
            }
        }
        // (s+1)(s+7/6): roots -1 and -7/6 in F_p
        let field = PrimeField::new(p).unwrap();
        let expect: BTreeSet<u64> = [field.neg(1), field.neg(field.mul(7, field.inv(6)))].into();
        let got: BTreeSet<u64> = bs_poly(&f, 1)
            .unwrap()
            .char_p_roots
            .unwrap()
            .iter()
            .map(|s| s.value())
            .collect();
        if got != expect {
            fails.push(format!("p={p}: char-p roots {got:?}, expected {expect:?}"));
        }
    }
    verdict(2, &fails);
}

#[test]
fn criterion_3_quadric() {
    let mut fails = Vec::new();
    for (n, p) in [(2usize, 3u64), (2, 5), (3, 5)] {
        let vars = &["x", "y", "z"][..n];
        let src: Vec<String> = vars.iter().map(|v| format!("{v}^2")).collect();
        let f = poly(&ring(p, vars), &src.join(" + "));
        for e in 1..=2u32 {
            let got = root_set(&f, e);
            let expect = BTreeSet::from([r(p.pow(e) - 1, e, p)]);
            if got != expect {
                fails.push(format!("n={n} p={p} e={e}: roots {got:?}"));
            }
        }
    }
    verdict(3, &fails);
}

#[test]
fn criterion_4_f_threshold() {
    let mut fails = Vec::new();
    for p in [5u64, 7] {
        let f = cusp(p);
        let m = Ideal::parse_list("x, y", f.ring()).unwrap();
        let c = if p % 3 == 1 {
            BigRational::new(5.into(), 6.into())
        } else {
            BigRational::new(5.into(), 6.into()) - BigRational::new(1.into(), BigInt::from(6 * p))
        };
        for e in 1..=3u32 {
            let scaled = &c * BigRational::from_integer(BigInt::from(p.pow(e)));
            let expect = scaled.ceil().to_integer() - 1;
            let got = nu(&f, &m, e).unwrap();
            if BigInt::from(got) != expect {
                fails.push(format!("p={p} e={e}: ν = {got}, expected {expect}"));
            }
        }
    }
    verdict(4, &fails);
}

#[test]
fn criterion_5_test_ideal_table() {
    let mut fails = Vec::new();
    for p in [5u64, 7] {
        let f = cusp(p);
        let rg = f.ring().clone();
        let c = if p % 3 == 1 {
            BigRational::new(5.into(), 6.into())
        } else {
            BigRational::new(5.into(), 6.into()) - BigRational::new(1.into(), BigInt::from(6 * p))
        };
        let unit = Ideal::unit(&rg);
        let maximal = Ideal::parse_list("x, y", &rg).unwrap();
        let principal = Ideal::principal(&f);
        let q = p * p;
        for m in 0..=q {
            let lambda = BigRational::new(BigInt::from(m), BigInt::from(q));
            let expect = if lambda < c {
                &unit
            } else if m < q {
                &maximal
            } else {
                &principal
            };
            let got = test_ideal(&f, &lambda, 2, 4).unwrap();
            if !got.stabilized || !got.ideal.equals(expect).unwrap() {
                fails.push(format!("p={p} λ={m}/{q}: τ = {}, expected {expect}", got.ideal));
            }
        }
    }
    verdict(5, &fails);
}

#[test]
fn criterion_6_operator_identities() {
    let mut fails = Vec::new();
    for p in [2u64, 3, 5, 7] {
        let rep = verify_rt_identities(p, 200).unwrap();
        println!("  {}: {} checks", rep.name, rep.checked);
        if !rep.pass {
            fails.push(rep.to_string());
        }
    }
    verdict(6, &fails);
}

#[test]
fn criterion_7_bf_structure() {
    let mut fails = Vec::new();
    for p in [2u64, 3, 5] {
        let fs = [cusp(p), poly(&ring(p, &["x"]), "x")];
        for f in &fs {
            for e in 1..=2u32 {
                let rep = verify_structure(f, e, 3).unwrap();
                println!("  {}: {} checks", rep.name, rep.checked);
                if !rep.pass {
                    fails.push(rep.to_string());
                }
            }
        }
    }
    for p in [2u64, 3, 5, 7, 11, 13] {
        let rep = verify_binomial_series(p).unwrap();
        if !rep.pass {
            fails.push(rep.to_string());
        }
    }
    verdict(7, &fails);
}

const CORPUS: &[(&[&str], &str)] = &[
    (&["x"], "x"),
    (&["x", "y"], "x^2 + y^3"),
    (&["x", "y"], "x^2 + y^2"),
    (&["x", "y"], "x*y"),
    (&["x", "y"], "x^3 + y^3"),
    (&["x", "y"], "x^2*y + y^3"),
    (&["x", "y"], "y^2 - x^3 - x^2"),
    (&["x", "y"], "x^2 + y^5"),
    (&["x", "y"], "x*y*(x + y)"),
    (&["x", "y", "z"], "x*y*z"),
    (&["x", "y", "z"], "x^2 + y^2 + z^2"),
    (&["x", "y", "z"], "x^2 + y^2*z"),
];

#[test]
fn criterion_8_main_theorem_corpus() {
    let mut fails = Vec::new();
    let mut runs = 0;
    for p in [2u64, 3, 5, 7] {
        for (vars, src) in CORPUS {
            let f = poly(&ring(p, vars), src);
            let rep = verify_main_theorem(&f, 1, 1).unwrap();
            runs += 1;
            if !rep.pass {
                fails.push(rep.to_string());
            }
        }
    }
    println!("  {runs} (f, p) pairs, corpus of {}", CORPUS.len());
    verdict(8, &fails);
}

#[test]
fn criterion_9_quasihomogeneous() {
    let mut fails = Vec::new();
    for p in [5u64, 7, 11, 13] {
        let rep = quasihomogeneous_check(&cusp(p), &[3, 2], 6).unwrap();
        if !rep.pass {
            fails.push(rep.to_string());
        }
    }
    for p in [3u64, 5, 7] {
        let q = poly(&ring(p, &["x", "y"]), "x^2 + y^2");
        let rep = quasihomogeneous_check(&q, &[1, 1], 2).unwrap();
        if !rep.pass {
            fails.push(rep.to_string());
        }
    }
    verdict(9, &fails);
}

fn random_poly(rng: &mut ChaCha8Rng, r: &Ring, max_terms: usize, max_deg: u64) -> MvPoly {
    let p = r.prime();
    let n = r.nvars();
    let terms = (0..rng.random_range(1..=max_terms)).map(|_| {
        let exps: Vec<u64> = (0..n).map(|_| rng.random_range(0..=max_deg)).collect();
        (Monomial::from_exps(&exps), rng.random_range(1..p))
    });
    MvPoly::from_terms(r, terms.collect::<Vec<_>>())
}

fn random_nonunit(rng: &mut ChaCha8Rng, r: &Ring, max_terms: usize, max_deg: u64) -> MvPoly {
    loop {
        let f = random_poly(rng, r, max_terms, max_deg);
        // vanishing at the origin keeps f a nonunit
        let f = &f - &MvPoly::constant(r, f.coeff(&Monomial::from_exps(&vec![0; r.nvars()])));
        if !f.is_zero() {
            return f;
        }
    }
}

#[test]
fn criterion_10_property_suites() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
    let mut fails = Vec::new();
    let mut cases = 0u32;
    let primes = [2u64, 3, 5, 7];

    // Gröbner bases: recomputing from the reduced basis is a fixed point
    for _ in 0..150 {
        let p = primes[rng.random_range(0..4)];
        let r = ring(p, &["x", "y", "z"]);
        let gens: Vec<MvPoly> = (0..rng.random_range(1..=3))
            .map(|_| random_poly(&mut rng, &r, 3, 3))
            .collect();
        let i = Ideal::new(&r, gens).unwrap();
        let gb = i.canonical().unwrap();
        let again = Ideal::new(&r, gb.clone()).unwrap().canonical().unwrap();
        if gb != again || !i.equals(&Ideal::new(&r, gb.clone()).unwrap()).unwrap() {
            fails.push(format!("GB idempotence on {i}"));
        }
        cases += 1;
    }

    // Frobenius root: adjunction and round trip
    for _ in 0..150 {
        let p = primes[rng.random_range(0..3)];
        let e = rng.random_range(1..=2u32);
        let r = ring(p, &["x", "y"]);
        let a = Ideal::new(&r, (0..2).map(|_| random_poly(&mut rng, &r, 3, 5))).unwrap();
        let j = Ideal::new(&r, (0..2).map(|_| random_poly(&mut rng, &r, 2, 2))).unwrap();
        let root = frobenius_root(&a, e).unwrap();
        let lhs = j.contains(&root).unwrap();
        let rhs = frobenius_power(&j, e).unwrap().contains(&a).unwrap();
        if lhs != rhs {
            fails.push(format!("adjunction p={p} e={e} a={a} J={j}"));
        }
        let back = frobenius_root(&frobenius_power(&j, e).unwrap(), e).unwrap();
        if !back.equals(&j).unwrap() {
            fails.push(format!("round trip p={p} e={e} J={j}"));
        }
        if !frobenius_power(&root, e).unwrap().contains(&a).unwrap() {
            fails.push(format!("a ⊄ (a^[1/q])^[q] p={p} e={e} a={a}"));
        }
        cases += 1;
    }

    // Lucas binomials against Pascal's triangle mod p
    for _ in 0..150 {
        let p = [2u64, 3, 5, 7, 11, 13][rng.random_range(0..6)];
        let field = PrimeField::new(p).unwrap();
        let n = rng.random_range(0..300u64);
        let mut row = vec![1u64];
        for _ in 0..n {
            let mut next = vec![1u64; row.len() + 1];
            for k in 1..row.len() {
                next[k] = (row[k - 1] + row[k]) % p;
            }
            row = next;
        }
        let k = rng.random_range(0..=n);
        if field.binom(n, k) != row[k as usize] {
            fails.push(format!("C({n}, {k}) mod {p}"));
        }
        cases += 1;
    }

    // p-adic chains decrease, and Γ^2 projects onto Γ^1
    for _ in 0..60 {
        let p = primes[rng.random_range(0..3)];
        let r = ring(p, &["x", "y"]);
        let f = random_nonunit(&mut rng, &r, 3, 3);
        let chain = padic_chain(&f, None, 2, Exec::Sequential).unwrap();
        for m in 0..chain.drops.len() {
            if !chain.ideals[m].contains(&chain.ideals[m + 1]).unwrap() {
                fails.push(format!("chain of {f} not decreasing at {m}"));
            }
        }
        let g1 = gamma_set(&f, 1).unwrap();
        let g2 = gamma_set(&f, 2).unwrap();
        if g2.drop_low(1) != g1.tuples || !g2.keep_low(1).is_subset(&g1.tuples) {
            fails.push(format!("Γ levels 1, 2 of {f} over F_{p}"));
        }
        let top = p_digits(p * p - 1, p, 2).unwrap();
        if !g2.contains(&top) {
            fails.push(format!("top tuple missing for {f}"));
        }
        cases += 1;
    }

    println!("  {cases} randomized cases");
    if cases < 500 {
        fails.push(format!("only {cases} cases"));
    }
    verdict(10, &fails);
}
