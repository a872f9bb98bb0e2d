//! Verification sweeps for the Q-basis, the eigenspace decomposition and the
//! level-e data of `M_f^e`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::qbasis::{
    delta_decomposition, eigen_decompose_with, q_coordinates, q_element, reconstruct, QIndex,
};
use super::{act_dt, act_t_power, act_theta, act_theta_general, frobenius, BfContext, BfElement, DrOp};
use crate::arith::{p_digits, DigitTuple, PrimeField};
use crate::error::{Error, Result};
use crate::frobenius::frobenius_power;
use crate::ideals::Ideal;
use crate::par::Exec;
use crate::poly::MvPoly;
use crate::report::Report;
use crate::singular::{gamma_set_with, padic_chain};

fn level_q(p: u64, e: u32) -> Result<u64> {
    p.checked_pow(e).ok_or(Error::ExponentOverflow)
}

fn all_tuples(p: u64, e: u32) -> Result<Vec<DigitTuple>> {
    (0..level_q(p, e)?).map(|n| p_digits(n, p, e as usize)).collect()
}

fn with_digits(d: &DigitTuple, digits: Vec<u64>) -> Result<DigitTuple> {
    DigitTuple::new(digits, d.prime())
}

fn grid<T: Send>(
    name: &str,
    items: Vec<T>,
    exec: Exec,
    body: impl Fn(T, &mut Report) -> Result<()> + Sync + Send,
) -> Result<Report> {
    let parts = exec.map(items, |x| -> Result<Report> {
        let mut r = Report::new(name);
        body(x, &mut r)?;
        Ok(r)
    });
    let mut rep = Report::new(name);
    for r in parts {
        rep.absorb(r?);
    }
    Ok(rep)
}

/// True when `(θ_(p^k) + d_k) w = 0` for every digit `d_k` of `digits`.
fn in_component(w: &BfElement, digits: &[u64]) -> Result<bool> {
    for (k, &d) in digits.iter().enumerate() {
        if !act_theta(w, k as u32)?.add(&w.scale(d)).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Target of `t^(p^k)` on the component `digits`: borrow from the first
/// nonzero digit at or above `k`, or wrap to all `p - 1` with `wrapped`.
fn t_shift_target(digits: &[u64], k: usize, p: u64) -> (Vec<u64>, bool) {
    let mut out = digits.to_vec();
    for l in k..digits.len() {
        if digits[l] != 0 {
            out[l] -= 1;
            return (out, false);
        }
        out[l] = p - 1;
    }
    (out, true)
}

/// Fixed test elements spread over a few blocks of length `p^e`.
fn samples(ctx: &Arc<BfContext>, e: u32) -> Result<Vec<BfElement>> {
    let q = level_q(ctx.prime(), e)?;
    let field = ctx.field();
    let ring = ctx.ring();
    let x = MvPoly::var(ring, 0);
    let one = MvPoly::one(ring);
    let f = ctx.f();
    let mixed = BfElement::from_coeffs(
        ctx,
        (0..2 * q).map(|n| (n, x.pow(n % 3).unwrap().scalar_mul(field.from_u64(n + 1)))),
    );
    Ok(vec![
        BfElement::delta(ctx, 0),
        BfElement::term(ctx, 1, x.clone()).add(&BfElement::delta(ctx, q)),
        BfElement::term(ctx, q - 1, f + &one)
            .add(&BfElement::term(ctx, 2 * q + 1, x.pow(2)?))
            .sub(&BfElement::delta(ctx, q + 2)),
        mixed,
    ])
}

/// The action table of `∂_t^[p^(l-1)]` and `t^(p^(l-1))` on `Q^m_i`, the
/// eigenvalues of `θ_(p^(l-1))`, `R Q^m_i ≅ R` as `D_R^e`-modules, and the
/// component shifts of `∂_t^[p^(l-1)]`, `t^(p^(l-1))` on eigencomponents.
pub fn verify_basis_actions(ctx: &Arc<BfContext>, e: u32, m_bound: u64) -> Result<Report> {
    verify_basis_actions_with(ctx, e, m_bound, Exec::default())
}

fn verify_basis_actions_with(ctx: &Arc<BfContext>, e: u32, m_bound: u64, exec: Exec) -> Result<Report> {
    if e == 0 {
        return Err(Error::Range("level must be at least 1".into()));
    }
    let p = ctx.prime();
    let field = ctx.field();
    let q = level_q(p, e)?;
    let f_q = ctx.f().frobenius_pow(e)?;
    let mut all = Report::new(format!("basis actions f={} p={p} e={e} m<={m_bound}", ctx.f()));

    let points: Vec<(DigitTuple, u64)> = all_tuples(p, e)?
        .into_iter()
        .flat_map(|d| (0..=m_bound).map(move |m| (d.clone(), m)))
        .collect();

    all.absorb(grid("∂_t and t on Q", points.clone(), exec, |(d, m), r| {
        let idx = QIndex::new(d.clone(), m);
        let qe = q_element(ctx, &idx)?;
        let digits = d.digits();
        for k in 0..e as usize {
            let lhs = act_dt(&qe, k as u32)?;
            let rhs = if digits[k] == p - 1 {
                BfElement::zero(ctx)
            } else {
                let mut up = digits.to_vec();
                up[k] += 1;
                let target = q_element(ctx, &QIndex::new(with_digits(&d, up)?, m))?;
                target.scale(field.neg(field.from_u64(digits[k] + 1)))
            };
            r.check(lhs == rhs, || format!("∂_t^[p^{k}] {idx}"));

            let lhs = act_t_power(&qe, k as u32)?;
            let (target, wrapped) = t_shift_target(digits, k, p);
            let target = with_digits(&d, target)?;
            let base = q_element(ctx, &QIndex::new(target.clone(), m))?;
            let rhs = if wrapped {
                let lower = if m > 0 {
                    q_element(ctx, &QIndex::new(target, m - 1))?
                } else {
                    BfElement::zero(ctx)
                };
                base.mul_poly(&f_q).sub(&lower)
            } else {
                base
            };
            r.check(lhs == rhs, || format!("t^(p^{k}) {idx}"));

            let theta = act_theta(&qe, k as u32)?;
            r.check(theta == qe.scale(field.neg(digits[k])), || {
                format!("θ_(p^{k}) eigenvalue on {idx}")
            });
        }
        Ok(())
    })?);

    // R Q^m_i is a D_R^e-submodule isomorphic to R
    let ring = ctx.ring();
    let x = MvPoly::var(ring, 0);
    let coeffs = vec![MvPoly::one(ring), &x + &MvPoly::one(ring), ctx.f().clone()];
    let mut ops = vec![DrOp::Mul(&x * &x + MvPoly::one(ring))];
    for var in 0..ring.nvars() {
        for j in [1, p - 1, q - 1] {
            ops.push(DrOp::Hasse { var, j });
        }
    }
    ops.dedup();
    all.absorb(grid("D_R^e on R Q", points, exec, |(d, m), r| {
        let idx = QIndex::new(d, m);
        let qe = q_element(ctx, &idx)?;
        for a in &coeffs {
            for op in &ops {
                let lhs = op.apply(&qe.mul_poly(a), e)?;
                let rhs = qe.mul_poly(&op.apply_poly(a)?);
                r.check(lhs == rhs, || format!("{op:?} on ({a}) {idx}"));
            }
        }
        Ok(())
    })?);

    // component shifts on eigencomponents of the sample elements
    let mut comps = Vec::new();
    for w in samples(ctx, e)? {
        comps.extend(eigen_decompose_with(&w, e, exec)?);
    }
    all.absorb(grid("component shifts", comps, exec, |(d, c), r| {
        let digits = d.digits();
        for k in 0..e as usize {
            let mut up = digits.to_vec();
            up[k] = (up[k] + 1) % p;
            let img = act_dt(&c, k as u32)?;
            r.check(in_component(&img, &up)?, || format!("∂_t^[p^{k}] of component {d}"));
            let (target, _) = t_shift_target(digits, k, p);
            let img = act_t_power(&c, k as u32)?;
            r.check(in_component(&img, &target)?, || format!("t^(p^{k}) of component {d}"));
        }
        Ok(())
    })?);
    Ok(all)
}

/// `Q^0_i = Σ_j (-1)^j C(p-1, j) f^(j p^e) Q^0_(i,j)` for every level-e tuple.
pub fn verify_level_transformation(ctx: &Arc<BfContext>, e: u32) -> Result<Report> {
    if e == 0 {
        return Err(Error::Range("level must be at least 1".into()));
    }
    let p = ctx.prime();
    let field = ctx.field();
    let f_q = ctx.f().frobenius_pow(e)?;
    let name = format!("level change f={} p={p} e={e}", ctx.f());
    grid(&name, all_tuples(p, e)?, Exec::default(), |d, r| {
        let lhs = q_element(ctx, &QIndex::new(d.clone(), 0))?;
        let mut rhs = BfElement::zero(ctx);
        let mut fpow = MvPoly::one(ctx.ring());
        for j in 0..p {
            let mut c = field.binom(p - 1, j);
            if j % 2 == 1 {
                c = field.neg(c);
            }
            let mut ext = d.digits().to_vec();
            ext.push(j);
            let qe = q_element(ctx, &QIndex::new(with_digits(&d, ext)?, 0))?;
            rhs = rhs.add(&qe.mul_poly(&fpow.scalar_mul(c)));
            fpow = fpow.checked_mul(&f_q)?;
        }
        r.check(lhs == rhs, || format!("Q^0{d}"));
        Ok(())
    })
}

/// The Frobenius sends the level-e component `i` into the level-(e+1)
/// component `(p-1, i)`.
pub fn verify_frobenius_structure(ctx: &Arc<BfContext>, e: u32) -> Result<Report> {
    if e == 0 {
        return Err(Error::Range("level must be at least 1".into()));
    }
    let p = ctx.prime();
    let exec = Exec::default();
    let mut comps = Vec::new();
    for w in samples(ctx, e)? {
        comps.extend(eigen_decompose_with(&w, e, exec)?);
    }
    for t in all_tuples(p, e)? {
        let qe = q_element(ctx, &QIndex::new(t.clone(), 1))?;
        comps.push((t, qe));
    }
    let name = format!("Frobenius structure f={} p={p} e={e}", ctx.f());
    grid(&name, comps, exec, |(d, c), r| {
        let img = frobenius(&c)?;
        let mut target = vec![p - 1];
        target.extend_from_slice(d.digits());
        r.check(in_component(&img, &target)?, || format!("F of component {d}"));
        Ok(())
    })
}

/// `Σ_(j <= p-i-1) C(i+j, i) x^j = (1-x)^(p-i-1)` in F_p[x] for `0 <= i < p`.
pub fn verify_binomial_series(p: u64) -> Result<Report> {
    let field = PrimeField::new(p)?;
    let mut rep = Report::new(format!("binomial series p={p}"));
    for i in 0..p {
        let n = p - i - 1;
        let lhs: Vec<u64> = (0..=n).map(|j| field.binom(i + j, i)).collect();
        let mut rhs = vec![1u64];
        for _ in 0..n {
            let mut next = rhs.clone();
            next.push(0);
            for (j, c) in rhs.iter().enumerate() {
                next[j + 1] = field.sub(next[j + 1], *c);
            }
            rhs = next;
        }
        rep.check(lhs == rhs, || format!("i={i}: {lhs:?} vs {rhs:?}"));
    }
    Ok(rep)
}

/// Sum, annihilation, idempotence, level compatibility and agreement with
/// the Q-coordinates for the decomposition of `w`.
fn check_decomposition(w: &BfElement, e: u32, exec: Exec, r: &mut Report) -> Result<()> {
    let ctx = w.context();
    let parts = eigen_decompose_with(w, e, exec)?;
    let total = parts.values().fold(BfElement::zero(ctx), |acc, c| acc.add(c));
    r.check(&total == w, || format!("components of {w} do not sum back"));
    for (d, c) in &parts {
        r.check(in_component(c, d.digits())?, || format!("component {d} of {w} not an eigenvector"));
        let again = eigen_decompose_with(c, e, exec)?;
        r.check(again.len() == 1 && again.get(d) == Some(c), || {
            format!("decomposing component {d} of {w} is not idempotent")
        });
    }
    let coords = q_coordinates(w, e)?;
    let mut via_q: BTreeMap<DigitTuple, BfElement> = BTreeMap::new();
    for (idx, a) in &coords {
        let entry = via_q.entry(idx.digits.clone()).or_insert_with(|| BfElement::zero(ctx));
        *entry = entry.add(&q_element(ctx, idx)?.mul_poly(a));
    }
    via_q.retain(|_, c| !c.is_zero());
    r.check(via_q == parts, || format!("projectors and Q-coordinates disagree on {w}"));
    if e >= 2 {
        let coarse = eigen_decompose_with(w, e - 1, exec)?;
        let mut summed: BTreeMap<DigitTuple, BfElement> = BTreeMap::new();
        for (d, c) in &parts {
            let key = d.keep_low(e as usize - 1);
            let entry = summed.entry(key).or_insert_with(|| BfElement::zero(ctx));
            *entry = entry.add(c);
        }
        summed.retain(|_, c| !c.is_zero());
        r.check(summed == coarse, || format!("levels {e} and {} incompatible on {w}", e - 1));
    }
    Ok(())
}

/// Everything checkable about `B_f` at level `e` for `Q^m` with `m <= m_bound`.
pub fn verify_structure(f: &MvPoly, e: u32, m_bound: u64) -> Result<Report> {
    if e == 0 {
        return Err(Error::Range("level must be at least 1".into()));
    }
    let exec = Exec::default();
    let ctx = BfContext::new(f)?;
    let p = ctx.prime();
    let field = ctx.field();
    let q = level_q(p, e)?;
    let mut all = Report::new(format!("B_f structure f={f} p={p} e={e} m<={m_bound}"));

    all.merge(verify_basis_actions_with(&ctx, e, m_bound, exec)?);
    all.merge(verify_level_transformation(&ctx, e)?);
    all.merge(verify_frobenius_structure(&ctx, e)?);
    all.merge(verify_binomial_series(p)?);

    let mut rep = Report::new("decomposition of δ");
    let delta = BfElement::delta(&ctx, 0);
    let expected = delta_decomposition(&ctx, e)?;
    let sum = expected.values().fold(BfElement::zero(&ctx), |acc, c| acc.add(c));
    rep.check(sum == delta, || "expansion does not sum to δ".into());
    rep.check(eigen_decompose_with(&delta, e, exec)? == expected, || {
        "projectors disagree with the expansion of δ".into()
    });
    all.merge(rep);

    let mut elems = samples(&ctx, e)?;
    for t in all_tuples(p, e)?.into_iter().step_by(((q / 8) as usize).max(1)) {
        elems.push(q_element(&ctx, &QIndex::new(t, m_bound))?);
    }
    all.merge(grid("eigendecomposition", elems.clone(), exec, |w, r| {
        check_decomposition(&w, e, exec, r)
    })?);

    // θ_m acts on component i by Π_l (-1)^(b_l) C(i_l, b_l), m = Σ b_l p^(l-1)
    let mut comps = Vec::new();
    for w in &elems {
        comps.extend(eigen_decompose_with(w, e, exec)?);
    }
    all.merge(grid("θ_m scalars", comps, exec, |(d, c), r| {
        for m in 1..q {
            let b = p_digits(m, p, e as usize)?;
            let scalar = d.digits().iter().zip(b.digits()).fold(1, |acc, (&i, &bl)| {
                let c = field.binom(i, bl);
                field.mul(acc, if bl % 2 == 1 { field.neg(c) } else { c })
            });
            r.check(act_theta_general(&c, m)? == c.scale(scalar), || format!("θ_{m} on {d}"));
        }
        Ok(())
    })?);

    all.merge(grid("Q-coordinates", elems, exec, |w, r| {
        let coords = q_coordinates(&w, e)?;
        let back = reconstruct(w.context(), &coords)?;
        r.check(back == w, || format!("reconstruct ∘ coordinates on {w}"));
        r.check(q_coordinates(&back, e)? == coords, || format!("coordinates ∘ reconstruct on {w}"));
        Ok(())
    })?);
    Ok(all)
}

/// One summand `(D_R^e • f^m) Q^0_i` of `M_f^e` and the next ideal in the chain.
#[derive(Clone, Debug)]
pub struct ComponentIdeal {
    /// `D_R^e • f^m = (τ(f^(m/p^e)))^[p^e]`, `m = Σ i_l p^(l-1)`.
    pub ideal: Ideal,
    /// `D_R^e • f^(m+1)`.
    pub next: Ideal,
    /// Whether the quotient `ideal / next` is nonzero.
    pub nonvanishing: bool,
}

pub fn mfe_component_ideals(f: &MvPoly, e: u32) -> Result<BTreeMap<DigitTuple, ComponentIdeal>> {
    let exec = Exec::default();
    let p = f.ring().prime();
    let gamma = gamma_set_with(f, e, exec)?;
    let chain = padic_chain(f, None, e, exec)?;
    let powered = exec.map(chain.ideals, |i| frobenius_power(&i, e));
    let powered = powered.into_iter().collect::<Result<Vec<_>>>()?;
    let mut out = BTreeMap::new();
    for (m, pair) in powered.windows(2).enumerate() {
        let nonvanishing = !pair[1].contains(&pair[0])?;
        let d = p_digits(m as u64, p, e as usize)?;
        if nonvanishing != gamma.contains(&d) {
            return Err(Error::Invariant(format!(
                "component {d}: quotient nonvanishing = {nonvanishing} but Γ says otherwise"
            )));
        }
        out.insert(
            d,
            ComponentIdeal {
                ideal: pair[0].clone(),
                next: pair[1].clone(),
                nonvanishing,
            },
        );
    }
    Ok(out)
}
