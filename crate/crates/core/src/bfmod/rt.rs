//! Operator identities on the one-variable ring F_p[t], checked pointwise on
//! monomials with `t^q • t^n = t^(n+q)` and `∂^[q] • t^n = C(n, q) t^(n-q)`.

use crate::arith::PrimeField;
use crate::error::Result;
use crate::par::Exec;
use crate::report::Report;

/// Sparse element of F_p[t], ascending exponents, no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
struct TPoly(Vec<(u64, u64)>);

impl TPoly {
    fn mono(n: u64) -> Self {
        TPoly(vec![(n, 1)])
    }

    fn zero() -> Self {
        TPoly(Vec::new())
    }
}

#[derive(Clone, Copy)]
struct Ops {
    f: PrimeField,
}

impl Ops {
    fn t(&self, q: u64, v: &TPoly) -> TPoly {
        TPoly(v.0.iter().map(|&(n, c)| (n + q, c)).collect())
    }

    fn dt(&self, q: u64, v: &TPoly) -> TPoly {
        TPoly(
            v.0.iter()
                .filter(|(n, _)| *n >= q)
                .map(|&(n, c)| (n - q, self.f.mul(c, self.f.binom(n, q))))
                .filter(|(_, c)| *c != 0)
                .collect(),
        )
    }

    fn theta(&self, m: u64, v: &TPoly) -> TPoly {
        if m == 0 {
            return v.clone();
        }
        self.dt(m, &self.t(m, v))
    }

    fn scale(&self, k: u64, v: &TPoly) -> TPoly {
        let k = self.f.from_u64(k);
        TPoly(
            v.0.iter()
                .map(|&(n, c)| (n, self.f.mul(c, k)))
                .filter(|(_, c)| *c != 0)
                .collect(),
        )
    }

    fn add(&self, a: &TPoly, b: &TPoly) -> TPoly {
        let mut out = Vec::with_capacity(a.0.len() + b.0.len());
        let (mut i, mut j) = (0, 0);
        while i < a.0.len() || j < b.0.len() {
            let take_a = j == b.0.len() || (i < a.0.len() && a.0[i].0 < b.0[j].0);
            let take_b = i == a.0.len() || (j < b.0.len() && b.0[j].0 < a.0[i].0);
            if take_a {
                out.push(a.0[i]);
                i += 1;
            } else if take_b {
                out.push(b.0[j]);
                j += 1;
            } else {
                let c = self.f.add(a.0[i].1, b.0[j].1);
                if c != 0 {
                    out.push((a.0[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        TPoly(out)
    }

    fn sub(&self, a: &TPoly, b: &TPoly) -> TPoly {
        self.add(a, &self.scale(self.f.p() - 1, b))
    }

    /// `(θ_q + j) v`.
    fn theta_shift(&self, q: u64, j: u64, v: &TPoly) -> TPoly {
        self.add(&self.theta(q, v), &self.scale(j, v))
    }
}

fn powers_upto(p: u64, n: u64) -> Vec<(u32, u64)> {
    let mut out = Vec::new();
    let (mut k, mut q) = (0u32, 1u64);
    while q <= n {
        out.push((k, q));
        k += 1;
        q *= p;
    }
    out
}

/// Runs `body(param, report)` for every parameter on the executor and merges.
fn sweep<T: Send>(
    name: &str,
    params: Vec<T>,
    exec: Exec,
    body: impl Fn(T, &mut Report) + Sync + Send,
) -> Report {
    let parts = exec.map(params, |x| {
        let mut r = Report::new(name);
        body(x, &mut r);
        r
    });
    let mut rep = Report::new(name);
    for r in parts {
        rep.absorb(r);
    }
    rep
}

/// Checks the commutation, composition and factorization rules of the
/// divided-power operators and the Euler operators `θ_m = ∂^[m] t^m` on
/// every `t^n`, `n <= bound`, with operator orders up to `bound`.
pub fn verify_rt_identities(p: u64, bound: u64) -> Result<Report> {
    verify_rt_identities_with(p, bound, Exec::default())
}

pub fn verify_rt_identities_with(p: u64, bound: u64, exec: Exec) -> Result<Report> {
    let f = PrimeField::new(p)?;
    let o = Ops { f };
    let ns: Vec<u64> = (0..=bound).collect();
    let pows = powers_upto(p, bound);
    let mut all = Report::new(format!("F_{p}[t] identities, n <= {bound}"));

    // i) [t, θ_m] = -θ_(m-1) t
    all.merge(sweep("[t, θ_m] = -θ_(m-1) t", (1..=bound).collect(), exec, |m, r| {
        for &n in &ns {
            let x = TPoly::mono(n);
            let lhs = o.sub(&o.t(1, &o.theta(m, &x)), &o.theta(m, &o.t(1, &x)));
            let rhs = o.scale(p - 1, &o.theta(m - 1, &o.t(1, &x)));
            r.check(lhs == rhs, || format!("m={m} n={n}"));
        }
    }));

    // ii) [∂^[q], t^q] = 1
    all.merge(sweep("[∂^[q], t^q] = 1", pows.clone(), exec, |(k, q), r| {
        for &n in &ns {
            let x = TPoly::mono(n);
            let lhs = o.sub(&o.dt(q, &o.t(q, &x)), &o.t(q, &o.dt(q, &x)));
            r.check(lhs == x, || format!("q=p^{k} n={n}"));
        }
    }));

    // iii) (∂^[q])^r (t^q)^r = Π_(j<r) (θ_q + j)
    let params: Vec<(u32, u64, u64)> = pows
        .iter()
        .flat_map(|&(k, q)| (1..=p).filter(move |r| r * q <= bound).map(move |r| (k, q, r)))
        .collect();
    all.merge(sweep("(∂^[q])^r (t^q)^r = Π (θ_q + j)", params, exec, |(k, q, rr), r| {
        for &n in &ns {
            let x = TPoly::mono(n);
            let mut lhs = x.clone();
            for _ in 0..rr {
                lhs = o.t(q, &lhs);
            }
            for _ in 0..rr {
                lhs = o.dt(q, &lhs);
            }
            let mut rhs = x.clone();
            for j in 0..rr {
                rhs = o.theta_shift(q, j, &rhs);
            }
            r.check(lhs == rhs, || format!("q=p^{k} r={rr} n={n}"));
        }
    }));

    // iv) (sr)!/(s!)^r ∂^[sr] = (∂^[s])^r, with (sr)!/(s!)^r = Π_k C(ks, s)
    let params: Vec<(u64, u64)> = (1..=bound)
        .flat_map(|s| (1..=bound / s).map(move |r| (s, r)))
        .collect();
    all.merge(sweep("(sr)!/(s!)^r ∂^[sr] = (∂^[s])^r", params, exec, |(s, rr), r| {
        let coef = (1..=rr).fold(1, |acc, k| f.mul(acc, f.binom(k * s, s)));
        for &n in &ns {
            let x = TPoly::mono(n);
            let lhs = o.scale(coef, &o.dt(s * rr, &x));
            let mut rhs = x;
            for _ in 0..rr {
                rhs = o.dt(s, &rhs);
            }
            r.check(lhs == rhs, || format!("s={s} r={rr} n={n}"));
        }
    }));

    // v) C(i+j, i) ∂^[i+j] = ∂^[i] ∂^[j]
    all.merge(sweep("C(i+j,i) ∂^[i+j] = ∂^[i] ∂^[j]", (0..=bound).collect(), exec, |i, r| {
        for j in 0..=bound - i {
            let c = f.binom(i + j, i);
            for &n in &ns {
                let x = TPoly::mono(n);
                let lhs = o.scale(c, &o.dt(i + j, &x));
                let rhs = o.dt(i, &o.dt(j, &x));
                r.check(lhs == rhs, || format!("i={i} j={j} n={n}"));
            }
        }
    }));

    // vi) [θ_i, θ_j] = 0
    all.merge(sweep("[θ_i, θ_j] = 0", (0..=bound).collect(), exec, |i, r| {
        for j in 0..=bound {
            for &n in &ns {
                let x = TPoly::mono(n);
                let lhs = o.sub(&o.theta(i, &o.theta(j, &x)), &o.theta(j, &o.theta(i, &x)));
                r.check(lhs == TPoly::zero(), || format!("i={i} j={j} n={n}"));
            }
        }
    }));

    // vii) θ_m = Π_i 1/a_i! Π_(j<a_i) (θ_(p^i) + j)
    all.merge(sweep("θ_m digit factorization", (1..=bound).collect(), exec, |m, r| {
        for &n in &ns {
            let x = TPoly::mono(n);
            let mut rhs = x.clone();
            let (mut rest, mut q) = (m, 1u64);
            while rest > 0 {
                let a = rest % p;
                for j in 0..a {
                    rhs = o.theta_shift(q, j, &rhs);
                }
                rhs = o.scale(f.inv(f.factorial(a)), &rhs);
                rest /= p;
                q *= p;
            }
            r.check(o.theta(m, &x) == rhs, || format!("m={m} n={n}"));
        }
    }));

    // viii) [∂^[p^i], θ_(p^j)] = ∂^[p^i] if i = j, else 0
    let params: Vec<((u32, u64), (u32, u64))> = pows
        .iter()
        .flat_map(|&a| pows.iter().map(move |&b| (a, b)))
        .collect();
    all.merge(sweep("[∂^[p^i], θ_(p^j)]", params, exec, |((i, qi), (j, qj)), r| {
        for &n in &ns {
            let x = TPoly::mono(n);
            let lhs = o.sub(&o.dt(qi, &o.theta(qj, &x)), &o.theta(qj, &o.dt(qi, &x)));
            let rhs = if i == j { o.dt(qi, &x) } else { TPoly::zero() };
            r.check(lhs == rhs, || format!("i={i} j={j} n={n}"));
        }
    }));

    // θ_(p^k) t^n = (d_k + 1) t^n, d_k the coefficient of p^k in n
    all.merge(sweep("θ_(p^k) t^n = (d_k + 1) t^n", pows.clone(), exec, |(k, q), r| {
        for &n in &ns {
            let x = TPoly::mono(n);
            let d = (n / q) % p;
            r.check(o.theta(q, &x) == o.scale(d + 1, &x), || format!("k={k} n={n}"));
        }
    }));

    // Π_(j<p) (θ_q + j) = 0
    all.merge(sweep("Π_(j<p) (θ_q + j) = 0", pows, exec, |(k, q), r| {
        for &n in &ns {
            let mut v = TPoly::mono(n);
            for j in 0..p {
                v = o.theta_shift(q, j, &v);
            }
            r.check(v == TPoly::zero(), || format!("q=p^{k} n={n}"));
        }
    }));

    Ok(all)
}
