//! Prime-field scalars, Lucas binomials, p-adic digits and exact rationals
//! whose denominator is a power of the characteristic.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for &a in &SMALL {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The prime field F_p. Construction checks primality; every other
/// operation assumes canonical representatives in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Self { p })
        } else {
            Err(Error::NotPrime(p))
        }
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.p as u128) as u64
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    /// Inverse by Fermat; `a` must be nonzero.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(!a.is_multiple_of(self.p), "inverse of zero");
        self.pow(a, self.p - 2)
    }

    pub fn from_i64(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.p as i128) as u64
    }

    pub fn from_u64(&self, v: u64) -> u64 {
        v % self.p
    }

    pub fn from_biguint(&self, v: &BigUint) -> u64 {
        (v % self.p).to_u64().expect("residue fits in u64")
    }

    pub fn from_bigint(&self, v: &BigInt) -> u64 {
        let r = v.mod_floor(&BigInt::from(self.p));
        r.to_u64().expect("residue fits in u64")
    }

    pub fn scalar(&self, v: u64) -> FpScalar {
        FpScalar {
            value: v % self.p,
            prime: self.p,
        }
    }

    /// `C(a, b) mod p` for `a, b < p`, by the multiplicative formula.
    pub fn binom_digit(&self, a: u64, b: u64) -> u64 {
        if b > a {
            return 0;
        }
        let b = b.min(a - b);
        let mut num = 1u64;
        let mut den = 1u64;
        for k in 0..b {
            num = self.mul(num, a - k);
            den = self.mul(den, k + 1);
        }
        self.mul(num, self.inv(den))
    }

    /// `C(m, n) mod p` by Lucas' theorem.
    pub fn binom(&self, mut m: u64, mut n: u64) -> u64 {
        if n > m {
            return 0;
        }
        let mut acc = 1 % self.p;
        while n > 0 {
            let (a, b) = (m % self.p, n % self.p);
            if b > a {
                return 0;
            }
            acc = self.mul(acc, self.binom_digit(a, b));
            m /= self.p;
            n /= self.p;
        }
        acc
    }

    /// `a!` for `a < p` (never zero).
    pub fn factorial(&self, a: u64) -> u64 {
        (1..=a).fold(1 % self.p, |acc, k| self.mul(acc, k))
    }

    /// `p^e` if it fits in 64 bits.
    pub fn pow_checked(&self, e: u32) -> Option<u64> {
        self.p.checked_pow(e)
    }
}

/// An element of F_p carrying its prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpScalar {
    value: u64,
    prime: u64,
}

impl FpScalar {
    /// Reduces `value` mod `prime`; primality is the caller's concern.
    pub fn new(value: u64, prime: u64) -> Self {
        Self {
            value: value % prime,
            prime,
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn field(&self) -> PrimeField {
        PrimeField { p: self.prime }
    }

}

impl std::ops::Add for FpScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.prime, rhs.prime);
        self.field().scalar(self.field().add(self.value, rhs.value))
    }
}

impl std::ops::Mul for FpScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.prime, rhs.prime);
        self.field().scalar(self.field().mul(self.value, rhs.value))
    }
}

impl std::ops::Neg for FpScalar {
    type Output = Self;
    fn neg(self) -> Self {
        self.field().scalar(self.field().neg(self.value))
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// `C(m, n) mod p` for arbitrary-precision arguments, digit by digit.
pub fn lucas_binom(m: &BigUint, n: &BigUint, field: PrimeField) -> FpScalar {
    if n > m {
        return field.scalar(0);
    }
    let p = BigUint::from(field.p());
    let (mut m, mut n) = (m.clone(), n.clone());
    let mut acc = 1 % field.p();
    while !n.is_zero() {
        let (mq, mr) = m.div_rem(&p);
        let (nq, nr) = n.div_rem(&p);
        let (a, b) = (mr.to_u64().unwrap(), nr.to_u64().unwrap());
        if b > a {
            return field.scalar(0);
        }
        acc = field.mul(acc, field.binom_digit(a, b));
        m = mq;
        n = nq;
    }
    field.scalar(acc)
}

/// A tuple of base-p digits, each in `[0, p)`.
///
/// Tuples produced by [`p_digits`] are least-significant first, so
/// `(i_1, ..., i_e)` encodes `i_1 + i_2 p + ... + i_e p^(e-1)`. The ordering
/// compares that encoded value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigitTuple {
    digits: Vec<u64>,
    prime: u64,
}

impl DigitTuple {
    pub fn new(digits: Vec<u64>, prime: u64) -> Result<Self> {
        if let Some(d) = digits.iter().find(|&&d| d >= prime) {
            return Err(Error::Range(format!("digit {d} is not below {prime}")));
        }
        Ok(Self { digits, prime })
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn level(&self) -> usize {
        self.digits.len()
    }

    /// `sum_l d_l p^(l-1)`, or `None` on overflow.
    pub fn index(&self) -> Option<u64> {
        self.digits.iter().rev().try_fold(0u64, |acc, &d| {
            acc.checked_mul(self.prime)?.checked_add(d)
        })
    }

    pub fn index_big(&self) -> BigUint {
        self.digits
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &d| acc * self.prime + d)
    }

    /// Drops the first `k` (least significant) digits.
    pub fn drop_low(&self, k: usize) -> Self {
        Self {
            digits: self.digits[k.min(self.digits.len())..].to_vec(),
            prime: self.prime,
        }
    }

    /// Keeps the first `len` (least significant) digits.
    pub fn keep_low(&self, len: usize) -> Self {
        Self {
            digits: self.digits[..len.min(self.digits.len())].to_vec(),
            prime: self.prime,
        }
    }

    pub fn reversed(&self) -> Self {
        Self {
            digits: self.digits.iter().rev().copied().collect(),
            prime: self.prime,
        }
    }
}

impl Ord for DigitTuple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.prime
            .cmp(&other.prime)
            .then(self.digits.len().cmp(&other.digits.len()))
            .then_with(|| self.digits.iter().rev().cmp(other.digits.iter().rev()))
    }
}

impl PartialOrd for DigitTuple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DigitTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, d) in self.digits.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// Base-p digits of `m`, least significant first, padded to length `e`.
pub fn p_digits(m: u64, p: u64, e: usize) -> Result<DigitTuple> {
    let mut digits = Vec::with_capacity(e);
    let mut rest = m;
    for _ in 0..e {
        digits.push(rest % p);
        rest /= p;
    }
    if rest != 0 {
        return Err(Error::Range(format!("{m} is not below {p}^{e}")));
    }
    Ok(DigitTuple { digits, prime: p })
}

/// The digits `(c_1(λ), ..., c_e(λ))` of the non-terminating base-p
/// expansion of `λ ∈ (0, 1]`, most significant first.
pub fn c_digits(lambda: &BigRational, p: u64, e: usize) -> Result<DigitTuple> {
    if !lambda.is_positive() || *lambda > BigRational::one() {
        return Err(Error::domain(format!("lambda = {lambda} is not in (0, 1]")));
    }
    let pr = BigRational::from_integer(BigInt::from(p));
    let mut cur = lambda.clone();
    let mut digits = Vec::with_capacity(e);
    for _ in 0..e {
        let scaled = &cur * &pr;
        let c: BigInt = scaled.ceil().to_integer() - 1;
        cur = scaled - BigRational::from_integer(c.clone());
        digits.push(c.to_u64().expect("digit below p"));
    }
    Ok(DigitTuple { digits, prime: p })
}

/// `⌈λ p^e⌉` for a nonnegative rational.
pub fn ceil_scaled(lambda: &BigRational, p: u64, e: u32) -> BigUint {
    let scaled = lambda * BigRational::from_integer(BigInt::from(p).pow(e));
    scaled
        .ceil()
        .to_integer()
        .to_biguint()
        .expect("nonnegative lambda")
}

/// An exact rational `num / p^exp` kept in canonical form
/// (`exp == 0` or `p ∤ num`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PPowRational {
    num: BigInt,
    exp: u32,
    prime: u64,
}

impl PPowRational {
    pub fn new(num: impl Into<BigInt>, exp: u32, prime: u64) -> Self {
        let mut num = num.into();
        let mut exp = exp;
        let p = BigInt::from(prime);
        while exp > 0 && !num.is_zero() && (&num % &p).is_zero() {
            num /= &p;
            exp -= 1;
        }
        if num.is_zero() {
            exp = 0;
        }
        Self { num, exp, prime }
    }

    /// `Σ_l d_l p^(l-1) / p^e` for a least-significant-first digit tuple.
    pub fn from_digits(t: &DigitTuple) -> Self {
        Self::new(BigInt::from(t.index_big()), t.level() as u32, t.prime())
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn den_exp(&self) -> u32 {
        self.exp
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn denom(&self) -> BigUint {
        BigUint::from(self.prime).pow(self.exp)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), BigInt::from(self.denom()))
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    /// Parses `num`, `num/den` with `den` a power of `prime`.
    pub fn parse(src: &str, prime: u64) -> Result<Self> {
        let src = src.trim();
        let (n, d) = match src.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (src, "1"),
        };
        let num: BigInt = n
            .parse()
            .map_err(|_| Error::domain(format!("bad numerator `{n}`")))?;
        let mut den: BigUint = d
            .parse()
            .map_err(|_| Error::domain(format!("bad denominator `{d}`")))?;
        let mut exp = 0;
        while den > BigUint::one() && (&den % prime).is_zero() {
            den /= prime;
            exp += 1;
        }
        if !den.is_one() {
            return Err(Error::domain(format!("denominator `{d}` is not a power of {prime}")));
        }
        Ok(Self::new(num, exp, prime))
    }
}

impl Ord for PPowRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = &self.num * BigInt::from(other.denom());
        let rhs = &other.num * BigInt::from(self.denom());
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for PPowRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PPowRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.denom())
        }
    }
}
