//! Exact evaluation of the conjectural distributions for 2-ranks of narrow
//! class groups, unit signature ranks and splitting, for fields of odd degree
//! `n = r1 + 2 r2`.
//!
//! Finite expressions are exact `BigRational`s. Anything involving the
//! infinite products `(2)_∞`, `(4)_∞` or an infinite sum over `ρ` is a
//! [`TruncatedReal`]: an exact rational together with a rigorous bound on its
//! distance from the true value.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::f2linalg::{enumerate_subspaces, BitVector, Subspace};

/// Default number of factors kept from an infinite product.
pub const DEFAULT_TERMS: usize = 64;
/// Values are rounded to multiples of `2^-ROUND_BITS` to keep denominators small.
const ROUND_BITS: usize = 320;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `2^e` for a possibly negative exponent.
pub fn pow2(e: i64) -> BigRational {
    let p = BigInt::one() << e.unsigned_abs() as usize;
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// `q^e` for a rational `q` and possibly negative exponent.
pub fn qpow(q: &BigRational, e: i64) -> BigRational {
    let p = num_traits::pow(q.clone(), e.unsigned_abs() as usize);
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

/// `(q)_m = prod_{i=1}^m (1 - q^-i)`.
pub fn pochhammer(q: &BigRational, m: usize) -> BigRational {
    let mut acc = BigRational::one();
    let inv = q.recip();
    let mut t = BigRational::one();
    for _ in 0..m {
        t *= &inv;
        acc *= BigRational::one() - &t;
    }
    acc
}

const CACHE: usize = 256;

fn cached(q: u64) -> &'static [BigRational] {
    static TWO: OnceLock<Vec<BigRational>> = OnceLock::new();
    static FOUR: OnceLock<Vec<BigRational>> = OnceLock::new();
    let build = move || {
        let qr = rat(q as i64);
        let mut v = Vec::with_capacity(CACHE);
        let mut acc = BigRational::one();
        v.push(acc.clone());
        for i in 1..CACHE {
            acc *= BigRational::one() - qpow(&qr, -(i as i64));
            v.push(acc.clone());
        }
        v
    };
    match q {
        2 => TWO.get_or_init(build),
        4 => FOUR.get_or_init(build),
        _ => unreachable!(),
    }
}

/// `(q)_m` for an integer `q >= 2`; `q = 2, 4` are cached.
pub fn pochhammer_int(q: u64, m: usize) -> BigRational {
    if (q == 2 || q == 4) && m < CACHE {
        cached(q)[m].clone()
    } else {
        pochhammer(&rat(q as i64), m)
    }
}

fn p2(m: usize) -> BigRational {
    pochhammer_int(2, m)
}

fn p4(m: usize) -> BigRational {
    pochhammer_int(4, m)
}

/// A real number known to lie in `[value - err, value + err]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedReal {
    pub value: BigRational,
    pub err: BigRational,
}

impl TruncatedReal {
    pub fn exact(value: BigRational) -> Self {
        TruncatedReal { value, err: BigRational::zero() }
    }

    /// Rounds the value to a dyadic rational, folding the rounding into `err`.
    fn rounded(mut self) -> Self {
        let scale = BigInt::one() << ROUND_BITS;
        let scaled = (&self.value * BigRational::from_integer(scale.clone())).floor().to_integer();
        let r = BigRational::new(scaled, scale);
        let diff = (&self.value - &r).abs();
        if !diff.is_zero() {
            self.err += diff;
            self.value = r;
        }
        self
    }

    pub fn add(&self, other: &TruncatedReal) -> TruncatedReal {
        TruncatedReal { value: &self.value + &other.value, err: &self.err + &other.err }
    }

    pub fn mul(&self, other: &TruncatedReal) -> TruncatedReal {
        let err = self.value.abs() * &other.err + other.value.abs() * &self.err + &self.err * &other.err;
        TruncatedReal { value: &self.value * &other.value, err }.rounded()
    }

    pub fn scale(&self, c: &BigRational) -> TruncatedReal {
        TruncatedReal { value: &self.value * c, err: &self.err * c.abs() }
    }

    /// Quotient; requires the divisor interval to exclude zero.
    pub fn div(&self, other: &TruncatedReal) -> Result<TruncatedReal> {
        let b = other.value.abs();
        if b <= other.err {
            return Err(Error::InvalidArgument("division by an interval containing zero".into()));
        }
        let err = (self.value.abs() * &other.err + &b * &self.err) / (&b * (&b - &other.err));
        Ok(TruncatedReal { value: &self.value / &other.value, err }.rounded())
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }

    pub fn err_f64(&self) -> f64 {
        self.err.to_f64().unwrap_or(f64::INFINITY)
    }

    /// Whether `x` lies within `tol` of the certified interval.
    pub fn within(&self, x: &BigRational, tol: &BigRational) -> bool {
        (&self.value - x).abs() <= &self.err + tol
    }

    /// Number of decimal places that the error bound certifies (at most `max`):
    /// the largest `d` with `err <= 10^-d / 2`.
    pub fn certified_decimals(&self, max: usize) -> usize {
        (0..=max)
            .rev()
            .find(|&d| self.err <= BigRational::new(BigInt::one(), BigInt::from(2) * num_traits::pow(BigInt::from(10), d)))
            .unwrap_or(0)
    }

    /// Value rounded to `d` decimal places.
    pub fn to_decimal(&self, d: usize) -> String {
        decimal_string(&self.value, d)
    }
}

impl fmt::Display for TruncatedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.certified_decimals(12);
        write!(f, "{} ± {:.1e}", self.to_decimal(d), self.err_f64())
    }
}

/// `x` rounded to `d` decimals (ties away from zero), as a plain decimal string.
pub fn decimal_string(x: &BigRational, d: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), d);
    let scaled = x.abs() * BigRational::from_integer(scale);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let n = (scaled + half).floor().to_integer();
    let neg = x.is_negative() && !n.is_zero();
    let digits = n.to_string();
    let digits = if digits.len() <= d { format!("{}{}", "0".repeat(d + 1 - digits.len()), digits) } else { digits };
    let (int, frac) = digits.split_at(digits.len() - d);
    let sign = if neg { "-" } else { "" };
    if d == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// Parses a plain decimal such as `0.314567` or `1.9e-7` into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("bad decimal {s:?}"));
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let mut v = BigRational::new(digits, num_traits::pow(BigInt::from(10), frac.len()));
    let ten = rat(10);
    v *= qpow(&ten, exp);
    Ok(if neg { -v } else { v })
}

/// `(q)_∞` truncated after enough factors to reach `eps` (at least
/// [`DEFAULT_TERMS`]). The omitted factor lies in `[exp(-2 q^-M), 1]`, so the
/// error is at most `2 q^-M`.
pub fn pochhammer_inf(q: u64, eps: f64) -> Result<TruncatedReal> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    if q < 2 {
        return Err(Error::InvalidArgument(format!("q must be at least 2, got {q}")));
    }
    let mut m = DEFAULT_TERMS;
    while 2.0 * (q as f64).powi(-(m as i32)) > eps {
        m += 8;
    }
    let value = pochhammer_int(q, m);
    let err = BigRational::from_integer(BigInt::from(2)) * qpow(&rat(q as i64), -(m as i64));
    Ok(TruncatedReal { value, err }.rounded())
}

/// `(2)_∞ / (4)_∞`.
fn infinite_ratio(eps: f64) -> Result<TruncatedReal> {
    pochhammer_inf(2, eps / 16.0)?.div(&pochhammer_inf(4, eps / 16.0)?)
}

/// A field signature with odd degree `n = r1 + 2 r2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub r1: usize,
    pub r2: usize,
}

impl Signature {
    pub fn new(r1: usize, r2: usize) -> Result<Signature> {
        if r1 % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "only odd degree is supported, but r1 = {r1} makes n = {} even",
                r1 + 2 * r2
            )));
        }
        Ok(Signature { r1, r2 })
    }

    pub fn n(&self) -> usize {
        self.r1 + 2 * self.r2
    }

    /// Unit rank `r1 + r2 - 1`.
    pub fn u(&self) -> usize {
        self.r1 + self.r2 - 1
    }

    /// `⌊r1/2⌋ = (r1 - 1)/2`.
    pub fn half(&self) -> usize {
        (self.r1 - 1) / 2
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.r1, self.r2)
    }
}

/// Probability that `dim(S ∩ V∞) = k` for a uniformly random maximal totally
/// isotropic `S`; equivalently the conjectured law of `ρ+ - ρ`.
pub fn p_k(sig: Signature, k: usize) -> Result<BigRational> {
    if k > sig.half() {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds ⌊r1/2⌋ = {} for {sig}", sig.half())));
    }
    let (u, h, r2) = (sig.u(), sig.half(), sig.r2);
    let num = p2(u) * p4(h) * p4(h + r2);
    let den = pow2((k * (k + r2)) as i64) * p2(k) * p2(k + r2) * p4(u) * p4(h - k);
    Ok(num / den)
}

/// All `p_k` for `0 <= k <= ⌊r1/2⌋`.
pub fn p_k_all(sig: Signature) -> Vec<BigRational> {
    (0..=sig.half()).map(|k| p_k(sig, k).unwrap()).collect()
}

/// Exact rational factor of `η(ρ)` in front of `(2)_∞/(4)_∞`.
fn eta_rational(sig: Signature, rho: usize) -> BigRational {
    let u = sig.u();
    let e = rho * u + rho * (rho + 1) / 2;
    p4(u) / (pow2(e as i64) * p2(rho) * p2(u))
}

/// Conjectured probability that the class group has 2-rank `ρ`.
pub fn eta_malle(sig: Signature, rho: usize, eps: f64) -> Result<TruncatedReal> {
    Ok(infinite_ratio(eps)?.scale(&eta_rational(sig, rho)))
}

/// Conjectured probability that the narrow class group has 2-rank `ρ+`:
/// `Σ_k η(ρ+ - k) p(k)`.
pub fn eta_plus(sig: Signature, rho_plus: usize, eps: f64) -> Result<TruncatedReal> {
    let mut acc = BigRational::zero();
    for k in 0..=rho_plus.min(sig.half()) {
        acc += eta_rational(sig, rho_plus - k) * p_k(sig, k)?;
    }
    Ok(infinite_ratio(eps)?.scale(&acc))
}

/// Limit of `η+(ρ+)` as `r1 → ∞` with `r2` fixed.
pub fn eta_plus_limit(r2: usize, rho_plus: usize, eps: f64) -> Result<TruncatedReal> {
    let e = rho_plus * (rho_plus + r2);
    let c = (pow2(e as i64) * p2(rho_plus) * p2(r2 + rho_plus)).recip();
    Ok(pochhammer_inf(2, eps)?.scale(&c))
}

/// `t`-th moment of `|C+[2]| = 2^{ρ+}`.
pub fn moment(sig: Signature, t: usize) -> Result<BigRational> {
    if t == 0 {
        return Err(Error::InvalidArgument("moments start at t = 1".into()));
    }
    let rr = (sig.r1 + sig.r2) as i64;
    let mut prod = BigRational::one();
    for s in 1..=t as i64 {
        prod *= BigRational::one() + pow2(s - rr);
    }
    let mut sum = BigRational::zero();
    for k in 0..=sig.half() {
        sum += pow2((t * k) as i64) * p_k(sig, k)?;
    }
    Ok(prod * sum)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WzTriple {
    pub q: BigRational,
    pub m: usize,
    pub r2: usize,
    /// `f[j][k] = f_{j,k}` for `j <= m`, `k <= j`.
    pub f: Vec<Vec<BigRational>>,
    pub g: Vec<Vec<BigRational>>,
    /// `cert[j][k]`; row `j = 0` is empty because the certificate has a pole there.
    pub cert: Vec<Vec<BigRational>>,
    pub sum_lhs: BigRational,
    pub sum_rhs: BigRational,
    pub identity_holds: bool,
    pub recurrence_holds: bool,
}

impl WzTriple {
    pub fn passed(&self) -> bool {
        self.identity_holds && self.recurrence_holds
    }
}

/// `p̃(k)` for parameters `(q, m, r2)`.
pub fn p_tilde(q: &BigRational, m: usize, r2: usize, k: usize) -> BigRational {
    let q2 = q * q;
    let num = pochhammer(q, 2 * m + r2) * pochhammer(&q2, m) * pochhammer(&q2, m + r2);
    let den = qpow(q, (k * (k + r2)) as i64)
        * pochhammer(q, k)
        * pochhammer(q, k + r2)
        * pochhammer(&q2, 2 * m + r2)
        * pochhammer(&q2, m - k);
    num / den
}

fn wz_f(q: &BigRational, m: usize, r2: usize, k: usize) -> BigRational {
    if k > m {
        return BigRational::zero();
    }
    let q2 = q * q;
    let one = BigRational::one();
    let lead = qpow(q, -((k * (k + r2)) as i64 - k as i64));
    let ratio = (&one + qpow(q, -((2 * m + r2) as i64))) / (&one + qpow(q, -(r2 as i64)));
    let num = pochhammer(q, 2 * m + r2) * pochhammer(&q2, m) * pochhammer(&q2, m + r2);
    let den = pochhammer(q, k) * pochhammer(q, k + r2) * pochhammer(&q2, 2 * m + r2) * pochhammer(&q2, m - k);
    lead * ratio * num / den
}

fn wz_cert(q: &BigRational, m: usize, r2: usize, k: usize) -> BigRational {
    let (m, r2, k) = (m as i64, r2 as i64, k as i64);
    let p = |e: i64| qpow(q, e);
    let first = p(2 * k) - p(2 * m);
    let second = p(3 + 2 * k) + p(2 * m) - p(1 + 2 * m) + p(1 + k + 2 * m) + p(1 + k + 2 * m + r2) + p(2 + 2 * k + 2 * m + r2);
    let den = p(2 * k + 2 * m) * (p(2 * m) - BigRational::one()) * (p(2 * (m + r2)) - BigRational::one());
    first * second / den
}

/// Checks `Σ_k q^k p̃(k) = (1 + q^-r2) / (1 + q^{-2m-r2})` exactly, and the
/// recurrence `f_{j,k} - f_{j-1,k} = g_{j,k} - g_{j,k-1}` with `g = cert · f`
/// for every `1 <= j <= m` and `0 <= k <= j`.
pub fn pksum_wz_check(q: &BigRational, m: usize, r2: usize) -> Result<WzTriple> {
    if *q <= BigRational::one() {
        return Err(Error::InvalidArgument("q must exceed 1".into()));
    }
    let one = BigRational::one();
    let sum_lhs: BigRational = (0..=m).map(|k| qpow(q, k as i64) * p_tilde(q, m, r2, k)).sum();
    let sum_rhs = (&one + qpow(q, -(r2 as i64))) / (&one + qpow(q, -((2 * m + r2) as i64)));
    let f: Vec<Vec<BigRational>> = (0..=m).map(|j| (0..=j).map(|k| wz_f(q, j, r2, k)).collect()).collect();
    let cert: Vec<Vec<BigRational>> =
        (0..=m).map(|j| if j == 0 { Vec::new() } else { (0..=j).map(|k| wz_cert(q, j, r2, k)).collect() }).collect();
    let g: Vec<Vec<BigRational>> = (0..=m)
        .map(|j| if j == 0 { Vec::new() } else { (0..=j).map(|k| &cert[j][k] * &f[j][k]).collect() })
        .collect();
    let mut recurrence_holds = true;
    for j in 1..=m {
        recurrence_holds &= cert[j][j].is_zero();
        for k in 0..=j {
            let prev = if k < j { f[j - 1][k].clone() } else { BigRational::zero() };
            let gl = if k == 0 { BigRational::zero() } else { g[j][k - 1].clone() };
            recurrence_holds &= &f[j][k] - prev == &g[j][k] - gl;
        }
    }
    let identity_holds = sum_lhs == sum_rhs && f[m].iter().sum::<BigRational>() == one;
    Ok(WzTriple { q: q.clone(), m, r2, f, g, cert, sum_lhs, sum_rhs, identity_holds, recurrence_holds })
}

/// Probability that a uniformly random `t`-dimensional subspace `E` of an
/// `m`-dimensional space over `F_q`, required to contain a fixed `e ∉ Y`,
/// meets a fixed `r`-dimensional `Y` in dimension `s'`.
pub fn random_subspace_prob(q: u64, m: usize, r: usize, t: usize, s_prime: usize) -> Result<BigRational> {
    if t == 0 || t > m || r + 1 > m {
        return Err(Error::InvalidArgument(format!("need 1 <= t <= m and r <= m - 1, got m={m} r={r} t={t}")));
    }
    let lo = (r + t).saturating_sub(m);
    let hi = r.min(t - 1);
    if s_prime < lo || s_prime > hi {
        return Err(Error::InvalidArgument(format!("s' = {s_prime} outside [{lo}, {hi}]")));
    }
    let qq = |k: usize| pochhammer_int(q, k);
    let e = s_prime as i64 * ((r + t) as i64 - m as i64 - s_prime as i64);
    let num = qpow(&rat(q as i64), e) * qq(r) * qq(t - 1) * qq(m - 1 - r) * qq(m - t);
    let den = qq(r - s_prime) * qq(s_prime) * qq(t - 1 - s_prime) * qq(m - 1) * qq(m + s_prime - r - t);
    Ok(num / den)
}

/// The same distribution over `F_2` by enumerating every admissible `E`, with
/// `e` the first coordinate vector and `Y` spanned by the next `r`.
pub fn random_subspace_counts(m: usize, r: usize, t: usize) -> Result<Vec<BigRational>> {
    if t == 0 || t > m || r + 1 > m {
        return Err(Error::InvalidArgument(format!("need 1 <= t <= m and r <= m - 1, got m={m} r={r} t={t}")));
    }
    let e = BitVector::unit(m, 0);
    let y = Subspace::span(m, &(1..=r).map(|i| BitVector::unit(m, i)).collect::<Vec<_>>())?;
    let mut counts = vec![0u64; t + 1];
    let mut total = 0u64;
    for s in enumerate_subspaces(m, t)? {
        if s.contains(&e)? {
            counts[s.meet(&y)?.dim()] += 1;
            total += 1;
        }
    }
    Ok(counts.into_iter().map(|c| BigRational::new(BigInt::from(c), BigInt::from(total))).collect())
}

fn check_s(sig: Signature, s: usize) -> Result<()> {
    if s < 1 || s > sig.r1 {
        return Err(Error::InvalidArgument(format!("signature rank s = {s} outside [1, {}]", sig.r1)));
    }
    Ok(())
}

/// Conditional probability that the unit signature rank is `s`, given
/// `dim(S ∩ V∞) = k` and class group 2-rank `ρ`.
pub fn cond_sigrank(sig: Signature, s: usize, k: usize, rho: usize) -> Result<BigRational> {
    check_s(sig, s)?;
    if k > sig.half() {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds ⌊r1/2⌋ for {sig}")));
    }
    let (r1, r2, u) = (sig.r1, sig.r2, sig.u());
    let lo = r1 - (rho + k).min(r1 - 1);
    let hi = r1 - k;
    if s < lo || s > hi {
        return Err(Error::ProbabilityZero(format!("s = {s} outside [{lo}, {hi}] for {sig}, k = {k}, rho = {rho}")));
    }
    let e = (r1 + r2 - s) as i64 * (k as i64 - r1 as i64 + s as i64);
    let num = pow2(e) * p2(rho + k + r2) * p2(u) * p2(r1 - k - 1) * p2(rho);
    let den = p2(rho + k + s - r1) * p2(r1 + r2 - s) * p2(s - 1) * p2(u + rho) * p2(r1 - s - k);
    Ok(num / den)
}

/// Inner sum over `k` shared by the two signature-rank formulas.
fn sigrank_inner(sig: Signature, s: usize, rho: usize) -> BigRational {
    let (r1, r2, h) = (sig.r1, sig.r2, sig.half());
    let lo = (r1 - s).saturating_sub(rho);
    let hi = (r1 - s).min(h);
    let mut acc = BigRational::zero();
    for k in lo..=hi {
        let num = pow2((k * (r1 - s - k)) as i64) * p2(r1 - 1 - k) * p2(rho + k + r2);
        let den = p2(r1 - s - k) * p4(h - k) * p2(k) * p2(k + r2) * p2(rho + k + s - r1);
        acc += num / den;
    }
    acc
}

fn rho_floor(sig: Signature, s: usize) -> usize {
    ((sig.r1 + 1) / 2).saturating_sub(s)
}

/// Probability that the unit signature rank is `s` among fields with class
/// group 2-rank `ρ`.
pub fn sigrank_given_rho(sig: Signature, s: usize, rho: usize) -> Result<BigRational> {
    check_s(sig, s)?;
    let floor = rho_floor(sig, s);
    if rho < floor {
        return Err(Error::ProbabilityZero(format!("rho = {rho} below {floor} forces signature rank above {s}")));
    }
    let (r1, r2, u, h) = (sig.r1, sig.r2, sig.u(), sig.half());
    let e = (r1 + r2 - s) as i64 * (s as i64 - r1 as i64);
    let pre = pow2(e) * p2(u) * p2(u) * p4(h) * p4(h + r2) * p2(rho)
        / (p2(r1 + r2 - s) * p2(s - 1) * p2(u + rho) * p4(u));
    Ok(pre * sigrank_inner(sig, s, rho))
}

/// Upper bound on `Σ_{ρ > R} η(ρ)`, valid for every signature: each `η(ρ)` is
/// at most `18 · 2^{-ρ(ρ+1)/2}` because `1/(2)_m < 3.5`, `1/(4)_∞ < 1.46` and
/// the remaining factors are at most 1.
fn eta_tail_bound(r_last: usize) -> BigRational {
    let e = ((r_last + 1) * (r_last + 2) / 2) as i64;
    rat(36) * pow2(-e)
}

fn rho_cutoff(start: usize, eps: f64) -> usize {
    let mut r = start;
    while eta_tail_bound(r).to_f64().unwrap() > eps / 4.0 {
        r += 1;
    }
    r
}

/// Conjectured probability that the unit signature rank equals `s`.
pub fn sigrank(sig: Signature, s: usize, eps: f64) -> Result<TruncatedReal> {
    check_s(sig, s)?;
    if sig.r1 == 1 {
        infinite_ratio(eps)?;
        return Ok(TruncatedReal::exact(BigRational::one()));
    }
    let (r1, r2, u, h) = (sig.r1, sig.r2, sig.u(), sig.half());
    let floor = rho_floor(sig, s);
    let last = rho_cutoff(floor, eps);
    let e = (r1 + r2 - s) as i64 * (s as i64 - r1 as i64);
    let pre = pow2(e) * p2(u) * p4(h) * p4(h + r2) / (p2(r1 + r2 - s) * p2(s - 1));
    let mut sum = BigRational::zero();
    for rho in floor..=last {
        let w = (pow2((rho * u + rho * (rho + 1) / 2) as i64) * p2(u + rho)).recip();
        sum += w * sigrank_inner(sig, s, rho);
    }
    let mut out = infinite_ratio(eps)?.scale(&(pre * sum));
    out.err += eta_tail_bound(last);
    Ok(out)
}

/// Inner sum over `k` shared by the two splitting formulas.
fn split_inner(sig: Signature, rho: usize) -> BigRational {
    let (r2, h) = (sig.r2, sig.half());
    let mut acc = BigRational::zero();
    for k in 0..=h {
        let den = pow2((k * (k + r2)) as i64) * p2(k + r2) * p2(k + r2) * p2(k) * p4(h - k);
        acc += p2(rho + k + r2) / den;
    }
    acc
}

/// Probability that the image of the units at the real places splits off, among
/// fields with class group 2-rank `ρ`.
pub fn split_prob_given_rho(sig: Signature, rho: usize) -> BigRational {
    let (r2, u, h) = (sig.r2, sig.u(), sig.half());
    let pre = p2(u) * p2(u) * p4(h) * p4(h + r2) / (p4(u) * p2(u + rho));
    pre * split_inner(sig, rho)
}

/// Conjectured probability of splitting, averaged over `ρ`.
pub fn split_prob(sig: Signature, eps: f64) -> Result<TruncatedReal> {
    if sig.r1 == 1 {
        infinite_ratio(eps)?;
        return Ok(TruncatedReal::exact(BigRational::one()));
    }
    let (r2, u, h) = (sig.r2, sig.u(), sig.half());
    let last = rho_cutoff(0, eps);
    let pre = p2(u) * p4(h) * p4(h + r2);
    let mut sum = BigRational::zero();
    for rho in 0..=last {
        let w = (pow2((rho * u + rho * (rho + 1) / 2) as i64) * p2(u + rho) * p2(rho)).recip();
        sum += w * split_inner(sig, rho);
    }
    let mut out = infinite_ratio(eps)?.scale(&(pre * sum));
    out.err += eta_tail_bound(last);
    Ok(out)
}

/// Renders fractions over their least common denominator, e.g. `16/51 30/51 5/51`.
pub fn common_denominator(values: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let den = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let nums = values.iter().map(|v| v.numer() * (&den / v.denom())).collect();
    (nums, den)
}

pub fn format_common_denominator(values: &[BigRational]) -> String {
    let (nums, den) = common_denominator(values);
    if den.is_one() {
        return nums.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ");
    }
    nums.iter().map(|n| format!("{n}/{den}")).collect::<Vec<_>>().join(" ")
}

/// `1 + 2^-r2` as used in the first-moment identity.
pub fn first_moment_expected(r2: usize) -> BigRational {
    BigRational::one() + pow2(-(r2 as i64))
}

/// Convenience: `BigUint` to rational.
pub fn uint_rational(x: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn sig(r1: usize, r2: usize) -> Signature {
        Signature::new(r1, r2).unwrap()
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer_int(2, 0), BigRational::one());
        assert_eq!(pochhammer_int(2, 2), r(3, 8));
        let inf = pochhammer_inf(2, 1e-12).unwrap();
        assert!(inf.err_f64() < 1e-12);
        assert!((inf.to_f64() - 0.288788095).abs() < 1e-9);
        assert!(pochhammer_inf(2, 0.0).is_err());
    }

    #[test]
    fn p_k_examples() {
        assert_eq!(p_k(sig(3, 0), 0).unwrap(), r(2, 5));
        assert_eq!(p_k(sig(3, 0), 1).unwrap(), r(3, 5));
        assert_eq!(p_k(sig(1, 4), 0).unwrap(), BigRational::one());
        assert_eq!(p_k(sig(7, 0), 3).unwrap(), r(45, 12155));
        assert!(p_k(sig(3, 0), 2).is_err());
        assert!(Signature::new(2, 1).is_err());
    }

    #[test]
    fn moment_examples() {
        assert_eq!(moment(sig(3, 0), 2).unwrap(), r(21, 4));
        assert_eq!(moment(sig(5, 0), 4).unwrap(), r(4995, 64));
        assert_eq!(moment(sig(1, 1), 4).unwrap(), r(45, 1));
        for r1 in [1, 3, 5, 7, 9] {
            for r2 in 0..=4 {
                assert_eq!(moment(sig(r1, r2), 1).unwrap(), first_moment_expected(r2));
            }
        }
    }

    #[test]
    fn eta_examples() {
        let v = eta_malle(sig(1, 2), 0, 1e-9).unwrap();
        assert_eq!(v.to_decimal(6), "0.786417");
        let total = (0..=40).fold(TruncatedReal::exact(BigRational::zero()), |acc, rho| {
            acc.add(&eta_malle(sig(3, 0), rho, 1e-12).unwrap())
        });
        assert!(total.within(&BigRational::one(), &r(1, 1_000_000_000)));
        assert_eq!(eta_plus(sig(3, 0), 0, 1e-9).unwrap().to_decimal(6), "0.314567");
        assert_eq!(eta_plus(sig(7, 0), 1, 1e-9).unwrap().to_decimal(6), "0.576061");
        assert_eq!(eta_plus_limit(0, 1, 1e-9).unwrap().to_decimal(5), "0.57758");
    }

    #[test]
    fn wz_examples() {
        let t = pksum_wz_check(&r(2, 1), 1, 0).unwrap();
        assert_eq!(t.sum_lhs, r(8, 5));
        assert!(t.passed());
        assert!(pksum_wz_check(&r(2, 1), 0, 3).unwrap().passed());
        assert!(pksum_wz_check(&r(4, 1), 5, 3).unwrap().passed());
    }

    #[test]
    fn lemma_examples() {
        assert_eq!(random_subspace_prob(2, 2, 1, 1, 0).unwrap(), BigRational::one());
        assert_eq!(random_subspace_prob(2, 3, 1, 2, 1).unwrap(), r(1, 3));
        assert_eq!(random_subspace_prob(2, 3, 1, 2, 0).unwrap(), r(2, 3));
        let counts = random_subspace_counts(5, 2, 3).unwrap();
        for (sp, c) in counts.iter().enumerate() {
            match random_subspace_prob(2, 5, 2, 3, sp) {
                Ok(p) => assert_eq!(&p, c),
                Err(_) => assert!(c.is_zero()),
            }
        }
    }

    #[test]
    fn signature_rank_examples() {
        assert_eq!(cond_sigrank(sig(3, 0), 2, 1, 0).unwrap(), BigRational::one());
        assert!(matches!(cond_sigrank(sig(3, 0), 3, 1, 0), Err(Error::ProbabilityZero(_))));
        assert!(matches!(cond_sigrank(sig(3, 0), 4, 1, 0), Err(Error::InvalidArgument(_))));
        let total: BigRational = (1..=5).filter_map(|s| sigrank_given_rho(sig(5, 0), s, 0).ok()).sum();
        assert_eq!(total, BigRational::one());
        assert_eq!(sigrank(sig(3, 0), 3, 1e-9).unwrap().to_decimal(6), "0.362599");
        assert_eq!(sigrank(sig(1, 3), 1, 1e-9).unwrap().to_decimal(9), "1.000000000");
    }

    #[test]
    fn split_examples() {
        assert_eq!(split_prob(sig(3, 0), 1e-9).unwrap().to_decimal(6), "0.943700");
        assert_eq!(split_prob(sig(7, 0), 1e-9).unwrap().to_decimal(6), "0.995315");
        assert_eq!(split_prob_given_rho(sig(1, 2), 3), BigRational::one());
    }

    #[test]
    fn one_real_place_is_exactly_one() {
        for r2 in 0..4 {
            let s = sig(1, r2);
            for rho in 0..12 {
                assert_eq!(split_prob_given_rho(s, rho), BigRational::one());
                assert_eq!(sigrank_given_rho(s, 1, rho).unwrap(), BigRational::one());
            }
            assert_eq!(sigrank(s, 1, 1e-9).unwrap(), TruncatedReal::exact(BigRational::one()));
            assert_eq!(split_prob(s, 1e-9).unwrap(), TruncatedReal::exact(BigRational::one()));
            assert!(split_prob(s, 0.0).is_err());
        }
    }

    #[test]
    fn decimal_helpers() {
        assert_eq!(decimal_string(&r(1, 3), 4), "0.3333");
        assert_eq!(decimal_string(&r(2, 3), 0), "1");
        assert_eq!(decimal_string(&r(-1, 8), 2), "-0.13");
        assert_eq!(parse_decimal("1.9e-7").unwrap(), r(19, 100_000_000));
        assert_eq!(parse_decimal("0.25").unwrap(), r(1, 4));
        assert_eq!(format_common_denominator(&[r(16, 51), r(30, 51), r(5, 51)]), "16/51 30/51 5/51");
    }
}
