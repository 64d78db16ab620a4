//! Integral binary cubic forms `ax³ + bx²y + cxy² + dy³`: Hessian,
//! discriminant, reducedness, reduction, irreducibility, maximality of the
//! associated cubic ring, random sampling and an exhaustive scan by
//! discriminant.
//!
//! `GL2(Z)` acts by `(γ·f)(x, y) = det(γ)⁻¹ f(px + qy, rx + sy)` for
//! `γ = [[p, q], [r, s]]`; the Hessian transforms by plain substitution.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Coefficient bound under which every discriminant fits in an `i128`.
pub const COEFF_LIMIT: i64 = 1 << 29;
pub const MAX_HEIGHT: i64 = 1_000_000;
pub const MAX_SCAN_DISC: i64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubicForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Hessian {
    pub p: i128,
    pub q: i128,
    pub r: i128,
}

impl Hessian {
    pub fn disc(&self) -> i128 {
        self.q * self.q - 4 * self.p * self.r
    }

    pub fn eval(&self, x: i128, y: i128) -> i128 {
        self.p * x * x + self.q * x * y + self.r * y * y
    }
}

/// A unimodular substitution `(x, y) ↦ (px + qy, rx + sy)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gl2 {
    pub p: i64,
    pub q: i64,
    pub r: i64,
    pub s: i64,
}

impl Gl2 {
    pub const IDENTITY: Gl2 = Gl2 { p: 1, q: 0, r: 0, s: 1 };

    pub fn new(p: i64, q: i64, r: i64, s: i64) -> Result<Gl2> {
        let g = Gl2 { p, q, r, s };
        if g.det().abs() != 1 {
            return Err(Error::InvalidArgument(format!("matrix [[{p}, {q}], [{r}, {s}]] is not unimodular")));
        }
        Ok(g)
    }

    pub fn det(&self) -> i64 {
        self.p * self.s - self.q * self.r
    }

    /// Matrix product `self · other`, i.e. substitute `other` first into `self`.
    pub fn compose(&self, o: &Gl2) -> Gl2 {
        Gl2 {
            p: self.p * o.p + self.q * o.r,
            q: self.p * o.q + self.q * o.s,
            r: self.r * o.p + self.s * o.r,
            s: self.r * o.q + self.s * o.s,
        }
    }

    /// Generators used by the orbit search: translation, its inverse, the
    /// quarter turn and the reflection `x ↦ -x`.
    pub fn generators() -> [Gl2; 4] {
        [
            Gl2 { p: 1, q: 1, r: 0, s: 1 },
            Gl2 { p: 1, q: -1, r: 0, s: 1 },
            Gl2 { p: 0, q: 1, r: -1, s: 0 },
            Gl2 { p: -1, q: 0, r: 0, s: 1 },
        ]
    }

    /// Random product of `len` generators.
    pub fn random_word(len: usize, rng: &mut impl Rng) -> Gl2 {
        let gens = Gl2::generators();
        (0..len).fold(Gl2::IDENTITY, |acc, _| acc.compose(&gens[rng.gen_range(0..gens.len())]))
    }
}

impl CubicForm {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<CubicForm> {
        let f = CubicForm { a, b, c, d };
        if f.coeffs().iter().any(|x| x.abs() > COEFF_LIMIT) {
            return Err(Error::TooLarge { dim: f.coeffs().iter().map(|x| x.unsigned_abs() as usize).max().unwrap(), limit: COEFF_LIMIT as usize });
        }
        Ok(f)
    }

    pub fn coeffs(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    fn wide(&self) -> [i128; 4] {
        [self.a as i128, self.b as i128, self.c as i128, self.d as i128]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs() == [0; 4]
    }

    pub fn neg(&self) -> CubicForm {
        CubicForm { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn content(&self) -> i64 {
        self.coeffs().iter().fold(0i64, |g, x| g.gcd(x))
    }

    pub fn eval(&self, x: i128, y: i128) -> i128 {
        let [a, b, c, d] = self.wide();
        ((a * x + b * y) * x + c * y * y) * x + d * y * y * y
    }

    pub fn hessian(&self) -> Hessian {
        let [a, b, c, d] = self.wide();
        Hessian { p: b * b - 3 * a * c, q: b * c - 9 * a * d, r: c * c - 3 * b * d }
    }

    /// Discriminant; coefficients are expected within [`COEFF_LIMIT`].
    pub fn disc(&self) -> i128 {
        let [a, b, c, d] = self.wide();
        18 * a * b * c * d - 4 * b * b * b * d + b * b * c * c - 4 * a * c * c * c - 27 * a * a * d * d
    }

    pub fn is_real(&self) -> bool {
        self.disc() > 0
    }

    /// `det(γ)⁻¹ f(px + qy, rx + sy)`.
    pub fn transform(&self, g: &Gl2) -> Result<CubicForm> {
        let [a, b, c, d] = self.coeffs().map(BigInt::from);
        let (p, q, r, s) = (BigInt::from(g.p), BigInt::from(g.q), BigInt::from(g.r), BigInt::from(g.s));
        // (p x + q y) = L, (r x + s y) = M; expand a L³ + b L² M + c L M² + d M³
        let l = [p.clone(), q.clone()];
        let m = [r.clone(), s.clone()];
        let mul = |u: &[BigInt], v: &[BigInt]| -> Vec<BigInt> {
            let mut out = vec![BigInt::zero(); u.len() + v.len() - 1];
            for (i, x) in u.iter().enumerate() {
                for (j, y) in v.iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            out
        };
        let l2 = mul(&l, &l);
        let m2 = mul(&m, &m);
        let terms = [mul(&l2, &l), mul(&l2, &m), mul(&l, &m2), mul(&m2, &m)];
        let mut out = vec![BigInt::zero(); 4];
        for (coef, t) in [a, b, c, d].iter().zip(&terms) {
            for (o, x) in out.iter_mut().zip(t) {
                *o += coef * x;
            }
        }
        let det = g.det();
        if det.abs() != 1 {
            return Err(Error::InvalidArgument("transformation is not unimodular".into()));
        }
        let conv = |x: &BigInt| -> Result<i64> {
            let v = (x * det).to_i64().filter(|v| v.abs() <= COEFF_LIMIT);
            v.ok_or(Error::TooLarge { dim: 0, limit: COEFF_LIMIT as usize })
        };
        Ok(CubicForm { a: conv(&out[0])?, b: conv(&out[1])?, c: conv(&out[2])?, d: conv(&out[3])? })
    }
}

impl fmt::Display for CubicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for CubicForm {
    type Err = Error;

    /// Accepts `a,b,c,d` with optional surrounding parentheses.
    fn from_str(s: &str) -> Result<CubicForm> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<i64> = inner
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidArgument(format!("bad cubic form {s:?}: {e}")))?;
        match parts[..] {
            [a, b, c, d] => CubicForm::new(a, b, c, d),
            _ => Err(Error::InvalidArgument(format!("cubic form {s:?} needs four coefficients"))),
        }
    }
}

pub fn hessian(f: &CubicForm) -> Hessian {
    f.hessian()
}

/// Exact discriminant for arbitrary `i64` coefficients.
pub fn disc_cubic(f: &CubicForm) -> BigInt {
    let [a, b, c, d] = f.coeffs().map(BigInt::from);
    BigInt::from(18) * &a * &b * &c * &d - BigInt::from(4) * &b * &b * &b * &d + &b * &b * &c * &c
        - BigInt::from(4) * &a * &c * &c * &c
        - BigInt::from(27) * &a * &a * &d * &d
}

/// Determinant by fraction-free Gaussian elimination.
fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Resultant of two polynomials given by coefficients, highest degree first.
pub fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n;
    let mut rows = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for (j, c) in f.iter().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in g.iter().enumerate() {
            rows[n + i][i + j] = c.clone();
        }
    }
    bareiss_det(rows)
}

/// Discriminant of a univariate polynomial, coefficients highest degree first.
pub fn poly_disc(coeffs: &[i64]) -> Result<BigInt> {
    let f: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
    if f.is_empty() || f[0].is_zero() {
        return Err(Error::InvalidArgument("leading coefficient must be nonzero".into()));
    }
    let n = f.len() - 1;
    if n == 0 {
        return Err(Error::InvalidArgument("constant polynomial has no discriminant".into()));
    }
    if n == 1 {
        return Ok(BigInt::one());
    }
    let df: Vec<BigInt> = f[..n].iter().enumerate().map(|(i, c)| c * BigInt::from(n - i)).collect();
    let res = resultant(&f, &df);
    let sign = if (n * (n - 1) / 2) % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    Ok(sign * res / &f[0])
}

/// Characteristic polynomial of a square rational matrix by Faddeev–LeVerrier,
/// coefficients highest degree first.
fn char_poly(a: &[Vec<BigRational>]) -> Vec<BigRational> {
    let n = a.len();
    let mut coeffs = vec![BigRational::one()];
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{k-1} I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigRational::zero();
                for l in 0..n {
                    if !a[i][l].is_zero() && !m[l][j].is_zero() {
                        acc += &a[i][l] * &m[l][j];
                    }
                }
                next[i][j] = acc;
            }
            next[i][i] += &coeffs[k - 1];
        }
        m = next;
        let mut tr = BigRational::zero();
        for i in 0..n {
            for l in 0..n {
                tr += &a[i][l] * &m[l][i];
            }
        }
        coeffs.push(-tr / BigRational::from_integer(BigInt::from(k)));
    }
    coeffs
}

/// Multiplication by `x` on `Q[t]/(f)` for monic `f`, as the matrix whose
/// column `j` holds the coordinates of `x·t^j`.
fn mult_matrix(f: &[BigInt], x: &[BigRational]) -> Vec<Vec<BigRational>> {
    let n = f.len() - 1;
    let mut cols = Vec::with_capacity(n);
    let mut cur = x.to_vec();
    for _ in 0..n {
        cols.push(cur.clone());
        // multiply by t: shift up, then reduce t^n = -(f_1 t^{n-1} + .. + f_n)
        let top = cur[n - 1].clone();
        for i in (1..n).rev() {
            cur[i] = cur[i - 1].clone();
        }
        cur[0] = BigRational::zero();
        if !top.is_zero() {
            for i in 0..n {
                cur[i] -= &top * BigRational::from_integer(f[n - i].clone());
            }
        }
    }
    (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect()
}

fn is_integral(f: &[BigInt], x: &[BigRational]) -> bool {
    char_poly(&mult_matrix(f, x)).iter().all(|c| c.is_integer())
}

/// Hermite normal form basis of the lattice spanned by integer rows.
fn hnf_basis(mut rows: Vec<Vec<BigInt>>, n: usize) -> Vec<Vec<BigInt>> {
    let mut r = 0;
    for col in 0..n {
        loop {
            let nonzero: Vec<usize> = (r..rows.len()).filter(|&i| !rows[i][col].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            let piv = *nonzero.iter().min_by_key(|&&i| rows[i][col].abs()).unwrap();
            rows.swap(r, piv);
            if nonzero.len() == 1 && piv == r || (r + 1..rows.len()).all(|i| rows[i][col].is_zero()) {
                break;
            }
            for i in r + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[r][col]);
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
            }
        }
        if r < rows.len() && !rows[r][col].is_zero() {
            r += 1;
        }
    }
    rows.truncate(r);
    rows
}

fn poly_mod(f: &[BigInt], p: u64) -> Vec<u128> {
    let pb = BigInt::from(p);
    f.iter().rev().map(|c| c.mod_floor(&pb).to_u128().unwrap()).collect()
}

fn trim_mod(mut v: Vec<u128>) -> Vec<u128> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Quotient and remainder over `F_p`, coefficients lowest degree first.
fn divrem_mod(a: &[u128], b: &[u128], p: u128) -> (Vec<u128>, Vec<u128>) {
    let mut r = trim_mod(a.to_vec());
    let b = trim_mod(b.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![0u128; r.len() - b.len() + 1];
    let lead_inv = inv_mod(*b.last().unwrap(), p);
    while r.len() >= b.len() && !r.is_empty() {
        let coef = mulmod(*r.last().unwrap(), lead_inv, p);
        let shift = r.len() - b.len();
        q[shift] = coef;
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - mulmod(coef, *bc, p)) % p;
        }
        r = trim_mod(r);
    }
    (q, r)
}

/// Dedekind's criterion: whether `Z[t]` is maximal at `p` for monic `f` of
/// degree below `p`.
fn dedekind_maximal(f: &[BigInt], p: u64) -> bool {
    let pp = p as u128;
    let fbar = poly_mod(f, p);
    let dfbar: Vec<u128> = fbar.iter().enumerate().skip(1).map(|(i, c)| mulmod(*c, i as u128, pp)).collect();
    let d = poly_gcd_mod(fbar.clone(), dfbar, pp);
    let (g, _) = divrem_mod(&fbar, &d, pp);
    let (h, _) = divrem_mod(&fbar, &g, pp);
    // F = (f - g h) / p over Z with g, h lifted to [0, p)
    let mut gh = vec![BigInt::zero(); g.len() + h.len() - 1];
    for (i, x) in g.iter().enumerate() {
        for (j, y) in h.iter().enumerate() {
            gh[i + j] += BigInt::from(*x) * BigInt::from(*y);
        }
    }
    let f_low: Vec<BigInt> = f.iter().rev().cloned().collect();
    let big_f: Vec<u128> = (0..f_low.len().max(gh.len()))
        .map(|i| {
            let a = f_low.get(i).cloned().unwrap_or_default();
            let b = gh.get(i).cloned().unwrap_or_default();
            ((a - b) / BigInt::from(p)).mod_floor(&BigInt::from(p)).to_u128().unwrap()
        })
        .collect();
    let big_f = trim_mod(big_f);
    if big_f.is_empty() {
        return g.len() <= 1 || h.len() <= 1;
    }
    poly_gcd_mod(poly_gcd_mod(big_f, g, pp), h, pp).len() <= 1
}

/// Discriminant of the number field `Q[t]/(f)` for a monic irreducible
/// integer polynomial `f` (coefficients highest degree first).
///
/// Starting from `Z[t]`, each prime `p` with `p²` dividing the discriminant
/// is handled by adjoining integral elements of `(1/p)·O \ O` until none are
/// left; an order is `p`-maximal exactly when no such element exists. Primes
/// above the degree are first tested with Dedekind's criterion. The search
/// runs over `p^n` candidates, so it is limited to `p^n <= 10^6`.
pub fn field_disc(coeffs: &[i64]) -> Result<BigInt> {
    let f: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
    if f.len() < 2 || !f[0].is_one() {
        return Err(Error::InvalidArgument("field_disc needs a monic polynomial of degree at least 1".into()));
    }
    let n = f.len() - 1;
    let disc = poly_disc(coeffs)?;
    if disc.is_zero() {
        return Err(Error::Reducible);
    }
    let abs = disc.abs().to_u128().ok_or(Error::TooLarge { dim: usize::MAX, limit: usize::MAX })?;
    let mut basis: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    // determinant of the basis in power coordinates; the index is its inverse
    let mut det = BigRational::one();
    for p in square_prime_divisors(abs)? {
        if p as usize > n && dedekind_maximal(&f, p) {
            continue;
        }
        let space = (p as u128).checked_pow(n as u32).filter(|&s| s <= 1_000_000);
        let space = space.ok_or(Error::TooLarge { dim: p as usize, limit: 1_000_000 })? as u64;
        let pr = BigRational::from_integer(BigInt::from(p));
        let p2 = BigRational::from_integer(BigInt::from(p * p));
        'grow: loop {
            let order_disc = BigRational::from_integer(disc.clone()) * &det * &det;
            if !(order_disc / &p2).is_integer() {
                break;
            }
            for code in 1..space {
                let mut x = vec![BigRational::zero(); n];
                let mut c = code;
                for row in &basis {
                    let digit = BigRational::from_integer(BigInt::from(c % p));
                    c /= p;
                    if !digit.is_zero() {
                        for (xi, bi) in x.iter_mut().zip(row) {
                            *xi += &digit * bi;
                        }
                    }
                }
                let x: Vec<BigRational> = x.into_iter().map(|v| v / &pr).collect();
                if !is_integral(&f, &x) {
                    continue;
                }
                let denom = basis
                    .iter()
                    .chain(std::iter::once(&x))
                    .flatten()
                    .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
                let scale = BigRational::from_integer(denom.clone());
                let rows: Vec<Vec<BigInt>> = basis
                    .iter()
                    .chain(std::iter::once(&x))
                    .map(|row| row.iter().map(|v| (v * &scale).to_integer()).collect())
                    .collect();
                let h = hnf_basis(rows, n);
                det = (0..n).fold(BigRational::one(), |acc, i| acc * BigRational::new(h[i][i].clone(), denom.clone()));
                basis = h
                    .into_iter()
                    .map(|row| row.into_iter().map(|v| BigRational::new(v, denom.clone())).collect())
                    .collect();
                continue 'grow;
            }
            break;
        }
    }
    Ok((BigRational::from_integer(disc) * &det * &det).to_integer())
}

/// Reducedness: the sign normalization `a > 0`, `b >= 0`, the Hessian
/// condition `|Q| <= P <= R`, and the four boundary conditions.
pub fn is_reduced(f: &CubicForm) -> Result<bool> {
    if f.disc() <= 0 {
        return Err(Error::NotReal);
    }
    Ok(reduced_unchecked(f))
}

fn reduced_unchecked(f: &CubicForm) -> bool {
    let Hessian { p, q, r } = f.hessian();
    let (a, b, c, d) = (f.a as i128, f.b as i128, f.c as i128, f.d as i128);
    a > 0
        && b >= 0
        && q.abs() <= p
        && p <= r
        && (b > 0 || d < 0)
        && (q != 0 || d < 0)
        && (p != q || b < (3 * a - b).abs())
        && (p != r || (a <= d.abs() && (a != d.abs() || b < c.abs())))
}

fn div_round(n: i128, d: i128) -> i128 {
    // nearest integer to n/d for d > 0, halves rounded down
    (2 * n + d).div_euclid(2 * d)
}

/// Substitution bringing a positive definite form to `|Q| <= P <= R`.
fn gauss_reduce(h: Hessian) -> Gl2 {
    let (mut p, mut q, mut r) = (h.p, h.q, h.r);
    let mut g = Gl2::IDENTITY;
    loop {
        let n = div_round(-q, 2 * p);
        if n != 0 {
            // (x, y) ↦ (x + n y, y)
            let r2 = p * n * n + q * n + r;
            q += 2 * p * n;
            r = r2;
            g = g.compose(&Gl2 { p: 1, q: n as i64, r: 0, s: 1 });
        }
        if p > r {
            // (x, y) ↦ (y, -x)
            std::mem::swap(&mut p, &mut r);
            q = -q;
            g = g.compose(&Gl2 { p: 0, q: 1, r: -1, s: 0 });
        } else if q.abs() <= p {
            return g;
        }
    }
}

fn small_unimodular() -> Vec<Gl2> {
    let mut out = Vec::new();
    for p in -1..=1 {
        for q in -1..=1 {
            for r in -1..=1 {
                for s in -1..=1 {
                    if let Ok(g) = Gl2::new(p, q, r, s) {
                        out.push(g);
                    }
                }
            }
        }
    }
    out
}

/// The unique reduced form equivalent to a real irreducible `f`.
pub fn reduce(f: &CubicForm) -> Result<CubicForm> {
    reduce_with_matrix(f).map(|(g, _)| g)
}

/// Reduced form together with the substitution that produces it from `f`.
pub fn reduce_with_matrix(f: &CubicForm) -> Result<(CubicForm, Gl2)> {
    if f.disc() <= 0 {
        return Err(Error::NotReal);
    }
    if !is_irreducible(f)? {
        return Err(Error::Reducible);
    }
    let g0 = gauss_reduce(f.hessian());
    let base = f.transform(&g0)?;
    let mut best: Option<(CubicForm, Gl2)> = None;
    for delta in small_unimodular() {
        let cand = base.transform(&delta)?;
        if reduced_unchecked(&cand) && best.map_or(true, |(b, _)| cand < b) {
            best = Some((cand, g0.compose(&delta)));
        }
    }
    best.ok_or_else(|| Error::InvalidArgument(format!("no reduced representative found for {f}")))
}

/// Reduced forms reachable from `f` by generator words of length at most
/// `depth`. Independent of [`reduce`], used to validate it.
pub fn orbit_search(f: &CubicForm, depth: usize) -> BTreeSet<CubicForm> {
    let mut seen: HashSet<CubicForm> = HashSet::from([*f]);
    let mut queue = VecDeque::from([(*f, 0usize)]);
    let mut found = BTreeSet::new();
    while let Some((g, len)) = queue.pop_front() {
        if g.disc() > 0 && reduced_unchecked(&g) {
            found.insert(g);
        }
        if len == depth {
            continue;
        }
        for gen in Gl2::generators() {
            if let Ok(h) = g.transform(&gen) {
                if seen.insert(h) {
                    queue.push_back((h, len + 1));
                }
            }
        }
    }
    found
}

fn divisors(n: i64) -> Vec<i64> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            out.push(i);
            if i * i != n {
                out.push(n / i);
            }
        }
        i += 1;
    }
    out
}

/// Irreducibility over `Q` by the rational root test.
pub fn is_irreducible(f: &CubicForm) -> Result<bool> {
    if f.is_zero() {
        return Err(Error::ZeroForm);
    }
    if f.a == 0 || f.d == 0 {
        return Ok(false);
    }
    // a root (p : q) in lowest terms has q | a and p | d
    for q in divisors(f.a) {
        for p in divisors(f.d) {
            if p.gcd(&q) != 1 {
                continue;
            }
            for p in [p, -p] {
                if f.eval(p as i128, q as i128) == 0 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

fn mulmod(a: u128, b: u128, m: u128) -> u128 {
    (a % m) * (b % m) % m
}

fn modp(x: i64, m: u128) -> u128 {
    (x as i128).rem_euclid(m as i128) as u128
}

/// `f(u, v) mod m` for `u, v` already reduced mod `m < 2^64`.
fn eval_mod(f: &CubicForm, u: u128, v: u128, m: u128) -> u128 {
    let [a, b, c, d] = f.coeffs().map(|x| modp(x, m));
    let u2 = mulmod(u, u, m);
    let v2 = mulmod(v, v, m);
    let t = [
        mulmod(a, mulmod(u2, u, m), m),
        mulmod(b, mulmod(u2, v, m), m),
        mulmod(c, mulmod(u, v2, m), m),
        mulmod(d, mulmod(v2, v, m), m),
    ];
    t.iter().fold(0, |s, x| (s + x) % m)
}

/// Gradient of `f` at `(u, v)` mod `p`.
fn grad_mod(f: &CubicForm, u: u128, v: u128, p: u128) -> (u128, u128) {
    let [a, b, c, d] = f.coeffs().map(|x| modp(x, p));
    let fx = (3 * mulmod(a, mulmod(u, u, p), p) + 2 * mulmod(b, mulmod(u, v, p), p) + mulmod(c, mulmod(v, v, p), p)) % p;
    let fy = (mulmod(b, mulmod(u, u, p), p) + 2 * mulmod(c, mulmod(u, v, p), p) + 3 * mulmod(d, mulmod(v, v, p), p)) % p;
    (fx, fy)
}

fn pow_mod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

fn inv_mod(x: u128, p: u128) -> u128 {
    pow_mod(x, p - 2, p)
}

/// Monic gcd of two polynomials over `F_p` (coefficients lowest degree first).
fn poly_gcd_mod(mut f: Vec<u128>, mut g: Vec<u128>, p: u128) -> Vec<u128> {
    let trim = |v: &mut Vec<u128>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    trim(&mut f);
    trim(&mut g);
    while !g.is_empty() {
        // f mod g
        let lead_inv = inv_mod(*g.last().unwrap(), p);
        while f.len() >= g.len() {
            let coef = mulmod(*f.last().unwrap(), lead_inv, p);
            let shift = f.len() - g.len();
            for (i, gc) in g.iter().enumerate() {
                f[shift + i] = (f[shift + i] + p - mulmod(coef, *gc, p)) % p;
            }
            trim(&mut f);
            if f.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut f, &mut g);
    }
    if let Some(&l) = f.last() {
        let li = inv_mod(l, p);
        for c in f.iter_mut() {
            *c = mulmod(*c, li, p);
        }
    }
    f
}

/// Points of `P¹(F_p)` where `f` has a repeated root, as integral lifts.
fn repeated_roots(f: &CubicForm, p: u64) -> Vec<(u128, u128)> {
    let pp = p as u128;
    let mut out = Vec::new();
    if modp(f.a, pp) == 0 && modp(f.b, pp) == 0 {
        out.push((1, 0));
    }
    if p < 64 {
        for u in 0..pp {
            if eval_mod(f, u, 1, pp) == 0 && grad_mod(f, u, 1, pp) == (0, 0) {
                out.push((u, 1));
            }
        }
        return out;
    }
    let [a, b, c, d] = f.coeffs().map(|x| modp(x, pp));
    let g = vec![d, c, b, a];
    let dg = vec![c, (2 * b) % pp, (3 * a) % pp];
    let h = poly_gcd_mod(g, dg, pp);
    let root = match h.len() {
        2 => Some((pp - h[0]) % pp),
        // (x - r)² = x² - 2r x + r²
        3 => Some(mulmod(pp - h[1], inv_mod(2, pp), pp)),
        _ => None,
    };
    if let Some(u) = root {
        if eval_mod(f, u, 1, pp) == 0 && grad_mod(f, u, 1, pp) == (0, 0) {
            out.push((u, 1));
        }
    }
    out
}

/// Whether the cubic ring of `f` is maximal at the prime `p`.
pub fn is_maximal_at(f: &CubicForm, p: u64) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p >= 1 << 32 {
        return Err(Error::TooLarge { dim: p as usize, limit: 1 << 32 });
    }
    if f.coeffs().iter().all(|&x| x % p as i64 == 0) {
        return Ok(false);
    }
    let p2 = (p as u128) * (p as u128);
    Ok(repeated_roots(f, p).into_iter().all(|(u, v)| eval_mod(f, u, v, p2) != 0))
}

fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Primes whose square divides `n`, by trial division up to `∛n`.
pub fn square_prime_divisors(n: u128) -> Result<Vec<u64>> {
    let mut m = n;
    let mut out = Vec::new();
    let mut p: u128 = 2;
    while p * p * p <= m {
        if p >= 1 << 32 {
            return Err(Error::TooLarge { dim: usize::MAX, limit: 1 << 32 });
        }
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if e >= 2 {
                out.push(p as u64);
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    // the cofactor is 1, a prime, a prime square or a product of two primes
    let s = isqrt(m);
    if s > 1 && s * s == m {
        if s >= 1 << 32 {
            return Err(Error::TooLarge { dim: usize::MAX, limit: 1 << 32 });
        }
        out.push(s as u64);
    }
    Ok(out)
}

pub fn is_squarefree(n: u128) -> Result<bool> {
    Ok(square_prime_divisors(n)?.is_empty())
}

/// Maximality at every prime whose square divides the discriminant.
pub fn is_maximal(f: &CubicForm) -> Result<bool> {
    let disc = f.disc();
    if disc == 0 {
        return Err(Error::InvalidArgument(format!("{f} has zero discriminant")));
    }
    for p in square_prime_divisors(disc.unsigned_abs())? {
        if !is_maximal_at(f, p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormClassRecord {
    pub disc: i128,
    pub reduced_form: CubicForm,
    pub maximal: bool,
    pub irreducible: bool,
    pub real: bool,
}

/// Flags for `f`; the stored form is `f` reduced when that is defined.
pub fn classify(f: &CubicForm) -> Result<FormClassRecord> {
    let disc = f.disc();
    let real = disc > 0;
    let irreducible = is_irreducible(f)?;
    let reduced_form = if real && irreducible { reduce(f)? } else { *f };
    let maximal = disc != 0 && is_maximal(f)?;
    Ok(FormClassRecord { disc, reduced_form, maximal, irreducible, real })
}

/// The acceptance chain of the sampler, cheapest test first.
pub fn accept(f: &CubicForm) -> Result<Option<FormClassRecord>> {
    if f.disc() <= 0 || !reduced_unchecked(f) || !is_irreducible(f)? || !is_maximal(f)? {
        return Ok(None);
    }
    Ok(Some(FormClassRecord { disc: f.disc(), reduced_form: *f, maximal: true, irreducible: true, real: true }))
}

/// One uniform draw with `a, b ∈ [0, X]` and `c, d ∈ [-X, X]`.
pub fn draw_form(x: i64, rng: &mut impl Rng) -> CubicForm {
    CubicForm { a: rng.gen_range(0..=x), b: rng.gen_range(0..=x), c: rng.gen_range(-x..=x), d: rng.gen_range(-x..=x) }
}

pub fn sample_form(x: i64, rng: &mut impl Rng) -> Result<Option<FormClassRecord>> {
    check_height(x)?;
    accept(&draw_form(x, rng))
}

fn check_height(x: i64) -> Result<()> {
    if x < 1 {
        return Err(Error::InvalidArgument(format!("height bound must be at least 1, got {x}")));
    }
    if x > MAX_HEIGHT {
        return Err(Error::TooLarge { dim: x as usize, limit: MAX_HEIGHT as usize });
    }
    Ok(())
}

const SAMPLE_CHUNK: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleRun {
    pub height: i64,
    pub draws: u64,
    pub seed: u64,
    /// Draw index and record of every accepted form, in draw order.
    pub accepted: Vec<(u64, FormClassRecord)>,
}

/// `draws` independent samples; chunk `i` uses ChaCha8 stream `i`.
pub fn sample_forms(x: i64, draws: u64, seed: u64) -> Result<SampleRun> {
    check_height(x)?;
    let chunks = draws.div_ceil(SAMPLE_CHUNK);
    let parts: Vec<Vec<(u64, FormClassRecord)>> = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<Vec<(u64, FormClassRecord)>> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let start = c * SAMPLE_CHUNK;
            let mut out = Vec::new();
            for i in start..draws.min(start + SAMPLE_CHUNK) {
                if let Some(r) = accept(&draw_form(x, &mut rng))? {
                    out.push((i, r));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(SampleRun { height: x, draws, seed, accepted: parts.into_iter().flatten().collect() })
}

/// Every reduced, irreducible, maximal form with `0 < disc <= bound`, sorted
/// by discriminant and then coefficients.
///
/// Writing `G` for the cubic covariant, the syzygy `4H³ = G² + 27·disc·f²`
/// at `(1, 0)` gives `27·disc·a² <= 4P³` and `|2bP - 3aQ| <= 2P^{3/2}`. With
/// `P <= √disc` for a reduced Hessian this yields `a <= 2·disc^{1/4}/√27` and
/// `|b| <= 3a/2 + √P`; `c` is fixed by `P` and `d` by `|Q| <= P`.
pub fn scan(bound: i64) -> Result<Vec<FormClassRecord>> {
    if bound > MAX_SCAN_DISC {
        return Err(Error::TooLarge { dim: bound as usize, limit: MAX_SCAN_DISC as usize });
    }
    if bound < 1 {
        return Ok(Vec::new());
    }
    let pmax = isqrt(bound as u128) as i64;
    let amax = ((16.0 * bound as f64 / 729.0).powf(0.25)).floor() as i64 + 1;
    let mut out: Vec<FormClassRecord> = (1..=amax)
        .into_par_iter()
        .flat_map_iter(|a| {
            let mut found = Vec::new();
            for p in 1..=pmax {
                let bmax = (3 * a) / 2 + isqrt(p as u128) as i64 + 1;
                for b in -bmax..=bmax {
                    let num = b * b - p;
                    if num % (3 * a) != 0 {
                        continue;
                    }
                    let c = num / (3 * a);
                    let bc = b * c;
                    let dlo = (bc - p).div_euclid(9 * a);
                    let dhi = (bc + p).div_euclid(9 * a) + 1;
                    for d in dlo..=dhi {
                        let f = CubicForm { a, b, c, d };
                        let disc = f.disc();
                        if disc <= 0 || disc > bound as i128 || !reduced_unchecked(&f) {
                            continue;
                        }
                        if let Ok(Some(r)) = accept(&f) {
                            found.push(r);
                        }
                    }
                }
            }
            found
        })
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Brute-force scan over a fixed coefficient box, for cross-checking [`scan`].
pub fn box_scan(bound: i64, a_max: i64, coeff_max: i64) -> Result<Vec<FormClassRecord>> {
    let mut out = Vec::new();
    for a in 1..=a_max {
        for b in -coeff_max..=coeff_max {
            for c in -coeff_max..=coeff_max {
                for d in -coeff_max..=coeff_max {
                    let f = CubicForm { a, b, c, d };
                    let disc = f.disc();
                    if disc > 0 && disc <= bound as i128 {
                        if let Some(r) = accept(&f)? {
                            out.push(r);
                        }
                    }
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(a: i64, b: i64, c: i64, d: i64) -> CubicForm {
        CubicForm::new(a, b, c, d).unwrap()
    }

    #[test]
    fn discriminants_and_hessians() {
        assert_eq!(f(1, -1, -2, 1).disc(), 49);
        assert_eq!(f(1, 0, -4, -1).disc(), 229);
        assert_eq!(f(1, 0, -4, -1).hessian(), Hessian { p: 12, q: 9, r: 16 });
        assert_eq!(f(1, 0, 0, 0).hessian(), Hessian { p: 0, q: 0, r: 0 });
        assert_eq!(f(1, -1, -2, 1).hessian(), Hessian { p: 7, q: -7, r: 7 });
        let g = f(3, -7, 11, 5);
        assert_eq!(g.hessian().disc(), -3 * g.disc());
        assert_eq!(disc_cubic(&g), BigInt::from(g.disc()));
    }

    #[test]
    fn quintic_discriminants() {
        assert_eq!(poly_disc(&[1, -1, -4, 3, 3, -1]).unwrap(), BigInt::from(14641));
        assert_eq!(poly_disc(&[1, -1, -2, 1]).unwrap(), BigInt::from(49));
        assert_eq!(poly_disc(&[1, 0, -1]).unwrap(), BigInt::from(4));
        assert!(poly_disc(&[0, 1]).is_err());
    }

    #[test]
    fn reducedness_examples() {
        assert!(is_reduced(&f(1, 1, -2, -1)).unwrap());
        assert!(!is_reduced(&f(1, -1, -2, 1)).unwrap());
        assert!(!is_reduced(&f(-1, -1, 2, 1)).unwrap());
        assert!(is_reduced(&f(1, 0, 0, 1)).is_err());
        assert_eq!(reduce(&f(1, -1, -2, 1)).unwrap(), f(1, 1, -2, -1));
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible(&f(1, 0, -4, -1)).unwrap());
        assert!(!is_irreducible(&f(1, 0, 0, 0)).unwrap());
        assert!(is_irreducible(&f(1, -1, -2, 1)).unwrap());
        assert!(!is_irreducible(&f(2, -3, 0, 1)).unwrap());
        assert!(is_irreducible(&f(0, 0, 0, 0)).is_err());
    }

    #[test]
    fn maximality_examples() {
        assert!(is_maximal_at(&f(1, 0, -4, -1), 2).unwrap());
        assert!(is_maximal(&f(1, 0, -4, -1)).unwrap());
        let g = f(1, 0, -39, -26);
        assert_eq!(g.disc(), 219024);
        assert!(!is_maximal_at(&g, 2).unwrap());
        assert!(is_maximal_at(&g, 3).unwrap());
        assert!(!is_maximal_at(&f(2, 2, 2, 2), 2).unwrap());
        assert!(is_maximal_at(&g, 4).is_err());
    }

    #[test]
    fn large_prime_root_finding_matches_enumeration() {
        // (x - 5)²(x + 7) mod 67 and friends: compare gcd path to brute force
        for p in [67u64, 71, 101] {
            for g in [f(1, -3, -45, 175), f(1, 0, -39, -26), f(4, 1, -9, 3), f(67, 1, 5, 2)] {
                let fast = repeated_roots(&g, p);
                let pp = p as u128;
                let mut slow = Vec::new();
                if modp(g.a, pp) == 0 && modp(g.b, pp) == 0 {
                    slow.push((1, 0));
                }
                for u in 0..pp {
                    if eval_mod(&g, u, 1, pp) == 0 && grad_mod(&g, u, 1, pp) == (0, 0) {
                        slow.push((u, 1));
                    }
                }
                assert_eq!(fast, slow, "{g} mod {p}");
            }
        }
    }

    #[test]
    fn dedekind_examples() {
        let f: Vec<BigInt> = [1, -1, -4, 3, 3, -1].iter().map(|&c| BigInt::from(c)).collect();
        assert!(dedekind_maximal(&f, 11));
        // Z[7√2] has index 7 in Z[√2]
        let g: Vec<BigInt> = [1, 0, -98].iter().map(|&c| BigInt::from(c)).collect();
        assert!(!dedekind_maximal(&g, 7));
    }

    #[test]
    fn square_divisors() {
        assert_eq!(square_prime_divisors(219024).unwrap(), vec![2, 3, 13]);
        assert_eq!(square_prime_divisors(229).unwrap(), Vec::<u64>::new());
        assert_eq!(square_prime_divisors(49).unwrap(), vec![7]);
        assert_eq!(square_prime_divisors(2 * 1_000_003u128 * 1_000_003).unwrap(), vec![1_000_003]);
    }

    #[test]
    fn small_scan() {
        let discs: Vec<i128> = scan(250).unwrap().iter().map(|r| r.disc).collect();
        assert_eq!(discs, vec![49, 81, 148, 169, 229]);
        assert_eq!(scan(50).unwrap().len(), 1);
    }

    #[test]
    fn reduced_forms_have_no_reduced_neighbours() {
        let mut bad = Vec::new();
        for a in 1..=3 {
            for b in -6..=6 {
                for c in -8..=8 {
                    for d in -8..=8 {
                        let g = CubicForm { a, b, c, d };
                        if g.disc() <= 0 || !reduced_unchecked(&g) || !is_irreducible(&g).unwrap() {
                            continue;
                        }
                        for delta in small_unimodular() {
                            let h = g.transform(&delta).unwrap();
                            if h != g && h.disc() > 0 && reduced_unchecked(&h) {
                                bad.push((g, h));
                            }
                        }
                    }
                }
            }
        }
        assert!(bad.is_empty(), "{:?}", &bad[..bad.len().min(10)]);
    }

    #[test]
    fn orbit_search_agrees() {
        let found = orbit_search(&f(1, -1, -2, 1), 6);
        assert_eq!(found.into_iter().collect::<Vec<_>>(), vec![f(1, 1, -2, -1)]);
    }
}
