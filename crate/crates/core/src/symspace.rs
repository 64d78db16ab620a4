//! Nondegenerate symmetric bilinear spaces over F2.
//!
//! A space is given by its Gram matrix `G` in some basis; the pairing is
//! `b(x, y) = x^T G y`. Isometries are square matrices acting on column
//! vectors (column `j` holds the image of the `j`-th coordinate vector), so
//! `M` is an isometry exactly when `M^T G M = G`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::f2linalg::{solve, BitMatrix, BitVector, EchelonBasis, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpaceType {
    Alternating,
    NonAltOdd,
    NonAltEven,
}

impl SpaceType {
    pub fn is_alternating(self) -> bool {
        self == SpaceType::Alternating
    }

    /// Type of a space of dimension `n` that is (non)alternating.
    pub fn for_dim(alternating: bool, n: usize) -> Result<SpaceType> {
        match (alternating, n % 2) {
            (true, 0) => Ok(SpaceType::Alternating),
            (true, _) => Err(Error::Inadmissible(format!("an alternating space cannot have odd dimension {n}"))),
            (false, 1) => Ok(SpaceType::NonAltOdd),
            (false, _) => Ok(SpaceType::NonAltEven),
        }
    }

    pub fn check_dim(self, n: usize) -> Result<()> {
        let ok = match self {
            SpaceType::Alternating => n >= 2 && n % 2 == 0,
            SpaceType::NonAltOdd => n % 2 == 1,
            SpaceType::NonAltEven => n >= 2 && n % 2 == 0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Inadmissible(format!("{self} space of dimension {n}")))
        }
    }
}

impl fmt::Display for SpaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceType::Alternating => "alternating",
            SpaceType::NonAltOdd => "nonalternating-odd",
            SpaceType::NonAltEven => "nonalternating-even",
        })
    }
}

/// A space type together with its dimension, written `alt:4` or `nonalt:3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpaceSpec {
    pub ty: SpaceType,
    pub n: usize,
}

impl SpaceSpec {
    pub fn new(ty: SpaceType, n: usize) -> Result<Self> {
        ty.check_dim(n)?;
        Ok(SpaceSpec { ty, n })
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.ty.is_alternating() { "alt" } else { "nonalt" };
        write!(f, "{tag}:{}", self.n)
    }
}

impl FromStr for SpaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (tag, n) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("expected alt:N or nonalt:N, got {s:?}")))?;
        let n: usize = n.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad dimension in {s:?}")))?;
        let alternating = match tag.trim() {
            "alt" => true,
            "nonalt" => false,
            other => return Err(Error::InvalidArgument(format!("unknown space tag {other:?}"))),
        };
        SpaceSpec::new(SpaceType::for_dim(alternating, n)?, n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymSpace {
    n: usize,
    gram: BitMatrix,
    ty: SpaceType,
    std_basis: BitMatrix,
    orthonormal: Option<BitMatrix>,
    vcan: Option<BitVector>,
}

/// Gram matrix of the standard model: hyperbolic blocks for alternating
/// spaces, the identity otherwise.
pub fn standard_gram(ty: SpaceType, n: usize) -> Result<BitMatrix> {
    ty.check_dim(n)?;
    Ok(match ty {
        SpaceType::Alternating => hyperbolic_gram(n / 2),
        _ => BitMatrix::identity(n),
    })
}

/// `m` hyperbolic planes with basis order `e1, f1, e2, f2, ..`.
pub fn hyperbolic_gram(m: usize) -> BitMatrix {
    let mut g = BitMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        g.set(2 * i, 2 * i + 1, true);
        g.set(2 * i + 1, 2 * i, true);
    }
    g
}

/// Smallest nonzero vector of a nonzero subspace: its last canonical basis row.
fn smallest_nonzero(c: &Subspace) -> BitVector {
    c.basis_vectors().last().expect("nonzero subspace").clone()
}

/// Smallest vector `y` in `c` with `ell . y = 1`, where `ell` is given as a vector
/// and the pairing is the standard dot product.
fn smallest_with_functional(c: &Subspace, ell: &BitVector) -> Option<BitVector> {
    let hit = c.basis_vectors().iter().find(|r| r.dot(ell))?.clone();
    let ker = meet_kernel(c, ell);
    Some(ker.reduce(&hit))
}

/// `c ∩ {x : ell . x = 0}`.
fn meet_kernel(c: &Subspace, ell: &BitVector) -> Subspace {
    let rows = c.basis_vectors();
    let Some(first) = rows.iter().position(|r| r.dot(ell)) else { return c.clone() };
    let mut out = Vec::with_capacity(rows.len() - 1);
    for (i, r) in rows.iter().enumerate() {
        if i == first {
            continue;
        }
        out.push(if r.dot(ell) { r.xor(&rows[first]) } else { r.clone() });
    }
    Subspace::span(c.ambient_dim(), &out).expect("same ambient dimension")
}

impl SymSpace {
    /// Classifies a nondegenerate symmetric Gram matrix and computes its
    /// standard basis and canonical vector.
    pub fn classify(gram: BitMatrix) -> Result<SymSpace> {
        let n = gram.nrows();
        if gram.ncols() != n {
            return Err(Error::NotSquare);
        }
        if !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if !gram.is_invertible() {
            return Err(Error::Singular);
        }
        let alternating = (0..n).all(|i| !gram.get(i, i));
        let ty = SpaceType::for_dim(alternating, n)?;
        let mut space =
            SymSpace { n, gram, ty, std_basis: BitMatrix::zeros(0, n), orthonormal: None, vcan: None };
        if alternating {
            let basis = space.symplectic_basis(&Subspace::full(n));
            space.std_basis = BitMatrix::from_rows(n, basis)?;
        } else {
            let ortho = space.orthonormal_basis();
            let mut vcan = BitVector::zeros(n);
            for v in &ortho {
                vcan.xor_assign(v);
            }
            space.std_basis = BitMatrix::from_rows(n, standard_from_orthonormal(&ortho, &vcan))?;
            space.orthonormal = Some(BitMatrix::from_rows(n, ortho)?);
            space.vcan = Some(vcan);
        }
        Ok(space)
    }

    /// The standard model of the given type and dimension.
    pub fn standard(ty: SpaceType, n: usize) -> Result<SymSpace> {
        SymSpace::classify(standard_gram(ty, n)?)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn gram(&self) -> &BitMatrix {
        &self.gram
    }

    pub fn space_type(&self) -> SpaceType {
        self.ty
    }

    pub fn spec(&self) -> SpaceSpec {
        SpaceSpec { ty: self.ty, n: self.n }
    }

    /// Standard basis as rows: hyperbolic pairs `e1, f1, e2, f2, ..` followed,
    /// for nonalternating spaces, by `vcan` (odd dimension) or `vcan, v_n`
    /// (even dimension).
    pub fn std_basis(&self) -> &BitMatrix {
        &self.std_basis
    }

    pub fn orthonormal_basis_rows(&self) -> Option<&BitMatrix> {
        self.orthonormal.as_ref()
    }

    pub fn vcan(&self) -> Option<&BitVector> {
        self.vcan.as_ref()
    }

    pub fn pair(&self, x: &BitVector, y: &BitVector) -> bool {
        self.gram.pair(x, y)
    }

    pub fn norm(&self, x: &BitVector) -> bool {
        self.gram.pair(x, x)
    }

    /// Gram matrix of a list of vectors.
    pub fn gram_of(&self, rows: &[BitVector]) -> BitMatrix {
        let k = rows.len();
        let mut g = BitMatrix::zeros(k, k);
        for i in 0..k {
            let gi = self.gram.vec_mul(&rows[i]);
            for (j, r) in rows.iter().enumerate() {
                if gi.dot(r) {
                    g.set(i, j, true);
                }
            }
        }
        g
    }

    fn check_sub(&self, u: &Subspace) -> Result<()> {
        if u.ambient_dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: u.ambient_dim() });
        }
        Ok(())
    }

    /// Vector `d` with `b(v, v) = d . v` for all `v`.
    fn diagonal(&self) -> BitVector {
        BitVector::from_bools(&(0..self.n).map(|i| self.gram.get(i, i)).collect::<Vec<_>>())
    }

    /// The isotropic vectors `{v : b(v, v) = 0}`.
    pub fn alternating_subspace(&self) -> Subspace {
        meet_kernel(&Subspace::full(self.n), &self.diagonal())
    }

    pub fn orth_complement(&self, u: &Subspace) -> Result<Subspace> {
        self.check_sub(u)?;
        let rows: Vec<BitVector> = u.basis_vectors().iter().map(|r| self.gram.vec_mul(r)).collect();
        Ok(BitMatrix::from_rows(self.n, rows)?.kernel())
    }

    /// `U ∩ U^⊥`.
    pub fn radical(&self, u: &Subspace) -> Result<Subspace> {
        u.meet(&self.orth_complement(u)?)
    }

    pub fn is_totally_isotropic(&self, u: &Subspace) -> Result<bool> {
        self.check_sub(u)?;
        Ok(self.gram_of(u.basis_vectors()).is_zero())
    }

    pub fn is_isometry(&self, m: &BitMatrix) -> Result<bool> {
        if m.nrows() != self.n || m.ncols() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: m.nrows().max(m.ncols()) });
        }
        Ok(m.transpose().mul(&self.gram).mul(m) == self.gram && m.is_invertible())
    }

    /// Orthonormal basis built greedily: at each step take the smallest vector of
    /// length 1 in the remaining space that does not leave an alternating
    /// remainder, then pass to its orthogonal complement.
    fn orthonormal_basis(&self) -> Vec<BitVector> {
        let d = self.diagonal();
        let mut c = Subspace::full(self.n);
        let mut out = Vec::with_capacity(self.n);
        while c.dim() > 0 {
            let ker = meet_kernel(&c, &d);
            let hit = c.basis_vectors().iter().find(|r| r.dot(&d)).expect("nonalternating remainder").clone();
            let mut v = ker.reduce(&hit);
            if ker.dim() > 0 && ker.basis_vectors().iter().all(|k| !self.pair(&v, k)) {
                v.xor_assign(&smallest_nonzero(&ker));
            }
            c = meet_kernel(&c, &self.gram.vec_mul(&v));
            out.push(v);
        }
        out
    }

    /// Symplectic basis `x1, y1, x2, y2, ..` of a nondegenerate alternating
    /// subspace `c`, choosing each `x` as the smallest nonzero vector and `y`
    /// as the smallest partner.
    fn symplectic_basis(&self, c: &Subspace) -> Vec<BitVector> {
        symplectic_in(&self.gram, c)
    }

    /// Extends an isometry `sigma` between subspaces to an isometry of the whole
    /// space. `domain` lists a basis of `W0` as rows and `images` the rows
    /// `sigma(domain[i])`.
    pub fn witt_extend(&self, domain: &BitMatrix, images: &BitMatrix) -> Result<BitMatrix> {
        if domain.ncols() != self.n || images.ncols() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: domain.ncols().max(images.ncols()) });
        }
        if domain.nrows() != images.nrows() {
            return Err(Error::DimensionMismatch { expected: domain.nrows(), found: images.nrows() });
        }
        if domain.rank() != domain.nrows() {
            return Err(Error::LinearlyDependent);
        }
        let w0 = Subspace::from_matrix(domain);
        let w0p = Subspace::from_matrix(images);
        if let Some(vcan) = &self.vcan {
            let inside = w0.contains(vcan)?;
            if inside != w0p.contains(vcan)? {
                return Err(Error::CanonicalMembershipMismatch);
            }
            if inside {
                let c = solve(&domain.transpose(), vcan).expect("vcan lies in the domain");
                if images.vec_mul(&c) != *vcan {
                    return Err(Error::CanonicalNotFixed);
                }
            }
        }
        if self.gram_of(domain.rows()) != self.gram_of(images.rows()) || images.rank() != images.nrows() {
            return Err(Error::NotIsometry);
        }

        let (src, dst) = match self.ty {
            SpaceType::Alternating => {
                extend_in_alternating(&self.gram, &Subspace::full(self.n), domain.rows(), images.rows())
            }
            SpaceType::NonAltOdd => {
                extend_odd(&self.gram, self.vcan.as_ref().unwrap(), domain.rows(), images.rows())
            }
            SpaceType::NonAltEven => {
                let n = self.n;
                let big = self.gram.block_diag(&BitMatrix::identity(1));
                let u = BitVector::unit(n + 1, n);
                let lift = |v: &BitVector| v.concat(&BitVector::zeros(1));
                let mut dom: Vec<BitVector> = domain.rows().iter().map(lift).collect();
                let mut img: Vec<BitVector> = images.rows().iter().map(lift).collect();
                dom.push(u.clone());
                img.push(u);
                let vcan = lift(self.vcan.as_ref().unwrap()).xor(&BitVector::unit(n + 1, n));
                let m = matrix_from_bases(&extend_odd(&big, &vcan, &dom, &img));
                let rows: Vec<BitVector> = m.rows()[..n].iter().map(|r| r.slice(0, n)).collect();
                let m = BitMatrix::from_rows(n, rows)?;
                return Ok(m);
            }
        };
        Ok(matrix_from_bases(&(src, dst)))
    }

    /// Every isometry of the space, by column-wise backtracking. Only for small `n`.
    pub fn brute_isometries(&self) -> Result<Vec<BitMatrix>> {
        const LIMIT: usize = 6;
        if self.n > LIMIT {
            return Err(Error::TooLarge { dim: self.n, limit: LIMIT });
        }
        let n = self.n;
        let all: Vec<BitVector> = (1u64..1 << n).map(|m| BitVector::from_mask(n, m)).collect();
        let mut out = Vec::new();
        let mut cols: Vec<BitVector> = Vec::with_capacity(n);
        self.isometry_dfs(&all, &mut cols, &mut out);
        Ok(out)
    }

    fn isometry_dfs(&self, all: &[BitVector], cols: &mut Vec<BitVector>, out: &mut Vec<BitMatrix>) {
        let j = cols.len();
        if j == self.n {
            let m = BitMatrix::from_rows(self.n, cols.clone()).unwrap().transpose();
            if m.is_invertible() {
                out.push(m);
            }
            return;
        }
        for v in all {
            if (0..=j).all(|i| {
                let other = if i == j { v } else { &cols[i] };
                self.pair(other, v) == self.gram.get(i, j)
            }) {
                cols.push(v.clone());
                self.isometry_dfs(all, cols, out);
                cols.pop();
            }
        }
    }
}

fn standard_from_orthonormal(v: &[BitVector], vcan: &BitVector) -> Vec<BitVector> {
    let n = v.len();
    let tail_end = if n % 2 == 1 { n } else { n - 1 };
    let pairs = if n % 2 == 1 { (n - 1) / 2 } else { n / 2 - 1 };
    let mut out = Vec::with_capacity(n);
    for i in 0..pairs {
        let e = v[2 * i].xor(&v[2 * i + 1]);
        let mut f = BitVector::zeros(vcan.dim());
        for w in &v[2 * i + 1..tail_end] {
            f.xor_assign(w);
        }
        out.push(e);
        out.push(f);
    }
    out.push(vcan.clone());
    if n % 2 == 0 {
        out.push(v[n - 1].clone());
    }
    out
}

/// Column-convention matrix sending each `src[i]` to `dst[i]`; `src` must be a basis.
fn matrix_from_bases((src, dst): &(Vec<BitVector>, Vec<BitVector>)) -> BitMatrix {
    let n = src.len();
    let r = BitMatrix::from_rows(n, src.clone()).unwrap();
    let rp = BitMatrix::from_rows(n, dst.clone()).unwrap();
    r.inverse().expect("source vectors form a basis").mul(&rp).transpose()
}

fn pair(gram: &BitMatrix, x: &BitVector, y: &BitVector) -> bool {
    gram.pair(x, y)
}

/// Extension inside a nondegenerate alternating subspace `c`. Returns matching
/// bases of `c`: the first list extends `dom`, the second extends `img`.
fn extend_in_alternating(
    gram: &BitMatrix,
    c: &Subspace,
    dom: &[BitVector],
    img: &[BitVector],
) -> (Vec<BitVector>, Vec<BitVector>) {
    // Bring the domain into symplectic-plus-radical shape, mirroring every
    // operation on the images.
    let mut d: Vec<BitVector> = dom.to_vec();
    let mut e: Vec<BitVector> = img.to_vec();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut free: Vec<usize> = (0..d.len()).collect();
    'outer: loop {
        for a in 0..free.len() {
            for b in a + 1..free.len() {
                let (i, j) = (free[a], free[b]);
                if pair(gram, &d[i], &d[j]) {
                    free.retain(|&t| t != i && t != j);
                    for &l in &free {
                        let alpha = pair(gram, &d[l], &d[j]);
                        let beta = pair(gram, &d[l], &d[i]);
                        if alpha {
                            let (x, xe) = (d[i].clone(), e[i].clone());
                            d[l].xor_assign(&x);
                            e[l].xor_assign(&xe);
                        }
                        if beta {
                            let (y, ye) = (d[j].clone(), e[j].clone());
                            d[l].xor_assign(&y);
                            e[l].xor_assign(&ye);
                        }
                    }
                    pairs.push((i, j));
                    continue 'outer;
                }
            }
        }
        break;
    }
    let radical = free;

    let complete = |vecs: &[BitVector]| -> Vec<BitVector> {
        let mut basis: Vec<BitVector> = Vec::with_capacity(c.dim());
        for &(i, j) in &pairs {
            basis.push(vecs[i].clone());
            basis.push(vecs[j].clone());
        }
        let known: Vec<BitVector> =
            pairs.iter().flat_map(|&(i, j)| [vecs[i].clone(), vecs[j].clone()]).chain(radical.iter().map(|&i| vecs[i].clone())).collect();
        let mut partners: Vec<BitVector> = Vec::with_capacity(radical.len());
        let cb = c.basis_vectors();
        for (idx, _) in radical.iter().enumerate() {
            // t in c with b(t, known) prescribed: 1 against the idx-th radical vector, 0 elsewhere
            let rows: Vec<BitVector> = known
                .iter()
                .map(|k| BitVector::from_bools(&cb.iter().map(|r| pair(gram, k, r)).collect::<Vec<_>>()))
                .collect();
            let mut rhs = BitVector::zeros(known.len());
            rhs.set(2 * pairs.len() + idx, true);
            let coeffs = solve(&BitMatrix::from_rows(cb.len(), rows).unwrap(), &rhs).expect("nondegenerate");
            let mut t = BitVector::zeros(gram.ncols());
            for i in coeffs.ones_iter() {
                t.xor_assign(&cb[i]);
            }
            partners.push(t);
        }
        for l in 0..partners.len() {
            for j in 0..l {
                if pair(gram, &partners[j], &partners[l]) {
                    let z = vecs[radical[j]].clone();
                    partners[l].xor_assign(&z);
                }
            }
        }
        for (idx, &i) in radical.iter().enumerate() {
            basis.push(vecs[i].clone());
            basis.push(partners[idx].clone());
        }
        let span = Subspace::span(gram.ncols(), &basis).unwrap();
        let perp_rows: Vec<BitVector> = span.basis_vectors().iter().map(|r| gram.vec_mul(r)).collect();
        let perp = BitMatrix::from_rows(gram.ncols(), perp_rows).unwrap().kernel();
        let rest = perp.meet(c).unwrap();
        basis.extend(symplectic_in(gram, &rest));
        basis
    };
    (complete(&d), complete(&e))
}

fn symplectic_in(gram: &BitMatrix, c: &Subspace) -> Vec<BitVector> {
    let mut c = c.clone();
    let mut out = Vec::with_capacity(c.dim());
    while c.dim() > 0 {
        let x = smallest_nonzero(&c);
        let y = smallest_with_functional(&c, &gram.vec_mul(&x)).expect("nondegenerate subspace");
        c = meet_kernel(&meet_kernel(&c, &gram.vec_mul(&x)), &gram.vec_mul(&y));
        out.push(x);
        out.push(y);
    }
    out
}

/// Extension in an odd nonalternating space: project into `vcan^⊥`, extend
/// there, and fix `vcan`.
fn extend_odd(
    gram: &BitMatrix,
    vcan: &BitVector,
    dom: &[BitVector],
    img: &[BitVector],
) -> (Vec<BitVector>, Vec<BitVector>) {
    let n = gram.ncols();
    let project = |v: &BitVector| if pair(gram, v, v) { v.xor(vcan) } else { v.clone() };
    let mut ech = EchelonBasis::new(n);
    let mut pd = Vec::new();
    let mut pi = Vec::new();
    for (d, e) in dom.iter().zip(img) {
        let p = project(d);
        if ech.insert(&p) {
            pd.push(p);
            pi.push(project(e));
        }
    }
    let valt = meet_kernel(&Subspace::full(n), &gram.vec_mul(vcan));
    let (mut src, mut dst) = extend_in_alternating(gram, &valt, &pd, &pi);
    src.push(vcan.clone());
    dst.push(vcan.clone());
    (src, dst)
}

fn q_power(q: &BigUint, e: usize) -> BigUint {
    num_traits::pow(q.clone(), e)
}

fn prod_minus_one(q: &BigUint, count: usize, step: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 1..=count {
        acc *= q_power(q, step * i) - BigUint::one();
    }
    acc
}

pub fn check_q(q: u64) -> Result<()> {
    if q < 2 || !q.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(q));
    }
    Ok(())
}

/// `|Aut(V)|`, or with `iso = Some((k, vcan_in_u))` the order of the stabilizer
/// of a `k`-dimensional totally isotropic subspace `U`.
pub fn aut_order(ty: SpaceType, n: usize, q: u64, iso: Option<(usize, bool)>) -> Result<BigUint> {
    check_q(q)?;
    ty.check_dim(n)?;
    let qb = BigUint::from(q);
    let m = n / 2;
    let (k, flag) = iso.unwrap_or((0, false));
    let bad = || Error::Inadmissible(format!("{ty} space of dimension {n} with k = {k}, vcan in U = {flag}"));
    let value = match ty {
        SpaceType::Alternating | SpaceType::NonAltOdd => {
            if flag || k > m {
                return Err(bad());
            }
            q_power(&qb, m * m) * prod_minus_one(&qb, k, 1) * prod_minus_one(&qb, m - k, 2)
        }
        SpaceType::NonAltEven => {
            if iso.is_none() {
                q_power(&qb, m * m) * prod_minus_one(&qb, m - 1, 2)
            } else if flag {
                if k == 0 || k > m {
                    return Err(bad());
                }
                q_power(&qb, m * m) * prod_minus_one(&qb, k - 1, 1) * prod_minus_one(&qb, m - k, 2)
            } else {
                if k >= m {
                    return Err(bad());
                }
                q_power(&qb, m * m - k) * prod_minus_one(&qb, k, 1) * prod_minus_one(&qb, m - k - 1, 2)
            }
        }
    };
    debug_assert!(!value.is_zero());
    Ok(value)
}

/// Uniformly random invertible `n x n` matrix (rejection sampling).
pub fn random_invertible<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BitMatrix {
    loop {
        let rows: Vec<BitVector> = (0..n).map(|_| BitVector::random(n, rng)).collect();
        let m = BitMatrix::from_rows(n, rows).unwrap();
        if m.is_invertible() {
            return m;
        }
    }
}

/// Gram matrix of the standard model written in a random basis.
pub fn random_gram<R: Rng + ?Sized>(ty: SpaceType, n: usize, rng: &mut R) -> Result<BitMatrix> {
    let p = random_invertible(n, rng);
    Ok(p.transpose().mul(&standard_gram(ty, n)?).mul(&p))
}

/// A random isometry of `v`, obtained by comparing the standard basis of `v`
/// with the transported standard basis of a randomly rebased copy.
pub fn random_isometry<R: Rng + ?Sized>(v: &SymSpace, rng: &mut R) -> BitMatrix {
    let p = random_invertible(v.n, rng);
    let other = SymSpace::classify(p.transpose().mul(&v.gram).mul(&p)).expect("rebased gram is valid");
    let src = v.std_basis.rows().to_vec();
    let dst: Vec<BitVector> = other.std_basis.rows().iter().map(|r| p.mul_vec(r)).collect();
    matrix_from_bases(&(src, dst))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WittReport {
    pub trials: usize,
    pub extended: usize,
    pub rejected: usize,
    pub failures: Vec<String>,
}

impl WittReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Error that the hypotheses of the extension theorem predict for an instance,
/// or `None` when an extension must exist.
fn expected_witt_error(v: &SymSpace, dom: &[BitVector], img: &[BitVector]) -> Option<Error> {
    let n = v.n;
    let mut ech = EchelonBasis::new(n);
    if !dom.iter().all(|d| ech.insert(d)) {
        return Some(Error::LinearlyDependent);
    }
    if let Some(vcan) = &v.vcan {
        // vcan = sum of a subset of the domain vectors, found by trying all subsets
        let d = dom.len();
        let hit = (0u64..1 << d).find(|&mask| {
            let mut acc = BitVector::zeros(n);
            for i in (0..d).filter(|i| mask >> i & 1 == 1) {
                acc.xor_assign(&dom[i]);
            }
            acc == *vcan
        });
        let in_img = (0u64..1 << d).any(|mask| {
            let mut acc = BitVector::zeros(n);
            for i in (0..d).filter(|i| mask >> i & 1 == 1) {
                acc.xor_assign(&img[i]);
            }
            acc == *vcan
        });
        if hit.is_some() != in_img {
            return Some(Error::CanonicalMembershipMismatch);
        }
        if let Some(mask) = hit {
            let mut acc = BitVector::zeros(n);
            for i in (0..d).filter(|i| mask >> i & 1 == 1) {
                acc.xor_assign(&img[i]);
            }
            if acc != *vcan {
                return Some(Error::CanonicalNotFixed);
            }
        }
    }
    let same_gram = (0..dom.len())
        .all(|i| (0..dom.len()).all(|j| v.pair(&dom[i], &dom[j]) == v.pair(&img[i], &img[j])));
    let mut ech = EchelonBasis::new(n);
    if !same_gram || !img.iter().all(|d| ech.insert(d)) {
        return Some(Error::NotIsometry);
    }
    None
}

/// Randomized check of `witt_extend` on spaces of the given type with
/// dimension at most `max_dim`. Half of the instances restrict a random
/// isometry to a random subspace; the rest use arbitrary images, which mostly
/// violate some hypothesis and must be rejected with the matching error.
pub fn witt_selftest(ty: SpaceType, max_dim: usize, trials: usize, seed: u64) -> WittReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims: Vec<usize> = (1..=max_dim).filter(|&n| ty.check_dim(n).is_ok()).collect();
    let mut report = WittReport { trials, ..Default::default() };
    if dims.is_empty() {
        report.failures.push(format!("no admissible dimension up to {max_dim} for {ty}"));
        return report;
    }
    for t in 0..trials {
        let n = dims[rng.gen_range(0..dims.len())];
        let v = SymSpace::classify(random_gram(ty, n, &mut rng).unwrap()).unwrap();
        let cap = if rng.gen_bool(0.5) { n.min(2) } else { n };
        let d = rng.gen_range(0..=cap);
        let dom: Vec<BitVector> = if rng.gen_bool(0.9) {
            let mut ech = EchelonBasis::new(n);
            let mut out = Vec::new();
            while out.len() < d {
                let x = BitVector::random(n, &mut rng);
                if ech.insert(&x) {
                    out.push(x);
                }
            }
            out
        } else {
            (0..d).map(|_| BitVector::random(n, &mut rng)).collect()
        };
        let img: Vec<BitVector> = if rng.gen_bool(0.5) {
            let g = random_isometry(&v, &mut rng);
            dom.iter().map(|x| g.mul_vec(x)).collect()
        } else {
            (0..d).map(|_| BitVector::random(n, &mut rng)).collect()
        };
        let expected = expected_witt_error(&v, &dom, &img);
        let dm = BitMatrix::from_rows(n, dom.clone()).unwrap();
        let im = BitMatrix::from_rows(n, img.clone()).unwrap();
        match (v.witt_extend(&dm, &im), expected) {
            (Ok(m), None) => {
                let restricts = dom.iter().zip(&img).all(|(x, y)| m.mul_vec(x) == *y);
                if v.is_isometry(&m) == Ok(true) && restricts {
                    report.extended += 1;
                } else {
                    report.failures.push(format!("trial {t}: extension of {ty} dim {n} is wrong"));
                }
            }
            (Err(e), Some(exp)) if e == exp => report.rejected += 1,
            (got, exp) => report.failures.push(format!(
                "trial {t}: {ty} dim {n}, expected {:?}, got {:?}",
                exp,
                got.map(|_| "extension")
            )),
        }
    }
    report
}
