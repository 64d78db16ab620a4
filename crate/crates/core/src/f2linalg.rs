//! Bit-packed linear algebra over F2.
//!
//! Vectors store coordinate `i` in bit `i % 64` of word `i / 64`. The total
//! order on vectors is lexicographic on the coordinate tuple `(x_0, .., x_{n-1})`
//! with `x_0` most significant, so "smallest" always refers to that order.
//! Subspaces are kept in reduced row echelon form (pivot = first nonzero
//! coordinate), which makes equality and hashing structural.

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

const WORD: usize = 64;

fn word_count(dim: usize) -> usize {
    dim.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    dim: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(dim: usize) -> Self {
        BitVector { dim, words: vec![0; word_count(dim)] }
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.set(i, true);
        v
    }

    pub fn ones(dim: usize) -> Self {
        let mut v = Self::zeros(dim);
        for i in 0..dim {
            v.set(i, true);
        }
        v
    }

    /// Builds a vector from the low `dim` bits of `mask` (bit `i` is coordinate `i`).
    pub fn from_mask(dim: usize, mask: u64) -> Self {
        let mut v = Self::zeros(dim);
        if dim > 0 {
            let m = if dim >= WORD { mask } else { mask & ((1u64 << dim) - 1) };
            v.words[0] = m;
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Parses a string of `0`/`1` characters; whitespace is ignored.
    pub fn parse(s: &str) -> Result<Self> {
        let bits: Vec<bool> = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidArgument(format!("bad bit character {other:?}"))),
            })
            .collect::<Result<_>>()?;
        Ok(Self::from_bools(&bits))
    }

    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(dim);
        for w in v.words.iter_mut() {
            *w = rng.gen();
        }
        v.clear_tail();
        v
    }

    fn clear_tail(&mut self) {
        let r = self.dim % WORD;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.dim, "coordinate {i} out of range for dimension {}", self.dim);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.dim, "coordinate {i} out of range for dimension {}", self.dim);
        let bit = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= bit;
        } else {
            self.words[i / WORD] &= !bit;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the first nonzero coordinate.
    pub fn leading(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut v = self.clone();
        v.xor_assign(other);
        v
    }

    /// Standard dot product `sum x_i y_i` over F2.
    pub fn dot(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.dim, other.dim);
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + t)
                }
            })
        })
    }

    /// Packed coordinates as a single word; only valid for `dim <= 64`.
    pub fn to_mask(&self) -> u64 {
        assert!(self.dim <= WORD);
        self.words.first().copied().unwrap_or(0)
    }

    /// Concatenation `(self | other)`.
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut v = BitVector::zeros(self.dim + other.dim);
        for i in self.ones_iter() {
            v.set(i, true);
        }
        for i in other.ones_iter() {
            v.set(self.dim + i, true);
        }
        v
    }

    /// Coordinates `start..start + len`.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        assert!(start + len <= self.dim);
        let mut v = BitVector::zeros(len);
        for i in self.ones_iter().filter(|&i| i >= start && i < start + len) {
            v.set(i - start, true);
        }
        v
    }
}

impl Ord for BitVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim.cmp(&other.dim).then_with(|| {
            for (a, b) in self.words.iter().zip(&other.words) {
                let x = a ^ b;
                if x != 0 {
                    let bit = 1u64 << x.trailing_zeros();
                    // the vector with a 0 at the first differing coordinate is smaller
                    return if a & bit == 0 { Ordering::Less } else { Ordering::Greater };
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

/// Dense matrix over F2 stored as a list of row vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix { cols, rows: vec![BitVector::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        BitMatrix { cols: n, rows: (0..n).map(|i| BitVector::unit(n, i)).collect() }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.dim() != cols) {
            return Err(Error::DimensionMismatch { expected: cols, found: bad.dim() });
        }
        Ok(BitMatrix { cols, rows })
    }

    /// Parses rows of `0`/`1` strings, e.g. `["110", "011"]`.
    pub fn parse(rows: &[&str]) -> Result<Self> {
        let rows: Vec<BitVector> = rows.iter().map(|r| BitVector::parse(r)).collect::<Result<_>>()?;
        let cols = rows.first().map_or(0, |r| r.dim());
        Self::from_rows(cols, rows)
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value)
    }

    pub fn column(&self, j: usize) -> BitVector {
        let mut v = BitVector::zeros(self.nrows());
        for (i, r) in self.rows.iter().enumerate() {
            if r.get(j) {
                v.set(i, true);
            }
        }
        v
    }

    pub fn transpose(&self) -> BitMatrix {
        BitMatrix { cols: self.nrows(), rows: (0..self.cols).map(|j| self.column(j)).collect() }
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows() == self.cols && *self == self.transpose()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }

    /// `M v` for a column vector `v`.
    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.dim(), self.cols);
        let mut out = BitVector::zeros(self.nrows());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(v) {
                out.set(i, true);
            }
        }
        out
    }

    /// `v^T M` for a row vector `v`: the combination of rows selected by `v`.
    pub fn vec_mul(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.dim(), self.nrows());
        let mut out = BitVector::zeros(self.cols);
        for i in v.ones_iter() {
            out.xor_assign(&self.rows[i]);
        }
        out
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.nrows());
        BitMatrix { cols: other.cols, rows: self.rows.iter().map(|r| other.vec_mul(r)).collect() }
    }

    /// Bilinear pairing `x^T M y`.
    pub fn pair(&self, x: &BitVector, y: &BitVector) -> bool {
        self.vec_mul(x).dot(y)
    }

    pub fn rank(&self) -> usize {
        rref(self).1
    }

    pub fn inverse(&self) -> Option<BitMatrix> {
        let n = self.nrows();
        if n != self.cols {
            return None;
        }
        let aug: Vec<BitVector> =
            self.rows.iter().enumerate().map(|(i, r)| r.concat(&BitVector::unit(n, i))).collect();
        let (red, _) = rref(&BitMatrix { cols: 2 * n, rows: aug });
        let mut inv = Vec::with_capacity(n);
        for (i, r) in red.rows.iter().enumerate() {
            if r.slice(0, n) != BitVector::unit(n, i) {
                return None;
            }
            inv.push(r.slice(n, n));
        }
        Some(BitMatrix { cols: n, rows: inv })
    }

    pub fn is_invertible(&self) -> bool {
        self.nrows() == self.cols && self.rank() == self.cols
    }

    /// Right kernel `{x : M x = 0}` as a subspace of F2^cols.
    pub fn kernel(&self) -> Subspace {
        let (red, rank) = rref(self);
        let pivots: Vec<usize> = red.rows[..rank].iter().map(|r| r.leading().unwrap()).collect();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = BitVector::unit(self.cols, free);
            for (r, &p) in red.rows[..rank].iter().zip(&pivots) {
                if r.get(free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        Subspace::span(self.cols, &basis).expect("kernel vectors have matching dimension")
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.cols });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(BitMatrix { cols: self.cols, rows })
    }

    /// Block-diagonal matrix `diag(self, other)`.
    pub fn block_diag(&self, other: &BitMatrix) -> BitMatrix {
        let cols = self.cols + other.cols;
        let mut rows = Vec::with_capacity(self.nrows() + other.nrows());
        for r in &self.rows {
            rows.push(r.concat(&BitVector::zeros(other.cols)));
        }
        for r in &other.rows {
            rows.push(BitVector::zeros(self.cols).concat(r));
        }
        BitMatrix { cols, rows }
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix {}x{} [", self.nrows(), self.cols)?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("]")
    }
}

/// Reduced row echelon form; zero rows are moved to the bottom.
pub fn rref(m: &BitMatrix) -> (BitMatrix, usize) {
    let mut rows = m.rows.clone();
    let mut rank = 0;
    for col in 0..m.cols {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i].get(col)) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && r.get(col) {
                r.xor_assign(&pivot);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    (BitMatrix { cols: m.cols, rows }, rank)
}

/// Solves `A x = rhs` over F2, returning one solution if the system is consistent.
pub fn solve(a: &BitMatrix, rhs: &BitVector) -> Option<BitVector> {
    assert_eq!(a.nrows(), rhs.dim());
    let n = a.ncols();
    let aug: Vec<BitVector> = a
        .rows()
        .iter()
        .enumerate()
        .map(|(i, r)| r.concat(&BitVector::from_bools(&[rhs.get(i)])))
        .collect();
    let (red, rank) = rref(&BitMatrix { cols: n + 1, rows: aug });
    let mut x = BitVector::zeros(n);
    for r in &red.rows()[..rank] {
        let p = r.leading().unwrap();
        if p == n {
            return None;
        }
        if r.get(n) {
            x.set(p, true);
        }
    }
    Some(x)
}

/// Incrementally maintained echelon basis, used for rank tests while
/// vectors are being collected.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    dim: usize,
    rows: Vec<BitVector>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(dim: usize) -> Self {
        EchelonBasis { dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &BitVector) -> BitVector {
        let mut v = v.clone();
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(r);
            }
        }
        v
    }

    /// Adds `v` if it is independent of the current rows; returns whether it was added.
    pub fn insert(&mut self, v: &BitVector) -> bool {
        assert_eq!(v.dim(), self.dim);
        let r = self.reduce(v);
        match r.leading() {
            None => false,
            Some(p) => {
                self.rows.push(r);
                self.pivots.push(p);
                true
            }
        }
    }

    pub fn into_subspace(self) -> Subspace {
        Subspace::span(self.dim, &self.rows).expect("rows share the basis dimension")
    }
}

/// A subspace of F2^n held in canonical reduced row echelon form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: BitMatrix,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace { ambient: n, basis: BitMatrix::zeros(0, n) }
    }

    pub fn full(n: usize) -> Self {
        Subspace { ambient: n, basis: BitMatrix::identity(n) }
    }

    pub fn span(ambient: usize, vectors: &[BitVector]) -> Result<Self> {
        let m = BitMatrix::from_rows(ambient, vectors.to_vec())?;
        Ok(Self::from_matrix(&m))
    }

    /// Row space of `m`.
    pub fn from_matrix(m: &BitMatrix) -> Self {
        let (mut red, rank) = rref(m);
        red.rows.truncate(rank);
        Subspace { ambient: m.cols, basis: red }
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &BitMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> &[BitVector] {
        self.basis.rows()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis.rows.iter().map(|r| r.leading().unwrap()).collect()
    }

    fn check_ambient(&self, n: usize) -> Result<()> {
        if self.ambient != n {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: n });
        }
        Ok(())
    }

    /// Reduces `v` modulo the subspace; the result is the smallest element of
    /// the coset `v + self`.
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        let mut v = v.clone();
        for r in self.basis.rows() {
            let p = r.leading().unwrap();
            if v.get(p) {
                v.xor_assign(r);
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVector) -> Result<bool> {
        self.check_ambient(v.dim())?;
        Ok(self.reduce(v).is_zero())
    }

    /// Coefficients of `v` with respect to the canonical basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &BitVector) -> Option<BitVector> {
        if v.dim() != self.ambient {
            return None;
        }
        let mut rest = v.clone();
        let mut coeffs = BitVector::zeros(self.dim());
        for (i, r) in self.basis.rows().iter().enumerate() {
            let p = r.leading().unwrap();
            if rest.get(p) {
                rest.xor_assign(r);
                coeffs.set(i, true);
            }
        }
        rest.is_zero().then_some(coeffs)
    }

    pub fn join(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other.ambient)?;
        Ok(Subspace::from_matrix(&self.basis.stack(&other.basis)?))
    }

    /// Intersection, computed from the left kernel of the stacked bases.
    pub fn meet(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other.ambient)?;
        let a = self.dim();
        let total = a + other.dim();
        // Track combinations alongside the stacked rows.
        let rows: Vec<BitVector> = self
            .basis
            .rows()
            .iter()
            .chain(other.basis.rows())
            .enumerate()
            .map(|(i, r)| r.concat(&BitVector::unit(total, i)))
            .collect();
        let (red, _) = rref(&BitMatrix { cols: self.ambient + total, rows });
        let mut out = Vec::new();
        for r in red.rows() {
            if r.slice(0, self.ambient).is_zero() && !r.is_zero() {
                let combo = r.slice(self.ambient, total);
                let mut v = BitVector::zeros(self.ambient);
                for i in combo.ones_iter().filter(|&i| i < a) {
                    v.xor_assign(self.basis.row(i));
                }
                out.push(v);
            }
        }
        Subspace::span(self.ambient, &out)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other.ambient)?;
        Ok(self.basis.rows().iter().all(|r| other.reduce(r).is_zero()))
    }

    /// A complement of `self` inside `sup`, spanned by the earliest canonical
    /// basis rows of `sup` that are independent of `self`.
    pub fn complement_in(&self, sup: &Subspace) -> Result<Subspace> {
        self.check_ambient(sup.ambient)?;
        if !self.is_subspace_of(sup)? {
            return Err(Error::InvalidArgument("complement requested outside a containing subspace".into()));
        }
        let mut ech = EchelonBasis::new(self.ambient);
        for r in self.basis.rows() {
            ech.insert(r);
        }
        let mut chosen = Vec::new();
        for r in sup.basis.rows() {
            if ech.insert(r) {
                chosen.push(r.clone());
            }
        }
        Subspace::span(self.ambient, &chosen)
    }

    /// All `2^dim` elements in increasing order. Intended for small subspaces.
    pub fn elements(&self) -> Vec<BitVector> {
        let d = self.dim();
        assert!(d < 32, "refusing to list 2^{d} elements");
        // Reversing the basis makes binary counting over the coefficients
        // produce elements in increasing vector order.
        let rows: Vec<&BitVector> = self.basis.rows().iter().rev().collect();
        (0u64..1 << d)
            .map(|mask| {
                let mut v = BitVector::zeros(self.ambient);
                for (i, r) in rows.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        v.xor_assign(r);
                    }
                }
                v
            })
            .collect()
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in F2^{}: {:?})", self.dim(), self.ambient, self.basis)
    }
}

/// Gaussian binomial coefficient `[n choose k]_2`.
pub fn gaussian_binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (1u128 << (n - i)) - 1;
        den *= (1u128 << (i + 1)) - 1;
    }
    num / den
}

/// Lazily enumerates every `k`-dimensional subspace of F2^n exactly once, by
/// walking pivot patterns and the free entries of the reduced echelon form.
pub fn enumerate_subspaces(n: usize, k: usize) -> Result<SubspaceIter> {
    if k > n {
        return Err(Error::DimensionTooLarge { k, n });
    }
    Ok(SubspaceIter::new(n, k))
}

pub struct SubspaceIter {
    n: usize,
    k: usize,
    pivots: Option<Vec<usize>>,
    // (row, column) of each free entry for the current pivot pattern
    free: Vec<(usize, usize)>,
    counter: u64,
}

impl SubspaceIter {
    fn new(n: usize, k: usize) -> Self {
        let mut it = SubspaceIter { n, k, pivots: Some((0..k).collect()), free: Vec::new(), counter: 0 };
        it.load_free();
        it
    }

    fn load_free(&mut self) {
        self.free.clear();
        self.counter = 0;
        if let Some(p) = &self.pivots {
            for (row, &pc) in p.iter().enumerate() {
                for c in pc + 1..self.n {
                    if !p.contains(&c) {
                        self.free.push((row, c));
                    }
                }
            }
        }
    }

    fn advance_pivots(&mut self) {
        let Some(p) = self.pivots.as_mut() else { return };
        let (n, k) = (self.n, self.k);
        let mut i = k;
        loop {
            if i == 0 {
                self.pivots = None;
                return;
            }
            i -= 1;
            if p[i] < n - k + i {
                p[i] += 1;
                for j in i + 1..k {
                    p[j] = p[j - 1] + 1;
                }
                break;
            }
        }
        self.load_free();
    }
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        let pivots = self.pivots.clone()?;
        let mut rows: Vec<BitVector> = pivots.iter().map(|&c| BitVector::unit(self.n, c)).collect();
        for (bit, &(r, c)) in self.free.iter().enumerate() {
            if self.counter >> bit & 1 == 1 {
                rows[r].set(c, true);
            }
        }
        let out = Subspace { ambient: self.n, basis: BitMatrix { cols: self.n, rows } };
        self.counter += 1;
        if self.counter >> self.free.len() != 0 {
            self.advance_pivots();
        }
        Some(out)
    }
}

/// Uniformly random `k`-dimensional subspace, optionally required to contain
/// `containing`. Independent vectors are drawn by rejection; every ordered
/// independent tuple is equally likely, so the induced subspace is uniform.
pub fn random_subspace<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    containing: Option<&BitVector>,
    rng: &mut R,
) -> Result<Subspace> {
    if k > n {
        return Err(Error::DimensionTooLarge { k, n });
    }
    let mut ech = EchelonBasis::new(n);
    if let Some(e) = containing {
        if e.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: e.dim() });
        }
        if e.is_zero() {
            return Err(Error::ZeroVector);
        }
        if k == 0 {
            return Err(Error::InvalidArgument("a 0-dimensional subspace cannot contain a nonzero vector".into()));
        }
        ech.insert(e);
    }
    while ech.rank() < k {
        let v = BitVector::random(n, rng);
        ech.insert(&v);
    }
    Ok(ech.into_subspace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rref_examples() {
        let id = BitMatrix::identity(3);
        assert_eq!(rref(&id), (id.clone(), 3));

        let m = BitMatrix::parse(&["110", "011", "101"]).unwrap();
        assert_eq!(rref(&m).1, 2);

        let z = BitMatrix::zeros(2, 4);
        assert_eq!(rref(&z), (z.clone(), 0));
    }

    #[test]
    fn meet_and_join_examples() {
        let a = Subspace::span(3, &[BitVector::parse("100").unwrap()]).unwrap();
        let b = Subspace::span(3, &[BitVector::parse("010").unwrap()]).unwrap();
        assert_eq!(a.meet(&b).unwrap(), Subspace::zero(3));
        let j = a.join(&b).unwrap();
        assert_eq!(j.dim(), 2);
        assert!(j.contains(&BitVector::parse("110").unwrap()).unwrap());

        let c = Subspace::span(3, &[BitVector::parse("110").unwrap(), BitVector::parse("011").unwrap()]).unwrap();
        let d = Subspace::span(3, &[BitVector::parse("101").unwrap()]).unwrap();
        assert_eq!(c.meet(&d).unwrap(), d);
    }

    #[test]
    fn mismatched_ambient_is_an_error() {
        let a = Subspace::full(3);
        let b = Subspace::full(4);
        assert!(matches!(a.meet(&b), Err(Error::DimensionMismatch { .. })));
        assert!(a.join(&b).is_err());
        assert!(a.contains(&BitVector::zeros(4)).is_err());
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(enumerate_subspaces(4, 2).unwrap().count(), 35);
        let zero: Vec<_> = enumerate_subspaces(5, 0).unwrap().collect();
        assert_eq!(zero, vec![Subspace::zero(5)]);
        let full: Vec<_> = enumerate_subspaces(5, 5).unwrap().collect();
        assert_eq!(full, vec![Subspace::full(5)]);
        assert!(matches!(enumerate_subspaces(3, 4), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn random_subspace_forced_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(random_subspace(3, 3, None, &mut rng).unwrap(), Subspace::full(3));
        let e = BitVector::parse("101").unwrap();
        let s = random_subspace(3, 1, Some(&e), &mut rng).unwrap();
        assert_eq!(s, Subspace::span(3, &[e]).unwrap());
        assert_eq!(random_subspace(3, 2, Some(&BitVector::zeros(3)), &mut rng), Err(Error::ZeroVector));
    }

    #[test]
    fn ordering_is_lexicographic_from_first_coordinate() {
        let a = BitVector::parse("0011").unwrap();
        let b = BitVector::parse("0100").unwrap();
        assert!(a < b);
        let s = Subspace::span(4, &[a.clone(), b.clone()]).unwrap();
        let els = s.elements();
        let mut sorted = els.clone();
        sorted.sort();
        assert_eq!(els, sorted);
        assert_eq!(els.len(), 4);
    }

    #[test]
    fn inverse_and_kernel() {
        let m = BitMatrix::parse(&["110", "011", "001"]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), BitMatrix::identity(3));
        let sing = BitMatrix::parse(&["110", "011", "101"]).unwrap();
        assert!(sing.inverse().is_none());
        let ker = sing.kernel();
        assert_eq!(ker.dim(), 1);
        assert!(ker.contains(&BitVector::parse("111").unwrap()).unwrap());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = BitMatrix::parse(&["110", "011"]).unwrap();
        let rhs = BitVector::parse("11").unwrap();
        let x = solve(&a, &rhs).unwrap();
        assert_eq!(a.mul_vec(&x), rhs);
        let b = BitMatrix::parse(&["110", "110"]).unwrap();
        assert!(solve(&b, &BitVector::parse("10").unwrap()).is_none());
    }

    #[test]
    fn wide_vectors_cross_word_boundaries() {
        let mut v = BitVector::zeros(130);
        v.set(0, true);
        v.set(64, true);
        v.set(129, true);
        assert_eq!(v.ones_iter().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(v.leading(), Some(0));
        let w = BitVector::unit(130, 129);
        assert!(v.dot(&w));
        assert!(w < v);
    }
}
