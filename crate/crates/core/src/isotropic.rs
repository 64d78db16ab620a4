//! Maximal totally isotropic subspaces of an orthogonal sum `V = W ⊥ W'`.
//!
//! Coordinates of `V` are those of `W` followed by those of `W'`. Every
//! maximal totally isotropic `S` splits as `U ⊥ {w + τw : w ∈ K} ⊥ U'` with
//! `U = S ∩ W`, `U' = S ∩ W'`, `K` a complement of `U` in `U^⊥ ∩ W` and `τ` an
//! isometry onto a complement `K'` of `U'`. The equivalence class of `S` under
//! `Aut(W) × Aut(W')` is determined by `k = dim U` together with whether the
//! canonical vectors lie in `U` and `U'`.

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::f2linalg::{solve, BitMatrix, BitVector, Subspace};
use crate::heuristics::pochhammer_int;
use crate::symspace::{aut_order, SpaceSpec, SpaceType, SymSpace};

/// Largest ambient dimension accepted by the brute-force routines.
pub const BRUTE_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthoSum {
    w: SymSpace,
    wp: SymSpace,
    v: SymSpace,
}

impl OrthoSum {
    pub fn new(w: SymSpace, wp: SymSpace) -> Result<OrthoSum> {
        if w.dim() % 2 != wp.dim() % 2 {
            return Err(Error::OppositeParity(w.dim(), wp.dim()));
        }
        let v = SymSpace::classify(w.gram().block_diag(wp.gram()))?;
        Ok(OrthoSum { w, wp, v })
    }

    /// Identity Gram matrices on nonalternating sides, hyperbolic blocks on
    /// alternating ones.
    pub fn standard(left: SpaceSpec, right: SpaceSpec) -> Result<OrthoSum> {
        OrthoSum::new(SymSpace::standard(left.ty, left.n)?, SymSpace::standard(right.ty, right.n)?)
    }

    pub fn w(&self) -> &SymSpace {
        &self.w
    }

    pub fn wp(&self) -> &SymSpace {
        &self.wp
    }

    pub fn v(&self) -> &SymSpace {
        &self.v
    }

    pub fn n(&self) -> usize {
        self.w.dim()
    }

    pub fn np(&self) -> usize {
        self.wp.dim()
    }

    pub fn embed_w(&self, x: &BitVector) -> BitVector {
        x.concat(&BitVector::zeros(self.np()))
    }

    pub fn embed_wp(&self, x: &BitVector) -> BitVector {
        BitVector::zeros(self.n()).concat(x)
    }

    fn w_part(&self, x: &BitVector) -> BitVector {
        x.slice(0, self.n())
    }

    fn wp_part(&self, x: &BitVector) -> BitVector {
        x.slice(self.n(), self.np())
    }

    fn w_subspace(&self) -> Subspace {
        let rows: Vec<BitVector> = (0..self.n()).map(|i| BitVector::unit(self.n() + self.np(), i)).collect();
        Subspace::span(self.n() + self.np(), &rows).unwrap()
    }

    fn wp_subspace(&self) -> Subspace {
        let n = self.n();
        let rows: Vec<BitVector> = (0..self.np()).map(|i| BitVector::unit(n + self.np(), n + i)).collect();
        Subspace::span(n + self.np(), &rows).unwrap()
    }

    /// Label context of this sum.
    pub fn specs(&self) -> (SpaceSpec, SpaceSpec) {
        (self.w.spec(), self.wp.spec())
    }
}

/// Equivalence-class label of a maximal totally isotropic subspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IsoClass {
    pub left: SpaceSpec,
    pub right: SpaceSpec,
    pub k: usize,
    pub kp: usize,
    pub wcan_in_u: bool,
    pub wcan_in_up: bool,
}

fn flag_admissible(spec: SpaceSpec, k: usize, flag: bool) -> bool {
    match spec.ty {
        SpaceType::Alternating | SpaceType::NonAltOdd => !flag && k <= spec.n / 2,
        SpaceType::NonAltEven => {
            if flag {
                k >= 1 && k <= spec.n / 2
            } else {
                k < spec.n / 2
            }
        }
    }
}

/// Type of `K = (U^⊥ ∩ W) / U` for a totally isotropic `U` of the given shape.
fn k_type(spec: SpaceSpec, flag: bool) -> SpaceType {
    match spec.ty {
        SpaceType::Alternating => SpaceType::Alternating,
        SpaceType::NonAltOdd => SpaceType::NonAltOdd,
        SpaceType::NonAltEven if flag => SpaceType::Alternating,
        SpaceType::NonAltEven => SpaceType::NonAltEven,
    }
}

impl IsoClass {
    pub fn validate(&self) -> Result<()> {
        let bad = |why: &str| Err(Error::InvalidLabel(format!("{self}: {why}")));
        self.left.ty.check_dim(self.left.n)?;
        self.right.ty.check_dim(self.right.n)?;
        if self.left.n % 2 != self.right.n % 2 {
            return Err(Error::OppositeParity(self.left.n, self.right.n));
        }
        if 2 * self.k + self.right.n != 2 * self.kp + self.left.n {
            return bad("dimensions of U and U' do not give a maximal subspace");
        }
        if !flag_admissible(self.left, self.k, self.wcan_in_u) {
            return bad("inadmissible choice on the left");
        }
        if !flag_admissible(self.right, self.kp, self.wcan_in_up) {
            return bad("inadmissible choice on the right");
        }
        if k_type(self.left, self.wcan_in_u) != k_type(self.right, self.wcan_in_up) {
            return bad("isotropy types are not compatible");
        }
        Ok(())
    }

    pub fn k_type(&self) -> SpaceType {
        k_type(self.left, self.wcan_in_u)
    }

    pub fn k_dim(&self) -> usize {
        self.left.n - 2 * self.k
    }
}

impl fmt::Display for IsoClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {} k={} k'={}", self.left, self.right, self.k, self.kp)?;
        let mut notes = Vec::new();
        if self.left.ty == SpaceType::NonAltEven {
            notes.push(if self.wcan_in_u { "wcan in U" } else { "wcan not in U" });
        }
        if self.right.ty == SpaceType::NonAltEven {
            notes.push(if self.wcan_in_up { "wcan' in U'" } else { "wcan' not in U'" });
        }
        if !notes.is_empty() {
            write!(f, " ({})", notes.join(", "))?;
        }
        Ok(())
    }
}

/// Every equivalence-class label for maximal totally isotropic subspaces of
/// `left ⊥ right`, ordered by `k` and then by the flags (absent before present).
pub fn class_labels(left: SpaceSpec, right: SpaceSpec) -> Result<Vec<IsoClass>> {
    left.ty.check_dim(left.n)?;
    right.ty.check_dim(right.n)?;
    if left.n % 2 != right.n % 2 {
        return Err(Error::OppositeParity(left.n, right.n));
    }
    let mut out = Vec::new();
    for k in 0..=left.n / 2 {
        let twice_kp = 2 * k + right.n;
        if twice_kp < left.n {
            continue;
        }
        let kp = (twice_kp - left.n) / 2;
        for wcan_in_u in [false, true] {
            for wcan_in_up in [false, true] {
                let label = IsoClass { left, right, k, kp, wcan_in_u, wcan_in_up };
                if label.validate().is_ok() {
                    out.push(label);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxIsotropic {
    pub s: Subspace,
    /// `S ∩ W`, in coordinates of `W`.
    pub u: Subspace,
    /// `S ∩ W'`, in coordinates of `W'`.
    pub up: Subspace,
    pub k_sub: Subspace,
    pub kp_sub: Subspace,
    /// Row `i` is `τ` applied to the `i`-th canonical basis row of `k_sub`.
    pub tau: BitMatrix,
    pub label: IsoClass,
}

impl MaxIsotropic {
    /// Rebuilds `U ⊥ {w + τw} ⊥ U'` as a subspace of `V`.
    pub fn reassemble(&self, vs: &OrthoSum) -> Subspace {
        let mut rows: Vec<BitVector> = self.u.basis_vectors().iter().map(|x| vs.embed_w(x)).collect();
        rows.extend(self.up.basis_vectors().iter().map(|x| vs.embed_wp(x)));
        for (w, tw) in self.k_sub.basis_vectors().iter().zip(self.tau.rows()) {
            rows.push(w.concat(tw));
        }
        Subspace::span(vs.n() + vs.np(), &rows).unwrap()
    }
}

fn flag_of(space: &SymSpace, u: &Subspace) -> bool {
    space.vcan().is_some_and(|c| u.contains(c).unwrap_or(false))
}

/// Computes the structure data of a maximal totally isotropic subspace.
pub fn decompose(vs: &OrthoSum, s: &Subspace) -> Result<MaxIsotropic> {
    let (n, np) = (vs.n(), vs.np());
    if s.ambient_dim() != n + np {
        return Err(Error::DimensionMismatch { expected: n + np, found: s.ambient_dim() });
    }
    if !vs.v.is_totally_isotropic(s)? {
        return Err(Error::NotTotallyIsotropic);
    }
    let half = (n + np) / 2;
    if s.dim() != half {
        return Err(Error::NotMaximal { dim: s.dim(), expected: half });
    }
    let u_rows: Vec<BitVector> = s.meet(&vs.w_subspace())?.basis_vectors().iter().map(|x| vs.w_part(x)).collect();
    let up_rows: Vec<BitVector> =
        s.meet(&vs.wp_subspace())?.basis_vectors().iter().map(|x| vs.wp_part(x)).collect();
    let u = Subspace::span(n, &u_rows)?;
    let up = Subspace::span(np, &up_rows)?;
    let k_sub = u.complement_in(&vs.w.orth_complement(&u)?)?;
    let up_perp = vs.wp.orth_complement(&up)?;
    let kp_sub = up.complement_in(&up_perp)?;

    // S-rows split into their W and W' parts; solving on the W side finds a
    // partner of each K vector, which is then reduced into K'.
    let s_rows = s.basis_vectors();
    let a = BitMatrix::from_rows(n, s_rows.iter().map(|x| vs.w_part(x)).collect())?;
    let c = BitMatrix::from_rows(np, s_rows.iter().map(|x| vs.wp_part(x)).collect())?;
    let kp_basis: Vec<BitVector> =
        kp_sub.basis_vectors().iter().chain(up.basis_vectors()).cloned().collect();
    let kp_mat = BitMatrix::from_rows(np, kp_basis)?.transpose();
    let mut tau_rows = Vec::with_capacity(k_sub.dim());
    for w in k_sub.basis_vectors() {
        let lambda = solve(&a.transpose(), w).ok_or(Error::NotMaximal { dim: s.dim(), expected: half })?;
        let partner = c.vec_mul(&lambda);
        let coeffs = solve(&kp_mat, &partner).ok_or(Error::NotTotallyIsotropic)?;
        let mut t = BitVector::zeros(np);
        for i in coeffs.ones_iter().filter(|&i| i < kp_sub.dim()) {
            t.xor_assign(&kp_sub.basis_vectors()[i]);
        }
        tau_rows.push(t);
    }
    let tau = BitMatrix::from_rows(np, tau_rows)?;
    if vs.w.gram_of(k_sub.basis_vectors()) != vs.wp.gram_of(tau.rows()) || k_sub.dim() != kp_sub.dim() {
        return Err(Error::Inadmissible("gluing map is not an isometry".into()));
    }
    let label = IsoClass {
        left: vs.w.spec(),
        right: vs.wp.spec(),
        k: u.dim(),
        kp: up.dim(),
        wcan_in_u: flag_of(&vs.w, &u),
        wcan_in_up: flag_of(&vs.wp, &up),
    };
    label.validate()?;
    Ok(MaxIsotropic { s: s.clone(), u, up, k_sub, kp_sub, tau, label })
}

pub fn label_of(vs: &OrthoSum, s: &Subspace) -> Result<IsoClass> {
    Ok(decompose(vs, s)?.label)
}

/// `U` and its complement `K` built from the standard basis of a side.
fn side_pieces(space: &SymSpace, k: usize, flag: bool) -> (Vec<BitVector>, Vec<BitVector>) {
    let basis = space.std_basis().rows();
    let pairs = match space.space_type() {
        SpaceType::Alternating => space.dim() / 2,
        SpaceType::NonAltOdd => (space.dim() - 1) / 2,
        SpaceType::NonAltEven => space.dim() / 2 - 1,
    };
    let tail: Vec<BitVector> = basis[2 * pairs..].to_vec();
    let used = if flag { k - 1 } else { k };
    let mut u: Vec<BitVector> = (0..used).map(|i| basis[2 * i].clone()).collect();
    let mut kk: Vec<BitVector> = Vec::new();
    for i in used..pairs {
        kk.push(basis[2 * i].clone());
        kk.push(basis[2 * i + 1].clone());
    }
    if flag {
        u.push(space.vcan().unwrap().clone());
    } else {
        kk.extend(tail);
    }
    (u, kk)
}

/// A representative subspace for a valid label, built on the standard sum.
pub fn representative(label: &IsoClass) -> Result<MaxIsotropic> {
    label.validate()?;
    let vs = OrthoSum::standard(label.left, label.right)?;
    let s = representative_in(&vs, label)?;
    decompose(&vs, &s)
}

/// The representative subspace inside an arbitrary sum with matching types.
pub fn representative_in(vs: &OrthoSum, label: &IsoClass) -> Result<Subspace> {
    label.validate()?;
    if (label.left, label.right) != vs.specs() {
        return Err(Error::InvalidLabel(format!("{label} does not match {} + {}", vs.w.spec(), vs.wp.spec())));
    }
    let (u, kk) = side_pieces(&vs.w, label.k, label.wcan_in_u);
    let (up, kkp) = side_pieces(&vs.wp, label.kp, label.wcan_in_up);
    if vs.w.gram_of(&kk) != vs.wp.gram_of(&kkp) {
        return Err(Error::InvalidLabel(format!("{label}: complements are not isometric")));
    }
    let mut rows: Vec<BitVector> = u.iter().map(|x| vs.embed_w(x)).collect();
    rows.extend(up.iter().map(|x| vs.embed_wp(x)));
    rows.extend(kk.iter().zip(&kkp).map(|(a, b)| a.concat(b)));
    Subspace::span(vs.n() + vs.np(), &rows)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitStats {
    pub stab: BigUint,
    pub orbit: BigUint,
    pub total: BigUint,
}

/// Number of maximal totally isotropic subspaces of `left ⊥ right`.
pub fn total_count(left: SpaceSpec, right: SpaceSpec, q: u64) -> Result<BigUint> {
    let dim = left.n + right.n;
    let (vty, iso) = if left.ty.is_alternating() && right.ty.is_alternating() {
        (SpaceType::Alternating, (dim / 2, false))
    } else {
        (SpaceType::NonAltEven, (dim / 2, true))
    };
    Ok(aut_order(vty, dim, q, None)? / aut_order(vty, dim, q, Some(iso))?)
}

pub fn orbit_stats(label: &IsoClass, q: u64) -> Result<OrbitStats> {
    label.validate()?;
    let aw = aut_order(label.left.ty, label.left.n, q, None)?;
    let awp = aut_order(label.right.ty, label.right.n, q, None)?;
    let awu = aut_order(label.left.ty, label.left.n, q, Some((label.k, label.wcan_in_u)))?;
    let awpu = aut_order(label.right.ty, label.right.n, q, Some((label.kp, label.wcan_in_up)))?;
    let ak = if label.k_dim() == 0 { BigUint::one() } else { aut_order(label.k_type(), label.k_dim(), q, None)? };
    let stab = awu * awpu / ak;
    let orbit = aw * awp / &stab;
    let total = total_count(label.left, label.right, q)?;
    Ok(OrbitStats { stab, orbit, total })
}

/// Closed form of `|Aut(S)|` at `q = 2` for `W` nonalternating of dimension
/// `r1` and `W'` of dimension `r1 + 2 r2`, when the label is of that shape.
pub fn signature_stab_closed_form(label: &IsoClass) -> Option<BigRational> {
    if label.left.ty.is_alternating() || label.right.n < label.left.n {
        return None;
    }
    let r1 = label.left.n;
    let r2 = (label.right.n - r1) / 2;
    let k = label.k;
    let p2 = |m: usize| pochhammer_int(2, m);
    let p4 = |m: usize| pochhammer_int(4, m);
    let exp = (r1 + r2 - 1) * (r1 + r2) / 2 + r2 * r2 + r2 * k + k * k;
    let pow2 = |e: usize| BigRational::from_integer(num_bigint::BigInt::one() << e);
    let value = match (r1 % 2, label.right.ty, label.wcan_in_u) {
        (1, _, _) => pow2(exp) * p2(k) * p2(k + r2) * p4((r1 - 1) / 2 - k),
        (0, SpaceType::NonAltEven, false) => pow2(exp) * p2(k) * p2(k + r2) * p4(r1 / 2 - 1 - k),
        (0, SpaceType::NonAltEven, true) => {
            pow2(exp + r1 - 2 * k) * p2(k - 1) * p2(k + r2 - 1) * p4(r1 / 2 - k)
        }
        (0, SpaceType::Alternating, _) => {
            pow2(exp + r1 + r2 - k) * p2(k - 1) * p2(k + r2) * p4(r1 / 2 - k)
        }
        _ => return None,
    };
    Some(value)
}

/// `|Aut(S_k)|` for `W, W'` both odd nonalternating with `n <= n'`, for any `q`.
pub fn odd_pair_stab_closed_form(n: usize, np: usize, k: usize, q: u64) -> Option<BigUint> {
    if n % 2 == 0 || np % 2 == 0 || n > np || k > (n - 1) / 2 {
        return None;
    }
    let qb = BigUint::from(q);
    let mut acc = num_traits::pow(qb.clone(), (np - 1) * (np - 1) / 4 + k * (n - k - 1));
    for i in 1..=k {
        acc *= num_traits::pow(qb.clone(), i) - 1u32;
    }
    for i in 1..=k + (np - n) / 2 {
        acc *= num_traits::pow(qb.clone(), i) - 1u32;
    }
    for i in 1..=(n - 1) / 2 - k {
        acc *= num_traits::pow(qb.clone(), 2 * i) - 1u32;
    }
    Some(acc)
}

/// Gram matrix as bit masks: `g[i]` has bit `j` set when `b(e_i, e_j) = 1`.
fn gram_masks(g: &BitMatrix) -> Vec<u64> {
    g.rows().iter().map(BitVector::to_mask).collect()
}

fn pair_masks(gm: &[u64], x: u64, y: u64) -> bool {
    let mut acc = 0u64;
    let mut xs = x;
    while xs != 0 {
        let i = xs.trailing_zeros() as usize;
        acc ^= gm[i];
        xs &= xs - 1;
    }
    (acc & y).count_ones() & 1 == 1
}

/// All maximal totally isotropic subspaces of `V = W ⊥ W'`, found by
/// depth-first search over reduced echelon forms: for each pivot pattern the
/// rows are filled in order and a partial form is abandoned as soon as a new
/// row fails to be isotropic or orthogonal to the earlier rows. Each subspace
/// has exactly one reduced echelon form, so the output has no duplicates.
pub fn brute_enumerate_mts(vs: &OrthoSum) -> Result<Vec<Subspace>> {
    brute_enumerate_in(&vs.v)
}

/// The same search in a single nondegenerate space of even dimension.
pub fn brute_enumerate_in(space: &SymSpace) -> Result<Vec<Subspace>> {
    let dim = space.dim();
    let masks = brute_masks(space.gram(), dim)?;
    Ok(masks
        .into_iter()
        .map(|rows| {
            let rows: Vec<BitVector> = rows.into_iter().map(|m| BitVector::from_mask(dim, m)).collect();
            Subspace::span(dim, &rows).unwrap()
        })
        .collect())
}

/// Number of maximal totally isotropic subspaces, by the same search.
pub fn brute_count_mts(vs: &OrthoSum) -> Result<usize> {
    Ok(brute_masks(vs.v.gram(), vs.n() + vs.np())?.len())
}

fn brute_masks(gram: &BitMatrix, dim: usize) -> Result<Vec<Vec<u64>>> {
    if dim > BRUTE_LIMIT {
        return Err(Error::TooLarge { dim, limit: BRUTE_LIMIT });
    }
    let gm = gram_masks(gram);
    let half = dim / 2;
    let mut pivot_sets = Vec::new();
    let mut cur = Vec::with_capacity(half);
    collect_combinations(dim, half, 0, &mut cur, &mut pivot_sets);
    let found: Vec<Vec<Vec<u64>>> = pivot_sets
        .par_iter()
        .map(|pivots| {
            let mut out = Vec::new();
            let mut rows = Vec::with_capacity(half);
            fill_rows(&gm, dim, pivots, &mut rows, &mut out);
            out
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

fn collect_combinations(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..=n - (k - cur.len()) {
        cur.push(i);
        collect_combinations(n, k, i + 1, cur, out);
        cur.pop();
    }
}

fn fill_rows(gm: &[u64], dim: usize, pivots: &[usize], rows: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    let i = rows.len();
    if i == pivots.len() {
        out.push(rows.clone());
        return;
    }
    let p = pivots[i];
    let free: Vec<usize> = (p + 1..dim).filter(|c| !pivots.contains(c)).collect();
    for bits in 0u64..1 << free.len() {
        let mut r = 1u64 << p;
        for (b, &c) in free.iter().enumerate() {
            if bits >> b & 1 == 1 {
                r |= 1 << c;
            }
        }
        if !pair_masks(gm, r, r) && rows.iter().all(|&x| !pair_masks(gm, x, r)) {
            rows.push(r);
            fill_rows(gm, dim, pivots, rows, out);
            rows.pop();
        }
    }
}

/// Isometry as column masks: `cols[j]` is the image of coordinate vector `j`.
fn isometry_columns(m: &BitMatrix) -> Vec<u64> {
    (0..m.ncols()).map(|j| m.column(j).to_mask()).collect()
}

fn apply_cols(cols: &[u64], offset: usize, x: u64) -> u64 {
    let mut acc = 0u64;
    for (j, c) in cols.iter().enumerate() {
        if x >> j & 1 == 1 {
            acc ^= c << offset;
        }
    }
    acc
}

/// Order of the stabilizer of `S` in `Aut(W) × Aut(W')`, by checking every pair.
pub fn brute_stabilizer_order(vs: &OrthoSum, s: &Subspace) -> Result<u64> {
    let auts_w: Vec<Vec<u64>> = vs.w.brute_isometries()?.iter().map(isometry_columns).collect();
    let auts_wp: Vec<Vec<u64>> = vs.wp.brute_isometries()?.iter().map(isometry_columns).collect();
    let n = vs.n();
    let nmask = (1u64 << n) - 1;
    let rows: Vec<u64> = s.basis_vectors().iter().map(BitVector::to_mask).collect();
    // reduction data: pivot bit for each canonical row
    let red: Vec<(u64, u64)> = rows.iter().map(|&r| (r & r.wrapping_neg(), r)).collect();
    let inside = |x: u64| {
        let mut x = x;
        for &(pb, r) in &red {
            if x & pb != 0 {
                x ^= r;
            }
        }
        x == 0
    };
    let count: u64 = auts_w
        .par_iter()
        .map(|g| {
            let mut c = 0u64;
            for gp in &auts_wp {
                if rows.iter().all(|&r| inside(apply_cols(g, 0, r & nmask) ^ apply_cols(gp, n, r >> n))) {
                    c += 1;
                }
            }
            c
        })
        .sum();
    Ok(count)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MassReport {
    pub left: SpaceSpec,
    pub right: SpaceSpec,
    pub orbits: Vec<(IsoClass, BigUint)>,
    pub orbit_sum: BigUint,
    pub brute: Option<u64>,
    pub formula: BigUint,
}

impl MassReport {
    pub fn ok(&self) -> bool {
        self.orbit_sum == self.formula && self.brute.is_none_or(|b| BigUint::from(b) == self.formula)
    }
}

impl fmt::Display for MassReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.orbits.iter().map(|(_, o)| o.to_string()).collect();
        write!(f, "orbits {} = {}", parts.join("+"), self.orbit_sum)?;
        match self.brute {
            Some(b) => write!(f, " = brute {b}")?,
            None => write!(f, " = brute skipped")?,
        }
        write!(f, " = formula {} : {}", self.formula, if self.ok() { "OK" } else { "MISMATCH" })
    }
}

/// Compares the sum of orbit sizes, the brute-force count (when the ambient
/// dimension is at most `BRUTE_LIMIT`) and the quotient of group orders.
pub fn mass_check(left: SpaceSpec, right: SpaceSpec, q: u64) -> Result<MassReport> {
    let labels = class_labels(left, right)?;
    let mut orbits = Vec::with_capacity(labels.len());
    let mut orbit_sum = BigUint::from(0u32);
    for l in labels {
        let st = orbit_stats(&l, q)?;
        orbit_sum += &st.orbit;
        orbits.push((l, st.orbit));
    }
    let brute = if q == 2 && left.n + right.n <= BRUTE_LIMIT {
        Some(brute_count_mts(&OrthoSum::standard(left, right)?)? as u64)
    } else {
        None
    };
    let formula = total_count(left, right, q)?;
    Ok(MassReport { left, right, orbits, orbit_sum, brute, formula })
}

/// All same-parity type pairs with `n + n' <= max_total`.
pub fn all_type_pairs(max_total: usize) -> Vec<(SpaceSpec, SpaceSpec)> {
    let specs: Vec<SpaceSpec> = (1..max_total)
        .flat_map(|n| {
            [SpaceType::Alternating, SpaceType::NonAltOdd, SpaceType::NonAltEven]
                .into_iter()
                .filter_map(move |ty| SpaceSpec::new(ty, n).ok())
        })
        .collect();
    let mut out = Vec::new();
    for a in &specs {
        for b in &specs {
            if a.n + b.n <= max_total && a.n % 2 == b.n % 2 {
                out.push((*a, *b));
            }
        }
    }
    out
}

/// Converts an exact integer-valued rational to `BigUint`, if it is one.
pub fn rational_to_biguint(r: &BigRational) -> Option<BigUint> {
    if !r.is_integer() {
        return None;
    }
    r.to_integer().to_biguint()
}

/// Convenience for small orders in tests and reports.
pub fn to_u64(x: &BigUint) -> Option<u64> {
    x.to_u64()
}
