//! Monte-Carlo simulation of the random model behind the conjectures: a
//! uniformly random maximal totally isotropic image (giving `k`), an
//! independent class group 2-rank `ρ`, and a uniformly random unit subspace
//! `E` (giving the signature rank `s`).
//!
//! Trials are split into fixed-size chunks; chunk `i` draws from a ChaCha8
//! stream `i` under the master seed, so the counts depend only on the seed and
//! the trial count, never on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heuristics::{cond_sigrank, eta_malle, eta_plus, p_k, sigrank, split_prob, Signature};
use num_traits::ToPrimitive;

/// Largest class group 2-rank the simulator draws; the remaining mass is
/// folded into this cell.
pub const RHO_MAX: usize = 40;
pub const CHUNK: u64 = 4096;
pub const DEFAULT_SIGMA: f64 = 4.0;
const MIN_EXPECTED: f64 = 50.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldSample {
    pub k: usize,
    pub rho: usize,
    pub rho_plus: usize,
    pub s: usize,
    pub rho_inf: usize,
    pub split: bool,
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    if let Some(last) = out.last_mut() {
        *last = f64::INFINITY;
    }
    out
}

fn draw(cdf: &[f64], rng: &mut impl Rng) -> usize {
    let x: f64 = rng.gen();
    cdf.iter().position(|&c| x < c).unwrap_or(cdf.len() - 1)
}

/// Precomputed sampling tables for one signature.
#[derive(Clone, Debug)]
pub struct Model {
    pub sig: Signature,
    pub k_probs: Vec<f64>,
    pub rho_probs: Vec<f64>,
    k_cdf: Vec<f64>,
    rho_cdf: Vec<f64>,
}

impl Model {
    pub fn new(sig: Signature) -> Result<Model> {
        if sig.r1 + sig.r2 + RHO_MAX > 64 {
            return Err(Error::InvalidArgument(format!("signature {sig} is too large for the simulator")));
        }
        let k_probs: Vec<f64> =
            (0..=sig.half()).map(|k| p_k(sig, k).map(|p| p.to_f64().unwrap())).collect::<Result<_>>()?;
        let mut rho_probs: Vec<f64> =
            (0..=RHO_MAX).map(|r| eta_malle(sig, r, 1e-15).map(|t| t.to_f64())).collect::<Result<_>>()?;
        let head: f64 = rho_probs[..RHO_MAX].iter().sum();
        rho_probs[RHO_MAX] = (1.0 - head).max(0.0);
        Ok(Model { sig, k_cdf: cumulative(&k_probs), rho_cdf: cumulative(&rho_probs), k_probs, rho_probs })
    }

    pub fn sample_class(&self, rng: &mut impl Rng) -> usize {
        draw(&self.k_cdf, rng)
    }

    pub fn sample_rho(&self, rng: &mut impl Rng) -> usize {
        draw(&self.rho_cdf, rng)
    }

    /// One simulated field: `ρ` and `k` are drawn independently, then `E` is a
    /// uniformly random `(r1 + r2)`-dimensional subspace of
    /// `X = F2^{r1 + r2 + ρ}` containing `e = e_0`, and `Y` is spanned by the
    /// coordinate vectors `e_1, .., e_{ρ + k + r2}`.
    pub fn simulate_field(&self, rng: &mut impl Rng) -> FieldSample {
        let Signature { r1, r2 } = self.sig;
        let rho = self.sample_rho(rng);
        let k = self.sample_class(rng);
        let m = r1 + r2 + rho;
        let t = r1 + r2;
        let r = rho + k + r2;
        let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
        let y_mask = ((1u64 << r) - 1) << 1;
        // E ⊇ <e>: grow an echelon basis by rejection
        let mut basis: Vec<u64> = Vec::with_capacity(t);
        basis.push(1);
        while basis.len() < t {
            let mut v = rng.gen::<u64>() & full;
            for &b in &basis {
                let pivot = b & b.wrapping_neg();
                if v & pivot != 0 {
                    v ^= b;
                }
            }
            if v != 0 {
                // keep rows reduced against the new pivot so later reductions stay valid
                let pivot = v & v.wrapping_neg();
                for b in basis.iter_mut() {
                    if *b & pivot != 0 {
                        *b ^= v;
                    }
                }
                basis.push(v);
            }
        }
        // dim(E + Y) = r + rank of E with the Y coordinates erased
        let mut ech: Vec<u64> = Vec::with_capacity(t);
        for &b in &basis {
            let mut v = b & !y_mask;
            for &c in &ech {
                let pivot = c & c.wrapping_neg();
                if v & pivot != 0 {
                    v ^= c;
                }
            }
            if v != 0 {
                let pivot = v & v.wrapping_neg();
                for c in ech.iter_mut() {
                    if *c & pivot != 0 {
                        *c ^= v;
                    }
                }
                ech.push(v);
            }
        }
        let s_prime = t - ech.len();
        let s = t - s_prime;
        let rho_inf = r1 - s;
        FieldSample { k, rho, rho_plus: rho + k, s, rho_inf, split: rho_inf == k }
    }
}

/// Raw counts from a simulation run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counts {
    pub k: Vec<u64>,
    pub rho: Vec<u64>,
    pub rho_plus: Vec<u64>,
    /// Indexed by `s`, so entry 0 is always zero.
    pub s: Vec<u64>,
    pub split: u64,
    /// `joint[k][rho][s]`.
    pub joint: Vec<Vec<Vec<u64>>>,
    pub sum_two_pow_rho: u128,
    pub sum_four_pow_rho: u128,
    pub violations: u64,
}

impl Counts {
    fn new(sig: Signature) -> Counts {
        let h = sig.half();
        Counts {
            k: vec![0; h + 1],
            rho: vec![0; RHO_MAX + 1],
            rho_plus: vec![0; RHO_MAX + h + 1],
            s: vec![0; sig.r1 + 1],
            split: 0,
            joint: vec![vec![vec![0; sig.r1 + 1]; RHO_MAX + 1]; h + 1],
            sum_two_pow_rho: 0,
            sum_four_pow_rho: 0,
            violations: 0,
        }
    }

    fn record(&mut self, sig: Signature, f: &FieldSample) {
        self.k[f.k] += 1;
        self.rho[f.rho] += 1;
        self.rho_plus[f.rho_plus] += 1;
        self.s[f.s] += 1;
        self.split += f.split as u64;
        self.joint[f.k][f.rho][f.s] += 1;
        self.sum_two_pow_rho += 1u128 << f.rho;
        self.sum_four_pow_rho += 1u128 << (2 * f.rho);
        let lo = sig.r1 - (f.rho + f.k).min(sig.r1 - 1);
        let admissible = f.s >= lo && f.s <= sig.r1 - f.k;
        if !admissible {
            self.violations += 1;
        }
    }

    fn merge(mut self, other: Counts) -> Counts {
        let add = |a: &mut Vec<u64>, b: &[u64]| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        add(&mut self.k, &other.k);
        add(&mut self.rho, &other.rho);
        add(&mut self.rho_plus, &other.rho_plus);
        add(&mut self.s, &other.s);
        self.split += other.split;
        for (a, b) in self.joint.iter_mut().zip(&other.joint) {
            for (x, y) in a.iter_mut().zip(b) {
                add(x, y);
            }
        }
        self.sum_two_pow_rho += other.sum_two_pow_rho;
        self.sum_four_pow_rho += other.sum_four_pow_rho;
        self.violations += other.violations;
        self
    }
}

/// Streams are keyed by chunk index, so the per-chunk draws never depend on scheduling.
fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `trials` simulated fields and returns the aggregated counts.
pub fn simulate_counts(sig: Signature, trials: u64, seed: u64) -> Result<Counts> {
    let model = Model::new(sig)?;
    let chunks = trials.div_ceil(CHUNK);
    let partial: Vec<Counts> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let n = CHUNK.min(trials - c * CHUNK);
            let mut counts = Counts::new(sig);
            for _ in 0..n {
                counts.record(sig, &model.simulate_field(&mut rng));
            }
            counts
        })
        .collect();
    Ok(partial.into_iter().fold(Counts::new(sig), Counts::merge))
}

/// Draws `k` values only, for checking the class sampler on its own.
pub fn sample_classes(sig: Signature, trials: u64, seed: u64) -> Result<Vec<u64>> {
    let model = Model::new(sig)?;
    let chunks = trials.div_ceil(CHUNK);
    let partial: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let mut counts = vec![0u64; sig.half() + 1];
            for _ in 0..CHUNK.min(trials - c * CHUNK) {
                counts[model.sample_class(&mut rng)] += 1;
            }
            counts
        })
        .collect();
    Ok(partial.into_iter().fold(vec![0u64; sig.half() + 1], |mut a, b| {
        a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
        a
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub label: String,
    pub count: u64,
    pub empirical: f64,
    pub exact: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub name: String,
    pub trials: u64,
    pub cells: Vec<Cell>,
    pub max_abs_deviation: f64,
    pub max_abs_z: f64,
    pub sigma: f64,
}

impl Comparison {
    pub fn passed(&self) -> bool {
        self.max_abs_z <= self.sigma
    }
}

fn z_score(count: u64, trials: u64, p: f64) -> f64 {
    let phat = count as f64 / trials as f64;
    if p <= 0.0 || p >= 1.0 {
        return if (phat - p).abs() == 0.0 { 0.0 } else { f64::INFINITY };
    }
    (phat - p) / (p * (1.0 - p) / trials as f64).sqrt()
}

/// Per-cell binomial z-scores of observed counts against exact probabilities.
pub fn compare_distributions(
    name: &str,
    labels: &[String],
    counts: &[u64],
    exact: &[f64],
    sigma: f64,
) -> Result<Comparison> {
    if counts.len() != exact.len() || labels.len() != exact.len() {
        return Err(Error::InvalidArgument(format!(
            "support mismatch in {name}: {} counts, {} probabilities, {} labels",
            counts.len(),
            exact.len(),
            labels.len()
        )));
    }
    let trials: u64 = counts.iter().sum();
    if trials == 0 {
        return Err(Error::InvalidArgument(format!("no trials recorded for {name}")));
    }
    let cells: Vec<Cell> = labels
        .iter()
        .zip(counts)
        .zip(exact)
        .map(|((label, &count), &p)| Cell {
            label: label.clone(),
            count,
            empirical: count as f64 / trials as f64,
            exact: p,
            z: z_score(count, trials, p),
        })
        .collect();
    let max_abs_deviation = cells.iter().map(|c| (c.empirical - c.exact).abs()).fold(0.0, f64::max);
    let max_abs_z = cells.iter().map(|c| c.z.abs()).fold(0.0, f64::max);
    Ok(Comparison { name: name.to_string(), trials, cells, max_abs_deviation, max_abs_z, sigma })
}

/// Merges trailing cells until the pooled tail has an expected count of at
/// least `min_expected`, so the normal approximation holds in every cell.
pub fn pool_tail(
    labels: &[String],
    counts: &[u64],
    exact: &[f64],
    trials: u64,
    min_expected: f64,
) -> (Vec<String>, Vec<u64>, Vec<f64>) {
    let mut cut = exact.len();
    let mut tail_p = 0.0;
    while cut > 1 && (tail_p + exact[cut - 1]) * (trials as f64) < min_expected {
        cut -= 1;
        tail_p += exact[cut];
    }
    if cut == exact.len() {
        return (labels.to_vec(), counts.to_vec(), exact.to_vec());
    }
    // the cell before the cut absorbs the tail
    let keep = cut - 1;
    let mut l = labels[..keep].to_vec();
    l.push(format!("{}+", labels[keep]));
    let mut c = counts[..keep].to_vec();
    c.push(counts[keep..].iter().sum());
    let mut e = exact[..keep].to_vec();
    e.push(exact[keep..].iter().sum());
    (l, c, e)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimReport {
    pub sig: Signature,
    pub trials: u64,
    pub seed: u64,
    pub counts: Counts,
    pub comparisons: Vec<Comparison>,
    /// Mean of `2^ρ` with its expected value and z-score.
    pub mean_two_pow_rho: (f64, f64, f64),
}

impl SimReport {
    pub fn passed(&self) -> bool {
        self.counts.violations == 0
            && self.comparisons.iter().all(Comparison::passed)
            && self.mean_two_pow_rho.2.abs() <= self.comparisons.first().map_or(DEFAULT_SIGMA, |c| c.sigma)
    }
}

/// Options controlling which comparisons are reported.
#[derive(Clone, Copy, Debug)]
pub struct CompareOptions {
    pub sigma: f64,
    /// Minimum number of trials in a `(k, ρ)` cell before its conditional
    /// `s`-distribution is compared.
    pub min_conditional: u64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions { sigma: DEFAULT_SIGMA, min_conditional: 10_000 }
    }
}

/// Simulates and compares every marginal against the exact formulas.
pub fn simulate(sig: Signature, trials: u64, seed: u64, opts: CompareOptions) -> Result<SimReport> {
    let counts = simulate_counts(sig, trials, seed)?;
    let eps = 1e-12;
    let mut comparisons = Vec::new();
    let h = sig.half();

    let k_labels: Vec<String> = (0..=h).map(|k| format!("k={k}")).collect();
    let k_exact: Vec<f64> = (0..=h).map(|k| p_k(sig, k).unwrap().to_f64().unwrap()).collect();
    comparisons.push(compare_distributions("k", &k_labels, &counts.k, &k_exact, opts.sigma)?);

    let model = Model::new(sig)?;
    let rho_labels: Vec<String> = (0..=RHO_MAX).map(|r| format!("rho={r}")).collect();
    let (l, c, e) = pool_tail(&rho_labels, &counts.rho, &model.rho_probs, trials, MIN_EXPECTED);
    comparisons.push(compare_distributions("rho", &l, &c, &e, opts.sigma)?);

    let rp_len = counts.rho_plus.len();
    let mut rp_exact: Vec<f64> =
        (0..rp_len).map(|r| eta_plus(sig, r, eps).map(|t| t.to_f64())).collect::<Result<_>>()?;
    let head: f64 = rp_exact[..rp_len - 1].iter().sum();
    rp_exact[rp_len - 1] = (1.0 - head).max(0.0);
    let rp_labels: Vec<String> = (0..rp_len).map(|r| format!("rho+={r}")).collect();
    let (l, c, e) = pool_tail(&rp_labels, &counts.rho_plus, &rp_exact, trials, MIN_EXPECTED);
    comparisons.push(compare_distributions("rho_plus", &l, &c, &e, opts.sigma)?);

    let s_labels: Vec<String> = (1..=sig.r1).map(|s| format!("s={s}")).collect();
    let s_exact: Vec<f64> = (1..=sig.r1).map(|s| sigrank(sig, s, eps).map(|t| t.to_f64())).collect::<Result<_>>()?;
    comparisons.push(compare_distributions("s", &s_labels, &counts.s[1..], &s_exact, opts.sigma)?);

    let sp = split_prob(sig, eps)?.to_f64();
    comparisons.push(compare_distributions(
        "split",
        &["split".to_string(), "not split".to_string()],
        &[counts.split, trials - counts.split],
        &[sp, 1.0 - sp],
        opts.sigma,
    )?);

    for k in 0..=h {
        for rho in 0..=RHO_MAX {
            let cell = &counts.joint[k][rho];
            let n: u64 = cell.iter().sum();
            if n < opts.min_conditional {
                continue;
            }
            let exact: Vec<f64> = (1..=sig.r1)
                .map(|s| match cond_sigrank(sig, s, k, rho) {
                    Ok(p) => p.to_f64().unwrap(),
                    Err(_) => 0.0,
                })
                .collect();
            comparisons.push(compare_distributions(
                &format!("s | k={k}, rho={rho}"),
                &s_labels,
                &cell[1..],
                &exact,
                opts.sigma,
            )?);
        }
    }

    // E[2^ρ] = 1 + 2^{1 - r1 - r2}, E[4^ρ] = (1 + 2^{1-r1-r2})(1 + 2^{2-r1-r2})
    let rr = (sig.r1 + sig.r2) as i32;
    let m1 = 1.0 + 2f64.powi(1 - rr);
    let m2 = m1 * (1.0 + 2f64.powi(2 - rr));
    let mean = counts.sum_two_pow_rho as f64 / trials as f64;
    let var = (m2 - m1 * m1).max(0.0);
    let z = if var > 0.0 { (mean - m1) / (var / trials as f64).sqrt() } else { 0.0 };
    Ok(SimReport { sig, trials, seed, counts, comparisons, mean_two_pow_rho: (mean, m1, z) })
}
