//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sigmap::cubicforms::{self, CubicForm, Gl2};
use sigmap::f2linalg::{BitMatrix, Subspace};
use sigmap::heuristics::{self as h, Signature};
use sigmap::isotropic::{self as iso, OrthoSum};
use sigmap::montecarlo::{self as mc, CompareOptions};
use sigmap::symspace::{SpaceSpec, SpaceType};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn sig(r1: usize, r2: usize) -> Signature {
    Signature::new(r1, r2).unwrap()
}

fn spec(s: &str) -> SpaceSpec {
    s.parse().unwrap()
}

fn frac(s: &str) -> BigRational {
    s.parse().unwrap()
}

fn dec(s: &str) -> BigRational {
    h::parse_decimal(s).unwrap()
}

const EPS: f64 = 1e-12;

const CLASS_PROBS: &[((usize, usize), &[&str])] = &[
    ((3, 0), &["2/5", "3/5"]),
    ((1, 1), &["1"]),
    ((5, 0), &["16/51", "30/51", "5/51"]),
    ((3, 1), &["2/3", "1/3"]),
    ((1, 2), &["1"]),
    ((7, 0), &["3584/12155", "7056/12155", "1470/12155", "45/12155"]),
    ((5, 1), &["112/187", "70/187", "5/187"]),
    ((3, 2), &["14/17", "3/17"]),
    ((1, 3), &["1"]),
];

const NARROW_DENSITIES: &[((usize, usize), [&str; 3])] = &[
    ((3, 0), ["0.314567", "0.550492", "0.124516"]),
    ((1, 1), ["0.629133", "0.314567", "0.052427"]),
    ((5, 0), ["0.294907", "0.571382", "0.127102"]),
    ((3, 1), ["0.589813", "0.368633", "0.039935"]),
    ((1, 2), ["0.786417", "0.196604", "0.016384"]),
    ((7, 0), ["0.290298", "0.576061", "0.128021"]),
    ((5, 1), ["0.580597", "0.381017", "0.037448"]),
    ((3, 2), ["0.774129", "0.214268", "0.011376"]),
    ((1, 3), ["0.884719", "0.110590", "0.004608"]),
];

const NARROW_MOMENTS: &[((usize, usize), [&str; 4])] = &[
    ((3, 0), ["2", "21/4", "39/2", "225/2"]),
    ((1, 1), ["3/2", "3", "9", "45"]),
    ((5, 0), ["2", "81/16", "135/8", "4995/64"]),
    ((3, 1), ["3/2", "45/16", "225/32", "405/16"]),
    ((1, 2), ["5/4", "15/8", "15/4", "45/4"]),
    ((7, 0), ["2", "321/64", "519/32", "71415/1024"]),
    ((5, 1), ["3/2", "177/64", "837/128", "21195/1024"]),
    ((3, 2), ["5/4", "117/64", "855/256", "4185/512"]),
    ((1, 3), ["9/8", "45/32", "135/64", "135/32"]),
];

#[derive(Clone, Copy)]
enum Cell3 {
    Exact(&'static str),
    Sci(f64, f64),
    Below(f64),
}

use Cell3::{Below, Exact, Sci};

const SIGNATURE_RANKS: &[((usize, usize), &[Cell3])] = &[
    ((3, 0), &[Exact("0.019097"), Exact("0.618304"), Exact("0.362599")]),
    ((1, 1), &[Exact("1")]),
    ((5, 0), &[Sci(1.9e-7, 1e-8), Exact("0.000582"), Exact("0.105508"), Exact("0.589338"), Exact("0.304572")]),
    ((3, 1), &[Exact("0.002630"), Exact("0.346318"), Exact("0.651052")]),
    ((1, 2), &[Exact("1")]),
    (
        (7, 0),
        &[
            Below(9e-16),
            Below(2e-10),
            Exact("0.000003"),
            Exact("0.003921"),
            Exact("0.122913"),
            Exact("0.580570"),
            Exact("0.292593"),
        ],
    ),
    ((5, 1), &[Below(4e-9), Exact("0.000040"), Exact("0.027980"), Exact("0.377432"), Exact("0.594548")]),
    ((3, 2), &[Exact("0.000346"), Exact("0.180949"), Exact("0.818705")]),
    ((1, 3), &[Exact("1")]),
];

const SPLITTING: &[((usize, usize), &str)] = &[
    ((3, 0), "0.943700"),
    ((1, 1), "1"),
    ((5, 0), "0.982241"),
    ((3, 1), "0.981776"),
    ((1, 2), "1"),
    ((7, 0), "0.995315"),
    ((5, 1), "0.994300"),
    ((3, 2), "0.994831"),
    ((1, 3), "1"),
];

/// Checks `|value - printed| + err < 1e-6`, or exact equality for integer
/// cells. Returns whether the cell also rounds to the printed digits.
fn matches_printed(t: &h::TruncatedReal, printed: &str) -> std::result::Result<bool, String> {
    if !printed.contains('.') {
        return if t.value == frac(printed) && t.err.is_zero() {
            Ok(true)
        } else {
            Err(format!("expected exactly {printed}, got {} ± {:e}", t.to_f64(), t.err_f64()))
        };
    }
    let digits = printed.split_once('.').unwrap().1.len();
    let gap = (&t.value - dec(printed)).abs() + &t.err;
    if gap >= dec("0.000001") {
        return Err(format!("expected {printed}, got {} ± {:e}", t.to_decimal(digits + 3), t.err_f64()));
    }
    Ok(t.to_decimal(digits) == printed)
}

fn criterion_1() -> Outcome {
    let mut cells = 0;
    for &((r1, r2), row) in CLASS_PROBS {
        let got = h::p_k_all(sig(r1, r2));
        ensure!(got.len() == row.len(), "({r1},{r2}): {} classes, expected {}", got.len(), row.len());
        for (k, (g, e)) in got.iter().zip(row).enumerate() {
            ensure!(*g == frac(e), "({r1},{r2}) k={k}: got {g}, expected {e}");
            cells += 1;
        }
    }
    let line = h::format_common_denominator(&h::p_k_all(sig(7, 0)));
    Ok(format!("{cells} exact fractions; (7,0) = {line}"))
}

fn criterion_2() -> Outcome {
    let (mut cells, mut rounded) = (0, 0);
    for &((r1, r2), row) in NARROW_DENSITIES {
        for (rp, printed) in row.iter().enumerate() {
            let t = h::eta_plus(sig(r1, r2), rp, EPS).map_err(|e| e.to_string())?;
            rounded += matches_printed(&t, printed).map_err(|e| format!("({r1},{r2}) rho+={rp}: {e}"))? as usize;
            cells += 1;
        }
    }
    for &((r1, r2), row) in NARROW_MOMENTS {
        for (i, printed) in row.iter().enumerate() {
            let got = h::moment(sig(r1, r2), i + 1).map_err(|e| e.to_string())?;
            ensure!(got == frac(printed), "({r1},{r2}) t={}: got {got}, expected {printed}", i + 1);
            cells += 1;
        }
    }
    Ok(format!("{cells} cells: 27 densities within 1e-6 ({rounded} also round to the printed digits), 36 exact moments"))
}

fn criterion_3() -> Outcome {
    let (mut cells, mut rounded) = (0, 0);
    for &((r1, r2), row) in SIGNATURE_RANKS {
        ensure!(row.len() == r1, "({r1},{r2}) table row length");
        for (i, cell) in row.iter().enumerate() {
            let s = i + 1;
            let eps = if matches!(cell, Exact(_)) { EPS } else { 1e-30 };
            let t = h::sigrank(sig(r1, r2), s, eps).map_err(|e| e.to_string())?;
            match *cell {
                Exact(p) => {
                    rounded += matches_printed(&t, p).map_err(|e| format!("({r1},{r2}) s={s}: {e}"))? as usize;
                }
                Sci(v, tol) => {
                    let got = t.to_f64();
                    ensure!(
                        (got - v).abs() + t.err_f64() <= tol,
                        "({r1},{r2}) s={s}: {got:e} not within {tol:e} of {v:e}"
                    );
                }
                Below(bound) => {
                    let upper = t.to_f64() + t.err_f64();
                    ensure!(upper < bound, "({r1},{r2}) s={s}: upper bound {upper:e} not below {bound:e}");
                }
            }
            cells += 1;
        }
    }
    let tiny = h::sigrank(sig(5, 0), 1, 1e-30).unwrap().to_f64();
    Ok(format!("{cells} cells ({rounded} round to the printed digits); (5,0) s=1 = {tiny:.3e}"))
}

fn criterion_4() -> Outcome {
    let mut rounded = 0;
    for &((r1, r2), printed) in SPLITTING {
        let t = h::split_prob(sig(r1, r2), EPS).map_err(|e| e.to_string())?;
        rounded += matches_printed(&t, printed).map_err(|e| format!("({r1},{r2}): {e}"))? as usize;
    }
    Ok(format!("{} cells ({rounded} round to the printed digits), (1,r2) rows exactly 1", SPLITTING.len()))
}

/// A printed example: the two spaces, the rows of `S` and its stabilizer order.
struct Example {
    left: &'static str,
    right: &'static str,
    rows: &'static [&'static str],
    stab: u64,
}

const EXAMPLES: &[Example] = &[
    Example { left: "nonalt:2", right: "nonalt:2", rows: &["1111", "0101"], stab: 2 },
    Example { left: "nonalt:2", right: "nonalt:2", rows: &["0011", "1100"], stab: 4 },
    Example { left: "nonalt:2", right: "alt:2", rows: &["0010", "1100"], stab: 4 },
    Example { left: "nonalt:3", right: "nonalt:3", rows: &["111111", "011011", "110110"], stab: 6 },
    Example { left: "nonalt:3", right: "nonalt:3", rows: &["111111", "000110", "110000"], stab: 4 },
    Example {
        left: "nonalt:4",
        right: "nonalt:4",
        rows: &["11111111", "00010001", "01100110", "11001100"],
        stab: 48,
    },
    Example {
        left: "nonalt:4",
        right: "nonalt:4",
        rows: &["11111111", "00010001", "00001100", "11000000"],
        stab: 32,
    },
    Example {
        left: "nonalt:4",
        right: "nonalt:4",
        rows: &["01100110", "11001100", "00001111", "11110000"],
        stab: 384,
    },
    Example {
        left: "nonalt:4",
        right: "nonalt:4",
        rows: &["00001111", "00001100", "11110000", "11000000"],
        stab: 256,
    },
    Example { left: "nonalt:4", right: "alt:4", rows: &["11001000", "01100100", "00000010", "11110000"], stab: 384 },
    Example { left: "nonalt:4", right: "alt:4", rows: &["00001000", "00000010", "11000000", "00110000"], stab: 768 },
    Example {
        left: "nonalt:5",
        right: "nonalt:5",
        rows: &["1111111111", "0001100011", "0011000110", "0111101111", "1100011000"],
        stab: 720,
    },
    Example {
        left: "nonalt:5",
        right: "nonalt:5",
        rows: &["1111111111", "0001100011", "0011000110", "0000011000", "1100000000"],
        stab: 384,
    },
    Example {
        left: "nonalt:5",
        right: "nonalt:5",
        rows: &["1111111111", "0000000110", "0000011000", "0011000000", "1100000000"],
        stab: 2304,
    },
];

fn criterion_5() -> Outcome {
    for ex in EXAMPLES {
        let (l, r) = (spec(ex.left), spec(ex.right));
        let vs = OrthoSum::standard(l, r).map_err(|e| e.to_string())?;
        let s = Subspace::from_matrix(&BitMatrix::parse(ex.rows).unwrap());
        let label = iso::label_of(&vs, &s).map_err(|e| format!("{} ⊥ {} {:?}: {e}", ex.left, ex.right, ex.rows))?;
        let formula = iso::orbit_stats(&label, 2).map_err(|e| e.to_string())?.stab;
        let brute = iso::brute_stabilizer_order(&vs, &s).map_err(|e| e.to_string())?;
        ensure!(
            formula == BigUint::from(ex.stab) && brute == ex.stab,
            "{} ⊥ {} {:?}: formula {formula}, brute {brute}, expected {}",
            ex.left,
            ex.right,
            ex.rows,
            ex.stab
        );
    }
    let blocks: [(&str, &str, &[u64]); 6] = [
        ("nonalt:2", "nonalt:2", &[2, 4]),
        ("nonalt:2", "alt:2", &[4]),
        ("nonalt:3", "nonalt:3", &[6, 4]),
        ("nonalt:4", "nonalt:4", &[48, 32, 384, 256]),
        ("nonalt:4", "alt:4", &[384, 768]),
        ("nonalt:5", "nonalt:5", &[720, 384, 2304]),
    ];
    for (l, r, expected) in blocks {
        let stabs: Vec<u64> = iso::class_labels(spec(l), spec(r))
            .map_err(|e| e.to_string())?
            .iter()
            .map(|lab| iso::to_u64(&iso::orbit_stats(lab, 2).unwrap().stab).unwrap())
            .collect();
        ensure!(stabs == expected, "{l} ⊥ {r}: stabilizers {stabs:?}, expected {expected:?}");
    }
    let mut checked = 0;
    for (a, b) in iso::all_type_pairs(8).into_iter().filter(|(a, b)| a.n <= 4 && b.n <= 4) {
        let vs = OrthoSum::standard(a, b).map_err(|e| e.to_string())?;
        for label in iso::class_labels(a, b).map_err(|e| e.to_string())? {
            let rep = iso::representative_in(&vs, &label).map_err(|e| e.to_string())?;
            let brute = iso::brute_stabilizer_order(&vs, &rep).map_err(|e| e.to_string())?;
            let formula = iso::orbit_stats(&label, 2).map_err(|e| e.to_string())?.stab;
            ensure!(BigUint::from(brute) == formula, "{label:?}: brute {brute}, formula {formula}");
            checked += 1;
        }
    }
    Ok(format!("{} printed subspaces; {checked} labels with n,n' <= 4 match brute force", EXAMPLES.len()))
}

fn criterion_6() -> Outcome {
    let pairs = iso::all_type_pairs(10);
    for &(a, b) in &pairs {
        let r = iso::mass_check(a, b, 2).map_err(|e| e.to_string())?;
        ensure!(r.brute.is_some() && r.ok(), "{a} ⊥ {b}: {r}");
    }
    let example = iso::mass_check(spec("nonalt:3"), spec("nonalt:3"), 2).unwrap();
    Ok(format!("{} type pairs; nonalt:3 ⊥ nonalt:3: {example}", pairs.len()))
}

fn criterion_7() -> Outcome {
    let mut n = 0;
    for q in [2i64, 4] {
        let qr = BigRational::from_integer(BigInt::from(q));
        for m in 0..=8 {
            for r2 in 0..=4 {
                let w = h::pksum_wz_check(&qr, m, r2).map_err(|e| e.to_string())?;
                ensure!(w.passed(), "q={q} m={m} r2={r2}: identity {} recurrence {}", w.identity_holds, w.recurrence_holds);
                n += 1;
            }
        }
    }
    let w = h::pksum_wz_check(&BigRational::from_integer(2.into()), 1, 0).unwrap();
    ensure!(w.sum_lhs == frac("8/5"), "q=2 m=1 r2=0: sum {} != 8/5", w.sum_lhs);
    Ok(format!("{n} (q,m,r2) instances; q=2 m=1 r2=0 sum = {}", w.sum_lhs))
}

fn criterion_8() -> Outcome {
    let mut n = 0;
    for m in 1..=5 {
        for r in 0..m {
            for t in 1..=m {
                let counts = h::random_subspace_counts(m, r, t).map_err(|e| e.to_string())?;
                for (sp, c) in counts.iter().enumerate() {
                    let formula = h::random_subspace_prob(2, m, r, t, sp).unwrap_or_else(|_| BigRational::zero());
                    ensure!(*c == formula, "(m,r,t,s')=({m},{r},{t},{sp}): count {c}, formula {formula}");
                }
                n += 1;
            }
        }
    }
    let split: Vec<BigRational> = (0..=1).map(|sp| h::random_subspace_prob(2, 3, 1, 2, sp).unwrap()).collect();
    ensure!(split == [frac("2/3"), frac("1/3")], "(3,1,2) split {split:?}");
    Ok(format!("{n} (m,r,t) instances; (3,1,2) gives s'=0: 2/3, s'=1: 1/3"))
}

fn criterion_9() -> Outcome {
    let trials = 1_000_000;
    let mut notes = Vec::new();
    for (r1, r2, seed) in [(3usize, 0usize, 2024u64), (5, 0, 2025)] {
        let s = sig(r1, r2);
        let report = mc::simulate(s, trials, seed, CompareOptions::default()).map_err(|e| e.to_string())?;
        for c in &report.comparisons {
            ensure!(c.passed(), "({r1},{r2}) {}: max |z| = {:.2}", c.name, c.max_abs_z);
        }
        ensure!(report.passed(), "({r1},{r2}): mean 2^rho z = {:.2}", report.mean_two_pow_rho.2);
        let conditional = report.comparisons.iter().filter(|c| c.name.starts_with("s |")).count();
        ensure!(conditional > 0, "({r1},{r2}): no conditional cell reached the trial threshold");

        // the printed cells themselves, not only the closed forms
        let t1 = CLASS_PROBS.iter().find(|(k, _)| *k == (r1, r2)).unwrap().1;
        let k_exact: Vec<f64> = t1.iter().map(|f| frac(f).to_f64().unwrap()).collect();
        let k_labels: Vec<String> = (0..k_exact.len()).map(|k| format!("k={k}")).collect();
        let c = mc::compare_distributions("k", &k_labels, &report.counts.k, &k_exact, 4.0).map_err(|e| e.to_string())?;
        ensure!(c.passed(), "({r1},{r2}) k vs printed: max |z| = {:.2}", c.max_abs_z);

        let t3 = SIGNATURE_RANKS.iter().find(|(k, _)| *k == (r1, r2)).unwrap().1;
        let s_exact: Vec<f64> = t3
            .iter()
            .map(|c| match *c {
                Exact(p) => p.parse().unwrap(),
                Sci(v, _) | Below(v) => v,
            })
            .collect();
        let s_labels: Vec<String> = (1..=r1).map(|v| format!("s={v}")).collect();
        let c = mc::compare_distributions("s", &s_labels, &report.counts.s[1..], &s_exact, 4.0)
            .map_err(|e| e.to_string())?;
        ensure!(c.passed(), "({r1},{r2}) s vs printed: max |z| = {:.2}", c.max_abs_z);

        let sp: f64 = SPLITTING.iter().find(|(k, _)| *k == (r1, r2)).unwrap().1.parse().unwrap();
        let split = report.counts.split;
        let c = mc::compare_distributions(
            "split",
            &["split".into(), "not split".into()],
            &[split, trials - split],
            &[sp, 1.0 - sp],
            4.0,
        )
        .map_err(|e| e.to_string())?;
        ensure!(c.passed(), "({r1},{r2}) split vs printed: z = {:.2}", c.max_abs_z);

        let worst = report.comparisons.iter().map(|c| c.max_abs_z).fold(0.0, f64::max);
        notes.push(format!("({r1},{r2}) {} comparisons, {conditional} conditional, max |z| {worst:.2}", report.comparisons.len()));
    }
    Ok(format!("N = {trials}: {}", notes.join("; ")))
}

fn criterion_10() -> Outcome {
    let mut notes = Vec::new();
    for (i, ty) in [SpaceType::Alternating, SpaceType::NonAltOdd, SpaceType::NonAltEven].into_iter().enumerate() {
        let r = sigmap::symspace::witt_selftest(ty, 8, 10_000, 77 + i as u64);
        ensure!(r.passed(), "{ty}: {} failures, first: {}", r.failures.len(), r.failures[0]);
        ensure!(r.extended + r.rejected == 10_000, "{ty}: {} + {} instances", r.extended, r.rejected);
        ensure!(r.extended > 0 && r.rejected > 0, "{ty}: extended {}, rejected {}", r.extended, r.rejected);
        notes.push(format!("{ty} {} extended / {} rejected", r.extended, r.rejected));
    }
    Ok(notes.join("; "))
}

fn criterion_11() -> Outcome {
    let f = CubicForm::new(1, -1, -2, 1).unwrap();
    ensure!(f.disc() == 49, "disc(1,-1,-2,1) = {}", f.disc());
    let f = CubicForm::new(1, 0, -4, -1).unwrap();
    ensure!(f.disc() == 229, "disc(1,0,-4,-1) = {}", f.disc());

    let small: BTreeSet<i128> = cubicforms::scan(250).map_err(|e| e.to_string())?.iter().map(|r| r.disc).collect();
    ensure!(small == BTreeSet::from([49, 81, 148, 169, 229]), "scan(250) = {small:?}");
    let big = cubicforms::scan(14_000).map_err(|e| e.to_string())?;
    ensure!(big.iter().any(|r| r.disc == 13689), "scan(14000) misses 13689");

    let g = CubicForm::new(1, 0, -39, -26).unwrap();
    ensure!(!cubicforms::is_maximal_at(&g, 2).map_err(|e| e.to_string())?, "(1,0,-39,-26) maximal at 2");
    ensure!(!cubicforms::is_maximal(&g).map_err(|e| e.to_string())?, "(1,0,-39,-26) maximal");

    // The fourth polynomial is not monogenic: its discriminant is 8^2 times the
    // field discriminant, so the printed value is reproduced by `field_disc`.
    let quintics: [(&[i64], i64, i64); 5] = [
        (&[1, -1, -4, 3, 3, -1], 14641, 1),
        (&[1, -2, -3, 5, 1, -1], 36497, 1),
        (&[1, -2, -6, 8, 8, 1], 638597, 1),
        (&[1, -1, -21, -7, 68, 60], 52315684, 8),
        (&[1, -2, -32, 41, 220, -289], 405673292473, 1),
    ];
    for (coeffs, disc, index) in quintics {
        let field = cubicforms::field_disc(coeffs).map_err(|e| e.to_string())?;
        let poly = cubicforms::poly_disc(coeffs).map_err(|e| e.to_string())?;
        ensure!(field == BigInt::from(disc), "{coeffs:?}: field discriminant {field}, expected {disc}");
        ensure!(poly == &field * BigInt::from(index * index), "{coeffs:?}: poly disc {poly}, index {index}");
    }
    Ok(format!("anchors 49/229; scan(250) = {small:?}; scan(14000) has {} fields incl. 13689; 5 quintics", big.len()))
}

fn criterion_12() -> Outcome {
    let pool: Vec<CubicForm> = cubicforms::scan(50_000).map_err(|e| e.to_string())?.iter().map(|r| r.reduced_form).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let trials = 10_000;
    let mut failures = 0;
    let mut first = None;
    for _ in 0..trials {
        let f = pool[rng.gen_range(0..pool.len())];
        let len = rng.gen_range(0..=8);
        let g = Gl2::random_word(len, &mut rng);
        let moved = f.transform(&g).map_err(|e| e.to_string())?;
        let back = cubicforms::reduce(&moved).map_err(|e| e.to_string())?;
        if back != f {
            failures += 1;
            first.get_or_insert(format!("{f} -> {moved} -> {back}"));
        }
    }
    ensure!(failures == 0, "{failures} failures, first {}", first.unwrap());
    Ok(format!("{trials} round trips over {} reduced forms, 0 failures", pool.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("exact class probabilities", criterion_1),
        ("narrow 2-rank densities and moments", criterion_2),
        ("unit signature rank densities", criterion_3),
        ("splitting probabilities", criterion_4),
        ("stabilizer orders of the worked examples", criterion_5),
        ("mass formula for n + n' <= 10", criterion_6),
        ("weighted p-tilde sum and WZ recurrence", criterion_7),
        ("random subspace intersection formula", criterion_8),
        ("Monte Carlo against the tables", criterion_9),
        ("Witt extension suite", criterion_10),
        ("cubic and quintic discriminant anchors", criterion_11),
        ("reduced form round trips", criterion_12),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut total = Duration::ZERO;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = format!("criterion {:>2}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| id.contains(f.as_str()) || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        total += elapsed;
        match outcome {
            Ok(detail) => println!("{id} PASS ({:.2}s) {name}: {detail}", elapsed.as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("{id} FAIL ({:.2}s) {name}: {detail}", elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {failed} failed, total {:.1}s", total.as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
