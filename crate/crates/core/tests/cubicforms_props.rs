use std::collections::HashSet;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sigmap::cubicforms::*;

fn form(bound: i64) -> impl Strategy<Value = CubicForm> {
    (-bound..=bound, -bound..=bound, -bound..=bound, -bound..=bound).prop_map(|(a, b, c, d)| CubicForm { a, b, c, d })
}

fn word(len: usize) -> impl Strategy<Value = Gl2> {
    proptest::collection::vec(0usize..4, 0..=len).prop_map(|idx| {
        let gens = Gl2::generators();
        idx.into_iter().fold(Gl2::IDENTITY, |acc, i| acc.compose(&gens[i]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn hessian_covariance_identity(f in form(10_000)) {
        let h = f.hessian();
        prop_assert_eq!(h.disc(), -3 * f.disc());
        prop_assert_eq!(BigInt::from(f.disc()), disc_cubic(&f));
    }

    #[test]
    fn discriminant_is_invariant(f in form(50), g in word(8)) {
        if let Ok(t) = f.transform(&g) {
            prop_assert_eq!(t.disc(), f.disc());
            prop_assert_eq!(t.hessian().disc(), f.hessian().disc());
        }
    }

    #[test]
    fn squarefree_shortcut_agrees(f in form(30)) {
        let disc = f.disc();
        if disc == 0 || !is_irreducible(&f).unwrap() {
            return Ok(());
        }
        let n = disc.unsigned_abs();
        if is_squarefree(n).unwrap() {
            prop_assert!(is_maximal(&f).unwrap());
            for p in [2u64, 3, 5, 7, 11, 13] {
                prop_assert!(is_maximal_at(&f, p).unwrap());
            }
        }
    }

    #[test]
    fn maximality_is_invariant(f in form(30), g in word(6)) {
        if f.disc() == 0 || !is_irreducible(&f).unwrap() {
            return Ok(());
        }
        if let Ok(t) = f.transform(&g) {
            for p in [2u64, 3, 5, 7] {
                prop_assert_eq!(is_maximal_at(&t, p).unwrap(), is_maximal_at(&f, p).unwrap());
            }
        }
    }

    #[test]
    fn reduction_is_idempotent_and_equivalent(f in form(40)) {
        if f.disc() <= 0 || !is_irreducible(&f).unwrap() {
            return Ok(());
        }
        let (r, g) = reduce_with_matrix(&f).unwrap();
        prop_assert!(is_reduced(&r).unwrap());
        prop_assert_eq!(f.transform(&g).unwrap(), r);
        prop_assert_eq!(reduce(&r).unwrap(), r);
        prop_assert_eq!(r.disc(), f.disc());
    }
}

#[test]
fn scan_outputs_pass_the_sampler_chain() {
    let out = scan(20_000).unwrap();
    let distinct: HashSet<CubicForm> = out.iter().map(|r| r.reduced_form).collect();
    assert_eq!(distinct.len(), out.len());
    for r in &out {
        assert_eq!(accept(&r.reduced_form).unwrap(), Some(*r));
        assert_eq!(reduce(&r.reduced_form).unwrap(), r.reduced_form);
    }
    assert!(out.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn scan_matches_brute_box() {
    let fast = scan(2000).unwrap();
    let slow = box_scan(2000, 3, 16).unwrap();
    assert_eq!(fast, slow);
    assert_eq!(fast.iter().filter(|r| r.disc <= 1000).count(), 27);
}

#[test]
fn reduction_agrees_with_orbit_search() {
    for r in scan(1500).unwrap() {
        let f = r.reduced_form;
        let found = orbit_search(&f, 5);
        assert_eq!(found.into_iter().collect::<Vec<_>>(), vec![f]);
    }
}

#[test]
fn sampler_is_deterministic_and_consistent() {
    let a = sample_forms(100, 20_000, 5).unwrap();
    let b = sample_forms(100, 20_000, 5).unwrap();
    assert_eq!(a, b);
    assert!(!a.accepted.is_empty());
    for (_, r) in &a.accepted {
        assert!(r.disc > 0);
        assert!(is_reduced(&r.reduced_form).unwrap());
        assert!(is_maximal(&r.reduced_form).unwrap());
        assert!(is_irreducible(&r.reduced_form).unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert!(sample_form(0, &mut rng).is_err());
    assert!(sample_form(MAX_HEIGHT + 1, &mut rng).is_err());
}

#[test]
fn scan_bound_is_enforced() {
    assert!(scan(MAX_SCAN_DISC + 1).is_err());
    assert!(scan(0).unwrap().is_empty());
}

#[test]
fn quintic_anchors() {
    let cases: [(&[i64], i64); 5] = [
        (&[1, -1, -4, 3, 3, -1], 14641),
        (&[1, -2, -3, 5, 1, -1], 36497),
        (&[1, -2, -6, 8, 8, 1], 638597),
        (&[1, -1, -21, -7, 68, 60], 52315684),
        (&[1, -2, -32, 41, 220, -289], 405673292473),
    ];
    for (coeffs, disc) in cases {
        let field = field_disc(coeffs).unwrap();
        assert_eq!(field, BigInt::from(disc), "{coeffs:?}");
        let index_sq = poly_disc(coeffs).unwrap() / &field;
        let expected_index = if disc == 52315684 { 8 } else { 1 };
        assert_eq!(index_sq, BigInt::from(expected_index * expected_index), "{coeffs:?}");
    }
    assert_eq!(poly_disc(&[1, -1, -21, -7, 68, 60]).unwrap(), BigInt::from(3348203776i64));
    assert_eq!(field_disc(&[1, 0, -39, -26]).unwrap(), BigInt::from(13689));
    assert_eq!(poly_disc(&[1, 0, -39, -26]).unwrap(), BigInt::from(219024));
}

#[test]
fn parsing_forms() {
    assert_eq!("(1,-1,-2,1)".parse::<CubicForm>().unwrap(), CubicForm { a: 1, b: -1, c: -2, d: 1 });
    assert_eq!("1, 0, -4, -1".parse::<CubicForm>().unwrap().disc(), 229);
    assert!("1,2,3".parse::<CubicForm>().is_err());
}
