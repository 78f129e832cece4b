//! Randomized invariants for the lattice, the decision cascade, the
//! spectral-sequence bookkeeping, the deformation product, and the
//! interpolation oracle.

use phantom_core::deformation::{product, product_formal, T1Label, T2Vec};
use phantom_core::interp::{interp_dim, FatPointProblem, DEFAULT_PRIME};
use phantom_core::picard::{
    cremona_step, euler_char, intersect, permute, reflection_r, DivisorClass, Permutation,
};
use phantom_core::projection::{einfty_total, E1Page, ProjError};
use phantom_core::systems::{decide, enumerate_split_cases, CaseConstraint, VerdictKind};
use phantom_core::hom::Entry;
use proptest::prelude::*;
use std::collections::BTreeMap;

fn arb_class() -> impl Strategy<Value = DivisorClass> {
    (-30i64..=30, proptest::array::uniform10(-12i64..=12)).prop_map(|(h, e)| DivisorClass::new(h, e))
}

fn arb_effective() -> impl Strategy<Value = DivisorClass> {
    (0i64..=40, proptest::array::uniform10(0i64..=12)).prop_map(|(d, m)| DivisorClass::from_deg_mults(d, m))
}

fn arb_triple() -> impl Strategy<Value = (usize, usize, usize)> {
    (0usize..10, 0usize..9, 0usize..8).prop_map(|(a, b, c)| {
        // three distinct 1-based indices from independent draws
        let i = a;
        let j = if b >= i { b + 1 } else { b };
        let mut k = c;
        for &used in &[i.min(j), i.max(j)] {
            if k >= used {
                k += 1;
            }
        }
        (i + 1, j + 1, k + 1)
    })
}

fn arb_perm() -> impl Strategy<Value = Permutation> {
    Just(()).prop_perturb(|_, mut rng| {
        let mut map = [0usize; 10];
        for (i, slot) in map.iter_mut().enumerate() {
            *slot = i;
        }
        for i in (1..10).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            map.swap(i, j);
        }
        Permutation::from_images(map).unwrap()
    })
}

proptest! {
    #[test]
    fn intersection_symmetric_bilinear(a in arb_class(), b in arb_class(), c in arb_class(), k in -5i64..=5) {
        prop_assert_eq!(intersect(&a, &b), intersect(&b, &a));
        prop_assert_eq!(intersect(&a.add(&b), &c), intersect(&a, &c) + intersect(&b, &c));
        prop_assert_eq!(intersect(&a.scale(k), &b), k * intersect(&a, &b));
    }

    #[test]
    fn reflection_is_an_isometry(a in arb_class(), b in arb_class()) {
        let (ra, rb) = (reflection_r(&a), reflection_r(&b));
        prop_assert_eq!(intersect(&ra, &rb), intersect(&a, &b));
        prop_assert_eq!(reflection_r(&ra), a);
        prop_assert_eq!(euler_char(&ra), euler_char(&a));
    }

    #[test]
    fn reflection_fixes_canonical(_x in 0..1i32) {
        let k = DivisorClass::canonical();
        prop_assert_eq!(reflection_r(&k), k);
    }

    #[test]
    fn cremona_step_is_an_isometry(a in arb_class(), (i, j, k) in arb_triple()) {
        let s = cremona_step(&a, i, j, k);
        prop_assert_eq!(intersect(&s, &s), intersect(&a, &a));
        prop_assert_eq!(euler_char(&s), euler_char(&a));
        let kk = DivisorClass::canonical();
        prop_assert_eq!(cremona_step(&kk, i, j, k), kk);
        prop_assert_eq!(intersect(&s, &cremona_step(&kk, i, j, k)), intersect(&a, &kk));
    }

    #[test]
    fn permutation_preserves_lattice_data(a in arb_class(), b in arb_class(), p in arb_perm()) {
        prop_assert_eq!(intersect(&permute(&p, &a), &permute(&p, &b)), intersect(&a, &b));
        prop_assert_eq!(euler_char(&permute(&p, &a)), euler_char(&a));
    }

    #[test]
    fn decide_is_permutation_invariant(a in arb_effective(), p in arb_perm()) {
        prop_assert_eq!(decide(&a).kind, decide(&permute(&p, &a)).kind);
    }

    #[test]
    fn decide_commutes_with_cremona(a in arb_effective(), (i, j, k) in arb_triple()) {
        // A Cremona step does not change h^0 at general points, so two
        // certified verdicts must agree.
        let va = decide(&a).kind;
        let vb = decide(&cremona_step(&a, i, j, k)).kind;
        if va != VerdictKind::Unknown && vb != VerdictKind::Unknown {
            prop_assert_eq!(va, vb);
        }
    }

    #[test]
    fn split_cases_satisfy_their_box(td in 20i64..=60, tm in 6i64..=19) {
        let constraint = CaseConstraint::homogeneous_split(td, tm, 0..=td, 0..=tm);
        for (d, m, mp) in enumerate_split_cases(&constraint) {
            prop_assert_eq!(mp, 0);
            prop_assert!((0..=td).contains(&d) && (0..=tm).contains(&m));
            prop_assert!((d, m) != (0, 0) && (d, m) != (td, tm));
            // both the case and its complement clear the slope threshold
            prop_assert!(721 * d >= 2280 * m);
            prop_assert!(721 * (td - d) >= 2280 * (tm - m));
        }
    }

    #[test]
    fn deformation_product_is_bilinear(
        u in 0u8..12, v in 0u8..12, w in 0u8..12, a in -4i64..=4, b in -4i64..=4,
    ) {
        let (bu, bv, bw) = (T1Label::b(u + 1), T1Label::b(v + 1), T1Label::b(w + 1));
        let lhs = product_formal(&vec![(a, bu), (b, bv)], &vec![(1, bw)]);
        let rhs = product(bu, bw).scale(a).add(&product(bv, bw).scale(b));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn obstruction_classes_annihilate(u in 1u8..=2, v in 0u8..12) {
        // the s generators pair to zero with everything
        let s = T1Label::s(u);
        prop_assert_eq!(product(s, T1Label::b(v + 1)), T2Vec::zero());
        prop_assert_eq!(product(T1Label::b(v + 1), s), T2Vec::zero());
        prop_assert_eq!(product(s, T1Label::s(3 - u)), T2Vec::zero());
    }

    #[test]
    fn higher_differentials_never_silently_degenerate(
        p in -6i32..=0, q in 0i32..=8, r in 2i32..=4, c1 in 1i64..=20, c2 in 1i64..=20,
    ) {
        // two entries connected by a d_r (r >= 2): totals must be refused
        let mut page = E1Page::new();
        page.insert(p, q + r - 1, Entry::num(c1));
        page.insert(p + r, q, Entry::num(c2));
        let out = einfty_total(&page, &BTreeMap::new());
        prop_assert!(matches!(out, Err(ProjError::DegeneracyUnprovable(..))), "{out:?}");
    }

    #[test]
    fn d1_adjacent_entries_are_fine(p in -6i32..=0, q in 0i32..=8, c in 1i64..=20) {
        let mut page = E1Page::new();
        page.insert(p, q, Entry::num(c));
        page.insert(p + 1, q, Entry::num(c + 1));
        // cancel the source completely so nothing survives ambiguously
        let ranks = BTreeMap::from([((p, q), c)]);
        let total = einfty_total(&page, &ranks).unwrap();
        prop_assert_eq!(total.get(p + 1 + q), Entry::num(1));
    }

    #[test]
    fn interp_rank_grows_with_conditions(
        d in 1i64..=5, m in proptest::array::uniform10(0i64..=2), seed in 0u64..1000, bump in 0usize..10,
    ) {
        let a = interp_dim(&FatPointProblem::new(d, m, DEFAULT_PRIME, seed)).unwrap();
        let mut m2 = m;
        m2[bump] += 1;
        let b = interp_dim(&FatPointProblem::new(d, m2, DEFAULT_PRIME, seed)).unwrap();
        prop_assert!(b.rank >= a.rank);
        prop_assert!(a.rank <= a.rows && a.rank <= a.columns);
        // same seed, same answer
        let again = interp_dim(&FatPointProblem::new(d, m, DEFAULT_PRIME, seed)).unwrap();
        prop_assert_eq!(a, again);
    }
}
