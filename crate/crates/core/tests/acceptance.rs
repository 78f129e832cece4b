//! End-to-end acceptance gate: every headline computation of the toolkit,
//! one pass/fail line each (run with `--nocapture` to see them).

use phantom_core::deformation::{quadratic_dimension_bound, special_locus_report};
use phantom_core::hom::{curve_genus, hom, Entry, ObjectSpec};
use phantom_core::interp::{interp_dim, FatPointProblem, CROSSCHECK_PRIME, DEFAULT_PRIME};
use phantom_core::picard::{
    cremona_reduce, euler_char, intersect, reflection_r, DivisorClass, ReductionStep,
};
use phantom_core::projection::{
    curve_projection_report, e1_page, einfty_total, euler_pairing, project_numclass, E1Page,
    ExceptionalCollection, NumClass, ProjError,
};
use phantom_core::systems::{decide, enumerate_split_cases, CaseConstraint, VerdictKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::time::Instant;

fn check<F: FnOnce() + UnwindSafe>(label: &str, body: F) {
    match catch_unwind(body) {
        Ok(()) => println!("criterion {label}: pass"),
        Err(e) => {
            println!("criterion {label}: FAIL");
            resume_unwind(e);
        }
    }
}

fn k() -> DivisorClass {
    DivisorClass::canonical()
}

fn f() -> DivisorClass {
    DivisorClass::f_class()
}

fn random_class(rng: &mut ChaCha8Rng) -> DivisorClass {
    let mut e = [0i64; 10];
    for slot in &mut e {
        *slot = rng.gen_range(-20..=20);
    }
    DivisorClass::new(rng.gen_range(-50..=50), e)
}

#[test]
fn criterion_01_euler_characteristic_table() {
    check("1 (Euler-characteristic table)", || {
        for i in 1..=10 {
            let d = DivisorClass::d_class(i);
            assert_eq!(euler_char(&d), 1, "chi(D_{i})");
            assert_eq!(euler_char(&f().sub(&d)), 2, "chi(F-D_{i})");
            assert_eq!(euler_char(&f().scale(2).sub(&d)), 5, "chi(2F-D_{i})");
            let cls = k().scale(-1).add(&DivisorClass::exceptional(i));
            assert_eq!(euler_char(&cls), 1, "chi(-K+E_{i})");
        }
        assert_eq!(euler_char(&f()), 3);
        assert_eq!(euler_char(&f().scale(2)), 6);
        assert_eq!(euler_char(&f().scale(-3)), 1);
    });
}

#[test]
fn criterion_02_reflection() {
    check("2 (reflection checks)", || {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let (a, b) = (random_class(&mut rng), random_class(&mut rng));
            assert_eq!(intersect(&reflection_r(&a), &reflection_r(&b)), intersect(&a, &b));
            assert_eq!(reflection_r(&reflection_r(&a)), a);
        }
        assert_eq!(reflection_r(&k()), k());
    });
}

fn skyscraper_pages() -> (E1Page, E1Page) {
    let coll = ExceptionalCollection::default_krah();
    let x = ObjectSpec::sky("x");
    let y = ObjectSpec::sky("y");
    let same = e1_page(&x, &x, &coll).unwrap();
    let distinct = e1_page(&y, &x, &coll).unwrap();
    (same, distinct)
}

#[test]
fn criterion_03_skyscraper_hom_table() {
    check("3 (skyscraper Hom table)", || {
        let (same, distinct) = skyscraper_pages();
        for page in [&same, &distinct] {
            assert_eq!(page.get(-1, 2), Entry::num(13));
            assert_eq!(page.get(-2, 4), Entry::num(92));
            assert_eq!(page.get(-3, 6), Entry::num(139));
            assert_eq!(page.get(-4, 8), Entry::num(60));
        }
        let same_total = einfty_total(&same, &BTreeMap::from([((-1, 2), 1)])).unwrap();
        let distinct_total = einfty_total(&distinct, &BTreeMap::new()).unwrap();
        for (total, dims) in
            [(&same_total, [1, 14, 92, 139, 60]), (&distinct_total, [0, 13, 92, 139, 60])]
        {
            for (deg, want) in dims.into_iter().enumerate() {
                assert_eq!(total.get(deg as i32), Entry::num(want), "degree {deg}");
            }
        }
    });
}

#[test]
fn criterion_04_alternating_sum_zero() {
    check("4 (alternating sums / numerical projections)", || {
        let (same, distinct) = skyscraper_pages();
        let same_total = einfty_total(&same, &BTreeMap::from([((-1, 2), 1)])).unwrap();
        let distinct_total = einfty_total(&distinct, &BTreeMap::new()).unwrap();
        assert_eq!(same_total.alternating_sum(), Entry::ZERO);
        assert_eq!(distinct_total.alternating_sum(), Entry::ZERO);

        let coll = ExceptionalCollection::default_krah();
        for class in [NumClass::of_skyscraper(), NumClass::of_curve(3)] {
            let projected = project_numclass(&class, &coll);
            assert_eq!(projected, NumClass::ZERO);
            for e in coll.classes() {
                assert_eq!(euler_pairing(&NumClass::of_line(e), &projected), 0);
            }
        }
    });
}

#[test]
fn criterion_05_curve_object() {
    check("5 (curve object)", || {
        let n = 3i64;
        assert_eq!(curve_genus(n), 10);
        let g = ObjectSpec::curve(n);
        let coll = ExceptionalCollection::default_krah();
        let total = einfty_total(&e1_page(&g, &g, &coll).unwrap(), &BTreeMap::new()).unwrap();
        assert_eq!(total.get(0), Entry::num(1));
        assert_eq!(total.get(1), Entry { c: 0, ext1: 1, ext2: 0 });
        assert_eq!(total.get(2), Entry { c: 4 * n * n, ext1: 0, ext2: 1 });
        assert_eq!(total.get(3), Entry::num(3 * n * n));

        // ext1 - ext2 = n^2 + 1, read off the Euler pairing of [G] with itself
        let gg = hom(&g, &g).unwrap();
        let alt = gg.alternating_sum();
        assert_eq!((alt.ext1, alt.ext2), (-1, 1));
        let pairing = euler_pairing(&NumClass::of_curve(n), &NumClass::of_curve(n));
        assert_eq!(pairing, -n * n);
        assert_eq!(alt.c - (n * n + 1), pairing);

        let report = curve_projection_report(n).unwrap();
        assert_eq!(report.h1_mult, 3 * n);
        assert_eq!(report.h0_quotient, (n, 2 * n));
        assert_eq!(report.f_cohomology, (0, 0, 3));
        assert_eq!(report.class_identity, NumClass::ZERO);
        assert!(report.pass);
    });
}

#[test]
fn criterion_06_special_locus_enumeration() {
    check("6 (special-locus enumeration)", || {
        let scans: [(CaseConstraint, &[(i64, i64, i64)]); 3] = [
            (
                CaseConstraint::homogeneous_split(57, 18, 0..=57, 0..=18),
                &[(19, 6, 0), (38, 12, 0)],
            ),
            (
                CaseConstraint::distinguished_split(10, 3, 1, 0..=5, 0..=3, 0..=4),
                &[(1, 0, 3), (3, 1, -1)],
            ),
            (
                CaseConstraint::distinguished_split(29, 9, 1, 0..=5, 0..=9, 0..=10),
                &[(1, 0, 3), (2, 0, 6), (3, 0, 9), (3, 1, -1), (4, 1, 2)],
            ),
        ];
        for (constraint, want) in scans {
            assert_eq!(enumerate_split_cases(&constraint), want);
        }

        let report = special_locus_report();
        assert!(report.pass);
        for (class, verdict) in &report.divisorial {
            assert_eq!(verdict.kind, VerdictKind::Dim(0), "{class}");
        }
        assert_eq!(report.divisorial.len(), 10);
        for system in &report.systems {
            assert!(system.all_refuted, "{}", system.name);
            for case in &system.cases {
                assert!(case.refuted, "{}: {:?}", system.name, case.case);
                let trace = if case.component_verdict.kind == VerdictKind::Empty {
                    &case.component_verdict.trace
                } else {
                    &case.complement_verdict.trace
                };
                assert!(!trace.is_empty(), "{}: {:?}", system.name, case.case);
            }
        }
    });
}

#[test]
fn criterion_07_cremona_chain() {
    check("7 (Cremona chain)", || {
        let start = DivisorClass::from_deg_mults(7, [4, 2, 2, 2, 2, 2, 2, 2, 2, 2]);
        let reduction = cremona_reduce(&start);
        let expected = [
            DivisorClass::from_deg_mults(6, [3, 2, 2, 2, 2, 2, 2, 2, 1, 1]),
            DivisorClass::from_deg_mults(5, [2, 2, 2, 2, 2, 2, 1, 1, 1, 1]),
            DivisorClass::from_deg_mults(4, [2, 2, 2, 1, 1, 1, 1, 1, 1, 1]),
            DivisorClass::from_deg_mults(2, [1, 1, 1, 1, 1, 1, 1, 0, 0, 0]),
            DivisorClass::from_deg_mults(1, [1, 1, 1, 1, 0, 0, 0, 0, 0, 0]),
        ];
        let logged: Vec<DivisorClass> = reduction.log.iter().map(|s| *s.class()).collect();
        assert_eq!(logged, expected);
        assert!(reduction.log.iter().all(|s| matches!(s, ReductionStep::Cremona { .. })));
        assert_eq!(reduction.result, expected[4]);
        assert!(reduction.stuck_negative);
    });
}

#[test]
fn criterion_08_hull_quadrics() {
    check("8 (hull quadrics)", || {
        let report = quadratic_dimension_bound();
        assert_eq!(report.product_rank, 78);
        assert_eq!(report.quadric_rank, 78);
        assert!(report.all_x_monomials_in_span);
        assert!(!report.y0_y1_in_span);
        assert_eq!(report.surviving_directions, ["y0", "y1"]);
        assert!(report.pass);
    });
}

#[test]
fn criterion_09_oracle_concordance() {
    check("9 (oracle concordance)", || {
        // (class, expected projective dimension at general points)
        let classes: Vec<(DivisorClass, i64)> = vec![
            (f().scale(-1), -1),
            (f().scale(-2), -1),
            (DivisorClass::d_class(1).scale(-1), -1),
            (DivisorClass::d_class(1).sub(&f()), -1),
            (f().scale(-3), 0),
            (DivisorClass::homogeneous(57, 19), -1),
            (DivisorClass::from_deg_mults(57, [19, 18, 18, 18, 18, 18, 18, 18, 18, 18]), -1),
            (DivisorClass::from_deg_mults(1, [1, 1, 1, 1, 0, 0, 0, 0, 0, 0]), -1),
            (DivisorClass::from_deg_mults(2, [1, 1, 1, 1, 1, 1, 0, 0, 0, 0]), -1),
            (DivisorClass::from_deg_mults(26, [10, 8, 8, 8, 8, 8, 8, 8, 8, 8]), -1),
        ];
        for (prime, seed) in [(DEFAULT_PRIME, 17u64), (CROSSCHECK_PRIME, 2026u64)] {
            for (class, want) in &classes {
                let problem = FatPointProblem::for_class(class, prime, seed).unwrap();
                let clock = Instant::now();
                let result = interp_dim(&problem).unwrap();
                let elapsed = clock.elapsed();
                assert!(
                    elapsed.as_secs_f64() < 5.0,
                    "{class}: rank took {elapsed:?} at prime {prime}"
                );
                assert_eq!(result.projective_dim, *want, "{class} at prime {prime}");
                // a certified verdict must agree with the oracle
                if let Some(dim) = decide(class).projective_dim() {
                    assert_eq!(dim, result.projective_dim, "{class}");
                }
            }
        }
    });
}

#[test]
fn criterion_10_degeneracy_guard() {
    check("10 (degeneracy guard)", || {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let p = rng.gen_range(-6..=-2i32);
            let q = rng.gen_range(2..=8i32);
            let mut page = E1Page::new();
            page.insert(p, q + 1, Entry::num(rng.gen_range(1..=30)));
            page.insert(p + 2, q, Entry::num(rng.gen_range(1..=30)));
            let out = einfty_total(&page, &BTreeMap::new());
            assert!(
                matches!(out, Err(ProjError::DegeneracyUnprovable(..))),
                "d2-connected page at ({p},{q}) was totaled: {out:?}"
            );
        }
    });
}
