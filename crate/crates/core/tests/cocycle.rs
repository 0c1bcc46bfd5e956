mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;

use common::numeric::{self, C};
use common::*;
use qc_core::cocycle::{capture_time, remove_qc, Cocycle, OnSet};
use qc_core::matperturb::{Field, Mat};
use qc_core::shiftspace::{periodic_orbits, EventuallyPeriodicPoint, Sft};
use qc_core::Error;

fn random_cocycle(r: &mut rand_chacha::ChaCha8Rng, space: &Arc<Sft>, field: Field, d: usize, depth: usize) -> Cocycle {
    let entries: Vec<_> = space
        .words(2 * depth + 1)
        .into_iter()
        .map(|w| (w, numeric::well_conditioned(r, field, d)))
        .collect();
    Cocycle::from_words(space, field, d, depth, entries).unwrap()
}

fn rel_dist(a: &Mat, b: &Mat) -> f64 {
    numeric::op_norm(&(a.matrix() - b.matrix())) / numeric::op_norm(b.matrix())
}

#[test]
fn capture_times_by_hand() {
    // ln 100 / ln 1.2 = 25.26...
    assert_eq!(capture_time(10.0, 0.2).unwrap(), 26);
    // (1.5)^2 = 2.25 and 2^2 = 4 sit exactly on M^2, which is not enough
    assert_eq!(capture_time(1.5, 0.5).unwrap(), 3);
    assert_eq!(capture_time(2.0, 1.0).unwrap(), 3);
    assert!(matches!(capture_time(1.0, 0.5), Err(Error::InvalidParameter(_))));
    assert!(matches!(capture_time(2.0, 0.0), Err(Error::InvalidParameter(_))));
}

#[test]
fn incomplete_tables_are_rejected() {
    let g = golden();
    let id = Mat::identity(Field::Real, 2);
    let r = Cocycle::from_words(&g, Field::Real, 2, 1, vec![(vec![0, 0, 0], id)]);
    assert!(matches!(r, Err(Error::MissingValue(_))));
}

#[test]
fn products_along_a_periodic_orbit() {
    let g = golden();
    let a = Mat::diag(Field::Real, &[2.0, 1.0]);
    let b = Mat::diag(Field::Real, &[1.0, 3.0]);
    let f = Cocycle::from_words(&g, Field::Real, 2, 0, vec![(vec![0], a), (vec![1], b)]).unwrap();
    let x = EventuallyPeriodicPoint::periodic(&[0, 1]);
    // F^(4)(x) = B A B A = diag(4, 9)
    let p = f.product(&x, 4).unwrap();
    assert!((p.get(0, 0) - C::new(4.0, 0.0)).norm() < 1e-12);
    assert!((p.get(1, 1) - C::new(9.0, 0.0)).norm() < 1e-12);
    let t = f.kappa_trace(&x, -4, 4).unwrap();
    assert_eq!(t.at(0), Some(1.0));
    assert!((t.at(4).unwrap() - 2.25).abs() < 1e-12);
    assert!((t.at(-4).unwrap() - 2.25).abs() < 1e-12);
    // κ at n = 1, -1, 2, -2, 3, -3: 2, 3, 1.5, 1.5, 4/3, 4.5
    assert_eq!(t.first_above(2.0), Some(-1));
    assert_eq!(t.first_above(3.0), Some(-3));
}

#[test]
fn real_plane_over_periodic_points_is_gated() {
    let f = Cocycle::constant(&golden(), Mat::identity(Field::Real, 2)).unwrap();
    assert!(matches!(remove_qc(&f, 10.0, 0.2), Err(Error::ShortTowerUnsupported { .. })));
}

/// Checks every claim of a removal that does not rest on the certificate.
fn check_removal(f: &Cocycle, m: f64, eps: f64) {
    let out = remove_qc(f, m, eps).unwrap();
    let cert = &out.certificate;
    assert!(cert.pass, "{:?}", cert.failed_towers());
    let g = &out.perturbed;
    let c0 = f.sup_norm().unwrap();
    assert!(g.dist_dprime(f).unwrap() <= eps * c0 * (1.0 + 1e-9));
    for (gx, fx) in g.refinement(f).unwrap() {
        assert!(rel_dist(gx, fx) <= eps * (1.0 + 1e-9));
    }
    assert!(g.dist_d(f).unwrap() >= g.dist_dprime(f).unwrap());
    out.castle.check_partition().unwrap();

    // re-entry at the base makes the product over m traversals a power
    for (i, t) in out.castle.towers.iter().enumerate() {
        if !out.castle.is_short(i) {
            continue;
        }
        assert!(out.castle.short_tower_checks(i).unwrap().pass());
        let reps = cert.n.div_ceil(t.height);
        let y = t.base.sample_point().unwrap();
        let once = g.product(&y, t.height as i64).unwrap();
        let all = g.product(&y, (reps * t.height) as i64).unwrap();
        let err = numeric::op_norm(&(all.matrix() - once.pow(reps as u32).matrix())) / numeric::op_norm(all.matrix());
        assert!(err < 1e-9);
    }

    // every periodic point of period below N is pushed past M in time; the
    // scan stops at the first crossing since longer products lose precision
    let h = cert.horizon as i64;
    for o in periodic_orbits(f.space(), cert.n) {
        for x in o.points() {
            let crossed = (1..=h).any(|n| {
                [n, -n]
                    .iter()
                    .any(|&k| numeric::kappa(g.product(&x, k).unwrap().matrix()) > m)
            });
            assert!(crossed, "orbit {}", o.label());
        }
    }
}

#[test]
fn removal_on_the_golden_mean_complex_plane() {
    let g = golden();
    let mut r = rng(7);
    check_removal(&random_cocycle(&mut r, &g, Field::Complex, 2, 0), 1.5, 0.5);
}

#[test]
fn removal_in_real_dimension_three() {
    let g = golden();
    let mut r = rng(8);
    check_removal(&random_cocycle(&mut r, &g, Field::Real, 3, 0), 1.5, 0.5);
}

#[test]
fn removal_in_the_real_plane_without_short_orbits() {
    let s = no_short_period_sft();
    let mut r = rng(9);
    let f = random_cocycle(&mut r, &s, Field::Real, 2, 1);
    check_removal(&f, 1.5, 0.5);
    let out = remove_qc(&f, 1.5, 0.5).unwrap();
    assert!(out.certificate.towers.iter().all(|t| !t.short));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cocycle_identity(seed in any::<u64>(), m in -8i64..=8, n in -8i64..=8, complex in any::<bool>()) {
        let mut r = rng(seed);
        let space = random_forbidden_sft(&mut r);
        let field = if complex { Field::Complex } else { Field::Real };
        let depth = r.random_range(0..=1usize);
        let f = random_cocycle(&mut r, &space, field, 3, depth);
        let w = random_word(&mut r, &space, 4);
        let x = EventuallyPeriodicPoint::through(&space, &w, -2).unwrap();
        let lhs = f.product(&x, m + n).unwrap();
        let rhs = f.product(&x.shift(m), n).unwrap().mul(&f.product(&x, m).unwrap()).unwrap();
        prop_assert!(rel_dist(&lhs, &rhs) < 1e-10);
        prop_assert!(rel_dist(&f.product(&x, 0).unwrap(), &Mat::identity(field, 3)) == 0.0);
    }

    #[test]
    fn words_and_pieces_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let space = random_forbidden_sft(&mut r);
        let f = random_cocycle(&mut r, &space, Field::Real, 2, 1);
        let p = Cocycle::from_pieces(&space, Field::Real, 2, f.pieces()).unwrap();
        prop_assert_eq!(f.dist_dprime(&p).unwrap(), 0.0);
        for (set, a) in f.pieces() {
            match p.value_on(&set).unwrap() {
                OnSet::Constant(b) => prop_assert_eq!(rel_dist(&b, &a), 0.0),
                other => prop_assert!(false, "{:?}", other),
            }
        }
    }

    #[test]
    fn capture_time_is_monotone(m1 in 1.01f64..50.0, dm in 0.0f64..50.0, eps in 0.01f64..2.0, de in 0.0f64..1.0) {
        let n = capture_time(m1, eps).unwrap();
        prop_assert!(capture_time(m1 + dm, eps).unwrap() >= n);
        prop_assert!(capture_time(m1, eps + de).unwrap() <= n);
        prop_assert!((1.0 + eps).powi(n as i32) > m1 * m1);
        prop_assert!(n == 1 || (1.0 + eps).powi(n as i32 - 1) <= m1 * m1 * (1.0 + 1e-12));
        let formula = (2.0 * m1.ln() / (1.0 + eps).ln()).ceil() as usize;
        prop_assert!(n == formula || n == formula + 1);
    }
}
