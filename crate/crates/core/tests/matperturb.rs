mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;

use common::numeric::{self, C};
use common::rng;
use qc_core::matperturb::{perturb_eigen, perturb_singular, product, Field, Lemma, Mat};
use qc_core::Error;

const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

#[test]
fn hand_computed_statistics() {
    let d = Mat::diag(Field::Real, &[3.0, 1.0]);
    assert!((d.kappa().unwrap() - 3.0).abs() < 1e-12);
    assert!((d.kappa_e().unwrap() - 3.0).abs() < 1e-12);
    // singular values of the Jordan block are φ and 1/φ
    let j = Mat::real(2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
    assert!((j.op_norm().unwrap() - GOLDEN_RATIO).abs() < 1e-12);
    assert!((j.kappa().unwrap() - GOLDEN_RATIO * GOLDEN_RATIO).abs() < 1e-12);
    assert!((j.kappa_e().unwrap() - 1.0).abs() < 1e-12);
    assert!((j.spectral_radius().unwrap() - 1.0).abs() < 1e-12);
    let (s, c) = 0.3f64.sin_cos();
    let rot = Mat::real(2, &[c, -s, s, c]).unwrap();
    assert!((rot.kappa().unwrap() - 1.0).abs() < 1e-12);
    assert!((rot.kappa_e().unwrap() - 1.0).abs() < 1e-12);
    let ev = rot.eigenvalues().unwrap();
    assert!((ev[0] - C::new(c, -s)).norm() < 1e-12);
    assert!((ev[1] - C::new(c, s)).norm() < 1e-12);
}

#[test]
fn singular_lemma_on_the_identity() {
    // every step stretches the tracked direction by 1 + ε
    let id = Mat::identity(Field::Real, 2);
    let r = perturb_singular(&[id.clone(), id], 0.5).unwrap();
    assert_eq!(r.lemma, Lemma::Singular);
    assert!((r.achieved - 2.25).abs() < 1e-12);
    assert!((numeric::kappa(&numeric::product(&r.perturbed)) - 2.25).abs() < 1e-12);
    for e in &r.relative_errors {
        assert!((e - 0.5).abs() < 1e-12);
    }
}

#[test]
fn eigen_lemma_on_the_identity() {
    let id = Mat::identity(Field::Complex, 2);
    let r = perturb_eigen(&[id.clone(), id.clone(), id], 0.2).unwrap();
    assert_eq!(r.lemma, Lemma::Eigen);
    assert!((r.achieved - 1.728).abs() < 1e-12);
    assert!((numeric::kappa_e(&numeric::product(&r.perturbed)) - 1.728).abs() < 1e-9);
}

#[test]
fn real_plane_eigen_lemma_is_gated() {
    let id = Mat::identity(Field::Real, 2);
    assert!(matches!(perturb_eigen(&[id], 0.1), Err(Error::FieldDimUnsupported(2))));
}

#[test]
fn singular_matrices_are_rejected() {
    let z = Mat::real(2, &[1.0, 2.0, 2.0, 4.0]);
    assert!(matches!(z, Err(Error::Singular(_))) || z.unwrap().check_invertible().is_err());
}

fn field_of(complex: bool) -> Field {
    if complex {
        Field::Complex
    } else {
        Field::Real
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn statistics_agree_with_the_oracle(seed in any::<u64>(), d in 2usize..=4, complex in any::<bool>()) {
        let a = numeric::random_mat(&mut rng(seed), field_of(complex), d);
        prop_assert!(rel(a.op_norm().unwrap(), numeric::op_norm(a.matrix())) < 1e-10);
        prop_assert!(rel(a.kappa().unwrap(), numeric::kappa(a.matrix())) < 1e-9);
        prop_assert!(rel(a.spectral_radius().unwrap(), numeric::spectral_radius(a.matrix())) < 1e-8);
    }

    #[test]
    fn kappa_is_submultiplicative(seed in any::<u64>(), d in 2usize..=4, complex in any::<bool>()) {
        let mut r = rng(seed);
        let a = numeric::random_mat(&mut r, field_of(complex), d);
        let b = numeric::random_mat(&mut r, field_of(complex), d);
        let ab = a.mul(&b).unwrap();
        prop_assert!(ab.kappa().unwrap() <= a.kappa().unwrap() * b.kappa().unwrap() * (1.0 + 1e-9));
        prop_assert!(ab.op_norm().unwrap() <= a.op_norm().unwrap() * b.op_norm().unwrap() * (1.0 + 1e-9));
    }

    #[test]
    fn norm_dominates_spectrum(seed in any::<u64>(), d in 2usize..=4, complex in any::<bool>()) {
        let a = numeric::random_mat(&mut rng(seed), field_of(complex), d);
        prop_assert!(a.kappa().unwrap() >= a.kappa_e().unwrap() * (1.0 - 1e-9));
        prop_assert!(a.op_norm().unwrap() >= a.spectral_radius().unwrap() * (1.0 - 1e-9));
        prop_assert!(a.kappa_e().unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn power_laws(seed in any::<u64>(), d in 2usize..=4, complex in any::<bool>(), n in 1u32..=8) {
        let a = numeric::well_conditioned(&mut rng(seed), field_of(complex), d);
        let an = a.pow(n);
        let tol = 1e-9 * n as f64;
        prop_assert!(rel(an.spectral_radius().unwrap(), a.spectral_radius().unwrap().powi(n as i32)) < tol);
        prop_assert!(rel(an.kappa_e().unwrap(), a.kappa_e().unwrap().powi(n as i32)) < tol);
    }

    #[test]
    fn frames_are_unitary_and_conjugation_keeps_singular_values(
        seed in any::<u64>(), d in 2usize..=4, complex in any::<bool>(), l in 1usize..=6,
    ) {
        let mut r = rng(seed);
        let field = field_of(complex);
        let mats: Vec<Mat> = (0..l).map(|_| numeric::random_mat(&mut r, field, d)).collect();
        let res = perturb_singular(&mats, 0.1).unwrap();
        let id = DMatrix::<C>::identity(d, d);
        prop_assert_eq!(res.frames.len(), l + 1);
        for rj in &res.frames {
            let m = rj.matrix();
            prop_assert!((m * m.adjoint() - &id).norm() < 1e-12 * d as f64);
        }
        for (j, rj) in res.frames.iter().enumerate().take(l) {
            let m = rj.matrix();
            if field == Field::Real {
                prop_assert!(m.iter().all(|z| z.im == 0.0));
            }
            let next = &res.frames[j + 1];
            let conj = next.mul(&mats[j]).unwrap().mul(&rj.adjoint()).unwrap();
            let s0 = mats[j].singular_values().unwrap();
            let s1 = conj.singular_values().unwrap();
            for (x, y) in s0.iter().zip(&s1) {
                prop_assert!(rel(*y, *x) < 1e-9);
            }
        }
    }

    #[test]
    fn zero_epsilon_changes_nothing(seed in any::<u64>(), d in 2usize..=4, complex in any::<bool>(), l in 1usize..=6) {
        let mut r = rng(seed);
        let field = field_of(complex);
        let mats: Vec<Mat> = (0..l).map(|_| numeric::random_mat(&mut r, field, d)).collect();
        let outs = if field == Field::Real && d < 3 {
            vec![perturb_singular(&mats, 0.0).unwrap()]
        } else {
            vec![perturb_singular(&mats, 0.0).unwrap(), perturb_eigen(&mats, 0.0).unwrap()]
        };
        for out in outs {
            for (a, b) in mats.iter().zip(&out.perturbed) {
                prop_assert!((a.matrix() - b.matrix()).norm() <= 1e-12 * a.op_norm().unwrap() * d as f64);
                prop_assert_eq!(a.field(), b.field());
            }
        }
    }

    #[test]
    fn lemmas_meet_their_bounds(
        seed in any::<u64>(), d in 2usize..=4, complex in any::<bool>(), l in 1usize..=8,
        eps in prop::sample::select(vec![0.1f64, 0.5]),
    ) {
        let mut r = rng(seed);
        let field = field_of(complex);
        let mats: Vec<Mat> = (0..l).map(|_| numeric::random_mat(&mut r, field, d)).collect();
        let required = (1.0 + eps).powi(l as i32) * (1.0 - 1e-9);
        let s = perturb_singular(&mats, eps).unwrap();
        prop_assert!(numeric::kappa(&numeric::product(&s.perturbed)) >= required);
        if field == Field::Complex || d >= 3 {
            let e = perturb_eigen(&mats, eps).unwrap();
            prop_assert!(numeric::kappa_e(&numeric::product(&e.perturbed)) >= required);
            prop_assert!(rel(e.achieved, product(&e.perturbed).unwrap().kappa_e().unwrap()) < 1e-9);
        }
        for (a, b) in mats.iter().zip(&s.perturbed) {
            prop_assert!(numeric::op_norm(&(b.matrix() - a.matrix())) <= eps * numeric::op_norm(a.matrix()) * (1.0 + 1e-9));
        }
    }

    // in the plane the determinant grows by (1 + ε)^ℓ while the least
    // singular value of the product does not grow
    #[test]
    fn singular_lemma_multiplies_kappa_in_the_plane(
        seed in any::<u64>(), complex in any::<bool>(), l in 1usize..=8,
        eps in prop::sample::select(vec![0.1f64, 0.5]),
    ) {
        let mut r = rng(seed);
        let field = field_of(complex);
        let mats: Vec<Mat> = (0..l).map(|_| numeric::well_conditioned(&mut r, field, 2)).collect();
        let before = numeric::kappa(&numeric::product(&mats));
        let s = perturb_singular(&mats, eps).unwrap();
        let after = numeric::kappa(&numeric::product(&s.perturbed));
        prop_assert!(after >= (1.0 + eps).powi(l as i32) * before * (1.0 - 1e-9));
    }
}
