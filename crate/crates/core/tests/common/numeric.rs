//! Singular values and eigenvalues computed without the library's SVD and
//! Schur paths: Hermitian eigenproblems for singular values, and roots of the
//! characteristic polynomial for eigenvalues.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qc_core::matperturb::{Field, Mat};

pub type C = Complex64;

/// `‖A‖` as the square root of the top eigenvalue of `A* A`.
pub fn op_norm(a: &DMatrix<C>) -> f64 {
    let h = a.adjoint() * a;
    let e = SymmetricEigen::new(h).eigenvalues;
    e.iter().cloned().fold(0.0, f64::max).sqrt()
}

/// `κ(A) = ‖A‖ ‖A^{-1}‖`, inverting by LU.
pub fn kappa(a: &DMatrix<C>) -> f64 {
    let inv = a.clone().lu().try_inverse().expect("invertible");
    op_norm(a) * op_norm(&inv)
}

/// Coefficients `c_0 .. c_d` of `det(zI - A) = Σ c_k z^k` (Faddeev–LeVerrier).
fn char_poly(a: &DMatrix<C>) -> Vec<C> {
    let d = a.nrows();
    let mut c = vec![C::new(0.0, 0.0); d + 1];
    c[d] = C::new(1.0, 0.0);
    let mut m = DMatrix::<C>::zeros(d, d);
    for k in 1..=d {
        m = a * &m + DMatrix::<C>::identity(d, d) * c[d - k + 1];
        c[d - k] = -(a * &m).trace() / k as f64;
    }
    c
}

fn horner(c: &[C], z: C) -> (C, C) {
    let mut p = C::new(0.0, 0.0);
    let mut dp = C::new(0.0, 0.0);
    for &ck in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ck;
    }
    (p, dp)
}

/// Eigenvalues as the roots of the characteristic polynomial (Durand–Kerner,
/// polished by Newton steps).
pub fn eigenvalues(a: &DMatrix<C>) -> Vec<C> {
    let c = char_poly(a);
    let d = a.nrows();
    let scale = 1.0 + c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let seed = C::new(0.4, 0.9);
    let mut z: Vec<C> = (0..d).map(|k| seed.powu(k as u32) * scale).collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (p, _) = horner(&c, z[i]);
            let mut den = C::new(1.0, 0.0);
            for j in 0..d {
                if j != i {
                    den *= z[i] - z[j];
                }
            }
            let step = p / den;
            z[i] -= step;
            moved = moved.max(step.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..5 {
            let (p, dp) = horner(&c, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            *zi -= p / dp;
        }
    }
    z
}

pub fn spectral_radius(a: &DMatrix<C>) -> f64 {
    eigenvalues(a).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn kappa_e(a: &DMatrix<C>) -> f64 {
    let m: Vec<f64> = eigenvalues(a).iter().map(|z| z.norm()).collect();
    m.iter().cloned().fold(0.0, f64::max) / m.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// `A_{n-1} ... A_0` in plain matrix arithmetic.
pub fn product(mats: &[Mat]) -> DMatrix<C> {
    let d = mats[0].dim();
    mats.iter().fold(DMatrix::identity(d, d), |p, a| a.matrix() * p)
}

/// A matrix with entries uniform in the unit square (unit interval over the
/// reals), rejected until comfortably invertible.
pub fn random_mat(rng: &mut ChaCha8Rng, field: Field, d: usize) -> Mat {
    loop {
        let m = DMatrix::<C>::from_fn(d, d, |_, _| {
            let re = rng.random_range(-1.0..1.0);
            let im = if field == Field::Complex { rng.random_range(-1.0..1.0) } else { 0.0 };
            C::new(re, im)
        });
        if kappa(&m) < 1e3 {
            return Mat::new(field, m).unwrap();
        }
    }
}

/// `U diag(s) V` with `U`, `V` unitary (orthogonal over the reals) and
/// `s` in `[1/2, 2]`, so that `κ(A) <= 4`.
pub fn well_conditioned(rng: &mut ChaCha8Rng, field: Field, d: usize) -> Mat {
    let u = random_unitary(rng, field, d);
    let v = random_unitary(rng, field, d);
    let s = DMatrix::<C>::from_diagonal(&nalgebra::DVector::from_fn(d, |_, _| C::new(rng.random_range(0.5..2.0), 0.0)));
    Mat::new(field, u * s * v).unwrap()
}

/// The `Q` factor of a random matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, field: Field, d: usize) -> DMatrix<C> {
    random_mat(rng, field, d).matrix().clone().qr().q()
}

/// A scalar in `[1/2, 2]` times a random unitary, so `κ = 1`.
pub fn conformal(rng: &mut ChaCha8Rng, field: Field, d: usize) -> Mat {
    let s = rng.random_range(0.5..2.0);
    Mat::new(field, random_unitary(rng, field, d) * C::new(s, 0.0)).unwrap()
}
