use nalgebra::{DMatrix, DVector, SVD};
use serde::{Deserialize, Serialize};

use super::frames::{frame_to_last, orthonormalize};
use super::{product, Field, Mat, C64, FRAME_ROUND_TRIP, MAX_ITER, PAIR_SPLIT, VERIFY_SLACK};
use crate::error::{Error, Result};

/// Which of the two perturbations produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lemma {
    /// Raises `κ_e` of the product.
    Eigen,
    /// Raises `κ` of the product.
    Singular,
}

#[derive(Debug, Clone)]
pub struct PerturbResult {
    pub lemma: Lemma,
    /// `Ã_0, ..., Ã_{ℓ-1}`.
    pub perturbed: Vec<Mat>,
    /// `‖Ã_j - A_j‖ / ‖A_j‖`.
    pub relative_errors: Vec<f64>,
    /// `κ_e` or `κ` of `Ã_{ℓ-1} ... Ã_0`.
    pub achieved: f64,
    /// `(1 + ε)^ℓ`.
    pub required: f64,
    /// `R_0, ..., R_{ℓ-1}` for the eigenvalue lemma, whose tracked subspace
    /// returns to itself; `R_0, ..., R_ℓ` for the singular value lemma.
    pub frames: Vec<Mat>,
    /// Dimension of the tracked subspace.
    pub nu: usize,
}

fn check_inputs(mats: &[Mat], eps: f64) -> Result<(Field, usize)> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be a finite number >= 0, got {eps}")));
    }
    let first = mats
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty matrix list".into()))?;
    let (field, d) = (first.field(), first.dim());
    if d < 2 {
        return Err(Error::InvalidParameter("dimension must be at least 2".into()));
    }
    for a in mats {
        if a.field() != field || a.dim() != d {
            return Err(Error::ShapeMismatch);
        }
        a.check_invertible()?;
    }
    Ok((field, d))
}

/// Unit vector `v` with `‖M v‖ = σ_d(M)`, real when `field` is real.
fn least_singular_vector(field: Field, m: &DMatrix<C64>) -> Result<DVector<C64>> {
    let fail = || Error::NumericalFailure("SVD did not converge".into());
    match field {
        Field::Real => {
            let svd = SVD::try_new(m.map(|z| z.re), false, true, f64::EPSILON, MAX_ITER).ok_or_else(fail)?;
            let vt = svd.v_t.ok_or_else(fail)?;
            let k = argmin(svd.singular_values.as_slice());
            Ok(vt.row(k).transpose().map(|x| C64::new(x, 0.0)))
        }
        Field::Complex => {
            let svd = SVD::try_new(m.clone(), false, true, f64::EPSILON, MAX_ITER).ok_or_else(fail)?;
            let vt = svd.v_t.ok_or_else(fail)?;
            let k = argmin(svd.singular_values.as_slice());
            Ok(vt.row(k).adjoint())
        }
    }
}

fn argmin(xs: &[f64]) -> usize {
    (0..xs.len()).min_by(|&a, &b| xs[a].total_cmp(&xs[b])).unwrap_or(0)
}

/// Basis of the eigenspace of `p` for its least-modulus eigenvalue, or for
/// a least-modulus conjugate pair over the reals.
fn least_eigenspace(p: &Mat) -> Result<Vec<DVector<C64>>> {
    let d = p.dim();
    let ev = p.eigenvalues()?;
    let least = ev[0].norm();
    let shifted = |lambda: C64| p.matrix() - DMatrix::<C64>::identity(d, d) * lambda;
    match p.field() {
        Field::Complex => Ok(vec![least_singular_vector(Field::Complex, &shifted(ev[0]))?]),
        Field::Real => {
            let ties: Vec<C64> = ev.iter().copied().filter(|z| z.norm() <= least * (1.0 + 1e-12)).collect();
            if let Some(z) = ties.iter().find(|z| z.im.abs() <= PAIR_SPLIT * z.norm()) {
                let lambda = C64::new(z.re, 0.0);
                return Ok(vec![least_singular_vector(Field::Real, &shifted(lambda))?]);
            }
            let v = least_singular_vector(Field::Complex, &shifted(ties[0]))?;
            let re = v.map(|z| C64::new(z.re, 0.0));
            let im = v.map(|z| C64::new(z.im, 0.0));
            Ok(vec![re, im])
        }
    }
}

/// Tracks `span(basis)` through the list and scales the complementary
/// block of every `Δ_j = R_{j+1} A_j R_j^{-1}` by `1 + ε`.
fn block_perturb(mats: &[Mat], eps: f64, basis: Vec<DVector<C64>>, lemma: Lemma) -> Result<PerturbResult> {
    let (field, d) = (mats[0].field(), mats[0].dim());
    let nu = basis.len();
    let l = mats.len();
    // the eigenspace comes back to itself after ℓ steps, the singular
    // direction does not
    let steps = match lemma {
        Lemma::Eigen => l - 1,
        Lemma::Singular => l,
    };
    let mut spaces = vec![orthonormalize(&basis)?];
    for a in &mats[..steps] {
        let pushed: Vec<DVector<C64>> = spaces.last().unwrap().iter().map(|v| a.matrix() * v).collect();
        spaces.push(orthonormalize(&pushed)?);
    }
    let frames = spaces
        .iter()
        .map(|v| frame_to_last(field, d, v))
        .collect::<Result<Vec<_>>>()?;
    let scale = DMatrix::from_diagonal(&DVector::from_fn(d, |i, _| {
        C64::new(if i < d - nu { 1.0 + eps } else { 1.0 }, 0.0)
    }));

    let mut perturbed = Vec::with_capacity(l);
    let mut relative_errors = Vec::with_capacity(l);
    for (j, a) in mats.iter().enumerate() {
        let r = frames[j].matrix();
        let r_next = frames[(j + 1) % frames.len()].matrix();
        let delta = r_next * a.matrix() * r.adjoint();
        let mut t = r_next.adjoint() * (&scale * delta) * r;
        if field == Field::Real {
            t = t.map(|z| C64::new(z.re, 0.0));
        }
        let t = Mat::new(field, t)?;
        relative_errors.push(t.sub(a)?.op_norm()? / a.op_norm()?);
        perturbed.push(t);
    }

    let p = product(&perturbed)?;
    let achieved = match lemma {
        Lemma::Eigen => p.kappa_e()?,
        Lemma::Singular => p.kappa()?,
    };
    let required = (1.0 + eps).powi(l as i32);
    if achieved < required * (1.0 - VERIFY_SLACK) {
        return Err(Error::NumericalFailure(format!(
            "perturbed product reaches {achieved} < (1 + eps)^{l} = {required}"
        )));
    }
    if let Some(j) = (0..l).find(|&j| relative_errors[j] > eps * (1.0 + VERIFY_SLACK) + FRAME_ROUND_TRIP) {
        return Err(Error::NumericalFailure(format!(
            "factor {j} moved by {} > eps = {eps}",
            relative_errors[j]
        )));
    }
    Ok(PerturbResult {
        lemma,
        perturbed,
        relative_errors,
        achieved,
        required,
        frames,
        nu,
    })
}

/// `Ã_j` with `‖Ã_j - A_j‖ <= ε ‖A_j‖` and
/// `κ_e(Ã_{ℓ-1} ... Ã_0) >= (1 + ε)^ℓ`. Needs `d >= 3` over the reals.
pub fn perturb_eigen(mats: &[Mat], eps: f64) -> Result<PerturbResult> {
    let (field, d) = check_inputs(mats, eps)?;
    if field == Field::Real && d < 3 {
        return Err(Error::FieldDimUnsupported(d));
    }
    let basis = least_eigenspace(&product(mats)?)?;
    block_perturb(mats, eps, basis, Lemma::Eigen)
}

/// `Ã_j` with `‖Ã_j - A_j‖ <= ε ‖A_j‖` and
/// `κ(Ã_{ℓ-1} ... Ã_0) >= (1 + ε)^ℓ`.
pub fn perturb_singular(mats: &[Mat], eps: f64) -> Result<PerturbResult> {
    let (field, _) = check_inputs(mats, eps)?;
    let p = product(mats)?;
    let v0 = least_singular_vector(field, p.matrix())?;
    block_perturb(mats, eps, vec![v0], Lemma::Singular)
}
