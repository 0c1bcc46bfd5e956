//! Small dense matrices over the reals or the complex numbers, their norms
//! and condition numbers, and the two block-triangular perturbations.

mod frames;
mod perturb;

use std::fmt;

use nalgebra::{DMatrix, DVector, Schur, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use frames::{frame_to_last, orthonormalize};
pub use perturb::{perturb_eigen, perturb_singular, Lemma, PerturbResult};

/// Smallest accepted `σ_d / σ_1` for a matrix treated as invertible.
pub const INVERTIBILITY_FLOOR: f64 = 1e-12;
/// Relative slack allowed when re-verifying a numeric bound.
pub const VERIFY_SLACK: f64 = 1e-9;
/// A conjugate pair with `|Im λ| <= PAIR_SPLIT |λ|` is treated as real.
pub const PAIR_SPLIT: f64 = 1e-8;
/// Relative error allowed for conjugating by frames and back.
pub const FRAME_ROUND_TRIP: f64 = 1e-12;

const MAX_ITER: usize = 10_000;

pub type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// The smallest field containing both.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Complex || other == Field::Complex {
            Field::Complex
        } else {
            Field::Real
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Real => "real",
            Field::Complex => "complex",
        })
    }
}

/// A square matrix tagged with its field. Real matrices are stored with
/// zero imaginary parts.
#[derive(Clone, PartialEq)]
pub struct Mat {
    field: Field,
    data: DMatrix<C64>,
}

impl Mat {
    pub fn new(field: Field, data: DMatrix<C64>) -> Result<Mat> {
        if !data.is_square() || data.nrows() == 0 {
            return Err(Error::ShapeMismatch);
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("matrix has a non-finite entry".into()));
        }
        if field == Field::Real && data.iter().any(|z| z.im != 0.0) {
            return Err(Error::InvalidParameter("real matrix has an imaginary part".into()));
        }
        Ok(Mat { field, data })
    }

    /// Real matrix from row-major entries.
    pub fn real(d: usize, rows: &[f64]) -> Result<Mat> {
        if rows.len() != d * d {
            return Err(Error::ShapeMismatch);
        }
        Mat::new(Field::Real, DMatrix::from_row_iterator(d, d, rows.iter().map(|&x| C64::new(x, 0.0))))
    }

    /// Complex matrix from row-major entries.
    pub fn complex(d: usize, rows: &[C64]) -> Result<Mat> {
        if rows.len() != d * d {
            return Err(Error::ShapeMismatch);
        }
        Mat::new(Field::Complex, DMatrix::from_row_slice(d, d, rows))
    }

    pub fn identity(field: Field, d: usize) -> Mat {
        Mat {
            field,
            data: DMatrix::identity(d, d),
        }
    }

    pub fn diag(field: Field, entries: &[f64]) -> Mat {
        let v = DVector::from_iterator(entries.len(), entries.iter().map(|&x| C64::new(x, 0.0)));
        Mat {
            field,
            data: DMatrix::from_diagonal(&v),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[(i, j)]
    }

    /// Row-major entries.
    pub fn rows(&self) -> Vec<Vec<C64>> {
        (0..self.dim()).map(|i| self.data.row(i).iter().copied().collect()).collect()
    }

    /// The same matrix viewed over the complex numbers.
    pub fn to_complex(&self) -> Mat {
        Mat {
            field: Field::Complex,
            data: self.data.clone(),
        }
    }

    fn check_shape(&self, other: &Mat) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::ShapeMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        self.check_shape(other)?;
        Ok(Mat {
            field: self.field.join(other.field),
            data: &self.data * &other.data,
        })
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        self.check_shape(other)?;
        Ok(Mat {
            field: self.field.join(other.field),
            data: &self.data - &other.data,
        })
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat {
            field: self.field,
            data: self.data.map(|z| z * s),
        }
    }

    pub fn adjoint(&self) -> Mat {
        Mat {
            field: self.field,
            data: self.data.adjoint(),
        }
    }

    /// `A^n` for `n >= 0`.
    pub fn pow(&self, n: u32) -> Mat {
        let mut out = DMatrix::identity(self.dim(), self.dim());
        for _ in 0..n {
            out = &self.data * out;
        }
        Mat {
            field: self.field,
            data: out,
        }
    }

    pub fn inverse(&self) -> Result<Mat> {
        let s = self.singular_values()?;
        let ratio = s[s.len() - 1] / s[0];
        if !(ratio >= INVERTIBILITY_FLOOR) {
            return Err(Error::Singular(ratio));
        }
        let inv = self
            .data
            .clone()
            .try_inverse()
            .ok_or(Error::Singular(ratio))?;
        Ok(Mat {
            field: self.field,
            data: if self.field == Field::Real { inv.map(|z| C64::new(z.re, 0.0)) } else { inv },
        })
    }

    /// `σ_1 >= ... >= σ_d`.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        let sv = match self.field {
            Field::Real => SVD::try_new(self.real_part(), false, false, f64::EPSILON, MAX_ITER)
                .map(|s| s.singular_values.iter().copied().collect::<Vec<_>>()),
            Field::Complex => SVD::try_new(self.data.clone(), false, false, f64::EPSILON, MAX_ITER)
                .map(|s| s.singular_values.iter().copied().collect::<Vec<_>>()),
        };
        let mut sv = sv.ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
        sv.sort_by(|a, b| b.total_cmp(a));
        Ok(sv)
    }

    /// Euclidean operator norm `σ_1`.
    pub fn op_norm(&self) -> Result<f64> {
        Ok(self.singular_values()?[0])
    }

    /// Eigenvalues, sorted by modulus, then real part, then imaginary part.
    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        let fail = || Error::NumericalFailure("Schur iteration did not converge".into());
        let mut ev: Vec<C64> = match self.field {
            Field::Real => Schur::try_new(self.real_part(), f64::EPSILON, MAX_ITER)
                .ok_or_else(fail)?
                .complex_eigenvalues()
                .iter()
                .copied()
                .collect(),
            Field::Complex => {
                let (_, t) = Schur::try_new(self.data.clone(), f64::EPSILON, MAX_ITER)
                    .ok_or_else(fail)?
                    .unpack();
                t.diagonal().iter().copied().collect()
            }
        };
        ev.sort_by(|a, b| {
            a.norm()
                .total_cmp(&b.norm())
                .then(a.re.total_cmp(&b.re))
                .then(a.im.total_cmp(&b.im))
        });
        Ok(ev)
    }

    /// `ρ(A) = max |λ|`.
    pub fn spectral_radius(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.last().map_or(0.0, |z| z.norm()))
    }

    /// `κ(A) = σ_1 / σ_d`.
    pub fn kappa(&self) -> Result<f64> {
        let s = self.singular_values()?;
        let ratio = s[s.len() - 1] / s[0];
        if !(ratio >= INVERTIBILITY_FLOOR) {
            return Err(Error::Singular(ratio));
        }
        Ok(s[0] / s[s.len() - 1])
    }

    /// `κ_e(A) = ρ(A) ρ(A^{-1}) = max |λ| / min |λ|`.
    pub fn kappa_e(&self) -> Result<f64> {
        self.check_invertible()?;
        let ev = self.eigenvalues()?;
        Ok(ev[ev.len() - 1].norm() / ev[0].norm())
    }

    pub fn check_invertible(&self) -> Result<()> {
        self.kappa().map(|_| ())
    }

    pub(crate) fn real_part(&self) -> DMatrix<f64> {
        self.data.map(|z| z.re)
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat({}, {:?})", self.field, self.rows())
    }
}

pub fn op_norm(a: &Mat) -> Result<f64> {
    a.op_norm()
}

pub fn singular_values(a: &Mat) -> Result<Vec<f64>> {
    a.singular_values()
}

pub fn spectral_radius(a: &Mat) -> Result<f64> {
    a.spectral_radius()
}

pub fn kappa(a: &Mat) -> Result<f64> {
    a.kappa()
}

pub fn kappa_e(a: &Mat) -> Result<f64> {
    a.kappa_e()
}

/// `A_{l-1} ... A_0`.
pub fn product(mats: &[Mat]) -> Result<Mat> {
    let first = mats
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty matrix list".into()))?;
    let mut p = Mat::identity(first.field, first.dim());
    for a in mats {
        p = a.mul(&p)?;
    }
    Ok(p)
}
