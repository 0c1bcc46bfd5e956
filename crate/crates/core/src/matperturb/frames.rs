use nalgebra::{DMatrix, DVector};

use super::{Field, Mat, C64};
use crate::error::{Error, Result};

/// Below this relative residual a vector counts as dependent on the
/// previous ones.
const RANK_FLOOR: f64 = 1e-12;

/// `z / |z|`, exactly `±1` on the real axis.
fn phase(z: C64) -> C64 {
    if z.im == 0.0 {
        C64::new(if z.re < 0.0 { -1.0 } else { 1.0 }, 0.0)
    } else {
        z / z.norm()
    }
}

/// Gram-Schmidt with one reorthogonalization pass.
pub fn orthonormalize(vectors: &[DVector<C64>]) -> Result<Vec<DVector<C64>>> {
    let mut out: Vec<DVector<C64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let scale = v.norm();
        if !(scale > 0.0) {
            return Err(Error::IllConditionedFrame(0.0));
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = q.dotc(&w);
                w -= q * c;
            }
        }
        let n = w.norm();
        if n < RANK_FLOOR * scale {
            return Err(Error::IllConditionedFrame(n / scale));
        }
        out.push(w / C64::new(n, 0.0));
    }
    Ok(out)
}

/// A unitary (orthogonal over the reals) `R`, a product of reflections, with
/// `R v_k ∈ span(e_{d-ν}, ..., e_{d-1})` for the orthonormal `v_0 .. v_{ν-1}`;
/// more precisely `R v_k` is a multiple of `e_{d-1-k}`.
pub fn frame_to_last(field: Field, d: usize, vectors: &[DVector<C64>]) -> Result<Mat> {
    let mut r: DMatrix<C64> = DMatrix::identity(d, d);
    for (k, v) in vectors.iter().enumerate() {
        let t = d - 1 - k;
        let u = &r * v;
        let x = u.rows(0, t + 1).into_owned();
        let nx = x.norm();
        if !(nx > 0.0) {
            return Err(Error::IllConditionedFrame(0.0));
        }
        let alpha = -phase(x[t]) * nx;
        let mut w = x;
        w[t] -= alpha;
        let ww = w.norm_squared();
        if ww == 0.0 {
            continue;
        }
        // H = I - 2 w w* / (w* w) on the leading t + 1 coordinates
        let mut h: DMatrix<C64> = DMatrix::identity(d, d);
        let block = &w * w.adjoint() * C64::new(2.0 / ww, 0.0);
        let mut view = h.view_mut((0, 0), (t + 1, t + 1));
        view -= block;
        r = h * r;
    }
    if field == Field::Real {
        r = r.map(|z| C64::new(z.re, 0.0));
    }
    Mat::new(field, r)
}
