use super::certificate::{verify_qc_certificate, QcCertificate};
use super::{Cocycle, OnSet};
use crate::castles::{dungeon_castle_with, Castle, DungeonOptions};
use crate::error::{Error, Result};
use crate::matperturb::{perturb_eigen, perturb_singular, Field, Mat};
use crate::shiftspace::{periodic_orbits, ClopenSet};

/// Relative margin in `(1 + ε)^N > M² (1 + margin)`.
pub const N_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default)]
pub struct RemoveOptions {
    pub dungeon: DungeonOptions,
}

/// Output of [`remove_qc`].
#[derive(Debug, Clone)]
pub struct QcRemoval {
    pub perturbed: Cocycle,
    pub certificate: QcCertificate,
    pub castle: Castle,
}

pub(crate) fn check_parameters(m: f64, eps: f64) -> Result<()> {
    if !(m > 1.0 && m.is_finite()) {
        return Err(Error::InvalidParameter(format!("M must be a finite number > 1, got {m}")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be a finite number > 0, got {eps}")));
    }
    Ok(())
}

/// Least `N` with `(1 + ε)^N > M² (1 + 10^-12)`.
pub fn capture_time(m: f64, eps: f64) -> Result<usize> {
    check_parameters(m, eps)?;
    let target = m * m * (1.0 + N_MARGIN);
    let above = |n: usize| (1.0 + eps).powf(n as f64) > target;
    let mut n = ((target.ln() / (1.0 + eps).ln()).floor().max(1.0)) as usize;
    while n > 1 && above(n - 1) {
        n -= 1;
    }
    while !above(n) {
        n += 1;
    }
    Ok(n)
}

/// Perturbs `f` by at most `ε ‖F‖` pointwise so that every orbit reaches
/// `κ(G^{(n)}(x)) > M` for some `n`, and certifies the result.
pub fn remove_qc(f: &Cocycle, m: f64, eps: f64) -> Result<QcRemoval> {
    remove_qc_with(f, m, eps, RemoveOptions::default())
}

pub fn remove_qc_with(f: &Cocycle, m: f64, eps: f64, opts: RemoveOptions) -> Result<QcRemoval> {
    let n = capture_time(m, eps)?;
    let d = f.dim();
    if d < 2 {
        return Err(Error::InvalidParameter("dimension must be at least 2".into()));
    }
    let space = f.space().clone();
    if f.field() == Field::Real && d == 2 {
        if let Some(orbit) = periodic_orbits(&space, n).into_iter().next() {
            return Err(Error::ShortTowerUnsupported { orbit, n });
        }
    }
    let castle = dungeon_castle_with(&space, n, f.depth(), opts.dungeon)?;

    let mut pieces: Vec<(ClopenSet, Mat)> = Vec::new();
    for (i, t) in castle.towers.iter().enumerate() {
        let mut mats = Vec::with_capacity(t.height);
        let floors = t.floors();
        for (j, floor) in floors.iter().enumerate() {
            match f.value_on(floor)? {
                OnSet::Constant(a) => mats.push(a),
                _ => return Err(Error::NotConstantOnFloor { tower: i, floor: j }),
            }
        }
        let result = if t.height < n {
            perturb_eigen(&mats, eps)?
        } else {
            perturb_singular(&mats, eps)?
        };
        pieces.extend(floors.into_iter().zip(result.perturbed));
    }
    let g = Cocycle::from_pieces_unchecked(&space, f.field(), d, pieces)?;
    let certificate = verify_qc_certificate(&g, &castle, m, eps, Some(f))?;
    Ok(QcRemoval {
        perturbed: g,
        certificate,
        castle,
    })
}
