//! Locally constant linear cocycles over an SFT and the removal of their
//! quasiconformal orbits.

mod certificate;
mod remove;

use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matperturb::{Field, Mat};
use crate::shiftspace::{ClopenSet, EventuallyPeriodicPoint, Sft, Sym};

pub use certificate::{
    verify_qc_certificate, verify_qc_certificate_with, MetricRecord, QcCertificate, Statistic, TowerRecord,
};
pub use remove::{capture_time, remove_qc, remove_qc_with, QcRemoval, RemoveOptions};

/// Largest number of central words enumerated when comparing a cocycle with
/// a clopen set.
pub const WORD_LIMIT: usize = 1 << 20;

/// How the values of a cocycle are stored.
#[derive(Debug, Clone)]
pub enum Values {
    /// One matrix per admissible word on `[-depth, depth]`.
    Words {
        depth: usize,
        table: FxHashMap<Vec<Sym>, Mat>,
    },
    /// One matrix per piece of a clopen partition.
    Pieces(Vec<(ClopenSet, Mat)>),
}

/// Behaviour of a cocycle on a clopen set.
#[derive(Debug, Clone, PartialEq)]
pub enum OnSet {
    Empty,
    Constant(Mat),
    Varies,
}

/// A continuous map `F: X -> GL(d)` depending on finitely many coordinates.
#[derive(Debug, Clone)]
pub struct Cocycle {
    space: Arc<Sft>,
    field: Field,
    d: usize,
    values: Values,
}

/// `κ(F^{(n)}(x))` for `n` in `[start, start + values.len() - 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaTrace {
    pub start: i64,
    pub values: Vec<f64>,
    pub max: f64,
}

impl KappaTrace {
    pub fn at(&self, n: i64) -> Option<f64> {
        let i = n - self.start;
        (i >= 0).then(|| self.values.get(i as usize).copied()).flatten()
    }

    /// The `n` of least modulus with `κ(F^{(n)}(x)) > m`.
    pub fn first_above(&self, m: f64) -> Option<i64> {
        let end = self.start + self.values.len() as i64 - 1;
        let mut ns: Vec<i64> = (self.start..=end).collect();
        ns.sort_by_key(|n| (n.abs(), *n));
        ns.into_iter().find(|&n| self.at(n).is_some_and(|k| k > m))
    }

    /// Largest value over `|n| <= h`.
    pub fn max_within(&self, h: i64) -> f64 {
        (-h..=h).filter_map(|n| self.at(n)).fold(0.0, f64::max)
    }
}

fn adapt(field: Field, d: usize, a: Mat) -> Result<Mat> {
    if a.dim() != d {
        return Err(Error::ShapeMismatch);
    }
    let a = match (field, a.field()) {
        (Field::Complex, Field::Real) => a.to_complex(),
        (Field::Real, Field::Complex) => return Err(Error::ShapeMismatch),
        _ => a,
    };
    a.check_invertible()?;
    Ok(a)
}

impl Cocycle {
    /// Values on every admissible word of length `2 depth + 1`, read on the
    /// window `[-depth, depth]`.
    pub fn from_words(
        space: &Arc<Sft>,
        field: Field,
        d: usize,
        depth: usize,
        entries: impl IntoIterator<Item = (Vec<Sym>, Mat)>,
    ) -> Result<Cocycle> {
        let len = 2 * depth + 1;
        let mut table = FxHashMap::default();
        for (w, a) in entries {
            if w.len() != len || !space.is_admissible(&w) {
                return Err(Error::Inadmissible(format!(
                    "`{}` is not an admissible central word of length {len}",
                    space.format_word(&w)
                )));
            }
            table.insert(w, adapt(field, d, a)?);
        }
        for w in space.words(len) {
            if !table.contains_key(&w) {
                return Err(Error::MissingValue(space.format_word(&w)));
            }
        }
        Ok(Cocycle {
            space: space.clone(),
            field,
            d,
            values: Values::Words { depth, table },
        })
    }

    /// `F ≡ a`.
    pub fn constant(space: &Arc<Sft>, a: Mat) -> Result<Cocycle> {
        let (field, d) = (a.field(), a.dim());
        let entries: Vec<(Vec<Sym>, Mat)> = (0..space.num_symbols() as Sym).map(|s| (vec![s], a.clone())).collect();
        Cocycle::from_words(space, field, d, 0, entries)
    }

    /// Values on the pieces of a clopen partition, checked exactly.
    pub fn from_pieces(space: &Arc<Sft>, field: Field, d: usize, pieces: Vec<(ClopenSet, Mat)>) -> Result<Cocycle> {
        let f = Cocycle::from_pieces_unchecked(space, field, d, pieces)?;
        let sets: Vec<ClopenSet> = f.pieces().into_iter().map(|p| p.0).collect();
        let union = ClopenSet::union_all(space, sets.iter().cloned())?;
        if let Some((pos, w)) = union.complement().witness() {
            return Err(Error::NotPartition(format!(
                "pieces miss the cylinder [{}]@{pos}",
                space.format_word(&w)
            )));
        }
        let (a, b) = union_window(&sets);
        let total: Option<u128> = sets.iter().try_fold(0u128, |s, p| s.checked_add(p.count_on(a, b)));
        if total != Some(ClopenSet::full(space).count_on(a, b)) {
            for i in 0..sets.len() {
                for j in i + 1..sets.len() {
                    if !sets[i].is_disjoint(&sets[j])? {
                        return Err(Error::NotPartition(format!("pieces {i} and {j} overlap")));
                    }
                }
            }
        }
        Ok(f)
    }

    pub(crate) fn from_pieces_unchecked(
        space: &Arc<Sft>,
        field: Field,
        d: usize,
        pieces: Vec<(ClopenSet, Mat)>,
    ) -> Result<Cocycle> {
        let mut out = Vec::with_capacity(pieces.len());
        for (p, a) in pieces {
            if !Arc::ptr_eq(p.space(), space) && **p.space() != **space {
                return Err(Error::SpaceMismatch);
            }
            out.push((p, adapt(field, d, a)?));
        }
        Ok(Cocycle {
            space: space.clone(),
            field,
            d,
            values: Values::Pieces(out),
        })
    }

    pub fn space(&self) -> &Arc<Sft> {
        &self.space
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &Values {
        &self.values
    }

    /// Smallest `r` such that `F(x)` depends only on `x_{-r} .. x_r`.
    pub fn depth(&self) -> usize {
        match &self.values {
            Values::Words { depth, .. } => *depth,
            Values::Pieces(ps) => ps
                .iter()
                .filter(|p| !p.0.is_full() && !p.0.is_empty())
                .map(|p| {
                    let (a, b) = p.0.window();
                    a.unsigned_abs().max(b.unsigned_abs()) as usize
                })
                .max()
                .unwrap_or(0),
        }
    }

    /// The values as a list of clopen pieces.
    pub fn pieces(&self) -> Vec<(ClopenSet, Mat)> {
        match &self.values {
            Values::Pieces(ps) => ps.clone(),
            Values::Words { depth, table } => {
                let mut ws: Vec<(&Vec<Sym>, &Mat)> = table.iter().collect();
                ws.sort_by(|a, b| a.0.cmp(b.0));
                ws.into_iter()
                    .map(|(w, a)| {
                        let c = ClopenSet::cylinder(&self.space, w, -(*depth as i64)).expect("admissible word");
                        (c, a.clone())
                    })
                    .collect()
            }
        }
    }

    /// `F(x)`.
    pub fn eval(&self, x: &EventuallyPeriodicPoint) -> Result<&Mat> {
        match &self.values {
            Values::Words { depth, table } => {
                let r = *depth as i64;
                let w = x.slice(-r, r);
                table.get(&w).ok_or_else(|| Error::MissingValue(self.space.format_word(&w)))
            }
            Values::Pieces(ps) => ps
                .iter()
                .find(|p| p.0.contains_point(x))
                .map(|p| &p.1)
                .ok_or_else(|| Error::MissingValue(x.describe(&self.space))),
        }
    }

    /// `F^{(n)}(x)`: `F(T^{n-1}x) ... F(x)` for `n > 0`, the identity for
    /// `n = 0` and `[F^{(-n)}(T^n x)]^{-1}` for `n < 0`.
    pub fn product(&self, x: &EventuallyPeriodicPoint, n: i64) -> Result<Mat> {
        let mut p = Mat::identity(self.field, self.d);
        if n >= 0 {
            for k in 0..n {
                p = self.eval(&x.shift(k))?.mul(&p)?;
            }
            Ok(p)
        } else {
            for k in 1..=-n {
                p = p.mul(self.eval(&x.shift(-k))?)?;
            }
            p.inverse()
        }
    }

    /// `C_0 = sup_x ‖F(x)‖`.
    pub fn sup_norm(&self) -> Result<f64> {
        let mut best: f64 = 0.0;
        match &self.values {
            Values::Words { table, .. } => {
                for a in table.values() {
                    best = best.max(a.op_norm()?);
                }
            }
            Values::Pieces(ps) => {
                for (p, a) in ps {
                    if !p.is_empty() {
                        best = best.max(a.op_norm()?);
                    }
                }
            }
        }
        Ok(best)
    }

    /// Whether `F` is constant on `set`, and its value there.
    pub fn value_on(&self, set: &ClopenSet) -> Result<OnSet> {
        let mut found: Option<&Mat> = None;
        match &self.values {
            Values::Words { depth, table } => {
                let r = *depth as i64;
                let words = set.project(-r, r).extend_to(-r, r)?.words(WORD_LIMIT).ok_or(Error::BlockLimit {
                    stage: "cocycle words on a set",
                    needed: set.project(-r, r).count_on(-r, r),
                    limit: WORD_LIMIT,
                })?;
                for w in words {
                    let a = table.get(&w).ok_or_else(|| Error::MissingValue(self.space.format_word(&w)))?;
                    if *found.get_or_insert(a) != a {
                        return Ok(OnSet::Varies);
                    }
                }
            }
            Values::Pieces(ps) => {
                // the pieces partition the space, so a piece containing the
                // whole set settles the question
                if let Some(y) = set.sample_point() {
                    if let Some((p, a)) = ps.iter().find(|p| p.0.contains_point(&y)) {
                        if set.is_subset(p)? {
                            return Ok(OnSet::Constant(a.clone()));
                        }
                    }
                }
                for (p, a) in ps {
                    if !p.is_disjoint(set)? && *found.get_or_insert(a) != a {
                        return Ok(OnSet::Varies);
                    }
                }
            }
        }
        Ok(match found {
            None => OnSet::Empty,
            Some(a) => OnSet::Constant(a.clone()),
        })
    }

    fn check_compatible(&self, other: &Cocycle) -> Result<()> {
        if !Arc::ptr_eq(&self.space, &other.space) && *self.space != *other.space {
            return Err(Error::SpaceMismatch);
        }
        if self.d != other.d {
            return Err(Error::ShapeMismatch);
        }
        Ok(())
    }

    /// Pairs `(F(x), G(x))` over the common refinement of the two cocycles.
    pub fn refinement<'a>(&'a self, other: &'a Cocycle) -> Result<Vec<(&'a Mat, &'a Mat)>> {
        self.check_compatible(other)?;
        let mut out = Vec::new();
        match (&self.values, &other.values) {
            (Values::Words { .. }, Values::Pieces(_)) => {
                for (f, g) in other.refinement(self)? {
                    out.push((g, f));
                }
            }
            (_, Values::Words { depth, table }) => {
                let r = *depth as i64;
                let mine: Vec<(ClopenSet, &Mat)> = match &self.values {
                    Values::Pieces(ps) => ps.iter().map(|(p, a)| (p.clone(), a)).collect(),
                    Values::Words { depth: rf, table: tf } => tf
                        .iter()
                        .map(|(w, a)| (ClopenSet::cylinder(&self.space, w, -(*rf as i64)).expect("admissible"), a))
                        .collect(),
                };
                for (p, a) in mine {
                    if p.is_empty() {
                        continue;
                    }
                    let words = p.project(-r, r).extend_to(-r, r)?.words(WORD_LIMIT).ok_or(Error::BlockLimit {
                        stage: "common refinement",
                        needed: p.project(-r, r).count_on(-r, r),
                        limit: WORD_LIMIT,
                    })?;
                    for w in words {
                        let b = table.get(&w).ok_or_else(|| Error::MissingValue(self.space.format_word(&w)))?;
                        out.push((a, b));
                    }
                }
            }
            (Values::Pieces(ps), Values::Pieces(qs)) => {
                for (p, a) in ps {
                    for (q, b) in qs {
                        if !p.is_disjoint(q)? {
                            out.push((a, b));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `d'(F, G) = sup_x ‖F(x) - G(x)‖`.
    pub fn dist_dprime(&self, other: &Cocycle) -> Result<f64> {
        let mut best: f64 = 0.0;
        for (a, b) in self.refinement(other)? {
            best = best.max(a.sub(b)?.op_norm()?);
        }
        Ok(best)
    }

    /// `d(F, G) = sup_x ‖F(x) - G(x)‖ + ‖F(x)^{-1} - G(x)^{-1}‖`.
    pub fn dist_d(&self, other: &Cocycle) -> Result<f64> {
        let mut best: f64 = 0.0;
        for (a, b) in self.refinement(other)? {
            let direct = a.sub(b)?.op_norm()?;
            let inverse = a.inverse()?.sub(&b.inverse()?)?.op_norm()?;
            best = best.max(direct + inverse);
        }
        Ok(best)
    }

    /// `κ(F^{(n)}(x))` for `a <= n <= b`.
    pub fn kappa_trace(&self, x: &EventuallyPeriodicPoint, a: i64, b: i64) -> Result<KappaTrace> {
        if a > 0 || b < 0 {
            return Err(Error::InvalidParameter(format!("range {a}..{b} must contain 0")));
        }
        let mut values = vec![0.0; (b - a + 1) as usize];
        let idx = |n: i64| (n - a) as usize;
        values[idx(0)] = 1.0;
        let mut p = Mat::identity(self.field, self.d);
        for n in 1..=b {
            p = self.eval(&x.shift(n - 1))?.mul(&p)?;
            values[idx(n)] = p.kappa()?;
        }
        // κ(F^{(-n)}(x)) = κ(F(T^{-1}x) ... F(T^{-n}x))
        let mut q = Mat::identity(self.field, self.d);
        for n in 1..=-a {
            q = q.mul(self.eval(&x.shift(-n))?)?;
            values[idx(-n)] = q.kappa()?;
        }
        let max = values.iter().copied().fold(0.0, f64::max);
        Ok(KappaTrace { start: a, values, max })
    }
}

fn union_window(sets: &[ClopenSet]) -> (i64, i64) {
    let a = sets.iter().map(|s| s.window().0).min().unwrap_or(0);
    let b = sets.iter().map(|s| s.window().1).max().unwrap_or(0);
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Arc<Sft> {
        Arc::new(Sft::golden_mean())
    }

    #[test]
    fn identity_products() {
        let g = golden();
        let f = Cocycle::constant(&g, Mat::identity(Field::Complex, 2)).unwrap();
        let x = EventuallyPeriodicPoint::periodic(&[0, 1]);
        for n in -3..=3 {
            assert_eq!(f.product(&x, n).unwrap(), Mat::identity(Field::Complex, 2));
        }
        assert_eq!(f.sup_norm().unwrap(), 1.0);
        assert_eq!(f.dist_dprime(&f).unwrap(), 0.0);
        assert_eq!(f.dist_d(&f).unwrap(), 0.0);
    }

    #[test]
    fn distances_to_a_scaled_identity() {
        let g = golden();
        let eps = 0.3;
        let f = Cocycle::constant(&g, Mat::identity(Field::Real, 2)).unwrap();
        let h = Cocycle::constant(&g, Mat::diag(Field::Real, &[1.0 + eps, 1.0])).unwrap();
        assert!((f.dist_dprime(&h).unwrap() - eps).abs() < 1e-14);
        let expect = eps + (1.0 - 1.0 / (1.0 + eps));
        assert!((f.dist_d(&h).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn diagonal_trace() {
        let g = golden();
        let f = Cocycle::constant(&g, Mat::diag(Field::Real, &[2.0, 1.0])).unwrap();
        let t = f.kappa_trace(&EventuallyPeriodicPoint::periodic(&[0]), -5, 5).unwrap();
        for n in -5..=5i64 {
            assert!((t.at(n).unwrap() - 2f64.powi(n.abs() as i32)).abs() < 1e-9);
        }
        assert_eq!(t.first_above(3.0), Some(-2));
    }

    #[test]
    fn missing_word_is_reported() {
        let g = golden();
        let entries = vec![(vec![0], Mat::identity(Field::Real, 2))];
        assert!(matches!(
            Cocycle::from_words(&g, Field::Real, 2, 0, entries),
            Err(Error::MissingValue(_))
        ));
    }

    #[test]
    fn value_on_a_set() {
        let g = golden();
        let a = Mat::diag(Field::Real, &[2.0, 1.0]);
        let b = Mat::identity(Field::Real, 2);
        let f = Cocycle::from_words(&g, Field::Real, 2, 0, vec![(vec![0], a.clone()), (vec![1], b)]).unwrap();
        let z = ClopenSet::cylinder(&g, &[0, 1], 0).unwrap();
        assert_eq!(f.value_on(&z).unwrap(), OnSet::Constant(a));
        assert_eq!(f.value_on(&ClopenSet::full(&g)).unwrap(), OnSet::Varies);
        assert_eq!(f.value_on(&ClopenSet::empty(&g)).unwrap(), OnSet::Empty);
    }
}
