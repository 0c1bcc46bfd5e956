use std::sync::Arc;

use super::capture::is_capturing;
use super::Tower;
use crate::error::{Error, Result};
use crate::shiftspace::{ClopenSet, EventuallyPeriodicPoint, PeriodicOrbit, Sft};

#[derive(Debug, Clone, Copy)]
pub struct TowerOptions {
    /// Smallest radius of the cylinders tried around the periodic point.
    pub min_depth: usize,
    /// Largest radius tried before giving up.
    pub max_depth: usize,
}

impl Default for TowerOptions {
    fn default() -> Self {
        TowerOptions {
            min_depth: 0,
            max_depth: 64,
        }
    }
}

/// The cylinder `[x_{-k} .. x_k]_{-k}`.
pub fn centered_cylinder(space: &Arc<Sft>, x: &EventuallyPeriodicPoint, k: usize) -> Result<ClopenSet> {
    let k = k as i64;
    ClopenSet::cylinder(space, &x.slice(-k, k), -k)
}

/// Union of `S^j X` over `j` in `range`, `S = T^stride`.
fn orbit_union(space: &Arc<Sft>, x: &ClopenSet, stride: i64, range: impl Iterator<Item = i64>) -> Result<ClopenSet> {
    ClopenSet::union_all(space, range.map(|j| x.shift(stride * j)))
}

/// The bi-capturing neighbourhood built from `W` for `S = T^stride` and
/// parameter `m`: `B = C ∪ D` with `V_+ = ⋂_{i<m} S^{-i} W`,
/// `V_- = S^{m-1} V_+`, `C = ⋃_{j<m} S^j V_+` and
/// `D = ⋃_{i,j>=1, i+j<=m} S^{-i} V_+ ∩ S^j V_-`.
fn bicapturing_base(space: &Arc<Sft>, w: &ClopenSet, stride: i64, m: usize) -> Result<ClopenSet> {
    let m = m as i64;
    let v_plus = ClopenSet::intersect_all(space, (0..m).map(|i| w.shift(-stride * i)))?;
    let v_minus = v_plus.shift(stride * (m - 1));
    let c = orbit_union(space, &v_plus, stride, 0..m)?;
    let mut pieces = Vec::new();
    for i in 1..m {
        for j in 1..=m - i {
            pieces.push(v_plus.shift(-stride * i).intersect(&v_minus.shift(stride * j))?);
        }
    }
    let d = ClopenSet::union_all(space, pieces)?;
    c.union(&d)
}

/// `⋃_{|i|<2m} S^i W ⊆ outer`.
fn small_enough(space: &Arc<Sft>, w: &ClopenSet, stride: i64, m: usize, outer: &ClopenSet) -> Result<bool> {
    let m = m as i64;
    orbit_union(space, w, stride, -2 * m + 1..2 * m)?.is_subset(outer)
}

/// A clopen `B` with `p ∈ B ⊆ U` such that `B` and its complement are both
/// `n`-capturing, for a fixed point `p`.
pub fn capturing_tower_fixed(
    space: &Arc<Sft>,
    p: &PeriodicOrbit,
    n: usize,
    u: &ClopenSet,
    opts: TowerOptions,
) -> Result<ClopenSet> {
    if p.period() != 1 {
        return Err(Error::InvalidParameter(format!("orbit {} is not a fixed point", p.label())));
    }
    let x = p.point(0);
    if !u.contains_point(&x) {
        return Err(Error::InvalidParameter(format!("fixed point {} is not in U", p.label())));
    }
    let n = n.max(1);
    for k in opts.min_depth..=opts.max_depth {
        let w = centered_cylinder(space, &x, k)?;
        let b = bicapturing_base(space, &w, 1, n)?;
        let ok = b.is_subset(u)? && is_capturing(&b, n)?.pass && is_capturing(&b.complement(), n)?.pass;
        if ok {
            return Ok(b);
        }
        if small_enough(space, &w, 1, n, u)? {
            return Err(Error::Internal(format!(
                "capturing neighbourhood of {} fails at radius {k}",
                p.label()
            )));
        }
    }
    Err(Error::DepthExhausted {
        stage: "capturing tower",
        max_depth: opts.max_depth,
    })
}

/// A tower `K = B ⊔ TB ⊔ ... ⊔ T^{ℓ-1} B` around the orbit `o` inside
/// `⋃_{i<ℓ} T^i U`, with `K` and its complement both `n`-capturing. The
/// base contains the point of `o` that lies in `U`.
pub fn capturing_tower_periodic(
    space: &Arc<Sft>,
    o: &PeriodicOrbit,
    n: usize,
    u: &ClopenSet,
    opts: TowerOptions,
) -> Result<Tower> {
    let l = o.period();
    let phase = (0..l)
        .find(|&j| u.contains_point(&o.point(j)))
        .ok_or_else(|| Error::InvalidParameter(format!("no point of orbit {} lies in U", o.label())))?;
    let x = o.point(phase);
    if l == 1 {
        let base = capturing_tower_fixed(space, o, n, u, opts)?;
        return Ok(Tower {
            base,
            height: 1,
            orbit: Some(o.clone()),
        });
    }
    let n = n.max(1);
    // shrink U until its first ℓ images are disjoint
    let mut shrunk = None;
    for k in 0..=opts.max_depth.max(l) {
        let cand = u.intersect(&centered_cylinder(space, &x, k)?)?;
        let mut disjoint = true;
        for i in 1..l {
            if !cand.is_disjoint(&cand.shift(i as i64))? {
                disjoint = false;
                break;
            }
        }
        if disjoint {
            shrunk = Some(cand);
            break;
        }
    }
    let u1 = shrunk.ok_or(Error::DepthExhausted {
        stage: "separating neighbourhood",
        max_depth: opts.max_depth,
    })?;
    let stride = l as i64;
    let m = n.div_ceil(l);
    let v = ClopenSet::intersect_all(space, (0..=m as i64).map(|j| u1.shift(-stride * j)))?;
    for k in opts.min_depth..=opts.max_depth {
        let w = centered_cylinder(space, &x, k)?;
        let b = bicapturing_base(space, &w, stride, m)?;
        if b.is_subset(&v)? {
            let tower = Tower {
                base: b,
                height: l,
                orbit: Some(o.clone()),
            };
            let kset = tower.union()?;
            if is_capturing(&kset, n)?.pass && is_capturing(&kset.complement(), n)?.pass {
                return Ok(tower);
            }
        }
        if small_enough(space, &w, stride, m, &v)? {
            return Err(Error::Internal(format!(
                "capturing tower around {} fails at radius {k}",
                o.label()
            )));
        }
    }
    Err(Error::DepthExhausted {
        stage: "capturing tower",
        max_depth: opts.max_depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixed(space: &Sft, s: u32) -> PeriodicOrbit {
        PeriodicOrbit::new(space, &[s]).unwrap()
    }

    #[test]
    fn full_shift_fixed_point() {
        let f = Arc::new(Sft::full_shift(2));
        let u = ClopenSet::cylinder(&f, &[0], 0).unwrap();
        for n in [1, 3] {
            let b = capturing_tower_fixed(&f, &fixed(&f, 0), n, &u, TowerOptions::default()).unwrap();
            assert!(b.contains_point(&EventuallyPeriodicPoint::periodic(&[0])));
            assert!(b.is_subset(&u).unwrap());
            assert!(is_capturing(&b, n).unwrap().pass);
            assert!(is_capturing(&b.complement(), n).unwrap().pass);
        }
    }

    #[test]
    fn golden_mean_fixed_point_in_a_small_set() {
        let g = Arc::new(Sft::golden_mean());
        let u = ClopenSet::cylinder(&g, &[0, 0], -1).unwrap();
        let b = capturing_tower_fixed(&g, &fixed(&g, 0), 4, &u, TowerOptions::default()).unwrap();
        assert!(b.is_subset(&u).unwrap());
        assert!(is_capturing(&b, 4).unwrap().pass);
        assert!(is_capturing(&b.complement(), 4).unwrap().pass);
    }

    #[test]
    fn golden_mean_period_two() {
        let g = Arc::new(Sft::golden_mean());
        let o = PeriodicOrbit::new(&g, &[0, 1]).unwrap();
        let u = centered_cylinder(&g, &o.point(0), 1).unwrap();
        let t = capturing_tower_periodic(&g, &o, 4, &u, TowerOptions::default()).unwrap();
        assert_eq!(t.height, 2);
        assert!(t.is_tower().unwrap());
        let k = t.union().unwrap();
        assert!(is_capturing(&k, 4).unwrap().pass);
        assert!(is_capturing(&k.complement(), 4).unwrap().pass);
        assert!(k.is_subset(&u.union(&u.shift(1)).unwrap()).unwrap());
    }
}
