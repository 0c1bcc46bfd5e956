use std::sync::Arc;

use super::capture::is_capturing;
use super::construct::{high_castle, kakutani_rokhlin};
use super::towers::{capturing_tower_periodic, centered_cylinder, TowerOptions};
use super::{Castle, Tower};
use crate::error::{Error, Result};
use crate::shiftspace::{invariant_language, periodic_orbits, ClopenSet, InvariantLanguage, Sft, Sym};

#[derive(Debug, Clone, Copy)]
pub struct DungeonOptions {
    /// Bound for every deepening loop.
    pub max_depth: usize,
    /// Largest number of short periodic orbits handled.
    pub max_short_orbits: usize,
}

impl Default for DungeonOptions {
    fn default() -> Self {
        DungeonOptions {
            max_depth: 32,
            max_short_orbits: 1024,
        }
    }
}

/// Castle partition into `n`-capturing towers whose floors lie in single
/// cylinders on `[-r, r]`.
pub fn dungeon_castle(space: &Arc<Sft>, n: usize, r: usize) -> Result<Castle> {
    dungeon_castle_with(space, n, r, DungeonOptions::default())
}

pub fn dungeon_castle_with(space: &Arc<Sft>, n: usize, r: usize, opts: DungeonOptions) -> Result<Castle> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    let orbits = periodic_orbits(space, n);
    if orbits.is_empty() {
        let mut c = high_castle(space, n)?.refine_floors(r)?;
        c.n = Some(n);
        return Ok(c);
    }
    if orbits.len() > opts.max_short_orbits {
        return Err(Error::BlockLimit {
            stage: "short periodic orbits",
            needed: orbits.len() as u128,
            limit: opts.max_short_orbits,
        });
    }

    // short towers around every orbit of period below n
    let mut short: Option<Vec<Tower>> = None;
    for k in 0..=opts.max_depth {
        let mut towers = Vec::with_capacity(orbits.len());
        for o in &orbits {
            let radius = k.max(r + o.period() - 1);
            let u = centered_cylinder(space, &o.point(0), radius)?;
            let t_opts = TowerOptions {
                min_depth: 0,
                max_depth: opts.max_depth + radius,
            };
            towers.push(capturing_tower_periodic(space, o, n, &u, t_opts)?);
        }
        let trial = Castle::new(space, towers);
        if trial.check_disjoint().is_err() {
            continue;
        }
        let k_set = trial.union()?;
        if is_capturing(&k_set.complement(), n)?.pass {
            short = Some(trial.towers);
            break;
        }
    }
    let short = short.ok_or(Error::DepthExhausted {
        stage: "disjoint short towers",
        max_depth: opts.max_depth,
    })?;
    let k_set = ClopenSet::union_all(space, short.iter().map(|t| t.union()).collect::<Result<Vec<_>>>()?)?;
    let b_set = ClopenSet::union_all(space, short.iter().map(|t| t.base.clone()))?;

    // towers of height at least n over the invariant part of the complement,
    // enlarged to clopen towers disjoint from the short ones
    let (l_set, c_set) = match invariant_language(&k_set.complement())? {
        None => (ClopenSet::empty(space), ClopenSet::empty(space)),
        Some(inv) => {
            let base = relative_high_castle(space, &inv, n, opts.max_depth)?;
            let mut found = None;
            for kk in 0..=opts.max_depth as i64 {
                let near = base.intersect(&inv.constraint(-kk, kk)?)?;
                let l_castle = first_return_towers(&near, n, 2 * n - 1)?;
                let l_set = l_castle.union()?;
                if l_set.is_disjoint(&k_set)? {
                    found = Some((l_set, l_castle.base()?));
                    break;
                }
            }
            found.ok_or(Error::DepthExhausted {
                stage: "enlarged castle",
                max_depth: opts.max_depth,
            })?
        }
    };

    let e = b_set
        .union(&l_set.shift(1).intersect(&c_set)?)?
        .union(&k_set.shift(1).difference(&k_set)?)?;
    let q = kakutani_rokhlin(&e)?;

    // slice so that each short tower is a tower of the castle
    let mut towers: Vec<Tower> = short.clone();
    for t in q.towers {
        let rest = t.base.difference(&b_set)?;
        if rest.is_empty() {
            continue;
        }
        if t.height < n {
            return Err(Error::Internal(format!(
                "tower of height {} < {n} away from the short towers",
                t.height
            )));
        }
        towers.push(Tower::new(rest, t.height));
    }
    let mut castle = Castle::new(space, towers);
    castle.n = Some(n);
    castle.is_partition = true;
    let refined = castle.refine_floors(r)?;
    for o in &orbits {
        let copies = refined.towers.iter().filter(|t| t.orbit.as_ref() == Some(o)).count();
        if copies != 1 {
            return Err(Error::Internal(format!("short tower around {} was split", o.label())));
        }
    }
    Ok(refined)
}

/// Towers over `base` made of the points whose first return to `base`
/// happens at a time in `[lo, hi]`. First-return towers never overlap.
fn first_return_towers(base: &ClopenSet, lo: usize, hi: usize) -> Result<Castle> {
    let mut towers = Vec::new();
    let mut rest = base.clone();
    for h in 1..=hi {
        let back = base.shift(-(h as i64));
        let cell = rest.intersect(&back)?;
        rest = rest.difference(&back)?;
        if h >= lo && !cell.is_empty() {
            towers.push(Tower::new(cell, h));
        }
    }
    Ok(Castle::new(base.space(), towers))
}

/// A base, in parent coordinates, whose trace on the invariant set `inv`
/// has all first-return times in `[n, 2n - 1]` and meets every orbit of
/// the invariant set.
fn relative_high_castle(
    space: &Arc<Sft>,
    inv: &InvariantLanguage,
    n: usize,
    max_depth: usize,
) -> Result<ClopenSet> {
    // cylinders meeting the invariant set and disjoint there from their
    // first n - 1 images
    let mut cover: Vec<(Vec<Sym>, ClopenSet)> = Vec::new();
    let mut pending: Vec<Vec<Sym>> = Vec::new();
    for s in 0..space.num_symbols() as Sym {
        if inv.meets(&ClopenSet::cylinder(space, &[s], 0)?)? {
            pending.push(vec![s]);
        }
    }
    let longest = n + inv.w + max_depth;
    while !pending.is_empty() {
        let mut next = Vec::new();
        for w in pending {
            let v = ClopenSet::cylinder(space, &w, 0)?;
            let mut good = true;
            for i in 1..n {
                if inv.meets(&v.intersect(&v.shift(i as i64))?)? {
                    good = false;
                    break;
                }
            }
            if good {
                cover.push((w, v));
                continue;
            }
            if w.len() >= longest {
                return Err(Error::DepthExhausted {
                    stage: "invariant set cover",
                    max_depth,
                });
            }
            for &t in space.successors(*w.last().unwrap()) {
                let mut u = w.clone();
                u.push(t);
                if inv.meets(&ClopenSet::cylinder(space, &u, 0)?)? {
                    next.push(u);
                }
            }
        }
        pending = next;
    }
    cover.sort_by(|a, b| a.0.cmp(&b.0));

    let span = n as i64 - 1;
    let mut b = ClopenSet::empty(space);
    let mut e = ClopenSet::empty(space);
    for (_, v) in cover {
        let fresh = v.difference(&e)?;
        if !inv.meets(&fresh)? {
            continue;
        }
        b = b.union(&fresh)?;
        e = e.union(&ClopenSet::union_all(space, (-span..=span).map(|k| fresh.shift(k)))?)?;
    }

    // first returns to b inside the invariant set
    let mut rest = b.clone();
    for h in 1..2 * n {
        let back = b.shift(-(h as i64));
        let cell = rest.intersect(&back)?;
        rest = rest.difference(&back)?;
        if h < n && inv.meets(&cell)? {
            return Err(Error::Internal(format!("invariant set has a return time {h} < {n}")));
        }
        if !inv.meets(&rest)? {
            return Ok(b);
        }
    }
    Err(Error::Internal("returns to the invariant set base exceed 2N".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_mean_n3_r2() {
        let g = Arc::new(Sft::golden_mean());
        let c = dungeon_castle(&g, 3, 2).unwrap();
        c.check_partition().unwrap();
        let mut labels: Vec<String> = c
            .towers
            .iter()
            .filter_map(|t| t.orbit.as_ref().map(|o| o.label().to_string()))
            .collect();
        labels.sort();
        assert_eq!(labels, vec!["0", "01"]);
        for (i, t) in c.towers.iter().enumerate() {
            if t.height < 3 {
                assert!(c.short_tower_checks(i).unwrap().pass());
            }
        }
    }

    #[test]
    fn single_periodic_orbit_space() {
        let s = Arc::new(Sft::from_transitions(vec!["0".into(), "1".into()], &[(0, 1), (1, 0)]).unwrap());
        let c = dungeon_castle(&s, 2, 0).unwrap();
        assert_eq!(c.towers.len(), 1);
        assert_eq!(c.towers[0].height, 2);
    }
}
