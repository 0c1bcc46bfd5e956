//! Towers, castles and the constructions that produce them.

mod capture;
mod construct;
mod dungeon;
mod towers;

use std::sync::Arc;

pub use capture::{is_capturing, is_feedback, CaptureReport, CaptureWitness, FeedbackReport};
pub use construct::{high_castle, kakutani_rokhlin};
pub use dungeon::{dungeon_castle, dungeon_castle_with, DungeonOptions};
pub use towers::{capturing_tower_fixed, capturing_tower_periodic, centered_cylinder, TowerOptions};

use crate::error::{Error, Result};
use crate::shiftspace::{ClopenSet, PeriodicOrbit, Sft};

/// Limit on the number of cells a single tower may be sliced into.
pub const CELL_LIMIT: usize = 1 << 16;

/// Sets `B, TB, ..., T^{height-1} B`.
#[derive(Debug, Clone)]
pub struct Tower {
    pub base: ClopenSet,
    pub height: usize,
    /// The periodic orbit this tower was built around, if any.
    pub orbit: Option<PeriodicOrbit>,
}

impl Tower {
    pub fn new(base: ClopenSet, height: usize) -> Tower {
        Tower {
            base,
            height,
            orbit: None,
        }
    }

    pub fn floor(&self, i: usize) -> ClopenSet {
        self.base.shift(i as i64)
    }

    pub fn floors(&self) -> Vec<ClopenSet> {
        (0..self.height).map(|i| self.floor(i)).collect()
    }

    pub fn top(&self) -> ClopenSet {
        self.floor(self.height - 1)
    }

    pub fn union(&self) -> Result<ClopenSet> {
        ClopenSet::union_all(self.base.space(), self.floors())
    }

    /// `B ∩ T^{-i} B = ∅` for `1 <= i < height`.
    pub fn is_tower(&self) -> Result<bool> {
        for i in 1..self.height {
            if !self.base.is_disjoint(&self.base.shift(-(i as i64)))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `T(top) ∩ K ⊆ B`: an orbit leaving the top floor can re-enter the
    /// tower only through its base.
    pub fn reenters_at_base(&self) -> Result<bool> {
        let after = self.base.shift(self.height as i64);
        let k = self.union()?;
        after.intersect(&k)?.is_subset(&self.base)
    }
}

/// A finite list of towers with pairwise disjoint floors.
#[derive(Debug, Clone)]
pub struct Castle {
    space: Arc<Sft>,
    pub towers: Vec<Tower>,
    /// Capture parameter the castle was built for.
    pub n: Option<usize>,
    /// Every floor lies in one cylinder on `[-depth, depth]`.
    pub depth: Option<usize>,
    pub is_partition: bool,
}

/// Exact checks on a short tower.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ShortTowerChecks {
    pub capture: CaptureReport,
    pub complement_capture: CaptureReport,
    /// Capture at `ℓ ⌈N/ℓ⌉`.
    pub extended_capture: CaptureReport,
    pub reenters_at_base: bool,
}

impl ShortTowerChecks {
    pub fn pass(&self) -> bool {
        self.capture.pass && self.complement_capture.pass && self.extended_capture.pass && self.reenters_at_base
    }
}

/// Exact re-check of one tower.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TowerCheck {
    pub tower: usize,
    pub height: usize,
    /// `B ∩ T^{-i} B = ∅` for `1 <= i < height`.
    pub is_tower: bool,
    pub short: bool,
    pub checks: Option<ShortTowerChecks>,
    /// Every floor lies in one cylinder on `[-r, r]`, when a depth is set.
    pub floors_resolved: bool,
    pub pass: bool,
}

/// Exact re-check of a whole castle.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CastleReport {
    pub towers: Vec<TowerCheck>,
    /// Failure of the disjointness or covering check, if any.
    pub partition_error: Option<String>,
    pub pass: bool,
}

impl Castle {
    pub fn new(space: &Arc<Sft>, towers: Vec<Tower>) -> Castle {
        Castle {
            space: space.clone(),
            towers,
            n: None,
            depth: None,
            is_partition: false,
        }
    }

    pub fn space(&self) -> &Arc<Sft> {
        &self.space
    }

    pub fn base(&self) -> Result<ClopenSet> {
        ClopenSet::union_all(&self.space, self.towers.iter().map(|t| t.base.clone()))
    }

    /// `(tower, level, floor)` for every floor.
    pub fn floors(&self) -> Vec<(usize, usize, ClopenSet)> {
        let mut out = Vec::new();
        for (i, t) in self.towers.iter().enumerate() {
            for j in 0..t.height {
                out.push((i, j, t.floor(j)));
            }
        }
        out
    }

    pub fn union(&self) -> Result<ClopenSet> {
        ClopenSet::union_all(&self.space, self.floors().into_iter().map(|f| f.2))
    }

    pub fn is_short(&self, tower: usize) -> bool {
        self.n.is_some_and(|n| self.towers[tower].height < n)
    }

    /// Floors pairwise disjoint, checked by comparing the size of the union
    /// with the sum of the sizes on a common window.
    pub fn check_disjoint(&self) -> Result<()> {
        let floors = self.floors();
        if floors.is_empty() {
            return Ok(());
        }
        let a = floors.iter().map(|f| f.2.window().0).min().unwrap();
        let b = floors.iter().map(|f| f.2.window().1).max().unwrap();
        let union = ClopenSet::union_all(&self.space, floors.iter().map(|f| f.2.clone()))?;
        let mut sum = Some(0u128);
        for f in &floors {
            sum = sum.and_then(|s| s.checked_add(f.2.count_on(a, b)));
        }
        if sum == Some(union.count_on(a, b)) && sum != Some(u128::MAX) {
            return Ok(());
        }
        for x in 0..floors.len() {
            for y in x + 1..floors.len() {
                if !floors[x].2.is_disjoint(&floors[y].2)? {
                    return Err(Error::NotPartition(format!(
                        "floor {} of tower {} meets floor {} of tower {}",
                        floors[x].1, floors[x].0, floors[y].1, floors[y].0
                    )));
                }
            }
        }
        Ok(())
    }

    /// Floors pairwise disjoint and covering the whole space.
    pub fn check_partition(&self) -> Result<()> {
        self.check_disjoint()?;
        let union = self.union()?;
        if let Some((pos, word)) = union.complement().witness() {
            return Err(Error::NotPartition(format!(
                "floors miss the cylinder [{}]@{pos}",
                self.space.format_word(&word)
            )));
        }
        Ok(())
    }

    /// Exact checks on a tower of height below the stored capture parameter.
    pub fn short_tower_checks(&self, tower: usize) -> Result<ShortTowerChecks> {
        let n = self
            .n
            .ok_or_else(|| Error::InvalidParameter("castle has no capture parameter".into()))?;
        let t = &self.towers[tower];
        let k = t.union()?;
        let l = t.height;
        Ok(ShortTowerChecks {
            capture: is_capturing(&k, n)?,
            complement_capture: is_capturing(&k.complement(), n)?,
            extended_capture: is_capturing(&k, l * n.div_ceil(l))?,
            reenters_at_base: t.reenters_at_base()?,
        })
    }

    /// Re-runs every exact check that applies to the castle: floors disjoint
    /// (and covering when it claims to be a partition), each tower a tower,
    /// the short-tower checks and the floor resolution.
    pub fn verify(&self) -> Result<CastleReport> {
        let partition = if self.is_partition {
            self.check_partition()
        } else {
            self.check_disjoint()
        };
        let partition_error = match partition {
            Ok(()) => None,
            Err(Error::NotPartition(m)) => Some(m),
            Err(e) => return Err(e),
        };
        let mut towers = Vec::with_capacity(self.towers.len());
        for (i, t) in self.towers.iter().enumerate() {
            let is_tower = t.is_tower()?;
            let short = self.is_short(i);
            let checks = if short { Some(self.short_tower_checks(i)?) } else { None };
            let floors_resolved = match self.depth {
                None => true,
                Some(r) => {
                    let r = r as i64;
                    t.floors().iter().all(|f| f.project(-r, r).count_on(-r, r) == 1)
                }
            };
            let pass = is_tower && floors_resolved && checks.as_ref().is_none_or(|c| c.pass());
            towers.push(TowerCheck {
                tower: i,
                height: t.height,
                is_tower,
                short,
                checks,
                floors_resolved,
                pass,
            });
        }
        let pass = partition_error.is_none() && towers.iter().all(|t| t.pass);
        Ok(CastleReport {
            towers,
            partition_error,
            pass,
        })
    }

    /// Splits every tower so that each floor lies in one cylinder on
    /// `[-r, r]`.
    pub fn refine_floors(&self, r: usize) -> Result<Castle> {
        let mut towers = Vec::new();
        let r = r as i64;
        for t in &self.towers {
            let h = t.height as i64;
            let cells = t.base.project(-r, h - 1 + r);
            let count = cells.count_on(-r, h - 1 + r);
            let words = cells
                .extend_to(-r, h - 1 + r)?
                .words(CELL_LIMIT)
                .ok_or(Error::BlockLimit {
                    stage: "refine floors",
                    needed: count,
                    limit: CELL_LIMIT,
                })?;
            for w in words {
                let cyl = ClopenSet::cylinder(&self.space, &w, -r)?;
                let base = t.base.intersect(&cyl)?;
                if base.is_empty() {
                    continue;
                }
                towers.push(Tower {
                    base,
                    height: t.height,
                    orbit: t.orbit.clone(),
                });
            }
        }
        Ok(Castle {
            space: self.space.clone(),
            towers,
            n: self.n,
            depth: Some(r as usize),
            is_partition: self.is_partition,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlapping_floors_are_reported() {
        let g = Arc::new(Sft::golden_mean());
        let zero = ClopenSet::cylinder(&g, &[0], 0).unwrap();
        let c = Castle::new(&g, vec![Tower::new(zero.clone(), 1), Tower::new(zero, 1)]);
        assert!(matches!(c.check_disjoint(), Err(Error::NotPartition(_))));
    }

    #[test]
    fn refinement_keeps_the_union() {
        let g = Arc::new(Sft::golden_mean());
        let zero = ClopenSet::cylinder(&g, &[0], 0).unwrap();
        let c = kakutani_rokhlin(&zero).unwrap();
        let r = c.refine_floors(1).unwrap();
        r.check_partition().unwrap();
        for (_, _, f) in r.floors() {
            assert_eq!(f.project(-1, 1).count_on(-1, 1), 1);
        }
    }
}
