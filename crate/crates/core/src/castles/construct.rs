use std::sync::Arc;

use super::capture::{is_feedback, FeedbackReport};
use super::{Castle, Tower};
use crate::error::{Error, Result};
use crate::shiftspace::{periodic_orbits, ClopenSet, Sft, Sym};

/// The castle of first returns to a feedback set `e`: the tower of height
/// `h` has as base the points of `e` whose first return to `e` happens at
/// time `h`.
pub fn kakutani_rokhlin(e: &ClopenSet) -> Result<Castle> {
    let n0 = match is_feedback(e)? {
        FeedbackReport::Feedback { n0 } => n0,
        FeedbackReport::NotFeedback { witness } => return Err(Error::NotFeedback { witness }),
    };
    let space = e.space().clone();
    let mut towers = Vec::new();
    let mut rest = e.clone();
    for h in 1..=n0 {
        if rest.is_empty() {
            break;
        }
        let back = e.shift(-(h as i64));
        let base = rest.intersect(&back)?;
        rest = rest.difference(&back)?;
        if !base.is_empty() {
            towers.push(Tower::new(base, h));
        }
    }
    if !rest.is_empty() {
        return Err(Error::Internal(format!("points of the base do not return within {n0} steps")));
    }
    let mut castle = Castle::new(&space, towers);
    castle.is_partition = true;
    Ok(castle)
}

/// Cylinders `[w]_0` in lexicographic order, each disjoint from its images
/// under `T^i` for `1 <= i < n`, covering the space.
fn separating_cover(space: &Arc<Sft>, n: usize) -> Result<Vec<ClopenSet>> {
    let mut cover = Vec::new();
    let mut pending: Vec<Vec<Sym>> = (0..space.num_symbols() as Sym).map(|s| vec![s]).collect();
    while !pending.is_empty() {
        let mut next = Vec::new();
        for w in pending {
            let v = ClopenSet::cylinder(space, &w, 0)?;
            let mut good = true;
            for i in 1..n {
                if !v.is_disjoint(&v.shift(i as i64))? {
                    good = false;
                    break;
                }
            }
            if good {
                cover.push((w, v));
            } else if w.len() > n {
                return Err(Error::Internal("long cylinder meets its own short shift".into()));
            } else {
                for &t in space.successors(*w.last().unwrap()) {
                    let mut u = w.clone();
                    u.push(t);
                    next.push(u);
                }
            }
        }
        pending = next;
    }
    cover.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(cover.into_iter().map(|c| c.1).collect())
}

/// A castle partition whose towers all have height at least `n`, for a shift
/// with no periodic orbit of period below `n`.
pub fn high_castle(space: &Arc<Sft>, n: usize) -> Result<Castle> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    if let Some(orbit) = periodic_orbits(space, n).into_iter().next() {
        return Err(Error::HasShortPeriod { orbit, n });
    }
    if space.is_empty() {
        let mut c = Castle::new(space, Vec::new());
        c.is_partition = true;
        c.n = Some(n);
        return Ok(c);
    }
    let cover = separating_cover(space, n)?;
    let mut b = ClopenSet::empty(space);
    let mut e = ClopenSet::empty(space);
    let span = n as i64 - 1;
    for v in cover {
        let fresh = v.difference(&e)?;
        if fresh.is_empty() {
            continue;
        }
        b = b.union(&fresh)?;
        let orbit = ClopenSet::union_all(space, (-span..=span).map(|k| fresh.shift(k)))?;
        e = e.union(&orbit)?;
    }
    let mut castle = kakutani_rokhlin(&b)?;
    if let Some(t) = castle.towers.iter().find(|t| t.height < n) {
        return Err(Error::Internal(format!("high castle produced a tower of height {}", t.height)));
    }
    castle.n = Some(n);
    Ok(castle)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_mean_first_returns_to_zero() {
        let g = Arc::new(Sft::golden_mean());
        let zero = ClopenSet::cylinder(&g, &[0], 0).unwrap();
        let c = kakutani_rokhlin(&zero).unwrap();
        assert_eq!(c.towers.len(), 2);
        let b1 = ClopenSet::cylinder(&g, &[0, 0], 0).unwrap();
        let b2 = ClopenSet::cylinder(&g, &[0, 1], 0).unwrap();
        assert_eq!(c.towers[0].height, 1);
        assert!(c.towers[0].base.equals(&b1).unwrap());
        assert_eq!(c.towers[1].height, 2);
        assert!(c.towers[1].base.equals(&b2).unwrap());
        c.check_partition().unwrap();
    }

    #[test]
    fn whole_space_is_one_tower() {
        let g = Arc::new(Sft::golden_mean());
        let c = kakutani_rokhlin(&ClopenSet::full(&g)).unwrap();
        assert_eq!(c.towers.len(), 1);
        assert_eq!(c.towers[0].height, 1);
    }

    #[test]
    fn non_feedback_base_is_rejected() {
        let f = Arc::new(Sft::full_shift(2));
        let one = ClopenSet::cylinder(&f, &[1], 0).unwrap();
        assert!(matches!(kakutani_rokhlin(&one), Err(Error::NotFeedback { .. })));
    }

    #[test]
    fn single_period_two_orbit() {
        let s = Arc::new(Sft::from_transitions(vec!["0".into(), "1".into()], &[(0, 1), (1, 0)]).unwrap());
        let c = high_castle(&s, 2).unwrap();
        assert_eq!(c.towers.len(), 1);
        assert_eq!(c.towers[0].height, 2);
        c.check_partition().unwrap();
    }

    #[test]
    fn golden_mean_has_a_fixed_point() {
        let g = Arc::new(Sft::golden_mean());
        assert!(matches!(high_castle(&g, 2), Err(Error::HasShortPeriod { .. })));
    }
}
