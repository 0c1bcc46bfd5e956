use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shiftspace::{maximal_invariant, ClopenSet, EventuallyPeriodicPoint, Sym};

/// A word in `(E \ TE) ∩ T^{-time}(E^c)`: an orbit entering `E` that leaves
/// again after `time` steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptureWitness {
    pub time: usize,
    pub pos: i64,
    pub word: Vec<Sym>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptureReport {
    pub n: usize,
    pub pass: bool,
    pub witness: Option<CaptureWitness>,
}

/// Decides `E \ TE ⊆ ⋂_{n<N} T^{-n} E` exactly.
pub fn is_capturing(e: &ClopenSet, n: usize) -> Result<CaptureReport> {
    let entry = e.difference(&e.shift(1))?;
    if !entry.is_empty() {
        for t in 1..n {
            let bad = entry.difference(&e.shift(-(t as i64)))?;
            if let Some((pos, word)) = bad.witness() {
                return Ok(CaptureReport {
                    n,
                    pass: false,
                    witness: Some(CaptureWitness { time: t, pos, word }),
                });
            }
        }
    }
    Ok(CaptureReport {
        n,
        pass: true,
        witness: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeedbackReport {
    /// Every orbit segment of length `n0` meets the set.
    Feedback { n0: usize },
    /// A point whose whole orbit avoids the set.
    NotFeedback { witness: EventuallyPeriodicPoint },
}

impl FeedbackReport {
    pub fn n0(&self) -> Option<usize> {
        match self {
            FeedbackReport::Feedback { n0 } => Some(*n0),
            FeedbackReport::NotFeedback { .. } => None,
        }
    }
}

/// Bound on the number of steps tried before falling back to the maximal
/// invariant set of the complement.
const FEEDBACK_STEPS: usize = 4096;

/// Decides whether every orbit meets `e`, returning the least `n0` with
/// `⋃_{n<n0} T^{-n} E = X`.
pub fn is_feedback(e: &ClopenSet) -> Result<FeedbackReport> {
    let ec = e.complement();
    let (a, b) = ec.window();
    // orbits avoiding E for more steps than there are complement words must
    // revisit a window and hence close up into a periodic orbit
    let states = ec.count();
    let bound = states.min(FEEDBACK_STEPS as u128) as usize + 1;
    let mut z = ec.clone();
    for n in 1..=bound {
        if z.is_empty() {
            return Ok(FeedbackReport::Feedback { n0: n });
        }
        z = z.intersect(&ec.shift(-(n as i64)))?;
    }
    if z.is_empty() {
        return Ok(FeedbackReport::Feedback { n0: bound + 1 });
    }
    if states < FEEDBACK_STEPS as u128 {
        // z is nonempty for more than `states` steps: find a repeated window
        let steps = bound + 1;
        let hull = z.extend_to(a.min(z.window().0), (b + steps as i64).max(z.window().1))?;
        let (pos, word) = hull.witness().expect("nonempty");
        let at = |i: i64| word[(i - pos) as usize];
        let window = |t: i64| -> Vec<Sym> { (a + t..=b + t).map(at).collect() };
        let mut seen = std::collections::HashMap::new();
        for t in 0..steps as i64 {
            if let Some(&s) = seen.get(&window(t)) {
                let u: Vec<Sym> = (a + s..a + t).map(at).collect();
                let witness = EventuallyPeriodicPoint::new(u.clone(), Vec::new(), u, a + s)?;
                return Ok(FeedbackReport::NotFeedback { witness });
            }
            seen.insert(window(t), t);
        }
        return Err(Error::Internal("no repeated window in a long avoiding orbit".into()));
    }
    let m = maximal_invariant(&ec)?;
    if m.is_empty() {
        return Err(Error::DepthExhausted {
            stage: "feedback",
            max_depth: FEEDBACK_STEPS,
        });
    }
    let child = m.child();
    let mut path: Vec<Sym> = vec![0];
    loop {
        let next = child.successors(*path.last().unwrap())[0];
        if let Some(i) = path.iter().position(|&s| s == next) {
            let cycle = path[i..].to_vec();
            let y = EventuallyPeriodicPoint::periodic(&cycle);
            return Ok(FeedbackReport::NotFeedback {
                witness: m.decode_point(&y),
            });
        }
        path.push(next);
    }
}
