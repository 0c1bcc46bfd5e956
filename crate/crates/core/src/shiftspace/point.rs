use std::fmt;

use serde::{Deserialize, Serialize};

use super::sft::{Sft, Sym};
use crate::error::{Error, Result};

/// The bi-infinite sequence `...uuu w vvv...` with `w` starting at `anchor`.
///
/// Coordinates left of `anchor` read the cycle `left` backwards from its last
/// letter; coordinates from `anchor + |w|` on read `right` forwards.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EventuallyPeriodicPoint {
    pub left: Vec<Sym>,
    pub center: Vec<Sym>,
    pub right: Vec<Sym>,
    pub anchor: i64,
}

impl EventuallyPeriodicPoint {
    pub fn new(left: Vec<Sym>, center: Vec<Sym>, right: Vec<Sym>, anchor: i64) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::InvalidParameter(
                "cycle words of a point must be nonempty".into(),
            ));
        }
        Ok(EventuallyPeriodicPoint {
            left,
            center,
            right,
            anchor,
        })
    }

    /// The periodic point `x_i = word[i mod |word|]`.
    pub fn periodic(word: &[Sym]) -> Self {
        assert!(!word.is_empty());
        EventuallyPeriodicPoint {
            left: word.to_vec(),
            center: Vec::new(),
            right: word.to_vec(),
            anchor: 0,
        }
    }

    pub fn at(&self, i: i64) -> Sym {
        let rel = i - self.anchor;
        if rel < 0 {
            let n = self.left.len() as i64;
            self.left[rel.rem_euclid(n) as usize]
        } else if (rel as usize) < self.center.len() {
            self.center[rel as usize]
        } else {
            let n = self.right.len() as i64;
            self.right[((rel - self.center.len() as i64) % n) as usize]
        }
    }

    /// Letters `x_a .. x_b` inclusive.
    pub fn slice(&self, a: i64, b: i64) -> Vec<Sym> {
        (a..=b).map(|i| self.at(i)).collect()
    }

    /// `T^n x`, with `(Tx)_i = x_{i+1}`.
    pub fn shift(&self, n: i64) -> Self {
        EventuallyPeriodicPoint {
            anchor: self.anchor - n,
            ..self.clone()
        }
    }

    /// Range of coordinates outside of which the point is periodic on each side.
    pub fn core(&self) -> (i64, i64) {
        (self.anchor, self.anchor + self.center.len() as i64)
    }

    pub fn is_admissible(&self, sft: &Sft) -> bool {
        let (a, b) = self.core();
        let lo = a - self.left.len() as i64 - 1;
        let hi = b + self.right.len() as i64 + 1;
        sft.is_admissible(&self.slice(lo, hi))
    }

    /// Some point of `sft` with `x_pos .. x_{pos+|word|-1}` spelling `word`,
    /// closing off left and right along the first available predecessors and
    /// successors.
    pub fn through(sft: &Sft, word: &[Sym], pos: i64) -> Result<Self> {
        if word.is_empty() || !sft.is_admissible(word) {
            return Err(Error::Inadmissible(format!("{word:?}")));
        }
        let walk = |start: Sym, step: &dyn Fn(Sym) -> Sym| -> (Vec<Sym>, Vec<Sym>) {
            let mut seq = vec![start];
            loop {
                let next = step(*seq.last().unwrap());
                if let Some(i) = seq.iter().position(|&s| s == next) {
                    // seq[i] repeats: prefix seq[1..=i], cycle seq[i+1..] + next
                    let prefix = seq[1..=i].to_vec();
                    let mut cycle = seq[i + 1..].to_vec();
                    cycle.push(next);
                    return (prefix, cycle);
                }
                seq.push(next);
            }
        };
        let (rpre, rcyc) = walk(*word.last().unwrap(), &|s| sft.successors(s)[0]);
        let (lpre, lcyc) = walk(word[0], &|s| sft.predecessors(s)[0]);
        let mut center: Vec<Sym> = lpre.iter().rev().copied().collect();
        let anchor = pos - center.len() as i64;
        center.extend_from_slice(word);
        center.extend_from_slice(&rpre);
        let left: Vec<Sym> = lcyc.iter().rev().copied().collect();
        Ok(EventuallyPeriodicPoint {
            left,
            center,
            right: rcyc,
            anchor,
        })
    }

    pub fn describe(&self, sft: &Sft) -> String {
        let left = sft.format_word(&self.left);
        let right = sft.format_word(&self.right);
        match (self.center.is_empty(), self.left == self.right) {
            (true, true) => format!("({left})^inf @ {}", self.anchor),
            (true, false) => format!("({left})^inf ({right})^inf @ {}", self.anchor),
            (false, _) => format!(
                "({left})^inf {} ({right})^inf @ {}",
                sft.format_word(&self.center),
                self.anchor
            ),
        }
    }
}

impl fmt::Display for EventuallyPeriodicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:?})^inf {:?} ({:?})^inf @ {}",
            self.left, self.center, self.right, self.anchor
        )
    }
}
