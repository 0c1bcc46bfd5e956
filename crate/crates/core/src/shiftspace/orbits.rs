use std::fmt;

use serde::{Deserialize, Serialize};

use super::point::EventuallyPeriodicPoint;
use super::sft::{Sft, Sym};

/// A periodic orbit, stored as its lexicographically least primitive cycle word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    word: Vec<Sym>,
    label: String,
}

impl PeriodicOrbit {
    /// Canonical orbit of the cycle `word`; `None` if the word is not a
    /// primitive cycle of the graph.
    pub fn new(sft: &Sft, word: &[Sym]) -> Option<PeriodicOrbit> {
        if word.is_empty() || !is_cycle(sft, word) {
            return None;
        }
        let canon = least_rotation(word);
        if !is_primitive(&canon) {
            return None;
        }
        Some(PeriodicOrbit {
            label: sft.format_word(&canon),
            word: canon,
        })
    }

    pub fn word(&self) -> &[Sym] {
        &self.word
    }

    pub fn period(&self) -> usize {
        self.word.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The point with `x_i = p[(i + phase) mod period]`.
    pub fn point(&self, phase: usize) -> EventuallyPeriodicPoint {
        let l = self.word.len();
        let rot: Vec<Sym> = (0..l).map(|i| self.word[(i + phase) % l]).collect();
        EventuallyPeriodicPoint::periodic(&rot)
    }

    pub fn points(&self) -> Vec<EventuallyPeriodicPoint> {
        (0..self.period()).map(|k| self.point(k)).collect()
    }

    pub fn contains(&self, x: &EventuallyPeriodicPoint) -> bool {
        self.points().iter().any(|p| {
            let (a, b) = x.core();
            let span = (x.left.len() + x.right.len() + self.period()) as i64;
            (a - span..b + span).all(|i| p.at(i) == x.at(i))
        })
    }
}

impl fmt::Display for PeriodicOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}

fn is_cycle(sft: &Sft, word: &[Sym]) -> bool {
    sft.is_admissible(word) && sft.has_edge(*word.last().unwrap(), word[0])
}

fn least_rotation(word: &[Sym]) -> Vec<Sym> {
    let l = word.len();
    (0..l)
        .map(|k| (0..l).map(|i| word[(i + k) % l]).collect::<Vec<_>>())
        .min()
        .unwrap()
}

fn is_primitive(word: &[Sym]) -> bool {
    let l = word.len();
    (1..l).all(|k| !l.is_multiple_of(k) || (0..l).any(|i| word[i] != word[(i + k) % l]))
}

/// Strictly smaller than each of its proper rotations.
fn is_lyndon(word: &[Sym]) -> bool {
    let l = word.len();
    (1..l).all(|k| {
        for i in 0..l {
            let (a, b) = (word[i], word[(i + k) % l]);
            if a != b {
                return a < b;
            }
        }
        false
    })
}

/// All periodic orbits of least period `< max_period`, by period and then
/// lexicographically.
pub fn periodic_orbits(sft: &Sft, max_period: usize) -> Vec<PeriodicOrbit> {
    let mut out = Vec::new();
    if sft.is_empty() {
        return out;
    }
    for len in 1..max_period {
        let mut cur = Vec::with_capacity(len);
        for s in 0..sft.num_symbols() as Sym {
            cur.push(s);
            walk(sft, s, len, &mut cur, &mut out);
            cur.pop();
        }
    }
    out
}

fn walk(sft: &Sft, first: Sym, len: usize, cur: &mut Vec<Sym>, out: &mut Vec<PeriodicOrbit>) {
    if cur.len() == len {
        if sft.has_edge(*cur.last().unwrap(), first) && is_lyndon(cur) {
            out.push(PeriodicOrbit {
                label: sft.format_word(cur),
                word: cur.clone(),
            });
        }
        return;
    }
    let last = *cur.last().unwrap();
    for &t in sft.successors(last) {
        // a Lyndon word starts with its least letter
        if t < first {
            continue;
        }
        cur.push(t);
        walk(sft, first, len, cur, out);
        cur.pop();
    }
}
