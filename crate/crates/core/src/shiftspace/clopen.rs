use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::dd::{Dd, Op};
use super::point::EventuallyPeriodicPoint;
use super::sft::{Sft, Sym};
use crate::error::{Error, Result};

/// Exact serializable form of a clopen set: a decision diagram over the
/// window `[start, start + len - 1]`. Node ids `0` and `1` are the empty and
/// the full set; entry `k` of `nodes` is node `k + 2`, given as its default
/// child and its explicit `(symbol, child)` edges. Children come first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagram {
    pub start: i64,
    pub len: usize,
    pub root: u32,
    pub nodes: Vec<(u32, Vec<(Sym, u32)>)>,
}

/// A clopen subset of an SFT: the points whose letters on the window
/// `[start, start + len - 1]` form one of the words of the diagram.
#[derive(Clone)]
pub struct ClopenSet {
    space: Arc<Sft>,
    start: i64,
    dd: Arc<Dd>,
}

impl ClopenSet {
    fn wrap(space: &Arc<Sft>, start: i64, mut dd: Dd) -> ClopenSet {
        if dd.is_trivially_empty() {
            return ClopenSet::empty(space);
        }
        if dd.is_trivially_full() {
            return ClopenSet::full(space);
        }
        let lead = dd.trim();
        ClopenSet {
            space: space.clone(),
            start: start + lead as i64,
            dd: Arc::new(dd),
        }
    }

    pub fn empty(space: &Arc<Sft>) -> ClopenSet {
        ClopenSet {
            space: space.clone(),
            start: 0,
            dd: Arc::new(Dd::constant(1, false)),
        }
    }

    pub fn full(space: &Arc<Sft>) -> ClopenSet {
        ClopenSet {
            space: space.clone(),
            start: 0,
            dd: Arc::new(Dd::constant(1, true)),
        }
    }

    fn check_word(space: &Sft, word: &[Sym]) -> Result<()> {
        match word.iter().find(|&&s| s as usize >= space.num_symbols()) {
            Some(s) => Err(Error::InvalidSymbol(s.to_string())),
            None => Ok(()),
        }
    }

    /// The cylinder `[word]_pos`.
    pub fn cylinder(space: &Arc<Sft>, word: &[Sym], pos: i64) -> Result<ClopenSet> {
        if word.is_empty() {
            return Err(Error::InvalidParameter("cylinder word must be nonempty".into()));
        }
        Self::check_word(space, word)?;
        let dd = Dd::cylinder(word.len(), 0, word, space.num_symbols());
        Ok(Self::wrap(space, pos, dd))
    }

    /// Union of cylinders on the window starting at `start`; all words share
    /// the length `len`.
    pub fn from_words(space: &Arc<Sft>, start: i64, len: usize, words: &[Vec<Sym>]) -> Result<ClopenSet> {
        if len == 0 {
            return Err(Error::InvalidParameter("window length must be positive".into()));
        }
        for w in words {
            if w.len() != len {
                return Err(Error::InvalidParameter(format!(
                    "word of length {} on a window of length {len}",
                    w.len()
                )));
            }
            Self::check_word(space, w)?;
        }
        let dd = Dd::from_words(len, words.iter().map(|w| w.as_slice()), space.num_symbols());
        Ok(Self::wrap(space, start, dd))
    }

    pub fn space(&self) -> &Arc<Sft> {
        &self.space
    }

    /// Inclusive window `[a, b]`.
    pub fn window(&self) -> (i64, i64) {
        (self.start, self.start + self.dd.len() as i64 - 1)
    }

    pub fn window_len(&self) -> usize {
        self.dd.len()
    }

    pub fn node_count(&self) -> usize {
        self.dd.node_count()
    }

    fn same_space(&self, other: &ClopenSet) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    fn dd_on(&self, a: i64, b: i64) -> Dd {
        let (sa, sb) = self.window();
        debug_assert!(a <= sa && sb <= b);
        let pre = (sa - a) as usize;
        let post = (b - sb) as usize;
        if pre == 0 && post == 0 {
            (*self.dd).clone()
        } else {
            self.dd.extend(pre, post, self.space.num_symbols())
        }
    }

    /// The same set described on a larger window. Windows not containing the
    /// current one are rejected.
    pub fn extend_to(&self, a: i64, b: i64) -> Result<ClopenSet> {
        let (sa, sb) = self.window();
        if a > sa || b < sb {
            return Err(Error::InvalidParameter(format!(
                "window [{a},{b}] does not contain [{sa},{sb}]"
            )));
        }
        Ok(ClopenSet {
            space: self.space.clone(),
            start: a,
            dd: Arc::new(self.dd_on(a, b)),
        })
    }

    fn hull(&self, other: &ClopenSet) -> (i64, i64) {
        let (a, b) = self.window();
        let (c, d) = other.window();
        (a.min(c), b.max(d))
    }

    fn binary(&self, other: &ClopenSet, op: Op) -> Result<ClopenSet> {
        self.same_space(other)?;
        let q = self.space.num_symbols();
        // shortcuts on trivially constant operands
        match op {
            Op::And if self.dd.is_trivially_full() => return Ok(other.clone()),
            Op::And if other.dd.is_trivially_full() => return Ok(self.clone()),
            Op::Or | Op::Diff if other.dd.is_trivially_empty() => return Ok(self.clone()),
            Op::Or if self.dd.is_trivially_empty() => return Ok(other.clone()),
            _ => {}
        }
        let (a, b) = self.hull(other);
        let x = self.dd_on(a, b);
        let y = other.dd_on(a, b);
        Ok(Self::wrap(&self.space, a, x.apply(&y, op, q)))
    }

    pub fn union(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.binary(other, Op::Or)
    }

    pub fn intersect(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.binary(other, Op::And)
    }

    pub fn difference(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.binary(other, Op::Diff)
    }

    pub fn complement(&self) -> ClopenSet {
        let dd = self.dd.complement(self.space.num_symbols());
        Self::wrap(&self.space, self.start, dd)
    }

    /// Union of many sets, merged pairwise.
    pub fn union_all(space: &Arc<Sft>, sets: impl IntoIterator<Item = ClopenSet>) -> Result<ClopenSet> {
        Self::reduce(space, sets.into_iter().collect(), Op::Or)
    }

    pub fn intersect_all(space: &Arc<Sft>, sets: impl IntoIterator<Item = ClopenSet>) -> Result<ClopenSet> {
        Self::reduce(space, sets.into_iter().collect(), Op::And)
    }

    fn reduce(space: &Arc<Sft>, mut sets: Vec<ClopenSet>, op: Op) -> Result<ClopenSet> {
        if sets.is_empty() {
            return Ok(match op {
                Op::And => ClopenSet::full(space),
                _ => ClopenSet::empty(space),
            });
        }
        while sets.len() > 1 {
            let mut next = Vec::with_capacity(sets.len().div_ceil(2));
            let mut it = sets.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => next.push(a.binary(&b, op)?),
                    None => next.push(a),
                }
            }
            sets = next;
        }
        Ok(sets.pop().unwrap())
    }

    /// `T^n(S)`; the window moves to `[a - n, b - n]`.
    pub fn shift(&self, n: i64) -> ClopenSet {
        if self.dd.len() == 1 && (self.dd.is_trivially_empty() || self.dd.is_trivially_full()) {
            return self.clone();
        }
        ClopenSet {
            space: self.space.clone(),
            start: self.start - n,
            dd: self.dd.clone(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.dd.is_empty(&self.space)
    }

    pub fn is_full(&self) -> bool {
        self.complement().is_empty()
    }

    pub fn is_subset(&self, other: &ClopenSet) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    pub fn equals(&self, other: &ClopenSet) -> Result<bool> {
        Ok(self.is_subset(other)? && other.is_subset(self)?)
    }

    pub fn is_disjoint(&self, other: &ClopenSet) -> Result<bool> {
        Ok(self.intersect(other)?.is_empty())
    }

    pub fn contains_point(&self, x: &EventuallyPeriodicPoint) -> bool {
        let (a, b) = self.window();
        self.dd.accepts((a..=b).map(|i| x.at(i)))
    }

    /// Whether the word placed at `pos` lies in the set once extended, i.e.
    /// the word covers the whole window.
    pub fn contains_word_at(&self, word: &[Sym], pos: i64) -> bool {
        let (a, b) = self.window();
        if pos > a || pos + word.len() as i64 - 1 < b {
            return false;
        }
        let off = (a - pos) as usize;
        self.dd.accepts(word[off..].iter().copied())
    }

    /// Admissible words of the set on its own window, or `None` beyond `limit`.
    pub fn words(&self, limit: usize) -> Option<Vec<Vec<Sym>>> {
        self.dd.words(&self.space, limit)
    }

    /// Least admissible word of the set together with its starting position.
    pub fn witness(&self) -> Option<(i64, Vec<Sym>)> {
        self.dd.witness(&self.space).map(|w| (self.start, w))
    }

    pub fn sample_point(&self) -> Option<EventuallyPeriodicPoint> {
        let (pos, w) = self.witness()?;
        EventuallyPeriodicPoint::through(&self.space, &w, pos).ok()
    }

    /// Number of admissible words of the set on its own window.
    pub fn count(&self) -> u128 {
        self.dd.count_extended(&self.space, 0, 0)
    }

    /// Number of admissible words of the set on a window containing its own.
    pub fn count_on(&self, a: i64, b: i64) -> u128 {
        let (sa, sb) = self.window();
        assert!(a <= sa && sb <= b, "count window must contain the set window");
        self.dd
            .count_extended(&self.space, (sa - a) as usize, (b - sb) as usize)
    }

    /// Restrictions to `[a, b]` of the points of the set, as a set on `[a, b]`
    /// (the smallest clopen set on that window containing this one).
    pub fn project(&self, a: i64, b: i64) -> ClopenSet {
        let (sa, sb) = self.window();
        let (ha, hb) = (a.min(sa), b.max(sb));
        let dd = self.dd_on(ha, hb);
        let p = dd.project(&self.space, (a - ha) as usize, (b - ha + 1) as usize);
        Self::wrap(&self.space, a, p)
    }

    /// The same set on a window shortened by dropping trailing coordinates
    /// on which membership does not depend.
    pub fn tighten(&self) -> ClopenSet {
        let mut cur = self.clone();
        loop {
            let (a, b) = cur.window();
            if a == b {
                return cur;
            }
            let shorter = cur.project(a, b - 1);
            if shorter.window_len() < cur.window_len() && shorter.equals(&cur).unwrap_or(false) {
                cur = shorter;
            } else {
                return cur;
            }
        }
    }

    pub fn to_diagram(&self) -> Diagram {
        let (root, nodes) = self.dd.export();
        Diagram {
            start: self.start,
            len: self.dd.len(),
            root,
            nodes,
        }
    }

    pub fn from_diagram(space: &Arc<Sft>, d: &Diagram) -> Result<ClopenSet> {
        if d.len == 0 {
            return Err(Error::InvalidParameter("diagram window must be nonempty".into()));
        }
        let dd = Dd::import_nodes(space.num_symbols(), d.len, d.root, &d.nodes).map_err(Error::InvalidParameter)?;
        Ok(Self::wrap(space, d.start, dd))
    }

    pub fn describe(&self, limit: usize) -> String {
        let (a, b) = self.window();
        if self.is_empty() {
            return "EMPTY".into();
        }
        match self.words(limit) {
            Some(ws) => {
                let parts: Vec<String> = ws
                    .iter()
                    .map(|w| format!("[{}]@{a}", self.space.format_word(w)))
                    .collect();
                parts.join(" | ")
            }
            None => format!("<{} words on [{a},{b}]>", self.count()),
        }
    }
}

impl fmt::Debug for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.window();
        write!(f, "ClopenSet {{ window: [{a},{b}], {} }}", self.describe(16))
    }
}
