use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::clopen::ClopenSet;
use super::point::EventuallyPeriodicPoint;
use super::sft::{Sft, Sym};
use crate::error::{Error, Result};

/// Default bound on the number of child symbols of a higher-block coding.
pub const DEFAULT_BLOCK_LIMIT: usize = 1 << 16;

/// Limit on the number of words enumerated while lifting a child set.
const LIFT_WORD_LIMIT: usize = 1 << 20;

/// The maximal invariant subset of a clopen set, presented as a higher-block
/// SFT.
///
/// Child symbol `y_i` stands for the parent block `x_{i+offset} .. x_{i+offset+w-1}`
/// where `w` is the block length.
#[derive(Debug, Clone)]
pub struct SubSft {
    parent: Arc<Sft>,
    child: Arc<Sft>,
    block_len: usize,
    offset: i64,
    decode: Vec<Vec<Sym>>,
    encode: FxHashMap<Vec<Sym>, Sym>,
    language: ClopenSet,
}

/// Removes the words of `p` that do not extend to points all of whose
/// windows of the same length lie in `p`.
fn prune(p: &ClopenSet) -> Result<ClopenSet> {
    let mut cur = p.clone();
    loop {
        if cur.is_empty() {
            return Ok(ClopenSet::empty(cur.space()));
        }
        let (a, b) = cur.window();
        let pair = cur.intersect(&cur.shift(-1))?;
        let right = pair.project(a, b);
        let left = pair.project(a + 1, b + 1).shift(1);
        let next = cur.intersect(&right)?.intersect(&left)?;
        if cur.difference(&next)?.is_empty() {
            return Ok(cur);
        }
        cur = next;
    }
}

/// Points all of whose length-`w` windows inside `[from, to]` lie in the
/// block language `lang` (a set on a window of length `w`).
fn block_constraint(lang: &ClopenSet, from: i64, to: i64) -> Result<ClopenSet> {
    let (la, lb) = lang.window();
    let w = lb - la + 1;
    let sets = (from..=to - w + 1).map(|t| lang.shift(la - t));
    ClopenSet::intersect_all(lang.space(), sets)
}

/// Like [`block_constraint`] for a language whose blocks sit on
/// `[offset, offset + w - 1]` regardless of the stored window.
fn block_constraint_at(lang: &ClopenSet, offset: i64, w: usize, from: i64, to: i64) -> Result<ClopenSet> {
    let w = w as i64;
    let sets = (from..=to - w + 1).map(|t| lang.shift(offset - t));
    ClopenSet::intersect_all(lang.space(), sets)
}

/// The largest `T`-invariant subset of `s`, as a higher-block coding whose
/// block length is as small as possible.
pub fn maximal_invariant(s: &ClopenSet) -> Result<SubSft> {
    maximal_invariant_with_limit(s, DEFAULT_BLOCK_LIMIT)
}

pub fn maximal_invariant_with_limit(s: &ClopenSet, block_limit: usize) -> Result<SubSft> {
    let space = s.space().clone();
    match invariant_language(s)? {
        None => SubSft::build(space, 1, &ClopenSet::empty(s.space()), block_limit),
        Some(inv) => SubSft::build(space, inv.w, &inv.lang, block_limit),
    }
}

/// The block language of the maximal invariant subset of `s`, for the
/// least block length `w` whose blocks determine that subset, as a set on
/// `[-(w-1)/2, -(w-1)/2 + w - 1]`; `None` when the subset is empty.
pub(crate) fn invariant_language(s: &ClopenSet) -> Result<Option<InvariantLanguage>> {
    let p = prune(s)?;
    if p.is_empty() {
        return Ok(None);
    }
    let (a, b) = p.window();
    let width = (b - a + 1) as usize;
    for w in 1..=width {
        let lang = p.project(a, a + w as i64 - 1);
        let sliding = block_constraint(&lang, a, b)?;
        let ok = sliding.is_subset(&p)? || prune(&sliding)?.is_subset(&p)?;
        if ok {
            let offset = -((w as i64 - 1) / 2);
            let centred = lang.shift(a - offset);
            return Ok(Some(InvariantLanguage {
                lang: centred,
                offset,
                w,
            }));
        }
    }
    Err(Error::Internal("full window fails to describe the invariant set".into()))
}

/// Allowed blocks of length `w` on the window `[offset, offset + w - 1]`.
#[derive(Debug, Clone)]
pub(crate) struct InvariantLanguage {
    pub(crate) lang: ClopenSet,
    pub(crate) offset: i64,
    pub(crate) w: usize,
}

impl InvariantLanguage {
    /// Points all of whose blocks inside `[from, to]` are allowed; windows
    /// shorter than a block are widened to the right.
    pub(crate) fn constraint(&self, from: i64, to: i64) -> Result<ClopenSet> {
        let to = to.max(from + self.w as i64 - 1);
        block_constraint_at(&self.lang, self.offset, self.w, from, to)
    }

    /// Whether `set` meets the invariant subset.
    pub(crate) fn meets(&self, set: &ClopenSet) -> Result<bool> {
        if set.is_empty() {
            return Ok(false);
        }
        let (a, b) = set.window();
        Ok(!set.intersect(&self.constraint(a, b)?)?.is_empty())
    }
}

impl SubSft {
    fn build(parent: Arc<Sft>, w: usize, lang: &ClopenSet, block_limit: usize) -> Result<SubSft> {
        let offset = -((w as i64 - 1) / 2);
        let count = if lang.is_empty() { 0 } else { lang.count_on(offset, offset + w as i64 - 1) };
        if count > block_limit as u128 {
            return Err(Error::BlockLimit {
                stage: "maximal invariant",
                needed: count,
                limit: block_limit,
            });
        }
        let decode: Vec<Vec<Sym>> = if count == 0 {
            Vec::new()
        } else {
            lang.extend_to(offset, offset + w as i64 - 1)?
                .words(block_limit)
                .expect("count checked")
        };
        let encode: FxHashMap<Vec<Sym>, Sym> = decode
            .iter()
            .enumerate()
            .map(|(i, b)| (b.clone(), i as Sym))
            .collect();
        let mut edges = Vec::new();
        if w == 1 {
            for (i, u) in decode.iter().enumerate() {
                for (j, v) in decode.iter().enumerate() {
                    if parent.has_edge(u[0], v[0]) {
                        edges.push((i, j));
                    }
                }
            }
        } else {
            let mut by_prefix: FxHashMap<&[Sym], Vec<usize>> = FxHashMap::default();
            for (j, v) in decode.iter().enumerate() {
                by_prefix.entry(&v[..w - 1]).or_default().push(j);
            }
            for (i, u) in decode.iter().enumerate() {
                if let Some(js) = by_prefix.get(&u[1..]) {
                    edges.extend(js.iter().map(|&j| (i, j)));
                }
            }
        }
        let joiner = if parent.single_char_labels() { "" } else { "+" };
        let labels: Vec<String> = decode
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&s| parent.label(s))
                    .collect::<Vec<_>>()
                    .join(joiner)
            })
            .collect();
        let child = Sft::from_transitions(labels, &edges)?;
        if child.num_symbols() != decode.len() {
            return Err(Error::Internal("block language is not essential".into()));
        }
        let language = if count == 0 {
            ClopenSet::empty(&parent)
        } else {
            lang.extend_to(offset, offset + w as i64 - 1)?
        };
        Ok(SubSft {
            parent,
            child: Arc::new(child),
            block_len: w,
            offset,
            decode,
            encode,
            language,
        })
    }

    pub fn parent(&self) -> &Arc<Sft> {
        &self.parent
    }

    pub fn child(&self) -> &Arc<Sft> {
        &self.child
    }

    pub fn is_empty(&self) -> bool {
        self.child.is_empty()
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn decode_symbol(&self, s: Sym) -> &[Sym] {
        &self.decode[s as usize]
    }

    /// The allowed parent blocks, as a set on `[offset, offset + w - 1]`.
    pub fn language(&self) -> &ClopenSet {
        &self.language
    }

    pub fn decode_point(&self, y: &EventuallyPeriodicPoint) -> EventuallyPeriodicPoint {
        let first = |v: &[Sym]| -> Vec<Sym> { v.iter().map(|&s| self.decode[s as usize][0]).collect() };
        EventuallyPeriodicPoint {
            left: first(&y.left),
            center: first(&y.center),
            right: first(&y.right),
            anchor: y.anchor + self.offset,
        }
    }

    /// The child point coding `x`, or `None` when `x` leaves the invariant set.
    pub fn encode_point(&self, x: &EventuallyPeriodicPoint) -> Option<EventuallyPeriodicPoint> {
        let (c0, c1) = x.core();
        let w = self.block_len as i64;
        let i0 = c0 - self.offset - w + 1;
        let i1 = c1 - self.offset;
        let sym = |i: i64| -> Option<Sym> {
            let block = x.slice(i + self.offset, i + self.offset + w - 1);
            self.encode.get(&block).copied()
        };
        let lp = x.left.len() as i64;
        let rp = x.right.len() as i64;
        let left = (i0 - lp..i0).map(sym).collect::<Option<Vec<_>>>()?;
        let center = (i0..i1).map(sym).collect::<Option<Vec<_>>>()?;
        let right = (i1..i1 + rp).map(sym).collect::<Option<Vec<_>>>()?;
        Some(EventuallyPeriodicPoint {
            left,
            center,
            right,
            anchor: i0,
        })
    }

    /// Parent points whose blocks on the window of `d`, widened by `k`
    /// positions on both sides, are allowed, and whose coding on the window
    /// of `d` lies in `d`. Decreases to `d` as `k` grows.
    pub fn lift(&self, d: &ClopenSet, k: usize) -> Result<ClopenSet> {
        if !Arc::ptr_eq(d.space(), &self.child) && **d.space() != *self.child {
            return Err(Error::SpaceMismatch);
        }
        if d.is_empty() || self.is_empty() {
            return Ok(ClopenSet::empty(&self.parent));
        }
        let (c, e) = d.window();
        let n = d.count();
        let words = d.words(LIFT_WORD_LIMIT).ok_or(Error::BlockLimit {
            stage: "lift",
            needed: n,
            limit: LIFT_WORD_LIMIT,
        })?;
        let w = self.block_len;
        let lifted: Vec<Vec<Sym>> = words
            .iter()
            .map(|y| {
                let mut x = self.decode[y[0] as usize].clone();
                x.extend(y[1..].iter().map(|&s| self.decode[s as usize][w - 1]));
                x
            })
            .collect();
        let start = c + self.offset;
        let len = (e - c + 1) as usize + w - 1;
        let core = ClopenSet::from_words(&self.parent, start, len, &lifted)?;
        let k = k as i64;
        let guard = block_constraint(&self.language, start - k, start + len as i64 - 1 + k)?;
        core.intersect(&guard)
    }

    /// The neighbourhood of the invariant set made of points whose blocks on
    /// `[-k, k]` widened to the block length are allowed.
    pub fn neighbourhood(&self, k: usize) -> Result<ClopenSet> {
        if self.is_empty() {
            return Ok(ClopenSet::empty(&self.parent));
        }
        let k = k as i64;
        block_constraint(&self.language, self.offset - k, self.offset + self.block_len as i64 - 1 + k)
    }
}
