use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a symbol in the (essential) alphabet of an [`Sft`].
pub type Sym = u32;

/// How an [`Sft`] was obtained from a forbidden-word description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub alphabet: Vec<String>,
    pub forbidden: Vec<Vec<String>>,
    /// Length of the blocks used as vertices (1 when no recoding was needed).
    pub block_len: usize,
    /// Vertices removed by essentialization, by label.
    pub pruned: Vec<String>,
}

/// A two-sided vertex shift on an essential transition graph.
///
/// Points are bi-infinite paths; `(Tx)_i = x_{i+1}`. Every symbol has at
/// least one successor and one predecessor, so every admissible word occurs in
/// some point.
#[derive(Debug, Clone)]
pub struct Sft {
    labels: Vec<String>,
    succ: Vec<Vec<Sym>>,
    pred: Vec<Vec<Sym>>,
    provenance: Option<Provenance>,
    single_char: bool,
}

impl PartialEq for Sft {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.succ == other.succ
    }
}

impl Eq for Sft {}

impl Sft {
    /// Builds the essential part of the vertex shift with the given labels and
    /// edges `(from, to)` given as label indices.
    pub fn from_transitions(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Sft> {
        let q = labels.len();
        let mut seen = BTreeSet::new();
        for l in &labels {
            if l.is_empty() || !seen.insert(l.clone()) {
                return Err(Error::InvalidSymbol(l.clone()));
            }
        }
        let mut succ = vec![BTreeSet::new(); q];
        for &(a, b) in edges {
            if a >= q || b >= q {
                return Err(Error::InvalidSymbol(format!("#{}", a.max(b))));
            }
            succ[a].insert(b);
        }
        let (sft, pruned) = essentialize(labels, succ);
        Ok(Sft {
            provenance: Some(Provenance {
                alphabet: sft.labels.clone(),
                forbidden: Vec::new(),
                block_len: 1,
                pruned,
            }),
            ..sft
        })
    }

    /// Memory-1 presentation of the shift avoiding `forbidden` over `alphabet`.
    ///
    /// Forbidden words of length at most 2 keep the original alphabet; longer
    /// ones recode to the `(L-1)`-block presentation, `L` the longest forbidden
    /// length. Block labels concatenate the original labels (joined by `+` when
    /// some label is longer than one character).
    pub fn from_forbidden(alphabet: &[String], forbidden: &[Vec<String>]) -> Result<Sft> {
        let mut seen = BTreeSet::new();
        for l in alphabet {
            if l.is_empty() || !seen.insert(l.clone()) {
                return Err(Error::InvalidSymbol(l.clone()));
            }
        }
        let index = |l: &String| -> Result<usize> {
            alphabet
                .iter()
                .position(|a| a == l)
                .ok_or_else(|| Error::InvalidSymbol(l.clone()))
        };
        let mut words: Vec<Vec<usize>> = Vec::with_capacity(forbidden.len());
        for w in forbidden {
            if w.is_empty() {
                return Err(Error::InvalidParameter("empty forbidden word".into()));
            }
            words.push(w.iter().map(index).collect::<Result<_>>()?);
        }
        let max_len = words.iter().map(Vec::len).max().unwrap_or(1);
        let block_len = max_len.saturating_sub(1).max(1);
        let q = alphabet.len();
        let avoids = |w: &[usize]| -> bool {
            // only factors ending at the last position need checking
            words.iter().all(|f| f.len() > w.len() || !w.ends_with(f))
        };

        // vertices: words of length block_len all of whose factors are allowed
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..block_len {
            let mut next = Vec::new();
            for b in &blocks {
                for s in 0..q {
                    let mut w = b.clone();
                    w.push(s);
                    if avoids(&w) {
                        next.push(w);
                    }
                }
            }
            blocks = next;
        }
        let joiner = if alphabet.iter().all(|l| l.chars().count() == 1) {
            ""
        } else {
            "+"
        };
        let labels: Vec<String> = blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&s| alphabet[s].as_str())
                    .collect::<Vec<_>>()
                    .join(joiner)
            })
            .collect();
        let lookup: rustc_hash::FxHashMap<&[usize], usize> = blocks
            .iter()
            .enumerate()
            .map(|(i, b)| (b.as_slice(), i))
            .collect();
        let mut succ = vec![BTreeSet::new(); blocks.len()];
        for (i, b) in blocks.iter().enumerate() {
            for s in 0..q {
                let mut w = b.clone();
                w.push(s);
                if !avoids(&w) {
                    continue;
                }
                if let Some(&j) = lookup.get(&w[1..]) {
                    succ[i].insert(j);
                }
            }
        }
        let (sft, pruned) = essentialize(labels, succ);
        Ok(Sft {
            provenance: Some(Provenance {
                alphabet: alphabet.to_vec(),
                forbidden: forbidden.to_vec(),
                block_len,
                pruned,
            }),
            ..sft
        })
    }

    /// The full shift on `q` symbols labelled `0..q`.
    pub fn full_shift(q: usize) -> Sft {
        let labels = (0..q).map(|i| i.to_string()).collect();
        let edges: Vec<_> = (0..q).flat_map(|a| (0..q).map(move |b| (a, b))).collect();
        Sft::from_transitions(labels, &edges).expect("full shift")
    }

    /// The golden-mean shift: binary sequences without `11`.
    pub fn golden_mean() -> Sft {
        Sft::from_transitions(vec!["0".into(), "1".into()], &[(0, 0), (0, 1), (1, 0)])
            .expect("golden mean")
    }

    pub fn num_symbols(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, s: Sym) -> &str {
        &self.labels[s as usize]
    }

    pub fn symbol(&self, label: &str) -> Option<Sym> {
        self.labels.iter().position(|l| l == label).map(|i| i as Sym)
    }

    pub fn successors(&self, s: Sym) -> &[Sym] {
        &self.succ[s as usize]
    }

    pub fn predecessors(&self, s: Sym) -> &[Sym] {
        &self.pred[s as usize]
    }

    pub fn has_edge(&self, a: Sym, b: Sym) -> bool {
        self.succ[a as usize].binary_search(&b).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Sym, Sym)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, bs)| bs.iter().map(move |&b| (a as Sym, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn is_admissible(&self, word: &[Sym]) -> bool {
        word.iter().all(|&s| (s as usize) < self.labels.len())
            && word.windows(2).all(|w| self.has_edge(w[0], w[1]))
    }

    /// True when every label is a single character, so words can be written
    /// without separators.
    pub fn single_char_labels(&self) -> bool {
        self.single_char
    }

    /// Parses a word: one character per symbol when all labels are single
    /// characters, otherwise labels separated by `.`.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Sym>> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Vec::new());
        }
        let pieces: Vec<String> = if text.contains('.') || !self.single_char {
            text.split('.').map(|p| p.trim().to_string()).collect()
        } else {
            text.chars().map(|c| c.to_string()).collect()
        };
        pieces
            .iter()
            .map(|p| self.symbol(p).ok_or_else(|| Error::InvalidSymbol(p.clone())))
            .collect()
    }

    pub fn format_word(&self, word: &[Sym]) -> String {
        let sep = if self.single_char { "" } else { "." };
        word.iter()
            .map(|&s| self.label(s))
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// `table[k][s]` = number of admissible words of length `k + 1` starting
    /// with `s`, saturating.
    pub(crate) fn forward_path_counts(&self, max_len: usize) -> Vec<Vec<u128>> {
        let q = self.num_symbols();
        let mut table = vec![vec![1u128; q]];
        for k in 1..max_len {
            let prev = &table[k - 1];
            let row = (0..q)
                .map(|s| {
                    self.succ[s]
                        .iter()
                        .fold(0u128, |acc, &t| acc.saturating_add(prev[t as usize]))
                })
                .collect();
            table.push(row);
        }
        table
    }

    /// `table[k][s]` = number of admissible words of length `k + 1` ending
    /// with `s`, saturating.
    pub(crate) fn backward_path_counts(&self, max_len: usize) -> Vec<Vec<u128>> {
        let q = self.num_symbols();
        let mut table = vec![vec![1u128; q]];
        for k in 1..max_len {
            let prev = &table[k - 1];
            let row = (0..q)
                .map(|s| {
                    self.pred[s]
                        .iter()
                        .fold(0u128, |acc, &t| acc.saturating_add(prev[t as usize]))
                })
                .collect();
            table.push(row);
        }
        table
    }

    /// Number of admissible words of length `len`.
    pub fn count_words(&self, len: usize) -> u128 {
        if len == 0 {
            return 1;
        }
        self.forward_path_counts(len)[len - 1]
            .iter()
            .fold(0u128, |a, &b| a.saturating_add(b))
    }

    /// Every admissible word of length `len`, lexicographically.
    pub fn words(&self, len: usize) -> Vec<Vec<Sym>> {
        let mut out = Vec::new();
        if len == 0 {
            out.push(Vec::new());
            return out;
        }
        let mut cur = Vec::with_capacity(len);
        for s in 0..self.num_symbols() as Sym {
            cur.push(s);
            self.extend_words(&mut cur, len, &mut out);
            cur.pop();
        }
        out
    }

    fn extend_words(&self, cur: &mut Vec<Sym>, len: usize, out: &mut Vec<Vec<Sym>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let last = *cur.last().unwrap();
        for &t in self.successors(last) {
            cur.push(t);
            self.extend_words(cur, len, out);
            cur.pop();
        }
    }
}

impl fmt::Display for Sft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sft({} symbols, {} edges)", self.num_symbols(), self.edge_count())
    }
}

/// Iteratively removes sources and sinks; returns the re-indexed shift and the
/// labels that were dropped.
fn essentialize(labels: Vec<String>, succ: Vec<BTreeSet<usize>>) -> (Sft, Vec<String>) {
    let q = labels.len();
    let mut alive = vec![true; q];
    let mut outdeg: Vec<usize> = succ.iter().map(BTreeSet::len).collect();
    let mut indeg = vec![0usize; q];
    let mut pred = vec![Vec::new(); q];
    for (a, bs) in succ.iter().enumerate() {
        for &b in bs {
            indeg[b] += 1;
            pred[b].push(a);
        }
    }
    let mut stack: Vec<usize> = (0..q).filter(|&v| outdeg[v] == 0 || indeg[v] == 0).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &b in &succ[v] {
            if alive[b] {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    stack.push(b);
                }
            }
        }
        for &a in &pred[v] {
            if alive[a] {
                outdeg[a] -= 1;
                if outdeg[a] == 0 {
                    stack.push(a);
                }
            }
        }
    }
    let mut new_index = vec![usize::MAX; q];
    let mut new_labels = Vec::new();
    let mut pruned = Vec::new();
    for v in 0..q {
        if alive[v] {
            new_index[v] = new_labels.len();
            new_labels.push(labels[v].clone());
        } else {
            pruned.push(labels[v].clone());
        }
    }
    let n = new_labels.len();
    let mut new_succ = vec![Vec::new(); n];
    let mut new_pred = vec![Vec::new(); n];
    for v in 0..q {
        if !alive[v] {
            continue;
        }
        for &b in &succ[v] {
            if alive[b] {
                new_succ[new_index[v]].push(new_index[b] as Sym);
                new_pred[new_index[b]].push(new_index[v] as Sym);
            }
        }
    }
    for p in &mut new_pred {
        p.sort_unstable();
    }
    let single_char = new_labels.iter().all(|l| l.chars().count() == 1);
    (
        Sft {
            labels: new_labels,
            succ: new_succ,
            pred: new_pred,
            provenance: None,
            single_char,
        },
        pruned,
    )
}
