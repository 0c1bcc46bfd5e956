//! Layered decision diagrams over fixed-length words.
//!
//! A diagram of length `len` denotes a set of words of that length. Node `0`
//! is the empty set and node `1` accepts every continuation, at any depth.
//! Internal nodes carry a sorted list of explicit edges and a default child
//! for every other symbol. Diagrams are not required to exclude inadmissible
//! words: the clopen set they describe is always the intersection with the
//! admissible words of the ambient shift, and every query below takes that
//! intersection into account.

use rustc_hash::{FxHashMap, FxHashSet};

use super::sft::{Sft, Sym};

pub(crate) type NodeId = u32;

/// A node and its labelled edges, as written by `export`.
pub(crate) type ExportedNode = (NodeId, Vec<(Sym, NodeId)>);
pub(crate) const EMPTY: NodeId = 0;
pub(crate) const FULL: NodeId = 1;
const NONE: Sym = Sym::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Node {
    pub(crate) default: NodeId,
    pub(crate) edges: Box<[(Sym, NodeId)]>,
}

#[derive(Debug, Clone)]
pub(crate) struct Dd {
    nodes: Vec<Node>,
    root: NodeId,
    len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Op {
    And,
    Or,
    Diff,
}

pub(crate) struct Builder {
    nodes: Vec<Node>,
    unique: FxHashMap<Node, NodeId>,
    q: usize,
}

impl Builder {
    pub(crate) fn new(q: usize) -> Self {
        let dummy = Node {
            default: EMPTY,
            edges: Box::new([]),
        };
        Builder {
            nodes: vec![dummy.clone(), dummy],
            unique: FxHashMap::default(),
            q,
        }
    }

    /// `edges` must be sorted by symbol with no duplicates.
    pub(crate) fn mk(&mut self, default: NodeId, mut edges: Vec<(Sym, NodeId)>) -> NodeId {
        let mut default = default;
        if self.q > 0 && edges.len() == self.q {
            let first = edges[0].1;
            if edges.iter().all(|e| e.1 == first) {
                edges.clear();
                default = first;
            } else if default != EMPTY {
                default = EMPTY;
            }
        }
        edges.retain(|e| e.1 != default);
        if edges.is_empty() && (default == EMPTY || default == FULL) {
            return default;
        }
        let node = Node {
            default,
            edges: edges.into_boxed_slice(),
        };
        if let Some(&id) = self.unique.get(&node) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node.clone());
        self.unique.insert(node, id);
        id
    }

    pub(crate) fn finish(self, root: NodeId, len: usize) -> Dd {
        Dd {
            nodes: self.nodes,
            root,
            len,
        }
    }
}

impl Dd {
    pub(crate) fn constant(len: usize, full: bool) -> Dd {
        Builder::new(0).finish(if full { FULL } else { EMPTY }, len)
    }

    /// Words whose letters at `offset..offset + word.len()` spell `word`.
    pub(crate) fn cylinder(len: usize, offset: usize, word: &[Sym], q: usize) -> Dd {
        assert!(offset + word.len() <= len);
        let mut b = Builder::new(q);
        let mut cur = FULL;
        for &s in word.iter().rev() {
            cur = b.mk(EMPTY, vec![(s, cur)]);
        }
        for _ in 0..offset {
            cur = b.mk(cur, Vec::new());
        }
        b.finish(cur, len)
    }

    /// Union of the given words, all of length `len`.
    pub(crate) fn from_words<'w>(len: usize, words: impl IntoIterator<Item = &'w [Sym]>, q: usize) -> Dd {
        let mut sorted: Vec<&[Sym]> = words.into_iter().collect();
        sorted.sort_unstable();
        sorted.dedup();
        let mut b = Builder::new(q);
        let root = build_trie(&mut b, &sorted, 0, len);
        b.finish(root, len)
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    pub(crate) fn node_count(&self) -> usize {
        self.nodes.len() - 2
    }

    pub(crate) fn node(&self, n: NodeId) -> &Node {
        &self.nodes[n as usize]
    }

    #[inline]
    pub(crate) fn child(&self, n: NodeId, s: Sym) -> NodeId {
        if n <= FULL {
            return n;
        }
        let node = &self.nodes[n as usize];
        match node.edges.binary_search_by_key(&s, |e| e.0) {
            Ok(i) => node.edges[i].1,
            Err(_) => node.default,
        }
    }

    /// Reachable internal nodes, children before parents, renumbered from
    /// `2`, together with the new root.
    pub(crate) fn export(&self) -> (NodeId, Vec<ExportedNode>) {
        fn visit(dd: &Dd, n: NodeId, map: &mut FxHashMap<NodeId, NodeId>, out: &mut Vec<ExportedNode>) -> NodeId {
            if n <= FULL {
                return n;
            }
            if let Some(&m) = map.get(&n) {
                return m;
            }
            let node = dd.node(n);
            let default = visit(dd, node.default, map, out);
            let edges = node.edges.iter().map(|&(s, c)| (s, visit(dd, c, map, out))).collect();
            out.push((default, edges));
            let id = out.len() as NodeId + 1;
            map.insert(n, id);
            id
        }
        let mut out = Vec::new();
        let root = visit(self, self.root, &mut FxHashMap::default(), &mut out);
        (root, out)
    }

    /// Inverse of [`Dd::export`]; rejects forward references, unknown
    /// symbols and paths longer than `len`.
    pub(crate) fn import_nodes(
        q: usize,
        len: usize,
        root: NodeId,
        nodes: &[(NodeId, Vec<(Sym, NodeId)>)],
    ) -> std::result::Result<Dd, String> {
        let mut b = Builder::new(q);
        let mut ids: Vec<NodeId> = vec![EMPTY, FULL];
        for (k, (default, edges)) in nodes.iter().enumerate() {
            let me = k + 2;
            let resolve = |c: NodeId| -> std::result::Result<NodeId, String> {
                if (c as usize) < me {
                    Ok(ids[c as usize])
                } else {
                    Err(format!("node {me} refers to node {c}, which is not defined before it"))
                }
            };
            let mut es = Vec::with_capacity(edges.len());
            for &(s, c) in edges {
                if s as usize >= q {
                    return Err(format!("node {me} uses symbol {s} outside the alphabet"));
                }
                es.push((s, resolve(c)?));
            }
            es.sort_unstable_by_key(|e| e.0);
            if es.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(format!("node {me} has two edges for one symbol"));
            }
            let d = resolve(*default)?;
            ids.push(b.mk(d, es));
        }
        if root as usize >= ids.len() {
            return Err(format!("root {root} is not a node"));
        }
        let dd = b.finish(ids[root as usize], len);
        if dd.root > FULL && height(&dd, dd.root, &mut FxHashMap::default()) > len {
            return Err(format!("diagram is deeper than its window length {len}"));
        }
        Ok(dd)
    }

    pub(crate) fn is_trivially_empty(&self) -> bool {
        self.root == EMPTY
    }

    pub(crate) fn is_trivially_full(&self) -> bool {
        self.root == FULL
    }

    /// Same set viewed on a window with `pre` extra letters in front and
    /// `post` after.
    pub(crate) fn extend(&self, pre: usize, post: usize, q: usize) -> Dd {
        if pre == 0 {
            return Dd {
                nodes: self.nodes.clone(),
                root: self.root,
                len: self.len + post,
            };
        }
        let mut b = Builder::new(q);
        let mut imp = FxHashMap::default();
        let mut cur = import(&mut b, self, self.root, &mut imp);
        for _ in 0..pre {
            cur = b.mk(cur, Vec::new());
        }
        b.finish(cur, self.len + pre + post)
    }

    /// Drops leading positions that every node ignores and trailing positions
    /// past the deepest internal node. Returns the number of leading positions
    /// removed.
    pub(crate) fn trim(&mut self) -> usize {
        let mut lead = 0;
        while self.root > FULL && self.len > 1 {
            let node = &self.nodes[self.root as usize];
            if !node.edges.is_empty() {
                break;
            }
            self.root = node.default;
            self.len -= 1;
            lead += 1;
        }
        if self.root > FULL {
            let mut memo = FxHashMap::default();
            let h = height(self, self.root, &mut memo);
            self.len = h.min(self.len);
        }
        lead
    }

    pub(crate) fn apply(&self, other: &Dd, op: Op, q: usize) -> Dd {
        assert_eq!(self.len, other.len, "apply on misaligned diagrams");
        let mut ap = Apply {
            a: self,
            b: other,
            op,
            out: Builder::new(q),
            memo: FxHashMap::default(),
            imp_a: FxHashMap::default(),
            imp_b: FxHashMap::default(),
            comp_b: FxHashMap::default(),
        };
        let root = ap.go(self.root, other.root);
        ap.out.finish(root, self.len)
    }

    pub(crate) fn complement(&self, q: usize) -> Dd {
        let mut b = Builder::new(q);
        let mut memo = FxHashMap::default();
        let root = import_complement(&mut b, self, self.root, &mut memo);
        b.finish(root, self.len)
    }

    /// Membership of a word of length `len`, ignoring admissibility.
    pub(crate) fn accepts(&self, word: impl IntoIterator<Item = Sym>) -> bool {
        let mut n = self.root;
        for s in word {
            if n <= FULL {
                break;
            }
            n = self.child(n, s);
        }
        n == FULL
    }

    pub(crate) fn is_empty(&self, sft: &Sft) -> bool {
        if sft.is_empty() || self.root == EMPTY {
            return true;
        }
        !Alive::new(self, sft).alive(self.root, NONE)
    }

    /// Lexicographically least admissible word in the set.
    pub(crate) fn witness(&self, sft: &Sft) -> Option<Vec<Sym>> {
        if self.is_empty(sft) {
            return None;
        }
        let mut alive = Alive::new(self, sft);
        let mut word = Vec::with_capacity(self.len);
        let mut n = self.root;
        let mut last = NONE;
        while word.len() < self.len {
            let next = candidates(sft, last)
                .find(|&s| alive.alive(self.child(n, s), s))
                .expect("alive node has an alive child");
            n = self.child(n, next);
            last = next;
            word.push(next);
        }
        Some(word)
    }

    /// Number of admissible words on the window extended by `pre` letters in
    /// front and `post` letters after (saturating).
    pub(crate) fn count_extended(&self, sft: &Sft, pre: usize, post: usize) -> u128 {
        if sft.is_empty() || self.root == EMPTY || self.len == 0 {
            return 0;
        }
        let total = self.len + pre + post;
        let fwd = sft.forward_path_counts(total);
        let bwd = sft.backward_path_counts(pre + 1);
        let mut c = Counter {
            dd: self,
            sft,
            fwd: &fwd,
            post,
            memo: FxHashMap::default(),
        };
        let mut sum = 0u128;
        for s in 0..sft.num_symbols() as Sym {
            let left = bwd[pre][s as usize];
            let inner = c.count(self.child(self.root, s), 1, s);
            sum = sum.saturating_add(left.saturating_mul(inner));
        }
        sum
    }

    /// Admissible words in the set, lexicographically; `None` when there are
    /// more than `limit`.
    pub(crate) fn words(&self, sft: &Sft, limit: usize) -> Option<Vec<Vec<Sym>>> {
        let mut out = Vec::new();
        if self.is_empty(sft) {
            return Some(out);
        }
        let mut alive = Alive::new(self, sft);
        let mut cur = Vec::with_capacity(self.len);
        if enumerate(self, sft, &mut alive, self.root, NONE, &mut cur, &mut out, limit) {
            Some(out)
        } else {
            None
        }
    }

    /// Restrictions to relative positions `from..to` of the admissible words
    /// in the set.
    pub(crate) fn project(&self, sft: &Sft, from: usize, to: usize) -> Dd {
        assert!(from <= to && to <= self.len);
        let q = sft.num_symbols();
        if self.is_empty(sft) {
            return Dd::constant(to - from, false);
        }
        let mut alive = Alive::new(self, sft);
        // admissible alive states reached after `from` letters
        let mut frontier: Vec<(NodeId, Sym)> = vec![(self.root, NONE)];
        for _ in 0..from {
            let mut next = FxHashSet::default();
            for &(n, last) in &frontier {
                for s in candidates(sft, last) {
                    let c = self.child(n, s);
                    if alive.alive(c, s) {
                        next.insert((c, s));
                    }
                }
            }
            frontier = next.into_iter().collect();
            frontier.sort_unstable();
        }
        let mut p = Projector {
            dd: self,
            sft,
            alive,
            end: to - from,
            out: Builder::new(q),
            memo: FxHashMap::default(),
        };
        let root = p.build(0, frontier);
        p.out.finish(root, to - from)
    }
}

fn height(dd: &Dd, n: NodeId, memo: &mut FxHashMap<NodeId, usize>) -> usize {
    if n <= FULL {
        return 0;
    }
    if let Some(&h) = memo.get(&n) {
        return h;
    }
    let node = dd.node(n);
    let mut h = height(dd, node.default, memo);
    for &(_, c) in node.edges.iter() {
        h = h.max(height(dd, c, memo));
    }
    memo.insert(n, h + 1);
    h + 1
}

fn build_trie(b: &mut Builder, words: &[&[Sym]], depth: usize, len: usize) -> NodeId {
    if words.is_empty() {
        return EMPTY;
    }
    if depth == len {
        return FULL;
    }
    let mut edges = Vec::new();
    let mut i = 0;
    while i < words.len() {
        let s = words[i][depth];
        let mut j = i;
        while j < words.len() && words[j][depth] == s {
            j += 1;
        }
        let child = build_trie(b, &words[i..j], depth + 1, len);
        edges.push((s, child));
        i = j;
    }
    b.mk(EMPTY, edges)
}

fn candidates(sft: &Sft, last: Sym) -> Box<dyn Iterator<Item = Sym> + '_> {
    if last == NONE {
        Box::new(0..sft.num_symbols() as Sym)
    } else {
        Box::new(sft.successors(last).iter().copied())
    }
}

fn import(b: &mut Builder, src: &Dd, n: NodeId, memo: &mut FxHashMap<NodeId, NodeId>) -> NodeId {
    if n <= FULL {
        return n;
    }
    if let Some(&r) = memo.get(&n) {
        return r;
    }
    let node = src.node(n).clone();
    let default = import(b, src, node.default, memo);
    let edges = node
        .edges
        .iter()
        .map(|&(s, c)| (s, import(b, src, c, memo)))
        .collect();
    let r = b.mk(default, edges);
    memo.insert(n, r);
    r
}

fn import_complement(
    b: &mut Builder,
    src: &Dd,
    n: NodeId,
    memo: &mut FxHashMap<NodeId, NodeId>,
) -> NodeId {
    match n {
        EMPTY => return FULL,
        FULL => return EMPTY,
        _ => {}
    }
    if let Some(&r) = memo.get(&n) {
        return r;
    }
    let node = src.node(n).clone();
    let default = import_complement(b, src, node.default, memo);
    let edges = node
        .edges
        .iter()
        .map(|&(s, c)| (s, import_complement(b, src, c, memo)))
        .collect();
    let r = b.mk(default, edges);
    memo.insert(n, r);
    r
}

struct Apply<'a> {
    a: &'a Dd,
    b: &'a Dd,
    op: Op,
    out: Builder,
    memo: FxHashMap<(NodeId, NodeId), NodeId>,
    imp_a: FxHashMap<NodeId, NodeId>,
    imp_b: FxHashMap<NodeId, NodeId>,
    comp_b: FxHashMap<NodeId, NodeId>,
}

impl Apply<'_> {
    fn go(&mut self, x: NodeId, y: NodeId) -> NodeId {
        match self.op {
            Op::And => {
                if x == EMPTY || y == EMPTY {
                    return EMPTY;
                }
                if x == FULL {
                    return import(&mut self.out, self.b, y, &mut self.imp_b);
                }
                if y == FULL {
                    return import(&mut self.out, self.a, x, &mut self.imp_a);
                }
            }
            Op::Or => {
                if x == FULL || y == FULL {
                    return FULL;
                }
                if x == EMPTY {
                    return import(&mut self.out, self.b, y, &mut self.imp_b);
                }
                if y == EMPTY {
                    return import(&mut self.out, self.a, x, &mut self.imp_a);
                }
            }
            Op::Diff => {
                if x == EMPTY || y == FULL {
                    return EMPTY;
                }
                if y == EMPTY {
                    return import(&mut self.out, self.a, x, &mut self.imp_a);
                }
                if x == FULL {
                    return import_complement(&mut self.out, self.b, y, &mut self.comp_b);
                }
            }
        }
        if let Some(&r) = self.memo.get(&(x, y)) {
            return r;
        }
        let na = self.a.node(x).clone();
        let nb = self.b.node(y).clone();
        let mut edges = Vec::with_capacity(na.edges.len() + nb.edges.len());
        let (mut i, mut j) = (0, 0);
        while i < na.edges.len() || j < nb.edges.len() {
            let sa = na.edges.get(i).map(|e| e.0).unwrap_or(Sym::MAX);
            let sb = nb.edges.get(j).map(|e| e.0).unwrap_or(Sym::MAX);
            let s = sa.min(sb);
            let ca = if sa == s {
                i += 1;
                na.edges[i - 1].1
            } else {
                na.default
            };
            let cb = if sb == s {
                j += 1;
                nb.edges[j - 1].1
            } else {
                nb.default
            };
            let r = self.go(ca, cb);
            edges.push((s, r));
        }
        let default = self.go(na.default, nb.default);
        let r = self.out.mk(default, edges);
        self.memo.insert((x, y), r);
        r
    }
}

pub(crate) struct Alive<'a> {
    dd: &'a Dd,
    sft: &'a Sft,
    memo: FxHashMap<(NodeId, Sym), bool>,
}

impl<'a> Alive<'a> {
    pub(crate) fn new(dd: &'a Dd, sft: &'a Sft) -> Self {
        Alive {
            dd,
            sft,
            memo: FxHashMap::default(),
        }
    }

    /// Whether some admissible continuation after `last` is accepted from `n`.
    pub(crate) fn alive(&mut self, n: NodeId, last: Sym) -> bool {
        match n {
            EMPTY => return false,
            FULL => return !self.sft.is_empty(),
            _ => {}
        }
        if let Some(&r) = self.memo.get(&(n, last)) {
            return r;
        }
        let mut r = false;
        let cands: Vec<Sym> = candidates(self.sft, last).collect();
        for s in cands {
            let c = self.dd.child(n, s);
            if self.alive(c, s) {
                r = true;
                break;
            }
        }
        self.memo.insert((n, last), r);
        r
    }
}

struct Counter<'a> {
    dd: &'a Dd,
    sft: &'a Sft,
    fwd: &'a [Vec<u128>],
    post: usize,
    memo: FxHashMap<(NodeId, usize, Sym), u128>,
}

impl Counter<'_> {
    /// Continuations of `k` letters after `last`.
    fn tail(&self, last: Sym, k: usize) -> u128 {
        if k == 0 {
            return 1;
        }
        self.sft
            .successors(last)
            .iter()
            .fold(0u128, |a, &t| a.saturating_add(self.fwd[k - 1][t as usize]))
    }

    fn count(&mut self, n: NodeId, depth: usize, last: Sym) -> u128 {
        match n {
            EMPTY => return 0,
            FULL => return self.tail(last, self.dd.len - depth + self.post),
            _ => {}
        }
        if let Some(&r) = self.memo.get(&(n, depth, last)) {
            return r;
        }
        let mut sum = 0u128;
        for &t in self.sft.successors(last) {
            let c = self.dd.child(n, t);
            sum = sum.saturating_add(self.count(c, depth + 1, t));
        }
        self.memo.insert((n, depth, last), sum);
        sum
    }
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    dd: &Dd,
    sft: &Sft,
    alive: &mut Alive<'_>,
    n: NodeId,
    last: Sym,
    cur: &mut Vec<Sym>,
    out: &mut Vec<Vec<Sym>>,
    limit: usize,
) -> bool {
    if cur.len() == dd.len {
        if out.len() >= limit {
            return false;
        }
        out.push(cur.clone());
        return true;
    }
    let cands: Vec<Sym> = candidates(sft, last).collect();
    for s in cands {
        let c = dd.child(n, s);
        if !alive.alive(c, s) {
            continue;
        }
        cur.push(s);
        let ok = enumerate(dd, sft, alive, c, s, cur, out, limit);
        cur.pop();
        if !ok {
            return false;
        }
    }
    true
}

struct Projector<'a> {
    dd: &'a Dd,
    sft: &'a Sft,
    alive: Alive<'a>,
    end: usize,
    out: Builder,
    memo: FxHashMap<(usize, Vec<(NodeId, Sym)>), NodeId>,
}

impl Projector<'_> {
    fn build(&mut self, depth: usize, frontier: Vec<(NodeId, Sym)>) -> NodeId {
        if frontier.is_empty() {
            return EMPTY;
        }
        if depth == self.end {
            return FULL;
        }
        // after the first projected letter all states share their last symbol,
        // and the ambient admissibility then supplies the rest
        let shared_last = frontier.iter().all(|f| f.1 == frontier[0].1 && f.1 != NONE);
        if shared_last && frontier.iter().any(|f| f.0 == FULL) {
            return FULL;
        }
        let key = (depth, frontier);
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let frontier = key.1.clone();
        let mut syms: Vec<Sym> = Vec::new();
        let mut seen = FxHashSet::default();
        for &(_, last) in &frontier {
            for s in candidates(self.sft, last) {
                if seen.insert(s) {
                    syms.push(s);
                }
            }
        }
        syms.sort_unstable();
        let mut edges = Vec::new();
        for s in syms {
            let mut next: Vec<(NodeId, Sym)> = Vec::new();
            for &(n, last) in &frontier {
                if last != NONE && !self.sft.has_edge(last, s) {
                    continue;
                }
                let c = self.dd.child(n, s);
                if self.alive.alive(c, s) {
                    next.push((c, s));
                }
            }
            next.sort_unstable();
            next.dedup();
            let child = self.build(depth + 1, next);
            if child != EMPTY {
                edges.push((s, child));
            }
        }
        let r = self.out.mk(EMPTY, edges);
        self.memo.insert(key, r);
        r
    }
}
