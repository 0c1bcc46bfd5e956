//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

pub mod numeric;

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qc_core::io::parse_clopen;
use qc_core::shiftspace::{ClopenSet, EventuallyPeriodicPoint, Sft, Sym};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn golden() -> Arc<Sft> {
    Arc::new(Sft::golden_mean())
}

/// `a -> b -> c -> a` with a detour `b -> d -> c`: no periodic orbit of
/// period below 3.
pub fn no_short_period_sft() -> Arc<Sft> {
    let labels = ["a", "b", "c", "d"].map(String::from).to_vec();
    Arc::new(Sft::from_transitions(labels, &[(0, 1), (1, 2), (2, 0), (1, 3), (3, 2)]).unwrap())
}

/// A nonempty SFT on at most 4 symbols given by random forbidden words of
/// length at most 3.
pub fn random_forbidden_sft(rng: &mut ChaCha8Rng) -> Arc<Sft> {
    loop {
        let q = rng.random_range(1..=4usize);
        let alphabet: Vec<String> = (0..q).map(|i| i.to_string()).collect();
        let count = rng.random_range(0..=4usize);
        let forbidden: Vec<Vec<String>> = (0..count)
            .map(|_| {
                let len = rng.random_range(1..=3usize);
                (0..len).map(|_| alphabet.choose(rng).unwrap().clone()).collect()
            })
            .collect();
        let sft = Sft::from_forbidden(&alphabet, &forbidden).unwrap();
        if !sft.is_empty() && sft.num_symbols() <= 12 {
            return Arc::new(sft);
        }
    }
}

/// A nonempty vertex shift on a random graph with `k` vertices.
pub fn random_graph_sft(rng: &mut ChaCha8Rng, k: usize, p: f64) -> Arc<Sft> {
    loop {
        let labels: Vec<String> = (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
        let mut edges = Vec::new();
        for a in 0..k {
            for b in 0..k {
                if rng.random_bool(p) {
                    edges.push((a, b));
                }
            }
        }
        let sft = Sft::from_transitions(labels, &edges).unwrap();
        if !sft.is_empty() {
            return Arc::new(sft);
        }
    }
}

/// Clopen expressions with an independent membership semantics.
#[derive(Debug, Clone)]
pub enum Expr {
    Cyl(Vec<Sym>, i64),
    Full,
    Empty,
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Minus(Box<Expr>, Box<Expr>),
    Shift(i64, Box<Expr>),
}

impl Expr {
    /// Membership of the point `x` (given on enough coordinates).
    pub fn holds(&self, x: &dyn Fn(i64) -> Sym) -> bool {
        match self {
            Expr::Cyl(w, p) => w.iter().enumerate().all(|(i, &s)| x(p + i as i64) == s),
            Expr::Full => true,
            Expr::Empty => false,
            Expr::Not(e) => !e.holds(x),
            Expr::And(a, b) => a.holds(x) && b.holds(x),
            Expr::Or(a, b) => a.holds(x) || b.holds(x),
            Expr::Minus(a, b) => a.holds(x) && !b.holds(x),
            // x ∈ T^n E iff T^{-n} x ∈ E, and (T^{-n} x)_i = x_{i-n}
            Expr::Shift(n, e) => e.holds(&|i| x(i - n)),
        }
    }

    pub fn ops(&self) -> usize {
        match self {
            Expr::Cyl(..) | Expr::Full | Expr::Empty => 0,
            Expr::Not(e) | Expr::Shift(_, e) => 1 + e.ops(),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Minus(a, b) => 1 + a.ops() + b.ops(),
        }
    }

    pub fn render(&self, space: &Sft) -> String {
        match self {
            Expr::Cyl(w, p) => format!("[{}]@{p}", space.format_word(w)),
            Expr::Full => "X".into(),
            Expr::Empty => "EMPTY".into(),
            Expr::Not(e) => format!("~({})", e.render(space)),
            Expr::And(a, b) => format!("({}) & ({})", a.render(space), b.render(space)),
            Expr::Or(a, b) => format!("({}) | ({})", a.render(space), b.render(space)),
            Expr::Minus(a, b) => format!("({}) \\ ({})", a.render(space), b.render(space)),
            Expr::Shift(n, e) => format!("T^{n}({})", e.render(space)),
        }
    }

    /// Built with the library operations directly.
    pub fn build(&self, space: &Arc<Sft>) -> ClopenSet {
        match self {
            Expr::Cyl(w, p) => ClopenSet::cylinder(space, w, *p).unwrap(),
            Expr::Full => ClopenSet::full(space),
            Expr::Empty => ClopenSet::empty(space),
            Expr::Not(e) => e.build(space).complement(),
            Expr::And(a, b) => a.build(space).intersect(&b.build(space)).unwrap(),
            Expr::Or(a, b) => a.build(space).union(&b.build(space)).unwrap(),
            Expr::Minus(a, b) => a.build(space).difference(&b.build(space)).unwrap(),
            Expr::Shift(n, e) => e.build(space).shift(*n),
        }
    }

    pub fn parse(&self, space: &Arc<Sft>) -> ClopenSet {
        parse_clopen(space, &self.render(space)).unwrap()
    }
}

/// A random admissible word of length `len`.
pub fn random_word(rng: &mut ChaCha8Rng, space: &Sft, len: usize) -> Vec<Sym> {
    let mut w = vec![rng.random_range(0..space.num_symbols() as Sym)];
    while w.len() < len {
        let next = *space.successors(*w.last().unwrap()).choose(rng).unwrap();
        w.push(next);
    }
    w
}

/// A random expression with at most `ops` operators whose membership only
/// reads coordinates in `[lo, hi]`.
pub fn random_expr(rng: &mut ChaCha8Rng, space: &Sft, ops: usize, lo: i64, hi: i64) -> Expr {
    if ops == 0 || rng.random_bool(0.2) {
        return match rng.random_range(0..20) {
            0 => Expr::Full,
            1 => Expr::Empty,
            _ => {
                let len = rng.random_range(1..=((hi - lo + 1) as usize).min(3));
                let p = rng.random_range(lo..=hi - len as i64 + 1);
                Expr::Cyl(random_word(rng, space, len), p)
            }
        };
    }
    match rng.random_range(0..5) {
        0 => Expr::Not(Box::new(random_expr(rng, space, ops - 1, lo, hi))),
        1 => {
            // inner coordinate j is read at outer coordinate j - n
            let n = rng.random_range(-3..=3i64);
            Expr::Shift(n, Box::new(random_expr(rng, space, ops - 1, lo + n, hi + n)))
        }
        k => {
            let left = rng.random_range(0..ops);
            let a = Box::new(random_expr(rng, space, left, lo, hi));
            let b = Box::new(random_expr(rng, space, ops - 1 - left, lo, hi));
            match k {
                2 => Expr::And(a, b),
                3 => Expr::Or(a, b),
                _ => Expr::Minus(a, b),
            }
        }
    }
}

/// Compares `set` with `expr` on every admissible word of `[lo, hi]`.
pub fn agrees_on_window(set: &ClopenSet, expr: &Expr, lo: i64, hi: i64) -> Result<(), String> {
    let space = set.space();
    let (a, b) = set.window();
    if !set.is_empty() && !set.is_full() && (a < lo || b > hi) {
        return Err(format!("set window [{a}, {b}] leaves [{lo}, {hi}]"));
    }
    let trivial = set.is_empty() || set.is_full();
    let set_on = if trivial { set.clone() } else { set.extend_to(lo, hi).map_err(|e| e.to_string())? };
    for w in space.words((hi - lo + 1) as usize) {
        let x = |i: i64| w[(i - lo) as usize];
        let want = expr.holds(&x);
        let got = if trivial { set.is_full() } else { set_on.contains_word_at(&w, lo) };
        if want != got {
            return Err(format!("word {} at {lo}: oracle {want}, set {got}", space.format_word(&w)));
        }
    }
    Ok(())
}

/// All primitive cycles of length below `n`, as least rotations, by brute force.
pub fn brute_orbits(space: &Sft, n: usize) -> BTreeSet<Vec<Sym>> {
    let mut out = BTreeSet::new();
    for p in 1..n {
        for w in space.words(p) {
            if !space.has_edge(w[p - 1], w[0]) {
                continue;
            }
            let primitive = (1..p).all(|d| p % d != 0 || (0..p).any(|i| w[i] != w[(i + d) % p]));
            if !primitive {
                continue;
            }
            let least = (0..p)
                .map(|r| (0..p).map(|i| w[(i + r) % p]).collect::<Vec<_>>())
                .min()
                .unwrap();
            out.insert(least);
        }
    }
    out
}

/// Whether every point of the orbit of the eventually periodic `x` lies in `s`.
pub fn orbit_inside(s: &ClopenSet, x: &EventuallyPeriodicPoint) -> bool {
    let (c0, c1) = x.core();
    let (a, b) = s.window();
    let span = (x.left.len() + x.right.len()) as i64 + (b - a + 1);
    (c0 - span - b..=c1 + span - a).all(|n| s.contains_point(&x.shift(n)))
}
