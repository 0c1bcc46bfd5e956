use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::castles::{Castle, Tower};
use crate::error::{Error, Result};
use crate::shiftspace::{ClopenSet, Diagram, PeriodicOrbit, Sft, Sym};

use super::expr::parse_clopen;

/// A clopen set in a file, tagged by `format`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "format", rename_all = "lowercase")]
pub enum SetDump {
    /// Every admissible word of the set on `[start, start + len - 1]`.
    Words { start: i64, len: usize, words: Vec<String> },
    /// A clopen expression.
    Expr { expr: String },
    /// The decision diagram of the set.
    Diagram {
        start: i64,
        len: usize,
        root: u32,
        nodes: Vec<(u32, Vec<(Sym, u32)>)>,
    },
}

/// Word list when the set has at most `word_limit` words, diagram otherwise.
pub fn dump_set(set: &ClopenSet, word_limit: usize) -> SetDump {
    let set = &set.tighten();
    let (a, b) = set.window();
    match set.words(word_limit) {
        Some(ws) => SetDump::Words {
            start: a,
            len: (b - a + 1) as usize,
            words: ws.iter().map(|w| set.space().format_word(w)).collect(),
        },
        None => {
            let d = set.to_diagram();
            SetDump::Diagram {
                start: d.start,
                len: d.len,
                root: d.root,
                nodes: d.nodes,
            }
        }
    }
}

pub fn load_set(space: &Arc<Sft>, dump: &SetDump) -> Result<ClopenSet> {
    match dump {
        SetDump::Words { start, len, words } => {
            let ws = words
                .iter()
                .map(|w| space.parse_word(w))
                .collect::<Result<Vec<_>>>()?;
            if let Some(w) = ws.iter().find(|w| w.len() != *len) {
                return Err(Error::InvalidParameter(format!(
                    "word `{}` does not have length {len}",
                    space.format_word(w)
                )));
            }
            if ws.is_empty() {
                return Ok(ClopenSet::empty(space));
            }
            ClopenSet::from_words(space, *start, *len, &ws)
        }
        SetDump::Expr { expr } => parse_clopen(space, expr),
        SetDump::Diagram { start, len, root, nodes } => ClopenSet::from_diagram(
            space,
            &Diagram {
                start: *start,
                len: *len,
                root: *root,
                nodes: nodes.clone(),
            },
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerEntry {
    pub height: usize,
    /// Label of the periodic orbit the tower was built around.
    pub orbit: Option<String>,
    pub base: SetDump,
}

/// Castle file contents. `alphabet` guards against loading a castle over
/// the wrong space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CastleFile {
    pub alphabet: Vec<String>,
    pub n: Option<usize>,
    pub depth: Option<usize>,
    pub partition: bool,
    pub towers: Vec<TowerEntry>,
}

/// Bases with at most this many words are written word by word.
const DUMP_WORDS: usize = 256;

pub fn castle_to_file(c: &Castle) -> CastleFile {
    CastleFile {
        alphabet: c.space().labels().to_vec(),
        n: c.n,
        depth: c.depth,
        partition: c.is_partition,
        towers: c
            .towers
            .iter()
            .map(|t| TowerEntry {
                height: t.height,
                orbit: t.orbit.as_ref().map(|o| o.label().to_string()),
                base: dump_set(&t.base, DUMP_WORDS),
            })
            .collect(),
    }
}

pub fn castle_from_file(space: &Arc<Sft>, f: &CastleFile) -> Result<Castle> {
    if f.alphabet != space.labels() {
        return Err(Error::SpaceMismatch);
    }
    let mut towers = Vec::with_capacity(f.towers.len());
    for t in &f.towers {
        if t.height == 0 {
            return Err(Error::InvalidParameter("tower height must be positive".into()));
        }
        let orbit = match &t.orbit {
            None => None,
            Some(label) => Some(
                PeriodicOrbit::new(space, &space.parse_word(label)?)
                    .ok_or_else(|| Error::InvalidParameter(format!("`{label}` is not a periodic orbit")))?,
            ),
        };
        towers.push(Tower {
            base: load_set(space, &t.base)?,
            height: t.height,
            orbit,
        });
    }
    let mut c = Castle::new(space, towers);
    c.n = f.n;
    c.depth = f.depth;
    c.is_partition = f.partition;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::castles::kakutani_rokhlin;

    #[test]
    fn kr_round_trip() {
        let g = Arc::new(Sft::golden_mean());
        let zero = ClopenSet::cylinder(&g, &[0], 0).unwrap();
        let c = kakutani_rokhlin(&zero).unwrap();
        let text = serde_json::to_string(&castle_to_file(&c)).unwrap();
        let back = castle_from_file(&g, &serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.towers.len(), 2);
        for (x, y) in c.towers.iter().zip(&back.towers) {
            assert!(x.base.equals(&y.base).unwrap());
            assert_eq!(x.height, y.height);
        }
        assert!(back.verify().unwrap().pass);
    }

    #[test]
    fn diagram_dump_round_trip() {
        let g = Arc::new(Sft::golden_mean());
        let set = parse_clopen(&g, "([0]@0 & ~[1]@3) | T^2([10]@0)").unwrap();
        let dump = dump_set(&set, 0);
        assert!(matches!(dump, SetDump::Diagram { .. }));
        assert!(load_set(&g, &dump).unwrap().equals(&set).unwrap());
    }
}
