use std::sync::Arc;

use serde_json::{json, Value};

use super::castle_file::{dump_set, load_set, SetDump};
use super::expr::parse_clopen_at;
use super::strip_comment;
use crate::cocycle::{Cocycle, Values};
use crate::error::{Error, Result};
use crate::matperturb::{Field, Mat, C64};
use crate::shiftspace::{Sft, Sym};

/// Largest word set written out word by word in JSON pieces.
const DUMP_WORDS: usize = 256;

/// Matrix literal: rows of real numbers, or rows of `[re, im]` pairs.
pub fn matrix_from_json(field: Field, d: usize, v: &Value) -> std::result::Result<Mat, String> {
    let rows = v.as_array().ok_or("matrix must be an array of rows")?;
    if rows.len() != d {
        return Err(format!("expected {d} rows, found {}", rows.len()));
    }
    let mut entries = Vec::with_capacity(d * d);
    for row in rows {
        let row = row.as_array().ok_or("matrix rows must be arrays")?;
        if row.len() != d {
            return Err(format!("expected {d} entries per row, found {}", row.len()));
        }
        for x in row {
            let z = match x {
                Value::Number(n) => C64::new(n.as_f64().ok_or("entry out of range")?, 0.0),
                Value::Array(p) if p.len() == 2 => {
                    let re = p[0].as_f64().ok_or("complex entries are [re, im] number pairs")?;
                    let im = p[1].as_f64().ok_or("complex entries are [re, im] number pairs")?;
                    C64::new(re, im)
                }
                _ => return Err("entries are numbers or [re, im] pairs".into()),
            };
            if field == Field::Real && z.im != 0.0 {
                return Err("complex entry in a real matrix".into());
            }
            entries.push(z);
        }
    }
    match field {
        Field::Real => Mat::real(d, &entries.iter().map(|z| z.re).collect::<Vec<_>>()),
        Field::Complex => Mat::complex(d, &entries),
    }
    .map_err(|e| e.to_string())
}

pub fn matrix_to_json(a: &Mat) -> Value {
    let rows: Vec<Value> = a
        .rows()
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|z| match a.field() {
                    Field::Real => json!(z.re),
                    Field::Complex => json!([z.re, z.im]),
                })
                .collect()
        })
        .collect();
    Value::Array(rows)
}

/// Parses a cocycle file: JSON when the first non-blank character is `{`,
/// the text format otherwise.
///
/// ```text
/// field complex
/// dim 2
/// depth 0
/// format words
/// 0 : [[1, 0], [0, 1]]
/// * : [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]
/// ```
///
/// In `words` format each entry maps an admissible word of length
/// `2 depth + 1`, read on `[-depth, depth]`, to a matrix; `*` gives a value
/// for every word not listed. In `pieces` format each key is a clopen
/// expression and the pieces must partition the space.
pub fn parse_cocycle(space: &Arc<Sft>, text: &str) -> Result<Cocycle> {
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?;
        return cocycle_from_json(space, &v);
    }
    let mut field = None;
    let mut dim = None;
    let mut depth = None;
    let mut pieces_format = false;
    let mut default: Option<Mat> = None;
    let mut words: Vec<(Vec<Sym>, Mat)> = Vec::new();
    let mut pieces = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = strip_comment(raw);
        if body.trim().is_empty() {
            continue;
        }
        let indent = body.len() - body.trim_start().len();
        let col = body[..indent].chars().count() + 1;
        if let Some(sep) = body.find(':') {
            let (field, d) = match (field, dim) {
                (Some(f), Some(d)) => (f, d),
                _ => return Err(Error::parse(line, col, "`field` and `dim` must come before the entries")),
            };
            let key = body[..sep].trim();
            let after = &body[sep + 1..];
            let lead = after.len() - after.trim_start().len();
            let mcol = body[..sep + 1 + lead].chars().count() + 1;
            let v: Value = serde_json::from_str(after.trim())
                .map_err(|e| Error::parse(line, mcol, format!("matrix literal: {e}")))?;
            let a = matrix_from_json(field, d, &v).map_err(|m| Error::parse(line, mcol, m))?;
            if pieces_format {
                pieces.push((parse_clopen_at(space, &body[..sep], line, 1)?, a));
            } else if key == "*" {
                if default.is_some() {
                    return Err(Error::parse(line, col, "default value given twice"));
                }
                default = Some(a);
            } else {
                let w = space.parse_word(key).map_err(|e| Error::parse(line, col, e.to_string()))?;
                words.push((w, a));
            }
            continue;
        }
        let toks = super::tokens(body);
        let (c, head) = toks[0];
        let arg = toks.get(1).map(|t| t.1);
        if toks.len() != 2 {
            return Err(Error::parse(line, c, format!("expected `{head} <value>`")));
        }
        let acol = toks[1].0;
        let number = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::parse(line, acol, format!("`{s}` is not a non-negative integer")))
        };
        match (head, arg.unwrap()) {
            ("field", "real") => field = Some(Field::Real),
            ("field", "complex") => field = Some(Field::Complex),
            ("field", other) => return Err(Error::parse(line, acol, format!("unknown field `{other}`"))),
            ("dim", s) => dim = Some(number(s)?),
            ("depth", s) => depth = Some(number(s)?),
            ("format", "words") => pieces_format = false,
            ("format", "pieces") => pieces_format = true,
            ("format", other) => return Err(Error::parse(line, acol, format!("unknown format `{other}`"))),
            _ => return Err(Error::parse(line, c, format!("unknown header `{head}`"))),
        }
    }
    let (field, d) = match (field, dim) {
        (Some(f), Some(d)) => (f, d),
        _ => return Err(Error::parse(1, 1, "missing `field` or `dim` header")),
    };
    if pieces_format {
        return Cocycle::from_pieces(space, field, d, pieces);
    }
    let depth = depth.unwrap_or(0);
    if let Some(a) = default {
        let listed: std::collections::HashSet<Vec<Sym>> = words.iter().map(|w| w.0.clone()).collect();
        for w in space.words(2 * depth + 1) {
            if !listed.contains(&w) {
                words.push((w, a.clone()));
            }
        }
    }
    Cocycle::from_words(space, field, d, depth, words)
}

/// JSON form of a cocycle, accepted by [`parse_cocycle`].
pub fn cocycle_to_json(c: &Cocycle) -> Value {
    let space = c.space();
    match c.values() {
        Values::Words { depth, table } => {
            let mut entries: Vec<(&Vec<Sym>, &Mat)> = table.iter().collect();
            entries.sort_by(|a, b| a.0.cmp(b.0));
            let values: Vec<Value> = entries
                .into_iter()
                .map(|(w, a)| json!({"word": space.format_word(w), "matrix": matrix_to_json(a)}))
                .collect();
            json!({"field": c.field(), "dim": c.dim(), "format": "words", "depth": depth, "values": values})
        }
        Values::Pieces(ps) => {
            let pieces: Vec<Value> = ps
                .iter()
                .map(|(p, a)| json!({"set": dump_set(p, DUMP_WORDS), "matrix": matrix_to_json(a)}))
                .collect();
            json!({"field": c.field(), "dim": c.dim(), "format": "pieces", "pieces": pieces})
        }
    }
}

pub fn cocycle_from_json(space: &Arc<Sft>, v: &Value) -> Result<Cocycle> {
    let bad = |m: String| Error::parse(1, 1, m);
    let field: Field = serde_json::from_value(v["field"].clone()).map_err(|e| bad(format!("field: {e}")))?;
    let d = v["dim"].as_u64().ok_or_else(|| bad("missing `dim`".into()))? as usize;
    match v["format"].as_str() {
        Some("words") => {
            let depth = v["depth"].as_u64().ok_or_else(|| bad("missing `depth`".into()))? as usize;
            let mut entries = Vec::new();
            for e in v["values"].as_array().ok_or_else(|| bad("missing `values`".into()))? {
                let w = space.parse_word(e["word"].as_str().ok_or_else(|| bad("entry without `word`".into()))?)?;
                let a = matrix_from_json(field, d, &e["matrix"]).map_err(bad)?;
                entries.push((w, a));
            }
            Cocycle::from_words(space, field, d, depth, entries)
        }
        Some("pieces") => {
            let mut pieces = Vec::new();
            for e in v["pieces"].as_array().ok_or_else(|| bad("missing `pieces`".into()))? {
                let dump: SetDump = serde_json::from_value(e["set"].clone()).map_err(|e| bad(format!("set: {e}")))?;
                let a = matrix_from_json(field, d, &e["matrix"]).map_err(bad)?;
                pieces.push((load_set(space, &dump)?, a));
            }
            Cocycle::from_pieces(space, field, d, pieces)
        }
        _ => Err(bad("`format` must be `words` or `pieces`".into())),
    }
}
