//! Text and JSON formats: SFT files, clopen expressions, cocycle files,
//! castle files and DOT diagrams.

mod castle_file;
mod cocycle_file;
mod dot;
mod expr;
mod sft_file;

pub use castle_file::{castle_from_file, castle_to_file, dump_set, load_set, CastleFile, SetDump, TowerEntry};
pub use cocycle_file::{cocycle_from_json, cocycle_to_json, matrix_from_json, matrix_to_json, parse_cocycle};
pub use dot::castle_dot;
pub use expr::parse_clopen;
pub use sft_file::{parse_sft, write_sft};

/// Splits `line` at whitespace, returning each token with its 1-based column.
pub(crate) fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(s, t)| (line[..s].chars().count() + 1, t))
        .collect()
}

/// The line without its `#` comment.
pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}
