use crate::error::{Error, Result};
use crate::shiftspace::Sft;

use super::{strip_comment, tokens};

/// Parses an SFT file.
///
/// ```text
/// # golden mean shift
/// alphabet 0 1
/// forbid 11
/// ```
///
/// Directives, one per line: `alphabet <label>...` (first), then either
/// transitions (`<a> -> <b> <c> ...` or `edge <a> <b>`) or forbidden words
/// (`forbid <word>...`), not both. Words are written one character per
/// symbol when every label is a single character, otherwise as labels
/// joined by `.`. Text after `#` is ignored.
pub fn parse_sft(text: &str) -> Result<Sft> {
    let mut alphabet: Option<Vec<String>> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut forbidden: Vec<Vec<String>> = Vec::new();
    let mut mode: Option<(&'static str, usize)> = None;

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let toks = tokens(strip_comment(raw));
        let Some(&(col, head)) = toks.first() else {
            continue;
        };
        let mut set_mode = |m: &'static str, col: usize| -> Result<()> {
            match mode {
                Some((other, _)) if other != m => Err(Error::parse(
                    line,
                    col,
                    "an SFT is given either by transitions or by forbidden words, not both",
                )),
                _ => {
                    mode = Some((m, line));
                    Ok(())
                }
            }
        };
        if head == "alphabet" {
            if alphabet.is_some() {
                return Err(Error::parse(line, col, "alphabet declared twice"));
            }
            if toks.len() < 2 {
                return Err(Error::parse(line, col, "alphabet needs at least one label"));
            }
            let mut labels = Vec::new();
            for &(c, t) in &toks[1..] {
                if t.contains('.') || t == "->" {
                    return Err(Error::parse(line, c, format!("`{t}` cannot be used as a label")));
                }
                if labels.iter().any(|l| l == t) {
                    return Err(Error::parse(line, c, format!("label `{t}` repeated")));
                }
                labels.push(t.to_string());
            }
            alphabet = Some(labels);
            continue;
        }
        let labels = alphabet
            .as_ref()
            .ok_or_else(|| Error::parse(line, col, "the first directive must be `alphabet`"))?;
        let index = |c: usize, t: &str| -> Result<usize> {
            labels
                .iter()
                .position(|l| l == t)
                .ok_or_else(|| Error::parse(line, c, format!("unknown symbol `{t}`")))
        };
        if head == "forbid" {
            set_mode("forbid", col)?;
            if toks.len() < 2 {
                return Err(Error::parse(line, col, "forbid needs at least one word"));
            }
            let single = labels.iter().all(|l| l.chars().count() == 1);
            for &(c, t) in &toks[1..] {
                let parts: Vec<String> = if t.contains('.') || !single {
                    t.split('.').map(String::from).collect()
                } else {
                    t.chars().map(String::from).collect()
                };
                for p in &parts {
                    index(c, p)?;
                }
                forbidden.push(parts);
            }
        } else if head == "edge" {
            set_mode("transitions", col)?;
            if toks.len() != 3 {
                return Err(Error::parse(line, col, "expected `edge <from> <to>`"));
            }
            edges.push((index(toks[1].0, toks[1].1)?, index(toks[2].0, toks[2].1)?));
        } else if toks.len() >= 2 && toks[1].1 == "->" {
            set_mode("transitions", col)?;
            let from = index(col, head)?;
            for &(c, t) in &toks[2..] {
                edges.push((from, index(c, t)?));
            }
        } else {
            return Err(Error::parse(line, col, format!("unknown directive `{head}`")));
        }
    }
    let labels = alphabet.ok_or_else(|| Error::parse(1, 1, "missing `alphabet` line"))?;
    match mode {
        Some(("transitions", _)) => Sft::from_transitions(labels, &edges),
        _ => Sft::from_forbidden(&labels, &forbidden),
    }
}

/// Transition-table form of an SFT, accepted by [`parse_sft`].
pub fn write_sft(sft: &Sft) -> String {
    let mut out = format!("alphabet {}\n", sft.labels().join(" "));
    for s in 0..sft.num_symbols() as u32 {
        let next: Vec<&str> = sft.successors(s).iter().map(|&t| sft.label(t)).collect();
        if !next.is_empty() {
            out.push_str(&format!("{} -> {}\n", sft.label(s), next.join(" ")));
        }
    }
    out
}
