use std::sync::Arc;

use crate::error::{Error, Result};
use crate::shiftspace::{ClopenSet, Sft, Sym};

/// Parses and evaluates a clopen-set expression.
///
/// ```text
/// expr    := inter (('|' | '\') inter)*
/// inter   := unary ('&' unary)*
/// unary   := '~' unary | 'T' ('^' int)? '(' expr ')' | atom
/// atom    := '[' word ']' ('@' int)?
///          | '{' word (',' word)* '}' ('@' int)?
///          | 'X' | 'EMPTY' | '(' expr ')'
/// ```
///
/// `[w]@k` is the cylinder of points spelling `w` from position `k` (default
/// `0`), `{u,v}@k` the union of such cylinders, `X` the whole space, `~` the
/// complement and `T^n` the `n`-th power of the shift, `(Tx)_i = x_{i+1}`.
pub fn parse_clopen(space: &Arc<Sft>, text: &str) -> Result<ClopenSet> {
    parse_clopen_at(space, text, 1, 1)
}

/// As [`parse_clopen`], reporting errors at `line` with columns shifted so
/// that the first character of `text` is at `column`.
pub(crate) fn parse_clopen_at(space: &Arc<Sft>, text: &str, line: usize, column: usize) -> Result<ClopenSet> {
    let mut p = Parser {
        space,
        chars: text.chars().collect(),
        pos: 0,
        line,
        column,
    };
    let set = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected `{}`", p.chars[p.pos])));
    }
    Ok(set)
}

struct Parser<'a> {
    space: &'a Arc<Sft>,
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        self.error_at(self.pos, message)
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> Error {
        Error::parse(self.line, self.column + pos, message)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        let n = word.chars().count();
        let end = self.pos + n;
        if end <= self.chars.len() && self.chars[self.pos..end].iter().copied().eq(word.chars()) {
            let next = self.chars.get(end);
            if next.is_none_or(|c| !c.is_alphanumeric() && *c != '_') {
                self.pos = end;
                return true;
            }
        }
        false
    }

    fn expr(&mut self) -> Result<ClopenSet> {
        let mut acc = self.inter()?;
        loop {
            match self.peek() {
                Some('|') => {
                    self.pos += 1;
                    acc = acc.union(&self.inter()?)?;
                }
                Some('\\') => {
                    self.pos += 1;
                    acc = acc.difference(&self.inter()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn inter(&mut self) -> Result<ClopenSet> {
        let mut acc = self.unary()?;
        while self.peek() == Some('&') {
            self.pos += 1;
            acc = acc.intersect(&self.unary()?)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<ClopenSet> {
        match self.peek() {
            Some('~') => {
                self.pos += 1;
                Ok(self.unary()?.complement())
            }
            Some('T') if self.chars.get(self.pos + 1).is_some_and(|&c| c == '^' || c == '(' || c.is_whitespace()) => {
                self.pos += 1;
                let n = if self.peek() == Some('^') {
                    self.pos += 1;
                    self.int()?
                } else {
                    1
                };
                self.expect('(')?;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner.shift(n))
            }
            _ => self.atom(),
        }
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.chars.get(self.pos), Some('-') | Some('+')) {
            self.pos += 1;
        }
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.error_at(start, "expected an integer"))
    }

    fn position(&mut self) -> Result<i64> {
        if self.peek() == Some('@') {
            self.pos += 1;
            self.int()
        } else {
            Ok(0)
        }
    }

    /// Reads up to (not including) one of `stops`.
    fn word(&mut self, stops: &[char]) -> Result<(usize, Vec<Sym>)> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| !stops.contains(c)) {
            self.pos += 1;
        }
        if self.pos >= self.chars.len() {
            return Err(self.error_at(start, "unterminated word"));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        let w = self
            .space
            .parse_word(&text)
            .map_err(|e| self.error_at(start, e.to_string()))?;
        if w.is_empty() {
            return Err(self.error_at(start, "empty word"));
        }
        Ok((start, w))
    }

    fn atom(&mut self) -> Result<ClopenSet> {
        match self.peek() {
            Some('[') => {
                self.pos += 1;
                let (_, w) = self.word(&[']'])?;
                self.pos += 1;
                let at = self.position()?;
                ClopenSet::cylinder(self.space, &w, at)
            }
            Some('{') => {
                self.pos += 1;
                let mut words = Vec::new();
                loop {
                    let (start, w) = self.word(&[',', '}'])?;
                    if words.first().is_some_and(|f: &Vec<Sym>| f.len() != w.len()) {
                        return Err(self.error_at(start, "words in a set must have equal lengths"));
                    }
                    words.push(w);
                    let c = self.chars[self.pos];
                    self.pos += 1;
                    if c == '}' {
                        break;
                    }
                }
                let at = self.position()?;
                let len = words[0].len();
                ClopenSet::from_words(self.space, at, len, &words)
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            _ if self.keyword("EMPTY") => Ok(ClopenSet::empty(self.space)),
            _ if self.keyword("X") => Ok(ClopenSet::full(self.space)),
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Arc<Sft> {
        Arc::new(Sft::golden_mean())
    }

    fn eq(a: &ClopenSet, b: &ClopenSet) -> bool {
        a.equals(b).unwrap()
    }

    #[test]
    fn basic_forms() {
        let g = golden();
        let zero = ClopenSet::cylinder(&g, &[0], 0).unwrap();
        assert!(eq(&parse_clopen(&g, "[0]@0").unwrap(), &zero));
        assert!(eq(&parse_clopen(&g, "~[1]").unwrap(), &zero));
        assert!(eq(&parse_clopen(&g, "T([0]@0)").unwrap(), &zero.shift(1)));
        assert!(eq(&parse_clopen(&g, "T^-2([0])").unwrap(), &zero.shift(-2)));
        assert!(parse_clopen(&g, "[1]@0 & [1]@1").unwrap().is_empty());
        assert!(parse_clopen(&g, "X \\ ([0] | [1])").unwrap().is_empty());
        let pair = parse_clopen(&g, "{00, 01}@-1").unwrap();
        assert!(eq(&pair, &ClopenSet::cylinder(&g, &[0], -1).unwrap()));
    }

    #[test]
    fn precedence() {
        let g = golden();
        let a = parse_clopen(&g, "[0]@0 | [0]@1 & [1]@2").unwrap();
        let b = parse_clopen(&g, "[0]@0 | ([0]@1 & [1]@2)").unwrap();
        assert!(eq(&a, &b));
    }

    #[test]
    fn error_columns() {
        let g = golden();
        match parse_clopen(&g, "[0]@0 | [2]") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 10),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_clopen(&g, "([0]"), Err(Error::Parse { .. })));
        assert!(matches!(parse_clopen(&g, "[0] [1]"), Err(Error::Parse { column: 5, .. })));
    }
}
