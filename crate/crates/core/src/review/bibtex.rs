//! Minimal BibTeX reader: `title`, `author`, `year` and `doi` are kept,
//! everything else is skipped.

use super::PaperRecord;
use crate::error::{Error, Result};

struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    fn new(src: &str) -> Self {
        Self {
            chars: src.chars().collect(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        self.pos += 1;
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let consumed: String = self.chars[..self.pos.min(self.chars.len())].iter().collect();
        let line = consumed.matches('\n').count() + 1;
        let column = consumed.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        self.skip_ws();
        match self.bump() {
            Some(c) if c == want => Ok(()),
            Some(c) => {
                self.pos -= 1;
                Err(self.error(format!("expected {want:?}, found {c:?}")))
            }
            None => Err(self.error(format!("expected {want:?}, found end of input"))),
        }
    }

    fn identifier(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_alphanumeric() || "_-:.+/".contains(c)) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    /// `{...}` with nesting, `"..."`, or a bare word/number.
    fn value(&mut self) -> Result<String> {
        self.skip_ws();
        match self.peek() {
            Some('{') => {
                self.pos += 1;
                let mut depth = 1;
                let mut out = String::new();
                loop {
                    match self.bump() {
                        Some('{') => depth += 1,
                        Some('}') => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        Some(c) => out.push(c),
                        None => return Err(self.error("unterminated braced value")),
                    }
                }
                Ok(out)
            }
            Some('"') => {
                self.pos += 1;
                let mut depth = 0;
                let mut out = String::new();
                loop {
                    match self.bump() {
                        Some('{') => depth += 1,
                        Some('}') => depth -= 1,
                        Some('"') if depth == 0 => break,
                        Some(c) => out.push(c),
                        None => return Err(self.error("unterminated quoted value")),
                    }
                }
                Ok(out)
            }
            _ => {
                let word = self.identifier();
                if word.is_empty() {
                    Err(self.error("expected a field value"))
                } else {
                    Ok(word)
                }
            }
        }
    }
}

fn squash(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parses BibTeX text into intake records.
pub fn parse_bibtex(src: &str) -> Result<Vec<PaperRecord>> {
    let mut cur = Cursor::new(src);
    let mut records = Vec::new();
    loop {
        // Anything outside an entry is a comment.
        while matches!(cur.peek(), Some(c) if c != '@') {
            cur.pos += 1;
        }
        if cur.bump().is_none() {
            break;
        }
        let kind = cur.identifier().to_ascii_lowercase();
        if kind.is_empty() {
            return Err(cur.error("expected entry type after '@'"));
        }
        cur.skip_ws();
        let close = match cur.bump() {
            Some('{') => '}',
            Some('(') => ')',
            _ => {
                cur.pos -= 1;
                return Err(cur.error("expected '{' or '(' after entry type"));
            }
        };
        if matches!(kind.as_str(), "comment" | "preamble" | "string") {
            let mut depth = 1;
            while depth > 0 {
                match cur.bump() {
                    Some('{') | Some('(') => depth += 1,
                    Some('}') | Some(')') => depth -= 1,
                    Some(_) => {}
                    None => return Err(cur.error("unterminated entry")),
                }
            }
            continue;
        }
        let _key = cur.identifier();
        let mut record = PaperRecord::default();
        loop {
            cur.skip_ws();
            match cur.peek() {
                Some(',') => {
                    cur.pos += 1;
                    continue;
                }
                Some(c) if c == close => {
                    cur.pos += 1;
                    break;
                }
                None => return Err(cur.error("unterminated entry")),
                _ => {}
            }
            let field = cur.identifier().to_ascii_lowercase();
            if field.is_empty() {
                return Err(cur.error("expected a field name"));
            }
            cur.expect('=')?;
            let mut value = cur.value()?;
            // `#` concatenation
            loop {
                cur.skip_ws();
                if cur.peek() == Some('#') {
                    cur.pos += 1;
                    value.push_str(&cur.value()?);
                } else {
                    break;
                }
            }
            let value = squash(&value);
            match field.as_str() {
                "title" => record.title = Some(value),
                "author" => {
                    record.authors = value
                        .split(" and ")
                        .map(str::trim)
                        .filter(|a| !a.is_empty())
                        .map(str::to_owned)
                        .collect()
                }
                "year" => {
                    record.year = Some(
                        value
                            .parse()
                            .map_err(|_| cur.error(format!("invalid year {value:?}")))?,
                    )
                }
                "doi" => record.doi = Some(value),
                _ => {}
            }
        }
        records.push(record);
    }
    Ok(records)
}
