//! Line-oriented scanner shared by the fact-style readers (domain files
//! and scene listings). Facts look like Prolog ground terms:
//!
//! ```text
//! subclass_of('Weapon_Class', 'Sword_Class').
//! image(0, bb(161, 12, 165, 167), [class('Reticulum_Class', 1.0)]).
//! ```
//!
//! `%` starts a comment unless it sits inside a quoted name; whitespace
//! between tokens is insignificant.

/// Scan error with 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl std::fmt::Display for FactError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.msg)
    }
}

/// Cut a line at the first `%` that is not inside single quotes.
pub(crate) fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '\'' => quoted = !quoted,
            '%' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

pub(crate) struct Cursor<'a> {
    line: &'a str,
    pos: usize,
    line_no: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(line: &'a str, line_no: usize) -> Self {
        Cursor {
            line,
            pos: 0,
            line_no,
        }
    }

    pub fn error(&self, msg: impl Into<String>) -> FactError {
        FactError {
            line: self.line_no,
            col: self.pos + 1,
            msg: msg.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.line[self.pos..]
    }

    pub fn skip_ws(&mut self) {
        while self.rest().starts_with(|c: char| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.rest().is_empty()
    }

    pub fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), FactError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    /// Bare identifier such as `image`, `bb`, `class`.
    pub fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let end = rest
            .char_indices()
            .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_'))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        if end == 0 {
            None
        } else {
            self.pos += end;
            Some(&rest[..end])
        }
    }

    pub fn expect_ident(&mut self, want: &str) -> Result<(), FactError> {
        self.skip_ws();
        match self.ident() {
            Some(got) if got == want => Ok(()),
            Some(got) => Err(self.error(format!("expected '{want}', found '{got}'"))),
            None => Err(self.error(format!("expected '{want}'"))),
        }
    }

    /// Single-quoted name: `'Up_Corn_Class'`. Quotes are mandatory.
    pub fn quoted(&mut self) -> Result<String, FactError> {
        self.expect('\'').map_err(|e| FactError {
            msg: "expected quoted name".into(),
            ..e
        })?;
        let rest = self.rest();
        match rest.find('\'') {
            Some(0) => Err(self.error("empty quoted name")),
            Some(end) => {
                let name = &rest[..end];
                self.pos += end + 1;
                Ok(name.to_string())
            }
            None => Err(self.error("unterminated quoted name")),
        }
    }

    pub fn number(&mut self) -> Result<f64, FactError> {
        self.skip_ws();
        let rest = self.rest();
        let end = rest
            .char_indices()
            .find(|(_, c)| !(c.is_ascii_digit() || *c == '.' || *c == '-' || *c == '+'))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        let text = &rest[..end];
        let value: f64 = text
            .parse()
            .map_err(|_| self.error(format!("expected a number, found '{text}'")))?;
        self.pos += end;
        Ok(value)
    }

    pub fn unsigned(&mut self) -> Result<u64, FactError> {
        self.skip_ws();
        let rest = self.rest();
        let end = rest
            .char_indices()
            .find(|(_, c)| !c.is_ascii_digit())
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        let text = &rest[..end];
        let value: u64 = text
            .parse()
            .map_err(|_| self.error(format!("expected a non-negative integer, found '{text}'")))?;
        self.pos += end;
        Ok(value)
    }

    /// Closing `.` followed by nothing else on the line.
    pub fn finish_fact(&mut self) -> Result<(), FactError> {
        self.expect('.').map_err(|e| FactError {
            msg: "expected '.' ending the fact".into(),
            ..e
        })?;
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected text after '.'"))
        }
    }
}
