use crate::error::ParseError;
use crate::scalars::Scalar;

/// Character cursor over an expression, reporting 1-based line/column.
pub(crate) struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    pub fn new(text: &str) -> Self {
        Cursor { chars: text.chars().collect(), pos: 0 }
    }

    pub fn position(&self) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for &c in &self.chars[..self.pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    pub fn mark(&self) -> usize {
        self.pos
    }

    pub fn reset(&mut self, mark: usize) {
        self.pos = mark;
    }

    pub fn err(&self, msg: impl Into<String>) -> ParseError {
        let (l, c) = self.position();
        ParseError::at(msg, l, c)
    }

    pub fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    /// Next non-blank character, without consuming it.
    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    /// The non-blank character after the next one.
    pub fn peek_second(&mut self) -> Option<char> {
        self.skip_ws();
        let mut i = self.pos + 1;
        while i < self.chars.len() && self.chars[i].is_whitespace() {
            i += 1;
        }
        self.chars.get(i).copied()
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self.peek().map_or("end of input".to_string(), |f| format!("`{f}`"));
            Err(self.err(format!("expected `{c}`, found {found}")))
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub fn finish(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.err(format!("unexpected `{c}`"))),
        }
    }

    pub fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a label"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    /// Unsigned scalar literal `p` or `p/q`.
    pub fn scalar(&mut self) -> Result<Scalar, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let digits = |s: &mut Self| {
            let b = s.pos;
            while s.pos < s.chars.len() && s.chars[s.pos].is_ascii_digit() {
                s.pos += 1;
            }
            s.pos > b
        };
        if !digits(self) {
            return Err(self.err("expected a number"));
        }
        if self.chars.get(self.pos) == Some(&'/') {
            self.pos += 1;
            if !digits(self) {
                return Err(self.err("expected a denominator"));
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<Scalar>().map_err(|e| {
            let (l, c) = self.position();
            ParseError::at(e.message, l, c)
        })
    }
}
