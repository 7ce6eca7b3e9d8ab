//! Reader and writer helpers for the plain-text `key = value` file formats.
//!
//! Entries are separated by newlines or by `;` at bracket depth zero, and a
//! value may span several lines while brackets are open. `#` starts a comment.

use crate::error::ParseError;
use crate::scalars::{FormalSum, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Atom(String),
    List(Vec<Value>),
    Map(Vec<(String, String)>),
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub key: String,
    pub raw: String,
    pub line: usize,
}

#[derive(Debug, Clone, Default)]
pub struct KvFile {
    pub entries: Vec<Entry>,
}

impl KvFile {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut entries = Vec::new();
        let mut buf = String::new();
        let mut depth: i32 = 0;
        let mut start_line = 1;
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            if buf.trim().is_empty() {
                start_line = i + 1;
            }
            for ch in line.chars() {
                match ch {
                    '[' | '{' => depth += 1,
                    ']' | '}' => depth -= 1,
                    _ => {}
                }
                if depth < 0 {
                    return Err(ParseError::at("unbalanced closing bracket", i + 1, 1));
                }
                if ch == ';' && depth == 0 {
                    push_entry(&mut entries, &buf, start_line)?;
                    buf.clear();
                    start_line = i + 1;
                } else {
                    buf.push(ch);
                }
            }
            if depth == 0 {
                push_entry(&mut entries, &buf, start_line)?;
                buf.clear();
            } else {
                buf.push(' ');
            }
        }
        if depth != 0 {
            return Err(ParseError::at("unclosed bracket", start_line, 1));
        }
        Ok(KvFile { entries })
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), ParseError> {
        for e in &self.entries {
            if !allowed.contains(&e.key.as_str()) {
                return Err(ParseError::new(format!("unknown key `{}`", e.key)).with_line(e.line));
            }
            if self.entries.iter().filter(|f| f.key == e.key).count() > 1 {
                return Err(ParseError::new(format!("duplicate key `{}`", e.key)).with_line(e.line));
            }
        }
        Ok(())
    }
}

fn push_entry(entries: &mut Vec<Entry>, buf: &str, line: usize) -> Result<(), ParseError> {
    let t = buf.trim();
    if t.is_empty() {
        return Ok(());
    }
    let (k, v) = t
        .split_once('=')
        .ok_or_else(|| ParseError::new(format!("expected `key = value`, got `{t}`")).with_line(line))?;
    let key = k.trim();
    if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(ParseError::new(format!("invalid key `{key}`")).with_line(line));
    }
    entries.push(Entry { key: key.to_string(), raw: v.trim().to_string(), line });
    Ok(())
}

impl Entry {
    pub fn value(&self) -> Result<Value, ParseError> {
        parse_value(&self.raw).map_err(|e| e.with_line(self.line))
    }

    pub fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(format!("`{}`: {}", self.key, msg.into())).with_line(self.line)
    }

    pub fn words(&self) -> Vec<String> {
        let raw = self.raw.trim();
        let inner = raw.strip_prefix('[').and_then(|r| r.strip_suffix(']')).unwrap_or(raw);
        inner
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|w| !w.is_empty())
            .map(str::to_string)
            .collect()
    }

    pub fn usize(&self) -> Result<usize, ParseError> {
        self.raw.parse().map_err(|_| self.err("expected a non-negative integer"))
    }

    pub fn boolean(&self) -> Result<bool, ParseError> {
        match self.raw.as_str() {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(self.err("expected `true` or `false`")),
        }
    }

    pub fn index_matrix(&self, n: usize) -> Result<Vec<Vec<usize>>, ParseError> {
        let rows = self.matrix(n, |v| match v {
            Value::Atom(a) => a.parse::<usize>().ok().filter(|&x| x < n),
            _ => None,
        });
        rows.map_err(|m| self.err(format!("{m} (entries must be indices below {n})")))
    }

    pub fn scalar_matrix(&self, n: usize) -> Result<Vec<Vec<Scalar>>, ParseError> {
        self.matrix(n, |v| match v {
            Value::Atom(a) => a.parse::<Scalar>().ok(),
            _ => None,
        })
        .map_err(|m| self.err(format!("{m} (entries must be scalars)")))
    }

    pub fn sum_matrix(&self, rows: usize, basis: usize) -> Result<Vec<Vec<FormalSum<usize>>>, ParseError> {
        self.matrix(rows, |v| match v {
            Value::Map(m) => map_to_sum(m, basis).ok(),
            _ => None,
        })
        .map_err(|m| self.err(format!("{m} (entries must be sums {{i:c,...}} over indices below {basis})")))
    }

    fn matrix<T>(&self, n: usize, cell: impl Fn(&Value) -> Option<T>) -> Result<Vec<Vec<T>>, String> {
        let v = self.value().map_err(|e| e.message)?;
        let Value::List(rows) = v else { return Err("expected a list of rows".into()) };
        if rows.len() != n {
            return Err(format!("expected {n} rows, found {}", rows.len()));
        }
        rows.iter()
            .map(|r| {
                let Value::List(cells) = r else { return Err("expected a row list".to_string()) };
                if cells.len() != n {
                    return Err(format!("expected {n} entries per row, found {}", cells.len()));
                }
                cells.iter().map(|c| cell(c).ok_or_else(|| "bad entry".to_string())).collect()
            })
            .collect()
    }
}

pub fn map_to_sum(m: &[(String, String)], basis: usize) -> Result<FormalSum<usize>, ParseError> {
    let mut s = FormalSum::zero();
    for (k, c) in m {
        let i: usize = k.parse().map_err(|_| ParseError::new(format!("bad index `{k}`")))?;
        if i >= basis {
            return Err(ParseError::new(format!("index {i} out of range")));
        }
        s.add_term(i, &c.parse::<Scalar>()?);
    }
    Ok(s)
}

pub fn parse_value(text: &str) -> Result<Value, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let v = value(&chars, &mut pos)?;
    skip_ws(&chars, &mut pos);
    if pos != chars.len() {
        return Err(ParseError::at("trailing characters after value", 1, pos + 1));
    }
    Ok(v)
}

fn skip_ws(c: &[char], pos: &mut usize) {
    while *pos < c.len() && c[*pos].is_whitespace() {
        *pos += 1;
    }
}

fn atom(c: &[char], pos: &mut usize) -> Result<String, ParseError> {
    skip_ws(c, pos);
    let start = *pos;
    while *pos < c.len() && !matches!(c[*pos], ',' | ']' | '}' | '[' | '{' | ':') && !c[*pos].is_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(ParseError::at("expected a value", 1, start + 1));
    }
    Ok(c[start..*pos].iter().collect())
}

fn expect(c: &[char], pos: &mut usize, want: char) -> Result<(), ParseError> {
    skip_ws(c, pos);
    if c.get(*pos) == Some(&want) {
        *pos += 1;
        Ok(())
    } else {
        Err(ParseError::at(format!("expected `{want}`"), 1, *pos + 1))
    }
}

fn value(c: &[char], pos: &mut usize) -> Result<Value, ParseError> {
    skip_ws(c, pos);
    match c.get(*pos) {
        Some('[') => {
            *pos += 1;
            let mut items = Vec::new();
            skip_ws(c, pos);
            if c.get(*pos) == Some(&']') {
                *pos += 1;
                return Ok(Value::List(items));
            }
            loop {
                items.push(value(c, pos)?);
                skip_ws(c, pos);
                match c.get(*pos) {
                    Some(',') => *pos += 1,
                    Some(']') => {
                        *pos += 1;
                        return Ok(Value::List(items));
                    }
                    _ => return Err(ParseError::at("expected `,` or `]`", 1, *pos + 1)),
                }
            }
        }
        Some('{') => {
            *pos += 1;
            let mut items = Vec::new();
            skip_ws(c, pos);
            if c.get(*pos) == Some(&'}') {
                *pos += 1;
                return Ok(Value::Map(items));
            }
            loop {
                let k = atom(c, pos)?;
                expect(c, pos, ':')?;
                let v = atom(c, pos)?;
                items.push((k, v));
                skip_ws(c, pos);
                match c.get(*pos) {
                    Some(',') => *pos += 1,
                    Some('}') => {
                        *pos += 1;
                        return Ok(Value::Map(items));
                    }
                    _ => return Err(ParseError::at("expected `,` or `}`", 1, *pos + 1)),
                }
            }
        }
        Some(_) => Ok(Value::Atom(atom(c, pos)?)),
        None => Err(ParseError::at("unexpected end of value", 1, *pos + 1)),
    }
}

pub fn render_index_matrix(rows: &[Vec<usize>]) -> String {
    let body: Vec<String> = rows
        .iter()
        .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    format!("[{}]", body.join(","))
}

pub fn render_sum(s: &FormalSum<usize>) -> String {
    let body: Vec<String> = s.iter().map(|(i, c)| format!("{i}:{c}")).collect();
    format!("{{{}}}", body.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_values() {
        let v = parse_value("[[0, 1], [{0:1, 1:-1/2}, x]]").unwrap();
        let Value::List(rows) = v else { panic!() };
        assert_eq!(rows.len(), 2);
        assert_eq!(
            rows[1],
            Value::List(vec![
                Value::Map(vec![("0".into(), "1".into()), ("1".into(), "-1/2".into())]),
                Value::Atom("x".into())
            ])
        );
    }

    #[test]
    fn entries_and_comments() {
        let f = KvFile::parse("a = 1 # note\nb = [[0,\n 1]]; c = true\n\n").unwrap();
        assert_eq!(f.entries.len(), 3);
        assert_eq!(f.get("b").unwrap().raw, "[[0,  1]]");
        assert_eq!(f.get("b").unwrap().line, 2);
        assert!(f.get("c").unwrap().boolean().unwrap());
    }

    #[test]
    fn errors_carry_lines() {
        let e = KvFile::parse("a = 1\nnonsense\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(parse_value("[1,2").is_err());
        assert!(parse_value("[1 2]").is_err());
    }
}
