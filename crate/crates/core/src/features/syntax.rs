//! Concrete syntax: `{attr: val, attr2: {…}, attr3: ?X}` with bare symbols
//! as atoms, and equations `node.side.path = value` separated by `;`.

use std::str::FromStr;

use super::{FeatureEquation, FeatureStructure, FeatureValue, NodeRef, Side, Variable};
use crate::grammar::GornAddress;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("column {column}: {message}")]
pub struct SyntaxError {
    /// 1-based character column within the parsed text.
    pub column: usize,
    pub message: String,
}

pub(crate) fn is_symbol_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '+' | '\'')
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    fn new(src: &str) -> Self {
        Cursor { chars: src.chars().collect(), pos: 0 }
    }

    fn err(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError { column: self.pos + 1, message: message.into() }
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

    fn expect(&mut self, c: char) -> Result<(), SyntaxError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn symbol(&mut self) -> Result<String, SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && is_symbol_char(self.chars[self.pos]) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a symbol"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn structure(&mut self) -> Result<FeatureStructure, SyntaxError> {
        self.expect('{')?;
        let mut fs = FeatureStructure::new();
        if self.peek() == Some('}') {
            self.pos += 1;
            return Ok(fs);
        }
        loop {
            let attr = self.symbol()?;
            self.expect(':')?;
            let value = self.value()?;
            if fs.insert(attr.clone(), value).is_some() {
                return Err(self.err(format!("duplicate attribute '{attr}'")));
            }
            match self.peek() {
                Some(',') => self.pos += 1,
                Some('}') => {
                    self.pos += 1;
                    return Ok(fs);
                }
                _ => return Err(self.err("expected ',' or '}'")),
            }
        }
    }

    fn value(&mut self) -> Result<FeatureValue, SyntaxError> {
        match self.peek() {
            Some('{') => Ok(FeatureValue::Struct(self.structure()?)),
            Some('?') => {
                self.pos += 1;
                let name = self.symbol()?;
                if self.chars.get(self.pos) == Some(&'#') {
                    self.pos += 1;
                    let start = self.pos;
                    while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    let digits: String = self.chars[start..self.pos].iter().collect();
                    let scope = digits.parse().map_err(|_| self.err("expected a variable scope"))?;
                    return Ok(FeatureValue::Var(Variable::scoped(name, scope)));
                }
                Ok(FeatureValue::Var(Variable::new(name)))
            }
            Some(_) => Ok(FeatureValue::Atom(self.symbol()?)),
            None => Err(self.err("expected a value")),
        }
    }
}

pub fn parse_structure(src: &str) -> Result<FeatureStructure, SyntaxError> {
    let mut c = Cursor::new(src);
    let fs = c.structure()?;
    if !c.at_end() {
        return Err(c.err("trailing input after structure"));
    }
    Ok(fs)
}

pub fn parse_value(src: &str) -> Result<FeatureValue, SyntaxError> {
    let mut c = Cursor::new(src);
    let v = c.value()?;
    if !c.at_end() {
        return Err(c.err("trailing input after value"));
    }
    Ok(v)
}

/// Parses a prefix of `src` as a structure, returning it and the number of
/// bytes consumed. Used by the line-oriented file formats.
pub(crate) fn parse_structure_prefix(src: &str) -> Result<(FeatureStructure, usize), SyntaxError> {
    let mut c = Cursor::new(src);
    let fs = c.structure()?;
    let consumed: usize = c.chars[..c.pos].iter().map(|ch| ch.len_utf8()).sum();
    Ok((fs, consumed))
}

fn parse_equation(src: &str, offset: usize) -> Result<FeatureEquation, SyntaxError> {
    let err = |column: usize, message: String| SyntaxError { column: offset + column, message };
    let (lhs, rhs) = src.split_once('=').ok_or_else(|| err(1, "expected '='".into()))?;
    let parts: Vec<&str> = lhs.trim().split('.').collect();
    let side_at = parts
        .iter()
        .position(|p| matches!(*p, "top" | "bot" | "bottom"))
        .ok_or_else(|| err(1, "equation needs a side: top or bottom".into()))?;
    if side_at == 0 {
        return Err(err(1, "equation needs a node reference before the side".into()));
    }
    let node_parts = &parts[..side_at];
    let node = match node_parts {
        ["root"] => NodeRef::Root,
        ["anchor"] => NodeRef::Anchor,
        ["foot"] => NodeRef::Foot,
        _ => NodeRef::Address(
            GornAddress::from_str(&node_parts.join(".")).map_err(|e| err(1, e.to_string()))?,
        ),
    };
    let side = if parts[side_at] == "top" { Side::Top } else { Side::Bottom };
    let path: Vec<String> = parts[side_at + 1..].iter().map(|s| s.trim().to_string()).collect();
    if path.is_empty() || path.iter().any(|p| p.is_empty() || !p.chars().all(is_symbol_char)) {
        return Err(err(1, "equation path must be a non-empty sequence of attributes".into()));
    }
    let value = parse_value(rhs).map_err(|e| err(lhs.chars().count() + 1 + e.column, e.message))?;
    Ok(FeatureEquation { node, side, path, value })
}

/// Parses `;`-separated equations. Empty input (or `-`) yields none.
pub fn parse_equations(src: &str) -> Result<Vec<FeatureEquation>, SyntaxError> {
    let trimmed = src.trim();
    if trimmed.is_empty() || trimmed == "-" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut offset = 0;
    for piece in src.split(';') {
        if !piece.trim().is_empty() {
            out.push(parse_equation(piece, offset)?);
        }
        offset += piece.chars().count() + 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_structures_and_variables() {
        let fs = parse_structure("{agr: {num: sg, pers: 3}, case: ?C, mode: ind}").unwrap();
        assert_eq!(fs.to_string(), "{agr: {num: sg, pers: 3}, case: ?C, mode: ind}");
        assert_eq!(fs.depth(), 2);
        let scoped = parse_structure("{a: ?X#7}").unwrap();
        assert_eq!(scoped.get("a"), Some(&FeatureValue::Var(Variable::scoped("X", 7))));
        assert_eq!(scoped.to_string(), "{a: ?X#7}");
    }

    #[test]
    fn rejects_duplicates_and_garbage() {
        assert!(parse_structure("{a: x, a: y}").is_err());
        assert!(parse_structure("{a x}").is_err());
        let e = parse_structure("{a: x} junk").unwrap_err();
        assert_eq!(e.column, 8);
    }

    #[test]
    fn parses_equations() {
        let eqs = parse_equations("anchor.bottom.agr.num = sg; 2.1.top.mode = ?M; root.bot.f = {g: h}").unwrap();
        assert_eq!(eqs.len(), 3);
        assert_eq!(eqs[0].node, NodeRef::Anchor);
        assert_eq!(eqs[0].side, Side::Bottom);
        assert_eq!(eqs[0].path, vec!["agr".to_string(), "num".into()]);
        assert_eq!(eqs[1].node, NodeRef::Address("2.1".parse().unwrap()));
        assert_eq!(eqs[1].value, FeatureValue::var("M"));
        assert_eq!(eqs[2].to_string(), "root.bottom.f = {g: h}");
        assert!(parse_equations("-").unwrap().is_empty());
        assert!(parse_equations("anchor.agr = sg").is_err());
        assert!(parse_equations("anchor.top = sg").is_err());
    }
}
