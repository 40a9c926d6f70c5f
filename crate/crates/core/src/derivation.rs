//! Derivation trees: which elementary trees combined, and where.

use std::fmt;

use crate::grammar::{Category, GornAddress};

/// One use of an anchored tree. `position` is the token index of the home
/// anchor and `candidate` the index into that token's candidate list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeUse {
    pub tree: String,
    pub lexemes: Vec<String>,
    pub position: usize,
    pub candidate: usize,
    pub origin_pos: Category,
}

impl TreeUse {
    /// Variable scope reserved for this use in a derived tree.
    pub fn scope(&self) -> u32 {
        (((self.position as u32) << 16) | self.candidate as u32) + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    Substitution,
    Adjunction,
}

impl OpKind {
    pub fn keyword(self) -> &'static str {
        match self {
            OpKind::Substitution => "subst",
            OpKind::Adjunction => "adjoin",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Operation {
    pub target: GornAddress,
    pub kind: OpKind,
    pub child: Derivation,
}

/// Operations are kept sorted by target address, so structurally equal
/// derivations compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Derivation {
    pub root: TreeUse,
    pub operations: Vec<Operation>,
}

impl Derivation {
    pub fn leaf(root: TreeUse) -> Self {
        Derivation { root, operations: Vec::new() }
    }

    pub fn with_operations(root: TreeUse, mut operations: Vec<Operation>) -> Self {
        operations.sort();
        Derivation { root, operations }
    }

    /// Every tree use, in preorder of the derivation tree.
    pub fn uses(&self) -> Vec<&TreeUse> {
        let mut out = vec![&self.root];
        for op in &self.operations {
            out.extend(op.child.uses());
        }
        out
    }

    pub fn size(&self) -> usize {
        1 + self.operations.iter().map(|o| o.child.size()).sum::<usize>()
    }

    /// Copy with candidate indices rewritten by `f(position, candidate)`.
    pub fn map_candidates(&self, f: &impl Fn(usize, usize) -> usize) -> Derivation {
        let mut root = self.root.clone();
        root.candidate = f(root.position, root.candidate);
        Derivation {
            root,
            operations: self
                .operations
                .iter()
                .map(|o| Operation { target: o.target.clone(), kind: o.kind, child: o.child.map_candidates(f) })
                .collect(),
        }
    }
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

impl fmt::Display for Derivation {
    /// `(alpha_nx0Vnx1 "loves" V 1:0 (subst 1 (…)) (adjoin 2 (…)))`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.root.tree)?;
        for l in &self.root.lexemes {
            write!(f, " {}", quote(l))?;
        }
        write!(f, " {} {}:{}", self.root.origin_pos, self.root.position, self.root.candidate)?;
        for op in &self.operations {
            write!(f, " ({} {} {})", op.kind.keyword(), op.target, op.child)?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("derivation text, offset {offset}: {message}")]
pub struct DerivationSyntaxError {
    pub offset: usize,
    pub message: String,
}

/// Parses the text form written by `Display`.
pub fn parse_derivation(src: &str) -> Result<Derivation, DerivationSyntaxError> {
    let mut p = Reader { src: src.as_bytes(), text: src, pos: 0 };
    let d = p.derivation()?;
    p.ws();
    if p.pos != src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(d)
}

struct Reader<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl Reader<'_> {
    fn err(&self, message: &str) -> DerivationSyntaxError {
        DerivationSyntaxError { offset: self.pos, message: message.to_string() }
    }

    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> Result<(), DerivationSyntaxError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn word(&mut self) -> Result<&str, DerivationSyntaxError> {
        self.ws();
        let start = self.pos;
        while self.pos < self.src.len() && !self.src[self.pos].is_ascii_whitespace() && !b"()\"".contains(&self.src[self.pos]) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a word"));
        }
        Ok(&self.text[start..self.pos])
    }

    fn quoted(&mut self) -> Result<String, DerivationSyntaxError> {
        self.eat(b'"')?;
        let mut out = String::new();
        let mut chars = self.text[self.pos..].char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.pos += i + 1;
                    return Ok(out);
                }
                '\\' => match chars.next() {
                    Some((_, c)) => out.push(c),
                    None => break,
                },
                c => out.push(c),
            }
        }
        Err(self.err("unterminated string"))
    }

    fn derivation(&mut self) -> Result<Derivation, DerivationSyntaxError> {
        self.eat(b'(')?;
        let tree = self.word()?.to_string();
        let mut lexemes = Vec::new();
        while self.peek() == Some(b'"') {
            lexemes.push(self.quoted()?);
        }
        let origin_pos = Category::new(self.word()?);
        let at = self.word()?.to_string();
        let (p, c) = at.split_once(':').ok_or_else(|| self.err("expected position:candidate"))?;
        let position = p.parse().map_err(|_| self.err("bad position"))?;
        let candidate = c.parse().map_err(|_| self.err("bad candidate index"))?;
        let mut operations = Vec::new();
        while self.peek() == Some(b'(') {
            self.pos += 1;
            let kind = match self.word()? {
                "subst" => OpKind::Substitution,
                "adjoin" => OpKind::Adjunction,
                _ => return Err(self.err("expected subst or adjoin")),
            };
            let target = self.word()?.to_string();
            let target = target.parse().map_err(|_| self.err("bad address"))?;
            let child = self.derivation()?;
            self.eat(b')')?;
            operations.push(Operation { target, kind, child });
        }
        self.eat(b')')?;
        Ok(Derivation::with_operations(TreeUse { tree, lexemes, position, candidate, origin_pos }, operations))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn use_(tree: &str, lex: &str, pos: &str, position: usize) -> TreeUse {
        TreeUse { tree: tree.into(), lexemes: vec![lex.into()], position, candidate: 0, origin_pos: pos.into() }
    }

    #[test]
    fn text_form_round_trips() {
        let d = Derivation::with_operations(
            use_("alpha_nx0Vnx1", "loves", "V", 1),
            vec![
                Operation { target: "2.2".parse().unwrap(), kind: OpKind::Substitution, child: Derivation::leaf(use_("alpha_NP", "Mary", "PropN", 2)) },
                Operation { target: "1".parse().unwrap(), kind: OpKind::Substitution, child: Derivation::leaf(use_("alpha_NP", "John", "PropN", 0)) },
            ],
        );
        let text = d.to_string();
        assert_eq!(
            text,
            "(alpha_nx0Vnx1 \"loves\" V 1:0 (subst 1 (alpha_NP \"John\" PropN 0:0)) (subst 2.2 (alpha_NP \"Mary\" PropN 2:0)))"
        );
        assert_eq!(parse_derivation(&text).unwrap(), d);
        assert_eq!(d.size(), 3);
        assert!(parse_derivation("(x \"a\" V 0:0").is_err());
    }

    #[test]
    fn quoted_lexemes_escape() {
        let d = Derivation::leaf(use_("t", "a \"b\" (c)", "N", 0));
        assert_eq!(parse_derivation(&d.to_string()).unwrap(), d);
    }
}
