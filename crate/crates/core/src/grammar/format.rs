//! The line-oriented grammar file format.
//!
//! ```text
//! ltag-grammar v1
//! start S
//! categories S NP VP V
//! tree alpha_nx0V initial
//! 0 S interior bot={mode: ind}
//! 1 NP subst top={case: nom}
//! 2 VP interior
//! 2.1 V anchor
//! family Tnx0V: alpha_nx0V
//! ```
//!
//! Node lines list a tree in preorder. `#` starts a comment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{Category, ElementaryTree, GornAddress, Grammar, NodeKind, TreeFamily, TreeNode, TreeType, Violation};
use crate::features::{parse_structure_prefix as syntax_prefix, FeatureStructure, DEFAULT_MAX_DEPTH};

pub const HEADER: &str = "ltag-grammar v1";

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GrammarError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("tree {tree}: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid { tree: String, violations: Vec<Violation> },
    #[error("tree {tree}: feature structure depth {depth} exceeds the limit of {limit}")]
    TooDeep { tree: String, depth: usize, limit: usize },
    #[error("{0}")]
    Reference(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoadOptions {
    pub max_depth: usize,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { max_depth: DEFAULT_MAX_DEPTH }
    }
}

struct RawNode {
    line: usize,
    node: TreeNode,
}

struct RawTree {
    line: usize,
    name: String,
    tree_type: TreeType,
    nodes: Vec<RawNode>,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> GrammarError {
    GrammarError::Syntax { line, column, message: message.into() }
}

pub fn load_grammar(source: &str) -> Result<Grammar, GrammarError> {
    load_grammar_with(source, LoadOptions::default())
}

pub fn load_grammar_with(source: &str, opts: LoadOptions) -> Result<Grammar, GrammarError> {
    let mut lines = numbered_lines(source);
    match lines.first() {
        Some((_, l)) if l.trim() == HEADER => {
            lines.remove(0);
        }
        Some((n, _)) => return Err(syntax(*n, 1, format!("expected header '{HEADER}'"))),
        None => return Err(syntax(1, 1, format!("expected header '{HEADER}'"))),
    }

    let mut start = None;
    let mut declared: Option<BTreeSet<Category>> = None;
    let mut raw_trees: Vec<RawTree> = Vec::new();
    let mut families: BTreeMap<String, TreeFamily> = BTreeMap::new();
    let mut in_tree = false;

    for (n, line) in lines {
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match keyword {
            "start" => {
                let cat = rest.trim();
                if cat.is_empty() || cat.contains(char::is_whitespace) {
                    return Err(syntax(n, 7, "start takes one category"));
                }
                start = Some(Category::new(cat));
                in_tree = false;
            }
            "categories" => {
                declared = Some(rest.split_whitespace().map(Category::new).collect());
                in_tree = false;
            }
            "tree" => {
                raw_trees.push(parse_tree_header(n, rest)?);
                in_tree = true;
            }
            "family" => {
                let f = parse_family(n, rest)?;
                if families.contains_key(&f.name) {
                    return Err(syntax(n, 8, format!("duplicate family '{}'", f.name)));
                }
                families.insert(f.name.clone(), f);
                in_tree = false;
            }
            _ if in_tree => {
                let node = parse_node_line(n, line)?;
                raw_trees.last_mut().expect("in tree").nodes.push(RawNode { line: n, node });
            }
            _ => return Err(syntax(n, 1, format!("unexpected line '{line}'"))),
        }
    }

    let mut trees = BTreeMap::new();
    for raw in raw_trees {
        let line = raw.line;
        let tree = assemble(raw)?;
        check_tree(&tree, opts)?;
        if trees.contains_key(&tree.name) {
            return Err(syntax(line, 6, format!("duplicate tree '{}'", tree.name)));
        }
        trees.insert(tree.name.clone(), tree);
    }

    for f in families.values() {
        if f.trees.is_empty() {
            return Err(GrammarError::Reference(format!("family {} has no trees", f.name)));
        }
        for t in &f.trees {
            if !trees.contains_key(t) {
                return Err(GrammarError::Reference(format!("family {} names unknown tree {t}", f.name)));
            }
        }
    }

    let used: BTreeSet<Category> =
        trees.values().flat_map(|t| t.nodes().into_iter().map(|n| n.category.clone())).collect();
    let default_start = start.unwrap_or_else(|| Category::new("S"));
    let categories = match declared {
        Some(declared) => {
            if let Some(c) = used.iter().find(|c| !declared.contains(*c)) {
                return Err(GrammarError::Reference(format!("category {c} is not declared")));
            }
            declared
        }
        None => {
            let mut c = used;
            c.insert(default_start.clone());
            c
        }
    };
    if !categories.contains(&default_start) {
        return Err(GrammarError::Reference(format!("start category {default_start} is not declared")));
    }

    Ok(Grammar { categories, trees, families, default_start })
}

/// Parses a single tree block, as produced by [`write_tree`]. A leading
/// header line is accepted.
pub fn load_tree(source: &str) -> Result<ElementaryTree, GrammarError> {
    let mut lines = numbered_lines(source);
    if matches!(lines.first(), Some((_, l)) if l.trim() == HEADER) {
        lines.remove(0);
    }
    let mut iter = lines.into_iter();
    let (n, first) = iter.next().ok_or_else(|| syntax(1, 1, "expected a tree block"))?;
    let rest = first.strip_prefix("tree ").ok_or_else(|| syntax(n, 1, "expected 'tree <name> <type>'"))?;
    let mut raw = parse_tree_header(n, rest)?;
    for (n, line) in iter {
        raw.nodes.push(RawNode { line: n, node: parse_node_line(n, line)? });
    }
    let tree = assemble(raw)?;
    check_tree(&tree, LoadOptions::default())?;
    Ok(tree)
}

fn check_tree(tree: &ElementaryTree, opts: LoadOptions) -> Result<(), GrammarError> {
    let violations = tree.validate();
    if !violations.is_empty() {
        return Err(GrammarError::Invalid { tree: tree.name.clone(), violations });
    }
    let depth = tree.max_feature_depth();
    if depth > opts.max_depth {
        return Err(GrammarError::TooDeep { tree: tree.name.clone(), depth, limit: opts.max_depth });
    }
    Ok(())
}

fn numbered_lines(source: &str) -> Vec<(usize, &str)> {
    source
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l).trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect()
}

fn strip_comment(line: &str) -> &str {
    let mut in_quote = false;
    let mut prev = ' ';
    for (i, c) in line.char_indices() {
        match c {
            '"' if prev != '\\' => in_quote = !in_quote,
            '#' if !in_quote && prev.is_whitespace() => return &line[..i],
            _ => {}
        }
        prev = c;
    }
    line
}

fn parse_tree_header(n: usize, rest: &str) -> Result<RawTree, GrammarError> {
    let parts: Vec<&str> = rest.split_whitespace().collect();
    let [name, kind] = parts[..] else {
        return Err(syntax(n, 6, "expected 'tree <name> <initial|auxiliary>'"));
    };
    let tree_type = match kind {
        "initial" => TreeType::Initial,
        "auxiliary" => TreeType::Auxiliary,
        other => return Err(syntax(n, 6 + name.len() + 1, format!("unknown tree type '{other}'"))),
    };
    Ok(RawTree { line: n, name: name.to_string(), tree_type, nodes: Vec::new() })
}

fn parse_family(n: usize, rest: &str) -> Result<TreeFamily, GrammarError> {
    let (name, members) = rest.split_once(':').ok_or_else(|| syntax(n, 8, "expected 'family <name>: <trees>'"))?;
    let name = name.trim();
    if name.is_empty() || name.contains(char::is_whitespace) {
        return Err(syntax(n, 8, "family name must be a single identifier"));
    }
    Ok(TreeFamily { name: name.to_string(), trees: members.split_whitespace().map(str::to_string).collect() })
}

fn parse_node_line(n: usize, line: &str) -> Result<TreeNode, GrammarError> {
    let mut fields = line.splitn(4, char::is_whitespace);
    let addr = fields.next().unwrap_or_default();
    let cat = fields.next().ok_or_else(|| syntax(n, 1, "node line needs '<gorn> <category> <kind>'"))?;
    let kind = fields.next().ok_or_else(|| syntax(n, 1, "node line needs '<gorn> <category> <kind>'"))?;
    let rest = fields.next().unwrap_or("");
    let address: GornAddress = addr.parse().map_err(|e: super::AddressError| syntax(n, 1, e.to_string()))?;
    let kind: NodeKind = kind.parse().map_err(|e: String| syntax(n, addr.len() + cat.len() + 3, e))?;
    let mut node = TreeNode::new(address, Category::new(cat), kind);

    let base_col = line.chars().count() - rest.chars().count() + 1;
    let mut rest_pos = 0;
    let col = |pos: usize| base_col + rest[..pos].chars().count();
    let (mut seen_top, mut seen_bot, mut seen_lex) = (false, false, false);
    loop {
        let trimmed = rest[rest_pos..].trim_start();
        rest_pos = rest.len() - trimmed.len();
        if trimmed.is_empty() {
            break;
        }
        if let Some(src) = trimmed.strip_prefix("top=").or_else(|| trimmed.strip_prefix("bot=")) {
            let is_top = trimmed.starts_with("top=");
            let seen = if is_top { &mut seen_top } else { &mut seen_bot };
            if std::mem::replace(seen, true) {
                return Err(syntax(n, col(rest_pos), "repeated feature field"));
            }
            let (fs, used) = syntax_prefix(src).map_err(|e| syntax(n, col(rest_pos) + 4 + e.column - 1, e.message))?;
            if is_top {
                node.top = fs;
            } else {
                node.bottom = fs;
            }
            rest_pos += 4 + used;
        } else if let Some(src) = trimmed.strip_prefix("lex=") {
            if std::mem::replace(&mut seen_lex, true) {
                return Err(syntax(n, col(rest_pos), "repeated lex field"));
            }
            let (lex, used) = parse_quoted(src).ok_or_else(|| syntax(n, col(rest_pos) + 4, "expected a quoted lexeme"))?;
            node.lexeme = Some(lex);
            rest_pos += 4 + used;
        } else {
            return Err(syntax(n, col(rest_pos), "expected top={…}, bot={…} or lex=\"…\""));
        }
    }
    Ok(node)
}

fn parse_quoted(src: &str) -> Option<(String, usize)> {
    let body = src.strip_prefix('"')?;
    let mut out = String::new();
    let mut chars = body.char_indices();
    while let Some((i, c)) = chars.next() {
        match c {
            '"' => return Some((out, i + 2)),
            '\\' => out.push(chars.next()?.1),
            c => out.push(c),
        }
    }
    None
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

fn assemble(raw: RawTree) -> Result<ElementaryTree, GrammarError> {
    let mut nodes = raw.nodes.into_iter().peekable();
    let first = nodes.next().ok_or_else(|| syntax(raw.line, 1, format!("tree {} has no nodes", raw.name)))?;
    if !first.node.address.is_root() {
        return Err(syntax(first.line, 1, "first node of a tree must be the root (address 0)"));
    }
    let mut root = first.node;
    // Stack of the open path from the root; each entry is a child-index path.
    let mut path: Vec<usize> = Vec::new();
    for rn in nodes {
        let addr = rn.node.address.indices().to_vec();
        let (last, parent) = addr.split_last().ok_or_else(|| syntax(rn.line, 1, "duplicate root node"))?;
        while path.len() > parent.len() || path[..] != parent[..path.len()] {
            path.pop();
        }
        if path[..] != parent[..] {
            return Err(syntax(rn.line, 1, format!("node {} appears before its parent", rn.node.address)));
        }
        let parent_node = root.descendant_mut(parent).expect("open path resolves");
        if *last != parent_node.children.len() {
            return Err(syntax(rn.line, 1, format!("node {} out of preorder sequence", rn.node.address)));
        }
        parent_node.children.push(rn.node);
        path = addr;
    }
    Ok(ElementaryTree::new(raw.name, raw.tree_type, root))
}

fn write_fs_fields(out: &mut String, n: &TreeNode) {
    if !n.top.is_empty() {
        let _ = write!(out, " top={}", fs_text(&n.top));
    }
    if !n.bottom.is_empty() {
        let _ = write!(out, " bot={}", fs_text(&n.bottom));
    }
    if let Some(lex) = &n.lexeme {
        let _ = write!(out, " lex={}", quote(lex));
    }
}

fn fs_text(fs: &FeatureStructure) -> String {
    fs.to_string()
}

/// A single tree block; loads back with [`load_tree`].
pub fn write_tree(t: &ElementaryTree) -> String {
    let mut out = format!("tree {} {}\n", t.name, t.tree_type.keyword());
    for n in t.nodes() {
        let _ = write!(out, "{} {} {}", n.address, n.category, n.kind.keyword());
        write_fs_fields(&mut out, n);
        out.push('\n');
    }
    out
}

pub fn write_grammar(g: &Grammar) -> String {
    let mut out = format!("{HEADER}\nstart {}\ncategories", g.default_start);
    for c in &g.categories {
        let _ = write!(out, " {c}");
    }
    out.push('\n');
    for t in g.trees.values() {
        out.push('\n');
        out.push_str(&write_tree(t));
    }
    if !g.families.is_empty() {
        out.push('\n');
    }
    for f in g.families.values() {
        let _ = writeln!(out, "family {}: {}", f.name, f.trees.join(" "));
    }
    out
}
