//! Derived phrase-structure trees and the unification regime applied when
//! elementary trees combine.

use std::fmt;

use crate::derivation::{Derivation, OpKind, TreeUse};
use crate::features::{parse_structure_prefix, unify, Bindings, FeatureStructure, UnifyError};
use crate::grammar::{AnchoredTree, ElementaryTree, GornAddress, NodeKind, TreeNode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DerivedKind {
    Interior,
    Anchor,
    Substitution,
    Foot,
    /// A word at the fringe.
    Lexeme,
}

impl DerivedKind {
    fn keyword(self) -> &'static str {
        match self {
            DerivedKind::Interior => "interior",
            DerivedKind::Anchor => "anchor",
            DerivedKind::Substitution => "subst",
            DerivedKind::Foot => "foot",
            DerivedKind::Lexeme => "lexeme",
        }
    }

    fn glyph(self) -> &'static str {
        match self {
            DerivedKind::Anchor => "◊",
            DerivedKind::Substitution => "↓",
            DerivedKind::Foot => "*",
            _ => "",
        }
    }
}

impl From<NodeKind> for DerivedKind {
    fn from(k: NodeKind) -> Self {
        match k {
            NodeKind::Interior => DerivedKind::Interior,
            NodeKind::Anchor => DerivedKind::Anchor,
            NodeKind::Substitution => DerivedKind::Substitution,
            NodeKind::Foot => DerivedKind::Foot,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedNode {
    pub label: String,
    pub kind: DerivedKind,
    pub top: FeatureStructure,
    pub bottom: FeatureStructure,
    pub children: Vec<DerivedNode>,
}

impl DerivedNode {
    pub fn new(label: impl Into<String>, kind: DerivedKind) -> Self {
        DerivedNode {
            label: label.into(),
            kind,
            top: FeatureStructure::new(),
            bottom: FeatureStructure::new(),
            children: Vec::new(),
        }
    }

    pub fn lexeme(word: impl Into<String>) -> Self {
        DerivedNode::new(word, DerivedKind::Lexeme)
    }

    /// Converts an elementary tree, moving its variables into `scope`.
    /// Lexicalized anchors get their word as a child leaf.
    pub fn from_elementary(tree: &ElementaryTree, scope: u32) -> Self {
        Self::from_tree_node(&tree.root, scope)
    }

    pub fn from_tree_node(n: &TreeNode, scope: u32) -> Self {
        let mut out = DerivedNode {
            label: n.category.to_string(),
            kind: n.kind.into(),
            top: n.top.with_scope(scope),
            bottom: n.bottom.with_scope(scope),
            children: n.children.iter().map(|c| Self::from_tree_node(c, scope)).collect(),
        };
        if let Some(lex) = &n.lexeme {
            out.children.push(DerivedNode::lexeme(lex.clone()));
        }
        out
    }

    pub fn node_at(&self, addr: &GornAddress) -> Option<&DerivedNode> {
        let mut n = self;
        for &i in addr.indices() {
            n = n.children.get(i)?;
        }
        Some(n)
    }

    pub fn node_at_mut(&mut self, addr: &GornAddress) -> Option<&mut DerivedNode> {
        let mut n = self;
        for &i in addr.indices() {
            n = n.children.get_mut(i)?;
        }
        Some(n)
    }

    /// Nodes in preorder with their addresses.
    pub fn preorder(&self) -> Vec<(GornAddress, &DerivedNode)> {
        let mut out = Vec::new();
        let mut stack = vec![(GornAddress::root(), self)];
        while let Some((a, n)) = stack.pop() {
            for (i, c) in n.children.iter().enumerate().rev() {
                stack.push((a.child(i), c));
            }
            out.push((a, n));
        }
        out
    }

    pub fn count_nodes(&self) -> usize {
        1 + self.children.iter().map(DerivedNode::count_nodes).sum::<usize>()
    }

    pub fn count_leaves(&self) -> usize {
        if self.children.is_empty() {
            1
        } else {
            self.children.iter().map(DerivedNode::count_leaves).sum()
        }
    }

    /// The words at the fringe, left to right.
    pub fn fringe(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_fringe(&mut out);
        out
    }

    fn collect_fringe(&self, out: &mut Vec<String>) {
        if self.kind == DerivedKind::Lexeme {
            out.push(self.label.clone());
        }
        for c in &self.children {
            c.collect_fringe(out);
        }
    }

    /// Addresses of unfilled substitution nodes.
    pub fn open_substitution_sites(&self) -> Vec<GornAddress> {
        self.preorder()
            .into_iter()
            .filter(|(_, n)| n.kind == DerivedKind::Substitution)
            .map(|(a, _)| a)
            .collect()
    }

    pub fn resolved(&self, env: &Bindings) -> DerivedNode {
        DerivedNode {
            label: self.label.clone(),
            kind: self.kind,
            top: env.resolve_structure(&self.top),
            bottom: env.resolve_structure(&self.bottom),
            children: self.children.iter().map(|c| c.resolved(env)).collect(),
        }
    }

    /// `(S (NP John) (VP (V loves) (NP Mary)))`; feet are marked `*` and
    /// open substitution sites `↓`.
    pub fn bracketed(&self) -> String {
        let mut out = String::new();
        self.write_bracketed(&mut out);
        out
    }

    fn write_bracketed(&self, out: &mut String) {
        if self.kind == DerivedKind::Lexeme {
            out.push_str(&self.label);
            return;
        }
        out.push('(');
        out.push_str(&self.label);
        match self.kind {
            DerivedKind::Foot => out.push('*'),
            DerivedKind::Substitution => out.push('↓'),
            _ => {}
        }
        for c in &self.children {
            out.push(' ');
            c.write_bracketed(out);
        }
        out.push(')');
    }
}

/// Number of internal (non-leaf) nodes.
pub fn count_constituents(t: &DerivedNode) -> usize {
    t.count_nodes() - t.count_leaves()
}

/// A derived tree together with the environment its features live in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedTree {
    pub root: DerivedNode,
    pub env: Bindings,
}

impl DerivedTree {
    pub fn resolved(&self) -> DerivedNode {
        self.root.resolved(&self.env)
    }
}

/// `site.top ⊔ incoming_root.top`: the top structure of the node that
/// replaces the substitution site.
pub fn substitution_unify(
    site: &DerivedNode,
    incoming_root: &DerivedNode,
    env: &Bindings,
) -> Result<(FeatureStructure, Bindings), UnifyError> {
    unify(&site.top, &incoming_root.top, env)
}

/// Result of adjoining at a node: the new top of the auxiliary root and
/// the new bottom of the foot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjoined {
    pub root_top: FeatureStructure,
    pub foot_bottom: FeatureStructure,
    pub env: Bindings,
}

/// Which of the two adjunction equations failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdjunctionClash {
    /// `site.top ⊔ aux root.top`
    Top(UnifyError),
    /// `site.bottom ⊔ aux foot.bottom`
    Bottom(UnifyError),
}

impl fmt::Display for AdjunctionClash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdjunctionClash::Top(e) => write!(f, "top: {e}"),
            AdjunctionClash::Bottom(e) => write!(f, "bottom: {e}"),
        }
    }
}

pub fn adjunction_unify(
    site: &DerivedNode,
    aux_root: &DerivedNode,
    aux_foot: &DerivedNode,
    env: &Bindings,
) -> Result<Adjoined, AdjunctionClash> {
    let (root_top, env) = unify(&site.top, &aux_root.top, env).map_err(AdjunctionClash::Top)?;
    let (foot_bottom, env) = unify(&site.bottom, &aux_foot.bottom, &env).map_err(AdjunctionClash::Bottom)?;
    Ok(Adjoined { root_top, foot_bottom, env })
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CombineError {
    #[error("no node at address {0}")]
    AddressNotFound(GornAddress),
    #[error("category mismatch at {address}: site is {site}, incoming tree is {incoming}")]
    CategoryMismatch { address: GornAddress, site: String, incoming: String },
    #[error("cannot {op} at {address}: {reason}")]
    OperationMismatch { address: GornAddress, op: &'static str, reason: String },
    #[error("feature clash at {address}: {clash}")]
    Substitution { address: GornAddress, clash: UnifyError },
    #[error("feature clash at {address}: {clash}")]
    Adjunction { address: GornAddress, clash: AdjunctionClash },
}

impl CombineError {
    /// The failing feature path, for unification failures.
    pub fn feature_path(&self) -> Option<&[String]> {
        match self {
            CombineError::Substitution { clash, .. } => Some(&clash.path),
            CombineError::Adjunction { clash: AdjunctionClash::Top(e) | AdjunctionClash::Bottom(e), .. } => Some(&e.path),
            _ => None,
        }
    }
}

fn find_foot(n: &DerivedNode, addr: GornAddress) -> Option<GornAddress> {
    if n.kind == DerivedKind::Foot {
        return Some(addr);
    }
    n.children.iter().enumerate().find_map(|(i, c)| find_foot(c, addr.child(i)))
}

/// Replaces the substitution node at `addr` with `incoming`. On failure
/// `host` is left unchanged.
pub fn substitute(
    host: &mut DerivedNode,
    addr: &GornAddress,
    incoming: DerivedNode,
    env: &Bindings,
) -> Result<Bindings, CombineError> {
    let site = host.node_at(addr).ok_or_else(|| CombineError::AddressNotFound(addr.clone()))?;
    if site.kind != DerivedKind::Substitution {
        return Err(CombineError::OperationMismatch {
            address: addr.clone(),
            op: "substitute",
            reason: format!("{} node is not a substitution node", site.kind.keyword()),
        });
    }
    if site.label != incoming.label {
        return Err(CombineError::CategoryMismatch {
            address: addr.clone(),
            site: site.label.clone(),
            incoming: incoming.label.clone(),
        });
    }
    if find_foot(&incoming, GornAddress::root()).is_some() {
        return Err(CombineError::OperationMismatch {
            address: addr.clone(),
            op: "substitute",
            reason: "auxiliary trees can only be adjoined".into(),
        });
    }
    let (top, env) = substitution_unify(site, &incoming, env)
        .map_err(|clash| CombineError::Substitution { address: addr.clone(), clash })?;
    let mut incoming = incoming;
    incoming.top = top;
    *host.node_at_mut(addr).expect("checked above") = incoming;
    Ok(env)
}

/// Splices the auxiliary tree `aux` in at the interior node `addr`; the
/// node's subtree moves beneath the foot. On failure `host` is unchanged.
pub fn adjoin(
    host: &mut DerivedNode,
    addr: &GornAddress,
    aux: DerivedNode,
    env: &Bindings,
) -> Result<Bindings, CombineError> {
    let site = host.node_at(addr).ok_or_else(|| CombineError::AddressNotFound(addr.clone()))?;
    if site.kind != DerivedKind::Interior {
        return Err(CombineError::OperationMismatch {
            address: addr.clone(),
            op: "adjoin",
            reason: format!("adjunction needs an interior node, found {}", site.kind.keyword()),
        });
    }
    let foot_addr = find_foot(&aux, GornAddress::root()).ok_or_else(|| CombineError::OperationMismatch {
        address: addr.clone(),
        op: "adjoin",
        reason: "incoming tree has no foot node".into(),
    })?;
    if site.label != aux.label {
        return Err(CombineError::CategoryMismatch {
            address: addr.clone(),
            site: site.label.clone(),
            incoming: aux.label.clone(),
        });
    }
    let foot = aux.node_at(&foot_addr).expect("found above");
    let adj = adjunction_unify(site, &aux, foot, env)
        .map_err(|clash| CombineError::Adjunction { address: addr.clone(), clash })?;
    let mut aux = aux;
    aux.top = adj.root_top;
    let site_node = std::mem::replace(host.node_at_mut(addr).expect("checked above"), DerivedNode::new("", DerivedKind::Interior));
    let foot = aux.node_at_mut(&foot_addr).expect("found above");
    foot.kind = site_node.kind;
    foot.bottom = adj.foot_bottom;
    foot.children = site_node.children;
    *host.node_at_mut(addr).expect("checked above") = aux;
    Ok(adj.env)
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("top/bottom clash at {address}: {clash}")]
pub struct FinalizeError {
    pub address: GornAddress,
    pub clash: UnifyError,
}

/// Unifies top and bottom at every node, in preorder. Returns the tree with
/// both sides replaced by the merged structure.
pub fn finalize(root: &DerivedNode, env: &Bindings) -> Result<(DerivedNode, Bindings), FinalizeError> {
    let mut env = env.clone();
    let mut out = root.clone();
    for (addr, _) in root.preorder() {
        let n = out.node_at_mut(&addr).expect("same shape");
        if n.kind == DerivedKind::Lexeme {
            continue;
        }
        let (merged, e) =
            unify(&n.top, &n.bottom, &env).map_err(|clash| FinalizeError { address: addr.clone(), clash })?;
        n.top = merged.clone();
        n.bottom = merged;
        env = e;
    }
    Ok((out, env))
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("malformed derivation: {0}")]
    Malformed(String),
    #[error("{tree}: {error}")]
    Combine { tree: String, error: CombineError },
    #[error(transparent)]
    Finalize(#[from] FinalizeError),
}

fn lookup<'a>(u: &TreeUse, candidates: &'a [Vec<AnchoredTree>]) -> Result<&'a AnchoredTree, ExtractError> {
    let at = candidates
        .get(u.position)
        .and_then(|c| c.get(u.candidate))
        .ok_or_else(|| ExtractError::Malformed(format!("no candidate {}:{}", u.position, u.candidate)))?;
    if at.base != u.tree || at.lexemes != u.lexemes {
        return Err(ExtractError::Malformed(format!(
            "candidate {}:{} is {}, not {}",
            u.position, u.candidate, at.base, u.tree
        )));
    }
    Ok(at)
}

/// Builds the derived tree of `d` without the final top/bottom collapse.
pub fn build_derived(d: &Derivation, candidates: &[Vec<AnchoredTree>]) -> Result<DerivedTree, ExtractError> {
    let mut env = Bindings::new();
    let root = build(d, candidates, &mut env)?;
    Ok(DerivedTree { root, env })
}

fn build(d: &Derivation, candidates: &[Vec<AnchoredTree>], env: &mut Bindings) -> Result<DerivedNode, ExtractError> {
    let at = lookup(&d.root, candidates)?;
    let scope = d.root.scope();
    env.absorb_scoped(&at.bindings, scope);
    let mut node = DerivedNode::from_elementary(&at.instantiated, scope);
    let mut ops: Vec<_> = d.operations.iter().collect();
    // Deepest and rightmost first: an adjunction only moves nodes below
    // its target, and those have been handled by then.
    ops.sort_by(|a, b| b.target.cmp(&a.target));
    for w in ops.windows(2) {
        if w[0].target == w[1].target {
            return Err(ExtractError::Malformed(format!("two operations at {} of {}", w[0].target, d.root.tree)));
        }
    }
    for op in ops {
        let elementary = at
            .instantiated
            .node(&op.target)
            .ok_or_else(|| ExtractError::Malformed(format!("{} has no node {}", d.root.tree, op.target)))?;
        let child = build(&op.child, candidates, env)?;
        let child_aux = lookup(&op.child.root, candidates)?.instantiated.is_auxiliary();
        let result = match op.kind {
            OpKind::Substitution => {
                if elementary.kind != NodeKind::Substitution || child_aux {
                    return Err(ExtractError::Malformed(format!("substitution at {} of {}", op.target, d.root.tree)));
                }
                substitute(&mut node, &op.target, child, env)
            }
            OpKind::Adjunction => {
                if elementary.kind != NodeKind::Interior || !child_aux {
                    return Err(ExtractError::Malformed(format!("adjunction at {} of {}", op.target, d.root.tree)));
                }
                adjoin(&mut node, &op.target, child, env)
            }
        };
        *env = result.map_err(|error| ExtractError::Combine { tree: d.root.tree.clone(), error })?;
    }
    Ok(node)
}

/// The finalized derived tree of `d`, with features resolved. Fails if any
/// combination or the final top/bottom collapse fails.
pub fn extract_derived(d: &Derivation, candidates: &[Vec<AnchoredTree>]) -> Result<DerivedTree, ExtractError> {
    let built = build_derived(d, candidates)?;
    let (root, env) = finalize(&built.root, &built.env)?;
    Ok(DerivedTree { root: root.resolved(&env), env })
}

/// Line-oriented text form, one node per line in preorder:
/// `<gorn> <label> <kind> [top={…}] [bot={…}]`, labels quoted.
pub fn write_derived(n: &DerivedNode) -> String {
    let mut out = String::from("derived\n");
    for (addr, node) in n.preorder() {
        out.push_str(&format!("{} {} {}", addr, quote(&node.label), node.kind.keyword()));
        if !node.top.is_empty() {
            out.push_str(&format!(" top={}", node.top));
        }
        if !node.bottom.is_empty() {
            out.push_str(&format!(" bot={}", node.bottom));
        }
        out.push('\n');
    }
    out
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

fn unquote(s: &str) -> Option<(String, &str)> {
    let body = s.strip_prefix('"')?;
    let mut out = String::new();
    let mut chars = body.char_indices();
    while let Some((i, c)) = chars.next() {
        match c {
            '"' => return Some((out, &body[i + 1..])),
            '\\' => out.push(chars.next()?.1),
            c => out.push(c),
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("derived tree text, line {line}: {message}")]
pub struct DerivedSyntaxError {
    pub line: usize,
    pub message: String,
}

pub fn load_derived(src: &str) -> Result<DerivedNode, DerivedSyntaxError> {
    let mut lines = src.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let err = |line: usize, message: &str| DerivedSyntaxError { line, message: message.to_string() };
    match lines.next() {
        Some((_, "derived")) => {}
        Some((n, _)) => return Err(err(n, "expected 'derived'")),
        None => return Err(err(1, "expected 'derived'")),
    }
    let mut root: Option<DerivedNode> = None;
    for (n, line) in lines {
        let (addr, rest) = line.split_once(' ').ok_or_else(|| err(n, "expected a node line"))?;
        let addr: GornAddress = addr.parse().map_err(|_| err(n, "bad address"))?;
        let (label, rest) = unquote(rest.trim_start()).ok_or_else(|| err(n, "expected a quoted label"))?;
        let rest = rest.trim_start();
        let (kind, mut rest) = rest.split_once(' ').unwrap_or((rest, ""));
        let kind = match kind {
            "interior" => DerivedKind::Interior,
            "anchor" => DerivedKind::Anchor,
            "subst" => DerivedKind::Substitution,
            "foot" => DerivedKind::Foot,
            "lexeme" => DerivedKind::Lexeme,
            _ => return Err(err(n, "unknown node kind")),
        };
        let mut node = DerivedNode::new(label, kind);
        loop {
            rest = rest.trim_start();
            if rest.is_empty() {
                break;
            }
            let (is_top, src) = if let Some(s) = rest.strip_prefix("top=") {
                (true, s)
            } else if let Some(s) = rest.strip_prefix("bot=") {
                (false, s)
            } else {
                return Err(err(n, "expected top={…} or bot={…}"));
            };
            let (fs, used) = parse_structure_prefix(src).map_err(|e| err(n, &e.to_string()))?;
            if is_top {
                node.top = fs;
            } else {
                node.bottom = fs;
            }
            rest = &src[used..];
        }
        match (&mut root, addr.parent()) {
            (None, None) => root = Some(node),
            (Some(r), Some(parent)) => {
                let p = r.node_at_mut(&parent).ok_or_else(|| err(n, "node before its parent"))?;
                if addr.last_index() != Some(p.children.len()) {
                    return Err(err(n, "node out of preorder sequence"));
                }
                p.children.push(node);
            }
            _ => return Err(err(n, "misplaced root")),
        }
    }
    root.ok_or_else(|| err(1, "no nodes"))
}

/// Deterministic layered SVG rendering: leaves take successive columns,
/// parents are centred over their children, features print beneath labels.
pub fn to_svg(root: &DerivedNode) -> String {
    const COL: f64 = 90.0;
    const ROW: f64 = 70.0;
    const LINE: f64 = 13.0;

    struct Placed {
        x: f64,
        y: f64,
        label: String,
        features: Vec<String>,
        parent: Option<usize>,
    }

    fn place(n: &DerivedNode, depth: usize, parent: Option<usize>, next_col: &mut usize, out: &mut Vec<Placed>) -> f64 {
        let idx = out.len();
        let mut features = Vec::new();
        if !n.top.is_empty() {
            features.push(format!("top: {}", n.top));
        }
        if !n.bottom.is_empty() && n.bottom != n.top {
            features.push(format!("bot: {}", n.bottom));
        }
        out.push(Placed {
            x: 0.0,
            y: 20.0 + depth as f64 * ROW,
            label: format!("{}{}", n.label, n.kind.glyph()),
            features,
            parent,
        });
        let x = if n.children.is_empty() {
            let x = 40.0 + *next_col as f64 * COL;
            *next_col += 1;
            x
        } else {
            let xs: Vec<f64> = n.children.iter().map(|c| place(c, depth + 1, Some(idx), next_col, out)).collect();
            (xs[0] + xs[xs.len() - 1]) / 2.0
        };
        out[idx].x = x;
        x
    }

    fn esc(s: &str) -> String {
        s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
    }

    let mut placed = Vec::new();
    let mut cols = 0;
    place(root, 0, None, &mut cols, &mut placed);
    let depth = placed.iter().map(|p| p.y).fold(0.0, f64::max);
    let width = 80.0 + cols.max(1) as f64 * COL;
    let height = depth + ROW;

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" font-family=\"monospace\" font-size=\"12\">\n"
    );
    for p in &placed {
        if let Some(parent) = p.parent {
            let q = &placed[parent];
            let y1 = q.y + 4.0 + q.features.len() as f64 * LINE;
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
                q.x,
                y1,
                p.x,
                p.y - 12.0
            ));
        }
    }
    for p in &placed {
        out.push_str(&format!(
            "<text class=\"label\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            p.x,
            p.y,
            esc(&p.label)
        ));
        for (i, f) in p.features.iter().enumerate() {
            out.push_str(&format!(
                "<text class=\"features\" x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"9\">{}</text>\n",
                p.x,
                p.y + (i + 1) as f64 * LINE,
                esc(f)
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::parse_structure;

    fn node(label: &str, kind: DerivedKind, top: &str, bot: &str) -> DerivedNode {
        let mut n = DerivedNode::new(label, kind);
        n.top = parse_structure(top).unwrap();
        n.bottom = parse_structure(bot).unwrap();
        n
    }

    fn jlm() -> DerivedNode {
        let mut s = DerivedNode::new("S", DerivedKind::Interior);
        let mut np = DerivedNode::new("NP", DerivedKind::Anchor);
        np.children.push(DerivedNode::lexeme("John"));
        let mut vp = DerivedNode::new("VP", DerivedKind::Interior);
        let mut v = DerivedNode::new("V", DerivedKind::Anchor);
        v.children.push(DerivedNode::lexeme("loves"));
        let mut np2 = DerivedNode::new("NP", DerivedKind::Anchor);
        np2.children.push(DerivedNode::lexeme("Mary"));
        vp.children = vec![v, np2];
        s.children = vec![np, vp];
        s
    }

    #[test]
    fn constituents_and_bracketing() {
        let t = jlm();
        assert_eq!(t.bracketed(), "(S (NP John) (VP (V loves) (NP Mary)))");
        assert_eq!(count_constituents(&t), 5);
        assert_eq!(count_constituents(&DerivedNode::lexeme("x")), 0);
        assert_eq!(t.fringe(), vec!["John", "loves", "Mary"]);
    }

    #[test]
    fn substitution_keeps_site_features() {
        let site = node("NP", DerivedKind::Substitution, "{case: nom}", "{}");
        let root = node("NP", DerivedKind::Interior, "{}", "{}");
        let (top, _) = substitution_unify(&site, &root, &Bindings::new()).unwrap();
        assert_eq!(top.to_string(), "{case: nom}");
        let acc = node("NP", DerivedKind::Interior, "{case: acc}", "{}");
        assert!(substitution_unify(&site, &acc, &Bindings::new()).is_err());
    }

    #[test]
    fn substitution_category_mismatch_leaves_host() {
        let mut host = DerivedNode::new("S", DerivedKind::Interior);
        host.children.push(node("NP", DerivedKind::Substitution, "{}", "{}"));
        let before = host.clone();
        let err = substitute(&mut host, &"1".parse().unwrap(), DerivedNode::new("S", DerivedKind::Interior), &Bindings::new())
            .unwrap_err();
        assert!(matches!(err, CombineError::CategoryMismatch { .. }));
        assert_eq!(host, before);
    }

    #[test]
    fn adjunction_unify_cases() {
        let site = node("VP", DerivedKind::Interior, "{}", "{tense: pres}");
        let root = node("VP", DerivedKind::Interior, "{}", "{}");
        let foot = node("VP", DerivedKind::Foot, "{}", "{tense: pres}");
        assert!(adjunction_unify(&site, &root, &foot, &Bindings::new()).is_ok());
        let past = node("VP", DerivedKind::Foot, "{}", "{tense: past}");
        assert!(matches!(
            adjunction_unify(&site, &root, &past, &Bindings::new()),
            Err(AdjunctionClash::Bottom(_))
        ));
        let empty = node("VP", DerivedKind::Interior, "{}", "{}");
        let r = adjunction_unify(&empty, &root, &node("VP", DerivedKind::Foot, "{}", "{}"), &Bindings::new()).unwrap();
        assert!(r.env.is_empty());
    }

    #[test]
    fn adjoin_splices_under_foot() {
        let mut host = DerivedNode::new("S", DerivedKind::Interior);
        let mut vp = DerivedNode::new("VP", DerivedKind::Interior);
        vp.children.push(DerivedNode::new("V", DerivedKind::Anchor));
        host.children.push(vp);
        let mut aux = DerivedNode::new("VP", DerivedKind::Interior);
        aux.children.push(DerivedNode::new("Adv", DerivedKind::Anchor));
        aux.children.push(DerivedNode::new("VP", DerivedKind::Foot));
        adjoin(&mut host, &"1".parse().unwrap(), aux, &Bindings::new()).unwrap();
        assert_eq!(host.bracketed(), "(S (VP (Adv) (VP (V))))");
        assert_eq!(host.node_at(&"1.2".parse().unwrap()).unwrap().kind, DerivedKind::Interior);
    }

    #[test]
    fn finalize_cases() {
        let empty = node("S", DerivedKind::Interior, "{}", "{}");
        assert!(finalize(&empty, &Bindings::new()).is_ok());
        let mut clash = DerivedNode::new("S", DerivedKind::Interior);
        clash.children.push(node("VP", DerivedKind::Interior, "{mode: ind}", "{mode: inf}"));
        let err = finalize(&clash, &Bindings::new()).unwrap_err();
        assert_eq!(err.address.to_string(), "1");
        let var = node("S", DerivedKind::Interior, "{mode: ?X}", "{mode: ind}");
        let (_, env) = finalize(&var, &Bindings::new()).unwrap();
        assert_eq!(env.resolve(&crate::features::FeatureValue::var("X")).to_string(), "ind");
    }

    #[test]
    fn text_form_round_trips() {
        let mut t = jlm();
        t.top = parse_structure("{mode: ind, agr: ?A#3}").unwrap();
        t.children[0].children[0] = DerivedNode::lexeme("a \"quoted\" word");
        let text = write_derived(&t);
        assert_eq!(load_derived(&text).unwrap(), t);
    }

    #[test]
    fn svg_single_node() {
        let svg = to_svg(&DerivedNode::new("NP", DerivedKind::Interior));
        assert_eq!(svg.matches("class=\"label\"").count(), 1);
        assert!(!svg.contains("<line"));
        let svg = to_svg(&jlm());
        assert_eq!(svg.matches("class=\"label\"").count(), 8);
        assert_eq!(svg.matches("<line").count(), 7);
        assert_eq!(svg, to_svg(&jlm()));
    }
}
