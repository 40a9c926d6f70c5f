//! Elementary trees, tree families and anchoring.

mod format;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::features::{self, Bindings, FeatureEquation, FeatureStructure, NodeRef, Side, UnifyError};

pub use format::{load_grammar, load_grammar_with, load_tree, write_grammar, write_tree, GrammarError, LoadOptions};

/// A syntactic category or part-of-speech tag.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Category(String);

impl Category {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "category names are non-empty");
        Category(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Category {
    fn from(s: &str) -> Self {
        Category::new(s)
    }
}

/// Path from the root as 0-based child indices. Printed in the customary
/// form: the root is `0`, its children `1`, `2`, …, grandchildren `2.1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GornAddress(Vec<usize>);

impl GornAddress {
    pub fn root() -> Self {
        GornAddress(Vec::new())
    }

    pub fn from_indices(indices: Vec<usize>) -> Self {
        GornAddress(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, index: usize) -> Self {
        let mut v = self.0.clone();
        v.push(index);
        GornAddress(v)
    }

    pub fn parent(&self) -> Option<GornAddress> {
        if self.0.is_empty() {
            None
        } else {
            Some(GornAddress(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn last_index(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for GornAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{}", c + 1)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("invalid Gorn address '{0}'")]
pub struct AddressError(String);

impl FromStr for GornAddress {
    type Err = AddressError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(GornAddress::root());
        }
        s.split('.')
            .map(|part| match part.parse::<usize>() {
                Ok(n) if n >= 1 => Ok(n - 1),
                _ => Err(AddressError(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(GornAddress)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Interior,
    Anchor,
    Substitution,
    Foot,
}

impl NodeKind {
    pub fn keyword(self) -> &'static str {
        match self {
            NodeKind::Interior => "interior",
            NodeKind::Anchor => "anchor",
            NodeKind::Substitution => "subst",
            NodeKind::Foot => "foot",
        }
    }

    /// Display glyph: ◊ anchor, ↓ substitution, * foot.
    pub fn glyph(self) -> &'static str {
        match self {
            NodeKind::Interior => "",
            NodeKind::Anchor => "◊",
            NodeKind::Substitution => "↓",
            NodeKind::Foot => "*",
        }
    }

    pub fn is_leaf(self) -> bool {
        self != NodeKind::Interior
    }
}

impl FromStr for NodeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "interior" => Ok(NodeKind::Interior),
            "anchor" => Ok(NodeKind::Anchor),
            "subst" | "substitution" => Ok(NodeKind::Substitution),
            "foot" => Ok(NodeKind::Foot),
            other => Err(format!("unknown node kind '{other}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub address: GornAddress,
    pub category: Category,
    pub kind: NodeKind,
    pub top: FeatureStructure,
    pub bottom: FeatureStructure,
    /// Set on anchor nodes once the tree is lexicalized.
    pub lexeme: Option<String>,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn new(address: GornAddress, category: impl Into<Category>, kind: NodeKind) -> Self {
        TreeNode {
            address,
            category: category.into(),
            kind,
            top: FeatureStructure::new(),
            bottom: FeatureStructure::new(),
            lexeme: None,
            children: Vec::new(),
        }
    }

    pub fn side(&self, side: Side) -> &FeatureStructure {
        match side {
            Side::Top => &self.top,
            Side::Bottom => &self.bottom,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut FeatureStructure {
        match side {
            Side::Top => &mut self.top,
            Side::Bottom => &mut self.bottom,
        }
    }

    /// Preorder traversal.
    pub fn preorder(&self) -> Vec<&TreeNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(n.children.iter().rev());
        }
        out
    }

    fn for_each_mut(&mut self, f: &mut impl FnMut(&mut TreeNode)) {
        f(self);
        for c in &mut self.children {
            c.for_each_mut(f);
        }
    }

    /// Node at a path relative to this node.
    pub fn descendant(&self, rel: &[usize]) -> Option<&TreeNode> {
        let mut n = self;
        for &i in rel {
            n = n.children.get(i)?;
        }
        Some(n)
    }

    pub fn descendant_mut(&mut self, rel: &[usize]) -> Option<&mut TreeNode> {
        let mut n = self;
        for &i in rel {
            n = n.children.get_mut(i)?;
        }
        Some(n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeType {
    Initial,
    Auxiliary,
}

impl TreeType {
    pub fn keyword(self) -> &'static str {
        match self {
            TreeType::Initial => "initial",
            TreeType::Auxiliary => "auxiliary",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryTree {
    pub name: String,
    pub tree_type: TreeType,
    pub root: TreeNode,
    pub anchors: Vec<GornAddress>,
    pub foot: Option<GornAddress>,
}

/// One broken structural rule, located at a node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub address: GornAddress,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at address {}", self.message, self.address)
    }
}

impl ElementaryTree {
    /// Builds a tree, deriving the anchor list and foot from node kinds.
    pub fn new(name: impl Into<String>, tree_type: TreeType, root: TreeNode) -> Self {
        let mut anchors = Vec::new();
        let mut foot = None;
        for n in root.preorder() {
            match n.kind {
                NodeKind::Anchor => anchors.push(n.address.clone()),
                NodeKind::Foot if foot.is_none() => foot = Some(n.address.clone()),
                _ => {}
            }
        }
        ElementaryTree { name: name.into(), tree_type, root, anchors, foot }
    }

    pub fn is_auxiliary(&self) -> bool {
        self.tree_type == TreeType::Auxiliary
    }

    pub fn node(&self, address: &GornAddress) -> Option<&TreeNode> {
        self.root.descendant(address.indices())
    }

    pub fn node_mut(&mut self, address: &GornAddress) -> Option<&mut TreeNode> {
        self.root.descendant_mut(address.indices())
    }

    pub fn nodes(&self) -> Vec<&TreeNode> {
        self.root.preorder()
    }

    pub fn resolve_ref(&self, r: &NodeRef) -> Option<GornAddress> {
        let addr = match r {
            NodeRef::Root => GornAddress::root(),
            NodeRef::Anchor => self.anchors.first()?.clone(),
            NodeRef::Foot => self.foot.clone()?,
            NodeRef::Address(a) => a.clone(),
        };
        self.node(&addr).map(|_| addr)
    }

    /// Every structural rule the tree breaks; empty iff well-formed.
    pub fn validate(&self) -> Vec<Violation> {
        validate_tree(self)
    }

    pub fn max_feature_depth(&self) -> usize {
        self.nodes()
            .iter()
            .flat_map(|n| [n.top.depth(), n.bottom.depth()])
            .max()
            .unwrap_or(0)
    }

    /// Moves every feature variable of the tree into `scope`.
    pub fn with_scope(&self, scope: u32) -> ElementaryTree {
        let mut t = self.clone();
        t.root.for_each_mut(&mut |n| {
            n.top = n.top.with_scope(scope);
            n.bottom = n.bottom.with_scope(scope);
        });
        t
    }
}

pub fn validate_tree(t: &ElementaryTree) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut feet = Vec::new();
    let mut anchor_nodes = Vec::new();
    check_node(&t.root, &GornAddress::root(), &mut out, &mut feet, &mut anchor_nodes);

    match t.tree_type {
        TreeType::Initial => {
            for f in &feet {
                out.push(Violation { address: f.clone(), message: "foot node in initial tree".into() });
            }
        }
        TreeType::Auxiliary => {
            if feet.is_empty() {
                out.push(Violation { address: GornAddress::root(), message: "auxiliary tree has no foot node".into() });
            }
            if feet.len() > 1 {
                for f in &feet[1..] {
                    out.push(Violation { address: f.clone(), message: "multiple feet in auxiliary tree".into() });
                }
            }
            for f in &feet {
                if let Some(n) = t.node(f) {
                    if n.category != t.root.category {
                        out.push(Violation { address: f.clone(), message: "foot/root category mismatch".into() });
                    }
                }
            }
        }
    }
    if t.foot != feet.first().cloned() && !(t.tree_type == TreeType::Initial && t.foot.is_none()) {
        out.push(Violation {
            address: t.foot.clone().unwrap_or_default(),
            message: "declared foot does not match the foot node".into(),
        });
    }
    if t.anchors.is_empty() {
        out.push(Violation { address: GornAddress::root(), message: "tree has no anchor".into() });
    }
    for a in &t.anchors {
        match t.node(a) {
            Some(n) if n.kind == NodeKind::Anchor => {}
            _ => out.push(Violation { address: a.clone(), message: "anchor address does not name an anchor node".into() }),
        }
    }
    for a in &anchor_nodes {
        if !t.anchors.contains(a) {
            out.push(Violation { address: a.clone(), message: "anchor node missing from the anchor list".into() });
        }
    }
    out
}

fn check_node(
    n: &TreeNode,
    expected: &GornAddress,
    out: &mut Vec<Violation>,
    feet: &mut Vec<GornAddress>,
    anchors: &mut Vec<GornAddress>,
) {
    if &n.address != expected {
        out.push(Violation {
            address: expected.clone(),
            message: format!("node records address {} but sits at {}", n.address, expected),
        });
    }
    match n.kind {
        NodeKind::Interior if n.children.is_empty() => {
            out.push(Violation { address: expected.clone(), message: "interior node without children".into() })
        }
        NodeKind::Interior => {}
        kind => {
            if !n.children.is_empty() {
                out.push(Violation {
                    address: expected.clone(),
                    message: format!("{} node has children", kind.keyword()),
                });
            }
            if kind == NodeKind::Substitution && !n.bottom.is_empty() {
                out.push(Violation {
                    address: expected.clone(),
                    message: "substitution node carries a bottom feature structure".into(),
                });
            }
            if kind == NodeKind::Foot {
                feet.push(expected.clone());
            }
            if kind == NodeKind::Anchor {
                anchors.push(expected.clone());
            }
        }
    }
    for (i, c) in n.children.iter().enumerate() {
        check_node(c, &expected.child(i), out, feet, anchors);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeFamily {
    pub name: String,
    pub trees: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    pub categories: BTreeSet<Category>,
    pub trees: BTreeMap<String, ElementaryTree>,
    pub families: BTreeMap<String, TreeFamily>,
    pub default_start: Category,
}

impl Grammar {
    pub fn tree(&self, name: &str) -> Option<&ElementaryTree> {
        self.trees.get(name)
    }

    pub fn family(&self, name: &str) -> Option<&TreeFamily> {
        self.families.get(name)
    }

    /// Trees not listed in any family.
    pub fn individual_trees(&self) -> Vec<&str> {
        let in_family: BTreeSet<&str> =
            self.families.values().flat_map(|f| f.trees.iter().map(String::as_str)).collect();
        self.trees.keys().map(String::as_str).filter(|n| !in_family.contains(n)).collect()
    }

    /// Families that list `tree`.
    pub fn families_of(&self, tree: &str) -> Vec<&str> {
        self.families
            .values()
            .filter(|f| f.trees.iter().any(|t| t == tree))
            .map(|f| f.name.as_str())
            .collect()
    }
}

/// An elementary tree lexicalized for one word, as selected by the
/// syntactic database. Feature variables are tree-local (scope 0); the
/// bindings produced by the lexical equations travel with the tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchoredTree {
    pub base: String,
    pub lexemes: Vec<String>,
    pub instantiated: ElementaryTree,
    pub origin_pos: Category,
    pub bindings: Bindings,
}

impl AnchoredTree {
    pub fn tree(&self) -> &ElementaryTree {
        &self.instantiated
    }

    /// Unifies `fs` into one side of a node, keeping the tree on failure.
    pub fn install(&mut self, address: &GornAddress, side: Side, fs: &FeatureStructure) -> Result<(), UnifyError> {
        let node = self.instantiated.node_mut(address).expect("address resolved by caller");
        let (merged, env) = features::unify(node.side(side), fs, &self.bindings)?;
        *node.side_mut(side) = merged;
        self.bindings = env;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AnchorError {
    #[error("tree {tree} has {expected} anchor(s) but {got} lexeme(s) were given")]
    LexemeCount { tree: String, expected: usize, got: usize },
    #[error("equation {equation} names no node of tree {tree}")]
    UnresolvedNode { tree: String, equation: String },
    #[error("equation {equation} is incompatible with tree {tree}: {failure}")]
    Unification { tree: String, equation: String, failure: UnifyError },
}

/// Lexicalizes `tree`: installs the lexemes at its anchors (in preorder)
/// and unifies each equation into the addressed node.
pub fn anchor(
    tree: &ElementaryTree,
    lexemes: &[String],
    equations: &[FeatureEquation],
    pos: &Category,
) -> Result<AnchoredTree, AnchorError> {
    if lexemes.len() != tree.anchors.len() {
        return Err(AnchorError::LexemeCount {
            tree: tree.name.clone(),
            expected: tree.anchors.len(),
            got: lexemes.len(),
        });
    }
    let mut instantiated = tree.clone();
    for (addr, lex) in tree.anchors.iter().zip(lexemes) {
        instantiated.node_mut(addr).expect("anchor addresses resolve").lexeme = Some(lex.clone());
    }
    let mut out = AnchoredTree {
        base: tree.name.clone(),
        lexemes: lexemes.to_vec(),
        instantiated,
        origin_pos: pos.clone(),
        bindings: Bindings::new(),
    };
    for eq in equations {
        let addr = tree.resolve_ref(&eq.node).ok_or_else(|| AnchorError::UnresolvedNode {
            tree: tree.name.clone(),
            equation: eq.to_string(),
        })?;
        let fs = FeatureStructure::from_path(&eq.path, eq.value.clone());
        out.install(&addr, eq.side, &fs).map_err(|failure| AnchorError::Unification {
            tree: tree.name.clone(),
            equation: eq.to_string(),
            failure,
        })?;
    }
    Ok(out)
}
