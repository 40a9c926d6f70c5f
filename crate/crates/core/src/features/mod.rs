//! Attribute-value matrices for node decorations, and their unification.
//!
//! A [`FeatureStructure`] is a finite map from attribute names to
//! [`FeatureValue`]s. Re-entrancy is expressed with variables (`?X`), whose
//! values live in a separate [`Bindings`] environment. Unification is
//! non-destructive: it takes its inputs by reference and returns a fresh
//! structure together with an extended environment.

mod syntax;
mod unify;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

pub use syntax::{parse_equations, parse_structure, parse_value, SyntaxError};
pub(crate) use syntax::parse_structure_prefix;
pub use unify::{unify, unify_values, ClashKind, UnifyError};

/// Default bound on structure nesting, checked when grammars and lexicons load.
pub const DEFAULT_MAX_DEPTH: usize = 4;

/// A feature variable. Variables are scoped: `scope` 0 is the tree-local
/// namespace used in files, and each tree instance taking part in a
/// derivation is renamed into its own scope.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    pub name: String,
    pub scope: u32,
}

impl Variable {
    pub fn new(name: impl Into<String>) -> Self {
        Variable { name: name.into(), scope: 0 }
    }

    pub fn scoped(name: impl Into<String>, scope: u32) -> Self {
        Variable { name: name.into(), scope }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scope == 0 {
            write!(f, "?{}", self.name)
        } else {
            write!(f, "?{}#{}", self.name, self.scope)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureValue {
    Atom(String),
    Var(Variable),
    Struct(FeatureStructure),
}

impl FeatureValue {
    pub fn atom(s: impl Into<String>) -> Self {
        FeatureValue::Atom(s.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        FeatureValue::Var(Variable::new(name))
    }

    /// Nesting depth: atoms and variables are 0, a structure is one more
    /// than its deepest value.
    pub fn depth(&self) -> usize {
        match self {
            FeatureValue::Struct(fs) => fs.depth(),
            _ => 0,
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        match self {
            FeatureValue::Atom(_) => {}
            FeatureValue::Var(v) => {
                out.insert(v.clone());
            }
            FeatureValue::Struct(fs) => {
                for v in fs.pairs.values() {
                    v.collect_vars(out);
                }
            }
        }
    }

    fn map_vars(&self, f: &impl Fn(&Variable) -> Variable) -> FeatureValue {
        match self {
            FeatureValue::Atom(a) => FeatureValue::Atom(a.clone()),
            FeatureValue::Var(v) => FeatureValue::Var(f(v)),
            FeatureValue::Struct(fs) => FeatureValue::Struct(fs.map_vars(f)),
        }
    }
}

impl From<FeatureStructure> for FeatureValue {
    fn from(fs: FeatureStructure) -> Self {
        FeatureValue::Struct(fs)
    }
}

/// A finite map from attribute names to values. Attribute order is
/// lexicographic, which keeps printing and comparison deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureStructure {
    pairs: BTreeMap<String, FeatureValue>,
}

impl FeatureStructure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn get(&self, attr: &str) -> Option<&FeatureValue> {
        self.pairs.get(attr)
    }

    pub fn insert(&mut self, attr: impl Into<String>, value: FeatureValue) -> Option<FeatureValue> {
        self.pairs.insert(attr.into(), value)
    }

    pub fn with(mut self, attr: impl Into<String>, value: FeatureValue) -> Self {
        self.insert(attr, value);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &FeatureValue)> {
        self.pairs.iter()
    }

    /// Builds `{p1: {p2: … value}}` for a non-empty path.
    pub fn from_path(path: &[String], value: FeatureValue) -> Self {
        assert!(!path.is_empty(), "feature path must be non-empty");
        let mut value = value;
        for attr in path[1..].iter().rev() {
            value = FeatureValue::Struct(FeatureStructure::new().with(attr.clone(), value));
        }
        FeatureStructure::new().with(path[0].clone(), value)
    }

    /// Value at a path, without consulting bindings.
    pub fn at_path(&self, path: &[String]) -> Option<&FeatureValue> {
        let (first, rest) = path.split_first()?;
        let v = self.pairs.get(first)?;
        if rest.is_empty() {
            return Some(v);
        }
        match v {
            FeatureValue::Struct(fs) => fs.at_path(rest),
            _ => None,
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.pairs.values().map(FeatureValue::depth).max().unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        for v in self.pairs.values() {
            v.collect_vars(&mut out);
        }
        out
    }

    /// Moves every variable into `scope`.
    pub fn with_scope(&self, scope: u32) -> FeatureStructure {
        self.map_vars(&|v| Variable::scoped(v.name.clone(), scope))
    }

    pub(crate) fn map_vars(&self, f: &impl Fn(&Variable) -> Variable) -> FeatureStructure {
        FeatureStructure {
            pairs: self.pairs.iter().map(|(k, v)| (k.clone(), v.map_vars(f))).collect(),
        }
    }
}

impl FromIterator<(String, FeatureValue)> for FeatureStructure {
    fn from_iter<I: IntoIterator<Item = (String, FeatureValue)>>(iter: I) -> Self {
        FeatureStructure { pairs: iter.into_iter().collect() }
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Atom(a) => f.write_str(a),
            FeatureValue::Var(v) => write!(f, "{v}"),
            FeatureValue::Struct(fs) => write!(f, "{fs}"),
        }
    }
}

impl fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        f.write_str("}")
    }
}

/// Variable environment. Values may themselves be variables, forming
/// chains that resolve to a representative; the unifier keeps the
/// environment acyclic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings {
    map: BTreeMap<Variable, FeatureValue>,
}

pub(crate) enum Deref {
    Unbound(Variable),
    Bound(Variable, FeatureValue),
    Value(FeatureValue),
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, v: &Variable) -> Option<&FeatureValue> {
        self.map.get(v)
    }

    pub(crate) fn set(&mut self, v: Variable, value: FeatureValue) {
        self.map.insert(v, value);
    }

    pub(crate) fn deref(&self, value: &FeatureValue) -> Deref {
        let mut current = match value {
            FeatureValue::Var(v) => v.clone(),
            other => return Deref::Value(other.clone()),
        };
        loop {
            match self.map.get(&current) {
                None => return Deref::Unbound(current),
                Some(FeatureValue::Var(next)) => current = next.clone(),
                Some(other) => return Deref::Bound(current, other.clone()),
            }
        }
    }

    /// Representative variable of a chain (`v` itself if unbound).
    pub fn representative(&self, v: &Variable) -> Variable {
        match self.deref(&FeatureValue::Var(v.clone())) {
            Deref::Unbound(r) | Deref::Bound(r, _) => r,
            Deref::Value(_) => unreachable!(),
        }
    }

    /// Substitutes bindings throughout a value. Unbound variables are
    /// replaced by their representative; bound ones by their value.
    pub fn resolve(&self, value: &FeatureValue) -> FeatureValue {
        match self.deref(value) {
            Deref::Unbound(v) => FeatureValue::Var(v),
            Deref::Bound(_, v) | Deref::Value(v) => match v {
                FeatureValue::Struct(fs) => FeatureValue::Struct(self.resolve_structure(&fs)),
                other => other,
            },
        }
    }

    pub fn resolve_structure(&self, fs: &FeatureStructure) -> FeatureStructure {
        FeatureStructure {
            pairs: fs.pairs.iter().map(|(k, v)| (k.clone(), self.resolve(v))).collect(),
        }
    }

    /// Adds every binding of `other`, moved into `scope`. The caller ensures
    /// the scopes are disjoint.
    pub fn absorb_scoped(&mut self, other: &Bindings, scope: u32) {
        let rename = |v: &Variable| Variable::scoped(v.name.clone(), scope);
        for (k, v) in &other.map {
            self.map.insert(rename(k), v.map_vars(&rename));
        }
    }

    /// Adds every binding of `other` as is. The caller ensures the two
    /// environments share no variables.
    pub fn absorb(&mut self, other: &Bindings) {
        for (k, v) in &other.map {
            self.map.insert(k.clone(), v.clone());
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &FeatureValue)> {
        self.map.iter()
    }

    /// A rendering that is equal for two (structure, environment) pairs iff
    /// they are alphabetic variants: bindings are expanded, and only
    /// re-entrant positions are tagged (`#0`, `#1`, … in order of first
    /// occurrence). Singly-occurring unbound variables print as `_`.
    pub fn canonical(&self, fs: &FeatureStructure) -> String {
        let mut counts: HashMap<Variable, usize> = HashMap::new();
        self.count_occurrences_fs(fs, &mut counts);
        let mut tags: HashMap<Variable, usize> = HashMap::new();
        let mut out = String::new();
        self.render_fs(fs, &counts, &mut tags, &mut out);
        out
    }

    fn count_occurrences_fs(&self, fs: &FeatureStructure, counts: &mut HashMap<Variable, usize>) {
        for v in fs.pairs.values() {
            self.count_occurrences(v, counts);
        }
    }

    fn count_occurrences(&self, value: &FeatureValue, counts: &mut HashMap<Variable, usize>) {
        match self.deref(value) {
            Deref::Unbound(v) => *counts.entry(v).or_default() += 1,
            Deref::Bound(v, inner) => {
                let c = counts.entry(v).or_default();
                *c += 1;
                if *c == 1 {
                    if let FeatureValue::Struct(fs) = inner {
                        self.count_occurrences_fs(&fs, counts);
                    }
                }
            }
            Deref::Value(FeatureValue::Struct(fs)) => self.count_occurrences_fs(&fs, counts),
            Deref::Value(_) => {}
        }
    }

    fn render_fs(
        &self,
        fs: &FeatureStructure,
        counts: &HashMap<Variable, usize>,
        tags: &mut HashMap<Variable, usize>,
        out: &mut String,
    ) {
        out.push('{');
        for (i, (k, v)) in fs.pairs.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(k);
            out.push_str(": ");
            self.render_value(v, counts, tags, out);
        }
        out.push('}');
    }

    fn render_value(
        &self,
        value: &FeatureValue,
        counts: &HashMap<Variable, usize>,
        tags: &mut HashMap<Variable, usize>,
        out: &mut String,
    ) {
        let (var, inner) = match self.deref(value) {
            Deref::Unbound(v) => (Some(v), None),
            Deref::Bound(v, inner) => (Some(v), Some(inner)),
            Deref::Value(inner) => (None, Some(inner)),
        };
        if let Some(v) = var {
            if counts.get(&v).copied().unwrap_or(0) > 1 {
                if let Some(tag) = tags.get(&v) {
                    out.push_str(&format!("#{tag}"));
                    return;
                }
                let tag = tags.len();
                tags.insert(v, tag);
                out.push_str(&format!("#{tag}"));
                if inner.is_some() {
                    out.push('=');
                }
            } else if inner.is_none() {
                out.push('_');
            }
        }
        match inner {
            None => {}
            Some(FeatureValue::Atom(a)) => out.push_str(&a),
            Some(FeatureValue::Struct(fs)) => self.render_fs(&fs, counts, tags, out),
            Some(FeatureValue::Var(_)) => unreachable!("deref never yields a variable"),
        }
    }
}

/// Which of a node's two feature structures an equation addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Top,
    Bottom,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Top => "top",
            Side::Bottom => "bottom",
        })
    }
}

/// How an equation names its node. Symbolic references are resolved per
/// tree, so one lexical entry can constrain every tree of a family.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeRef {
    Root,
    /// The first anchor in preorder.
    Anchor,
    Foot,
    Address(crate::grammar::GornAddress),
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeRef::Root => f.write_str("root"),
            NodeRef::Anchor => f.write_str("anchor"),
            NodeRef::Foot => f.write_str("foot"),
            NodeRef::Address(a) => write!(f, "{a}"),
        }
    }
}

/// A lexical constraint `node.side.path = value`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureEquation {
    pub node: NodeRef,
    pub side: Side,
    pub path: Vec<String>,
    pub value: FeatureValue,
}

impl FeatureEquation {
    pub fn new(node: NodeRef, side: Side, path: &[&str], value: FeatureValue) -> Self {
        assert!(!path.is_empty(), "feature path must be non-empty");
        FeatureEquation { node, side, path: path.iter().map(|s| s.to_string()).collect(), value }
    }

    /// Depth of the structure this equation installs.
    pub fn depth(&self) -> usize {
        self.path.len() + self.value.depth()
    }
}

impl fmt::Display for FeatureEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{} = {}", self.node, self.side, self.path.join("."), self.value)
    }
}
