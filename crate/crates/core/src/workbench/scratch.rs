//! Named partial derived trees built by hand, one substitution or
//! adjunction at a time, with undo.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::derivation::OpKind;
use crate::derived::{adjoin, finalize, substitute, CombineError, DerivedNode, FinalizeError};
use crate::features::{parse_equations, Bindings, SyntaxError};
use crate::grammar::{anchor, AnchorError, GornAddress, Grammar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScratchTree {
    pub root: DerivedNode,
    pub env: Bindings,
    /// Elementary trees used, in the order they were added.
    pub trees: Vec<String>,
}

impl ScratchTree {
    /// The tree with its variable bindings applied.
    pub fn resolved(&self) -> DerivedNode {
        self.root.resolved(&self.env)
    }

    /// The tree as a complete parse would see it: top and bottom unified
    /// everywhere.
    pub fn finalized(&self) -> Result<DerivedNode, FinalizeError> {
        let (root, env) = finalize(&self.root, &self.env)?;
        Ok(root.resolved(&env))
    }
}

/// What to bring to a combination.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// A fresh copy of a grammar tree, lexicalized with `lexemes` (none
    /// leaves the anchors empty) and optional feature equations written as
    /// in the syntactic database.
    Tree {
        name: String,
        #[serde(default)]
        lexemes: Vec<String>,
        #[serde(default)]
        equations: String,
    },
    /// Another scratch tree, which is consumed.
    Scratch(String),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ScratchError {
    #[error("no tree `{0}` in the grammar")]
    UnknownTree(String),
    #[error("no scratch tree `{0}`")]
    UnknownScratch(String),
    #[error("scratch tree `{0}` already exists")]
    Duplicate(String),
    #[error("a scratch tree cannot be combined into itself")]
    SelfCombination,
    #[error("equations: {0}")]
    Equations(#[from] SyntaxError),
    #[error(transparent)]
    Anchor(#[from] AnchorError),
    #[error(transparent)]
    Combine(#[from] CombineError),
    #[error("nothing to undo")]
    NothingToUndo,
}

impl ScratchError {
    /// The failing feature path, for unification failures.
    pub fn feature_path(&self) -> Option<&[String]> {
        match self {
            ScratchError::Combine(e) => e.feature_path(),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombineReport {
    pub target: String,
    pub address: GornAddress,
    pub op: OpKind,
    pub result: ScratchTree,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Step {
    /// Prior state of each touched name; `None` means it did not exist.
    prior: Vec<(String, Option<ScratchTree>)>,
    next_scope: u32,
}

/// One user's scratch trees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScratchArea {
    trees: BTreeMap<String, ScratchTree>,
    history: Vec<Step>,
    next_scope: u32,
}

impl Default for ScratchArea {
    fn default() -> Self {
        ScratchArea { trees: BTreeMap::new(), history: Vec::new(), next_scope: 1 }
    }
}

impl ScratchArea {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&ScratchTree> {
        self.trees.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.trees.keys().map(String::as_str)
    }

    pub fn undo_depth(&self) -> usize {
        self.history.len()
    }

    fn instantiate(&mut self, g: &Grammar, name: &str, lexemes: &[String], equations: &str) -> Result<ScratchTree, ScratchError> {
        let tree = g.tree(name).ok_or_else(|| ScratchError::UnknownTree(name.to_string()))?;
        let equations = parse_equations(equations)?;
        let scope = self.next_scope;
        let mut env = Bindings::new();
        let root = if lexemes.is_empty() && equations.is_empty() {
            DerivedNode::from_elementary(tree, scope)
        } else {
            let a = anchor(tree, lexemes, &equations, &tree.root.category)?;
            env.absorb_scoped(&a.bindings, scope);
            DerivedNode::from_elementary(&a.instantiated, scope)
        };
        self.next_scope += 1;
        Ok(ScratchTree { root, env, trees: vec![name.to_string()] })
    }

    /// Starts a scratch tree from a grammar tree.
    pub fn create(&mut self, g: &Grammar, name: &str, tree: &str, lexemes: &[String]) -> Result<&ScratchTree, ScratchError> {
        self.create_with(g, name, tree, lexemes, "")
    }

    /// Like [`ScratchArea::create`], applying feature equations as the
    /// syntactic database would.
    pub fn create_with(
        &mut self,
        g: &Grammar,
        name: &str,
        tree: &str,
        lexemes: &[String],
        equations: &str,
    ) -> Result<&ScratchTree, ScratchError> {
        if self.trees.contains_key(name) {
            return Err(ScratchError::Duplicate(name.to_string()));
        }
        let before = self.next_scope;
        let t = self.instantiate(g, tree, lexemes, equations)?;
        self.history.push(Step { prior: vec![(name.to_string(), None)], next_scope: before });
        Ok(self.trees.entry(name.to_string()).or_insert(t))
    }

    /// Substitutes or adjoins `source` at `address` of `target`. On failure
    /// nothing changes and the error says why, down to the clashing feature
    /// path.
    pub fn combine(
        &mut self,
        g: &Grammar,
        target: &str,
        address: &GornAddress,
        source: &Source,
        op: OpKind,
    ) -> Result<CombineReport, ScratchError> {
        let host = self.trees.get(target).ok_or_else(|| ScratchError::UnknownScratch(target.to_string()))?.clone();
        let before = self.next_scope;
        let incoming = match source {
            Source::Tree { name, lexemes, equations } => self.instantiate(g, name, lexemes, equations)?,
            Source::Scratch(s) if s == target => return Err(ScratchError::SelfCombination),
            Source::Scratch(s) => self.trees.get(s).ok_or_else(|| ScratchError::UnknownScratch(s.clone()))?.clone(),
        };
        let mut root = host.root.clone();
        let mut env = host.env.clone();
        env.absorb(&incoming.env);
        let result = match op {
            OpKind::Substitution => substitute(&mut root, address, incoming.root, &env),
            OpKind::Adjunction => adjoin(&mut root, address, incoming.root, &env),
        };
        let env = match result {
            Ok(env) => env,
            Err(e) => {
                self.next_scope = before;
                return Err(e.into());
            }
        };
        let mut trees = host.trees.clone();
        trees.extend(incoming.trees);
        let combined = ScratchTree { root, env, trees };
        let mut prior = vec![(target.to_string(), Some(host))];
        if let Source::Scratch(s) = source {
            prior.push((s.clone(), self.trees.remove(s)));
        }
        self.history.push(Step { prior, next_scope: before });
        self.trees.insert(target.to_string(), combined.clone());
        Ok(CombineReport { target: target.to_string(), address: address.clone(), op, result: combined })
    }

    pub fn remove(&mut self, name: &str) -> Result<ScratchTree, ScratchError> {
        let t = self.trees.remove(name).ok_or_else(|| ScratchError::UnknownScratch(name.to_string()))?;
        self.history.push(Step { prior: vec![(name.to_string(), Some(t.clone()))], next_scope: self.next_scope });
        Ok(t)
    }

    /// Reverts the latest create, combine or remove; returns the names it
    /// touched.
    pub fn undo(&mut self) -> Result<Vec<String>, ScratchError> {
        let step = self.history.pop().ok_or(ScratchError::NothingToUndo)?;
        let mut names = Vec::new();
        for (name, prior) in step.prior {
            match prior {
                Some(t) => self.trees.insert(name.clone(), t),
                None => self.trees.remove(&name),
            };
            names.push(name);
        }
        self.next_scope = step.next_scope;
        Ok(names)
    }
}
