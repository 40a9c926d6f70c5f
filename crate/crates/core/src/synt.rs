//! Syntactic database: (root, POS) → trees, tree families and lexical
//! feature equations, plus tree selection for a word's surviving analyses.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::features::{parse_equations, parse_structure, unify, Bindings, FeatureEquation, FeatureStructure, Side};
use crate::grammar::{anchor, AnchoredTree, Category, Grammar};
use crate::morph::{DbError, MorphEntry, Pattern};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SyntEntry {
    /// Root form; words after the first are co-anchor lexemes.
    pub index_word: String,
    pub pos: Category,
    pub trees: Vec<String>,
    pub families: Vec<String>,
    pub equations: Vec<FeatureEquation>,
}

impl SyntEntry {
    pub fn new(index_word: &str, pos: &str, items: &str, equations: &str) -> Result<Self, String> {
        let (trees, families) = parse_items(items)?;
        let equations = parse_equations(equations).map_err(|e| e.to_string())?;
        Ok(SyntEntry { index_word: index_word.to_string(), pos: Category::new(pos), trees, families, equations })
    }

    /// Items as written in the database: trees bare, families with `@`.
    pub fn items(&self) -> String {
        self.trees.iter().cloned().chain(self.families.iter().map(|f| format!("@{f}"))).collect::<Vec<_>>().join(" ")
    }

    pub fn words(&self) -> Vec<&str> {
        self.index_word.split_whitespace().collect()
    }

    /// Member trees, families expanded, in name order.
    pub fn tree_names(&self, g: &Grammar) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.trees.iter().cloned().collect();
        for f in &self.families {
            if let Some(fam) = g.family(f) {
                out.extend(fam.trees.iter().cloned());
            }
        }
        out
    }

    /// Checks that every name resolves against `g`.
    pub fn validate(&self, g: &Grammar) -> Result<(), DbError> {
        if self.index_word.trim().is_empty() {
            return Err(DbError::Invalid("empty index word".into()));
        }
        if self.trees.is_empty() && self.families.is_empty() {
            return Err(DbError::Invalid(format!("{}: no trees or families", self.index_word)));
        }
        for t in &self.trees {
            if g.tree(t).is_none() {
                return Err(DbError::Invalid(format!("{}: unknown tree `{t}`", self.index_word)));
            }
        }
        for f in &self.families {
            if g.family(f).is_none() {
                return Err(DbError::Invalid(format!("{}: unknown family `{f}`", self.index_word)));
            }
        }
        Ok(())
    }
}

fn parse_items(items: &str) -> Result<(Vec<String>, Vec<String>), String> {
    let mut trees = Vec::new();
    let mut families = Vec::new();
    for it in items.split_whitespace() {
        match it.strip_prefix('@') {
            Some("") => return Err("empty family name".into()),
            Some(f) => families.push(f.to_string()),
            None => trees.push(it.to_string()),
        }
    }
    Ok((trees, families))
}

impl fmt::Display for SyntEntry {
    /// The database line: `index<TAB>pos<TAB>items<TAB>equations`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let eqs = if self.equations.is_empty() {
            "-".to_string()
        } else {
            self.equations.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
        };
        write!(f, "{}\t{}\t{}\t{}", self.index_word, self.pos, self.items(), eqs)
    }
}

pub fn parse_line(line: &str) -> Result<SyntEntry, String> {
    let f: Vec<&str> = line.split('\t').collect();
    if f.len() != 4 {
        return Err(format!("expected 4 tab-separated fields, found {}", f.len()));
    }
    if f[1].trim().is_empty() {
        return Err("empty POS".into());
    }
    SyntEntry::new(f[0], f[1].trim(), f[2], f[3])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SyntField {
    Index,
    Pos,
    Tree,
    Family,
}

impl FromStr for SyntField {
    type Err = DbError;
    fn from_str(s: &str) -> Result<Self, DbError> {
        Ok(match s {
            "index" | "root" => SyntField::Index,
            "pos" => SyntField::Pos,
            "tree" => SyntField::Tree,
            "family" => SyntField::Family,
            _ => return Err(DbError::UnknownField(s.to_string())),
        })
    }
}

/// Selection settings: trees for words without entries, and the features
/// each inflection tag contributes to the anchor.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntConfig {
    /// POS → items (`@` marks a family).
    #[serde(default)]
    pub defaults: BTreeMap<String, Vec<String>>,
    /// Inflection tag → feature structure text.
    #[serde(default)]
    pub features: BTreeMap<String, String>,
}

impl SyntConfig {
    /// POS values of `pos` with no default trees.
    pub fn missing_defaults<'a>(&self, pos: impl IntoIterator<Item = &'a Category>) -> Vec<Category> {
        pos.into_iter().filter(|p| !self.defaults.contains_key(p.as_str())).cloned().collect()
    }

    fn default_entry(&self, root: &str, pos: &Category) -> Option<SyntEntry> {
        let items = self.defaults.get(pos.as_str())?;
        let (trees, families) = parse_items(&items.join(" ")).ok()?;
        Some(SyntEntry { index_word: root.to_string(), pos: pos.clone(), trees, families, equations: Vec::new() })
    }

    /// The combined features of a set of inflection tags; tags without a
    /// mapping contribute nothing.
    pub fn inflection_features(&self, tags: &BTreeSet<String>) -> Result<FeatureStructure, String> {
        let mut fs = FeatureStructure::new();
        let mut env = Bindings::new();
        for t in tags {
            if let Some(src) = self.features.get(t) {
                let add = parse_structure(src).map_err(|e| format!("features for `{t}`: {e}"))?;
                let (merged, e) = unify(&fs, &add, &env).map_err(|e| format!("features for `{t}`: {e}"))?;
                fs = merged;
                env = e;
            }
        }
        Ok(env.resolve_structure(&fs))
    }

    /// Checks that every feature text parses.
    pub fn validate(&self) -> Result<(), String> {
        for (t, src) in &self.features {
            parse_structure(src).map_err(|e| format!("features for `{t}`: {e}"))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SyntDatabase {
    entries: BTreeSet<SyntEntry>,
}

impl SyntDatabase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &SyntEntry> {
        self.entries.iter()
    }

    pub fn contains(&self, e: &SyntEntry) -> bool {
        self.entries.contains(e)
    }

    pub fn insert(&mut self, e: SyntEntry, g: &Grammar) -> Result<(), DbError> {
        e.validate(g)?;
        if self.entries.contains(&e) {
            return Err(DbError::Duplicate(e.to_string()));
        }
        self.entries.insert(e);
        Ok(())
    }

    pub fn delete(&mut self, e: &SyntEntry) -> Result<(), DbError> {
        if self.entries.remove(e) {
            Ok(())
        } else {
            Err(DbError::NotFound(e.to_string()))
        }
    }

    /// Replaces `old` by `new`; on any error the database is unchanged.
    pub fn update(&mut self, old: &SyntEntry, new: SyntEntry, g: &Grammar) -> Result<(), DbError> {
        if !self.entries.contains(old) {
            return Err(DbError::NotFound(old.to_string()));
        }
        new.validate(g)?;
        if old != &new && self.entries.contains(&new) {
            return Err(DbError::Duplicate(new.to_string()));
        }
        self.entries.remove(old);
        self.entries.insert(new);
        Ok(())
    }

    /// Entries matching on one field. `tree` matches entries that select
    /// the tree directly or through a family.
    pub fn search(&self, field: SyntField, pattern: &Pattern, g: &Grammar) -> Vec<SyntEntry> {
        self.entries
            .iter()
            .filter(|e| match field {
                SyntField::Index => pattern.matches(&e.index_word),
                SyntField::Pos => pattern.matches(e.pos.as_str()),
                SyntField::Tree => e.tree_names(g).iter().any(|t| pattern.matches(t)),
                SyntField::Family => e.families.iter().any(|f| pattern.matches(f)),
            })
            .cloned()
            .collect()
    }

    /// Entries for a root and POS: whole-index matches, and multi-word
    /// entries whose first word is the root.
    pub fn entries_for(&self, root: &str, pos: &Category) -> Vec<&SyntEntry> {
        self.entries
            .iter()
            .filter(|e| &e.pos == pos && (e.index_word == root || e.words().first() == Some(&root)))
            .collect()
    }

    /// Multi-word index words all of whose trees have a single anchor:
    /// these are read as one token.
    pub fn phrases(&self, g: &Grammar) -> Vec<Vec<String>> {
        let mut out: BTreeSet<Vec<String>> = BTreeSet::new();
        for e in &self.entries {
            let words = e.words();
            if words.len() < 2 {
                continue;
            }
            let names = e.tree_names(g);
            if !names.is_empty() && names.iter().all(|t| g.tree(t).is_some_and(|t| t.anchors.len() == 1)) {
                out.insert(words.iter().map(|w| w.to_string()).collect());
            }
        }
        out.into_iter().collect()
    }

    pub fn load(&mut self, text: &str, g: &Grammar) -> Result<(), DbError> {
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let e = parse_line(line).map_err(|message| DbError::Syntax { line: i + 1, message })?;
            self.insert(e, g).map_err(|err| DbError::Syntax { line: i + 1, message: err.to_string() })?;
        }
        Ok(())
    }

    pub fn from_text(text: &str, g: &Grammar) -> Result<Self, DbError> {
        let mut db = SyntDatabase::new();
        db.load(text, g)?;
        Ok(db)
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|e| format!("{e}\n")).collect()
    }
}

/// Tree selection for one word. For each (POS, analysis) pair: the
/// matching entries (or the POS defaults when there are none), families
/// expanded, each tree anchored with the entry's equations and the
/// analysis's inflection features on the anchor's bottom. Trees whose
/// features clash are dropped.
pub fn select(
    g: &Grammar,
    db: &SyntDatabase,
    cfg: &SyntConfig,
    root: &str,
    candidates: &[(Category, MorphEntry)],
) -> Vec<AnchoredTree> {
    let mut out: Vec<AnchoredTree> = Vec::new();
    for (pos, entry) in candidates {
        let found = db.entries_for(root, pos);
        let default;
        let entries: Vec<&SyntEntry> = if found.is_empty() {
            default = cfg.default_entry(root, pos);
            default.iter().collect()
        } else {
            found
        };
        let Ok(infl) = cfg.inflection_features(&entry.inflections) else {
            continue;
        };
        let mut chosen: BTreeMap<String, Vec<AnchoredTree>> = BTreeMap::new();
        for e in entries {
            let words = e.words();
            let mut lexemes = vec![entry.inflected.clone()];
            if e.index_word != root {
                lexemes.extend(words[1..].iter().map(|w| w.to_string()));
            }
            for name in e.tree_names(g) {
                let Some(tree) = g.tree(&name) else { continue };
                let Ok(mut a) = anchor(tree, &lexemes, &e.equations, pos) else { continue };
                let home = a.instantiated.anchors[0].clone();
                if a.install(&home, Side::Bottom, &infl).is_err() {
                    continue;
                }
                chosen.entry(name).or_default().push(a);
            }
        }
        for a in chosen.into_values().flatten() {
            if !out.contains(&a) {
                out.push(a);
            }
        }
    }
    out
}
