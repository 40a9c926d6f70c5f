//! Morphological database and analyzer: inflected form → (root, POS,
//! inflection tags), with maintenance operations and guesses for unknown
//! words.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::grammar::Category;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MorphEntry {
    pub inflected: String,
    pub root: String,
    pub pos: Category,
    pub inflections: BTreeSet<String>,
}

impl MorphEntry {
    pub fn new(inflected: &str, root: &str, pos: &str, tags: &[&str]) -> Self {
        MorphEntry {
            inflected: inflected.to_string(),
            root: root.to_string(),
            pos: Category::new(pos),
            inflections: tags.iter().map(|t| t.to_string()).collect(),
        }
    }

    fn sort_key(&self) -> (&str, &Category, &str, &BTreeSet<String>) {
        (&self.inflected, &self.pos, &self.root, &self.inflections)
    }
}

impl fmt::Display for MorphEntry {
    /// The database line: `inflected<TAB>root<TAB>pos<TAB>tag,tag`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tags = if self.inflections.is_empty() {
            "-".to_string()
        } else {
            self.inflections.iter().cloned().collect::<Vec<_>>().join(",")
        };
        write!(f, "{}\t{}\t{}\t{}", self.inflected, self.root, self.pos, tags)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DbError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("entry already present: {0}")]
    Duplicate(String),
    #[error("no such entry: {0}")]
    NotFound(String),
    #[error("invalid entry: {0}")]
    Invalid(String),
    #[error("unknown search field `{0}`")]
    UnknownField(String),
}

/// Which inflection tags each POS may carry. POS values absent from the
/// table may carry none.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AllowedTags(pub BTreeMap<String, BTreeSet<String>>);

impl AllowedTags {
    pub fn check(&self, e: &MorphEntry) -> Result<(), DbError> {
        if e.inflected.trim().is_empty() || e.root.trim().is_empty() {
            return Err(DbError::Invalid("inflected form and root must be non-empty".into()));
        }
        let allowed = self.0.get(e.pos.as_str());
        for t in &e.inflections {
            if !allowed.is_some_and(|a| a.contains(t)) {
                return Err(DbError::Invalid(format!("tag `{t}` not allowed for POS {}", e.pos)));
            }
        }
        Ok(())
    }
}

/// One guess produced by a default rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guess {
    pub pos: String,
    #[serde(default)]
    pub tags: Vec<String>,
    /// Remove the matched suffix to obtain the root.
    #[serde(default)]
    pub strip: bool,
    /// After stripping, reduce a doubled final consonant (`flibb` → `flib`).
    /// `l`, `s`, `z` and `f` are left doubled.
    #[serde(default)]
    pub undouble: bool,
}

fn undouble(root: &str) -> &str {
    let b = root.as_bytes();
    let n = b.len();
    if n >= 3 && b[n - 1] == b[n - 2] && b[n - 1].is_ascii_alphabetic() && !b"aeioulszf".contains(&b[n - 1].to_ascii_lowercase()) {
        &root[..n - 1]
    } else {
        root
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuffixRule {
    pub suffix: String,
    pub guesses: Vec<Guess>,
}

/// Heuristics for words missing from the database. Rules are tried in
/// order: capitalization, then the longest matching suffix, then the
/// fallback.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefaultRules {
    pub proper_noun: String,
    /// Minimum length of the root left after stripping a suffix.
    #[serde(default = "default_min_root")]
    pub min_root: usize,
    pub suffixes: Vec<SuffixRule>,
    pub fallback: Vec<Guess>,
}

fn default_min_root() -> usize {
    2
}

impl DefaultRules {
    pub fn guess(&self, word: &str) -> Vec<MorphEntry> {
        let make = |g: &Guess, root: &str| MorphEntry {
            inflected: word.to_string(),
            root: root.to_string(),
            pos: Category::new(g.pos.as_str()),
            inflections: g.tags.iter().cloned().collect(),
        };
        if word.chars().next().is_some_and(char::is_uppercase) {
            return vec![MorphEntry::new(word, word, &self.proper_noun, &[])];
        }
        let lower = word.to_lowercase();
        let rule = self
            .suffixes
            .iter()
            .filter(|r| lower.ends_with(&r.suffix) && lower.chars().count() >= r.suffix.chars().count() + self.min_root)
            .max_by_key(|r| r.suffix.len());
        let mut out: Vec<MorphEntry> = match rule {
            Some(r) => r
                .guesses
                .iter()
                .map(|g| {
                    let mut root = if g.strip { &word[..word.len() - r.suffix.len()] } else { word };
                    if g.undouble {
                        root = undouble(root);
                    }
                    make(g, root)
                })
                .collect(),
            None => self.fallback.iter().map(|g| make(g, word)).collect(),
        };
        if out.is_empty() {
            out.push(MorphEntry::new(word, word, &self.proper_noun, &[]));
        }
        out
    }
}

impl Default for DefaultRules {
    fn default() -> Self {
        let g = |pos: &str, tags: &[&str], strip: bool| Guess {
            pos: pos.into(),
            tags: tags.iter().map(|t| t.to_string()).collect(),
            strip,
            undouble: strip,
        };
        DefaultRules {
            proper_noun: "PropN".into(),
            min_root: 2,
            suffixes: vec![
                SuffixRule { suffix: "s".into(), guesses: vec![g("N", &["pl"], true), g("V", &["3sg", "pres"], true)] },
                SuffixRule { suffix: "ed".into(), guesses: vec![g("V", &["past"], true), g("N", &["sg"], false)] },
                SuffixRule { suffix: "ing".into(), guesses: vec![g("V", &["gerund"], true)] },
                SuffixRule { suffix: "ly".into(), guesses: vec![g("Ad", &[], false)] },
            ],
            fallback: vec![g("N", &["sg"], false), g("V", &["base"], false)],
        }
    }
}

/// Fields that [`MorphDatabase::search`] can match on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MorphField {
    Inflected,
    Root,
    Pos,
    Inflection,
}

impl FromStr for MorphField {
    type Err = DbError;
    fn from_str(s: &str) -> Result<Self, DbError> {
        Ok(match s {
            "inflected" => MorphField::Inflected,
            "root" => MorphField::Root,
            "pos" => MorphField::Pos,
            "inflection" => MorphField::Inflection,
            _ => return Err(DbError::UnknownField(s.to_string())),
        })
    }
}

/// A literal, or a prefix when written with a trailing `*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    Exact(String),
    Prefix(String),
}

impl Pattern {
    pub fn parse(s: &str) -> Pattern {
        match s.strip_suffix('*') {
            Some(p) => Pattern::Prefix(p.to_string()),
            None => Pattern::Exact(s.to_string()),
        }
    }

    pub fn matches(&self, s: &str) -> bool {
        match self {
            Pattern::Exact(p) => s == p,
            Pattern::Prefix(p) => s.starts_with(p.as_str()),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct MorphDatabase {
    index: BTreeMap<String, Vec<MorphEntry>>,
    allowed: Option<AllowedTags>,
    defaults: DefaultRules,
}

impl PartialEq for MorphDatabase {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index
    }
}

impl MorphDatabase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Validates every insertion against `allowed`.
    pub fn with_allowed(mut self, allowed: AllowedTags) -> Self {
        self.allowed = Some(allowed);
        self
    }

    pub fn with_defaults(mut self, defaults: DefaultRules) -> Self {
        self.defaults = defaults;
        self
    }

    pub fn defaults(&self) -> &DefaultRules {
        &self.defaults
    }

    pub fn len(&self) -> usize {
        self.index.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// All entries, ordered by inflected form, then POS.
    pub fn entries(&self) -> impl Iterator<Item = &MorphEntry> {
        self.index.values().flatten()
    }

    /// Exact match on the surface form, falling back to its lowercase.
    pub fn lookup(&self, word: &str) -> Vec<MorphEntry> {
        if let Some(v) = self.index.get(word) {
            return v.clone();
        }
        let lower = word.to_lowercase();
        self.index.get(&lower).cloned().unwrap_or_default()
    }

    /// Guesses for a word, per the configured heuristics.
    pub fn default_entries(&self, word: &str) -> Vec<MorphEntry> {
        self.defaults.guess(word)
    }

    /// Stored analyses, or guesses when there are none.
    pub fn analyze(&self, word: &str) -> Vec<MorphEntry> {
        let found = self.lookup(word);
        if found.is_empty() {
            self.default_entries(word)
        } else {
            found
        }
    }

    pub fn contains(&self, e: &MorphEntry) -> bool {
        self.index.get(&e.inflected).is_some_and(|v| v.contains(e))
    }

    pub fn insert(&mut self, e: MorphEntry) -> Result<(), DbError> {
        if let Some(a) = &self.allowed {
            a.check(&e)?;
        } else if e.inflected.trim().is_empty() || e.root.trim().is_empty() {
            return Err(DbError::Invalid("inflected form and root must be non-empty".into()));
        }
        let v = self.index.entry(e.inflected.clone()).or_default();
        if v.contains(&e) {
            return Err(DbError::Duplicate(e.to_string()));
        }
        let at = v.partition_point(|x| x.sort_key() < e.sort_key());
        v.insert(at, e);
        Ok(())
    }

    pub fn delete(&mut self, e: &MorphEntry) -> Result<(), DbError> {
        let v = self.index.get_mut(&e.inflected).ok_or_else(|| DbError::NotFound(e.to_string()))?;
        let at = v.iter().position(|x| x == e).ok_or_else(|| DbError::NotFound(e.to_string()))?;
        v.remove(at);
        if v.is_empty() {
            self.index.remove(&e.inflected);
        }
        Ok(())
    }

    /// Replaces `old` by `new`; on any error the database is unchanged.
    pub fn update(&mut self, old: &MorphEntry, new: MorphEntry) -> Result<(), DbError> {
        let mut next = self.clone();
        next.delete(old)?;
        next.insert(new)?;
        *self = next;
        Ok(())
    }

    pub fn search(&self, field: MorphField, pattern: &Pattern) -> Vec<MorphEntry> {
        self.entries()
            .filter(|e| match field {
                MorphField::Inflected => pattern.matches(&e.inflected),
                MorphField::Root => pattern.matches(&e.root),
                MorphField::Pos => pattern.matches(e.pos.as_str()),
                MorphField::Inflection => e.inflections.iter().any(|t| pattern.matches(t)),
            })
            .cloned()
            .collect()
    }

    /// Parses the tab-separated text format. `#` lines and blank lines are
    /// skipped; `-` stands for an empty tag set.
    pub fn load(&mut self, text: &str) -> Result<(), DbError> {
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let e = parse_line(line).map_err(|message| DbError::Syntax { line: line_no, message })?;
            self.insert(e).map_err(|err| DbError::Syntax { line: line_no, message: err.to_string() })?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, DbError> {
        let mut db = MorphDatabase::new();
        db.load(text)?;
        Ok(db)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in self.entries() {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }
}

pub fn parse_line(line: &str) -> Result<MorphEntry, String> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 4 {
        return Err(format!("expected 4 tab-separated fields, found {}", fields.len()));
    }
    let tags = fields[3].trim();
    let inflections = if tags.is_empty() || tags == "-" {
        BTreeSet::new()
    } else {
        tags.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect()
    };
    if fields[2].trim().is_empty() {
        return Err("empty POS".into());
    }
    Ok(MorphEntry {
        inflected: fields[0].to_string(),
        root: fields[1].to_string(),
        pos: Category::new(fields[2].trim()),
        inflections,
    })
}
