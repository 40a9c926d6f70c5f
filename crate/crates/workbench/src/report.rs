//! Serializable views of pipeline results, shared by the HTTP API and the
//! command line.

use serde::Serialize;

use ltag::derived::write_derived;
use ltag::morph::MorphEntry;
use ltag::parser::Pass;
use ltag::synt::SyntEntry;
use ltag::tagger::TagSequence;
use ltag::workbench::PipelineResult;

#[derive(Debug, Serialize)]
pub struct ParseReport {
    pub tokens: Vec<String>,
    pub parsed: bool,
    pub pass: Pass,
    pub tagged: bool,
    pub truncated: bool,
    pub derivations: Vec<DerivationView>,
    pub attempts: Vec<AttemptView>,
    pub timing: TimingView,
    pub words: Vec<WordView>,
    pub tag_sequences: Vec<TagSequence>,
}

#[derive(Debug, Serialize)]
pub struct DerivationView {
    pub derivation: String,
    pub bracketed: String,
    /// Loadable text form of the derived tree.
    pub derived: String,
}

#[derive(Debug, Serialize)]
pub struct AttemptView {
    pub label: String,
    pub derivations: usize,
    pub micros: u128,
}

#[derive(Debug, Serialize)]
pub struct TimingView {
    pub filtered_micros: Option<u128>,
    pub retry_micros: Option<u128>,
    pub total_micros: u128,
}

/// What each token contributed: its surviving analyses and candidate trees.
#[derive(Debug, Serialize)]
pub struct WordView {
    pub token: String,
    pub analyses: Vec<String>,
    pub trees: Vec<String>,
}

impl ParseReport {
    pub fn new(r: &PipelineResult) -> Self {
        let o = &r.outcome;
        ParseReport {
            tokens: r.tokens.clone(),
            parsed: o.parsed(),
            pass: o.pass,
            tagged: r.tagged,
            truncated: o.truncated,
            derivations: o
                .derivations
                .iter()
                .zip(&o.derived_trees)
                .map(|(d, t)| DerivationView {
                    derivation: d.to_string(),
                    bracketed: t.root.bracketed(),
                    derived: write_derived(&t.root),
                })
                .collect(),
            attempts: o
                .attempts
                .iter()
                .map(|a| AttemptView { label: a.label.clone(), derivations: a.derivations, micros: a.duration.as_micros() })
                .collect(),
            timing: TimingView {
                filtered_micros: o.timing.filtered.map(|d| d.as_micros()),
                retry_micros: o.timing.retry.map(|d| d.as_micros()),
                total_micros: o.timing.total.as_micros(),
            },
            words: r
                .tokens
                .iter()
                .enumerate()
                .map(|(i, t)| WordView {
                    token: t.clone(),
                    analyses: r.analyses.get(i).map(|a| a.iter().map(|(_, e)| e.to_string()).collect()).unwrap_or_default(),
                    trees: r.candidates.get(i).map(|c| c.iter().map(|a| a.base.clone()).collect()).unwrap_or_default(),
                })
                .collect(),
            tag_sequences: r.tag_sequences.clone(),
        }
    }

    /// Human-readable summary.
    pub fn render(&self) -> String {
        let mut out = format!("tokens: {}\n", self.tokens.join(" | "));
        for w in &self.words {
            out.push_str(&format!("  {:<14} {}\n", w.token, w.trees.join(" ")));
        }
        for a in &self.attempts {
            out.push_str(&format!("pass {}: {} derivation(s) in {} µs\n", a.label, a.derivations, a.micros));
        }
        if self.derivations.is_empty() {
            out.push_str("no parse\n");
        }
        for (i, d) in self.derivations.iter().enumerate() {
            out.push_str(&format!("[{}] {}\n    {}\n", i + 1, d.bracketed, d.derivation));
        }
        out
    }
}

/// A morph entry as JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct MorphRow {
    pub inflected: String,
    pub root: String,
    pub pos: String,
    #[serde(default)]
    pub inflections: Vec<String>,
}

impl From<&MorphEntry> for MorphRow {
    fn from(e: &MorphEntry) -> Self {
        MorphRow {
            inflected: e.inflected.clone(),
            root: e.root.clone(),
            pos: e.pos.to_string(),
            inflections: e.inflections.iter().cloned().collect(),
        }
    }
}

impl MorphRow {
    pub fn entry(&self) -> MorphEntry {
        let tags: Vec<&str> = self.inflections.iter().map(String::as_str).collect();
        MorphEntry::new(&self.inflected, &self.root, &self.pos, &tags)
    }
}

/// A synt entry as JSON; `items` and `equations` use the database syntax.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct SyntRow {
    pub index: String,
    pub pos: String,
    pub items: String,
    #[serde(default)]
    pub equations: String,
}

impl From<&SyntEntry> for SyntRow {
    fn from(e: &SyntEntry) -> Self {
        SyntRow {
            index: e.index_word.clone(),
            pos: e.pos.to_string(),
            items: e.items(),
            equations: e.equations.iter().map(|q| q.to_string()).collect::<Vec<_>>().join("; "),
        }
    }
}

impl SyntRow {
    pub fn entry(&self) -> Result<SyntEntry, String> {
        SyntEntry::new(&self.index, &self.pos, &self.items, &self.equations)
    }
}
