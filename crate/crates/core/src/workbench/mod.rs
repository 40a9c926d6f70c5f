//! The end-to-end pipeline and the state a grammar developer works on:
//! configuration, a file-backed workspace, hand combination of trees and
//! tree export.

mod export;
mod scratch;
mod tokenize;

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use export::{export_derived, export_elementary, ExportFormat};
pub use scratch::{CombineReport, ScratchArea, ScratchError, ScratchTree, Source};
pub use tokenize::{tokenize, tokenize_with};

use crate::grammar::{load_grammar, write_grammar, AnchoredTree, Category, Grammar, GrammarError};
use crate::morph::{AllowedTags, DbError, DefaultRules, MorphDatabase, MorphEntry};
use crate::parser::{ParseOptions, ParseOutcome, Pass, Timing};
use crate::stats::{parse_unfiltered, parse_with_retry, StatsTable};
use crate::synt::{select, SyntConfig, SyntDatabase};
use crate::tagger::{blend, parse_tagged_corpus, unblended, TagSequence, Tagger, TaggerError};

/// Names the workspace directory; read by [`Workspace::from_env`].
pub const WORKSPACE_ENV: &str = "LTAG_WORKSPACE";
pub const CONFIG_FILE: &str = "workspace.toml";
/// Where a trained tagger is saved when the config names no model file.
pub const TAGGER_MODEL_FILE: &str = "tagger.model";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaggerMode {
    #[default]
    #[serde(alias = "on")]
    Enabled,
    #[serde(alias = "off")]
    Disabled,
    /// Tagged first; untagged again if that finds no parse.
    #[serde(alias = "retry")]
    RetryOnFailure,
}

impl fmt::Display for TaggerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TaggerMode::Enabled => "enabled",
            TaggerMode::Disabled => "disabled",
            TaggerMode::RetryOnFailure => "retry-on-failure",
        })
    }
}

impl FromStr for TaggerMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "enabled" | "on" => Ok(TaggerMode::Enabled),
            "disabled" | "off" => Ok(TaggerMode::Disabled),
            "retry-on-failure" | "retry" => Ok(TaggerMode::RetryOnFailure),
            _ => Err(format!("unknown tagger mode `{s}` (expected on, off or retry)")),
        }
    }
}

/// Data files, relative to the workspace directory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkspaceFiles {
    pub grammar: PathBuf,
    pub morph: PathBuf,
    pub synt: PathBuf,
    pub lexicon: PathBuf,
    pub stats: Option<PathBuf>,
    /// A saved tagger model; preferred over `tagger_corpus`.
    pub tagger_model: Option<PathBuf>,
    /// A `word/TAG` corpus to train the tagger from.
    pub tagger_corpus: Option<PathBuf>,
}

impl Default for WorkspaceFiles {
    fn default() -> Self {
        WorkspaceFiles {
            grammar: "grammar.ltag".into(),
            morph: "morph.tsv".into(),
            synt: "synt.tsv".into(),
            lexicon: "lexicon.toml".into(),
            stats: Some("stats.tsv".into()),
            tagger_model: None,
            tagger_corpus: Some("tagged.txt".into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub start_category: String,
    pub tagger_mode: TaggerMode,
    pub n_best: usize,
    pub top_k: usize,
    /// With this off, every candidate goes to the parser in one pass.
    pub stats_filter: bool,
    pub derivation_cap: usize,
    pub online_unification: bool,
    pub files: WorkspaceFiles,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let p = ParseOptions::default();
        PipelineConfig {
            start_category: "S".into(),
            tagger_mode: TaggerMode::Enabled,
            n_best: 3,
            top_k: crate::stats::DEFAULT_TOP_K,
            stats_filter: true,
            derivation_cap: p.derivation_cap,
            online_unification: p.online_unification,
            files: WorkspaceFiles::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), WorkspaceError> {
        for (name, v) in [("n_best", self.n_best), ("top_k", self.top_k), ("derivation_cap", self.derivation_cap)] {
            if v == 0 {
                return Err(WorkspaceError::Config(format!("{name} must be at least 1")));
            }
        }
        if self.start_category.trim().is_empty() {
            return Err(WorkspaceError::Config("start_category is empty".into()));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self, WorkspaceError> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| WorkspaceError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn parse_options(&self) -> ParseOptions {
        ParseOptions { derivation_cap: self.derivation_cap, online_unification: self.online_unification }
    }
}

/// `lexicon.toml`: morphology tag constraints and defaults, synt defaults
/// and inflection features.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Lexicon {
    pub morph: MorphSection,
    pub synt: SyntConfig,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MorphSection {
    pub allowed: Option<AllowedTags>,
    pub defaults: Option<DefaultRules>,
}

impl Lexicon {
    pub fn from_toml(text: &str) -> Result<Self, WorkspaceError> {
        let lex: Lexicon = toml::from_str(text).map_err(|e| WorkspaceError::Config(format!("lexicon: {e}")))?;
        lex.synt.validate().map_err(WorkspaceError::Config)?;
        Ok(lex)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("lexicon serializes")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum WorkspaceError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Grammar { path: PathBuf, source: GrammarError },
    #[error("{path}: {source}")]
    Db { path: PathBuf, source: DbError },
    #[error("{path}: {source}")]
    Tagger { path: PathBuf, source: TaggerError },
    #[error("configuration: {0}")]
    Config(String),
}

/// Everything the pipeline reads.
#[derive(Clone, Debug)]
pub struct Workspace {
    /// Directory the files came from, if any.
    pub root: Option<PathBuf>,
    pub config: PipelineConfig,
    pub grammar: Grammar,
    pub morph: MorphDatabase,
    pub synt: SyntDatabase,
    pub lexicon: Lexicon,
    pub stats: StatsTable,
    pub tagger: Option<Tagger>,
}

/// Files of the bundled sample workspace.
pub mod sample {
    pub const GRAMMAR: &str = include_str!("../../data/sample/grammar.ltag");
    pub const MORPH: &str = include_str!("../../data/sample/morph.tsv");
    pub const SYNT: &str = include_str!("../../data/sample/synt.tsv");
    pub const LEXICON: &str = include_str!("../../data/sample/lexicon.toml");
    pub const STATS: &str = include_str!("../../data/sample/stats.tsv");
    pub const TAGGED: &str = include_str!("../../data/sample/tagged.txt");
    pub const CORPUS: &str = include_str!("../../data/sample/corpus.txt");
    pub const GOLD: &str = include_str!("../../data/sample/gold.txt");
    pub const CONFIG: &str = include_str!("../../data/sample/workspace.toml");

    /// Fixture sentences with their expected grammaticality.
    pub fn corpus() -> Vec<(String, bool)> {
        super::read_corpus(CORPUS)
    }
}

/// One sentence per line; `*` marks an ungrammatical one, `#` a comment.
pub fn read_corpus(text: &str) -> Vec<(String, bool)> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| match l.strip_prefix('*') {
            Some(rest) => (rest.trim().to_string(), false),
            None => (l.to_string(), true),
        })
        .collect()
}

struct Sources<'a> {
    grammar: (&'a Path, String),
    morph: (&'a Path, String),
    synt: (&'a Path, String),
    lexicon: (&'a Path, String),
    stats: Option<(&'a Path, String)>,
    tagger_model: Option<(&'a Path, String)>,
    tagger_corpus: Option<(&'a Path, String)>,
}

impl Workspace {
    /// The bundled sample grammar and databases.
    pub fn sample() -> Workspace {
        let config = PipelineConfig::from_toml(sample::CONFIG).expect("sample config is valid");
        let f = &config.files;
        let src = Sources {
            grammar: (&f.grammar, sample::GRAMMAR.into()),
            morph: (&f.morph, sample::MORPH.into()),
            synt: (&f.synt, sample::SYNT.into()),
            lexicon: (&f.lexicon, sample::LEXICON.into()),
            stats: Some((Path::new("stats.tsv"), sample::STATS.into())),
            tagger_model: None,
            tagger_corpus: Some((Path::new("tagged.txt"), sample::TAGGED.into())),
        };
        Self::assemble(None, config.clone(), src).expect("sample workspace is valid")
    }

    /// Reads `workspace.toml` and the files it names from `dir`.
    pub fn open(dir: impl AsRef<Path>) -> Result<Workspace, WorkspaceError> {
        let dir = dir.as_ref();
        let cfg_path = dir.join(CONFIG_FILE);
        let config = PipelineConfig::from_toml(&read(&cfg_path)?)?;
        let f = config.files.clone();
        let optional = |p: &Option<PathBuf>| -> Result<Option<String>, WorkspaceError> {
            p.as_ref().map(|p| read(&dir.join(p))).transpose()
        };
        let src = Sources {
            grammar: (&f.grammar, read(&dir.join(&f.grammar))?),
            morph: (&f.morph, read(&dir.join(&f.morph))?),
            synt: (&f.synt, read(&dir.join(&f.synt))?),
            lexicon: (&f.lexicon, read(&dir.join(&f.lexicon))?),
            stats: f.stats.as_deref().zip(optional(&f.stats)?),
            tagger_model: f.tagger_model.as_deref().zip(optional(&f.tagger_model)?),
            tagger_corpus: match f.tagger_model {
                Some(_) => None,
                None => f.tagger_corpus.as_deref().zip(optional(&f.tagger_corpus)?),
            },
        };
        Self::assemble(Some(dir.to_path_buf()), config, src)
    }

    /// The directory named by `LTAG_WORKSPACE`, or the sample workspace.
    pub fn from_env() -> Result<Workspace, WorkspaceError> {
        match std::env::var_os(WORKSPACE_ENV) {
            Some(dir) if !dir.is_empty() => Workspace::open(PathBuf::from(dir)),
            _ => Ok(Workspace::sample()),
        }
    }

    fn assemble(root: Option<PathBuf>, config: PipelineConfig, src: Sources<'_>) -> Result<Workspace, WorkspaceError> {
        let grammar =
            load_grammar(&src.grammar.1).map_err(|source| WorkspaceError::Grammar { path: src.grammar.0.into(), source })?;
        let lexicon = Lexicon::from_toml(&src.lexicon.1)?;
        let db_err = |p: &Path| {
            let path = p.to_path_buf();
            move |source| WorkspaceError::Db { path, source }
        };
        let mut morph = MorphDatabase::new();
        if let Some(a) = &lexicon.morph.allowed {
            morph = morph.with_allowed(a.clone());
        }
        if let Some(d) = &lexicon.morph.defaults {
            morph = morph.with_defaults(d.clone());
        }
        morph.load(&src.morph.1).map_err(db_err(src.morph.0))?;
        let synt = SyntDatabase::from_text(&src.synt.1, &grammar).map_err(db_err(src.synt.0))?;
        let stats = match &src.stats {
            Some((p, text)) => StatsTable::from_text(text).map_err(db_err(p))?,
            None => StatsTable::new(),
        };
        let tagger = match (&src.tagger_model, &src.tagger_corpus) {
            (Some((p, text)), _) => {
                Some(Tagger::from_text(text).map_err(|source| WorkspaceError::Tagger { path: p.into(), source })?)
            }
            (None, Some((p, text))) => {
                let tag_err = |source| WorkspaceError::Tagger { path: p.to_path_buf(), source };
                Some(Tagger::train(&parse_tagged_corpus(text).map_err(tag_err)?).map_err(tag_err)?)
            }
            (None, None) => None,
        };
        Ok(Workspace { root, config, grammar, morph, synt, lexicon, stats, tagger })
    }

    /// Writes the grammar, databases, stats, lexicon and config back to the
    /// workspace directory.
    pub fn save(&self) -> Result<(), WorkspaceError> {
        let Some(dir) = &self.root else {
            return Err(WorkspaceError::Config("workspace has no directory".into()));
        };
        self.save_to(dir)
    }

    pub fn save_to(&self, dir: &Path) -> Result<(), WorkspaceError> {
        let mut config = self.config.clone();
        if self.tagger.is_some() && config.files.tagger_model.is_none() {
            config.files.tagger_model = Some(TAGGER_MODEL_FILE.into());
        }
        let f = &config.files;
        write(&dir.join(CONFIG_FILE), &config.to_toml())?;
        write(&dir.join(&f.grammar), &write_grammar(&self.grammar))?;
        write(&dir.join(&f.morph), &self.morph.to_text())?;
        write(&dir.join(&f.synt), &self.synt.to_text())?;
        write(&dir.join(&f.lexicon), &self.lexicon.to_toml())?;
        if let Some(p) = &f.stats {
            write(&dir.join(p), &self.stats.to_text())?;
        }
        if let (Some(p), Some(t)) = (&f.tagger_model, &self.tagger) {
            write(&dir.join(p), &t.to_text())?;
        }
        Ok(())
    }

    /// Multi-word index words the tokenizer reads as one token.
    pub fn phrases(&self) -> Vec<Vec<String>> {
        self.synt.phrases(&self.grammar)
    }

    pub fn tokenize(&self, raw: &str) -> Vec<String> {
        tokenize_with(raw, &self.phrases())
    }

    /// Morphological analyses per token, database then defaults. Entries
    /// found through case folding carry the token's own spelling.
    pub fn analyze(&self, tokens: &[String]) -> Vec<Vec<MorphEntry>> {
        tokens
            .iter()
            .map(|t| {
                let mut found = self.morph.analyze(t);
                for e in &mut found {
                    e.inflected = t.clone();
                }
                found.dedup();
                found
            })
            .collect()
    }

    /// Trees for each token's surviving analyses.
    pub fn select(&self, analyses: &[Vec<(Category, MorphEntry)>]) -> Vec<Vec<AnchoredTree>> {
        analyses
            .iter()
            .map(|word| {
                let roots: BTreeSet<&str> = word.iter().map(|(_, e)| e.root.as_str()).collect();
                let mut out: Vec<AnchoredTree> = Vec::new();
                for root in roots {
                    let these: Vec<(Category, MorphEntry)> = word.iter().filter(|(_, e)| e.root == root).cloned().collect();
                    for a in select(&self.grammar, &self.synt, &self.lexicon.synt, root, &these) {
                        if !out.contains(&a) {
                            out.push(a);
                        }
                    }
                }
                out
            })
            .collect()
    }
}

fn read(path: &Path) -> Result<String, WorkspaceError> {
    fs::read_to_string(path).map_err(|source| WorkspaceError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), WorkspaceError> {
    fs::write(path, text).map_err(|source| WorkspaceError::Io { path: path.to_path_buf(), source })
}

/// What the pipeline fed the parser on its final pass, alongside the
/// outcome.
#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub outcome: ParseOutcome,
    pub tokens: Vec<String>,
    /// Tagger output of the final pass; empty when it ran untagged.
    pub tag_sequences: Vec<TagSequence>,
    pub analyses: Vec<Vec<(Category, MorphEntry)>>,
    /// Candidate indices in derivations refer to these lists.
    pub candidates: Vec<Vec<AnchoredTree>>,
    pub tagged: bool,
}

/// Tokenize, analyze, tag and blend (per the tagger mode), select trees,
/// filter by statistics and parse.
pub fn run_pipeline(ws: &Workspace, raw: &str, cfg: &PipelineConfig) -> Result<PipelineResult, WorkspaceError> {
    cfg.validate()?;
    let tokens = ws.tokenize(raw);
    match cfg.tagger_mode {
        TaggerMode::Enabled => run_pass(ws, &tokens, cfg, true, "tagged"),
        TaggerMode::Disabled => run_pass(ws, &tokens, cfg, false, "untagged"),
        TaggerMode::RetryOnFailure => {
            let first = run_pass(ws, &tokens, cfg, true, "tagged")?;
            if first.outcome.parsed() {
                return Ok(first);
            }
            let mut second = run_pass(ws, &tokens, cfg, false, "untagged")?;
            let mut attempts = first.outcome.attempts;
            attempts.append(&mut second.outcome.attempts);
            second.outcome.attempts = attempts;
            second.outcome.timing.total += first.outcome.timing.total;
            Ok(second)
        }
    }
}

fn run_pass(
    ws: &Workspace,
    tokens: &[String],
    cfg: &PipelineConfig,
    tagged: bool,
    label: &str,
) -> Result<PipelineResult, WorkspaceError> {
    let morph = ws.analyze(tokens);
    let (analyses, tag_sequences) = if tagged {
        let tagger = ws.tagger.as_ref().ok_or_else(|| WorkspaceError::Config("tagger mode needs a tagger model".into()))?;
        let nbest = if tokens.is_empty() { Vec::new() } else { tagger.n_best(tokens, cfg.n_best) };
        let blended = blend(&morph, &nbest).map_err(|e| WorkspaceError::Config(e.to_string()))?;
        (blended, nbest)
    } else {
        (unblended(&morph), Vec::new())
    };
    let candidates = ws.select(&analyses);
    let start = Category::new(cfg.start_category.trim());
    let mut outcome = if tokens.is_empty() {
        ParseOutcome {
            sentence: Vec::new(),
            derivations: Vec::new(),
            derived_trees: Vec::new(),
            pass: Pass::None,
            timing: Timing { filtered: None, retry: None, total: Duration::ZERO },
            attempts: Vec::new(),
            truncated: false,
        }
    } else if cfg.stats_filter {
        parse_with_retry(tokens, &candidates, &start, &ws.stats, cfg.top_k, &cfg.parse_options())
    } else {
        parse_unfiltered(tokens, &candidates, &start, &cfg.parse_options())
    };
    for a in &mut outcome.attempts {
        a.label = format!("{label}/{}", a.label);
    }
    Ok(PipelineResult { outcome, tokens: tokens.to_vec(), tag_sequences, analyses, candidates, tagged })
}
