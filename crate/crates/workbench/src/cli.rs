//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ltag::eval::{corpus_report, parse_bands, parse_gold_file, EvalOptions, ReportOptions, Selection};
use ltag::morph::{MorphEntry, MorphField, Pattern};
use ltag::stats::{collect, CountingUnit};
use ltag::synt::{SyntEntry, SyntField};
use ltag::tagger::{parse_tagged_corpus, Tagger};
use ltag::workbench::{
    export_derived, export_elementary, read_corpus, run_pipeline, ExportFormat, TaggerMode, Workspace, WORKSPACE_ENV,
};

use crate::report::ParseReport;

#[derive(Debug, Parser)]
#[command(name = "ltag", version, about = "Grammar workbench for feature-based lexicalized TAG")]
pub struct Cli {
    /// Workspace directory (holding workspace.toml); the bundled sample
    /// workspace when absent.
    #[arg(long, global = true, env = WORKSPACE_ENV)]
    pub workspace: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse one sentence.
    Parse(ParseArgs),
    /// Parse gold-bracketed sentences and score the parses.
    Eval(EvalArgs),
    /// Query or edit the morphology or syntactic database.
    Db {
        #[command(subcommand)]
        command: DbCommand,
    },
    /// Train or run the part-of-speech tagger.
    Tag {
        #[command(subcommand)]
        command: TagCommand,
    },
    /// Collect or show tree statistics.
    Stats {
        #[command(subcommand)]
        command: StatsCommand,
    },
    /// Print a grammar tree, or the first parse of a sentence.
    Export(ExportArgs),
    /// Copy the bundled sample workspace into a directory.
    Init { dir: PathBuf },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Start category.
    #[arg(long)]
    pub start: Option<String>,
    /// on, off or retry.
    #[arg(long)]
    pub tagger: Option<TaggerMode>,
    #[arg(long)]
    pub n_best: Option<usize>,
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Give every candidate tree to the parser in one pass.
    #[arg(long)]
    pub no_filter: bool,
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    pub sentence: String,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Gold bracketings, one sentence per line.
    #[arg(long)]
    pub gold: PathBuf,
    /// Length bands such as 1-10,1-15.
    #[arg(long, default_value = "")]
    pub bands: String,
    /// Score the first parse rather than the best.
    #[arg(long)]
    pub first: bool,
    /// Require labels to match.
    #[arg(long)]
    pub labeled: bool,
    /// Leave out nodes that only dominate a word.
    #[arg(long)]
    pub drop_preterminals: bool,
    /// Tab-separated output.
    #[arg(long)]
    pub tsv: bool,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Subcommand)]
pub enum DbCommand {
    /// The morphology database.
    Morph {
        #[command(subcommand)]
        command: MorphCommand,
    },
    /// The syntactic database.
    Synt {
        #[command(subcommand)]
        command: SyntCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum MorphCommand {
    /// Analyses of a word (database, then default rules).
    Lookup { word: String },
    Insert { inflected: String, root: String, pos: String, tags: Option<String> },
    Delete { inflected: String, root: String, pos: String, tags: Option<String> },
    /// Replace an entry: old fields, then new fields, as `infl,root,pos,tag+tag`.
    Update { old: String, new: String },
    /// Field is inflected, root, pos or inflection; a trailing * matches a prefix.
    Search { field: String, pattern: String },
}

#[derive(Debug, Subcommand)]
pub enum SyntCommand {
    Lookup { root: String },
    /// Items are tree names and @families, space separated.
    Insert { index: String, pos: String, items: String, equations: Option<String> },
    Delete { index: String, pos: String, items: String, equations: Option<String> },
    /// Replace the items and equations of an entry.
    Update {
        index: String,
        pos: String,
        items: String,
        new_items: String,
        #[arg(long)]
        equations: Option<String>,
        #[arg(long)]
        new_equations: Option<String>,
    },
    /// Field is index, pos, tree or family.
    Search { field: String, pattern: String },
}

#[derive(Debug, Subcommand)]
pub enum TagCommand {
    /// Train from a word/TAG corpus and write a model file.
    Train {
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Best tag sequences for a sentence.
    Run {
        sentence: String,
        #[arg(long, default_value_t = 1)]
        n_best: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum StatsCommand {
    /// Parse the grammatical sentences of a corpus and count tree uses.
    Collect {
        corpus: PathBuf,
        /// Count each tree use once per sentence.
        #[arg(long)]
        per_sentence: bool,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Show,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Grammar tree name.
    pub tree: Option<String>,
    /// Parse this sentence and export its first derived tree instead.
    #[arg(long)]
    pub sentence: Option<String>,
    /// text, svg or bracketed.
    #[arg(long, default_value = "text")]
    pub format: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn open_workspace(dir: Option<&Path>) -> Result<Workspace> {
    match dir {
        Some(d) => Workspace::open(d).with_context(|| format!("opening workspace {}", d.display())),
        None => Ok(Workspace::sample()),
    }
}

fn configure(ws: &Workspace, a: &PipelineArgs) -> ltag::workbench::PipelineConfig {
    let mut cfg = ws.config.clone();
    if let Some(s) = &a.start {
        cfg.start_category = s.clone();
    }
    if let Some(m) = a.tagger {
        cfg.tagger_mode = m;
    }
    if let Some(n) = a.n_best {
        cfg.n_best = n;
    }
    if let Some(k) = a.top_k {
        cfg.top_k = k;
    }
    if a.no_filter {
        cfg.stats_filter = false;
    }
    cfg
}

/// Fields of a morph entry given as `inflected,root,pos,tag+tag`.
fn morph_entry(spec: &str) -> Result<MorphEntry> {
    let f: Vec<&str> = spec.split(',').collect();
    if f.len() < 3 || f.len() > 4 {
        bail!("expected inflected,root,pos[,tag+tag], got `{spec}`");
    }
    let tags: Vec<&str> = f.get(3).map(|t| t.split('+').filter(|t| !t.is_empty()).collect()).unwrap_or_default();
    Ok(MorphEntry::new(f[0], f[1], f[2], &tags))
}

fn tag_list(tags: &Option<String>) -> Vec<&str> {
    tags.as_deref().map(|t| t.split(',').filter(|t| !t.is_empty() && *t != "-").collect()).unwrap_or_default()
}

fn save(ws: &Workspace) -> Result<()> {
    if ws.root.is_none() {
        bail!("the sample workspace is read-only; run `ltag init DIR` and pass --workspace DIR");
    }
    ws.save()?;
    Ok(())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let dir = cli.workspace.as_deref();
    match cli.command {
        Command::Parse(a) => {
            let ws = open_workspace(dir)?;
            let cfg = configure(&ws, &a.pipeline);
            let r = run_pipeline(&ws, &a.sentence, &cfg)?;
            let report = ParseReport::new(&r);
            if a.json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", report.render());
            }
        }
        Command::Eval(a) => {
            let ws = open_workspace(dir)?;
            let cfg = configure(&ws, &a.pipeline);
            let text = fs::read_to_string(&a.gold).with_context(|| format!("reading {}", a.gold.display()))?;
            let gold = parse_gold_file(&text)?;
            let mut outcomes = Vec::new();
            for g in &gold {
                let r = run_pipeline(&ws, &g.tokens.join(" "), &cfg)?;
                if r.tokens != g.tokens {
                    bail!("tokenizer disagrees with gold tokens: {:?} vs {:?}", r.tokens, g.tokens);
                }
                outcomes.push(r.outcome);
            }
            let opts = ReportOptions {
                bands: parse_bands(&a.bands)?,
                selection: if a.first { Selection::First } else { Selection::Best },
                eval: EvalOptions { labeled: a.labeled },
                drop_preterminals: a.drop_preterminals,
            };
            let report = corpus_report(&outcomes, Some(&gold), &opts)?;
            print!("{}", if a.tsv { report.to_tsv() } else { report.render_table() });
        }
        Command::Db { command: DbCommand::Morph { command } } => {
            let mut ws = open_workspace(dir)?;
            match command {
                MorphCommand::Lookup { word } => {
                    for e in ws.morph.analyze(&word) {
                        println!("{e}");
                    }
                }
                MorphCommand::Insert { inflected, root, pos, tags } => {
                    ws.morph.insert(MorphEntry::new(&inflected, &root, &pos, &tag_list(&tags)))?;
                    save(&ws)?;
                }
                MorphCommand::Delete { inflected, root, pos, tags } => {
                    ws.morph.delete(&MorphEntry::new(&inflected, &root, &pos, &tag_list(&tags)))?;
                    save(&ws)?;
                }
                MorphCommand::Update { old, new } => {
                    ws.morph.update(&morph_entry(&old)?, morph_entry(&new)?)?;
                    save(&ws)?;
                }
                MorphCommand::Search { field, pattern } => {
                    let field: MorphField = field.parse()?;
                    for e in ws.morph.search(field, &Pattern::parse(&pattern)) {
                        println!("{e}");
                    }
                }
            }
        }
        Command::Db { command: DbCommand::Synt { command } } => {
            let mut ws = open_workspace(dir)?;
            match command {
                SyntCommand::Lookup { root } => {
                    for e in ws.synt.entries().filter(|e| e.index_word == root || e.words().first() == Some(&root.as_str())) {
                        println!("{e}");
                    }
                }
                SyntCommand::Insert { index, pos, items, equations } => {
                    let e = SyntEntry::new(&index, &pos, &items, equations.as_deref().unwrap_or("-")).map_err(|m| anyhow!(m))?;
                    ws.synt.insert(e, &ws.grammar)?;
                    save(&ws)?;
                }
                SyntCommand::Delete { index, pos, items, equations } => {
                    let e = SyntEntry::new(&index, &pos, &items, equations.as_deref().unwrap_or("-")).map_err(|m| anyhow!(m))?;
                    ws.synt.delete(&e)?;
                    save(&ws)?;
                }
                SyntCommand::Update { index, pos, items, new_items, equations, new_equations } => {
                    let old = SyntEntry::new(&index, &pos, &items, equations.as_deref().unwrap_or("-")).map_err(|m| anyhow!(m))?;
                    let new = SyntEntry::new(&index, &pos, &new_items, new_equations.as_deref().unwrap_or("-")).map_err(|m| anyhow!(m))?;
                    ws.synt.update(&old, new, &ws.grammar)?;
                    save(&ws)?;
                }
                SyntCommand::Search { field, pattern } => {
                    let field: SyntField = field.parse()?;
                    for e in ws.synt.search(field, &Pattern::parse(&pattern), &ws.grammar) {
                        println!("{e}");
                    }
                }
            }
        }
        Command::Tag { command } => match command {
            TagCommand::Train { corpus, out } => {
                let text = fs::read_to_string(&corpus).with_context(|| format!("reading {}", corpus.display()))?;
                let t = Tagger::train(&parse_tagged_corpus(&text)?)?;
                fs::write(&out, t.to_text()).with_context(|| format!("writing {}", out.display()))?;
            }
            TagCommand::Run { sentence, n_best } => {
                let ws = open_workspace(dir)?;
                let t = ws.tagger.as_ref().ok_or_else(|| anyhow!("workspace has no tagger"))?;
                let tokens = ws.tokenize(&sentence);
                if tokens.is_empty() {
                    return Ok(());
                }
                for s in t.n_best(&tokens, n_best) {
                    let tagged: Vec<String> = tokens.iter().zip(&s.tags).map(|(w, t)| format!("{w}/{t}")).collect();
                    println!("{:.4}\t{}", s.score, tagged.join(" "));
                }
            }
        },
        Command::Stats { command } => {
            let ws = open_workspace(dir)?;
            match command {
                StatsCommand::Collect { corpus, per_sentence, out } => {
                    let text = fs::read_to_string(&corpus).with_context(|| format!("reading {}", corpus.display()))?;
                    let mut cfg = ws.config.clone();
                    cfg.stats_filter = false;
                    cfg.tagger_mode = TaggerMode::Disabled;
                    let mut parsed = Vec::new();
                    for (s, ok) in read_corpus(&text) {
                        if ok {
                            parsed.push(run_pipeline(&ws, &s, &cfg)?.outcome.derivations);
                        }
                    }
                    let unit = if per_sentence { CountingUnit::PerSentence } else { CountingUnit::PerDerivation };
                    emit(&out, &collect(parsed.iter().map(Vec::as_slice), unit).to_text())?;
                }
                StatsCommand::Show => print!("{}", ws.stats.to_text()),
            }
        }
        Command::Export(a) => {
            let ws = open_workspace(dir)?;
            let format: ExportFormat = a.format.parse().map_err(|m: String| anyhow!(m))?;
            let doc = match (&a.tree, &a.sentence) {
                (_, Some(s)) => {
                    let r = run_pipeline(&ws, s, &ws.config)?;
                    let t = r.outcome.derived_trees.first().ok_or_else(|| anyhow!("no parse for `{s}`"))?;
                    export_derived(&t.root, format)
                }
                (Some(name), None) => {
                    export_elementary(ws.grammar.tree(name).ok_or_else(|| anyhow!("no tree `{name}`"))?, format)
                }
                (None, None) => bail!("give a tree name or --sentence"),
            };
            let doc = if doc.ends_with('\n') { doc } else { doc + "\n" };
            emit(&a.out, &doc)?;
        }
        Command::Init { dir: target } => {
            fs::create_dir_all(&target).with_context(|| format!("creating {}", target.display()))?;
            use ltag::workbench::sample;
            for (name, text) in [
                ("workspace.toml", sample::CONFIG),
                ("grammar.ltag", sample::GRAMMAR),
                ("morph.tsv", sample::MORPH),
                ("synt.tsv", sample::SYNT),
                ("lexicon.toml", sample::LEXICON),
                ("stats.tsv", sample::STATS),
                ("tagged.txt", sample::TAGGED),
                ("corpus.txt", sample::CORPUS),
                ("gold.txt", sample::GOLD),
            ] {
                fs::write(target.join(name), text).with_context(|| format!("writing {name}"))?;
            }
        }
        Command::Serve { port, host } => {
            let ws = open_workspace(dir)?;
            let app = crate::api::router(crate::api::AppState::new(ws));
            let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind((host.as_str(), port)).await?;
                eprintln!("listening on http://{}", listener.local_addr()?);
                axum::serve(listener, app).await?;
                Ok::<_, anyhow::Error>(())
            })?;
        }
    }
    Ok(())
}
