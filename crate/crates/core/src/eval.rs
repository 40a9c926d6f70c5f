//! Parseval-style scoring: matched constituents, crossing brackets, recall
//! and precision, and corpus reports by sentence-length band.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::derived::{DerivedKind, DerivedNode};
use crate::parser::ParseOutcome;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Constituent {
    pub label: Option<String>,
    pub start: usize,
    pub end: usize,
}

impl Constituent {
    pub fn new(label: Option<&str>, start: usize, end: usize) -> Self {
        Constituent { label: label.map(String::from), start, end }
    }

    pub fn span(&self) -> (usize, usize) {
        (self.start, self.end)
    }

    /// The spans overlap without either containing the other.
    pub fn crosses(&self, other: &Constituent) -> bool {
        let (s, e) = self.span();
        let (s2, e2) = other.span();
        (s < s2 && s2 < e && e < e2) || (s2 < s && s < e2 && e2 < e)
    }
}

/// A sentence with labeled spans over its tokens; spans are 0-based and
/// end-exclusive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketedSentence {
    pub tokens: Vec<String>,
    pub constituents: BTreeSet<Constituent>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("candidate and gold tokens differ: {candidate:?} vs {gold:?}")]
    TokenMismatch { candidate: Vec<String>, gold: Vec<String> },
    #[error("no candidate parses to score")]
    NoCandidates,
    #[error("bracketing, line {line}, offset {offset}: {message}")]
    Syntax { line: usize, offset: usize, message: String },
    #[error("bad length band `{0}`")]
    Band(String),
}

impl BracketedSentence {
    pub fn new(tokens: &[&str], spans: &[(Option<&str>, usize, usize)]) -> Self {
        BracketedSentence {
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
            constituents: spans.iter().map(|&(l, s, e)| Constituent::new(l, s, e)).collect(),
        }
    }

    /// Reads a derived tree: one constituent per node above the words.
    /// With `drop_preterminals`, nodes whose only child is a word are
    /// skipped.
    pub fn from_derived(root: &DerivedNode, drop_preterminals: bool) -> Self {
        fn walk(n: &DerivedNode, drop: bool, tokens: &mut Vec<String>, out: &mut BTreeSet<Constituent>) {
            if n.kind == DerivedKind::Lexeme {
                tokens.push(n.label.clone());
                return;
            }
            let start = tokens.len();
            for c in &n.children {
                walk(c, drop, tokens, out);
            }
            let pre = n.children.len() == 1 && n.children[0].kind == DerivedKind::Lexeme;
            if tokens.len() > start && !(drop && pre) {
                out.insert(Constituent { label: Some(n.label.clone()), start, end: tokens.len() });
            }
        }
        let mut tokens = Vec::new();
        let mut constituents = BTreeSet::new();
        walk(root, drop_preterminals, &mut tokens, &mut constituents);
        BracketedSentence { tokens, constituents }
    }

    /// Without labels.
    pub fn unlabeled(&self) -> BracketedSentence {
        BracketedSentence {
            tokens: self.tokens.clone(),
            constituents: self.constituents.iter().map(|c| Constituent { label: None, ..c.clone() }).collect(),
        }
    }
}

/// Parses one bracketing such as `(S (NP John) (VP loves (NP Mary)))`. A
/// bracket's first element, if a bare atom, is its label; `_` leaves it
/// unlabeled.
pub fn parse_bracketed(src: &str) -> Result<BracketedSentence, EvalError> {
    let err = |offset: usize, message: &str| EvalError::Syntax { line: 1, offset, message: message.to_string() };
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut pos = 0;
    let mut tokens: Vec<String> = Vec::new();
    let mut constituents = BTreeSet::new();
    // (start token, label, elements seen so far)
    let mut stack: Vec<(usize, Option<String>, usize)> = Vec::new();
    let mut seen_root = false;
    while pos < chars.len() {
        let (off, c) = chars[pos];
        match c {
            c if c.is_whitespace() => pos += 1,
            '(' => {
                if stack.is_empty() && seen_root {
                    return Err(err(off, "more than one top-level bracket"));
                }
                if let Some(top) = stack.last_mut() {
                    top.2 += 1;
                }
                stack.push((tokens.len(), None, 0));
                seen_root = true;
                pos += 1;
            }
            ')' => {
                let (start, label, _) = stack.pop().ok_or_else(|| err(off, "unbalanced `)`"))?;
                if tokens.len() == start {
                    return Err(err(off, "bracket covers no words"));
                }
                constituents.insert(Constituent { label, start, end: tokens.len() });
                pos += 1;
            }
            _ => {
                let begin = pos;
                while pos < chars.len() && !chars[pos].1.is_whitespace() && chars[pos].1 != '(' && chars[pos].1 != ')' {
                    pos += 1;
                }
                let atom: String = chars[begin..pos].iter().map(|(_, c)| c).collect();
                let top = stack.last_mut().ok_or_else(|| err(off, "word outside brackets"))?;
                if top.2 == 0 {
                    top.1 = (atom != "_").then_some(atom);
                } else {
                    tokens.push(atom);
                }
                top.2 += 1;
            }
        }
    }
    if !stack.is_empty() {
        return Err(err(src.len(), "unclosed `(`"));
    }
    if !seen_root {
        return Err(err(0, "empty bracketing"));
    }
    Ok(BracketedSentence { tokens, constituents })
}

/// One bracketing per non-blank line; `#` starts a comment line.
pub fn parse_gold_file(text: &str) -> Result<Vec<BracketedSentence>, EvalError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        out.push(parse_bracketed(t).map_err(|e| match e {
            EvalError::Syntax { offset, message, .. } => EvalError::Syntax { line: i + 1, offset, message },
            other => other,
        })?);
    }
    Ok(out)
}

/// An exact fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        Ratio { num, den }
    }

    pub fn is_defined(&self) -> bool {
        self.den != 0
    }

    pub fn value(&self) -> Option<f64> {
        self.is_defined().then(|| self.num as f64 / self.den as f64)
    }

    /// `num/den · scale`, rounded half up to two decimals, or `n/a`.
    fn render(&self, scale: u64) -> String {
        if self.den == 0 {
            return "n/a".to_string();
        }
        let n = self.num as u128 * scale as u128 * 100;
        let d = self.den as u128;
        let q = (2 * n + d) / (2 * d);
        format!("{}.{:02}", q / 100, q % 100)
    }

    /// As a percentage, e.g. `41.22%`.
    pub fn percent(&self) -> String {
        let s = self.render(100);
        if self.is_defined() {
            s + "%"
        } else {
            s
        }
    }

    /// As a plain number with two decimals.
    pub fn decimal(&self) -> String {
        self.render(1)
    }

    fn cmp_value(&self, other: &Ratio) -> Ordering {
        match (self.is_defined(), other.is_defined()) {
            (true, true) => (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128)),
            (a, b) => a.cmp(&b),
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.percent())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvalResult {
    pub candidate_constituents: usize,
    pub gold_constituents: usize,
    pub matched: usize,
    /// Candidate constituents crossing at least one gold constituent.
    pub crossing: usize,
    pub sentence_crossing_free: bool,
}

impl EvalResult {
    pub fn recall(&self) -> Ratio {
        Ratio::new(self.matched as u64, self.gold_constituents as u64)
    }

    pub fn precision(&self) -> Ratio {
        Ratio::new(self.matched as u64, self.candidate_constituents as u64)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Require labels to agree for a match.
    pub labeled: bool,
}

pub fn score_sentence(candidate: &BracketedSentence, gold: &BracketedSentence) -> Result<EvalResult, EvalError> {
    score_sentence_with(candidate, gold, EvalOptions::default())
}

pub fn score_sentence_with(
    candidate: &BracketedSentence,
    gold: &BracketedSentence,
    opts: EvalOptions,
) -> Result<EvalResult, EvalError> {
    if candidate.tokens != gold.tokens {
        return Err(EvalError::TokenMismatch { candidate: candidate.tokens.clone(), gold: gold.tokens.clone() });
    }
    let key = |c: &Constituent| (if opts.labeled { c.label.clone() } else { None }, c.start, c.end);
    let mut pool: BTreeMap<_, usize> = BTreeMap::new();
    for g in &gold.constituents {
        *pool.entry(key(g)).or_default() += 1;
    }
    let mut matched = 0;
    for c in &candidate.constituents {
        if let Some(n) = pool.get_mut(&key(c)).filter(|n| **n > 0) {
            *n -= 1;
            matched += 1;
        }
    }
    let crossing = candidate.constituents.iter().filter(|c| gold.constituents.iter().any(|g| c.crosses(g))).count();
    Ok(EvalResult {
        candidate_constituents: candidate.constituents.len(),
        gold_constituents: gold.constituents.len(),
        matched,
        crossing,
        sentence_crossing_free: crossing == 0,
    })
}

/// How one of several parses is chosen for scoring.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// Crossing-free first, then higher recall, then higher precision;
    /// earlier candidates win ties.
    #[default]
    Best,
    First,
}

/// The chosen candidate's index and score.
pub fn best_parse_score(
    candidates: &[BracketedSentence],
    gold: &BracketedSentence,
    selection: Selection,
    opts: EvalOptions,
) -> Result<(usize, EvalResult), EvalError> {
    if candidates.is_empty() {
        return Err(EvalError::NoCandidates);
    }
    let mut best: Option<(usize, EvalResult)> = None;
    for (i, c) in candidates.iter().enumerate() {
        let r = score_sentence_with(c, gold, opts)?;
        if selection == Selection::First {
            return Ok((i, r));
        }
        let better = match &best {
            None => true,
            Some((_, b)) => r
                .sentence_crossing_free
                .cmp(&b.sentence_crossing_free)
                .then_with(|| r.recall().cmp_value(&b.recall()))
                .then_with(|| r.precision().cmp_value(&b.precision()))
                == Ordering::Greater,
        };
        if better {
            best = Some((i, r));
        }
    }
    Ok(best.expect("non-empty"))
}

/// Inclusive sentence-length range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Band {
    pub min: usize,
    pub max: usize,
}

impl Band {
    pub fn contains(&self, words: usize) -> bool {
        self.min <= words && words <= self.max
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.min, self.max)
    }
}

impl FromStr for Band {
    type Err = EvalError;
    fn from_str(s: &str) -> Result<Self, EvalError> {
        let bad = || EvalError::Band(s.to_string());
        let (a, b) = s.trim().split_once('-').ok_or_else(bad)?;
        let (min, max) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
        if min > max {
            return Err(bad());
        }
        Ok(Band { min, max })
    }
}

pub fn parse_bands(s: &str) -> Result<Vec<Band>, EvalError> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
}

/// What the report needs from one sentence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub words: usize,
    pub parses: usize,
    /// Constituents of the chosen parse, if any.
    pub constituents: Option<usize>,
    pub eval: Option<EvalResult>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub band: String,
    pub sentences: u64,
    pub parsed: u64,
    pub percent_parsed: Ratio,
    /// Over parsed sentences.
    pub parses_per_sentence: Ratio,
    pub words_per_sentence: Ratio,
    /// Over parsed sentences.
    pub constituents_per_sentence: Ratio,
    pub evaluated: u64,
    pub recall: Ratio,
    pub precision: Ratio,
    /// Share of evaluated sentences with no crossing bracket.
    pub crossing_free: Ratio,
    pub crossings_per_sentence: Ratio,
}

impl ReportRow {
    pub fn from_records<'a>(band: String, records: impl IntoIterator<Item = &'a SentenceRecord>) -> ReportRow {
        let (mut n, mut parsed, mut parses, mut words, mut consts) = (0u64, 0u64, 0u64, 0u64, 0u64);
        let (mut evaluated, mut matched, mut gold, mut cand, mut free, mut crossings) = (0u64, 0, 0, 0, 0, 0);
        for r in records {
            n += 1;
            words += r.words as u64;
            if r.parses > 0 {
                parsed += 1;
                parses += r.parses as u64;
                consts += r.constituents.unwrap_or(0) as u64;
            }
            if let Some(e) = &r.eval {
                evaluated += 1;
                matched += e.matched as u64;
                gold += e.gold_constituents as u64;
                cand += e.candidate_constituents as u64;
                crossings += e.crossing as u64;
                free += e.sentence_crossing_free as u64;
            }
        }
        ReportRow {
            band,
            sentences: n,
            parsed,
            percent_parsed: Ratio::new(parsed, n),
            parses_per_sentence: Ratio::new(parses, parsed),
            words_per_sentence: Ratio::new(words, n),
            constituents_per_sentence: Ratio::new(consts, parsed),
            evaluated,
            recall: Ratio::new(matched, gold),
            precision: Ratio::new(matched, cand),
            crossing_free: Ratio::new(free, evaluated),
            crossings_per_sentence: Ratio::new(crossings, evaluated),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub rows: Vec<ReportRow>,
    pub records: Vec<SentenceRecord>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub bands: Vec<Band>,
    pub selection: Selection,
    pub eval: EvalOptions,
    pub drop_preterminals: bool,
}

impl CorpusReport {
    /// A row for the whole corpus, then one per band.
    pub fn from_records(records: Vec<SentenceRecord>, bands: &[Band]) -> CorpusReport {
        let mut rows = vec![ReportRow::from_records("all".into(), &records)];
        for b in bands {
            rows.push(ReportRow::from_records(b.to_string(), records.iter().filter(|r| b.contains(r.words))));
        }
        CorpusReport { rows, records }
    }

    /// Column-aligned text table.
    pub fn render_table(&self) -> String {
        let header = [
            "Band", "Sentences", "% Parsed", "Parses/sent", "Words/sent", "Consts/sent", "Recall", "Precision",
            "Crossing-free", "Crossings/sent",
        ];
        let mut lines: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for r in &self.rows {
            lines.push(vec![
                r.band.clone(),
                r.sentences.to_string(),
                r.percent_parsed.percent(),
                r.parses_per_sentence.decimal(),
                r.words_per_sentence.decimal(),
                r.constituents_per_sentence.decimal(),
                r.recall.percent(),
                r.precision.percent(),
                r.crossing_free.percent(),
                r.crossings_per_sentence.decimal(),
            ]);
        }
        let widths: Vec<usize> = (0..header.len()).map(|i| lines.iter().map(|l| l[i].chars().count()).max().unwrap()).collect();
        let mut out = String::new();
        for l in lines {
            let cells: Vec<String> = l.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out
    }

    /// Tab-separated rows with a header line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(
            "band\tsentences\tparsed\tpercent_parsed\tparses_per_sentence\twords_per_sentence\tconstituents_per_sentence\tevaluated\trecall\tprecision\tcrossing_free\tcrossings_per_sentence\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                r.band,
                r.sentences,
                r.parsed,
                r.percent_parsed.percent(),
                r.parses_per_sentence.decimal(),
                r.words_per_sentence.decimal(),
                r.constituents_per_sentence.decimal(),
                r.evaluated,
                r.recall.percent(),
                r.precision.percent(),
                r.crossing_free.percent(),
                r.crossings_per_sentence.decimal()
            ));
        }
        out
    }
}

/// Scores parse outcomes, optionally against gold bracketings in the same
/// order.
pub fn corpus_report(
    outcomes: &[ParseOutcome],
    gold: Option<&[BracketedSentence]>,
    opts: &ReportOptions,
) -> Result<CorpusReport, EvalError> {
    let mut records = Vec::new();
    for (i, o) in outcomes.iter().enumerate() {
        let cands: Vec<BracketedSentence> =
            o.derived_trees.iter().map(|t| BracketedSentence::from_derived(&t.root, opts.drop_preterminals)).collect();
        let g = gold.and_then(|g| g.get(i));
        let (chosen, eval) = match (g, cands.is_empty()) {
            (Some(g), false) => {
                let (k, r) = best_parse_score(&cands, g, opts.selection, opts.eval)?;
                (Some(k), Some(r))
            }
            (Some(g), true) => (
                None,
                Some(EvalResult {
                    candidate_constituents: 0,
                    gold_constituents: g.constituents.len(),
                    matched: 0,
                    crossing: 0,
                    sentence_crossing_free: true,
                }),
            ),
            (None, false) => (Some(0), None),
            (None, true) => (None, None),
        };
        records.push(SentenceRecord {
            words: o.sentence.len(),
            parses: o.derivations.len(),
            constituents: chosen.map(|k| cands[k].constituents.len()),
            eval,
        });
    }
    Ok(CorpusReport::from_records(records, &opts.bands))
}
