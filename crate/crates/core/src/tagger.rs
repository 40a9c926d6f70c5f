//! Trigram HMM part-of-speech tagger with N-best output, and the blender
//! that narrows morphological analyses with the tagger's sequences.
//!
//! Transitions interpolate trigram, bigram and unigram relative
//! frequencies with weights set by deleted interpolation. Emissions use
//! add-k smoothing, reserving for each tag an unknown-word mass estimated
//! from the words seen once under it. Sentences are padded with two start
//! tags and one end tag.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::grammar::Category;
use crate::morph::MorphEntry;

pub const START: &str = "<s>";
pub const END: &str = "</s>";
const HEADER: &str = "ltag-tagger v1";
/// Floor on the unigram weight, so that every tag sequence stays possible.
pub const MIN_UNIGRAM_WEIGHT: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaggerError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("sequence of length {found} for a sentence of {expected} words")]
    LengthMismatch { expected: usize, found: usize },
}

/// A tagged sentence.
pub type TaggedSentence = Vec<(String, Category)>;

/// Parses `word/TAG word/TAG …` lines. The tag follows the last `/`;
/// underscores inside a word stand for spaces.
pub fn parse_tagged_corpus(text: &str) -> Result<Vec<TaggedSentence>, TaggerError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut sent = Vec::new();
        for tok in line.split_whitespace() {
            let (w, t) = tok.rsplit_once('/').filter(|(w, t)| !w.is_empty() && !t.is_empty()).ok_or_else(|| {
                TaggerError::Syntax { line: i + 1, message: format!("expected word/TAG, found `{tok}`") }
            })?;
            sent.push((w.replace('_', " "), Category::new(t)));
        }
        out.push(sent);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TagSequence {
    pub tags: Vec<Category>,
    /// Natural-log probability of the tags and words together.
    pub score: f64,
}

/// Transition counts and interpolation weights.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigramModel {
    uni: BTreeMap<String, u64>,
    bi: BTreeMap<(String, String), u64>,
    tri: BTreeMap<(String, String, String), u64>,
    /// Weights of the unigram, bigram and trigram estimates.
    pub lambdas: [f64; 3],
}

/// Emission counts.
#[derive(Clone, Debug, PartialEq)]
pub struct LexProbTable {
    counts: BTreeMap<String, BTreeMap<String, u64>>,
    tag_totals: BTreeMap<String, u64>,
    hapax: BTreeMap<String, u64>,
    pub k: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tagger {
    pub model: TrigramModel,
    pub lex: LexProbTable,
    tags: Vec<String>,
    /// log P(c | a, b) indexed [a][b][c]; a, b range over tags and START
    /// (index `n`), c over tags and END (index `n`).
    trans: Vec<f64>,
}

impl TrigramModel {
    pub fn tagset(&self) -> BTreeSet<Category> {
        self.uni.keys().filter(|t| *t != END).map(|t| Category::new(t.as_str())).collect()
    }

    fn tokens(&self) -> u64 {
        self.uni.iter().filter(|(t, _)| *t != END).map(|(_, c)| c).sum()
    }

    fn events(&self) -> u64 {
        self.uni.values().sum()
    }

    /// Relative frequency of a tag among corpus tokens.
    pub fn unigram_prob(&self, tag: &str) -> f64 {
        let n = self.tokens();
        if n == 0 {
            return 0.0;
        }
        *self.uni.get(tag).unwrap_or(&0) as f64 / n as f64
    }

    fn ctx1(&self) -> BTreeMap<&str, u64> {
        let mut m = BTreeMap::new();
        for ((a, _), c) in &self.bi {
            *m.entry(a.as_str()).or_default() += c;
        }
        m
    }

    fn ctx2(&self) -> BTreeMap<(&str, &str), u64> {
        let mut m = BTreeMap::new();
        for ((a, b, _), c) in &self.tri {
            *m.entry((a.as_str(), b.as_str())).or_default() += c;
        }
        m
    }

    /// Deleted interpolation: each trigram votes, with its count, for the
    /// estimate that best predicts it once that trigram occurrence is
    /// removed from the counts. Tied votes are split evenly.
    fn estimate_lambdas(&mut self) {
        let ctx1 = self.ctx1();
        let ctx2 = self.ctx2();
        let n = self.events();
        let ratio = |num: u64, den: u64| if den > 1 { (num as f64 - 1.0) / (den as f64 - 1.0) } else { 0.0 };
        let mut votes = [0.0f64; 3];
        for ((a, b, c), &f) in &self.tri {
            let d = [
                ratio(self.uni[c], n),
                ratio(self.bi[&(b.clone(), c.clone())], ctx1[b.as_str()]),
                ratio(f, ctx2[&(a.as_str(), b.as_str())]),
            ];
            let best = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let winners: Vec<usize> = (0..3).filter(|&i| d[i] == best).collect();
            for &w in &winners {
                votes[w] += f as f64 / winners.len() as f64;
            }
        }
        let total: f64 = votes.iter().sum();
        let mut l = if total > 0.0 { votes.map(|v| v / total) } else { [1.0 / 3.0; 3] };
        if l[0] < MIN_UNIGRAM_WEIGHT {
            let rest = 1.0 - l[0];
            let scale = (1.0 - MIN_UNIGRAM_WEIGHT) / rest;
            l = [MIN_UNIGRAM_WEIGHT, l[1] * scale, l[2] * scale];
        }
        self.lambdas = l;
    }
}

impl LexProbTable {
    /// Unsmoothed P(word | tag).
    pub fn mle_emission(&self, word: &str, tag: &str) -> f64 {
        let total = *self.tag_totals.get(tag).unwrap_or(&0);
        if total == 0 {
            return 0.0;
        }
        let c = self.counts.get(word).and_then(|m| m.get(tag)).copied().unwrap_or(0);
        c as f64 / total as f64
    }

    pub fn is_known(&self, word: &str) -> bool {
        self.counts.contains_key(word)
    }

    fn known_form(&self, word: &str) -> Option<String> {
        if self.counts.contains_key(word) {
            return Some(word.to_string());
        }
        let lower = word.to_lowercase();
        self.counts.contains_key(&lower).then_some(lower)
    }

    pub fn vocabulary(&self) -> usize {
        self.counts.len()
    }

    /// Probability mass a tag reserves for unseen words.
    pub fn unknown_mass(&self, tag: &str) -> f64 {
        let c = *self.tag_totals.get(tag).unwrap_or(&0) as f64;
        let h = *self.hapax.get(tag).unwrap_or(&0) as f64;
        (h + self.k) / (c + 2.0 * self.k)
    }

    /// Smoothed log P(word | tag).
    pub fn emission_logprob(&self, word: &str, tag: &str) -> f64 {
        let u = self.unknown_mass(tag);
        match self.known_form(word) {
            None => u.ln(),
            Some(w) => {
                let c = self.counts[&w].get(tag).copied().unwrap_or(0) as f64;
                let total = *self.tag_totals.get(tag).unwrap_or(&0) as f64;
                ((1.0 - u) * (c + self.k) / (total + self.k * self.vocabulary() as f64)).ln()
            }
        }
    }

    fn rebuild_totals(&mut self) {
        self.tag_totals.clear();
        self.hapax.clear();
        for m in self.counts.values() {
            let word_total: u64 = m.values().sum();
            for (t, c) in m {
                *self.tag_totals.entry(t.clone()).or_default() += c;
                if word_total == 1 {
                    *self.hapax.entry(t.clone()).or_default() += 1;
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TrainOptions {
    pub k: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions { k: 0.5 }
    }
}

impl Tagger {
    pub fn train(corpus: &[TaggedSentence]) -> Result<Tagger, TaggerError> {
        Self::train_with(corpus, TrainOptions::default())
    }

    pub fn train_with(corpus: &[TaggedSentence], opts: TrainOptions) -> Result<Tagger, TaggerError> {
        if corpus.iter().all(|s| s.is_empty()) {
            return Err(TaggerError::EmptyCorpus);
        }
        let mut model = TrigramModel { uni: BTreeMap::new(), bi: BTreeMap::new(), tri: BTreeMap::new(), lambdas: [0.0; 3] };
        let mut lex = LexProbTable { counts: BTreeMap::new(), tag_totals: BTreeMap::new(), hapax: BTreeMap::new(), k: opts.k };
        for sent in corpus.iter().filter(|s| !s.is_empty()) {
            let mut tags = vec![START.to_string(), START.to_string()];
            for (w, t) in sent {
                tags.push(t.as_str().to_string());
                *lex.counts.entry(w.clone()).or_default().entry(t.as_str().to_string()).or_default() += 1;
            }
            tags.push(END.to_string());
            for i in 2..tags.len() {
                *model.uni.entry(tags[i].clone()).or_default() += 1;
                *model.bi.entry((tags[i - 1].clone(), tags[i].clone())).or_default() += 1;
                *model.tri.entry((tags[i - 2].clone(), tags[i - 1].clone(), tags[i].clone())).or_default() += 1;
            }
        }
        model.estimate_lambdas();
        lex.rebuild_totals();
        Ok(Self::assemble(model, lex))
    }

    fn assemble(model: TrigramModel, lex: LexProbTable) -> Tagger {
        let tags: Vec<String> = model.uni.keys().filter(|t| *t != END).cloned().collect();
        let n = tags.len();
        let name = |i: usize, boundary: &'static str| if i == n { boundary.to_string() } else { tags[i].clone() };
        let ctx1 = model.ctx1();
        let ctx2 = model.ctx2();
        let events = model.events() as f64;
        let [l1, l2, l3] = model.lambdas;
        let mut trans = vec![f64::NEG_INFINITY; (n + 1) * (n + 1) * (n + 1)];
        for a in 0..=n {
            for b in 0..=n {
                for c in 0..=n {
                    let (ta, tb, tc) = (name(a, START), name(b, START), name(c, END));
                    let p1 = *model.uni.get(&tc).unwrap_or(&0) as f64 / events;
                    let p2 = match ctx1.get(tb.as_str()) {
                        Some(&d) if d > 0 => Some(*model.bi.get(&(tb.clone(), tc.clone())).unwrap_or(&0) as f64 / d as f64),
                        _ => None,
                    };
                    let p3 = match ctx2.get(&(ta.as_str(), tb.as_str())) {
                        Some(&d) if d > 0 => {
                            Some(*model.tri.get(&(ta.clone(), tb.clone(), tc.clone())).unwrap_or(&0) as f64 / d as f64)
                        }
                        _ => None,
                    };
                    // Weights of unseen contexts go to the remaining estimates.
                    let w2 = if p2.is_some() { l2 } else { 0.0 };
                    let w3 = if p3.is_some() { l3 } else { 0.0 };
                    let p = (l1 * p1 + w2 * p2.unwrap_or(0.0) + w3 * p3.unwrap_or(0.0)) / (l1 + w2 + w3);
                    trans[(a * (n + 1) + b) * (n + 1) + c] = p.ln();
                }
            }
        }
        Tagger { model, lex, tags, trans }
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    fn index(&self, tag: &str, boundary: &str) -> Option<usize> {
        if tag == boundary {
            return Some(self.tags.len());
        }
        self.tags.binary_search_by(|t| t.as_str().cmp(tag)).ok()
    }

    fn t(&self, a: usize, b: usize, c: usize) -> f64 {
        let m = self.tags.len() + 1;
        self.trans[(a * m + b) * m + c]
    }

    /// Interpolated log P(c | a, b). `a` and `b` may be [`START`], `c` may be
    /// [`END`]. Unknown tags have probability zero.
    pub fn transition_logprob(&self, a: &str, b: &str, c: &str) -> f64 {
        match (self.index(a, START), self.index(b, START), self.index(c, END)) {
            (Some(a), Some(b), Some(c)) => self.t(a, b, c),
            _ => f64::NEG_INFINITY,
        }
    }

    pub fn emission_logprob(&self, word: &str, tag: &str) -> f64 {
        self.lex.emission_logprob(word, tag)
    }

    /// Log probability of a sentence with the given tags, summed left to
    /// right: each position's transition, then its emission, then the
    /// transition into [`END`].
    pub fn score(&self, words: &[String], tags: &[Category]) -> f64 {
        assert_eq!(words.len(), tags.len());
        let mut prev = (START.to_string(), START.to_string());
        let mut s = 0.0;
        for (w, t) in words.iter().zip(tags) {
            s += self.transition_logprob(&prev.0, &prev.1, t.as_str());
            s += self.emission_logprob(w, t.as_str());
            prev = (prev.1, t.as_str().to_string());
        }
        s + self.transition_logprob(&prev.0, &prev.1, END)
    }

    /// The best tag sequence; ties go to the lexicographically smallest.
    pub fn viterbi(&self, words: &[String]) -> TagSequence {
        self.n_best(words, 1).remove(0)
    }

    /// The `n` best distinct sequences by score, best first, ties by
    /// lexicographic tag order. A forward Viterbi pass supplies exact
    /// completion scores for a backward A* enumeration.
    pub fn n_best(&self, words: &[String], n: usize) -> Vec<TagSequence> {
        assert!(n >= 1, "n_best needs n >= 1");
        let len = words.len();
        let nt = self.tags.len();
        let bos = nt;
        if len == 0 || nt == 0 {
            let tags = Vec::new();
            return vec![TagSequence { score: self.score(words, &tags), tags }];
        }
        let emit: Vec<Vec<f64>> = words.iter().map(|w| self.tags.iter().map(|t| self.emission_logprob(w, t)).collect()).collect();
        // delta[i][a][b]: best prefix score ending in tags (a, b) at
        // position i + 1.
        let m = nt + 1;
        let mut delta = vec![vec![f64::NEG_INFINITY; m * nt]; len];
        for b in 0..nt {
            delta[0][bos * nt + b] = self.t(bos, bos, b) + emit[0][b];
        }
        for i in 1..len {
            for a in 0..nt {
                for b in 0..nt {
                    let mut best = f64::NEG_INFINITY;
                    for z in 0..m {
                        let d = delta[i - 1][z * nt + a];
                        if d > f64::NEG_INFINITY {
                            best = best.max(d + self.t(z, a, b));
                        }
                    }
                    delta[i][a * nt + b] = best + emit[i][b];
                }
            }
        }

        #[derive(Debug)]
        struct Hyp {
            f: f64,
            g: f64,
            /// Tags from position `k` (1-based) to the end.
            suffix: Vec<usize>,
            prev: usize,
        }
        impl PartialEq for Hyp {
            fn eq(&self, o: &Self) -> bool {
                self.cmp(o) == Ordering::Equal
            }
        }
        impl Eq for Hyp {}
        impl PartialOrd for Hyp {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }
        impl Ord for Hyp {
            fn cmp(&self, o: &Self) -> Ordering {
                self.f.total_cmp(&o.f).then_with(|| o.suffix.cmp(&self.suffix)).then_with(|| o.prev.cmp(&self.prev))
            }
        }

        let mut heap = BinaryHeap::new();
        for a in 0..m {
            if (len == 1) != (a == bos) {
                continue;
            }
            for b in 0..nt {
                let d = delta[len - 1][a * nt + b];
                if d == f64::NEG_INFINITY {
                    continue;
                }
                let g = self.t(a, b, bos);
                heap.push(Hyp { f: d + g, g, suffix: vec![b], prev: a });
            }
        }
        let mut found: Vec<(f64, Vec<usize>)> = Vec::new();
        while let Some(h) = heap.pop() {
            if found.len() >= n && h.f < found[n - 1].0 - 1e-9 {
                break;
            }
            let k = len + 1 - h.suffix.len();
            if k == 1 {
                found.push((h.f, h.suffix));
                continue;
            }
            let tk = h.suffix[0];
            let lo = if k == 2 { bos } else { 0 };
            let hi = if k == 2 { bos + 1 } else { nt };
            for p in lo..hi {
                let d = delta[k - 2][p * nt + h.prev];
                if d == f64::NEG_INFINITY {
                    continue;
                }
                let g = h.g + self.t(p, h.prev, tk) + emit[k - 1][tk];
                let mut suffix = Vec::with_capacity(h.suffix.len() + 1);
                suffix.push(h.prev);
                suffix.extend_from_slice(&h.suffix);
                heap.push(Hyp { f: d + g, g, suffix, prev: p });
            }
        }
        let mut out: Vec<TagSequence> = found
            .into_iter()
            .map(|(_, idx)| {
                let tags: Vec<Category> = idx.iter().map(|&i| Category::new(self.tags[i].as_str())).collect();
                TagSequence { score: self.score(words, &tags), tags }
            })
            .collect();
        out.sort_by(|x, y| y.score.total_cmp(&x.score).then_with(|| x.tags.cmp(&y.tags)));
        out.truncate(n);
        out
    }

    /// The versioned text form: counts and weights.
    pub fn to_text(&self) -> String {
        let mut out = format!("{HEADER}\n");
        let [l1, l2, l3] = self.model.lambdas;
        writeln!(out, "lambdas\t{l1}\t{l2}\t{l3}").unwrap();
        writeln!(out, "smoothing\t{}", self.lex.k).unwrap();
        for (t, c) in &self.model.uni {
            writeln!(out, "uni\t{t}\t{c}").unwrap();
        }
        for ((a, b), c) in &self.model.bi {
            writeln!(out, "bi\t{a}\t{b}\t{c}").unwrap();
        }
        for ((a, b, t), c) in &self.model.tri {
            writeln!(out, "tri\t{a}\t{b}\t{t}\t{c}").unwrap();
        }
        for (w, m) in &self.lex.counts {
            for (t, c) in m {
                writeln!(out, "lex\t{w}\t{t}\t{c}").unwrap();
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Tagger, TaggerError> {
        let mut lines = text.lines().enumerate();
        let err = |line: usize, message: &str| TaggerError::Syntax { line: line + 1, message: message.to_string() };
        match lines.next() {
            Some((_, h)) if h.trim() == HEADER => {}
            _ => return Err(err(0, "expected header `ltag-tagger v1`")),
        }
        let mut model = TrigramModel { uni: BTreeMap::new(), bi: BTreeMap::new(), tri: BTreeMap::new(), lambdas: [1.0 / 3.0; 3] };
        let mut lex = LexProbTable { counts: BTreeMap::new(), tag_totals: BTreeMap::new(), hapax: BTreeMap::new(), k: 0.5 };
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let num = |s: &str| s.parse::<u64>().map_err(|_| err(i, "bad count"));
            let real = |s: &str| s.parse::<f64>().map_err(|_| err(i, "bad number"));
            match (f[0], f.len()) {
                ("lambdas", 4) => model.lambdas = [real(f[1])?, real(f[2])?, real(f[3])?],
                ("smoothing", 2) => lex.k = real(f[1])?,
                ("uni", 3) => {
                    model.uni.insert(f[1].to_string(), num(f[2])?);
                }
                ("bi", 4) => {
                    model.bi.insert((f[1].to_string(), f[2].to_string()), num(f[3])?);
                }
                ("tri", 5) => {
                    model.tri.insert((f[1].to_string(), f[2].to_string(), f[3].to_string()), num(f[4])?);
                }
                ("lex", 4) => {
                    lex.counts.entry(f[1].to_string()).or_default().insert(f[2].to_string(), num(f[3])?);
                }
                _ => return Err(err(i, "unrecognized record")),
            }
        }
        let sum: f64 = model.lambdas.iter().sum();
        if model.lambdas[0] <= 0.0 || model.lambdas.iter().any(|l| *l < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(err(1, "interpolation weights must be nonnegative, sum to 1, and give the unigram some weight"));
        }
        if model.uni.is_empty() {
            return Err(TaggerError::EmptyCorpus);
        }
        lex.rebuild_totals();
        Ok(Self::assemble(model, lex))
    }
}

/// Per word, the analyses whose POS some sequence assigns to that word.
/// A word whose analyses would all be removed keeps them all.
pub fn blend(morph: &[Vec<MorphEntry>], nbest: &[TagSequence]) -> Result<Vec<Vec<(Category, MorphEntry)>>, TaggerError> {
    for s in nbest {
        if s.tags.len() != morph.len() {
            return Err(TaggerError::LengthMismatch { expected: morph.len(), found: s.tags.len() });
        }
    }
    Ok(morph
        .iter()
        .enumerate()
        .map(|(i, entries)| {
            let proposed: BTreeSet<&Category> = nbest.iter().map(|s| &s.tags[i]).collect();
            let kept: Vec<&MorphEntry> = entries.iter().filter(|e| proposed.contains(&e.pos)).collect();
            let kept = if kept.is_empty() { entries.iter().collect() } else { kept };
            kept.into_iter().map(|e| (e.pos.clone(), e.clone())).collect()
        })
        .collect())
}

/// Blending with the tagger switched off.
pub fn unblended(morph: &[Vec<MorphEntry>]) -> Vec<Vec<(Category, MorphEntry)>> {
    morph.iter().map(|es| es.iter().map(|e| (e.pos.clone(), e.clone())).collect()).collect()
}
