//! Tree statistics over (POS, tree) pairs, top-k candidate filtering, and
//! parsing with an unfiltered retry.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::derivation::Derivation;
use crate::grammar::{AnchoredTree, Category};
use crate::morph::DbError;
use crate::parser::{parse_with, Attempt, ParseOptions, ParseOutcome, Pass, Timing};

pub const DEFAULT_TOP_K: usize = 3;

/// What one observation is.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountingUnit {
    /// Every tree use in every derivation.
    #[default]
    PerDerivation,
    /// Every distinct tree use among a sentence's derivations, once.
    PerSentence,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StatsTable {
    counts: BTreeMap<(Category, String), u64>,
}

impl StatsTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, pos: &Category, tree: &str) -> u64 {
        self.counts.get(&(pos.clone(), tree.to_string())).copied().unwrap_or(0)
    }

    pub fn total(&self, pos: &Category) -> u64 {
        self.counts.iter().filter(|((p, _), _)| p == pos).map(|(_, c)| c).sum()
    }

    pub fn totals(&self) -> BTreeMap<Category, u64> {
        let mut out = BTreeMap::new();
        for ((p, _), c) in &self.counts {
            *out.entry(p.clone()).or_default() += c;
        }
        out
    }

    pub fn add(&mut self, pos: &Category, tree: &str, n: u64) {
        if n > 0 {
            *self.counts.entry((pos.clone(), tree.to_string())).or_default() += n;
        }
    }

    pub fn set(&mut self, pos: &Category, tree: &str, n: u64) {
        if n == 0 {
            self.counts.remove(&(pos.clone(), tree.to_string()));
        } else {
            self.counts.insert((pos.clone(), tree.to_string()), n);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Category, &str, u64)> {
        self.counts.iter().map(|((p, t), c)| (p, t.as_str(), *c))
    }

    pub fn merge(&mut self, other: &StatsTable) {
        for (p, t, c) in other.iter() {
            self.add(p, t, c);
        }
    }

    /// `pos<TAB>tree<TAB>count` lines.
    pub fn to_text(&self) -> String {
        self.iter().map(|(p, t, c)| format!("{p}\t{t}\t{c}\n")).collect()
    }

    pub fn from_text(text: &str) -> Result<StatsTable, DbError> {
        let mut out = StatsTable::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let err = |message: &str| DbError::Syntax { line: i + 1, message: message.to_string() };
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 3 || f[0].is_empty() || f[1].is_empty() {
                return Err(err("expected pos<TAB>tree<TAB>count"));
            }
            let n: u64 = f[2].trim().parse().map_err(|_| err("bad count"))?;
            let pos = Category::new(f[0]);
            if out.count(&pos, f[1]) > 0 {
                return Err(err("duplicate pair"));
            }
            out.add(&pos, f[1], n);
        }
        Ok(out)
    }
}

/// Counts tree uses over a parsed corpus, given as each sentence's
/// derivations.
pub fn collect<'a>(corpus: impl IntoIterator<Item = &'a [Derivation]>, unit: CountingUnit) -> StatsTable {
    let mut out = StatsTable::new();
    for derivations in corpus {
        match unit {
            CountingUnit::PerDerivation => {
                for d in derivations {
                    for u in d.uses() {
                        out.add(&u.origin_pos, &u.tree, 1);
                    }
                }
            }
            CountingUnit::PerSentence => {
                let distinct: BTreeSet<_> = derivations.iter().flat_map(|d| d.uses()).collect();
                for u in distinct {
                    out.add(&u.origin_pos, &u.tree, 1);
                }
            }
        }
    }
    out
}

/// Indices of the `k` best candidates: by count for (origin POS, tree)
/// descending, then tree name, then original order.
pub fn top_k_indices(candidates: &[AnchoredTree], stats: &StatsTable, k: usize) -> Vec<usize> {
    assert!(k >= 1, "k must be at least 1");
    let mut idx: Vec<usize> = (0..candidates.len()).collect();
    idx.sort_by(|&a, &b| {
        let (x, y) = (&candidates[a], &candidates[b]);
        stats
            .count(&y.origin_pos, &y.base)
            .cmp(&stats.count(&x.origin_pos, &x.base))
            .then_with(|| x.base.cmp(&y.base))
            .then(a.cmp(&b))
    });
    idx.truncate(k);
    idx
}

pub fn filter_top_k(candidates: &[AnchoredTree], stats: &StatsTable, k: usize) -> Vec<AnchoredTree> {
    top_k_indices(candidates, stats, k).into_iter().map(|i| candidates[i].clone()).collect()
}

/// Parses with each word's candidates cut to the top `k`; if that yields
/// nothing, parses again with every candidate. Candidate indices in the
/// returned derivations always refer to the unfiltered lists.
pub fn parse_with_retry(
    tokens: &[String],
    candidates: &[Vec<AnchoredTree>],
    start: &Category,
    stats: &StatsTable,
    k: usize,
    opts: &ParseOptions,
) -> ParseOutcome {
    let began = Instant::now();
    let kept: Vec<Vec<usize>> = candidates.iter().map(|c| top_k_indices(c, stats, k)).collect();
    let filtered: Vec<Vec<AnchoredTree>> =
        kept.iter().zip(candidates).map(|(ix, c)| ix.iter().map(|&i| c[i].clone()).collect()).collect();
    let t0 = Instant::now();
    let first = parse_with(tokens, &filtered, start, opts);
    let filtered_time = t0.elapsed();
    let mut attempts = vec![Attempt { label: "filtered".into(), derivations: first.derivations.len(), duration: filtered_time }];
    if !first.derivations.is_empty() {
        let mut derivations: Vec<Derivation> =
            first.derivations.iter().map(|d| d.map_candidates(&|pos, c| kept[pos][c])).collect();
        let mut order: Vec<usize> = (0..derivations.len()).collect();
        order.sort_by(|&a, &b| derivations[a].cmp(&derivations[b]));
        let derived_trees = order.iter().map(|&i| first.derived_trees[i].clone()).collect();
        derivations.sort();
        return ParseOutcome {
            sentence: tokens.to_vec(),
            derivations,
            derived_trees,
            pass: Pass::Filtered,
            timing: Timing { filtered: Some(filtered_time), retry: None, total: began.elapsed() },
            attempts,
            truncated: first.truncated,
        };
    }
    let t1 = Instant::now();
    let second = parse_with(tokens, candidates, start, opts);
    let retry_time = t1.elapsed();
    attempts.push(Attempt { label: "retry".into(), derivations: second.derivations.len(), duration: retry_time });
    let pass = if second.derivations.is_empty() { Pass::None } else { Pass::Retry };
    ParseOutcome {
        sentence: tokens.to_vec(),
        derivations: second.derivations,
        derived_trees: second.derived_trees,
        pass,
        timing: Timing { filtered: Some(filtered_time), retry: Some(retry_time), total: began.elapsed() },
        attempts,
        truncated: second.truncated,
    }
}

/// A single parse over every candidate, as an outcome.
pub fn parse_unfiltered(
    tokens: &[String],
    candidates: &[Vec<AnchoredTree>],
    start: &Category,
    opts: &ParseOptions,
) -> ParseOutcome {
    let t0 = Instant::now();
    let r = parse_with(tokens, candidates, start, opts);
    let d = t0.elapsed();
    ParseOutcome {
        sentence: tokens.to_vec(),
        pass: if r.derivations.is_empty() { Pass::None } else { Pass::Unfiltered },
        attempts: vec![Attempt { label: "unfiltered".into(), derivations: r.derivations.len(), duration: d }],
        timing: Timing { filtered: None, retry: None, total: d },
        truncated: r.truncated,
        derivations: r.derivations,
        derived_trees: r.derived_trees,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::{OpKind, Operation, TreeUse};
    use crate::grammar::{anchor, load_grammar};

    fn use_(tree: &str, pos: &str, position: usize) -> TreeUse {
        TreeUse { tree: tree.into(), lexemes: vec!["w".into()], position, candidate: 0, origin_pos: pos.into() }
    }

    fn cands(names: &[&str]) -> Vec<AnchoredTree> {
        let mut src = String::from("ltag-grammar v1\nstart N\n");
        for n in names {
            src.push_str(&format!("tree {n} initial\n0 N anchor\n"));
        }
        let g = load_grammar(&src).unwrap();
        names.iter().map(|n| anchor(g.tree(n).unwrap(), &["w".into()], &[], &"N".into()).unwrap()).collect()
    }

    #[test]
    fn collect_counts() {
        assert!(collect(Vec::<&[Derivation]>::new(), CountingUnit::PerDerivation).is_empty());
        let one = Derivation::leaf(use_("alpha_nx0Vnx1", "V", 1));
        let s = collect([std::slice::from_ref(&one)], CountingUnit::PerDerivation);
        assert_eq!(s.count(&"V".into(), "alpha_nx0Vnx1"), 1);
        let shared = use_("alpha_NP", "PropN", 0);
        let d1 = Derivation::with_operations(
            use_("alpha_nx0V", "V", 1),
            vec![Operation { target: "1".parse().unwrap(), kind: OpKind::Substitution, child: Derivation::leaf(shared.clone()) }],
        );
        let d2 = Derivation::with_operations(
            use_("alpha_nx0Vx", "V", 1),
            vec![Operation { target: "1".parse().unwrap(), kind: OpKind::Substitution, child: Derivation::leaf(shared) }],
        );
        let both = [d1, d2];
        let per_d = collect([&both[..]], CountingUnit::PerDerivation);
        assert_eq!(per_d.count(&"PropN".into(), "alpha_NP"), 2);
        let per_s = collect([&both[..]], CountingUnit::PerSentence);
        assert_eq!(per_s.count(&"PropN".into(), "alpha_NP"), 1);
        assert_eq!(per_d.total(&"V".into()), 2);
    }

    #[test]
    fn ranking() {
        let c = cands(&["t4", "t3", "t2", "t1"]);
        let mut s = StatsTable::new();
        for (t, n) in [("t1", 10), ("t2", 5), ("t3", 3), ("t4", 1)] {
            s.set(&"N".into(), t, n);
        }
        let names = |v: Vec<AnchoredTree>| v.into_iter().map(|a| a.base).collect::<Vec<_>>();
        assert_eq!(names(filter_top_k(&c, &s, 3)), ["t1", "t2", "t3"]);
        assert_eq!(filter_top_k(&c, &s, 9).len(), 4);
        let z = cands(&["tB", "tA", "tC"]);
        assert_eq!(names(filter_top_k(&z, &StatsTable::new(), 2)), ["tA", "tB"]);
    }

    #[test]
    fn text_round_trip() {
        let mut s = StatsTable::new();
        s.set(&"V".into(), "alpha_nx0Vnx1", 7);
        s.set(&"N".into(), "alpha_NXN", 2);
        assert_eq!(StatsTable::from_text(&s.to_text()).unwrap(), s);
        assert!(StatsTable::from_text("V\tx\tmany").is_err());
    }
}
