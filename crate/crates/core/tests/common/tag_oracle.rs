//! Exhaustive tag-sequence enumeration for small sentences.

use ltag::grammar::Category;
use ltag::tagger::{parse_tagged_corpus, Tagger, END, START};
use rand::seq::SliceRandom;
use rand::Rng;

pub const TAGS: [&str; 5] = ["A", "B", "C", "D", "E"];
pub const VOCAB: [&str; 3] = ["x", "y", "z"];

/// A tagger trained on a random corpus over five tags.
pub fn toy_tagger(rng: &mut impl Rng) -> Tagger {
    let mut lines = Vec::new();
    for _ in 0..rng.gen_range(4..12) {
        let n = rng.gen_range(1..6);
        let toks: Vec<String> =
            (0..n).map(|_| format!("{}/{}", VOCAB.choose(rng).unwrap(), TAGS.choose(rng).unwrap())).collect();
        lines.push(toks.join(" "));
    }
    // every tag appears at least once
    lines.push(TAGS.iter().map(|t| format!("x/{t}")).collect::<Vec<_>>().join(" "));
    Tagger::train(&parse_tagged_corpus(&lines.join("\n")).unwrap()).unwrap()
}

/// Score of one sequence from the model's published probabilities, summed
/// right to left.
pub fn independent_score(t: &Tagger, words: &[String], tags: &[&str]) -> f64 {
    let mut padded = vec![START, START];
    padded.extend_from_slice(tags);
    padded.push(END);
    let mut terms = Vec::new();
    for i in 2..padded.len() {
        terms.push(t.transition_logprob(padded[i - 2], padded[i - 1], padded[i]));
        if i - 2 < words.len() {
            terms.push(t.emission_logprob(&words[i - 2], padded[i]));
        }
    }
    terms.iter().rev().sum()
}

/// Every sequence, best first.
pub fn enumerate(t: &Tagger, words: &[String]) -> Vec<(f64, Vec<String>)> {
    let tags: Vec<&str> = t.tags().iter().map(String::as_str).collect();
    let mut out: Vec<(f64, Vec<String>)> = Vec::new();
    let total = tags.len().pow(words.len() as u32);
    for mut code in 0..total {
        let mut seq = Vec::new();
        for _ in 0..words.len() {
            seq.push(tags[code % tags.len()]);
            code /= tags.len();
        }
        seq.reverse();
        out.push((independent_score(t, words, &seq), seq.iter().map(|s| s.to_string()).collect()));
    }
    out.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    out
}

/// Compares `n_best(words, n)` with exhaustive enumeration. Returns a
/// description of the first disagreement.
pub fn check_n_best(t: &Tagger, words: &[String], n: usize) -> Result<(), String> {
    let tol = 1e-9;
    let all = enumerate(t, words);
    let got = t.n_best(words, n);
    let want = n.min(all.len());
    if got.len() != want {
        return Err(format!("{words:?}: {} sequences, expected {want}", got.len()));
    }
    if got[0] != t.viterbi(words) {
        return Err(format!("{words:?}: viterbi differs from first n-best"));
    }
    for (i, g) in got.iter().enumerate() {
        let tags: Vec<&str> = g.tags.iter().map(Category::as_str).collect();
        let own = independent_score(t, words, &tags);
        if (own - g.score).abs() > tol {
            return Err(format!("{words:?}: reported score {} but sequence scores {own}", g.score));
        }
        if (all[i].0 - g.score).abs() > tol {
            return Err(format!("{words:?}: rank {i} scores {} but exhaustive rank {i} scores {}", g.score, all[i].0));
        }
        let unique_rank =
            (i == 0 || all[i - 1].0 - all[i].0 > tol) && (i + 1 >= all.len() || all[i].0 - all[i + 1].0 > tol);
        let owned: Vec<String> = tags.iter().map(|s| s.to_string()).collect();
        if unique_rank && owned != all[i].1 {
            return Err(format!("{words:?}: rank {i} is {owned:?}, expected {:?}", all[i].1));
        }
        if i > 0 {
            if got[i - 1].score < g.score {
                return Err(format!("{words:?}: scores increase at rank {i}"));
            }
            if got[i - 1].tags == g.tags {
                return Err(format!("{words:?}: duplicate sequence at rank {i}"));
            }
        }
    }
    Ok(())
}

/// All sentences up to `max_len` words over the toy vocabulary plus one
/// unknown word.
pub fn all_sentences(max_len: usize) -> Vec<Vec<String>> {
    let mut vocab: Vec<String> = VOCAB.iter().map(|s| s.to_string()).collect();
    vocab.push("unseen".into());
    let mut out = Vec::new();
    let mut layer: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &layer {
            for w in &vocab {
                let mut s2 = s.clone();
                s2.push(w.clone());
                next.push(s2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
