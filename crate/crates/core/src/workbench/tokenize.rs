//! Sentence tokenization.

const PUNCT: &[char] = &['.', ',', ';', ':', '!', '?', '"', '(', ')', '[', ']'];

/// Contractions whose stem is not the word minus `n't`.
const IRREGULAR: &[(&str, &str, &str)] = &[("can't", "ca", "n't"), ("won't", "wo", "n't"), ("shan't", "sha", "n't")];

const CLITICS: &[&str] = &["'s", "'re", "'ll", "'ve", "'m", "'d"];

/// Splits on whitespace, peels punctuation off word edges, and splits
/// contractions: `don't` → `do n't`, `John's` → `John 's`.
pub fn tokenize(raw: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in raw.split_whitespace() {
        let mut trailing = Vec::new();
        let mut word = chunk;
        while let Some(c) = word.chars().next().filter(|c| PUNCT.contains(c)) {
            out.push(c.to_string());
            word = &word[c.len_utf8()..];
        }
        while let Some(c) = word.chars().last().filter(|c| PUNCT.contains(c)) {
            trailing.push(c.to_string());
            word = &word[..word.len() - c.len_utf8()];
        }
        if !word.is_empty() {
            split_contraction(word, &mut out);
        }
        out.extend(trailing.into_iter().rev());
    }
    out
}

fn split_contraction(word: &str, out: &mut Vec<String>) {
    let lower = word.to_lowercase();
    if let Some((_, stem, neg)) = IRREGULAR.iter().find(|(w, _, _)| *w == lower) {
        let stem = if word.starts_with(char::is_uppercase) { capitalize(stem) } else { stem.to_string() };
        out.push(stem);
        out.push(neg.to_string());
        return;
    }
    if lower.len() > 3 && lower.ends_with("n't") {
        out.push(word[..word.len() - 3].to_string());
        out.push("n't".to_string());
        return;
    }
    for c in CLITICS {
        if lower.len() > c.len() && lower.ends_with(c) {
            out.push(word[..word.len() - c.len()].to_string());
            out.push(word[word.len() - c.len()..].to_string());
            return;
        }
    }
    out.push(word.to_string());
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
}

/// Like [`tokenize`], then joins any run of tokens that spells one of
/// `phrases` (longest first; the first word compared case-insensitively)
/// into a single space-separated token.
pub fn tokenize_with(raw: &str, phrases: &[Vec<String>]) -> Vec<String> {
    let tokens = tokenize(raw);
    let mut by_len: Vec<&Vec<String>> = phrases.iter().filter(|p| !p.is_empty()).collect();
    by_len.sort_by_key(|p| std::cmp::Reverse(p.len()));
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let hit = by_len.iter().find(|p| {
            i + p.len() <= tokens.len()
                && tokens[i].to_lowercase() == p[0].to_lowercase()
                && tokens[i + 1..i + p.len()] == p[1..]
        });
        match hit {
            Some(p) => {
                out.push(tokens[i..i + p.len()].join(" "));
                i += p.len();
            }
            None => {
                out.push(tokens[i].clone());
                i += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn punctuation_and_contractions() {
        assert_eq!(tokenize("John loves Mary."), ["John", "loves", "Mary", "."]);
        assert_eq!(tokenize("don't"), ["do", "n't"]);
        assert_eq!(tokenize("He doesn't (often) run!"), ["He", "does", "n't", "(", "often", ")", "run", "!"]);
        assert_eq!(tokenize("Can't"), ["Ca", "n't"]);
        assert_eq!(tokenize("John's dog"), ["John", "'s", "dog"]);
        assert_eq!(tokenize("3.5 dogs"), ["3.5", "dogs"]);
        assert!(tokenize("").is_empty());
        assert!(tokenize("   ").is_empty());
    }

    #[test]
    fn phrases_merge() {
        let p = vec![vec!["in".to_string(), "spite".into(), "of".into()], vec!["in".to_string(), "spite".into()]];
        assert_eq!(tokenize_with("In spite of it.", &p), ["In spite of", "it", "."]);
        assert_eq!(tokenize_with("in spite", &p), ["in spite"]);
        assert_eq!(tokenize_with("in the park", &p), ["in", "the", "park"]);
    }
}
