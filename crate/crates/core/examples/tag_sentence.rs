//! Trains the trigram tagger on the bundled tagged corpus and prints the
//! best tag sequences for a sentence.
//!
//! cargo run -p ltag --example tag_sentence -- "John saw the dog"

use ltag::tagger::{parse_tagged_corpus, Tagger};
use ltag::workbench::{sample, tokenize};

fn main() {
    let corpus = parse_tagged_corpus(sample::TAGGED).expect("bundled corpus parses");
    let tagger = Tagger::train(&corpus).expect("corpus is non-empty");
    let raw = std::env::args().nth(1).unwrap_or_else(|| "John saw the dog".into());
    let words = tokenize(&raw);
    for (rank, s) in tagger.n_best(&words, 4).iter().enumerate() {
        let tagged: Vec<String> = words.iter().zip(&s.tags).map(|(w, t)| format!("{w}/{t}")).collect();
        println!("{}. {:>9.4}  {}", rank + 1, s.score, tagged.join(" "));
    }
}
