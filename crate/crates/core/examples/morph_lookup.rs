//! Morphological analyses of a few words, including case folding and the
//! default rules for an unknown word.
//!
//! cargo run -p ltag --example morph_lookup -- Loves saw glorbed

use ltag::workbench::Workspace;

fn main() {
    let ws = Workspace::sample();
    let words: Vec<String> = std::env::args().skip(1).collect();
    let words = if words.is_empty() { vec!["Loves".into(), "saw".into(), "n't".into(), "glorbed".into()] } else { words };
    for w in &words {
        let found = ws.morph.analyze(w);
        println!("{w}:");
        if found.is_empty() {
            println!("  (no analysis)");
        }
        for e in found {
            println!("  {e}");
        }
    }
}
