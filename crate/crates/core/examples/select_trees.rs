//! Shows which elementary trees each word of a sentence selects, with and
//! without the tagger's help.

use ltag::tagger::{blend, unblended};
use ltag::workbench::Workspace;

fn main() {
    let ws = Workspace::sample();
    let tokens = ws.tokenize("John saw the man");
    let morph = ws.analyze(&tokens);
    let nbest = ws.tagger.as_ref().expect("sample has a tagger").n_best(&tokens, 1);
    for (label, analyses) in [("untagged", unblended(&morph)), ("tagged", blend(&morph, &nbest).unwrap())] {
        println!("{label}:");
        let selected = ws.select(&analyses);
        for (w, trees) in tokens.iter().zip(&selected) {
            let names: Vec<String> = trees.iter().map(|t| format!("{}[{}]", t.base, t.origin_pos)).collect();
            println!("  {w:<6} {}", names.join(" "));
        }
    }
}
