//! Runs the whole pipeline on one sentence and prints every derivation
//! with its derived tree.
//!
//! cargo run -p ltag --example parse_sentence -- "John saw the man with a telescope"

use ltag::workbench::{run_pipeline, Workspace};

fn main() {
    let ws = Workspace::sample();
    let raw = std::env::args().nth(1).unwrap_or_else(|| "John saw the man with a telescope.".into());
    let r = run_pipeline(&ws, &raw, &ws.config).expect("pipeline runs");
    println!("tokens: {:?}", r.tokens);
    for a in &r.outcome.attempts {
        println!("{}: {} derivations in {:?}", a.label, a.derivations, a.duration);
    }
    for (d, t) in r.outcome.derivations.iter().zip(&r.outcome.derived_trees) {
        println!("\n{d}\n{}", t.root.bracketed());
    }
}
