//! Writes one elementary tree and one parse in each export format.
//!
//! cargo run -p ltag --example export_tree -- beta_vxPnx

use ltag::workbench::{export_derived, export_elementary, run_pipeline, ExportFormat, Workspace};

fn main() {
    let ws = Workspace::sample();
    let name = std::env::args().nth(1).unwrap_or_else(|| "beta_vxPnx".into());
    let t = ws.grammar.tree(&name).expect("tree exists");
    for f in [ExportFormat::Text, ExportFormat::Bracketed, ExportFormat::Svg] {
        println!("== {name} as {f} ({})\n{}", f.media_type(), export_elementary(t, f));
    }
    let r = run_pipeline(&ws, "Sue runs in spite of Mary", &ws.config).expect("pipeline runs");
    let parse = &r.outcome.derived_trees[0];
    println!("== parse as bracketed\n{}", export_derived(&parse.resolved(), ExportFormat::Bracketed));
}
