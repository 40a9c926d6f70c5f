//! Parses the gold sentences and prints a parseval report by length band.

use ltag::eval::{corpus_report, parse_bands, parse_gold_file, ReportOptions};
use ltag::workbench::{run_pipeline, sample, Workspace};

fn main() {
    let ws = Workspace::sample();
    let gold = parse_gold_file(sample::GOLD).expect("bundled gold parses");
    let outcomes: Vec<_> = gold
        .iter()
        .map(|g| run_pipeline(&ws, &g.tokens.join(" "), &ws.config).expect("pipeline runs").outcome)
        .collect();
    let opts = ReportOptions { bands: parse_bands("1-3,1-5").unwrap(), drop_preterminals: true, ..Default::default() };
    let report = corpus_report(&outcomes, Some(&gold), &opts).expect("tokens line up");
    print!("{}", report.render_table());
}
