//! Parses the grammatical fixture sentences untagged and unfiltered, and
//! prints tree-use counts in the stats file format.

use ltag::stats::{collect, CountingUnit};
use ltag::workbench::{run_pipeline, sample, TaggerMode, Workspace};

fn main() {
    let ws = Workspace::sample();
    let mut cfg = ws.config.clone();
    cfg.tagger_mode = TaggerMode::Disabled;
    cfg.stats_filter = false;
    let parsed: Vec<_> = sample::corpus()
        .into_iter()
        .filter(|(_, ok)| *ok)
        .map(|(s, _)| run_pipeline(&ws, &s, &cfg).expect("pipeline runs").outcome.derivations)
        .collect();
    let table = collect(parsed.iter().map(Vec::as_slice), CountingUnit::PerDerivation);
    print!("{}", table.to_text());
}
