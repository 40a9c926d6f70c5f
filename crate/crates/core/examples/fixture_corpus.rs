//! Runs the bundled fixture corpus through the pipeline in each tagger
//! mode and reports which sentences parse.

use ltag::workbench::{run_pipeline, sample, TaggerMode, Workspace};

fn main() {
    let ws = Workspace::sample();
    for mode in [TaggerMode::Enabled, TaggerMode::Disabled, TaggerMode::RetryOnFailure] {
        let mut cfg = ws.config.clone();
        cfg.tagger_mode = mode;
        let mut wrong = 0;
        println!("== tagger {mode}");
        for (sentence, grammatical) in sample::corpus() {
            let r = run_pipeline(&ws, &sentence, &cfg).expect("pipeline runs");
            let ok = r.outcome.parsed() == grammatical;
            if !ok {
                wrong += 1;
            }
            println!(
                "{} {}{:<40} parses={} pass={:?}",
                if ok { "ok " } else { "BAD" },
                if grammatical { " " } else { "*" },
                sentence,
                r.outcome.derivations.len(),
                r.outcome.pass
            );
        }
        println!("{wrong} wrong\n");
    }
}
