use ltag::derived::{load_derived, write_derived};
use ltag::grammar::{load_grammar, load_tree, write_grammar, write_tree};
use ltag::morph::MorphDatabase;
use ltag::stats::StatsTable;
use ltag::synt::SyntDatabase;
use ltag::tagger::Tagger;
use ltag::workbench::{export_elementary, run_pipeline, sample, ExportFormat, Lexicon, PipelineConfig, Workspace};

#[test]
fn grammar_and_every_tree() {
    let ws = Workspace::sample();
    let text = write_grammar(&ws.grammar);
    let again = load_grammar(&text).unwrap();
    assert_eq!(again, ws.grammar);
    assert_eq!(write_grammar(&again), text);
    for t in ws.grammar.trees.values() {
        assert_eq!(load_tree(&write_tree(t)).unwrap(), *t, "{}", t.name);
        assert_eq!(export_elementary(t, ExportFormat::Text), write_tree(t));
        assert!(export_elementary(t, ExportFormat::Svg).contains(&t.root.category.to_string()));
    }
}

#[test]
fn databases_and_tables() {
    let ws = Workspace::sample();
    let morph = MorphDatabase::from_text(&ws.morph.to_text()).unwrap();
    assert_eq!(morph.entries().collect::<Vec<_>>(), ws.morph.entries().collect::<Vec<_>>());
    assert_eq!(morph.to_text(), ws.morph.to_text());

    let synt = SyntDatabase::from_text(&ws.synt.to_text(), &ws.grammar).unwrap();
    assert_eq!(synt.to_text(), ws.synt.to_text());
    assert_eq!(synt.entries().count(), ws.synt.entries().count());

    let stats = StatsTable::from_text(&ws.stats.to_text()).unwrap();
    assert_eq!(stats, ws.stats);
    assert_eq!(StatsTable::from_text(sample::STATS).unwrap(), ws.stats);

    let tagger = ws.tagger.as_ref().unwrap();
    let reloaded = Tagger::from_text(&tagger.to_text()).unwrap();
    assert_eq!(reloaded.to_text(), tagger.to_text());
    let words: Vec<String> = ["Mary", "sees", "the", "dog"].iter().map(|w| w.to_string()).collect();
    assert_eq!(reloaded.n_best(&words, 3), tagger.n_best(&words, 3));

    assert_eq!(PipelineConfig::from_toml(&ws.config.to_toml()).unwrap(), ws.config);
    assert_eq!(Lexicon::from_toml(&ws.lexicon.to_toml()).unwrap(), ws.lexicon);
}

#[test]
fn derived_trees_of_the_corpus() {
    let ws = Workspace::sample();
    let mut seen = 0;
    for (s, _) in sample::corpus() {
        let r = run_pipeline(&ws, &s, &ws.config).unwrap();
        for t in &r.outcome.derived_trees {
            let n = t.resolved();
            assert_eq!(load_derived(&write_derived(&n)).unwrap(), n, "{s}");
            assert_eq!(load_derived(&write_derived(&t.root)).unwrap(), t.root, "{s}");
            seen += 1;
        }
    }
    assert!(seen >= 32);
}

#[test]
fn whole_workspace_on_disk() {
    let dir = tempfile_dir();
    let ws = Workspace::sample();
    ws.save_to(&dir).unwrap();
    let back = Workspace::open(&dir).unwrap();
    assert_eq!(back.grammar, ws.grammar);
    assert_eq!(back.morph.to_text(), ws.morph.to_text());
    assert_eq!(back.synt.to_text(), ws.synt.to_text());
    assert_eq!(back.stats, ws.stats);
    assert_eq!(back.lexicon, ws.lexicon);
    assert_eq!(back.tagger.as_ref().unwrap().to_text(), ws.tagger.as_ref().unwrap().to_text());
    back.save().unwrap();
    assert_eq!(Workspace::open(&dir).unwrap().config, back.config);
    std::fs::remove_dir_all(&dir).unwrap();
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("ltag-roundtrip-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
