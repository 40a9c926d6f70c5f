use std::path::Path;
use std::process::Command;

fn ltag(ws: Option<&Path>, args: &[&str]) -> (bool, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ltag"));
    cmd.env_remove("LTAG_WORKSPACE");
    if let Some(d) = ws {
        cmd.arg("--workspace").arg(d);
    }
    let out = cmd.args(args).output().unwrap();
    (out.status.success(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn parse_sample_sentence() {
    let (ok, out, _) = ltag(None, &["parse", "Mary chases the dog.", "--json"]);
    assert!(ok);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["parsed"], true);
    assert_eq!(v["tokens"].as_array().unwrap().len(), 5);

    let (ok, out, _) = ltag(None, &["parse", "dog the chases Mary", "--tagger", "off"]);
    assert!(ok);
    assert!(out.contains("no parse"));
}

#[test]
fn edits_go_to_disk() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(ltag(None, &["init", d.to_str().unwrap()]).0);
    assert!(!ltag(None, &["db", "morph", "insert", "wugs", "wug", "N", "pl"]).0, "sample workspace is read-only");

    assert!(ltag(Some(d), &["db", "morph", "insert", "wug", "wug", "N", "sg"]).0);
    assert!(ltag(Some(d), &["db", "morph", "insert", "wugs", "wug", "N", "pl"]).0);
    let (_, out, _) = ltag(Some(d), &["db", "morph", "search", "root", "wug"]);
    assert_eq!(out.lines().count(), 2);
    assert!(ltag(Some(d), &["db", "morph", "update", "wugs,wug,N,pl", "wugz,wug,N,pl"]).0);
    let (_, out, _) = ltag(Some(d), &["db", "morph", "lookup", "wugz"]);
    assert_eq!(out.trim(), "wugz\twug\tN\tpl");
    assert!(ltag(Some(d), &["db", "morph", "delete", "wugz", "wug", "N", "pl"]).0);
    assert!(!ltag(Some(d), &["db", "morph", "delete", "wugz", "wug", "N", "pl"]).0);

    assert!(ltag(Some(d), &["db", "synt", "insert", "glorp", "V", "@Tnx0Vnx1"]).0);
    assert!(ltag(Some(d), &["db", "morph", "insert", "glorps", "glorp", "V", "3sg,pres"]).0);
    let (_, out, _) = ltag(Some(d), &["db", "synt", "lookup", "glorp"]);
    assert_eq!(out.trim(), "glorp\tV\t@Tnx0Vnx1\t-");
    let (ok, out, _) = ltag(Some(d), &["parse", "John glorps Mary", "--tagger", "off", "--json"]);
    assert!(ok);
    assert_eq!(serde_json::from_str::<serde_json::Value>(&out).unwrap()["parsed"], true);
    assert!(ltag(Some(d), &["db", "synt", "update", "glorp", "V", "@Tnx0Vnx1", "@Tnx0V"]).0);
    let (_, out, _) = ltag(Some(d), &["db", "synt", "lookup", "glorp"]);
    assert_eq!(out.trim(), "glorp\tV\t@Tnx0V\t-");
    assert!(ltag(Some(d), &["db", "synt", "delete", "glorp", "V", "@Tnx0V"]).0);
    let (_, out, _) = ltag(Some(d), &["db", "synt", "search", "index", "glo*"]);
    assert!(out.is_empty());
}

#[test]
fn tagger_stats_export_eval() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(ltag(None, &["init", d.to_str().unwrap()]).0);

    let model = d.join("t.model");
    let corpus = d.join("tagged.txt");
    assert!(ltag(None, &["tag", "train", corpus.to_str().unwrap(), "--out", model.to_str().unwrap()]).0);
    assert!(std::fs::read_to_string(&model).unwrap().starts_with("ltag-tagger v1"));
    let (ok, out, _) = ltag(None, &["tag", "run", "John loves Mary", "--n-best", "3"]);
    assert!(ok);
    assert_eq!(out.lines().count(), 3);
    assert!(out.lines().next().unwrap().ends_with("John/PropN loves/V Mary/PropN"));

    let stats = d.join("new_stats.tsv");
    let corpus = d.join("corpus.txt");
    assert!(ltag(None, &["stats", "collect", corpus.to_str().unwrap(), "--out", stats.to_str().unwrap()]).0);
    let (_, shown, _) = ltag(None, &["stats", "show"]);
    assert_eq!(std::fs::read_to_string(&stats).unwrap(), shown);

    let (ok, out, _) = ltag(None, &["export", "beta_Dnx", "--format", "bracketed"]);
    assert!(ok);
    assert_eq!(out.trim(), "(NP (D) (NP*))");
    let (ok, out, _) = ltag(None, &["export", "--sentence", "Sue sleeps", "--format", "svg"]);
    assert!(ok && out.starts_with("<svg"));
    assert!(!ltag(None, &["export", "no_tree"]).0);

    let gold = d.join("gold.txt");
    let (ok, out, err) = ltag(None, &["eval", "--gold", gold.to_str().unwrap(), "--bands", "1-3,1-6", "--tsv"]);
    assert!(ok, "{err}");
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[1].starts_with("all\t10\t"));
}
