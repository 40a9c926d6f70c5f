use std::collections::HashMap;

use ltag::derivation::OpKind;
use ltag::derived::{extract_derived, write_derived, DerivedNode};
use ltag::grammar::{anchor, AnchoredTree, Category, Grammar};
use ltag::parser::parse;
use ltag::workbench::{ScratchArea, Source, Workspace};

/// The text form with variables renamed in order of first appearance.
fn canonical(n: &DerivedNode) -> String {
    let text = write_derived(n);
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut out = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '?' {
            out.push(c);
            continue;
        }
        let mut name = String::new();
        while let Some(&d) = chars.peek() {
            if d.is_alphanumeric() || d == '#' || d == '_' {
                name.push(d);
                chars.next();
            } else {
                break;
            }
        }
        let next = names.len();
        out.push_str(&format!("?v{}", names.entry(name).or_insert(next)));
    }
    out
}

fn lex(g: &Grammar, tree: &str, word: &str) -> AnchoredTree {
    let t = g.tree(tree).unwrap();
    anchor(t, &[word.to_string()], &[], &t.root.category).unwrap()
}

fn src(tree: &str, word: &str) -> Source {
    Source::Tree { name: tree.into(), lexemes: vec![word.into()], equations: String::new() }
}

#[test]
fn hand_built_tree_matches_the_parse() {
    let g = Workspace::sample().grammar;
    let words = ["John", "madly", "loves", "Mary"];
    let trees = ["alpha_NP", "beta_vxARBvx", "alpha_nx0Vnx1", "alpha_NP"];
    let candidates: Vec<Vec<AnchoredTree>> = words.iter().zip(trees).map(|(w, t)| vec![lex(&g, t, w)]).collect();
    let tokens: Vec<String> = words.iter().map(|w| w.to_string()).collect();
    let r = parse(&tokens, &candidates, &Category::new("S"));
    assert_eq!(r.derivations.len(), 1);
    let parsed = extract_derived(&r.derivations[0], &candidates).unwrap().root;

    // Adjoin first, then fill the sites at their shifted addresses.
    let mut a = ScratchArea::new();
    a.create(&g, "s", "alpha_nx0Vnx1", &["loves".into()]).unwrap();
    a.combine(&g, "s", &"2".parse().unwrap(), &src("beta_vxARBvx", "madly"), OpKind::Adjunction).unwrap();
    assert_eq!(a.get("s").unwrap().root.open_substitution_sites(), ["1".parse().unwrap(), "2.2.2".parse().unwrap()]);
    a.combine(&g, "s", &"2.2.2".parse().unwrap(), &src("alpha_NP", "Mary"), OpKind::Substitution).unwrap();
    a.combine(&g, "s", &"1".parse().unwrap(), &src("alpha_NP", "John"), OpKind::Substitution).unwrap();
    let hand = a.get("s").unwrap().finalized().unwrap();

    assert_eq!(hand.bracketed(), "(S (NP John) (VP (Ad madly) (VP (V loves) (NP Mary))))");
    assert_eq!(canonical(&hand), canonical(&parsed));
    assert_eq!(a.undo_depth(), 4);
}

#[test]
fn scratch_trees_combine_with_each_other() {
    let g = Workspace::sample().grammar;
    let mut a = ScratchArea::new();
    a.create(&g, "np", "alpha_NXN", &["dog".into()]).unwrap();
    a.combine(&g, "np", &"0".parse().unwrap(), &src("beta_Dnx", "the"), OpKind::Adjunction).unwrap();
    a.create(&g, "s", "alpha_nx0V", &["sleeps".into()]).unwrap();
    a.combine(&g, "s", &"1".parse().unwrap(), &Source::Scratch("np".into()), OpKind::Substitution).unwrap();
    assert!(a.get("np").is_none());
    let s = a.get("s").unwrap();
    assert_eq!(s.trees, ["alpha_nx0V", "alpha_NXN", "beta_Dnx"]);
    assert_eq!(s.finalized().unwrap().bracketed(), "(S (NP (D the) (NP (N dog))) (VP (V sleeps)))");

    a.undo().unwrap();
    assert!(a.get("np").is_some());
    assert!(a.get("s").unwrap().root.open_substitution_sites().len() == 1);
}
