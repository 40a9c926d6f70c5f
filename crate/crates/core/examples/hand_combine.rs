//! Builds "the dog madly chases Mary" by hand, shows a feature clash, then
//! undoes a step.

use ltag::derivation::OpKind;
use ltag::workbench::{ScratchArea, Source, Workspace};

fn tree(name: &str, word: &str) -> Source {
    Source::Tree { name: name.into(), lexemes: vec![word.into()], equations: String::new() }
}

fn main() {
    let g = Workspace::sample().grammar;
    let mut a = ScratchArea::new();
    let at = |s: &str| s.parse().unwrap();

    a.create(&g, "s", "alpha_nx0Vnx1", &["chases".into()]).unwrap();
    a.create(&g, "np", "alpha_NXN", &["dog".into()]).unwrap();
    a.combine(&g, "np", &at("0"), &tree("beta_Dnx", "the"), OpKind::Adjunction).unwrap();
    a.combine(&g, "s", &at("1"), &Source::Scratch("np".into()), OpKind::Substitution).unwrap();
    a.combine(&g, "s", &at("2"), &tree("beta_vxARBvx", "madly"), OpKind::Adjunction).unwrap();
    let open: Vec<String> = a.get("s").unwrap().root.open_substitution_sites().iter().map(|x| x.to_string()).collect();
    println!("open sites: {}", open.join(", "));
    a.combine(&g, "s", &at("2.2.2"), &tree("alpha_NP", "Mary"), OpKind::Substitution).unwrap();
    println!("{}", a.get("s").unwrap().finalized().unwrap().bracketed());

    a.create_with(&g, "him", "alpha_NP", &["him".into()], "anchor.top.case = acc").unwrap();
    a.create(&g, "t", "alpha_nx0V", &["sleeps".into()]).unwrap();
    match a.combine(&g, "t", &at("1"), &Source::Scratch("him".into()), OpKind::Substitution) {
        Ok(_) => println!("unexpectedly combined"),
        Err(e) => println!("clash: {e} (path {:?})", e.feature_path().unwrap_or_default()),
    }

    a.undo().unwrap();
    println!("after undo: {:?}", a.names().collect::<Vec<_>>());
}
