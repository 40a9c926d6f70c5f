//! Unifies a few feature structures and prints the results or the clash.

use ltag::features::{parse_structure, unify, Bindings};

fn main() {
    let pairs = [
        ("{agr: {num: sg}, case: ?C}", "{agr: {per: 3}, case: nom}"),
        ("{agr: ?A, subj: {agr: ?A}}", "{agr: {num: pl}}"),
        ("{agr: {num: sg}}", "{agr: {num: pl}}"),
    ];
    for (a, b) in pairs {
        let (x, y) = (parse_structure(a).unwrap(), parse_structure(b).unwrap());
        match unify(&x, &y, &Bindings::new()) {
            Ok((r, env)) => println!("{a} ⊔ {b}\n  = {}", env.canonical(&r)),
            Err(e) => println!("{a} ⊔ {b}\n  fails: {e}"),
        }
    }
}
