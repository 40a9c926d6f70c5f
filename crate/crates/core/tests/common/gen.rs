//! Random small grammars, sentences and feature structures.

use rand::seq::SliceRandom;
use rand::Rng;

use ltag::features::{parse_equations, FeatureStructure, FeatureValue, Variable};
use ltag::grammar::{anchor, AnchoredTree, ElementaryTree, GornAddress, NodeKind, TreeNode, TreeType};

pub const PHRASAL: [&str; 3] = ["S", "A", "B"];
pub const WORDS: [&str; 3] = ["a", "b", "c"];

fn small_fs(rng: &mut impl Rng) -> FeatureStructure {
    let mut fs = FeatureStructure::new();
    if rng.gen_bool(0.35) {
        let v = match rng.gen_range(0..4) {
            0 => FeatureValue::atom("p"),
            1 => FeatureValue::atom("q"),
            2 => FeatureValue::var("X"),
            _ => FeatureValue::var("Y"),
        };
        fs.insert(["f", "g"][rng.gen_range(0..2)], v);
    }
    fs
}

fn decorate(n: &mut TreeNode, rng: &mut impl Rng) {
    n.top = small_fs(rng);
    if n.kind != NodeKind::Substitution {
        n.bottom = small_fs(rng);
    }
    for c in &mut n.children {
        decorate(c, rng);
    }
}

fn gen_node(rng: &mut impl Rng, addr: GornAddress, cat: &str, depth: usize) -> TreeNode {
    let mut n = TreeNode::new(addr.clone(), cat, NodeKind::Interior);
    let k = rng.gen_range(1..=if depth == 0 { 3 } else { 2 });
    for i in 0..k {
        let a = addr.child(i);
        let roll = rng.gen_range(0..10);
        let child = if roll < 4 || depth >= 1 && roll < 7 {
            TreeNode::new(a, ["x", "y"][rng.gen_range(0..2)], NodeKind::Anchor)
        } else if roll < 8 {
            TreeNode::new(a, *PHRASAL.choose(rng).unwrap(), NodeKind::Substitution)
        } else {
            let cat = *PHRASAL.choose(rng).unwrap();
            gen_node(rng, a, cat, depth + 1)
        };
        n.children.push(child);
    }
    n
}

fn leaves_mut<'a>(n: &'a mut TreeNode, out: &mut Vec<&'a mut TreeNode>) {
    if n.children.is_empty() {
        out.push(n);
    } else {
        for c in &mut n.children {
            leaves_mut(c, out);
        }
    }
}

fn anchors(n: &TreeNode) -> usize {
    n.preorder().iter().filter(|n| n.kind == NodeKind::Anchor).count()
}

pub fn gen_tree(rng: &mut impl Rng, name: String, auxiliary: bool, root_cat: &str) -> ElementaryTree {
    loop {
        let mut root = if !auxiliary && rng.gen_bool(0.2) {
            TreeNode::new(GornAddress::root(), root_cat, NodeKind::Anchor)
        } else {
            gen_node(rng, GornAddress::root(), root_cat, 0)
        };
        if auxiliary {
            let mut leaves = Vec::new();
            leaves_mut(&mut root, &mut leaves);
            let k = rng.gen_range(0..leaves.len());
            leaves[k].kind = NodeKind::Foot;
            leaves[k].category = root_cat.into();
        }
        let a = anchors(&root);
        if a == 0 || a > 2 || (root.children.len() == 1 && root.children[0].kind == NodeKind::Foot) {
            continue;
        }
        decorate(&mut root, rng);
        let t = ElementaryTree::new(name.clone(), if auxiliary { TreeType::Auxiliary } else { TreeType::Initial }, root);
        if t.validate().is_empty() {
            return t;
        }
    }
}

pub fn gen_grammar(rng: &mut impl Rng) -> Vec<ElementaryTree> {
    let n = rng.gen_range(2..=6);
    let mut trees = vec![gen_tree(rng, "t0".into(), false, "S")];
    for i in 1..n {
        let aux = rng.gen_bool(0.4);
        let cat = PHRASAL.choose(rng).unwrap();
        trees.push(gen_tree(rng, format!("t{i}"), aux, cat));
    }
    trees
}

fn anchor_random(rng: &mut impl Rng, t: &ElementaryTree, word: &str) -> Option<AnchoredTree> {
    let mut lexemes = vec![word.to_string()];
    for _ in 1..t.anchors.len() {
        lexemes.push(WORDS.choose(rng).unwrap().to_string());
    }
    anchor_with(rng, t, lexemes)
}

fn anchor_with(rng: &mut impl Rng, t: &ElementaryTree, lexemes: Vec<String>) -> Option<AnchoredTree> {
    let eqs = if rng.gen_bool(0.3) {
        parse_equations(&format!("anchor.bottom.f = {}", ["p", "q"][rng.gen_range(0..2)])).unwrap()
    } else {
        Vec::new()
    };
    let pos = t.node(&t.anchors[0]).unwrap().category.clone();
    anchor(t, &lexemes, &eqs, &pos).ok()
}

pub struct Instance {
    pub grammar: Vec<ElementaryTree>,
    pub tokens: Vec<String>,
    pub candidates: Vec<Vec<AnchoredTree>>,
}

pub fn gen_instance(rng: &mut impl Rng) -> Instance {
    loop {
        let grammar = gen_grammar(rng);
        let sampled = if rng.gen_bool(0.6) { sample_simple(rng, &grammar) } else { None };
        let tokens: Vec<String> = match &sampled {
            Some((w, _)) => w.clone(),
            None => (0..rng.gen_range(1..=6)).map(|_| WORDS.choose(rng).unwrap().to_string()).collect(),
        };
        let mut candidates: Vec<Vec<AnchoredTree>> = vec![Vec::new(); tokens.len()];
        if let Some((_, uses)) = &sampled {
            for (pos, t, lexemes) in uses {
                if candidates[*pos].len() < 4 {
                    if let Some(a) = anchor_with(rng, &grammar[*t], lexemes.clone()) {
                        if !candidates[*pos].contains(&a) {
                            candidates[*pos].push(a);
                        }
                    }
                }
            }
        }
        for (pos, w) in tokens.iter().enumerate() {
            let extra = rng.gen_range(0..=2);
            for _ in 0..extra {
                if candidates[pos].len() >= 4 {
                    break;
                }
                let t = grammar.choose(rng).unwrap();
                if let Some(a) = anchor_random(rng, t, w) {
                    if !candidates[pos].contains(&a) {
                        candidates[pos].push(a);
                    }
                }
            }
        }
        if candidates.iter().all(|c| !c.is_empty()) {
            return Instance { grammar, tokens, candidates };
        }
    }
}

/// Samples the fringe of a random derived tree. Returns the words and, per
/// tree use, (home position, tree index, lexemes).
fn sample_simple(rng: &mut impl Rng, g: &[ElementaryTree]) -> Option<(Vec<String>, Vec<(usize, usize, Vec<String>)>)> {
    struct Frame {
        use_id: usize,
    }
    fn walk(
        rng: &mut impl Rng,
        g: &[ElementaryTree],
        n: &TreeNode,
        frame: &Frame,
        excised: &[(usize, TreeNode)],
        words: &mut Vec<String>,
        uses: &mut Vec<(usize, usize, Vec<String>)>,
        budget: &mut usize,
    ) -> bool {
        match n.kind {
            NodeKind::Anchor => {
                let w = WORDS.choose(rng).unwrap().to_string();
                let u = &mut uses[frame.use_id];
                if u.2.is_empty() {
                    u.0 = words.len();
                }
                u.2.push(w.clone());
                words.push(w);
                words.len() <= 6
            }
            NodeKind::Foot => {
                let (host, node) = excised.last().cloned().expect("adjoined");
                let rest = &excised[..excised.len() - 1];
                let f = Frame { use_id: host };
                node.children.iter().all(|c| walk(rng, g, c, &f, rest, words, uses, budget))
            }
            NodeKind::Substitution => {
                let opts: Vec<usize> =
                    (0..g.len()).filter(|&k| !g[k].is_auxiliary() && g[k].root.category == n.category).collect();
                let Some(&k) = opts.choose(rng) else { return false };
                start_use(rng, g, k, &[], words, uses, budget)
            }
            NodeKind::Interior => {
                let opts: Vec<usize> =
                    (0..g.len()).filter(|&k| g[k].is_auxiliary() && g[k].root.category == n.category).collect();
                if !opts.is_empty() && rng.gen_bool(0.3) {
                    let k = *opts.choose(rng).unwrap();
                    let mut ex = excised.to_vec();
                    ex.push((frame.use_id, n.clone()));
                    start_use(rng, g, k, &ex, words, uses, budget)
                } else {
                    n.children.iter().all(|c| walk(rng, g, c, frame, excised, words, uses, budget))
                }
            }
        }
    }
    fn start_use(
        rng: &mut impl Rng,
        g: &[ElementaryTree],
        t: usize,
        excised: &[(usize, TreeNode)],
        words: &mut Vec<String>,
        uses: &mut Vec<(usize, usize, Vec<String>)>,
        budget: &mut usize,
    ) -> bool {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let id = uses.len();
        uses.push((usize::MAX, t, Vec::new()));
        let f = Frame { use_id: id };
        walk(rng, g, &g[t].root, &f, excised, words, uses, budget)
    }
    let mut words = Vec::new();
    let mut uses = Vec::new();
    let mut budget = 7;
    if !start_use(rng, g, 0, &[], &mut words, &mut uses, &mut budget) || words.is_empty() {
        return None;
    }
    Some((words, uses))
}

pub const ATTRS: [&str; 4] = ["a", "b", "c", "d"];
pub const ATOMS: [&str; 3] = ["x", "y", "z"];
pub const VARS: [&str; 3] = ["X", "Y", "Z"];

/// Random structure of depth at most `depth` (≥ 1).
pub fn random_fs(rng: &mut impl Rng, depth: usize) -> FeatureStructure {
    let mut fs = FeatureStructure::new();
    let n = rng.gen_range(0..=3);
    for _ in 0..n {
        let attr = ATTRS[rng.gen_range(0..ATTRS.len())];
        let v = match rng.gen_range(0..10) {
            0..=3 => FeatureValue::atom(ATOMS[rng.gen_range(0..ATOMS.len())]),
            4..=6 => FeatureValue::Var(Variable::new(VARS[rng.gen_range(0..VARS.len())])),
            _ if depth > 1 => FeatureValue::Struct(random_fs(rng, depth - 1)),
            _ => FeatureValue::atom(ATOMS[rng.gen_range(0..ATOMS.len())]),
        };
        fs.insert(attr, v);
    }
    fs
}

/// `a` with attributes of `extra` added wherever `a` has none, recursively.
pub fn extend(a: &FeatureStructure, extra: &FeatureStructure) -> FeatureStructure {
    let mut out = a.clone();
    for (k, v) in extra.iter() {
        match (a.get(k), v) {
            (None, _) => {
                out.insert(k.clone(), v.clone());
            }
            (Some(FeatureValue::Struct(x)), FeatureValue::Struct(y)) => {
                out.insert(k.clone(), FeatureValue::Struct(extend(x, y)));
            }
            _ => {}
        }
    }
    out
}
