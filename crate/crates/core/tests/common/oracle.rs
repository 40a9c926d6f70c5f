//! Brute-force derivation enumerator. Generates derived trees top-down and
//! left to right, matching words as it goes, trying every substitution and
//! every optional adjunction, with each candidate tree used at most once.
//! Feature constraints are checked on the finished derivation with the
//! graph unifier.

use std::collections::BTreeSet;

use ltag::derivation::{Derivation, OpKind, Operation, TreeUse};
use ltag::features::Side;
use ltag::grammar::{AnchoredTree, Category, GornAddress, NodeKind, TreeNode};

use super::graph::Graph;

#[derive(Clone, Copy)]
struct Inst {
    pos: usize,
    cand: usize,
}

#[derive(Clone)]
struct Use {
    inst: usize,
    ops: Vec<(GornAddress, OpKind, usize)>,
    /// For an adjoined tree: the use and node whose subtree hangs at the foot.
    excised: Option<(usize, GornAddress)>,
}

#[derive(Clone)]
enum Task {
    Visit(usize, GornAddress),
    Children(usize, GornAddress),
}

struct Search<'a> {
    tokens: &'a [String],
    cands: &'a [Vec<AnchoredTree>],
    insts: Vec<Inst>,
    found: Vec<Vec<Use>>,
}

impl Search<'_> {
    fn tree(&self, inst: usize) -> &AnchoredTree {
        let i = self.insts[inst];
        &self.cands[i.pos][i.cand]
    }

    fn node(&self, inst: usize, addr: &GornAddress) -> &TreeNode {
        self.tree(inst).instantiated.node(addr).unwrap()
    }

    fn go(&mut self, cursor: usize, used: &mut Vec<bool>, uses: &mut Vec<Use>, stack: &mut Vec<Task>) {
        let Some(task) = stack.pop() else {
            if cursor == self.tokens.len() {
                self.found.push(uses.clone());
            }
            return;
        };
        match task.clone() {
            Task::Children(u, addr) => {
                let n = self.node(uses[u].inst, &addr).children.len();
                for i in (0..n).rev() {
                    stack.push(Task::Visit(u, addr.child(i)));
                }
                self.go(cursor, used, uses, stack);
                stack.truncate(stack.len() - n);
            }
            Task::Visit(u, addr) => {
                let inst = uses[u].inst;
                let node = self.node(inst, &addr).clone();
                match node.kind {
                    NodeKind::Anchor => {
                        let tree = self.tree(inst);
                        let home = tree.instantiated.anchors[0] == addr;
                        if cursor < self.tokens.len()
                            && node.lexeme.as_deref() == Some(self.tokens[cursor].as_str())
                            && (!home || self.insts[inst].pos == cursor)
                        {
                            self.go(cursor + 1, used, uses, stack);
                        }
                    }
                    NodeKind::Foot => {
                        let (hu, haddr) = uses[u].excised.clone().unwrap();
                        stack.push(Task::Children(hu, haddr));
                        self.go(cursor, used, uses, stack);
                        stack.pop();
                    }
                    NodeKind::Substitution => {
                        for k in 0..self.insts.len() {
                            let t = self.tree(k);
                            if used[k]
                                || t.instantiated.is_auxiliary()
                                || t.instantiated.root.category != node.category
                                || self.insts[k].pos < cursor
                            {
                                continue;
                            }
                            self.with_new_use(k, u, addr.clone(), OpKind::Substitution, None, cursor, used, uses, stack);
                        }
                    }
                    NodeKind::Interior => {
                        stack.push(Task::Children(u, addr.clone()));
                        self.go(cursor, used, uses, stack);
                        stack.pop();
                        for k in 0..self.insts.len() {
                            let t = self.tree(k);
                            if used[k]
                                || !t.instantiated.is_auxiliary()
                                || t.instantiated.root.category != node.category
                                || self.insts[k].pos < cursor
                            {
                                continue;
                            }
                            let excised = Some((u, addr.clone()));
                            self.with_new_use(k, u, addr.clone(), OpKind::Adjunction, excised, cursor, used, uses, stack);
                        }
                    }
                }
            }
        }
        stack.push(task);
    }

    #[allow(clippy::too_many_arguments)]
    fn with_new_use(
        &mut self,
        k: usize,
        host: usize,
        addr: GornAddress,
        kind: OpKind,
        excised: Option<(usize, GornAddress)>,
        cursor: usize,
        used: &mut Vec<bool>,
        uses: &mut Vec<Use>,
        stack: &mut Vec<Task>,
    ) {
        used[k] = true;
        let id = uses.len();
        uses.push(Use { inst: k, ops: Vec::new(), excised });
        uses[host].ops.push((addr, kind, id));
        stack.push(Task::Visit(id, GornAddress::root()));
        self.go(cursor, used, uses, stack);
        stack.pop();
        uses[host].ops.pop();
        uses.pop();
        used[k] = false;
    }

    fn derivation(&self, uses: &[Use], u: usize) -> Derivation {
        let i = self.insts[uses[u].inst];
        let t = self.tree(uses[u].inst);
        let root = TreeUse {
            tree: t.base.clone(),
            lexemes: t.lexemes.clone(),
            position: i.pos,
            candidate: i.cand,
            origin_pos: t.origin_pos.clone(),
        };
        let ops = uses[u]
            .ops
            .iter()
            .map(|(a, k, c)| Operation { target: a.clone(), kind: *k, child: self.derivation(uses, *c) })
            .collect();
        Derivation::with_operations(root, ops)
    }

    fn features_ok(&self, uses: &[Use]) -> bool {
        let mut g = Graph::new();
        // Top and bottom graph nodes per (use, address).
        let mut nodes: Vec<std::collections::HashMap<GornAddress, (usize, usize)>> = Vec::new();
        for (ui, u) in uses.iter().enumerate() {
            let t = self.tree(u.inst);
            let ns = ui as u32 + 1;
            g.add_bindings(ns, &t.bindings);
            let mut m = std::collections::HashMap::new();
            for n in t.instantiated.nodes() {
                let top = g.structure(ns, n.side(Side::Top));
                let bot = g.structure(ns, n.side(Side::Bottom));
                m.insert(n.address.clone(), (top, bot));
            }
            nodes.push(m);
        }
        for (ui, u) in uses.iter().enumerate() {
            let t = self.tree(u.inst);
            for n in t.instantiated.nodes() {
                let (top, bot) = nodes[ui][&n.address];
                match u.ops.iter().find(|(a, _, _)| *a == n.address) {
                    Some((_, OpKind::Substitution, c)) => {
                        let (ct, _) = nodes[*c][&GornAddress::root()];
                        g.union(top, ct);
                    }
                    Some((_, OpKind::Adjunction, c)) => {
                        let aux = self.tree(uses[*c].inst);
                        let foot = aux.instantiated.foot.clone().unwrap();
                        let (rt, _) = nodes[*c][&GornAddress::root()];
                        let (_, fb) = nodes[*c][&foot];
                        g.union(top, rt);
                        g.union(bot, fb);
                    }
                    None => {
                        if n.kind != NodeKind::Substitution {
                            g.union(top, bot);
                        }
                    }
                }
            }
        }
        g.ok()
    }
}

/// Every feature-valid derivation, by exhaustive search.
pub fn brute_force(tokens: &[String], cands: &[Vec<AnchoredTree>], start: &Category) -> BTreeSet<Derivation> {
    let mut insts = Vec::new();
    for (pos, c) in cands.iter().enumerate() {
        for cand in 0..c.len() {
            insts.push(Inst { pos, cand });
        }
    }
    let mut s = Search { tokens, cands, insts, found: Vec::new() };
    if tokens.is_empty() {
        return BTreeSet::new();
    }
    for k in 0..s.insts.len() {
        let t = s.tree(k);
        if t.instantiated.is_auxiliary() || &t.instantiated.root.category != start {
            continue;
        }
        let mut used = vec![false; s.insts.len()];
        used[k] = true;
        let mut uses = vec![Use { inst: k, ops: Vec::new(), excised: None }];
        let mut stack = vec![Task::Visit(0, GornAddress::root())];
        s.go(0, &mut used, &mut uses, &mut stack);
    }
    let found = std::mem::take(&mut s.found);
    found
        .iter()
        .filter(|uses| s.features_ok(uses))
        .map(|uses| s.derivation(uses, 0))
        .collect()
}

/// Structural derivations only, ignoring features.
pub fn brute_force_structural(tokens: &[String], cands: &[Vec<AnchoredTree>], start: &Category) -> usize {
    let mut stripped: Vec<Vec<AnchoredTree>> = cands.to_vec();
    for c in &mut stripped {
        for t in c {
            t.bindings = Default::default();
            let mut tree = t.instantiated.clone();
            strip(&mut tree.root);
            t.instantiated = tree;
        }
    }
    brute_force(tokens, &stripped, start).len()
}

fn strip(n: &mut TreeNode) {
    n.top = Default::default();
    n.bottom = Default::default();
    for c in &mut n.children {
        strip(c);
    }
}
