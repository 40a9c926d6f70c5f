//! Earley-style chart parser for lexicalized TAG with substitution and
//! adjunction.
//!
//! Items are dotted nodes of anchored-tree instances, with a dot on one of
//! four sides of the node (left-above, left-below, right-below,
//! right-above), a left index, an optional foot span and a right index.
//! The left index is where the node sequence containing the dot began.
//! Back-links recorded on each item let every derivation be read off the
//! finished chart.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::ops::ControlFlow;
use std::time::Duration;

use crate::derivation::{Derivation, OpKind, Operation, TreeUse};
use crate::derived::{extract_derived, DerivedTree};
use crate::features::{unify, Bindings, FeatureStructure};
use crate::grammar::{AnchoredTree, Category, GornAddress, NodeKind};

pub const DEFAULT_DERIVATION_CAP: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ParseOptions {
    /// Maximum number of derivations returned.
    pub derivation_cap: usize,
    /// Check feature compatibility whenever two trees combine, not only on
    /// the finished derivation. Results are identical either way.
    pub online_unification: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { derivation_cap: DEFAULT_DERIVATION_CAP, online_unification: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseResult {
    /// Sorted, distinct, feature-valid derivations.
    pub derivations: Vec<Derivation>,
    pub derived_trees: Vec<DerivedTree>,
    /// More than `derivation_cap` derivations exist.
    pub truncated: bool,
    pub chart_items: usize,
}

/// Which pass of a filtered parse produced the result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pass {
    /// The statistics-filtered candidates sufficed.
    Filtered,
    /// The filtered pass failed and the unfiltered retry succeeded.
    Retry,
    /// Parsed with no filtering at all.
    Unfiltered,
    /// No pass found a derivation.
    None,
}

/// One parse attempt within a pipeline run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attempt {
    pub label: String,
    pub derivations: usize,
    pub duration: Duration,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Timing {
    pub filtered: Option<Duration>,
    pub retry: Option<Duration>,
    pub total: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseOutcome {
    pub sentence: Vec<String>,
    pub derivations: Vec<Derivation>,
    pub derived_trees: Vec<DerivedTree>,
    pub pass: Pass,
    pub timing: Timing,
    pub attempts: Vec<Attempt>,
    pub truncated: bool,
}

impl ParseOutcome {
    pub fn parsed(&self) -> bool {
        !self.derivations.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Side {
    LeftAbove,
    LeftBelow,
    RightBelow,
    RightAbove,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Item {
    inst: u32,
    node: u32,
    side: Side,
    i: u32,
    foot: Option<(u32, u32)>,
    j: u32,
    /// Right-below item produced by an adjunction at this node.
    star: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Link {
    Predicted,
    Same(usize),
    Complete(usize, usize),
    Subst { host: usize, child: usize },
    /// The foot was passed; the excised subtree belongs to the host tree.
    Foot(usize),
    Adjoin { host: usize, aux: usize },
}

struct NodeInfo {
    address: GornAddress,
    category: Category,
    kind: NodeKind,
    lexeme: Option<String>,
    first_child: Option<u32>,
    next_sibling: Option<u32>,
    parent: Option<u32>,
}

struct Instance<'a> {
    tree: &'a AnchoredTree,
    position: usize,
    candidate: usize,
    nodes: Vec<NodeInfo>,
    home_anchor: u32,
    auxiliary: bool,
}

impl Instance<'_> {
    fn root_category(&self) -> &Category {
        &self.nodes[0].category
    }

    fn tree_use(&self) -> TreeUse {
        TreeUse {
            tree: self.tree.base.clone(),
            lexemes: self.tree.lexemes.clone(),
            position: self.position,
            candidate: self.candidate,
            origin_pos: self.tree.origin_pos.clone(),
        }
    }
}

fn flatten(tree: &AnchoredTree) -> (Vec<NodeInfo>, u32) {
    let t = &tree.instantiated;
    let mut nodes = Vec::new();
    let mut by_addr: HashMap<GornAddress, u32> = HashMap::new();
    for n in t.nodes() {
        let id = nodes.len() as u32;
        by_addr.insert(n.address.clone(), id);
        let parent = n.address.parent().map(|p| by_addr[&p]);
        nodes.push(NodeInfo {
            address: n.address.clone(),
            category: n.category.clone(),
            kind: n.kind,
            lexeme: n.lexeme.clone(),
            first_child: None,
            next_sibling: None,
            parent,
        });
    }
    for n in t.nodes() {
        let id = by_addr[&n.address];
        if let Some(c) = n.children.first() {
            nodes[id as usize].first_child = Some(by_addr[&c.address]);
        }
        for w in n.children.windows(2) {
            nodes[by_addr[&w[0].address] as usize].next_sibling = Some(by_addr[&w[1].address]);
        }
    }
    let home = t.anchors.first().map(|a| by_addr[a]).expect("anchored trees have an anchor");
    (nodes, home)
}

struct Chart<'a> {
    tokens: &'a [String],
    insts: Vec<Instance<'a>>,
    online: bool,

    items: Vec<Item>,
    links: Vec<Vec<Link>>,
    ids: HashMap<Item, usize>,
    agenda: Vec<usize>,

    init_by_cat: HashMap<Category, Vec<u32>>,
    aux_by_cat: HashMap<Category, Vec<u32>>,
    interior_by_cat: HashMap<Category, Vec<(u32, u32)>>,

    la_by_node_right: HashMap<(u32, u32, u32), Vec<usize>>,
    rb_by_node_left: HashMap<(u32, u32, u32), Vec<usize>>,
    subst_waiting: HashMap<(Category, u32), Vec<usize>>,
    completed_init: HashMap<(Category, u32), Vec<usize>>,
    foot_waiting: HashMap<(Category, u32), Vec<usize>>,
    rb_by_cat_left: HashMap<(Category, u32), Vec<usize>>,
    rb_by_cat_span: HashMap<(Category, u32, u32), Vec<usize>>,
    completed_aux: HashMap<(Category, u32, u32), Vec<usize>>,
    adjoined_predicted: HashSet<(Category, u32)>,

    subst_cache: HashMap<(u32, u32, u32), bool>,
    adjoin_cache: HashMap<(u32, u32, u32), bool>,
    goals: Vec<usize>,
}

impl<'a> Chart<'a> {
    fn new(tokens: &'a [String], candidates: &'a [Vec<AnchoredTree>], online: bool) -> Self {
        let mut insts = Vec::new();
        for (position, cands) in candidates.iter().enumerate() {
            for (candidate, tree) in cands.iter().enumerate() {
                let (nodes, home_anchor) = flatten(tree);
                insts.push(Instance {
                    tree,
                    position,
                    candidate,
                    nodes,
                    home_anchor,
                    auxiliary: tree.instantiated.is_auxiliary(),
                });
            }
        }
        let mut chart = Chart {
            tokens,
            insts,
            online,
            items: Vec::new(),
            links: Vec::new(),
            ids: HashMap::new(),
            agenda: Vec::new(),
            init_by_cat: HashMap::new(),
            aux_by_cat: HashMap::new(),
            interior_by_cat: HashMap::new(),
            la_by_node_right: HashMap::new(),
            rb_by_node_left: HashMap::new(),
            subst_waiting: HashMap::new(),
            completed_init: HashMap::new(),
            foot_waiting: HashMap::new(),
            rb_by_cat_left: HashMap::new(),
            rb_by_cat_span: HashMap::new(),
            completed_aux: HashMap::new(),
            adjoined_predicted: HashSet::new(),
            subst_cache: HashMap::new(),
            adjoin_cache: HashMap::new(),
            goals: Vec::new(),
        };
        for (k, inst) in chart.insts.iter().enumerate() {
            let k = k as u32;
            let cat = inst.root_category().clone();
            if inst.auxiliary {
                chart.aux_by_cat.entry(cat).or_default().push(k);
            } else {
                chart.init_by_cat.entry(cat).or_default().push(k);
            }
            for (n, node) in inst.nodes.iter().enumerate() {
                if node.kind == NodeKind::Interior {
                    chart.interior_by_cat.entry(node.category.clone()).or_default().push((k, n as u32));
                }
            }
        }
        chart
    }

    fn add(&mut self, item: Item, link: Link) {
        match self.ids.get(&item) {
            Some(&id) => {
                if !self.links[id].contains(&link) {
                    self.links[id].push(link);
                }
            }
            None => {
                let id = self.items.len();
                self.items.push(item);
                self.links.push(vec![link]);
                self.ids.insert(item, id);
                self.agenda.push(id);
            }
        }
    }

    fn node(&self, item: &Item) -> &NodeInfo {
        &self.insts[item.inst as usize].nodes[item.node as usize]
    }

    fn run(&mut self, start: &Category) {
        let n = self.tokens.len() as u32;
        for &k in self.init_by_cat.get(start).cloned().unwrap_or_default().iter() {
            self.predict_root(k, 0);
        }
        while let Some(id) = self.agenda.pop() {
            self.process(id);
        }
        let goals: Vec<usize> = (0..self.items.len())
            .filter(|&id| {
                let it = &self.items[id];
                let inst = &self.insts[it.inst as usize];
                it.node == 0
                    && it.side == Side::RightAbove
                    && it.i == 0
                    && it.j == n
                    && !inst.auxiliary
                    && inst.root_category() == start
            })
            .collect();
        self.goals = goals;
    }

    fn predict_root(&mut self, inst: u32, at: u32) {
        if self.insts[inst as usize].position < at as usize {
            return;
        }
        self.add(
            Item { inst, node: 0, side: Side::LeftAbove, i: at, foot: None, j: at, star: false },
            Link::Predicted,
        );
    }

    fn process(&mut self, id: usize) {
        let it = self.items[id];
        match it.side {
            Side::LeftAbove => self.left_above(id, it),
            Side::LeftBelow => {
                let child = self.node(&it).first_child.expect("interior nodes have children");
                self.add(Item { node: child, side: Side::LeftAbove, ..it }, Link::Same(id));
            }
            Side::RightBelow => self.right_below(id, it),
            Side::RightAbove => self.right_above(id, it),
        }
    }

    fn left_above(&mut self, id: usize, it: Item) {
        let node = self.node(&it);
        let cat = node.category.clone();
        match node.kind {
            NodeKind::Anchor => {
                let inst = &self.insts[it.inst as usize];
                let lex = node.lexeme.as_deref();
                let ok = (it.j as usize) < self.tokens.len()
                    && lex == Some(self.tokens[it.j as usize].as_str())
                    && (it.node != inst.home_anchor || inst.position == it.j as usize);
                if ok {
                    self.add(Item { side: Side::RightAbove, j: it.j + 1, ..it }, Link::Same(id));
                }
            }
            NodeKind::Substitution => {
                self.subst_waiting.entry((cat.clone(), it.j)).or_default().push(id);
                for k in self.init_by_cat.get(&cat).cloned().unwrap_or_default() {
                    self.predict_root(k, it.j);
                }
                for done in self.completed_init.get(&(cat, it.j)).cloned().unwrap_or_default() {
                    self.subst_complete(id, done);
                }
            }
            NodeKind::Foot => {
                self.foot_waiting.entry((cat.clone(), it.j)).or_default().push(id);
                if self.adjoined_predicted.insert((cat.clone(), it.j)) {
                    for (k, n) in self.interior_by_cat.get(&cat).cloned().unwrap_or_default() {
                        self.add(
                            Item { inst: k, node: n, side: Side::LeftBelow, i: it.j, foot: None, j: it.j, star: false },
                            Link::Predicted,
                        );
                    }
                }
                for rb in self.rb_by_cat_left.get(&(cat, it.j)).cloned().unwrap_or_default() {
                    self.complete_foot(id, rb);
                }
            }
            NodeKind::Interior => {
                self.la_by_node_right.entry((it.inst, it.node, it.j)).or_default().push(id);
                self.add(
                    Item { side: Side::LeftBelow, i: it.j, foot: None, star: false, ..it },
                    Link::Predicted,
                );
                for k in self.aux_by_cat.get(&cat).cloned().unwrap_or_default() {
                    if k != it.inst {
                        self.predict_root(k, it.j);
                    }
                }
                for rb in self.rb_by_node_left.get(&(it.inst, it.node, it.j)).cloned().unwrap_or_default() {
                    self.complete_node(id, rb);
                }
            }
        }
    }

    fn right_below(&mut self, id: usize, it: Item) {
        self.rb_by_node_left.entry((it.inst, it.node, it.i)).or_default().push(id);
        for la in self.la_by_node_right.get(&(it.inst, it.node, it.i)).cloned().unwrap_or_default() {
            self.complete_node(la, id);
        }
        if it.star {
            return;
        }
        let cat = self.node(&it).category.clone();
        self.rb_by_cat_left.entry((cat.clone(), it.i)).or_default().push(id);
        self.rb_by_cat_span.entry((cat.clone(), it.i, it.j)).or_default().push(id);
        for foot in self.foot_waiting.get(&(cat.clone(), it.i)).cloned().unwrap_or_default() {
            self.complete_foot(foot, id);
        }
        for aux in self.completed_aux.get(&(cat, it.i, it.j)).cloned().unwrap_or_default() {
            self.adjoin_done(id, aux);
        }
    }

    fn right_above(&mut self, id: usize, it: Item) {
        let node = self.node(&it);
        if let Some(parent) = node.parent {
            match node.next_sibling {
                Some(sib) => self.add(Item { node: sib, side: Side::LeftAbove, ..it }, Link::Same(id)),
                None => self.add(Item { node: parent, side: Side::RightBelow, star: false, ..it }, Link::Same(id)),
            }
            return;
        }
        let inst = &self.insts[it.inst as usize];
        let cat = inst.root_category().clone();
        if inst.auxiliary {
            let Some((p, q)) = it.foot else { return };
            self.completed_aux.entry((cat.clone(), p, q)).or_default().push(id);
            for rb in self.rb_by_cat_span.get(&(cat, p, q)).cloned().unwrap_or_default() {
                self.adjoin_done(rb, id);
            }
        } else {
            self.completed_init.entry((cat.clone(), it.i)).or_default().push(id);
            for la in self.subst_waiting.get(&(cat, it.i)).cloned().unwrap_or_default() {
                self.subst_complete(la, id);
            }
        }
    }

    fn complete_node(&mut self, la: usize, rb: usize) {
        let (l, r) = (self.items[la], self.items[rb]);
        let foot = match (l.foot, r.foot) {
            (Some(_), Some(_)) => return,
            (a, b) => a.or(b),
        };
        self.add(Item { side: Side::RightAbove, i: l.i, foot, j: r.j, star: false, ..l }, Link::Complete(la, rb));
    }

    fn subst_complete(&mut self, la: usize, done: usize) {
        let (l, d) = (self.items[la], self.items[done]);
        if self.online && !self.subst_ok(l.inst, l.node, d.inst) {
            return;
        }
        self.add(Item { side: Side::RightAbove, j: d.j, ..l }, Link::Subst { host: la, child: done });
    }

    fn complete_foot(&mut self, foot: usize, rb: usize) {
        let (f, r) = (self.items[foot], self.items[rb]);
        if r.inst == f.inst {
            return;
        }
        self.add(Item { side: Side::RightAbove, foot: Some((r.i, r.j)), j: r.j, ..f }, Link::Foot(foot));
    }

    fn adjoin_done(&mut self, rb: usize, aux: usize) {
        let (r, a) = (self.items[rb], self.items[aux]);
        if r.inst == a.inst || (self.online && !self.adjoin_ok(r.inst, r.node, a.inst)) {
            return;
        }
        self.add(
            Item { side: Side::RightBelow, i: a.i, j: a.j, star: true, ..r },
            Link::Adjoin { host: rb, aux },
        );
    }

    fn scoped(&self, inst: u32, scope: u32, env: &mut Bindings) -> &'a AnchoredTree {
        let t = self.insts[inst as usize].tree;
        env.absorb_scoped(&t.bindings, scope);
        t
    }

    fn subst_ok(&mut self, host: u32, site: u32, child: u32) -> bool {
        if let Some(&ok) = self.subst_cache.get(&(host, site, child)) {
            return ok;
        }
        let mut env = Bindings::new();
        let h = self.scoped(host, 1, &mut env);
        let c = self.scoped(child, 2, &mut env);
        let site_node = h.instantiated.node(&self.insts[host as usize].nodes[site as usize].address).unwrap();
        let ok = unify(&site_node.top.with_scope(1), &c.instantiated.root.top.with_scope(2), &env).is_ok();
        self.subst_cache.insert((host, site, child), ok);
        ok
    }

    fn adjoin_ok(&mut self, host: u32, site: u32, aux: u32) -> bool {
        if let Some(&ok) = self.adjoin_cache.get(&(host, site, aux)) {
            return ok;
        }
        let mut env = Bindings::new();
        let h = self.scoped(host, 1, &mut env);
        let a = self.scoped(aux, 2, &mut env);
        let site_node = h.instantiated.node(&self.insts[host as usize].nodes[site as usize].address).unwrap();
        let foot = a.instantiated.node(a.instantiated.foot.as_ref().unwrap()).unwrap();
        let top: (FeatureStructure, FeatureStructure) =
            (site_node.top.with_scope(1), a.instantiated.root.top.with_scope(2));
        let ok = match unify(&top.0, &top.1, &env) {
            Ok((_, env)) => unify(&site_node.bottom.with_scope(1), &foot.bottom.with_scope(2), &env).is_ok(),
            Err(_) => false,
        };
        self.adjoin_cache.insert((host, site, aux), ok);
        ok
    }

    /// Calls `f` with every operation list derivable for `id`'s segment.
    fn each_partial(
        &self,
        id: usize,
        active: &mut Vec<bool>,
        f: &mut dyn FnMut(&[Operation], &mut Vec<bool>) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if active[id] {
            return ControlFlow::Continue(());
        }
        active[id] = true;
        let result = self.each_partial_links(id, active, f);
        active[id] = false;
        result
    }

    fn each_partial_links(
        &self,
        id: usize,
        active: &mut Vec<bool>,
        f: &mut dyn FnMut(&[Operation], &mut Vec<bool>) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        for link in &self.links[id] {
            match *link {
                Link::Predicted => f(&[], active)?,
                Link::Same(p) | Link::Foot(p) => self.each_partial(p, active, f)?,
                Link::Complete(l, r) => self.each_partial(l, active, &mut |a, active| {
                    self.each_partial(r, active, &mut |b, active| {
                        let mut v = a.to_vec();
                        v.extend_from_slice(b);
                        f(&v, active)
                    })
                })?,
                Link::Subst { host, child } => {
                    let target = self.node(&self.items[host]).address.clone();
                    self.each_partial(host, active, &mut |a, active| {
                        self.each_derivation(child, active, &mut |d, active| {
                            let mut v = a.to_vec();
                            v.push(Operation { target: target.clone(), kind: OpKind::Substitution, child: d });
                            f(&v, active)
                        })
                    })?
                }
                Link::Adjoin { host, aux } => {
                    let target = self.node(&self.items[host]).address.clone();
                    self.each_partial(host, active, &mut |a, active| {
                        self.each_derivation(aux, active, &mut |d, active| {
                            let mut v = a.to_vec();
                            v.push(Operation { target: target.clone(), kind: OpKind::Adjunction, child: d });
                            f(&v, active)
                        })
                    })?
                }
            }
        }
        ControlFlow::Continue(())
    }

    /// Calls `f` with every derivation of the root item `id`.
    fn each_derivation(
        &self,
        id: usize,
        active: &mut Vec<bool>,
        f: &mut dyn FnMut(Derivation, &mut Vec<bool>) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let root = self.insts[self.items[id].inst as usize].tree_use();
        self.each_partial(id, active, &mut |ops, active| {
            f(Derivation::with_operations(root.clone(), ops.to_vec()), active)
        })
    }

    fn each_goal_derivation(&self, f: &mut dyn FnMut(Derivation) -> ControlFlow<()>) {
        let mut active = vec![false; self.items.len()];
        for &g in &self.goals {
            if self.each_derivation(g, &mut active, &mut |d, _| f(d)).is_break() {
                return;
            }
        }
    }
}

/// All feature-valid derivations of `tokens` from the per-token candidate
/// trees, rooted in an initial tree of category `start`.
pub fn parse_with(
    tokens: &[String],
    candidates: &[Vec<AnchoredTree>],
    start: &Category,
    opts: &ParseOptions,
) -> ParseResult {
    assert_eq!(tokens.len(), candidates.len(), "one candidate list per token");
    if tokens.is_empty() {
        return ParseResult { derivations: Vec::new(), derived_trees: Vec::new(), truncated: false, chart_items: 0 };
    }
    let mut chart = Chart::new(tokens, candidates, opts.online_unification);
    chart.run(start);
    let mut found: BTreeSet<Derivation> = BTreeSet::new();
    let mut trees: HashMap<Derivation, DerivedTree> = HashMap::new();
    let mut rejected: HashSet<Derivation> = HashSet::new();
    let cap = opts.derivation_cap.max(1);
    let mut truncated = false;
    chart.each_goal_derivation(&mut |d| {
        if found.contains(&d) || rejected.contains(&d) {
            return ControlFlow::Continue(());
        }
        match extract_derived(&d, candidates) {
            Ok(t) => {
                if found.len() == cap {
                    truncated = true;
                    return ControlFlow::Break(());
                }
                trees.insert(d.clone(), t);
                found.insert(d);
            }
            Err(_) => {
                rejected.insert(d);
            }
        }
        ControlFlow::Continue(())
    });
    let derivations: Vec<Derivation> = found.into_iter().collect();
    let derived_trees = derivations.iter().map(|d| trees.remove(d).expect("stored")).collect();
    ParseResult { derivations, derived_trees, truncated, chart_items: chart.items.len() }
}

pub fn parse(tokens: &[String], candidates: &[Vec<AnchoredTree>], start: &Category) -> ParseResult {
    parse_with(tokens, candidates, start, &ParseOptions::default())
}

/// True iff [`parse`] would find at least one derivation. Stops at the
/// first feature-valid derivation.
pub fn recognize(tokens: &[String], candidates: &[Vec<AnchoredTree>], start: &Category) -> bool {
    assert_eq!(tokens.len(), candidates.len(), "one candidate list per token");
    if tokens.is_empty() {
        return false;
    }
    let mut chart = Chart::new(tokens, candidates, true);
    chart.run(start);
    let mut ok = false;
    chart.each_goal_derivation(&mut |d| {
        if extract_derived(&d, candidates).is_ok() {
            ok = true;
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::parse_equations;
    use crate::grammar::{anchor, load_grammar, Grammar};

    const G: &str = "ltag-grammar v1
tree alpha_NP initial
0 NP anchor
tree alpha_nx0Vnx1 initial
0 S interior
1 NP subst top={case: nom}
2 VP interior
2.1 V anchor
2.2 NP subst top={case: acc}
tree beta_vxARBvx auxiliary
0 VP interior
1 Adv anchor
2 VP foot
";

    fn g() -> Grammar {
        load_grammar(G).unwrap()
    }

    fn at(g: &Grammar, tree: &str, word: &str, pos: &str, eqs: &str) -> AnchoredTree {
        anchor(&g.trees[tree], &[word.to_string()], &parse_equations(eqs).unwrap(), &pos.into()).unwrap()
    }

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    fn cands(g: &Grammar, words: &[&str]) -> Vec<Vec<AnchoredTree>> {
        words
            .iter()
            .map(|w| match *w {
                "loves" => vec![at(g, "alpha_nx0Vnx1", w, "V", "")],
                "madly" => vec![at(g, "beta_vxARBvx", w, "Adv", "")],
                "he" => vec![at(g, "alpha_NP", w, "Pron", "anchor.top.case = nom")],
                "him" => vec![at(g, "alpha_NP", w, "Pron", "anchor.top.case = acc")],
                _ => vec![at(g, "alpha_NP", w, "PropN", "")],
            })
            .collect()
    }

    #[test]
    fn john_loves_mary() {
        let g = g();
        let t = toks("John loves Mary");
        let c = cands(&g, &["John", "loves", "Mary"]);
        let r = parse(&t, &c, &"S".into());
        assert_eq!(r.derivations.len(), 1);
        assert_eq!(
            r.derivations[0].to_string(),
            "(alpha_nx0Vnx1 \"loves\" V 1:0 (subst 1 (alpha_NP \"John\" PropN 0:0)) (subst 2.2 (alpha_NP \"Mary\" PropN 2:0)))"
        );
        assert_eq!(r.derived_trees[0].root.bracketed(), "(S (NP John) (VP (V loves) (NP Mary)))");
        assert!(recognize(&t, &c, &"S".into()));
    }

    #[test]
    fn unused_auxiliary_is_harmless() {
        let g = g();
        let t = toks("John loves Mary");
        let mut c = cands(&g, &["John", "loves", "Mary"]);
        c[0].push(at(&g, "beta_vxARBvx", "madly", "Adv", ""));
        assert_eq!(parse(&t, &c, &"S".into()).derivations.len(), 1);
    }

    #[test]
    fn adjunction_at_vp() {
        let g = g();
        let t = toks("John madly loves Mary");
        let c = cands(&g, &["John", "madly", "loves", "Mary"]);
        let r = parse(&t, &c, &"S".into());
        assert_eq!(r.derivations.len(), 1, "{:?}", r.derivations);
        let d = &r.derivations[0];
        assert!(d.operations.iter().any(|o| o.kind == OpKind::Adjunction && o.target.to_string() == "2"));
        assert_eq!(r.derived_trees[0].root.bracketed(), "(S (NP John) (VP (Adv madly) (VP (V loves) (NP Mary))))");
        assert_eq!(r.derived_trees[0].root.fringe(), t);
    }

    #[test]
    fn case_features_prune() {
        let g = g();
        for online in [true, false] {
            let opts = ParseOptions { online_unification: online, ..Default::default() };
            let ok = parse_with(&toks("he loves him"), &cands(&g, &["he", "loves", "him"]), &"S".into(), &opts);
            assert_eq!(ok.derivations.len(), 1);
            let bad = parse_with(&toks("him loves he"), &cands(&g, &["him", "loves", "he"]), &"S".into(), &opts);
            assert!(bad.derivations.is_empty());
        }
    }

    #[test]
    fn rejects_wrong_order_and_empty() {
        let g = g();
        assert!(!recognize(&toks("loves John"), &cands(&g, &["loves", "John"]), &"S".into()));
        assert!(!recognize(&[], &[], &"S".into()));
    }

    #[test]
    fn cap_truncates() {
        let g = g();
        let t = toks("John loves Mary");
        let mut c = cands(&g, &["John", "loves", "Mary"]);
        let dup = c[0][0].clone();
        c[0].push(dup);
        let all = parse(&t, &c, &"S".into());
        assert_eq!(all.derivations.len(), 2);
        assert!(!all.truncated);
        let capped = parse_with(&t, &c, &"S".into(), &ParseOptions { derivation_cap: 1, ..Default::default() });
        assert_eq!(capped.derivations.len(), 1);
        assert!(capped.truncated);
        assert!(all.derivations.contains(&capped.derivations[0]));
    }
}
