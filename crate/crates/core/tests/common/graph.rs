//! A union-find feature graph, independent of the library's unifier.

use std::collections::{BTreeMap, HashMap};

use ltag::features::{Bindings, FeatureStructure, FeatureValue, Variable};

#[derive(Clone, Debug)]
enum Content {
    Unbound,
    Atom(String),
    Struct(BTreeMap<String, usize>),
}

#[derive(Clone, Debug, Default)]
pub struct Graph {
    parent: Vec<usize>,
    content: Vec<Content>,
    vars: HashMap<(u32, Variable), usize>,
    pub failed: bool,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    fn fresh(&mut self, c: Content) -> usize {
        self.parent.push(self.parent.len());
        self.content.push(c);
        self.parent.len() - 1
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn find_ro(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// Node for a variable in namespace `ns`.
    pub fn var(&mut self, ns: u32, v: &Variable) -> usize {
        if let Some(&n) = self.vars.get(&(ns, v.clone())) {
            return n;
        }
        let n = self.fresh(Content::Unbound);
        self.vars.insert((ns, v.clone()), n);
        n
    }

    pub fn value(&mut self, ns: u32, v: &FeatureValue) -> usize {
        match v {
            FeatureValue::Atom(a) => self.fresh(Content::Atom(a.clone())),
            FeatureValue::Var(x) => self.var(ns, x),
            FeatureValue::Struct(fs) => self.structure(ns, fs),
        }
    }

    pub fn structure(&mut self, ns: u32, fs: &FeatureStructure) -> usize {
        let map: BTreeMap<String, usize> = fs.iter().map(|(k, v)| (k.clone(), self.value(ns, v))).collect();
        self.fresh(Content::Struct(map))
    }

    /// Adds every binding of an environment as an equation.
    pub fn add_bindings(&mut self, ns: u32, env: &Bindings) {
        for (var, value) in env.iter() {
            let a = self.var(ns, var);
            let b = self.value(ns, value);
            self.union(a, b);
        }
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let mut pending = vec![(a, b)];
        while let Some((a, b)) = pending.pop() {
            if self.failed {
                return;
            }
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                continue;
            }
            let ca = std::mem::replace(&mut self.content[ra], Content::Unbound);
            let cb = std::mem::replace(&mut self.content[rb], Content::Unbound);
            let merged = match (ca, cb) {
                (Content::Unbound, c) | (c, Content::Unbound) => c,
                (Content::Atom(x), Content::Atom(y)) => {
                    if x != y {
                        self.failed = true;
                    }
                    Content::Atom(x)
                }
                (Content::Struct(mut m), Content::Struct(n)) => {
                    for (k, v) in n {
                        match m.get(&k) {
                            Some(&u) => pending.push((u, v)),
                            None => {
                                m.insert(k, v);
                            }
                        }
                    }
                    Content::Struct(m)
                }
                _ => {
                    self.failed = true;
                    Content::Unbound
                }
            };
            self.parent[rb] = ra;
            self.content[ra] = merged;
        }
    }

    /// True iff some node reaches itself through attribute edges.
    pub fn has_cycle(&self) -> bool {
        let n = self.parent.len();
        let mut state = vec![0u8; n];
        for start in 0..n {
            let r = self.find_ro(start);
            if state[r] == 0 && self.cycle_from(r, &mut state) {
                return true;
            }
        }
        false
    }

    fn cycle_from(&self, r: usize, state: &mut Vec<u8>) -> bool {
        state[r] = 1;
        if let Content::Struct(m) = &self.content[r] {
            for &c in m.values() {
                let c = self.find_ro(c);
                if state[c] == 1 || (state[c] == 0 && self.cycle_from(c, state)) {
                    return true;
                }
            }
        }
        state[r] = 2;
        false
    }

    pub fn ok(&self) -> bool {
        !self.failed && !self.has_cycle()
    }

    /// Rendering with the library's canonical conventions: shared nodes are
    /// tagged `#k` in order of first occurrence, lone unbound nodes are `_`.
    pub fn canonical(&self, root: usize) -> String {
        let mut counts = HashMap::new();
        self.count(self.find_ro(root), &mut counts, true);
        let mut tags = HashMap::new();
        let mut out = String::new();
        self.render(self.find_ro(root), &counts, &mut tags, &mut out, true);
        out
    }

    fn count(&self, r: usize, counts: &mut HashMap<usize, usize>, top: bool) {
        if !top {
            let c = counts.entry(r).or_insert(0);
            *c += 1;
            if *c > 1 {
                return;
            }
        }
        if let Content::Struct(m) = &self.content[r] {
            for &v in m.values() {
                self.count(self.find_ro(v), counts, false);
            }
        }
    }

    fn render(&self, r: usize, counts: &HashMap<usize, usize>, tags: &mut HashMap<usize, usize>, out: &mut String, top: bool) {
        if !top {
            if counts[&r] > 1 {
                if let Some(t) = tags.get(&r) {
                    out.push_str(&format!("#{t}"));
                    return;
                }
                let t = tags.len();
                tags.insert(r, t);
                out.push_str(&format!("#{t}"));
                if !matches!(self.content[r], Content::Unbound) {
                    out.push('=');
                }
            } else if matches!(self.content[r], Content::Unbound) {
                out.push('_');
            }
        }
        match &self.content[r] {
            Content::Unbound => {}
            Content::Atom(a) => out.push_str(a),
            Content::Struct(m) => {
                out.push('{');
                for (i, (k, &v)) in m.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    out.push_str(k);
                    out.push_str(": ");
                    self.render(self.find_ro(v), counts, tags, out, false);
                }
                out.push('}');
            }
        }
    }
}

/// Unifies two structures sharing one variable namespace; `None` on
/// failure, otherwise the canonical rendering of the result.
pub fn graph_unify(a: &FeatureStructure, b: &FeatureStructure) -> Option<String> {
    let mut g = Graph::new();
    let x = g.structure(0, a);
    let y = g.structure(0, b);
    g.union(x, y);
    if !g.ok() {
        return None;
    }
    Some(g.canonical(x))
}
