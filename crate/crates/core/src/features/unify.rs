use std::fmt;

use super::{Bindings, Deref, FeatureStructure, FeatureValue, Variable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClashKind {
    Atoms(String, String),
    AtomStructure,
    /// Unifying would make a variable contain itself.
    Cycle(Variable),
}

/// Why two structures have no common instance, and where.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct UnifyError {
    pub path: Vec<String>,
    pub kind: ClashKind,
}

impl fmt::Display for UnifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() { "<root>".to_string() } else { self.path.join(".") };
        match &self.kind {
            ClashKind::Atoms(a, b) => write!(f, "{path}: {a} ≠ {b}"),
            ClashKind::AtomStructure => write!(f, "{path}: atom vs. structure"),
            ClashKind::Cycle(v) => write!(f, "{path}: cyclic binding of {v}"),
        }
    }
}

/// Unifies two structures under `env`. Neither input is modified; on
/// success the result subsumes both under the returned environment.
pub fn unify(
    a: &FeatureStructure,
    b: &FeatureStructure,
    env: &Bindings,
) -> Result<(FeatureStructure, Bindings), UnifyError> {
    let mut u = Unifier { env: env.clone(), path: Vec::new() };
    let fs = u.structures(a, b)?;
    Ok((fs, u.env))
}

pub fn unify_values(
    a: &FeatureValue,
    b: &FeatureValue,
    env: &Bindings,
) -> Result<(FeatureValue, Bindings), UnifyError> {
    let mut u = Unifier { env: env.clone(), path: Vec::new() };
    let v = u.values(a, b)?;
    Ok((v, u.env))
}

struct Unifier {
    env: Bindings,
    path: Vec<String>,
}

impl Unifier {
    fn fail(&self, kind: ClashKind) -> UnifyError {
        UnifyError { path: self.path.clone(), kind }
    }

    fn structures(&mut self, a: &FeatureStructure, b: &FeatureStructure) -> Result<FeatureStructure, UnifyError> {
        let mut out = FeatureStructure::new();
        for (k, va) in &a.pairs {
            let v = match b.pairs.get(k) {
                Some(vb) => {
                    self.path.push(k.clone());
                    let v = self.values(va, vb)?;
                    self.path.pop();
                    v
                }
                None => va.clone(),
            };
            out.pairs.insert(k.clone(), v);
        }
        for (k, vb) in &b.pairs {
            if !a.pairs.contains_key(k) {
                out.pairs.insert(k.clone(), vb.clone());
            }
        }
        Ok(out)
    }

    fn concrete(&mut self, a: &FeatureValue, b: &FeatureValue) -> Result<FeatureValue, UnifyError> {
        match (a, b) {
            (FeatureValue::Atom(x), FeatureValue::Atom(y)) => {
                if x == y {
                    Ok(a.clone())
                } else {
                    Err(self.fail(ClashKind::Atoms(x.clone(), y.clone())))
                }
            }
            (FeatureValue::Struct(x), FeatureValue::Struct(y)) => Ok(FeatureValue::Struct(self.structures(x, y)?)),
            (FeatureValue::Var(_), _) | (_, FeatureValue::Var(_)) => unreachable!("dereferenced"),
            _ => Err(self.fail(ClashKind::AtomStructure)),
        }
    }

    fn values(&mut self, a: &FeatureValue, b: &FeatureValue) -> Result<FeatureValue, UnifyError> {
        match (self.env.deref(a), self.env.deref(b)) {
            (Deref::Unbound(x), Deref::Unbound(y)) => {
                if x != y {
                    self.env.set(x, FeatureValue::Var(y.clone()));
                }
                Ok(FeatureValue::Var(y))
            }
            (Deref::Unbound(x), Deref::Bound(y, _)) | (Deref::Bound(y, _), Deref::Unbound(x)) => {
                self.bind(x, FeatureValue::Var(y.clone()))?;
                Ok(FeatureValue::Var(y))
            }
            (Deref::Unbound(x), Deref::Value(v)) | (Deref::Value(v), Deref::Unbound(x)) => {
                self.bind(x.clone(), v)?;
                Ok(FeatureValue::Var(x))
            }
            (Deref::Bound(x, s), Deref::Bound(y, t)) => {
                if x == y {
                    return Ok(FeatureValue::Var(x));
                }
                // Merge the classes before recursing so that structures
                // reaching back into either variable see the merge.
                self.env.set(y, FeatureValue::Var(x.clone()));
                let merged = self.concrete(&s, &t)?;
                self.bind(x.clone(), merged)?;
                Ok(FeatureValue::Var(x))
            }
            (Deref::Bound(x, s), Deref::Value(v)) | (Deref::Value(v), Deref::Bound(x, s)) => {
                let merged = self.concrete(&s, &v)?;
                self.bind(x.clone(), merged)?;
                Ok(FeatureValue::Var(x))
            }
            (Deref::Value(v), Deref::Value(w)) => self.concrete(&v, &w),
        }
    }

    fn bind(&mut self, x: Variable, value: FeatureValue) -> Result<(), UnifyError> {
        if self.occurs(&x, &value) {
            return Err(self.fail(ClashKind::Cycle(x)));
        }
        self.env.set(x, value);
        Ok(())
    }

    fn occurs(&self, x: &Variable, value: &FeatureValue) -> bool {
        match self.env.deref(value) {
            Deref::Unbound(v) => &v == x,
            Deref::Bound(v, inner) => &v == x || self.occurs(x, &inner),
            Deref::Value(FeatureValue::Struct(fs)) => fs.pairs.values().any(|v| self.occurs(x, v)),
            Deref::Value(_) => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::parse_structure;

    fn fs(s: &str) -> FeatureStructure {
        parse_structure(s).unwrap()
    }

    #[test]
    fn empty_is_identity() {
        let (r, env) = unify(&fs("{num: sg}"), &fs("{}"), &Bindings::new()).unwrap();
        assert_eq!(env.canonical(&r), "{num: sg}");
    }

    #[test]
    fn atomic_clash() {
        let err = unify(&fs("{num: sg}"), &fs("{num: pl}"), &Bindings::new()).unwrap_err();
        assert_eq!(err.path, vec!["num".to_string()]);
        assert_eq!(err.kind, ClashKind::Atoms("sg".into(), "pl".into()));
        assert_eq!(err.to_string(), "num: sg ≠ pl");
    }

    #[test]
    fn atom_against_structure() {
        let err = unify(&fs("{agr: sg}"), &fs("{agr: {num: sg}}"), &Bindings::new()).unwrap_err();
        assert_eq!(err.kind, ClashKind::AtomStructure);
    }

    #[test]
    fn shared_variable_propagates() {
        // agr and subj.agr share ?X; the second structure fixes subj.agr.
        let a = fs("{agr: ?X, subj: {agr: ?X}}");
        let b = fs("{subj: {agr: {num: sg}}}");
        let (r, env) = unify(&a, &b, &Bindings::new()).unwrap();
        let resolved = env.resolve_structure(&r);
        assert_eq!(resolved.to_string(), "{agr: {num: sg}, subj: {agr: {num: sg}}}");
        assert_eq!(env.canonical(&r), "{agr: #0={num: sg}, subj: {agr: #0}}");
    }

    #[test]
    fn variable_binding_then_clash() {
        let a = fs("{agr: ?X, subj: {agr: ?X}}");
        let b = fs("{agr: {num: pl}, subj: {agr: {num: sg}}}");
        let err = unify(&a, &b, &Bindings::new()).unwrap_err();
        assert_eq!(err.path, vec!["subj".to_string(), "agr".into(), "num".into()]);
    }

    #[test]
    fn occurs_check_rejects_cycles() {
        let a = fs("{f: ?X}");
        let b = fs("{f: {g: ?X}}");
        let err = unify(&a, &b, &Bindings::new()).unwrap_err();
        assert!(matches!(err.kind, ClashKind::Cycle(_)));
    }

    #[test]
    fn inputs_untouched_and_env_extended() {
        let a = fs("{mode: ?M}");
        let b = fs("{mode: ind}");
        let env = Bindings::new();
        let (_, env2) = unify(&a, &b, &env).unwrap();
        assert!(env.is_empty());
        assert_eq!(env2.resolve(&FeatureValue::var("M")), FeatureValue::atom("ind"));
    }

    #[test]
    fn bound_variables_merge() {
        let mut env = Bindings::new();
        env.set(Variable::new("X"), FeatureValue::Struct(fs("{num: sg}")));
        env.set(Variable::new("Y"), FeatureValue::Struct(fs("{pers: 3}")));
        let (r, env) = unify(&fs("{a: ?X}"), &fs("{a: ?Y}"), &env).unwrap();
        assert_eq!(env.resolve_structure(&r).to_string(), "{a: {num: sg, pers: 3}}");
        assert_eq!(env.representative(&Variable::new("Y")), env.representative(&Variable::new("X")));
    }
}
