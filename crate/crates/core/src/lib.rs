//! Feature-based lexicalized tree adjoining grammar toolkit: grammar model,
//! feature unification, morphology and syntactic databases, an N-best
//! trigram tagger, tree statistics, an Earley-style chart parser and a
//! parseval evaluator.

pub mod features;
pub mod grammar;
pub mod derivation;
pub mod derived;
pub mod eval;
pub mod morph;
pub mod parser;
pub mod stats;
pub mod synt;
pub mod tagger;
pub mod workbench;
