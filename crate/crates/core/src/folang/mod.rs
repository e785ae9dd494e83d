//! First-order formulas with counting and monadic set quantifiers, their
//! text syntax, finite structures, and a model checker.

mod ast;
mod eval;
mod parse;
mod print;
mod structure;
mod transform;

use std::collections::{BTreeMap, BTreeSet};

pub use ast::{fresh_name, Formula, SetKind, Term};
pub use eval::{eval, eval_sentence, Checker, EvalError, SET_QUANTIFIER_CAP};
pub use parse::{parse, parse_with_constants, parse_with_vocabulary, ParseError};
pub use structure::{FiniteStructure, Relation, RelationOracle, StructureError};
pub use transform::{expand_counting, weak_to_strong, weak_to_strong_with_guard, TransformError};

/// Relation symbols with arities, constant symbols and set-variable names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub relations: BTreeMap<String, usize>,
    pub constants: BTreeSet<String>,
    pub sets: BTreeSet<String>,
}

impl Vocabulary {
    pub fn new(relations: &[(&str, usize)], constants: &[&str]) -> Self {
        Vocabulary {
            relations: relations.iter().map(|(r, a)| (r.to_string(), *a)).collect(),
            constants: constants.iter().map(|c| c.to_string()).collect(),
            sets: BTreeSet::new(),
        }
    }

    /// Symbols of both vocabularies; on an arity clash `self` wins.
    pub fn union(&self, other: &Vocabulary) -> Vocabulary {
        let mut out = other.clone();
        out.relations.extend(self.relations.clone());
        out.constants.extend(self.constants.iter().cloned());
        out.sets.extend(self.sets.iter().cloned());
        out
    }

    /// Every symbol of `self` is in `other` with the same arity.
    pub fn is_subset(&self, other: &Vocabulary) -> bool {
        self.relations
            .iter()
            .all(|(r, a)| other.relations.get(r) == Some(a))
            && self.constants.is_subset(&other.constants)
            && self.sets.is_subset(&other.sets)
    }
}
