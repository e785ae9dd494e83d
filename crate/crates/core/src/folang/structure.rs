use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("duplicate element id `{0}`")]
    DuplicateElement(String),
    #[error("unknown element id `{0}`")]
    UnknownElement(String),
    #[error("relation `{name}` has arity {expected}, got a tuple of width {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("relation `{0}` is computed, not stored")]
    NotATable(String),
    #[error("relation `{0}` needs a declared arity (no tuples to infer it from)")]
    UnknownArity(String),
    #[error("malformed structure file: {0}")]
    Format(String),
    #[error("relation `{name}` is too large to materialize ({size} elements)")]
    TooLarge { name: String, size: usize },
}

/// A relation decided by code rather than a stored table.
pub trait RelationOracle: Send + Sync + fmt::Debug {
    fn arity(&self) -> usize;
    fn holds(&self, args: &[usize]) -> bool;
}

#[derive(Clone, Debug)]
pub enum Relation {
    Table {
        arity: Option<usize>,
        tuples: FxHashSet<Vec<usize>>,
    },
    Oracle(Arc<dyn RelationOracle>),
}

impl Relation {
    pub fn arity(&self) -> Option<usize> {
        match self {
            Relation::Table { arity, .. } => *arity,
            Relation::Oracle(o) => Some(o.arity()),
        }
    }

    pub fn holds(&self, args: &[usize]) -> bool {
        match self {
            Relation::Table { tuples, .. } => tuples.contains(args),
            Relation::Oracle(o) => o.holds(args),
        }
    }
}

/// Finite universe of opaque string ids with relation tables, constants and
/// set assignments. Elements are addressed internally by position.
#[derive(Clone, Debug, Default)]
pub struct FiniteStructure {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    relations: BTreeMap<String, Relation>,
    constants: BTreeMap<String, usize>,
    sets: BTreeMap<String, BTreeSet<usize>>,
}

impl FiniteStructure {
    pub fn new<I, S>(universe: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut s = FiniteStructure::default();
        for id in universe {
            s.add_element(id)?;
        }
        Ok(s)
    }

    pub fn add_element(&mut self, id: impl Into<String>) -> Result<usize, StructureError> {
        let id = id.into();
        if self.index.contains_key(&id) {
            return Err(StructureError::DuplicateElement(id));
        }
        let i = self.ids.len();
        self.index.insert(id.clone(), i);
        self.ids.push(id);
        Ok(i)
    }

    pub fn size(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, e: usize) -> &str {
        &self.ids[e]
    }

    pub fn element(&self, id: &str) -> Result<usize, StructureError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| StructureError::UnknownElement(id.to_string()))
    }

    /// Declares an empty table (replacing any previous relation of that name).
    pub fn add_relation(&mut self, name: impl Into<String>, arity: usize) {
        self.relations.insert(
            name.into(),
            Relation::Table {
                arity: Some(arity),
                tuples: FxHashSet::default(),
            },
        );
    }

    pub fn set_oracle(&mut self, name: impl Into<String>, oracle: Arc<dyn RelationOracle>) {
        self.relations.insert(name.into(), Relation::Oracle(oracle));
    }

    /// Inserts a tuple of element positions; declares the table on first use.
    pub fn insert(&mut self, name: &str, tuple: Vec<usize>) -> Result<(), StructureError> {
        if let Some(&bad) = tuple.iter().find(|&&e| e >= self.size()) {
            return Err(StructureError::UnknownElement(format!("#{bad}")));
        }
        let rel = self
            .relations
            .entry(name.to_string())
            .or_insert_with(|| Relation::Table {
                arity: Some(tuple.len()),
                tuples: FxHashSet::default(),
            });
        match rel {
            Relation::Table { arity, tuples } => {
                let a = *arity.get_or_insert(tuple.len());
                if a != tuple.len() {
                    return Err(StructureError::Arity {
                        name: name.to_string(),
                        expected: a,
                        found: tuple.len(),
                    });
                }
                tuples.insert(tuple);
                Ok(())
            }
            Relation::Oracle(_) => Err(StructureError::NotATable(name.to_string())),
        }
    }

    /// Inserts a tuple given by element ids.
    pub fn insert_ids(&mut self, name: &str, ids: &[&str]) -> Result<(), StructureError> {
        let tuple = ids.iter().map(|i| self.element(i)).collect::<Result<_, _>>()?;
        self.insert(name, tuple)
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&String, &Relation)> {
        self.relations.iter()
    }

    pub fn holds(&self, name: &str, args: &[usize]) -> Option<bool> {
        self.relations.get(name).map(|r| r.holds(args))
    }

    /// Tuples of a table relation, sorted. Oracles are materialized by
    /// enumeration, which is `|U|^arity` work.
    pub fn tuples(&self, name: &str) -> Option<Vec<Vec<usize>>> {
        let rel = self.relations.get(name)?;
        let mut out: Vec<Vec<usize>> = match rel {
            Relation::Table { tuples, .. } => tuples.iter().cloned().collect(),
            Relation::Oracle(o) => {
                let mut out = Vec::new();
                let mut t = vec![0usize; o.arity()];
                enumerate_tuples(self.size(), &mut t, 0, &mut |tup| {
                    if o.holds(tup) {
                        out.push(tup.to_vec());
                    }
                });
                out
            }
        };
        out.sort();
        Some(out)
    }

    pub fn set_constant(&mut self, name: impl Into<String>, e: usize) -> Result<(), StructureError> {
        if e >= self.size() {
            return Err(StructureError::UnknownElement(format!("#{e}")));
        }
        self.constants.insert(name.into(), e);
        Ok(())
    }

    pub fn constant(&self, name: &str) -> Option<usize> {
        self.constants.get(name).copied()
    }

    pub fn constants(&self) -> &BTreeMap<String, usize> {
        &self.constants
    }

    pub fn set_set(&mut self, name: impl Into<String>, members: BTreeSet<usize>) -> Result<(), StructureError> {
        if let Some(&bad) = members.iter().find(|&&e| e >= self.size()) {
            return Err(StructureError::UnknownElement(format!("#{bad}")));
        }
        self.sets.insert(name.into(), members);
        Ok(())
    }

    pub fn set(&self, name: &str) -> Option<&BTreeSet<usize>> {
        self.sets.get(name)
    }

    pub fn sets(&self) -> &BTreeMap<String, BTreeSet<usize>> {
        &self.sets
    }

    /// Copy with only the named relations and no constants or sets.
    pub fn reduct(&self, names: &[&str]) -> FiniteStructure {
        let mut out = FiniteStructure {
            ids: self.ids.clone(),
            index: self.index.clone(),
            ..Default::default()
        };
        for n in names {
            if let Some(r) = self.relations.get(*n) {
                out.relations.insert(n.to_string(), r.clone());
            }
        }
        out
    }

    pub fn to_json(&self, max_oracle_universe: usize) -> Result<String, StructureError> {
        let mut file = StructureFile {
            universe: self.ids.clone(),
            ..Default::default()
        };
        for (name, rel) in &self.relations {
            if let Relation::Oracle(_) = rel {
                if self.size() > max_oracle_universe {
                    return Err(StructureError::TooLarge {
                        name: name.clone(),
                        size: self.size(),
                    });
                }
            }
            let tuples = self.tuples(name).unwrap_or_default();
            if let Some(a) = rel.arity() {
                file.arities.insert(name.clone(), a);
            }
            file.relations.insert(
                name.clone(),
                tuples
                    .into_iter()
                    .map(|t| t.into_iter().map(|e| self.ids[e].clone()).collect())
                    .collect(),
            );
        }
        for (c, &e) in &self.constants {
            file.constants.insert(c.clone(), self.ids[e].clone());
        }
        for (x, members) in &self.sets {
            file.sets
                .insert(x.clone(), members.iter().map(|&e| self.ids[e].clone()).collect());
        }
        serde_json::to_string_pretty(&file).map_err(|e| StructureError::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, StructureError> {
        let file: StructureFile =
            serde_json::from_str(text).map_err(|e| StructureError::Format(e.to_string()))?;
        let mut s = FiniteStructure::new(file.universe)?;
        for (name, tuples) in &file.relations {
            match (file.arities.get(name), tuples.first()) {
                (Some(&a), _) => s.add_relation(name.clone(), a),
                (None, Some(t)) => s.add_relation(name.clone(), t.len()),
                (None, None) => return Err(StructureError::UnknownArity(name.clone())),
            }
            for t in tuples {
                let ids: Vec<&str> = t.iter().map(String::as_str).collect();
                s.insert_ids(name, &ids)?;
            }
        }
        for (name, &a) in &file.arities {
            if !s.relations.contains_key(name) {
                s.add_relation(name.clone(), a);
            }
        }
        for (c, id) in &file.constants {
            let e = s.element(id)?;
            s.set_constant(c.clone(), e)?;
        }
        for (x, ids) in &file.sets {
            let members = ids.iter().map(|i| s.element(i)).collect::<Result<_, _>>()?;
            s.set_set(x.clone(), members)?;
        }
        Ok(s)
    }
}

fn enumerate_tuples(n: usize, t: &mut Vec<usize>, i: usize, f: &mut dyn FnMut(&[usize])) {
    if i == t.len() {
        f(t);
        return;
    }
    for e in 0..n {
        t[i] = e;
        enumerate_tuples(n, t, i + 1, f);
    }
}

#[derive(Serialize, Deserialize, Default)]
struct StructureFile {
    universe: Vec<String>,
    #[serde(default)]
    relations: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    constants: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    sets: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    arities: BTreeMap<String, usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug)]
    struct Less;
    impl RelationOracle for Less {
        fn arity(&self) -> usize {
            2
        }
        fn holds(&self, a: &[usize]) -> bool {
            a[0] < a[1]
        }
    }

    #[test]
    fn tables_and_arity() {
        let mut s = FiniteStructure::new(["a", "b"]).unwrap();
        s.insert_ids("H", &["a", "b"]).unwrap();
        assert_eq!(s.holds("H", &[0, 1]), Some(true));
        assert_eq!(s.holds("H", &[1, 0]), Some(false));
        assert!(matches!(s.insert_ids("H", &["a"]), Err(StructureError::Arity { .. })));
        assert!(matches!(s.insert_ids("H", &["a", "z"]), Err(StructureError::UnknownElement(_))));
        assert!(FiniteStructure::new(["a", "a"]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut s = FiniteStructure::new(["a", "b", "c"]).unwrap();
        s.insert_ids("H", &["a", "b"]).unwrap();
        s.add_relation("P", 1);
        s.set_constant("c0", 2).unwrap();
        s.set_set("X", BTreeSet::from([0, 2])).unwrap();
        s.set_oracle("Lt", Arc::new(Less));
        let text = s.to_json(100).unwrap();
        let t = FiniteStructure::from_json(&text).unwrap();
        assert_eq!(t.ids(), s.ids());
        assert_eq!(t.tuples("H"), s.tuples("H"));
        assert_eq!(t.tuples("Lt").unwrap().len(), 3);
        assert_eq!(t.relation("P").unwrap().arity(), Some(1));
        assert_eq!(t.constant("c0"), Some(2));
        assert_eq!(t.set("X"), s.set("X"));
        assert!(matches!(s.to_json(2), Err(StructureError::TooLarge { .. })));
    }

    #[test]
    fn empty_relation_needs_arity() {
        let text = r#"{"universe":["a"],"relations":{"R":[]}}"#;
        assert_eq!(
            FiniteStructure::from_json(text).unwrap_err(),
            StructureError::UnknownArity("R".into())
        );
    }
}
