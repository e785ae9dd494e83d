//! Model checking over finite structures.
//!
//! Formulas are compiled once into a slot-indexed node arena. Quantifiers
//! are evaluated with three optimizations that never change the result:
//!
//! * conjuncts that do not mention the bound variable are decided first;
//! * when a remaining conjunct (the antecedent's, for `∀x(A → B)`) is an
//!   equality or relation atom on the variable, candidates are drawn from it
//!   instead of the whole universe;
//! * quantifier nodes are memoized on the values of their free variables,
//!   except under a quantified set variable;
//! * `∃y(A ∧ B)` with `y` not free in `A` is compiled as `A ∧ ∃y B`, so an
//!   enclosing quantifier can draw candidates from `A`.

use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

use rustc_hash::FxHashMap;
use smallvec::SmallVec;
use thiserror::Error;

use super::ast::{Formula, Term};
use super::structure::{FiniteStructure, Relation};

/// Largest universe on which set quantifiers are evaluated.
pub const SET_QUANTIFIER_CAP: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("free variable `{0}` has no value")]
    UnboundVariable(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("relation `{name}` has arity {expected}, used with {found} arguments")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("free set variable `{0}` has no assignment")]
    UnknownSet(String),
    #[error("set quantifiers need a universe of at most {cap} elements, got {size}")]
    SetQuantifierCap { size: usize, cap: usize },
    #[error("element #{0} is outside the universe")]
    BadElement(usize),
}

type NodeId = u32;
const UNSET: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Arg {
    Slot(u32),
    Elem(usize),
}

#[derive(Debug)]
enum Gen {
    Eq(Arg),
    Rel { rel: u32, args: SmallVec<[Arg; 4]> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum QKind {
    Exists,
    Forall,
    Count(usize),
}

#[derive(Debug)]
struct Quant {
    kind: QKind,
    slot: u32,
    /// Conjuncts without the variable: of the body (∃, counting) or of the
    /// antecedent (∀ over an implication).
    indep: Vec<NodeId>,
    /// Conjuncts with the variable, minus the generator.
    dep: Vec<NodeId>,
    gen: Option<Gen>,
    /// Consequent of `∀x(A → B)`; for a plain `∀x φ`, `dep = [φ]` and this
    /// is `None`.
    then: Option<NodeId>,
    /// Free slots, or `None` if memoization is unsafe.
    key: Option<SmallVec<[u32; 6]>>,
}

#[derive(Debug)]
enum Node {
    Const(bool),
    Rel { rel: u32, args: SmallVec<[Arg; 4]> },
    Eq(Arg, Arg),
    Member { set: u32, arg: Arg },
    Not(NodeId),
    And(Vec<NodeId>),
    Or(Vec<NodeId>),
    Implies(NodeId, NodeId),
    Quant(Box<Quant>),
    SetQuant { exists: bool, slot: u32, body: NodeId },
}

#[derive(Default)]
struct NodeInfo {
    free: BTreeSet<u32>,
    /// Free set slots bound by an enclosing set quantifier.
    free_qsets: BTreeSet<u32>,
}

struct Compiler<'a> {
    s: &'a FiniteStructure,
    nodes: Vec<Node>,
    info: Vec<NodeInfo>,
    rels: Vec<&'a Relation>,
    rel_ids: BTreeMap<String, u32>,
    n_slots: u32,
    free: BTreeMap<String, u32>,
    set_init: Vec<Option<Vec<u64>>>,
    fixed_sets: BTreeMap<String, u32>,
}

fn words(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

impl<'a> Compiler<'a> {
    fn push(&mut self, n: Node, info: NodeInfo) -> NodeId {
        self.nodes.push(n);
        self.info.push(info);
        (self.nodes.len() - 1) as NodeId
    }

    fn new_slot(&mut self) -> u32 {
        self.n_slots += 1;
        self.n_slots - 1
    }

    fn arg(&mut self, t: &Term, scope: &[(String, u32)], info: &mut NodeInfo) -> Result<Arg, EvalError> {
        match t {
            Term::Const(c) => self
                .s
                .constant(c)
                .map(Arg::Elem)
                .ok_or_else(|| EvalError::UnknownConstant(c.clone())),
            Term::Var(v) => {
                let slot = match scope.iter().rev().find(|(n, _)| n == v) {
                    Some(&(_, s)) => s,
                    None => match self.free.get(v) {
                        Some(&s) => s,
                        None => {
                            let s = self.new_slot();
                            self.free.insert(v.clone(), s);
                            s
                        }
                    },
                };
                info.free.insert(slot);
                Ok(Arg::Slot(slot))
            }
        }
    }

    fn rel(&mut self, name: &str, n_args: usize) -> Result<u32, EvalError> {
        if let Some(&id) = self.rel_ids.get(name) {
            return Ok(id);
        }
        let r = self
            .s
            .relation(name)
            .ok_or_else(|| EvalError::UnknownRelation(name.to_string()))?;
        if let Some(a) = r.arity() {
            if a != n_args {
                return Err(EvalError::ArityMismatch {
                    name: name.to_string(),
                    expected: a,
                    found: n_args,
                });
            }
        }
        let id = self.rels.len() as u32;
        self.rels.push(r);
        self.rel_ids.insert(name.to_string(), id);
        Ok(id)
    }

    fn merge(&self, ids: &[NodeId]) -> NodeInfo {
        let mut info = NodeInfo::default();
        for &i in ids {
            info.free.extend(&self.info[i as usize].free);
            info.free_qsets.extend(&self.info[i as usize].free_qsets);
        }
        info
    }

    fn compile(
        &mut self,
        f: &Formula,
        scope: &mut Vec<(String, u32)>,
        sets: &mut Vec<(String, u32)>,
    ) -> Result<NodeId, EvalError> {
        match f {
            Formula::True => Ok(self.push(Node::Const(true), NodeInfo::default())),
            Formula::False => Ok(self.push(Node::Const(false), NodeInfo::default())),
            Formula::Rel(r, ts)
                if ts.len() == 1 && self.s.relation(r).is_none() && self.s.set(r).is_some() =>
            {
                // a structure's set read as a unary predicate
                self.compile(&Formula::SetMember(r.clone(), ts[0].clone()), scope, sets)
            }
            Formula::Rel(r, ts) => {
                let rel = self.rel(r, ts.len())?;
                let mut info = NodeInfo::default();
                let args = ts
                    .iter()
                    .map(|t| self.arg(t, scope, &mut info))
                    .collect::<Result<_, _>>()?;
                Ok(self.push(Node::Rel { rel, args }, info))
            }
            Formula::Eq(a, b) => {
                let mut info = NodeInfo::default();
                let a = self.arg(a, scope, &mut info)?;
                let b = self.arg(b, scope, &mut info)?;
                Ok(self.push(Node::Eq(a, b), info))
            }
            Formula::SetMember(x, t) => {
                let mut info = NodeInfo::default();
                let arg = self.arg(t, scope, &mut info)?;
                let set = match sets.iter().rev().find(|(n, _)| n == x) {
                    Some(&(_, s)) => {
                        info.free_qsets.insert(s);
                        s
                    }
                    None => self.fixed_set(x)?,
                };
                Ok(self.push(Node::Member { set, arg }, info))
            }
            Formula::Not(g) => {
                let c = self.compile(g, scope, sets)?;
                let info = self.merge(&[c]);
                Ok(self.push(Node::Not(c), info))
            }
            Formula::And(gs) | Formula::Or(gs) => {
                let cs = gs
                    .iter()
                    .map(|g| self.compile(g, scope, sets))
                    .collect::<Result<Vec<_>, _>>()?;
                let info = self.merge(&cs);
                let node = if matches!(f, Formula::And(_)) {
                    Node::And(cs)
                } else {
                    Node::Or(cs)
                };
                Ok(self.push(node, info))
            }
            Formula::Implies(a, b) => {
                let a = self.compile(a, scope, sets)?;
                let b = self.compile(b, scope, sets)?;
                let info = self.merge(&[a, b]);
                Ok(self.push(Node::Implies(a, b), info))
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) | Formula::CountExists(_, v, g) => {
                let kind = match f {
                    Formula::Exists(..) => QKind::Exists,
                    Formula::Forall(..) => QKind::Forall,
                    Formula::CountExists(n, ..) => QKind::Count(*n),
                    _ => unreachable!(),
                };
                let slot = self.new_slot();
                scope.push((v.clone(), slot));
                let result = self.compile_quant(kind, slot, g, scope, sets);
                scope.pop();
                result
            }
            Formula::SetExists(_, x, g) | Formula::SetForall(_, x, g) => {
                if self.s.size() > SET_QUANTIFIER_CAP {
                    return Err(EvalError::SetQuantifierCap {
                        size: self.s.size(),
                        cap: SET_QUANTIFIER_CAP,
                    });
                }
                let slot = self.set_init.len() as u32;
                self.set_init.push(None);
                sets.push((x.clone(), slot));
                let body = self.compile(g, scope, sets);
                sets.pop();
                let body = body?;
                let mut info = self.merge(&[body]);
                info.free_qsets.remove(&slot);
                let exists = matches!(f, Formula::SetExists(..));
                Ok(self.push(Node::SetQuant { exists, slot, body }, info))
            }
        }
    }

    fn fixed_set(&mut self, name: &str) -> Result<u32, EvalError> {
        if let Some(&s) = self.fixed_sets.get(name) {
            return Ok(s);
        }
        let members = self
            .s
            .set(name)
            .ok_or_else(|| EvalError::UnknownSet(name.to_string()))?;
        let mut bits = vec![0u64; words(self.s.size())];
        for &e in members {
            bits[e / 64] |= 1 << (e % 64);
        }
        let slot = self.set_init.len() as u32;
        self.set_init.push(Some(bits));
        self.fixed_sets.insert(name.to_string(), slot);
        Ok(slot)
    }

    fn conjuncts<'f>(f: &'f Formula, out: &mut Vec<&'f Formula>) {
        match f {
            Formula::And(gs) => gs.iter().for_each(|g| Self::conjuncts(g, out)),
            _ => out.push(f),
        }
    }

    fn compile_quant(
        &mut self,
        kind: QKind,
        slot: u32,
        body: &Formula,
        scope: &mut Vec<(String, u32)>,
        sets: &mut Vec<(String, u32)>,
    ) -> Result<NodeId, EvalError> {
        let (guard, then): (&Formula, Option<&Formula>) = match (kind, body) {
            (QKind::Forall, Formula::Implies(a, b)) => (a, Some(b)),
            (QKind::Forall, _) => (body, None),
            _ => (body, None),
        };
        let plain_forall = kind == QKind::Forall && then.is_none();
        let mut parts = Vec::new();
        if plain_forall {
            parts.push(guard);
        } else {
            Self::conjuncts(guard, &mut parts);
        }
        let ids = parts
            .iter()
            .map(|p| self.compile(p, scope, sets))
            .collect::<Result<Vec<_>, _>>()?;
        let then_id = then.map(|t| self.compile(t, scope, sets)).transpose()?;
        let (mut indep, mut dep): (Vec<NodeId>, Vec<NodeId>) = if plain_forall {
            (vec![], ids.clone())
        } else {
            ids.iter()
                .partition(|&&i| !self.info[i as usize].free.contains(&slot))
        };
        if plain_forall {
            indep.clear();
        }
        let gen = if plain_forall { None } else { self.pick_generator(slot, &mut dep) };

        let mut all = ids;
        all.extend(then_id);
        let mut info = self.merge(&all);
        info.free.remove(&slot);
        let key = info
            .free_qsets
            .is_empty()
            .then(|| info.free.iter().copied().collect());
        let q = Quant {
            kind,
            slot,
            indep,
            dep,
            gen,
            then: then_id,
            key,
        };
        Ok(self.push(Node::Quant(Box::new(q)), info))
    }

    /// Removes and returns the best candidate source among `dep`: an
    /// equality first, else the relation atom with the most arguments other
    /// than the variable (earliest on ties).
    fn pick_generator(&self, slot: u32, dep: &mut Vec<NodeId>) -> Option<Gen> {
        let me = Arg::Slot(slot);
        for (i, &d) in dep.iter().enumerate() {
            if let Node::Eq(a, b) = &self.nodes[d as usize] {
                let other = match (*a == me, *b == me) {
                    (true, false) => *b,
                    (false, true) => *a,
                    _ => continue,
                };
                dep.remove(i);
                return Some(Gen::Eq(other));
            }
        }
        let mut best: Option<(usize, usize)> = None;
        for (i, &d) in dep.iter().enumerate() {
            if let Node::Rel { args, .. } = &self.nodes[d as usize] {
                let bound = args.iter().filter(|a| **a != me).count();
                if best.is_none_or(|(_, b)| bound > b) {
                    best = Some((i, bound));
                }
            }
        }
        let (i, _) = best?;
        let d = dep.remove(i);
        match &self.nodes[d as usize] {
            Node::Rel { rel, args } => Some(Gen::Rel {
                rel: *rel,
                args: args.clone(),
            }),
            _ => unreachable!(),
        }
    }
}

struct State {
    env: Vec<usize>,
    sets: Vec<Vec<u64>>,
    memo: FxHashMap<SmallVec<[usize; 8]>, bool>,
    cands: FxHashMap<SmallVec<[usize; 6]>, Rc<Vec<usize>>>,
}

/// A formula compiled against one structure. Reusable across assignments;
/// memo tables persist between calls.
pub struct Checker<'a> {
    s: &'a FiniteStructure,
    nodes: Vec<Node>,
    rels: Vec<&'a Relation>,
    root: NodeId,
    params: Vec<u32>,
    state: State,
}

impl<'a> Checker<'a> {
    /// Compiles `f`. Its free variables must all appear in `params`, which
    /// fixes the argument order for [`Checker::holds`].
    pub fn new(s: &'a FiniteStructure, f: &Formula, params: &[&str]) -> Result<Self, EvalError> {
        let mut c = Compiler {
            s,
            nodes: Vec::new(),
            info: Vec::new(),
            rels: Vec::new(),
            rel_ids: BTreeMap::new(),
            n_slots: 0,
            free: BTreeMap::new(),
            set_init: Vec::new(),
            fixed_sets: BTreeMap::new(),
        };
        let param_slots: Vec<u32> = params
            .iter()
            .map(|p| {
                let s = c.new_slot();
                c.free.insert(p.to_string(), s);
                s
            })
            .collect();
        let root = c.compile(&miniscope(f), &mut Vec::new(), &mut Vec::new())?;
        if let Some(v) = c.free.keys().find(|v| !params.contains(&v.as_str())) {
            return Err(EvalError::UnboundVariable(v.clone()));
        }
        let w = words(s.size());
        let sets = c
            .set_init
            .into_iter()
            .map(|init| init.unwrap_or_else(|| vec![0; w]))
            .collect();
        Ok(Checker {
            s,
            nodes: c.nodes,
            rels: c.rels,
            root,
            params: param_slots,
            state: State {
                env: vec![UNSET; c.n_slots as usize],
                sets,
                memo: FxHashMap::default(),
                cands: FxHashMap::default(),
            },
        })
    }

    /// Truth value with `args[i]` assigned to the i-th parameter.
    pub fn holds(&mut self, args: &[usize]) -> bool {
        assert_eq!(args.len(), self.params.len(), "wrong number of arguments");
        for (&slot, &e) in self.params.iter().zip(args) {
            assert!(e < self.s.size(), "element outside the universe");
            self.state.env[slot as usize] = e;
        }
        let mut st = std::mem::replace(
            &mut self.state,
            State {
                env: Vec::new(),
                sets: Vec::new(),
                memo: FxHashMap::default(),
                cands: FxHashMap::default(),
            },
        );
        let r = self.eval(&mut st, self.root);
        self.state = st;
        r
    }

    fn val(&self, st: &State, a: Arg) -> usize {
        match a {
            Arg::Slot(s) => st.env[s as usize],
            Arg::Elem(e) => e,
        }
    }

    fn eval(&self, st: &mut State, id: NodeId) -> bool {
        match &self.nodes[id as usize] {
            Node::Const(b) => *b,
            Node::Rel { rel, args } => {
                let vals: SmallVec<[usize; 4]> = args.iter().map(|&a| self.val(st, a)).collect();
                self.rels[*rel as usize].holds(&vals)
            }
            Node::Eq(a, b) => self.val(st, *a) == self.val(st, *b),
            Node::Member { set, arg } => {
                let e = self.val(st, *arg);
                st.sets[*set as usize][e / 64] >> (e % 64) & 1 == 1
            }
            Node::Not(g) => !self.eval(st, *g),
            Node::And(gs) => gs.iter().all(|&g| self.eval(st, g)),
            Node::Or(gs) => gs.iter().any(|&g| self.eval(st, g)),
            Node::Implies(a, b) => !self.eval(st, *a) || self.eval(st, *b),
            Node::Quant(q) => self.eval_quant(st, id, q),
            Node::SetQuant { exists, slot, body } => {
                let n = self.s.size();
                let saved = st.sets[*slot as usize].clone();
                let mut result = !*exists;
                for mask in 0u64..(1u64 << n) {
                    st.sets[*slot as usize] = vec![mask];
                    if self.eval(st, *body) == *exists {
                        result = *exists;
                        break;
                    }
                }
                st.sets[*slot as usize] = saved;
                result
            }
        }
    }

    fn eval_quant(&self, st: &mut State, id: NodeId, q: &Quant) -> bool {
        let key = q.key.as_ref().map(|free| {
            let mut k: SmallVec<[usize; 8]> = SmallVec::new();
            k.push(id as usize);
            k.extend(free.iter().map(|&s| st.env[s as usize]));
            k
        });
        if let Some(k) = &key {
            if let Some(&b) = st.memo.get(k) {
                return b;
            }
        }
        let saved = st.env[q.slot as usize];
        let r = self.eval_quant_uncached(st, q);
        st.env[q.slot as usize] = saved;
        if let Some(k) = key {
            st.memo.insert(k, r);
        }
        r
    }

    fn eval_quant_uncached(&self, st: &mut State, q: &Quant) -> bool {
        let guard_open = q.indep.iter().all(|&g| self.eval(st, g));
        if !guard_open {
            return match q.kind {
                QKind::Exists => false,
                QKind::Forall => true,
                QKind::Count(n) => n == 0,
            };
        }
        let cands = self.candidates(st, q);
        let slot = q.slot as usize;
        let mut count = 0usize;
        let mut each = |st: &mut State, e: usize| -> Option<bool> {
            st.env[slot] = e;
            let guard = q.dep.iter().all(|&g| self.eval(st, g));
            match q.kind {
                QKind::Exists => guard.then_some(true),
                QKind::Forall => {
                    let ok = match q.then {
                        Some(t) => !guard || self.eval(st, t),
                        None => guard,
                    };
                    (!ok).then_some(false)
                }
                QKind::Count(n) => {
                    if guard {
                        count += 1;
                        if count > n {
                            return Some(false);
                        }
                    }
                    None
                }
            }
        };
        let early = match &cands {
            Some(list) => list.iter().find_map(|&e| each(st, e)),
            None => (0..self.s.size()).find_map(|e| each(st, e)),
        };
        match (early, q.kind) {
            (Some(b), _) => b,
            (None, QKind::Exists) => false,
            (None, QKind::Forall) => true,
            (None, QKind::Count(n)) => count == n,
        }
    }

    fn candidates(&self, st: &mut State, q: &Quant) -> Option<Rc<Vec<usize>>> {
        let me = Arg::Slot(q.slot);
        match q.gen.as_ref()? {
            Gen::Eq(a) => Some(Rc::new(vec![self.val(st, *a)])),
            Gen::Rel { rel, args } => {
                let mut key: SmallVec<[usize; 6]> = SmallVec::new();
                key.push(*rel as usize);
                key.extend(
                    args.iter()
                        .map(|&a| if a == me { UNSET } else { self.val(st, a) }),
                );
                if let Some(c) = st.cands.get(&key) {
                    return Some(c.clone());
                }
                let pattern = &key[1..];
                let list: Vec<usize> = match self.rels[*rel as usize] {
                    Relation::Table { tuples, .. } => {
                        let mut v: Vec<usize> = tuples
                            .iter()
                            .filter_map(|t| match_pattern(pattern, t))
                            .collect();
                        v.sort_unstable();
                        v.dedup();
                        v
                    }
                    Relation::Oracle(o) => {
                        let mut buf: SmallVec<[usize; 4]> = SmallVec::from_slice(pattern);
                        (0..self.s.size())
                            .filter(|&e| {
                                for (b, p) in buf.iter_mut().zip(pattern) {
                                    if *p == UNSET {
                                        *b = e;
                                    }
                                }
                                o.holds(&buf)
                            })
                            .collect()
                    }
                };
                let list = Rc::new(list);
                st.cands.insert(key, list.clone());
                Some(list)
            }
        }
    }
}

/// Pulls conjuncts that do not mention `y` out of `∃y`, bottom-up.
fn miniscope(f: &Formula) -> Formula {
    let f = f.map_children(miniscope);
    let Formula::Exists(y, body) = &f else { return f };
    let mut parts = Vec::new();
    Compiler::conjuncts(body, &mut parts);
    let (dep, indep): (Vec<&Formula>, Vec<&Formula>) =
        parts.into_iter().partition(|p| p.free_vars().contains(y));
    if indep.is_empty() {
        return f;
    }
    let mut out: Vec<Formula> = indep.into_iter().cloned().collect();
    out.push(Formula::exists(y.clone(), Formula::and(dep.into_iter().cloned().collect())));
    Formula::and(out)
}

/// The common value at the `UNSET` positions of `pattern` if `tuple`
/// matches it elsewhere.
fn match_pattern(pattern: &[usize], tuple: &[usize]) -> Option<usize> {
    let mut x = None;
    for (&p, &t) in pattern.iter().zip(tuple) {
        if p == UNSET {
            match x {
                None => x = Some(t),
                Some(v) if v != t => return None,
                _ => {}
            }
        } else if p != t {
            return None;
        }
    }
    x
}

/// Evaluates `f` under an assignment of its free variables.
pub fn eval(s: &FiniteStructure, f: &Formula, env: &BTreeMap<String, usize>) -> Result<bool, EvalError> {
    let names: Vec<&str> = env.keys().map(String::as_str).collect();
    let args: Vec<usize> = env.values().copied().collect();
    if let Some(&bad) = args.iter().find(|&&e| e >= s.size()) {
        return Err(EvalError::BadElement(bad));
    }
    let mut c = Checker::new(s, f, &names)?;
    Ok(c.holds(&args))
}

/// Evaluates a sentence.
pub fn eval_sentence(s: &FiniteStructure, f: &Formula) -> Result<bool, EvalError> {
    eval(s, f, &BTreeMap::new())
}
