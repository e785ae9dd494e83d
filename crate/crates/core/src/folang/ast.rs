use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

/// A first-order term: a variable or a constant symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn cnst(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(n) => Some(n),
            Term::Const(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SetKind {
    /// Ranges over all subsets of the universe.
    Strong,
    /// Ranges over finite subsets only.
    Weak,
}

/// Formula AST. `And`/`Or` are n-ary; build them with [`Formula::and`] and
/// [`Formula::or`] so that empty and singleton lists never appear.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Rel(String, Vec<Term>),
    Eq(Term, Term),
    SetMember(String, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    /// There are exactly `n` values of the variable satisfying the body.
    CountExists(usize, String, Box<Formula>),
    SetExists(SetKind, String, Box<Formula>),
    SetForall(SetKind, String, Box<Formula>),
}

impl Formula {
    pub fn rel(name: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Rel(name.into(), args)
    }

    /// Relation atom over variables named by `args`.
    pub fn rel_vars(name: impl Into<String>, args: &[&str]) -> Formula {
        Formula::Rel(name.into(), args.iter().map(|a| Term::var(*a)).collect())
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn neq(a: Term, b: Term) -> Formula {
        Formula::not(Formula::Eq(a, b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(mut parts: Vec<Formula>) -> Formula {
        match parts.len() {
            0 => Formula::True,
            1 => parts.pop().unwrap(),
            _ => Formula::And(parts),
        }
    }

    pub fn or(mut parts: Vec<Formula>) -> Formula {
        match parts.len() {
            0 => Formula::False,
            1 => parts.pop().unwrap(),
            _ => Formula::Or(parts),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(var.into(), Box::new(body))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(var.into(), Box::new(body))
    }

    /// `∃v1 ∃v2 … body`, outermost first.
    pub fn exists_many<S: AsRef<str>>(vars: &[S], body: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(body, |acc, v| Formula::exists(v.as_ref(), acc))
    }

    pub fn forall_many<S: AsRef<str>>(vars: &[S], body: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(body, |acc, v| Formula::forall(v.as_ref(), acc))
    }

    pub fn count_exists(n: usize, var: impl Into<String>, body: Formula) -> Formula {
        Formula::CountExists(n, var.into(), Box::new(body))
    }

    pub fn is_quantifier(&self) -> bool {
        matches!(
            self,
            Formula::Exists(..)
                | Formula::Forall(..)
                | Formula::CountExists(..)
                | Formula::SetExists(..)
                | Formula::SetForall(..)
        )
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + match self {
            Formula::True
            | Formula::False
            | Formula::Rel(..)
            | Formula::Eq(..)
            | Formula::SetMember(..) => 0,
            Formula::Not(f)
            | Formula::Exists(_, f)
            | Formula::Forall(_, f)
            | Formula::CountExists(_, _, f)
            | Formula::SetExists(_, _, f)
            | Formula::SetForall(_, _, f) => f.size(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::size).sum(),
            Formula::Implies(a, b) => a.size() + b.size(),
        }
    }

    /// Free first-order variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }

    /// Set variables used in membership atoms and not bound by a set
    /// quantifier.
    pub fn free_set_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        collect_free_sets(self, &mut Vec::new(), &mut out);
        out
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_var_names(&self) -> HashSet<String> {
        let mut out = HashSet::new();
        self.visit(&mut |f| match f {
            Formula::Rel(_, ts) => out.extend(ts.iter().filter_map(Term::as_var).map(String::from)),
            Formula::Eq(a, b) => {
                out.extend([a, b].into_iter().filter_map(Term::as_var).map(String::from))
            }
            Formula::SetMember(_, t) => out.extend(t.as_var().map(String::from)),
            Formula::Exists(v, _) | Formula::Forall(v, _) | Formula::CountExists(_, v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<F: FnMut(&Formula)>(&self, f: &mut F) {
        f(self);
        match self {
            Formula::Not(g)
            | Formula::Exists(_, g)
            | Formula::Forall(_, g)
            | Formula::CountExists(_, _, g)
            | Formula::SetExists(_, _, g)
            | Formula::SetForall(_, _, g) => g.visit(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit(f)),
            Formula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Relation symbols with the arities they are used at, constants and free
    /// set variables.
    pub fn vocabulary(&self) -> super::Vocabulary {
        let mut voc = super::Vocabulary::default();
        self.visit(&mut |f| {
            let terms: Vec<&Term> = match f {
                Formula::Rel(r, ts) => {
                    voc.relations.insert(r.clone(), ts.len());
                    ts.iter().collect()
                }
                Formula::Eq(a, b) => vec![a, b],
                Formula::SetMember(_, t) => vec![t],
                _ => vec![],
            };
            for t in terms {
                if let Term::Const(c) = t {
                    voc.constants.insert(c.clone());
                }
            }
        });
        voc.sets = self.free_set_vars();
        voc
    }

    /// Relation symbols used at more than one arity.
    pub fn arity_conflicts(&self) -> BTreeMap<String, BTreeSet<usize>> {
        let mut seen: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
        self.visit(&mut |f| {
            if let Formula::Rel(r, ts) = f {
                seen.entry(r.clone()).or_default().insert(ts.len());
            }
        });
        seen.retain(|_, s| s.len() > 1);
        seen
    }

    /// Turns free variables with the given names into constants.
    pub fn bind_constants(&self, constants: &BTreeSet<String>) -> Formula {
        fn go(f: &Formula, consts: &BTreeSet<String>, bound: &mut Vec<String>) -> Formula {
            let fix = |t: &Term, bound: &Vec<String>| match t {
                Term::Var(v) if consts.contains(v) && !bound.contains(v) => Term::Const(v.clone()),
                _ => t.clone(),
            };
            match f {
                Formula::Rel(r, ts) => {
                    Formula::Rel(r.clone(), ts.iter().map(|t| fix(t, bound)).collect())
                }
                Formula::Eq(a, b) => Formula::Eq(fix(a, bound), fix(b, bound)),
                Formula::SetMember(x, t) => Formula::SetMember(x.clone(), fix(t, bound)),
                Formula::Exists(v, g) | Formula::Forall(v, g) | Formula::CountExists(_, v, g) => {
                    bound.push(v.clone());
                    let body = go(g, consts, bound);
                    bound.pop();
                    f.with_body(body)
                }
                _ => f.map_children(|g| go(g, consts, bound)),
            }
        }
        go(self, constants, &mut Vec::new())
    }

    /// Same node with its single child replaced. Panics on nodes without
    /// exactly one child.
    pub(crate) fn with_body(&self, body: Formula) -> Formula {
        let b = Box::new(body);
        match self {
            Formula::Not(_) => Formula::Not(b),
            Formula::Exists(v, _) => Formula::Exists(v.clone(), b),
            Formula::Forall(v, _) => Formula::Forall(v.clone(), b),
            Formula::CountExists(n, v, _) => Formula::CountExists(*n, v.clone(), b),
            Formula::SetExists(k, x, _) => Formula::SetExists(*k, x.clone(), b),
            Formula::SetForall(k, x, _) => Formula::SetForall(*k, x.clone(), b),
            _ => panic!("with_body on a node without a single child"),
        }
    }

    /// Rebuilds the node with `g` applied to each direct subformula.
    pub fn map_children<F: FnMut(&Formula) -> Formula>(&self, mut g: F) -> Formula {
        match self {
            Formula::True
            | Formula::False
            | Formula::Rel(..)
            | Formula::Eq(..)
            | Formula::SetMember(..) => self.clone(),
            Formula::Not(f)
            | Formula::Exists(_, f)
            | Formula::Forall(_, f)
            | Formula::CountExists(_, _, f)
            | Formula::SetExists(_, _, f)
            | Formula::SetForall(_, _, f) => self.with_body(g(f)),
            Formula::And(fs) => Formula::And(fs.iter().map(&mut g).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(&mut g).collect()),
            Formula::Implies(a, b) => Formula::implies(g(a), g(b)),
        }
    }

    /// Capture-avoiding substitution of terms for free variables.
    pub fn substitute(&self, map: &HashMap<String, Term>) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        let sub = |t: &Term| match t {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(_) => t.clone(),
        };
        match self {
            Formula::Rel(r, ts) => Formula::Rel(r.clone(), ts.iter().map(sub).collect()),
            Formula::Eq(a, b) => Formula::Eq(sub(a), sub(b)),
            Formula::SetMember(x, t) => Formula::SetMember(x.clone(), sub(t)),
            Formula::Exists(v, body) | Formula::Forall(v, body) | Formula::CountExists(_, v, body) => {
                let free = body.free_vars();
                let mut inner: HashMap<String, Term> = map
                    .iter()
                    .filter(|(k, _)| *k != v && free.contains(*k))
                    .map(|(k, t)| (k.clone(), t.clone()))
                    .collect();
                if inner.is_empty() {
                    return self.clone();
                }
                let captured = inner.values().any(|t| t.as_var() == Some(v.as_str()));
                if !captured {
                    return self.with_body(body.substitute(&inner));
                }
                let mut avoid = body.all_var_names();
                avoid.extend(inner.keys().cloned());
                avoid.extend(inner.values().filter_map(Term::as_var).map(String::from));
                let fresh = fresh_name(v, &avoid);
                inner.insert(v.clone(), Term::Var(fresh.clone()));
                let renamed = body.substitute(&inner);
                match self {
                    Formula::Exists(..) => Formula::exists(fresh, renamed),
                    Formula::Forall(..) => Formula::forall(fresh, renamed),
                    Formula::CountExists(n, ..) => Formula::count_exists(*n, fresh, renamed),
                    _ => unreachable!(),
                }
            }
            _ => self.map_children(|g| g.substitute(map)),
        }
    }

    /// Replaces every atom `name(args)` by `f(args)`. The caller is responsible
    /// for capture avoidance inside `f`'s output (see [`Formula::substitute`]).
    pub fn replace_relation<F: Fn(&[Term]) -> Formula>(&self, name: &str, f: &F) -> Formula {
        match self {
            Formula::Rel(r, ts) if r == name => f(ts),
            _ => self.map_children(|g| g.replace_relation(name, f)),
        }
    }
}

/// `base` if unused, else `base1`, `base2`, … (first one not in `avoid`).
pub fn fresh_name(base: &str, avoid: &HashSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|c| !avoid.contains(c))
        .unwrap()
}

fn collect_free(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    let mut term = |t: &Term, bound: &Vec<String>| {
        if let Term::Var(v) = t {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        }
    };
    match f {
        Formula::Rel(_, ts) => ts.iter().for_each(|t| term(t, bound)),
        Formula::Eq(a, b) => {
            term(a, bound);
            term(b, bound);
        }
        Formula::SetMember(_, t) => term(t, bound),
        Formula::Exists(v, g) | Formula::Forall(v, g) | Formula::CountExists(_, v, g) => {
            bound.push(v.clone());
            collect_free(g, bound, out);
            bound.pop();
        }
        Formula::Not(g) | Formula::SetExists(_, _, g) | Formula::SetForall(_, _, g) => {
            collect_free(g, bound, out)
        }
        Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| collect_free(g, bound, out)),
        Formula::Implies(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Formula::True | Formula::False => {}
    }
}

fn collect_free_sets(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match f {
        Formula::SetMember(x, _) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Formula::SetExists(_, x, g) | Formula::SetForall(_, x, g) => {
            bound.push(x.clone());
            collect_free_sets(g, bound, out);
            bound.pop();
        }
        Formula::Not(g)
        | Formula::Exists(_, g)
        | Formula::Forall(_, g)
        | Formula::CountExists(_, _, g) => collect_free_sets(g, bound, out),
        Formula::And(gs) | Formula::Or(gs) => {
            gs.iter().for_each(|g| collect_free_sets(g, bound, out))
        }
        Formula::Implies(a, b) => {
            collect_free_sets(a, bound, out);
            collect_free_sets(b, bound, out);
        }
        _ => {}
    }
}
