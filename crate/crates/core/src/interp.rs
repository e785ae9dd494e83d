//! One-dimensional uniform interpretations: a domain formula plus one
//! defining formula per source relation. `translate` maps source formulas
//! to target formulas; `induced_structure` maps target structures to source
//! structures; on every finite instance the two commute.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::folang::{
    parse_with_vocabulary, Checker, EvalError, FiniteStructure, Formula, ParseError,
    StructureError, Term, Vocabulary,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InterpError {
    #[error("no defining formula for relation `{0}`")]
    UnknownRelation(String),
    #[error("relation `{name}` has arity {expected}, used with {found} arguments")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("source formulas must be relational; found {0}")]
    NotRelational(String),
    #[error("formula for `{slot}` has free variables {found:?} outside {allowed:?}")]
    FreeVariables {
        slot: String,
        found: Vec<String>,
        allowed: Vec<String>,
    },
    #[error("formula for `{0}` uses symbols outside the target vocabulary")]
    Vocabulary(String),
    #[error("scheme file: {0}")]
    Format(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Domain formula in one variable and, per source relation `R`, a formula
/// whose free variables are among its declared parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpretationScheme {
    source: Vocabulary,
    target: Vocabulary,
    dom_var: String,
    dom: Formula,
    relations: BTreeMap<String, (Vec<String>, Formula)>,
}

fn check_free(slot: &str, f: &Formula, allowed: &[String]) -> Result<(), InterpError> {
    let extra: Vec<String> = f
        .free_vars()
        .into_iter()
        .filter(|v| !allowed.contains(v))
        .collect();
    if extra.is_empty() {
        Ok(())
    } else {
        Err(InterpError::FreeVariables {
            slot: slot.to_string(),
            found: extra,
            allowed: allowed.to_vec(),
        })
    }
}

impl InterpretationScheme {
    pub fn new(
        source: Vocabulary,
        target: Vocabulary,
        dom_var: impl Into<String>,
        dom: Formula,
        relations: BTreeMap<String, (Vec<String>, Formula)>,
    ) -> Result<Self, InterpError> {
        let dom_var = dom_var.into();
        check_free("dom", &dom, std::slice::from_ref(&dom_var))?;
        if !dom.vocabulary().is_subset(&target) {
            return Err(InterpError::Vocabulary("dom".into()));
        }
        for (name, &arity) in &source.relations {
            let (params, f) = relations
                .get(name)
                .ok_or_else(|| InterpError::UnknownRelation(name.clone()))?;
            let mut distinct = params.clone();
            distinct.sort();
            distinct.dedup();
            if params.len() != arity || distinct.len() != arity {
                return Err(InterpError::Arity {
                    name: name.clone(),
                    expected: arity,
                    found: params.len(),
                });
            }
            check_free(name, f, params)?;
            if !f.vocabulary().is_subset(&target) {
                return Err(InterpError::Vocabulary(name.clone()));
            }
        }
        if let Some(extra) = relations.keys().find(|r| !source.relations.contains_key(*r)) {
            return Err(InterpError::Format(format!(
                "relation `{extra}` is not in the source vocabulary"
            )));
        }
        Ok(InterpretationScheme {
            source,
            target,
            dom_var,
            dom,
            relations,
        })
    }

    /// φ_Dom := x = x and φ_R := R(x̄) for every relation of `voc`.
    pub fn identity(voc: &Vocabulary) -> Self {
        let relations = voc
            .relations
            .iter()
            .map(|(r, &a)| {
                let params: Vec<String> = (0..a).map(|i| format!("x{i}")).collect();
                let args: Vec<&str> = params.iter().map(String::as_str).collect();
                let f = Formula::rel_vars(r.clone(), &args);
                (r.clone(), (params, f))
            })
            .collect();
        let x = Term::var("x");
        InterpretationScheme::new(voc.clone(), voc.clone(), "x", Formula::eq(x.clone(), x), relations)
            .expect("identity scheme is well formed")
    }

    pub fn source(&self) -> &Vocabulary {
        &self.source
    }

    pub fn target(&self) -> &Vocabulary {
        &self.target
    }

    pub fn dom_var(&self) -> &str {
        &self.dom_var
    }

    pub fn dom(&self) -> &Formula {
        &self.dom
    }

    pub fn relations(&self) -> &BTreeMap<String, (Vec<String>, Formula)> {
        &self.relations
    }

    /// φ_Dom with its variable renamed to `t`.
    pub fn dom_at(&self, t: &Term) -> Formula {
        self.dom
            .substitute(&HashMap::from([(self.dom_var.clone(), t.clone())]))
    }

    /// φ_R with its parameters replaced by `args`.
    pub fn relation_at(&self, name: &str, args: &[Term]) -> Result<Formula, InterpError> {
        let (params, f) = self
            .relations
            .get(name)
            .ok_or_else(|| InterpError::UnknownRelation(name.to_string()))?;
        if params.len() != args.len() {
            return Err(InterpError::Arity {
                name: name.to_string(),
                expected: params.len(),
                found: args.len(),
            });
        }
        let map: HashMap<String, Term> = params.iter().cloned().zip(args.iter().cloned()).collect();
        Ok(f.substitute(&map))
    }

    /// Body lines of a scheme file: vocabularies, then one slot per line.
    pub fn to_text(&self) -> String {
        let voc = |v: &Vocabulary| {
            v.relations
                .iter()
                .map(|(r, a)| format!(" {r}/{a}"))
                .collect::<String>()
        };
        let mut out = format!("source{}\ntarget{}\n", voc(&self.source), voc(&self.target));
        out += &format!(
            "constants{}\n",
            self.target.constants.iter().map(|c| format!(" {c}")).collect::<String>()
        );
        out += &format!("dom {} := {}\n", self.dom_var, self.dom);
        for (r, (params, f)) in &self.relations {
            out += &format!("rel {r}({}) := {f}\n", params.join(","));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, InterpError> {
        let bad = |m: &str| InterpError::Format(m.to_string());
        let parse_voc = |rest: &str| -> Result<BTreeMap<String, usize>, InterpError> {
            rest.split_whitespace()
                .map(|item| {
                    let (r, a) = item.split_once('/').ok_or_else(|| bad(item))?;
                    Ok((r.to_string(), a.parse().map_err(|_| bad(item))?))
                })
                .collect()
        };
        let mut source = Vocabulary::default();
        let mut target = Vocabulary::default();
        let mut dom = None;
        let mut rel_lines = Vec::new();
        for line in text.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (head, rest) = line.split_once(' ').unwrap_or((line, ""));
            match head {
                "source" => source.relations = parse_voc(rest)?,
                "target" => target.relations = parse_voc(rest)?,
                "constants" => {
                    target.constants = rest.split_whitespace().map(str::to_string).collect()
                }
                "dom" => {
                    let (v, f) = rest.split_once(":=").ok_or_else(|| bad(line))?;
                    dom = Some((v.trim().to_string(), f.trim().to_string()));
                }
                "rel" => {
                    let (sig, f) = rest.split_once(":=").ok_or_else(|| bad(line))?;
                    let (name, params) = sig.trim().split_once('(').ok_or_else(|| bad(line))?;
                    let params = params.strip_suffix(')').ok_or_else(|| bad(line))?;
                    let params: Vec<String> = params
                        .split(',')
                        .map(str::trim)
                        .filter(|p| !p.is_empty())
                        .map(str::to_string)
                        .collect();
                    rel_lines.push((name.trim().to_string(), params, f.trim().to_string()));
                }
                _ => return Err(bad(line)),
            }
        }
        let (dom_var, dom_text) = dom.ok_or_else(|| bad("missing dom line"))?;
        let dom = parse_with_vocabulary(&dom_text, &target)?;
        let mut relations = BTreeMap::new();
        for (name, params, f) in rel_lines {
            relations.insert(name, (params, parse_with_vocabulary(&f, &target)?));
        }
        InterpretationScheme::new(source, target, dom_var, dom, relations)
    }
}

/// I(φ): atoms become their defining formulas, equality and connectives are
/// kept, and quantifiers are relativized to φ_Dom (`∀x ψ ↦ ∀x(φ_Dom(x) →
/// I(ψ))`, counting quantifiers as `∃^{=N}x(φ_Dom(x) ∧ I(ψ))`).
pub fn translate(scheme: &InterpretationScheme, f: &Formula) -> Result<Formula, InterpError> {
    let t = |g: &Formula| translate(scheme, g);
    let no_consts = |ts: &[&Term]| match ts.iter().find(|t| t.as_var().is_none()) {
        Some(c) => Err(InterpError::NotRelational(format!("constant `{}`", c.name()))),
        None => Ok(()),
    };
    Ok(match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Rel(r, args) => {
            no_consts(&args.iter().collect::<Vec<_>>())?;
            scheme.relation_at(r, args)?
        }
        Formula::Eq(a, b) => {
            no_consts(&[a, b])?;
            f.clone()
        }
        Formula::SetMember(x, _) => {
            return Err(InterpError::NotRelational(format!("set variable `{x}`")))
        }
        Formula::SetExists(_, x, _) | Formula::SetForall(_, x, _) => {
            return Err(InterpError::NotRelational(format!("set quantifier over `{x}`")))
        }
        Formula::Not(g) => Formula::not(t(g)?),
        Formula::And(gs) => Formula::And(gs.iter().map(t).collect::<Result<_, _>>()?),
        Formula::Or(gs) => Formula::Or(gs.iter().map(t).collect::<Result<_, _>>()?),
        Formula::Implies(a, b) => Formula::implies(t(a)?, t(b)?),
        Formula::Exists(x, g) => Formula::exists(
            x.clone(),
            Formula::And(vec![scheme.dom_at(&Term::var(x)), t(g)?]),
        ),
        Formula::Forall(x, g) => Formula::forall(
            x.clone(),
            Formula::implies(scheme.dom_at(&Term::var(x)), t(g)?),
        ),
        Formula::CountExists(n, x, g) => Formula::count_exists(
            *n,
            x.clone(),
            Formula::And(vec![scheme.dom_at(&Term::var(x)), t(g)?]),
        ),
    })
}

/// The source structure defined inside a target structure, with the map
/// from its elements back to the target's.
#[derive(Clone, Debug)]
pub struct InducedStructure {
    pub structure: FiniteStructure,
    /// `origin[i]` is the target element behind induced element `i`.
    pub origin: Vec<usize>,
}

impl InducedStructure {
    pub fn is_empty(&self) -> bool {
        self.origin.is_empty()
    }
}

/// Universe: elements satisfying φ_Dom; each relation: the domain tuples
/// satisfying its defining formula. Element names are kept.
pub fn induced_structure(
    scheme: &InterpretationScheme,
    c: &FiniteStructure,
) -> Result<InducedStructure, InterpError> {
    let mut dom = Checker::new(c, scheme.dom(), &[scheme.dom_var()])?;
    let origin: Vec<usize> = (0..c.size()).filter(|&e| dom.holds(&[e])).collect();
    let mut out = FiniteStructure::new(origin.iter().map(|&e| c.id(e).to_string()))?;
    for (name, &arity) in &scheme.source().relations {
        let (params, f) = &scheme.relations()[name];
        let ps: Vec<&str> = params.iter().map(String::as_str).collect();
        let mut ck = Checker::new(c, f, &ps)?;
        out.add_relation(name, arity);
        let d = origin.len();
        let total = d.checked_pow(arity as u32).ok_or_else(|| StructureError::TooLarge {
            name: name.clone(),
            size: d,
        })?;
        let mut tuple = vec![0usize; arity];
        let mut args = vec![0usize; arity];
        for code in 0..total {
            let mut rest = code;
            for i in (0..arity).rev() {
                tuple[i] = rest % d;
                rest /= d;
            }
            for (a, &i) in args.iter_mut().zip(&tuple) {
                *a = origin[i];
            }
            if ck.holds(&args) {
                out.insert(name, tuple.clone())?;
            }
        }
    }
    Ok(InducedStructure {
        structure: out,
        origin,
    })
}

/// `[C ⊨ I(φ)] == [induced(C) ⊨ φ]` for a sentence φ.
pub fn check_equivalence(
    scheme: &InterpretationScheme,
    phi: &Formula,
    c: &FiniteStructure,
) -> Result<bool, InterpError> {
    let translated = translate(scheme, phi)?;
    let lhs = Checker::new(c, &translated, &[])?.holds(&[]);
    let induced = induced_structure(scheme, c)?;
    let rhs = Checker::new(&induced.structure, phi, &[])?.holds(&[]);
    Ok(lhs == rhs)
}
