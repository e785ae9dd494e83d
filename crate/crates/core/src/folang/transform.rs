use std::collections::HashSet;

use thiserror::Error;

use super::ast::{fresh_name, Formula, SetKind, Term};
use super::Vocabulary;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("weak set quantifiers need a ternary betweenness relation `{0}` in the vocabulary")]
    MissingBetweenness(String),
    #[error("finiteness is defined for dimension >= 1, got {0}")]
    InvalidDimension(usize),
}

/// Rewrites every `∃^{=N}x ψ` into plain first-order logic with equality:
/// `N = 0` gives `∀x ¬ψ`; otherwise N pairwise distinct witnesses satisfy ψ
/// and every ψ-element equals one of them.
pub fn expand_counting(f: &Formula) -> Formula {
    match f {
        Formula::CountExists(n, x, body) => {
            let body = expand_counting(body);
            if *n == 0 {
                return Formula::forall(x.clone(), Formula::not(body));
            }
            let mut avoid: HashSet<String> = body.all_var_names();
            avoid.extend(body.free_vars());
            avoid.insert(x.clone());
            let witnesses: Vec<String> = if *n == 1 {
                vec![x.clone()]
            } else {
                (0..*n)
                    .map(|_| {
                        let w = fresh_name(x, &avoid);
                        avoid.insert(w.clone());
                        w
                    })
                    .collect()
            };
            let y = fresh_name(if x == "y" { "z" } else { "y" }, &avoid);
            let inst = |v: &str| {
                body.substitute(&[(x.clone(), Term::var(v))].into_iter().collect())
            };
            let mut parts = Vec::new();
            for i in 0..witnesses.len() {
                for j in (i + 1)..witnesses.len() {
                    parts.push(Formula::neq(
                        Term::var(&witnesses[i]),
                        Term::var(&witnesses[j]),
                    ));
                }
            }
            parts.extend(witnesses.iter().map(|w| inst(w)));
            let some_witness = Formula::or(
                witnesses
                    .iter()
                    .map(|w| Formula::eq(Term::var(&y), Term::var(w)))
                    .collect(),
            );
            parts.push(Formula::forall(
                y.clone(),
                Formula::implies(inst(&y), some_witness),
            ));
            Formula::exists_many(&witnesses, Formula::and(parts))
        }
        _ => f.map_children(expand_counting),
    }
}

/// Replaces weak set quantifiers by strong ones relativized to `guard(X)`:
/// `∀_w X ψ ↦ ∀X(guard(X) → ψ)` and `∃_w X ψ ↦ ∃X(guard(X) ∧ ψ)`.
pub fn weak_to_strong_with_guard<G: Fn(&str) -> Formula>(f: &Formula, guard: &G) -> Formula {
    match f {
        Formula::SetForall(SetKind::Weak, x, body) => Formula::SetForall(
            SetKind::Strong,
            x.clone(),
            Box::new(Formula::implies(guard(x), weak_to_strong_with_guard(body, guard))),
        ),
        Formula::SetExists(SetKind::Weak, x, body) => Formula::SetExists(
            SetKind::Strong,
            x.clone(),
            Box::new(Formula::and(vec![guard(x), weak_to_strong_with_guard(body, guard)])),
        ),
        _ => f.map_children(|g| weak_to_strong_with_guard(g, guard)),
    }
}

/// Weak-to-strong translation over `(ℝⁿ, β)`-type structures, guarded by the
/// first-order finiteness sentence for the quantified set. `voc` is the
/// vocabulary the formula is read over; it must contain `Bet/3`.
pub fn weak_to_strong(f: &Formula, dim: usize, voc: &Vocabulary) -> Result<Formula, TransformError> {
    let bet = crate::defgen::BET;
    if voc.relations.get(bet) != Some(&3) {
        return Err(TransformError::MissingBetweenness(bet.to_string()));
    }
    let finiteness = crate::defgen::finiteness_sentence(dim)
        .map_err(|_| TransformError::InvalidDimension(dim))?;
    Ok(weak_to_strong_with_guard(f, &|x: &str| {
        finiteness.replace_relation(crate::defgen::P, &|ts: &[Term]| {
            Formula::SetMember(x.to_string(), ts[0].clone())
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folang::parse::parse;

    #[test]
    fn counting_examples() {
        assert_eq!(
            expand_counting(&parse("E=0 x. P(x)").unwrap()),
            parse("A x. ~P(x)").unwrap()
        );
        assert_eq!(
            expand_counting(&parse("E=1 x. P(x)").unwrap()),
            parse("E x. (P(x) & A y. (P(y) -> y = x))").unwrap()
        );
        let two = expand_counting(&parse("E=2 x. R(x,y)").unwrap());
        assert_eq!(
            two,
            parse("E x1. E x2. (~x1 = x2 & R(x1,y) & R(x2,y) & A y1. (R(y1,y) -> y1 = x1 | y1 = x2))")
                .unwrap()
        );
    }

    #[test]
    fn weak_to_strong_examples() {
        let mut voc = Vocabulary::default();
        voc.relations.insert("Bet".into(), 3);
        let plain = parse("E y. Bet(y,y,y)").unwrap();
        assert_eq!(weak_to_strong(&plain, 2, &voc).unwrap(), plain);

        let f = parse("ASW X. E y. ~X(y)").unwrap();
        let g = weak_to_strong_with_guard(&f, &|_| Formula::rel_vars("finite", &[]));
        assert_eq!(g.to_string(), "AS X. (finite() -> (E y. ~X(y)))");

        let full = weak_to_strong(&f, 2, &voc).unwrap();
        let Formula::SetForall(SetKind::Strong, _, body) = &full else { panic!() };
        let Formula::Implies(guard, _) = &**body else { panic!() };
        assert!(guard.free_vars().is_empty());
        assert!(guard.vocabulary().relations.keys().eq(["Bet"]));
        assert!(guard.free_set_vars().contains("X"));

        assert!(weak_to_strong(&f, 2, &Vocabulary::default()).is_err());
    }
}
