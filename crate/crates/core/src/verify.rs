//! Seeded random instances and the property suites behind `verify`.
//! Everything here is deterministic in the seed.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::folang::{FiniteStructure, Formula, Term, Vocabulary};
use crate::frames::{
    extract_torus, geometric_relations, interpreted_relations, relevant_closure, synthesize_frame,
};
use crate::interp::{check_equivalence, InterpretationScheme};
use crate::tiling::{build_torus, Color, Labelling, TileSet, TileType, H, V};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Outcome of one suite. `failures` describes each failing case.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SuiteReport {
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.cases > 0
    }

    fn record(&mut self, ok: Result<bool, String>, what: impl FnOnce() -> String) {
        self.cases += 1;
        match ok {
            Ok(true) => {}
            Ok(false) => self.failures.push(what()),
            Err(e) => self.failures.push(format!("{}: {e}", what())),
        }
    }
}

pub fn random_tile(rng: &mut TestRng, max_color: Color) -> TileType {
    let mut c = || rng.gen_range(0..=max_color);
    TileType::new(c(), c(), c(), c())
}

/// `1..=max_size` distinct tiles, fewer only if the colours run out.
pub fn random_tileset(rng: &mut TestRng, max_size: usize, max_color: Color) -> TileSet {
    let available = (max_color as usize + 1).pow(4);
    let size = rng.gen_range(1..=max_size.min(available));
    let mut tiles = Vec::with_capacity(size);
    while tiles.len() < size {
        let t = random_tile(rng, max_color);
        if !tiles.contains(&t) {
            tiles.push(t);
        }
    }
    TileSet::new(tiles).expect("distinct tiles")
}

pub fn random_labelling(rng: &mut TestRng, m: usize, k: usize, s: &TileSet) -> Labelling {
    let cells = (0..m * k)
        .map(|_| *s.tiles().choose(rng).expect("nonempty tile set"))
        .collect();
    Labelling::new(m, k, cells).expect("positive size")
}

/// A formula over `voc` whose free variables are among `vars`, with
/// connective/quantifier nesting at most `depth`. Bound variables are
/// `v0, v1, …` and never clash with `vars` named otherwise.
pub fn random_formula(rng: &mut TestRng, voc: &Vocabulary, vars: &[String], depth: usize) -> Formula {
    if depth == 0 || (vars.is_empty() && rng.gen_bool(0.1)) {
        return random_atom(rng, voc, vars);
    }
    let fresh = format!("v{}", vars.len());
    let mut inner = vars.to_vec();
    inner.push(fresh.clone());
    let sub = |rng: &mut TestRng, vs: &[String]| random_formula(rng, voc, vs, depth - 1);
    let choice = if vars.is_empty() { rng.gen_range(4..7) } else { rng.gen_range(0..7) };
    match choice {
        0 => Formula::not(sub(rng, vars)),
        1 => Formula::and(vec![sub(rng, vars), sub(rng, vars)]),
        2 => Formula::or(vec![sub(rng, vars), sub(rng, vars)]),
        3 => Formula::implies(sub(rng, vars), sub(rng, vars)),
        4 => Formula::exists(fresh, sub(rng, &inner)),
        5 => Formula::forall(fresh, sub(rng, &inner)),
        _ => Formula::count_exists(rng.gen_range(0..3), fresh, sub(rng, &inner)),
    }
}

fn random_atom(rng: &mut TestRng, voc: &Vocabulary, vars: &[String]) -> Formula {
    if vars.is_empty() {
        return if rng.gen_bool(0.5) { Formula::True } else { Formula::False };
    }
    let pick = |rng: &mut TestRng| Term::var(vars.choose(rng).expect("nonempty").clone());
    let rels: Vec<(&String, &usize)> = voc.relations.iter().collect();
    if rels.is_empty() || rng.gen_bool(0.2) {
        let (a, b) = (pick(rng), pick(rng));
        return Formula::eq(a, b);
    }
    let (name, &arity) = *rels.choose(rng).expect("nonempty");
    Formula::rel(name.clone(), (0..arity).map(|_| pick(rng)).collect())
}

/// `1..=max_size` elements, each tuple of each relation present with
/// probability 1/2.
pub fn random_structure(rng: &mut TestRng, voc: &Vocabulary, max_size: usize) -> FiniteStructure {
    let n = rng.gen_range(1..=max_size);
    let mut s = FiniteStructure::new((0..n).map(|i| format!("e{i}"))).expect("distinct ids");
    for (name, &arity) in &voc.relations {
        s.add_relation(name.clone(), arity);
        let total = n.pow(arity as u32);
        for code in 0..total {
            if rng.gen_bool(0.5) {
                let mut rest = code;
                let tuple = (0..arity)
                    .map(|_| {
                        let e = rest % n;
                        rest /= n;
                        e
                    })
                    .collect();
                s.insert(name, tuple).expect("in range");
            }
        }
    }
    s
}

/// The vocabulary `{R/2, Q/1}` used by the random interpretation suite.
pub fn small_vocabulary() -> Vocabulary {
    Vocabulary::new(&[("R", 2), ("Q", 1)], &[])
}

/// A scheme from [`small_vocabulary`] to itself with random defining
/// formulas of depth at most `depth`.
pub fn random_scheme(rng: &mut TestRng, depth: usize) -> InterpretationScheme {
    let voc = small_vocabulary();
    let x = vec!["x".to_string()];
    let dom = random_formula(rng, &voc, &x, depth);
    let relations: BTreeMap<String, (Vec<String>, Formula)> = voc
        .relations
        .iter()
        .map(|(r, &a)| {
            let params: Vec<String> = (0..a).map(|i| format!("x{i}")).collect();
            let f = random_formula(rng, &voc, &params, depth);
            (r.clone(), (params, f))
        })
        .collect();
    InterpretationScheme::new(voc.clone(), voc, "x", dom, relations).expect("well formed")
}

fn same_torus(a: &FiniteStructure, b: &FiniteStructure) -> bool {
    a.ids() == b.ids() && a.tuples(H) == b.tuples(H) && a.tuples(V) == b.tuples(V)
}

/// Frame instances: for each `m, k ≤ max`, `per_size` random labellings
/// over `tiles` or, when absent, over a fresh random tile set with
/// `|S| ≤ 3` and colours ≤ 2.
pub fn frame_cases(
    tiles: Option<&TileSet>,
    max: usize,
    per_size: usize,
    seed: u64,
) -> Vec<(TileSet, Labelling)> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    for m in 1..=max {
        for k in 1..=max {
            for _ in 0..per_size {
                let s = match tiles {
                    Some(s) => s.clone(),
                    None => random_tileset(&mut r, 3, 2),
                };
                let l = random_labelling(&mut r, m, k, &s);
                out.push((s, l));
            }
        }
    }
    out
}

/// extract_torus ∘ synthesize_frame is the identity.
pub fn roundtrip(cases: &[(TileSet, Labelling)]) -> SuiteReport {
    let mut report = SuiteReport::default();
    for (s, l) in cases {
        let (m, k) = (l.m(), l.n());
        let ok = (|| {
            let f = synthesize_frame(m, k, l, s).map_err(|e| e.to_string())?;
            let (torus, back) = extract_torus(&f, s).map_err(|e| e.to_string())?;
            let expected = build_torus(m, k).map_err(|e| e.to_string())?;
            Ok(same_torus(&torus, &expected) && &back == l)
        })();
        report.record(ok, || format!("roundtrip {m}×{k} {:?}", l.cells()));
    }
    report
}

/// The scheme's relations on the closure equal the geometric reading.
pub fn dualpath(cases: &[(TileSet, Labelling)]) -> SuiteReport {
    let mut report = SuiteReport::default();
    for (s, l) in cases {
        let (m, k) = (l.m(), l.n());
        let ok = (|| {
            let f = synthesize_frame(m, k, l, s).map_err(|e| e.to_string())?;
            let c = relevant_closure(&f).map_err(|e| e.to_string())?;
            let a = interpreted_relations(&c, s).map_err(|e| e.to_string())?;
            let b = geometric_relations(&f, s).map_err(|e| e.to_string())?;
            Ok(a == b)
        })();
        report.record(ok, || format!("dualpath {m}×{k} {:?}", l.cells()));
    }
    report
}

/// `C ⊨ I(φ) ⇔ induced(C) ⊨ φ` on random schemes, sentences of depth
/// at most `depth` and structures of at most `max_size` elements.
pub fn lemma1(cases: usize, depth: usize, max_size: usize, seed: u64) -> SuiteReport {
    let mut r = rng(seed);
    let voc = small_vocabulary();
    let mut report = SuiteReport::default();
    for n in 0..cases {
        let scheme = random_scheme(&mut r, depth.min(2));
        let phi = random_formula(&mut r, &voc, &[], depth);
        let c = random_structure(&mut r, &voc, max_size);
        let ok = check_equivalence(&scheme, &phi, &c).map_err(|e| e.to_string());
        report.record(ok, || format!("lemma1 case {n}: {phi}"));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let a = frame_cases(None, 2, 3, 7);
        let b = frame_cases(None, 2, 3, 7);
        assert_eq!(a.len(), 12);
        assert!(a.iter().zip(&b).all(|(x, y)| x.0 == y.0 && x.1 == y.1));
        let voc = small_vocabulary();
        let f = random_formula(&mut rng(1), &voc, &[], 3);
        assert_eq!(f, random_formula(&mut rng(1), &voc, &[], 3));
        assert!(f.free_vars().is_empty());
    }

    #[test]
    fn random_tilesets_respect_bounds() {
        let mut r = rng(3);
        for _ in 0..50 {
            let s = random_tileset(&mut r, 3, 2);
            assert!((1..=3).contains(&s.len()));
            assert!(s.tiles().iter().all(|t| t.colors().iter().all(|&c| c <= 2)));
        }
        assert_eq!(random_tileset(&mut r, 5, 0).len(), 1);
    }

    #[test]
    fn small_suites_pass() {
        let cases = frame_cases(None, 2, 2, 11);
        assert!(roundtrip(&cases).passed());
        assert!(dualpath(&cases).passed());
        assert!(lemma1(30, 3, 4, 5).passed());
    }
}
