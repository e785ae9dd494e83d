//! The eight acceptance criteria, one PASS/FAIL line each. Runs without the
//! libtest harness so every line is printed and each criterion is timed
//! alone.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use betweenness::defgen::{self, Construct, GeneratedSentence, GeometryKind};
use betweenness::exactgeom::{self, Point, Rat, Simplex};
use betweenness::folang::{eval_sentence, parse, FiniteStructure, Formula};
use betweenness::frames::{
    extract_torus, geometric_relations, interpreted_relations, relevant_closure, synthesize_frame,
    validate_frame, FiniteCartesianFrame,
};
use betweenness::interp::{check_equivalence, translate, InterpretationScheme};
use betweenness::tiling::{
    build_grid, build_torus, cell_id, expand_with_labels, is_valid_tiling, recurrent_sentence,
    solve_torus, tiling_sentence, Labelling, TileSet, TileType, H, V,
};
use betweenness::verify::{
    frame_cases, random_formula, random_labelling, random_scheme, random_structure, random_tileset,
    rng, small_vocabulary, TestRng,
};

const SEED: u64 = 20_261_018;
const ROUNDTRIP_SIZES: usize = 4;
const ROUNDTRIP_PER_SIZE: usize = 100;
const ROUNDTRIP_BUDGET: Duration = Duration::from_secs(60);
const DUALPATH_SIZES: usize = 3;
const DUALPATH_BUDGET: Duration = Duration::from_secs(120);
const LEMMA_CASES: usize = 200;
const LEMMA_DEPTH: usize = 3;
const LEMMA_UNIVERSE: usize = 6;
const SENTENCE_CASES: usize = 500;
const GEOMETRY_CASES: usize = 1000;
const CORRUPTIONS: usize = 20;

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn from_failures(cases: usize, failures: &[String]) -> Outcome {
        match failures.first() {
            None => Outcome {
                ok: true,
                detail: format!("{cases} cases"),
            },
            Some(first) => Outcome {
                ok: false,
                detail: format!("{} of {cases} cases failed, first: {first}", failures.len()),
            },
        }
    }

    fn within(mut self, elapsed: Duration, budget: Duration) -> Outcome {
        if elapsed > budget {
            self.ok = false;
            self.detail = format!("{}; over budget {budget:?}", self.detail);
        }
        self
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("round trip", roundtrip),
        ("dual-path agreement", dualpath),
        ("interpretation lemma", lemma),
        ("reduction soundness", reduction),
        ("sentence/validator equivalence", sentence_validator),
        ("geometry oracles", geometry),
        ("corruption sensitivity", corruption),
        ("static generator health", generator_health),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let secs = start.elapsed().as_secs_f64();
        let verdict = if out.ok { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {} ({name}): {} [{secs:.1}s]", n + 1, out.detail);
        failed += usize::from(!out.ok);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------- tori

/// H and V of the m×k torus by cell id, computed from the definition.
fn torus_pairs(m: usize, k: usize) -> (BTreeSet<(String, String)>, BTreeSet<(String, String)>) {
    let mut h = BTreeSet::new();
    let mut v = BTreeSet::new();
    for j in 0..k {
        for i in 0..m {
            h.insert((cell_id(i, j), cell_id((i + 1) % m, j)));
            v.insert((cell_id(i, j), cell_id(i, (j + 1) % k)));
        }
    }
    (h, v)
}

fn named_pairs(s: &FiniteStructure, rel: &str) -> BTreeSet<(String, String)> {
    s.tuples(rel)
        .unwrap_or_default()
        .into_iter()
        .map(|t| (s.id(t[0]).to_string(), s.id(t[1]).to_string()))
        .collect()
}

/// Validity of a labelling on the m×n torus or grid, from the colour rules.
fn valid_by_rule(m: usize, n: usize, torus: bool, l: &Labelling, s: &TileSet) -> bool {
    if l.cells().iter().any(|t| !s.contains(t)) {
        return false;
    }
    for j in 0..n {
        for i in 0..m {
            let t = l.get(i, j);
            if (torus || i + 1 < m) && t.right != l.get((i + 1) % m, j).left {
                return false;
            }
            if (torus || j + 1 < n) && t.top != l.get(i, (j + 1) % n).bottom {
                return false;
            }
        }
    }
    true
}

fn all_labellings(m: usize, k: usize, s: &TileSet) -> Vec<Labelling> {
    let tiles = s.tiles();
    let total = tiles.len().pow((m * k) as u32);
    (0..total)
        .map(|mut code| {
            let cells = (0..m * k)
                .map(|_| {
                    let t = tiles[code % tiles.len()];
                    code /= tiles.len();
                    t
                })
                .collect();
            Labelling::new(m, k, cells).unwrap()
        })
        .collect()
}

/// First torus size, m-major up to 2×2, with a valid labelling.
fn brute_force_minimal(s: &TileSet, max: usize) -> Option<(usize, usize)> {
    for m in 1..=max {
        for k in 1..=max {
            if all_labellings(m, k, s).iter().any(|l| valid_by_rule(m, k, true, l, s)) {
                return Some((m, k));
            }
        }
    }
    None
}

// ---------------------------------------------------------------- 1, 2

fn roundtrip() -> Outcome {
    let start = Instant::now();
    let cases = frame_cases(None, ROUNDTRIP_SIZES, ROUNDTRIP_PER_SIZE, SEED);
    let mut failures = Vec::new();
    for (s, l) in &cases {
        let (m, k) = (l.m(), l.n());
        let result = synthesize_frame(m, k, l, s).and_then(|f| extract_torus(&f, s));
        let ok = match &result {
            Ok((torus, back)) => {
                let (h, v) = torus_pairs(m, k);
                let ids: Vec<String> =
                    (0..k).flat_map(|j| (0..m).map(move |i| cell_id(i, j))).collect();
                torus.ids() == ids.as_slice()
                    && named_pairs(torus, H) == h
                    && named_pairs(torus, V) == v
                    && back == l
            }
            Err(_) => false,
        };
        if !ok {
            failures.push(format!("{m}×{k} {:?} {:?}", l.cells(), result.err()));
        }
    }
    Outcome::from_failures(cases.len(), &failures).within(start.elapsed(), ROUNDTRIP_BUDGET)
}

fn dualpath() -> Outcome {
    let start = Instant::now();
    let cases: Vec<_> = frame_cases(None, ROUNDTRIP_SIZES, ROUNDTRIP_PER_SIZE, SEED)
        .into_iter()
        .filter(|(_, l)| l.m() <= DUALPATH_SIZES && l.n() <= DUALPATH_SIZES)
        .collect();
    let mut failures = Vec::new();
    for (s, l) in &cases {
        let (m, k) = (l.m(), l.n());
        let f = synthesize_frame(m, k, l, s).unwrap();
        let agree = relevant_closure(&f)
            .and_then(|c| interpreted_relations(&c, s))
            .and_then(|a| geometric_relations(&f, s).map(|b| a == b));
        if !matches!(agree, Ok(true)) {
            failures.push(format!("{m}×{k} {:?} {agree:?}", l.cells()));
        }
    }
    Outcome::from_failures(cases.len(), &failures).within(start.elapsed(), DUALPATH_BUDGET)
}

// ---------------------------------------------------------------- 3

/// Direct recursive evaluation, exponential and independent of the
/// library checker.
fn naive(s: &FiniteStructure, f: &Formula, env: &mut HashMap<String, usize>) -> bool {
    let bind = |x: &str, e: usize, g: &Formula, env: &mut HashMap<String, usize>| {
        let old = env.insert(x.to_string(), e);
        let r = naive(s, g, env);
        match old {
            Some(o) => env.insert(x.to_string(), o),
            None => env.remove(x),
        };
        r
    };
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Rel(r, args) => {
            let a: Vec<usize> = args.iter().map(|t| env[t.name()]).collect();
            s.holds(r, &a).expect("relation present")
        }
        Formula::Eq(a, b) => env[a.name()] == env[b.name()],
        Formula::Not(g) => !naive(s, g, env),
        Formula::And(gs) => gs.iter().all(|g| naive(s, g, env)),
        Formula::Or(gs) => gs.iter().any(|g| naive(s, g, env)),
        Formula::Implies(a, b) => !naive(s, a, env) || naive(s, b, env),
        Formula::Exists(x, g) => (0..s.size()).any(|e| bind(x, e, g, env)),
        Formula::Forall(x, g) => (0..s.size()).all(|e| bind(x, e, g, env)),
        Formula::CountExists(n, x, g) => (0..s.size()).filter(|&e| bind(x, e, g, env)).count() == *n,
        other => panic!("not first-order: {other}"),
    }
}

fn naive_induced(scheme: &InterpretationScheme, c: &FiniteStructure) -> FiniteStructure {
    let at = |vars: &[String], vals: &[usize]| -> HashMap<String, usize> {
        vars.iter().cloned().zip(vals.iter().copied()).collect()
    };
    let dom_var = [scheme.dom_var().to_string()];
    let dom: Vec<usize> = (0..c.size())
        .filter(|&e| naive(c, scheme.dom(), &mut at(&dom_var, &[e])))
        .collect();
    let mut out = FiniteStructure::new(dom.iter().map(|&e| c.id(e).to_string())).unwrap();
    for (name, (params, f)) in scheme.relations() {
        out.add_relation(name.clone(), params.len());
        let d = dom.len();
        for code in 0..d.pow(params.len() as u32) {
            let mut rest = code;
            let tuple: Vec<usize> = (0..params.len())
                .map(|_| {
                    let i = rest % d;
                    rest /= d;
                    i
                })
                .collect();
            let vals: Vec<usize> = tuple.iter().map(|&i| dom[i]).collect();
            if naive(c, f, &mut at(params, &vals)) {
                out.insert(name, tuple).unwrap();
            }
        }
    }
    out
}

fn lemma() -> Outcome {
    let mut r = rng(SEED ^ 3);
    let voc = small_vocabulary();
    let mut failures = Vec::new();
    for n in 0..LEMMA_CASES {
        let scheme = random_scheme(&mut r, 2);
        let phi = random_formula(&mut r, &voc, &[], LEMMA_DEPTH);
        let c = random_structure(&mut r, &voc, LEMMA_UNIVERSE);
        let translated = translate(&scheme, &phi).unwrap();
        let lhs = naive(&c, &translated, &mut HashMap::new());
        let induced = naive_induced(&scheme, &c);
        let rhs = naive(&induced, &phi, &mut HashMap::new());
        let library = check_equivalence(&scheme, &phi, &c).unwrap();
        let library_lhs = eval_sentence(&c, &translated).unwrap();
        if lhs != rhs || !library || library_lhs != lhs {
            failures.push(format!("case {n}: {phi} (naive {lhs}/{rhs}, library {library})"));
        }
    }
    Outcome::from_failures(LEMMA_CASES, &failures)
}

// ---------------------------------------------------------------- 4

fn tiles(ts: &[[u16; 4]]) -> TileSet {
    TileSet::new(ts.iter().map(|c| TileType::new(c[0], c[1], c[2], c[3])).collect()).unwrap()
}

/// Tile sets with the torus size (m-major, up to 2×2) each is expected to
/// tile first; the expectation is re-derived by brute force.
fn curated() -> Vec<(&'static str, TileSet, Option<(usize, usize)>)> {
    vec![
        ("uniform", tiles(&[[0, 0, 0, 0]]), Some((1, 1))),
        ("horizontal mismatch", tiles(&[[0, 0, 0, 1]]), None),
        ("vertical mismatch", tiles(&[[1, 0, 0, 0]]), None),
        ("horizontal period 2", tiles(&[[0, 0, 0, 1], [0, 1, 0, 0]]), Some((2, 1))),
        ("vertical period 2", tiles(&[[0, 0, 1, 0], [1, 0, 0, 0]]), Some((1, 2))),
        ("checkerboard", tiles(&[[0, 0, 1, 1], [1, 1, 0, 0]]), Some((2, 2))),
        ("two uniforms", tiles(&[[0, 0, 0, 0], [1, 1, 1, 1]]), Some((1, 1))),
        ("colour 2 pair", tiles(&[[0, 2, 0, 1], [0, 1, 0, 2]]), Some((2, 1))),
        ("period 3", tiles(&[[0, 1, 0, 0], [0, 2, 0, 1], [0, 0, 0, 2]]), None),
        ("mixed unsatisfiable", tiles(&[[0, 0, 0, 1], [1, 0, 0, 0]]), None),
        ("striped", tiles(&[[1, 0, 1, 0], [0, 1, 0, 1]]), Some((1, 1))),
        ("three colours", tiles(&[[2, 1, 2, 1], [1, 2, 0, 2], [0, 0, 2, 2]]), Some((1, 1))),
    ]
}

fn reduction() -> Outcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    for (name, s, expected) in curated() {
        let brute = brute_force_minimal(&s, 2);
        cases += 1;
        if brute != expected {
            failures.push(format!("{name}: brute force gives {brute:?}, expected {expected:?}"));
        }
        let gamma = defgen::reduction_sentence_torus(&s).unwrap();
        for (m, k) in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (1, 3)] {
            for l in all_labellings(m, k, &s).iter().filter(|_| s.len().pow((m * k) as u32) <= 81) {
                cases += 1;
                let valid = is_valid_tiling(&build_torus(m, k).unwrap(), &s, &l.by_id()).unwrap();
                let f = synthesize_frame(m, k, l, &s).unwrap();
                let c = relevant_closure(&f).unwrap();
                let sat = eval_sentence(&c.structure, &gamma).unwrap();
                if valid != sat || valid != valid_by_rule(m, k, true, l, &s) {
                    failures.push(format!("{name} {m}×{k} {:?}: valid {valid}, γ {sat}", l.cells()));
                }
            }
        }
    }
    // solve_torus against brute force on every tile set with |S| ≤ 2 and
    // colours ≤ 1
    let all: Vec<TileType> = (0..16u16)
        .map(|b| TileType::new(b & 1, b >> 1 & 1, b >> 2 & 1, b >> 3 & 1))
        .collect();
    let mut sets: Vec<TileSet> = all.iter().map(|&t| TileSet::new(vec![t]).unwrap()).collect();
    for a in 0..all.len() {
        for b in a + 1..all.len() {
            sets.push(TileSet::new(vec![all[a], all[b]]).unwrap());
        }
    }
    for s in &sets {
        cases += 1;
        let solved = solve_torus(s, 2, 2);
        let brute = brute_force_minimal(s, 2);
        let agrees = match (&solved, brute) {
            (None, None) => true,
            (Some((m, k, l)), Some(size)) => (*m, *k) == size && valid_by_rule(*m, *k, true, l, s),
            _ => false,
        };
        if !agrees {
            failures.push(format!("solve_torus {:?}: {solved:?} vs {brute:?}", s.tiles()));
        }
    }
    Outcome::from_failures(cases, &failures)
}

// ---------------------------------------------------------------- 5

fn sentence_validator() -> Outcome {
    let mut r = rng(SEED ^ 5);
    let mut failures = Vec::new();
    let mut valid_cases = 0;
    for n in 0..SENTENCE_CASES {
        let torus = n % 2 == 0;
        let (m, k) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let s = random_tileset(&mut r, 3, 2);
        let l = periodic_or_random(&mut r, m, k, &s);
        let structure = if torus { build_torus(m, k) } else { build_grid(m, k) }.unwrap();
        let labels = l.by_id();
        let expanded = expand_with_labels(&structure, &s, &labels).unwrap();
        let by_sentence = eval_sentence(&expanded, &tiling_sentence(&s)).unwrap();
        let by_validator = is_valid_tiling(&structure, &s, &labels).unwrap();
        let by_rule = valid_by_rule(m, k, torus, &l, &s);
        valid_cases += usize::from(by_rule);
        if by_sentence != by_validator || by_validator != by_rule {
            failures.push(format!("case {n} {m}×{k} torus={torus}: {by_sentence}/{by_validator}/{by_rule}"));
        }
    }
    let mut out = Outcome::from_failures(SENTENCE_CASES, &failures);
    out.detail = format!("{}, {valid_cases} valid", out.detail);
    out
}

/// Half the time, a periodic repetition of a small torus solution so that
/// valid labellings are well represented.
fn periodic_or_random(r: &mut TestRng, m: usize, k: usize, s: &TileSet) -> Labelling {
    if r.gen_bool(0.5) {
        if let Some((pm, pk, base)) = solve_torus(s, 2, 2) {
            let cells = (0..k)
                .flat_map(|j| (0..m).map(move |i| (i, j)))
                .map(|(i, j)| base.get(i % pm, j % pk))
                .collect();
            return Labelling::new(m, k, cells).unwrap();
        }
    }
    random_labelling(r, m, k, s)
}

// ---------------------------------------------------------------- 6

type Q = BigRational;

fn q(r: &Rat) -> Q {
    r.as_big().clone()
}

fn random_rat(r: &mut TestRng) -> Rat {
    Rat::new(r.gen_range(-4i64..=4), r.gen_range(1i64..=3))
}

fn random_point(r: &mut TestRng, dim: usize) -> Point {
    Point::new((0..dim).map(|_| random_rat(r)).collect())
}

fn vec_q(p: &Point) -> Vec<Q> {
    p.coords().iter().map(q).collect()
}

fn diff(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dotq(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn minors_vanish(a: &[Q], b: &[Q]) -> bool {
    (0..a.len()).all(|i| (i + 1..a.len()).all(|j| (&a[i] * &b[j] - &a[j] * &b[i]).is_zero()))
}

/// Rank by fraction-free (Bareiss) elimination on integer rows.
fn bareiss_rank(rows: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
            row.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(rank, p);
        for i in rank + 1..m.len() {
            for j in c + 1..cols {
                m[i][j] = (&m[rank][c] * &m[i][j] - &m[i][c] * &m[rank][j]) / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
    }
    rank
}

fn det(m: &[Vec<Q>]) -> Q {
    match m.len() {
        1 => m[0][0].clone(),
        n => (0..n)
            .map(|c| {
                let minor: Vec<Vec<Q>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = &m[0][c] * det(&minor);
                if c % 2 == 0 { term } else { -term }
            })
            .sum(),
    }
}

/// Barycentric coordinates of `z` in a full-dimensional simplex, by
/// Cramer's rule; all positive iff `z` is interior.
fn barycentric_inside(vs: &[Vec<Q>], z: &[Q]) -> bool {
    let cols: Vec<Vec<Q>> = vs[1..].iter().map(|v| diff(v, &vs[0])).collect();
    let rhs = diff(z, &vs[0]);
    let n = cols.len();
    let matrix = |replace: Option<usize>| -> Vec<Vec<Q>> {
        (0..n)
            .map(|row| (0..n).map(|c| if Some(c) == replace { rhs[row].clone() } else { cols[c][row].clone() }).collect())
            .collect()
    };
    let d = det(&matrix(None));
    let coords: Vec<Q> = (0..n).map(|c| det(&matrix(Some(c))) / &d).collect();
    let first = Q::one() - coords.iter().cloned().sum::<Q>();
    first.is_positive() && coords.iter().all(Signed::is_positive)
}

fn geometry() -> Outcome {
    let mut r = rng(SEED ^ 6);
    let mut failures = Vec::new();
    let mut cases = 0;

    for n in 0..GEOMETRY_CASES {
        cases += 1;
        let dim = r.gen_range(1..=3);
        let s = random_point(&mut r, dim);
        let u = if r.gen_bool(0.1) { s.clone() } else { random_point(&mut r, dim) };
        let t = match r.gen_range(0..3) {
            0 => random_point(&mut r, dim),
            1 => s.clone(),
            _ => s.lerp(&u, &Rat::new(r.gen_range(-3i64..=9), 6)),
        };
        let (sq, tq, uq) = (vec_q(&s), vec_q(&t), vec_q(&u));
        let (d1, d2) = (diff(&tq, &sq), diff(&uq, &sq));
        let expected = if s == u {
            t == s
        } else {
            let k = dotq(&d1, &d2);
            minors_vanish(&d1, &d2) && !k.is_negative() && k <= dotq(&d2, &d2)
        };
        if exactgeom::between(&s, &t, &u).unwrap() != expected {
            failures.push(format!("between case {n}: {s} {t} {u}"));
        }
    }

    for n in 0..GEOMETRY_CASES {
        cases += 1;
        let dim = r.gen_range(1..=3);
        let count = r.gen_range(1..=4);
        let mut pts: Vec<Point> = (0..count).map(|_| random_point(&mut r, dim)).collect();
        if count >= 3 && r.gen_bool(0.4) {
            let lam = random_rat(&mut r);
            pts[count - 1] = pts[0].lerp(&pts[1], &lam);
        }
        let rows: Vec<Vec<Q>> = pts[1..].iter().map(|p| diff(&vec_q(p), &vec_q(&pts[0]))).collect();
        let expected = bareiss_rank(&rows) == count - 1;
        if exactgeom::is_basis(&pts).unwrap() != expected {
            failures.push(format!("is_basis case {n}: {pts:?}"));
        }
    }

    let mut tested = 0;
    while tested < GEOMETRY_CASES {
        let dim = r.gen_range(2..=3);
        let vs: Vec<Point> = (0..=dim).map(|_| random_point(&mut r, dim)).collect();
        let simplex = Simplex::new(vs.clone()).unwrap();
        if !simplex.is_proper() {
            continue;
        }
        tested += 1;
        cases += 1;
        let z = match r.gen_range(0..4) {
            0 => random_point(&mut r, dim),
            1 => vs[0].lerp(&vs[1], &Rat::new(1, 2)),
            2 => vs[r.gen_range(0..=dim)].clone(),
            _ => {
                let inner = vs[0].lerp(&vs[1], &Rat::new(r.gen_range(1i64..=5), 6));
                vs[dim].lerp(&inner, &Rat::new(r.gen_range(1i64..=5), 6))
            }
        };
        let vq: Vec<Vec<Q>> = vs.iter().map(vec_q).collect();
        let expected = barycentric_inside(&vq, &vec_q(&z));
        let got = exactgeom::in_open_triangle(&simplex, &z).unwrap();
        if got != expected {
            failures.push(format!("in_open_triangle case {tested}: {vs:?} {z}"));
        }
    }

    for n in 0..GEOMETRY_CASES {
        cases += 1;
        let dim = r.gen_range(1..=3);
        let pts: Vec<Point> = (0..4).map(|_| random_point(&mut r, dim)).collect();
        let (a, b, c) = (&pts[0], &pts[1], &pts[2]);
        let d = if r.gen_bool(0.3) { a.lerp(b, &Rat::new(1, 2)) } else { pts[3].clone() };
        if a == b || c == &d {
            cases -= 1;
            continue;
        }
        let (u, v) = (diff(&vec_q(b), &vec_q(a)), diff(&vec_q(&d), &vec_q(c)));
        let w = diff(&vec_q(c), &vec_q(a));
        let meets = !minors_vanish(&u, &v) && (dim < 3 || det(&[u.clone(), v.clone(), w]).is_zero());
        match exactgeom::line_intersection(a, b, c, &d).unwrap() {
            Some(p) => {
                let pq = vec_q(&p);
                let on_ab = minors_vanish(&diff(&pq, &vec_q(a)), &u);
                let on_cd = minors_vanish(&diff(&pq, &vec_q(c)), &v);
                if !(meets && on_ab && on_cd) {
                    failures.push(format!("line_intersection case {n}: {p} off a line"));
                }
            }
            None if meets => failures.push(format!("line_intersection case {n}: missed a meet")),
            None => {}
        }
    }
    Outcome::from_failures(cases, &failures)
}

// ---------------------------------------------------------------- 7

/// Points strictly inside the diagonal of cell (i, j).
fn diagonal_points(f: &FiniteCartesianFrame, i: usize, j: usize) -> Vec<String> {
    let g = f.grid().unwrap();
    let (u, v) = (g.at(i, j), g.at(i + 1, j + 1));
    f.ids()
        .iter()
        .zip(f.points())
        .filter(|(_, p)| exactgeom::strictly_between(u, p, v).unwrap())
        .map(|(id, _)| id.clone())
        .collect()
}

/// Corruptions keep every other cell intact; a count change is chosen so
/// that the new count is not the index of any tile in S, since otherwise
/// the corrupted frame is a correct frame for another labelling.
fn corrupt(r: &mut TestRng, f: &FiniteCartesianFrame, s: &TileSet, kind: usize) -> Option<(String, FiniteCartesianFrame)> {
    let g = f.grid().unwrap();
    let (m, k) = (g.m, g.k);
    let indices = s.indices();
    let (i, j) = (r.gen_range(0..m), r.gen_range(0..k));
    let count = diagonal_points(f, i, j).len() as u128;
    match kind {
        0 => {
            let axis = if r.gen_bool(0.5) {
                format!("x{}", r.gen_range(1..=m))
            } else {
                format!("y{}", r.gen_range(1..=k))
            };
            Some((format!("delete {axis}"), f.without(&axis).unwrap()))
        }
        1 => {
            if indices.contains(&(count + 1)) {
                return None;
            }
            let (u, v) = (g.at(i, j).clone(), g.at(i + 1, j + 1).clone());
            // a point of the open diagonal that is not on the lattice of
            // existing label points
            let p = u.lerp(&v, &Rat::new(1, 2 * count as i64 + 3));
            Some((format!("stray point on ({i},{j})"), f.with_point("stray", p).ok()?))
        }
        _ => {
            if count == 0 || indices.contains(&(count - 1)) {
                return None;
            }
            let victim = diagonal_points(f, i, j).choose(r)?.clone();
            Some((format!("drop {victim} from ({i},{j})"), f.without(&victim).unwrap()))
        }
    }
}

fn corruption() -> Outcome {
    let mut r = rng(SEED ^ 7);
    let mut failures = Vec::new();
    let mut done = 0;
    let mut attempts = 0;
    while done < CORRUPTIONS && attempts < 100 * CORRUPTIONS {
        attempts += 1;
        let s = random_tileset(&mut r, 3, 2);
        let Some((m0, k0, base)) = solve_torus(&s, 2, 2) else { continue };
        let (m, k) = (m0 * r.gen_range(1..=2), k0);
        let cells = (0..k).flat_map(|j| (0..m).map(move |i| (i, j))).map(|(i, j)| base.get(i % m0, j)).collect();
        let l = Labelling::new(m, k, cells).unwrap();
        let f = synthesize_frame(m, k, &l, &s).unwrap();
        let gamma = defgen::reduction_sentence_torus(&s).unwrap();
        let before = eval_sentence(&relevant_closure(&f).unwrap().structure, &gamma).unwrap();
        let Some((what, bad)) = corrupt(&mut r, &f, &s, done % 3) else { continue };
        done += 1;
        let violations = validate_frame(&bad, &s);
        let after = eval_sentence(&relevant_closure(&bad).unwrap().structure, &gamma).unwrap();
        if !before || violations.is_empty() || after {
            failures.push(format!(
                "{what} in {m}×{k}: γ before {before}, after {after}, {} violations",
                violations.len()
            ));
        }
    }
    if done < CORRUPTIONS {
        failures.push(format!("only {done} corruptions generated"));
    }
    Outcome::from_failures(done, &failures)
}

// ---------------------------------------------------------------- 8

fn check_generated(g: &GeneratedSentence) -> Result<(), String> {
    let text = g.formula.to_string();
    let back = parse(&text).map_err(|e| e.to_string())?.bind_constants(&g.vocabulary.constants);
    if back != g.formula || back.to_string() != text {
        return Err(format!("{:?} does not reprint identically", g.construct));
    }
    if !g.formula.vocabulary().is_subset(&g.vocabulary) {
        return Err(format!("{:?} leaves its vocabulary", g.construct));
    }
    let free: BTreeSet<String> = g.free.iter().cloned().collect();
    if g.formula.free_vars() != free {
        return Err(format!("{:?} has free variables {:?}", g.construct, g.formula.free_vars()));
    }
    Ok(())
}

fn check_plain(name: &str, f: &Formula, voc: &betweenness::folang::Vocabulary) -> Result<(), String> {
    let text = f.to_string();
    let back = parse(&text).map_err(|e| format!("{name}: {e}"))?;
    if &back != f || back.to_string() != text {
        return Err(format!("{name} does not reprint identically"));
    }
    if !f.vocabulary().is_subset(voc) || !f.free_vars().is_empty() {
        return Err(format!("{name} has the wrong vocabulary or free variables"));
    }
    Ok(())
}

fn check_scheme(name: &str, scheme: &InterpretationScheme) -> Result<(), String> {
    let text = scheme.to_text();
    let back = InterpretationScheme::from_text(&text).map_err(|e| format!("{name}: {e}"))?;
    if back.to_text() != text || back.dom() != scheme.dom() || back.relations() != scheme.relations() {
        return Err(format!("{name} does not reprint identically"));
    }
    Ok(())
}

fn generator_health() -> Outcome {
    let mut r = rng(SEED ^ 8);
    let mut constructs = vec![Construct::Omega];
    for k in 0..=5 {
        for kind in [GeometryKind::Collinear, GeometryKind::Parallel, GeometryKind::Basis, GeometryKind::Flat] {
            constructs.push(Construct::Geometry(kind, k));
        }
        if k >= 1 {
            constructs.push(Construct::Geometry(GeometryKind::OpenTriangle, k));
        }
    }
    for n in 1..=3 {
        constructs.push(Construct::Sepr(n));
        constructs.push(Construct::Finiteness(n));
    }
    let mut sets = Vec::new();
    for size in 1..=4 {
        for _ in 0..2 {
            sets.push(random_tileset(&mut r, size, 2));
        }
    }
    for s in &sets {
        constructs.push(Construct::FrameInfinite(s.clone()));
        constructs.push(Construct::FrameFinite(s.clone()));
        constructs.push(Construct::PsiS(s.clone()));
        constructs.push(Construct::GammaS(s.clone()));
    }
    let mut failures = Vec::new();
    let mut cases = 0;
    for c in constructs {
        cases += 1;
        let outcome = GeneratedSentence::generate(c.clone())
            .map_err(|e| e.to_string())
            .and_then(|g| check_generated(&g));
        if let Err(e) = outcome {
            failures.push(e);
        }
    }
    for s in &sets {
        let grid = defgen::grid_vocabulary(s);
        let rec = defgen::recurrence_vocabulary(s);
        let checks = [
            check_plain("tiling_sentence", &tiling_sentence(s), &grid),
            check_plain("recurrent_sentence", &recurrent_sentence(&s.tiles()[0], s).unwrap(), &rec),
            check_scheme("scheme_grid", &defgen::scheme_grid(s).unwrap()),
            check_scheme("scheme_torus", &defgen::scheme_torus(s).unwrap()),
            check_scheme("scheme_recurrence", &defgen::scheme_recurrence(s).unwrap()),
        ];
        for c in checks {
            cases += 1;
            if let Err(e) = c {
                failures.push(e);
            }
        }
    }
    Outcome::from_failures(cases, &failures)
}
