//! Tile types, their canonical numbering, grids and tori, tiling validity,
//! a bounded periodic-tiling search, and the first-order tiling sentences.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::folang::{FiniteStructure, Formula, Term};

pub type Color = u16;

pub const H: &str = "H";
pub const V: &str = "V";
pub const R: &str = "R";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TilingError {
    #[error("tile set is empty")]
    EmptyTileSet,
    #[error("tile {0} appears twice in the tile set")]
    DuplicateTile(TileType),
    #[error("tile indices start at 1")]
    ZeroIndex,
    #[error("grid dimensions must be at least 1, got {m}x{n}")]
    BadSize { m: usize, n: usize },
    #[error("element `{0}` has no label")]
    Unlabelled(String),
    #[error("tile {0} is not in the tile set")]
    NotInSet(TileType),
    #[error("tile position {0} is out of range")]
    BadPosition(usize),
    #[error("labelling has {found} cells, expected {expected}")]
    CellCount { expected: usize, found: usize },
    #[error("malformed file: {0}")]
    Format(String),
}

/// Colours `(top, right, bottom, left)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[Color; 4]", into = "[Color; 4]")]
pub struct TileType {
    pub top: Color,
    pub right: Color,
    pub bottom: Color,
    pub left: Color,
}

impl From<[Color; 4]> for TileType {
    fn from(c: [Color; 4]) -> Self {
        TileType::new(c[0], c[1], c[2], c[3])
    }
}

impl From<TileType> for [Color; 4] {
    fn from(t: TileType) -> Self {
        t.colors()
    }
}

impl std::fmt::Display for TileType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{},{})", self.top, self.right, self.bottom, self.left)
    }
}

impl TileType {
    pub const fn new(top: Color, right: Color, bottom: Color, left: Color) -> Self {
        TileType { top, right, bottom, left }
    }

    pub fn colors(&self) -> [Color; 4] {
        [self.top, self.right, self.bottom, self.left]
    }

    /// The unary predicate symbol `P_t0_t1_t2_t3`.
    pub fn predicate(&self) -> String {
        format!("P_{}_{}_{}_{}", self.top, self.right, self.bottom, self.left)
    }

    pub fn atom(&self, x: Term) -> Formula {
        Formula::rel(self.predicate(), vec![x])
    }
}

/// Strict lexicographic order on `(top, right, bottom, left)`.
pub fn lex_less(s: &TileType, t: &TileType) -> bool {
    s.colors() < t.colors()
}

/// Number of `k`-tuples of naturals with sum `r`.
fn compositions(r: u128, k: u32) -> u128 {
    if k == 0 {
        return u128::from(r == 0);
    }
    binom(r + u128::from(k) - 1, u128::from(k) - 1)
}

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Position of `t` in the graded-lexicographic enumeration of ℕ⁴ (by colour
/// sum, ties broken lexicographically), starting at 1. A bijection onto the
/// positive integers.
pub fn tile_index(t: &TileType) -> u128 {
    let c = t.colors().map(u128::from);
    let sum: u128 = c.iter().sum();
    let mut rank = 0u128;
    let mut rest = sum;
    for (i, &ci) in c.iter().enumerate() {
        let k = 3 - i as u32;
        for v in 0..ci {
            rank += compositions(rest - v, k);
        }
        rest -= ci;
    }
    // tuples with a smaller sum: C(sum + 3, 4)
    binom(sum + 3, 4) + rank + 1
}

/// Inverse of [`tile_index`].
pub fn tile_unindex(index: u128) -> Result<TileType, TilingError> {
    if index == 0 {
        return Err(TilingError::ZeroIndex);
    }
    let mut pos = index - 1;
    let mut sum = 0u128;
    while binom(sum + 4, 4) <= pos {
        sum += 1;
    }
    pos -= binom(sum + 3, 4);
    let mut c = [0u128; 4];
    let mut rest = sum;
    for (i, ci) in c.iter_mut().enumerate() {
        let k = 3 - i as u32;
        let mut v = 0;
        loop {
            let block = compositions(rest - v, k);
            if pos < block {
                break;
            }
            pos -= block;
            v += 1;
        }
        *ci = v;
        rest -= v;
    }
    let col = |x: u128| Color::try_from(x).map_err(|_| TilingError::Format(format!("colour {x} too large")));
    Ok(TileType::new(col(c[0])?, col(c[1])?, col(c[2])?, col(c[3])?))
}

/// A nonempty list of distinct tile types. List positions are what labelling
/// files refer to; [`TileSet::canonical`] orders by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileSet {
    tiles: Vec<TileType>,
}

#[derive(Serialize, Deserialize)]
struct TileSetFile {
    tiles: Vec<TileType>,
}

impl TileSet {
    pub fn new(tiles: Vec<TileType>) -> Result<Self, TilingError> {
        if tiles.is_empty() {
            return Err(TilingError::EmptyTileSet);
        }
        let mut seen = BTreeSet::new();
        for t in &tiles {
            if !seen.insert(t.colors()) {
                return Err(TilingError::DuplicateTile(*t));
            }
        }
        Ok(TileSet { tiles })
    }

    pub fn tiles(&self) -> &[TileType] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn contains(&self, t: &TileType) -> bool {
        self.tiles.contains(t)
    }

    pub fn position(&self, t: &TileType) -> Option<usize> {
        self.tiles.iter().position(|s| s == t)
    }

    /// Tiles sorted by canonical index.
    pub fn canonical(&self) -> Vec<TileType> {
        let mut v = self.tiles.clone();
        v.sort_by_key(tile_index);
        v
    }

    /// Canonical indices of the tiles.
    pub fn indices(&self) -> BTreeSet<u128> {
        self.tiles.iter().map(tile_index).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TileSetFile {
            tiles: self.tiles.clone(),
        })
        .expect("tile sets always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, TilingError> {
        let f: TileSetFile = serde_json::from_str(text).map_err(|e| TilingError::Format(e.to_string()))?;
        TileSet::new(f.tiles)
    }
}

/// An assignment of tiles to the cells `(i, j)`, `i < m`, `j < n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labelling {
    m: usize,
    n: usize,
    cells: Vec<TileType>,
}

#[derive(Serialize, Deserialize)]
struct LabellingFile {
    m: usize,
    n: usize,
    cells: BTreeMap<String, usize>,
}

impl Labelling {
    /// `cells` in row-major order: `(0,0), (1,0), …, (m-1,0), (0,1), …`.
    pub fn new(m: usize, n: usize, cells: Vec<TileType>) -> Result<Self, TilingError> {
        if m == 0 || n == 0 {
            return Err(TilingError::BadSize { m, n });
        }
        if cells.len() != m * n {
            return Err(TilingError::CellCount {
                expected: m * n,
                found: cells.len(),
            });
        }
        Ok(Labelling { m, n, cells })
    }

    pub fn uniform(m: usize, n: usize, t: TileType) -> Result<Self, TilingError> {
        Labelling::new(m, n, vec![t; m * n])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> TileType {
        self.cells[j * self.m + i]
    }

    pub fn set(&mut self, i: usize, j: usize, t: TileType) {
        self.cells[j * self.m + i] = t;
    }

    pub fn cells(&self) -> &[TileType] {
        &self.cells
    }

    /// Labels keyed by cell id `"i,j"`.
    pub fn by_id(&self) -> BTreeMap<String, TileType> {
        (0..self.n)
            .flat_map(|j| (0..self.m).map(move |i| (i, j)))
            .map(|(i, j)| (cell_id(i, j), self.get(i, j)))
            .collect()
    }

    pub fn to_json(&self, s: &TileSet) -> Result<String, TilingError> {
        let mut cells = BTreeMap::new();
        for (id, t) in self.by_id() {
            cells.insert(id, s.position(&t).ok_or(TilingError::NotInSet(t))?);
        }
        Ok(serde_json::to_string_pretty(&LabellingFile {
            m: self.m,
            n: self.n,
            cells,
        })
        .expect("labellings always serialize"))
    }

    pub fn from_json(text: &str, s: &TileSet) -> Result<Self, TilingError> {
        let f: LabellingFile = serde_json::from_str(text).map_err(|e| TilingError::Format(e.to_string()))?;
        let mut cells = Vec::with_capacity(f.m * f.n);
        for j in 0..f.n {
            for i in 0..f.m {
                let id = cell_id(i, j);
                let pos = *f.cells.get(&id).ok_or(TilingError::Unlabelled(id))?;
                cells.push(*s.tiles().get(pos).ok_or(TilingError::BadPosition(pos))?);
            }
        }
        if f.cells.len() != f.m * f.n {
            return Err(TilingError::CellCount {
                expected: f.m * f.n,
                found: f.cells.len(),
            });
        }
        Labelling::new(f.m, f.n, cells)
    }
}

pub fn cell_id(i: usize, j: usize) -> String {
    format!("{i},{j}")
}

fn cells_structure(m: usize, n: usize) -> Result<FiniteStructure, TilingError> {
    if m == 0 || n == 0 {
        return Err(TilingError::BadSize { m, n });
    }
    let ids = (0..n).flat_map(|j| (0..m).map(move |i| cell_id(i, j)));
    let mut s = FiniteStructure::new(ids).expect("cell ids are distinct");
    s.add_relation(H, 2);
    s.add_relation(V, 2);
    Ok(s)
}

/// The `m×n` truncation of the grid: successors without wraparound.
pub fn build_grid(m: usize, n: usize) -> Result<FiniteStructure, TilingError> {
    let mut s = cells_structure(m, n)?;
    let at = |i: usize, j: usize| j * m + i;
    for j in 0..n {
        for i in 0..m {
            if i + 1 < m {
                s.insert(H, vec![at(i, j), at(i + 1, j)]).unwrap();
            }
            if j + 1 < n {
                s.insert(V, vec![at(i, j), at(i, j + 1)]).unwrap();
            }
        }
    }
    Ok(s)
}

/// The `m×n` torus: `H((i,j),(i+1 mod m, j))`, `V((i,j),(i, j+1 mod n))`.
pub fn build_torus(m: usize, n: usize) -> Result<FiniteStructure, TilingError> {
    let mut s = cells_structure(m, n)?;
    let at = |i: usize, j: usize| j * m + i;
    for j in 0..n {
        for i in 0..m {
            s.insert(H, vec![at(i, j), at((i + 1) % m, j)]).unwrap();
            s.insert(V, vec![at(i, j), at(i, (j + 1) % n)]).unwrap();
        }
    }
    Ok(s)
}

/// Every `H`-pair matches right to left and every `V`-pair top to bottom,
/// and every label is in `s`. Labels are keyed by element id.
pub fn is_valid_tiling(
    m: &FiniteStructure,
    s: &TileSet,
    labels: &BTreeMap<String, TileType>,
) -> Result<bool, TilingError> {
    let mut lab = Vec::with_capacity(m.size());
    for id in m.ids() {
        lab.push(*labels.get(id).ok_or_else(|| TilingError::Unlabelled(id.clone()))?);
    }
    if lab.iter().any(|t| !s.contains(t)) {
        return Ok(false);
    }
    let pairs = |rel: &str| m.tuples(rel).unwrap_or_default();
    let h_ok = pairs(H).iter().all(|p| lab[p[0]].right == lab[p[1]].left);
    let v_ok = pairs(V).iter().all(|p| lab[p[0]].top == lab[p[1]].bottom);
    Ok(h_ok && v_ok)
}

/// `m` with each tile predicate of `s` added as a unary table from `labels`.
pub fn expand_with_labels(
    m: &FiniteStructure,
    s: &TileSet,
    labels: &BTreeMap<String, TileType>,
) -> Result<FiniteStructure, TilingError> {
    let mut out = m.clone();
    for t in s.tiles() {
        out.add_relation(t.predicate(), 1);
    }
    for (e, id) in m.ids().iter().enumerate() {
        let t = labels.get(id).ok_or_else(|| TilingError::Unlabelled(id.clone()))?;
        if s.contains(t) {
            out.insert(&t.predicate(), vec![e]).unwrap();
        }
    }
    Ok(out)
}

/// Smallest torus `(m, k)`, trying `m` first and then `k`, that `s` tiles,
/// with the lexicographically least labelling (cells row-major, tiles by
/// canonical index).
pub fn solve_torus(s: &TileSet, max_m: usize, max_k: usize) -> Option<(usize, usize, Labelling)> {
    let tiles = s.canonical();
    for m in 1..=max_m {
        for k in 1..=max_k {
            let mut cells: Vec<Option<TileType>> = vec![None; m * k];
            if fill(&tiles, m, k, 0, &mut cells) {
                let cells = cells.into_iter().map(Option::unwrap).collect();
                return Some((m, k, Labelling::new(m, k, cells).unwrap()));
            }
        }
    }
    None
}

fn fill(tiles: &[TileType], m: usize, k: usize, pos: usize, cells: &mut [Option<TileType>]) -> bool {
    if pos == m * k {
        return true;
    }
    let (i, j) = (pos % m, pos / m);
    for &t in tiles {
        cells[pos] = Some(t);
        if fits(m, k, i, j, cells) && fill(tiles, m, k, pos + 1, cells) {
            return true;
        }
    }
    cells[pos] = None;
    false
}

/// Constraints between `(i,j)` and already placed neighbours, including the
/// wraparound pairs that close a row or a column.
fn fits(m: usize, k: usize, i: usize, j: usize, cells: &[Option<TileType>]) -> bool {
    let at = |i: usize, j: usize| cells[j * m + i].unwrap();
    let t = at(i, j);
    if i > 0 && at(i - 1, j).right != t.left {
        return false;
    }
    if i == m - 1 && t.right != at(0, j).left {
        return false;
    }
    if j > 0 && at(i, j - 1).top != t.bottom {
        return false;
    }
    if j == k - 1 && t.top != at(i, 0).bottom {
        return false;
    }
    true
}

fn v(name: &str) -> Term {
    Term::var(name)
}

/// `x` carries exactly one tile of `s`.
fn exactly_one(s: &TileSet, x: &str) -> Formula {
    let tiles = s.canonical();
    let mut parts = vec![Formula::or(tiles.iter().map(|t| t.atom(v(x))).collect())];
    for (a, ta) in tiles.iter().enumerate() {
        for tb in &tiles[a + 1..] {
            parts.push(Formula::not(Formula::and(vec![ta.atom(v(x)), tb.atom(v(x))])));
        }
    }
    Formula::and(parts)
}

/// `∀x∀y(rel(x,y) → ⋀_t (P_t(x) → ⋁_{t' matching} P_t'(y)))`.
fn matching(s: &TileSet, rel: &str, ok: impl Fn(&TileType, &TileType) -> bool) -> Formula {
    let tiles = s.canonical();
    let per_tile = tiles
        .iter()
        .map(|t| {
            let partners = tiles
                .iter()
                .filter(|u| ok(t, u))
                .map(|u| u.atom(v("y")))
                .collect();
            Formula::implies(t.atom(v("x")), Formula::or(partners))
        })
        .collect();
    Formula::forall_many(
        &["x", "y"],
        Formula::implies(Formula::rel_vars(rel, &["x", "y"]), Formula::and(per_tile)),
    )
}

/// φ_S over `{H, V} ∪ {P_t | t ∈ S}`: exactly one tile per point, and
/// colours match along `H` (right = left) and `V` (top = bottom).
pub fn tiling_sentence(s: &TileSet) -> Formula {
    Formula::and(vec![
        Formula::forall("x", exactly_one(s, "x")),
        matching(s, H, |a, b| a.right == b.left),
        matching(s, V, |a, b| a.top == b.bottom),
    ])
}

/// Every point with an `R`-neighbour has a strictly `R`-later point
/// labelled `t`.
pub fn recurrence_conjunct(t: &TileType) -> Formula {
    let linked = Formula::exists(
        "y",
        Formula::or(vec![
            Formula::rel_vars(R, &["x", "y"]),
            Formula::rel_vars(R, &["y", "x"]),
        ]),
    );
    let later = Formula::exists(
        "y",
        Formula::and(vec![Formula::rel_vars(R, &["x", "y"]), t.atom(v("y"))]),
    );
    Formula::forall("x", Formula::implies(linked, later))
}

/// φ_(t,S) over `{H, V, R} ∪ {P_t | t ∈ S}`.
pub fn recurrent_sentence(t: &TileType, s: &TileSet) -> Result<Formula, TilingError> {
    if !s.contains(t) {
        return Err(TilingError::NotInSet(*t));
    }
    Ok(Formula::and(vec![tiling_sentence(s), recurrence_conjunct(t)]))
}

impl PartialOrd for TileType {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TileType {
    fn cmp(&self, other: &Self) -> Ordering {
        self.colors().cmp(&other.colors())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folang::eval_sentence;
    use proptest::prelude::*;

    const fn t(a: Color, b: Color, c: Color, d: Color) -> TileType {
        TileType::new(a, b, c, d)
    }

    /// Graded-lex enumeration by brute force: all tuples with colours ≤ `max`
    /// sorted by (sum, lex).
    fn enumeration(max: Color) -> Vec<TileType> {
        let mut all = Vec::new();
        for a in 0..=max {
            for b in 0..=max {
                for c in 0..=max {
                    for d in 0..=max {
                        all.push(t(a, b, c, d));
                    }
                }
            }
        }
        all.sort_by_key(|x| (x.colors().iter().map(|&c| c as u32).sum::<u32>(), x.colors()));
        all
    }

    #[test]
    fn lex_examples() {
        assert!(lex_less(&t(0, 0, 0, 0), &t(0, 0, 0, 1)));
        assert!(lex_less(&t(0, 9, 9, 9), &t(1, 0, 0, 0)));
        assert!(!lex_less(&t(3, 1, 4, 1), &t(3, 1, 4, 1)));
    }

    #[test]
    fn index_examples() {
        assert_eq!(tile_index(&t(0, 0, 0, 0)), 1);
        assert_eq!(tile_index(&t(0, 0, 0, 1)), 2);
        assert_eq!(tile_index(&t(1, 0, 0, 0)), 5);
        assert_eq!(tile_unindex(0), Err(TilingError::ZeroIndex));
    }

    #[test]
    fn index_matches_enumeration_oracle() {
        // every tuple with sum ≤ 6 has colours ≤ 6, so the prefix of the
        // sorted enumeration up to sum 6 is complete
        let all = enumeration(6);
        let complete: Vec<_> = all
            .iter()
            .filter(|x| x.colors().iter().map(|&c| c as u32).sum::<u32>() <= 6)
            .collect();
        for (pos, tile) in complete.iter().enumerate() {
            assert_eq!(tile_index(tile), pos as u128 + 1, "{tile}");
        }
    }

    #[test]
    fn unindex_round_trip() {
        for i in 1..=500u128 {
            assert_eq!(tile_index(&tile_unindex(i).unwrap()), i);
        }
        let mut seen = BTreeSet::new();
        for tile in enumeration(20).iter().step_by(7) {
            assert!(seen.insert(tile_index(tile)));
            assert_eq!(tile_unindex(tile_index(tile)).unwrap(), *tile);
        }
    }

    proptest! {
        #[test]
        fn lex_irreflexive(a in 0u16..50, b in 0u16..50, c in 0u16..50, d in 0u16..50) {
            prop_assert!(!lex_less(&t(a, b, c, d), &t(a, b, c, d)));
        }

        #[test]
        fn index_round_trips(a in 0u16..1000, b in 0u16..1000, c in 0u16..1000, d in 0u16..1000) {
            let x = t(a, b, c, d);
            prop_assert_eq!(tile_unindex(tile_index(&x)).unwrap(), x);
        }
    }

    #[test]
    fn tori_and_grids() {
        let t32 = build_torus(3, 2).unwrap();
        let h = t32.tuples(H).unwrap();
        assert_eq!(h.len(), 6);
        assert_eq!(t32.tuples(V).unwrap().len(), 6);
        for row in 0..2 {
            let a = t32.element(&cell_id(2, row)).unwrap();
            let b = t32.element(&cell_id(0, row)).unwrap();
            assert!(h.contains(&vec![a, b]));
        }
        let t11 = build_torus(1, 1).unwrap();
        assert_eq!(t11.tuples(H).unwrap(), vec![vec![0, 0]]);
        assert_eq!(t11.tuples(V).unwrap(), vec![vec![0, 0]]);
        let g = build_grid(2, 2).unwrap();
        assert_eq!(g.tuples(H).unwrap().len(), 2);
        assert_eq!(g.tuples(V).unwrap().len(), 2);
        assert!(build_torus(0, 2).is_err());
    }

    #[test]
    fn torus_successors_are_bijective() {
        for (m, n) in [(1, 1), (2, 3), (4, 2)] {
            let s = build_torus(m, n).unwrap();
            for rel in [H, V] {
                let tuples = s.tuples(rel).unwrap();
                for e in 0..s.size() {
                    assert_eq!(tuples.iter().filter(|p| p[0] == e).count(), 1);
                    assert_eq!(tuples.iter().filter(|p| p[1] == e).count(), 1);
                }
            }
        }
    }

    #[test]
    fn validity_examples() {
        let torus = build_torus(1, 1).unwrap();
        let good = TileSet::new(vec![t(5, 7, 5, 7)]).unwrap();
        let bad = TileSet::new(vec![t(5, 7, 5, 8)]).unwrap();
        let lab = |x: TileType| Labelling::uniform(1, 1, x).unwrap().by_id();
        assert!(is_valid_tiling(&torus, &good, &lab(t(5, 7, 5, 7))).unwrap());
        assert!(!is_valid_tiling(&torus, &bad, &lab(t(5, 7, 5, 8))).unwrap());
        assert!(matches!(
            is_valid_tiling(&torus, &good, &BTreeMap::new()),
            Err(TilingError::Unlabelled(_))
        ));
        for (set, x, expect) in [(&good, t(5, 7, 5, 7), true), (&bad, t(5, 7, 5, 8), false)] {
            let m = expand_with_labels(&torus, set, &lab(x)).unwrap();
            assert_eq!(eval_sentence(&m, &tiling_sentence(set)).unwrap(), expect);
        }
    }

    #[test]
    fn solver_examples() {
        let uniform = TileSet::new(vec![t(3, 3, 3, 3)]).unwrap();
        let (m, k, l) = solve_torus(&uniform, 3, 3).unwrap();
        assert_eq!((m, k), (1, 1));
        assert_eq!(l.get(0, 0), t(3, 3, 3, 3));

        let mismatched = TileSet::new(vec![t(0, 1, 0, 2)]).unwrap();
        assert!(solve_torus(&mismatched, 4, 4).is_none());

        let a = t(0, 1, 0, 2);
        let b = t(0, 2, 0, 1);
        let pair = TileSet::new(vec![b, a]).unwrap();
        let (m, k, l) = solve_torus(&pair, 4, 4).unwrap();
        assert_eq!((m, k), (2, 1));
        assert_eq!(l.cells(), &[a, b]);
        let torus = build_torus(m, k).unwrap();
        assert!(is_valid_tiling(&torus, &pair, &l.by_id()).unwrap());
    }

    #[test]
    fn recurrence_mock() {
        let tile = t(0, 0, 0, 0);
        let mut s = FiniteStructure::new(["a", "b", "c"]).unwrap();
        s.add_relation(R, 2);
        s.add_relation(tile.predicate(), 1);
        for e in 0..3 {
            s.insert(&tile.predicate(), vec![e]).unwrap();
        }
        assert!(eval_sentence(&s, &recurrence_conjunct(&tile)).unwrap());
        for (x, y) in [(0, 1), (1, 2), (0, 2)] {
            s.insert(R, vec![x, y]).unwrap();
        }
        assert!(!eval_sentence(&s, &recurrence_conjunct(&tile)).unwrap());

        let set = TileSet::new(vec![tile]).unwrap();
        let f = recurrent_sentence(&tile, &set).unwrap();
        assert!(f.free_vars().is_empty());
        let voc = f.vocabulary();
        let rels: Vec<&str> = voc.relations.keys().map(String::as_str).collect();
        assert_eq!(rels, vec![H, "P_0_0_0_0", R, V]);
        assert!(recurrent_sentence(&t(1, 1, 1, 1), &set).is_err());
    }

    #[test]
    fn files_round_trip() {
        let s = TileSet::new(vec![t(0, 1, 0, 2), t(0, 2, 0, 1)]).unwrap();
        let back = TileSet::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        let l = Labelling::new(2, 1, vec![t(0, 2, 0, 1), t(0, 1, 0, 2)]).unwrap();
        assert_eq!(Labelling::from_json(&l.to_json(&s).unwrap(), &s).unwrap(), l);
        assert!(TileSet::from_json(r#"{"tiles":[]}"#).is_err());
        assert!(TileSet::from_json(r#"{"tiles":[[1,1,1,1],[1,1,1,1]]}"#).is_err());
    }
}
