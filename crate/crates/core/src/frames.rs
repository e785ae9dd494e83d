//! Finite Cartesian frames in ℚ²: validation, synthesis from labelled tori,
//! geometric extraction back to tori, the relevant closure that makes the
//! frame sentences checkable, and sequence predicates on finite universes.
//!
//! Closure soundness: every ∃-witness of φ^fin_* and φ_fCf^S is an axis
//! P-point or an intersection point, and every ∀-clause only constrains
//! P-points or points defined from them by lines through axis points, so
//! quantifying over `P ∪ intersection points` instead of ℚ² decides them.
//! The dual-path tests enforce this rather than trusting it.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::defgen::{self, DefgenError, BET, P, P0, PX, PY};
use crate::exactgeom::{self, GeomError, HomPoint, Point, Rat};
use crate::folang::{FiniteStructure, RelationOracle, StructureError};
use crate::interp::{induced_structure, InterpError};
use crate::tiling::{
    build_torus, cell_id, tile_index, tile_unindex, Labelling, TileSet, TileType, TilingError, H, V,
};

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("frame points must be 2-dimensional, `{0}` is not")]
    Dimension(String),
    #[error("duplicate point id `{0}`")]
    DuplicateId(String),
    #[error("points `{0}` and `{1}` coincide")]
    DuplicatePoint(String, String),
    #[error("unknown point id `{0}`")]
    UnknownId(String),
    #[error("the constants p0, px, py cannot be removed")]
    RemoveConstant,
    #[error("labelling is {found_m}×{found_k}, expected {m}×{k}")]
    SizeMismatch {
        m: usize,
        k: usize,
        found_m: usize,
        found_k: usize,
    },
    #[error("tile index {0} is too large to place as points")]
    TooManyPoints(u128),
    #[error("not a finite Cartesian frame: {}", list(.0))]
    Invalid(Vec<Violation>),
    #[error("cell ({}, {}) holds {count} points, which is not the index of a tile in S", .cell.0, .cell.1)]
    UnknownLabel { cell: (usize, usize), count: usize },
    #[error("closure element `{0}` is in the interpreted domain but is not a domain cell")]
    StrayDomainElement(String),
    #[error("frame file: {0}")]
    Format(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Tiling(#[from] TilingError),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Defgen(#[from] DefgenError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

fn list(vs: &[Violation]) -> String {
    vs.iter().map(Violation::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    ConstantsNotDistinct,
    ConstantsCollinear,
    EmptyAxis(Axis),
    LinesParallel { p: String, q: String },
    Label { cell: (usize, usize), count: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ConstantsNotDistinct => write!(f, "constants not distinct"),
            Violation::ConstantsCollinear => write!(f, "constants collinear"),
            Violation::EmptyAxis(Axis::X) => write!(f, "no P-point strictly between p0 and px"),
            Violation::EmptyAxis(Axis::Y) => write!(f, "no P-point strictly between p0 and py"),
            Violation::LinesParallel { p, q } => {
                write!(f, "line {p}–py does not meet line {q}–px")
            }
            Violation::Label { cell, count } => write!(
                f,
                "cell ({}, {}) holds {count} points, not a tile index of S",
                cell.0, cell.1
            ),
        }
    }
}

/// A finite P ⊂ ℚ² with three distinguished members. Ids and points are
/// distinct; every point is in P.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCartesianFrame {
    ids: Vec<String>,
    points: Vec<Point>,
    p0: usize,
    px: usize,
    py: usize,
}

#[derive(Serialize, Deserialize)]
struct FrameFile {
    dim: usize,
    points: BTreeMap<String, Vec<String>>,
    #[serde(rename = "P")]
    p: Vec<String>,
    p0: String,
    px: String,
    py: String,
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| &acc + &(x * y))
}

/// Position of `u` along the ray from `from` towards `to` (monotone, not
/// normalized).
fn param(from: &Point, to: &Point, u: &Point) -> Rat {
    dot(&u.sub(from), &to.sub(from))
}

impl FiniteCartesianFrame {
    pub fn new(
        ids: Vec<String>,
        points: Vec<Point>,
        p0: &str,
        px: &str,
        py: &str,
    ) -> Result<Self, FrameError> {
        if ids.len() != points.len() {
            return Err(FrameError::Format(format!(
                "{} ids for {} points",
                ids.len(),
                points.len()
            )));
        }
        let mut seen_ids = HashSet::new();
        let mut seen_pts: BTreeMap<&Point, &str> = BTreeMap::new();
        for (id, p) in ids.iter().zip(&points) {
            if p.dim() != 2 {
                return Err(FrameError::Dimension(id.clone()));
            }
            if !seen_ids.insert(id.as_str()) {
                return Err(FrameError::DuplicateId(id.clone()));
            }
            if let Some(other) = seen_pts.insert(p, id) {
                return Err(FrameError::DuplicatePoint(other.to_string(), id.clone()));
            }
        }
        let find = |c: &str| {
            ids.iter()
                .position(|i| i == c)
                .ok_or_else(|| FrameError::UnknownId(c.to_string()))
        };
        let (p0, px, py) = (find(p0)?, find(px)?, find(py)?);
        Ok(FiniteCartesianFrame {
            ids,
            points,
            p0,
            px,
            py,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn p0(&self) -> &Point {
        &self.points[self.p0]
    }

    pub fn px(&self) -> &Point {
        &self.points[self.px]
    }

    pub fn py(&self) -> &Point {
        &self.points[self.py]
    }

    fn constant_ids(&self) -> [&str; 3] {
        [&self.ids[self.p0], &self.ids[self.px], &self.ids[self.py]]
    }

    /// The frame without point `id`.
    pub fn without(&self, id: &str) -> Result<Self, FrameError> {
        if self.constant_ids().contains(&id) {
            return Err(FrameError::RemoveConstant);
        }
        let at = self
            .ids
            .iter()
            .position(|i| i == id)
            .ok_or_else(|| FrameError::UnknownId(id.to_string()))?;
        let mut ids = self.ids.clone();
        let mut points = self.points.clone();
        ids.remove(at);
        points.remove(at);
        let [a, b, c] = self.constant_ids();
        FiniteCartesianFrame::new(ids, points, a, b, c)
    }

    /// The frame with one more point.
    pub fn with_point(&self, id: &str, p: Point) -> Result<Self, FrameError> {
        let mut ids = self.ids.clone();
        let mut points = self.points.clone();
        ids.push(id.to_string());
        points.push(p);
        let [a, b, c] = self.constant_ids();
        FiniteCartesianFrame::new(ids, points, a, b, c)
    }

    /// P-points `u` with β(p0, u, end), ordered from p0 to `end`.
    fn axis(&self, end: usize) -> Vec<usize> {
        let (o, e) = (self.p0(), &self.points[end]);
        let (ho, he) = (HomPoint::new(o), HomPoint::new(e));
        let mut on: Vec<(Rat, usize)> = (0..self.len())
            .filter(|&u| HomPoint::between(&ho, &HomPoint::new(&self.points[u]), &he))
            .map(|u| (param(o, e, &self.points[u]), u))
            .collect();
        on.sort();
        on.into_iter().map(|(_, u)| u).collect()
    }

    fn structural_violations(&self) -> Vec<Violation> {
        let (o, x, y) = (self.p0(), self.px(), self.py());
        if o == x || o == y || x == y {
            return vec![Violation::ConstantsNotDistinct];
        }
        if exactgeom::collinear3(o, x, y).expect("2-dimensional points") {
            return vec![Violation::ConstantsCollinear];
        }
        let mut out = Vec::new();
        let ax = self.axis(self.px);
        let ay = self.axis(self.py);
        if ax.len() < 3 {
            out.push(Violation::EmptyAxis(Axis::X));
        }
        if ay.len() < 3 {
            out.push(Violation::EmptyAxis(Axis::Y));
        }
        for &p in ax.iter().skip(1).take(ax.len().saturating_sub(2)) {
            for &q in ay.iter().skip(1).take(ay.len().saturating_sub(2)) {
                let meet = exactgeom::line_intersection(&self.points[p], y, &self.points[q], x)
                    .expect("distinct 2-dimensional points");
                if meet.is_none() {
                    out.push(Violation::LinesParallel {
                        p: self.ids[p].clone(),
                        q: self.ids[q].clone(),
                    });
                }
            }
        }
        out
    }

    /// The (m+1)×(k+1) intersection points, after the structural checks.
    pub fn grid(&self) -> Result<IntersectionGrid, FrameError> {
        let v = self.structural_violations();
        if !v.is_empty() {
            return Err(FrameError::Invalid(v));
        }
        let ax = self.axis(self.px);
        let ay = self.axis(self.py);
        let (m, k) = (ax.len() - 2, ay.len() - 2);
        let mut points = Vec::with_capacity((m + 1) * (k + 1));
        for &b in &ay[..=k] {
            for &a in &ax[..=m] {
                let p = exactgeom::line_intersection(&self.points[a], self.py(), &self.points[b], self.px())?
                    .expect("axis lines through distinct axis points meet");
                points.push(p);
            }
        }
        Ok(IntersectionGrid { m, k, points })
    }

    /// Number of P-points strictly between `u` and `v`.
    fn count_between(&self, hom: &[HomPoint], u: &Point, v: &Point) -> usize {
        let (hu, hv) = (HomPoint::new(u), HomPoint::new(v));
        self.points
            .iter()
            .zip(hom)
            .filter(|(p, h)| *p != u && *p != v && HomPoint::between(&hu, h, &hv))
            .count()
    }

    /// Label counts per domain cell, row-major.
    fn cell_counts(&self, grid: &IntersectionGrid) -> Vec<((usize, usize), usize)> {
        let hom: Vec<HomPoint> = self.points.iter().map(HomPoint::new).collect();
        (0..grid.k)
            .flat_map(|j| (0..grid.m).map(move |i| (i, j)))
            .map(|(i, j)| {
                let n = self.count_between(&hom, grid.at(i, j), grid.at(i + 1, j + 1));
                ((i, j), n)
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let file = FrameFile {
            dim: 2,
            points: self
                .ids
                .iter()
                .zip(&self.points)
                .map(|(id, p)| {
                    (id.clone(), p.coords().iter().map(Rat::to_fraction_string).collect())
                })
                .collect(),
            p: self.ids.clone(),
            p0: self.ids[self.p0].clone(),
            px: self.ids[self.px].clone(),
            py: self.ids[self.py].clone(),
        };
        serde_json::to_string_pretty(&file).expect("frames always serialize")
    }

    /// Every listed point must be in P.
    pub fn from_json(text: &str) -> Result<Self, FrameError> {
        let f: FrameFile =
            serde_json::from_str(text).map_err(|e| FrameError::Format(e.to_string()))?;
        if f.dim != 2 {
            return Err(FrameError::Format(format!("dim must be 2, got {}", f.dim)));
        }
        if let Some(extra) = f.points.keys().find(|id| !f.p.contains(id)) {
            return Err(FrameError::Format(format!("point `{extra}` is not in P")));
        }
        let mut points = Vec::with_capacity(f.p.len());
        for id in &f.p {
            let coords = f.points.get(id).ok_or_else(|| FrameError::UnknownId(id.clone()))?;
            let coords = coords
                .iter()
                .map(|c| c.parse::<Rat>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| FrameError::Format(e.to_string()))?;
            points.push(Point::new(coords));
        }
        FiniteCartesianFrame::new(f.p, points, &f.p0, &f.px, &f.py)
    }
}

/// Intersection points `(i, j)` for `0 ≤ i ≤ m`, `0 ≤ j ≤ k`: the meet of
/// line `a_i`–py with line `b_j`–px, where `a_0 = b_0 = p0` and `a_i`, `b_j`
/// are the interior axis points in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionGrid {
    pub m: usize,
    pub k: usize,
    points: Vec<Point>,
}

impl IntersectionGrid {
    pub fn at(&self, i: usize, j: usize) -> &Point {
        &self.points[j * (self.m + 1) + i]
    }

    /// `(i+1, j+1)` for a domain cell.
    pub fn diagonal_successor(&self, i: usize, j: usize) -> Option<&Point> {
        (i < self.m && j < self.k).then(|| self.at(i + 1, j + 1))
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }
}

/// Empty iff `f` is a finite Cartesian frame with both axes nonempty and
/// every domain cell's diagonal holds `tile_index(t)` P-points for some
/// `t ∈ s`.
pub fn validate_frame(f: &FiniteCartesianFrame, s: &TileSet) -> Vec<Violation> {
    let structural = f.structural_violations();
    if !structural.is_empty() {
        return structural;
    }
    let grid = f.grid().expect("structure checked");
    let indices = s.indices();
    f.cell_counts(&grid)
        .into_iter()
        .filter(|(_, n)| !indices.contains(&(*n as u128)))
        .map(|(cell, count)| Violation::Label { cell, count })
        .collect()
}

fn pt(x: Rat, y: Rat) -> Point {
    Point::new(vec![x, y])
}

fn int(n: usize) -> Rat {
    Rat::from_int(n as i64)
}

/// Lattice layout: p0 = (0,0), x-axis points (1,0)..(m,0), px = (m+1,0),
/// y-axis points (0,1)..(0,k), py = (0,k+1). Cell (i,j) gets
/// `tile_index(L(i,j))` P-points on the open segment from intersection point
/// (i,j) to (i+1,j+1) at λ = r/(N+1); a cell whose points would hit an axis
/// line, an intersection point or another cell's open diagonal is re-placed
/// at λ = (r+ε)/(N+2) for ε = 1/2, 1/3, ….
pub fn synthesize_frame(
    m: usize,
    k: usize,
    labels: &Labelling,
    s: &TileSet,
) -> Result<FiniteCartesianFrame, FrameError> {
    if labels.m() != m || labels.n() != k {
        return Err(FrameError::SizeMismatch {
            m,
            k,
            found_m: labels.m(),
            found_k: labels.n(),
        });
    }
    let mut ids = vec![P0.to_string()];
    let mut points = vec![pt(Rat::zero(), Rat::zero())];
    for i in 1..=m {
        ids.push(format!("x{i}"));
        points.push(pt(int(i), Rat::zero()));
    }
    ids.push(PX.into());
    points.push(pt(int(m + 1), Rat::zero()));
    for j in 1..=k {
        ids.push(format!("y{j}"));
        points.push(pt(Rat::zero(), int(j)));
    }
    ids.push(PY.into());
    points.push(pt(Rat::zero(), int(k + 1)));

    let skeleton = FiniteCartesianFrame::new(ids.clone(), points.clone(), P0, PX, PY)?;
    let grid = skeleton.grid()?;
    let mut fixed: HashSet<Point> = points.iter().cloned().collect();
    fixed.extend(grid.points().iter().cloned());
    let cells: Vec<(usize, usize)> = (0..k).flat_map(|j| (0..m).map(move |i| (i, j))).collect();
    let segments: Vec<(HomPoint, HomPoint)> = cells
        .iter()
        .map(|&(i, j)| (HomPoint::new(grid.at(i, j)), HomPoint::new(grid.at(i + 1, j + 1))))
        .collect();

    for (c, &(i, j)) in cells.iter().enumerate() {
        let t = labels.get(i, j);
        if !s.contains(&t) {
            return Err(TilingError::NotInSet(t).into());
        }
        let index = tile_index(&t);
        let n = u32::try_from(index).map_err(|_| FrameError::TooManyPoints(index))? as usize;
        let (u, v) = (grid.at(i, j), grid.at(i + 1, j + 1));
        let clear = |p: &Point| {
            let h = HomPoint::new(p);
            // the axes are the coordinate axes
            !fixed.contains(p)
                && !p.coord(0).is_zero()
                && !p.coord(1).is_zero()
                && segments.iter().enumerate().all(|(d, (a, b))| {
                    d == c || !HomPoint::between(a, &h, b) || p == grid.at(cells[d].0, cells[d].1)
                })
        };
        let mut attempt = 0u64;
        let placed = loop {
            let cand: Vec<Point> = (1..=n)
                .map(|r| {
                    let lambda = if attempt == 0 {
                        Rat::new(r as i64, n as i64 + 1)
                    } else {
                        let eps = Rat::new(1, attempt as i64 + 1);
                        &(&int(r) + &eps) / &int(n + 2)
                    };
                    u.lerp(v, &lambda)
                })
                .collect();
            if cand.iter().all(clear) {
                break cand;
            }
            attempt += 1;
        };
        for (r, p) in placed.into_iter().enumerate() {
            ids.push(format!("c{i}_{j}_{}", r + 1));
            points.push(p);
        }
    }
    FiniteCartesianFrame::new(ids, points, P0, PX, PY)
}

/// The m×k torus read off `f`: domain = intersection points with both a
/// right and an upper neighbour in the grid, H/V = next domain point along
/// the line towards px/py with wraparound to the axis point, labels from
/// diagonal counts. Cells are indexed as in [`build_torus`].
pub fn extract_torus(
    f: &FiniteCartesianFrame,
    s: &TileSet,
) -> Result<(FiniteStructure, Labelling), FrameError> {
    let grid = f.grid()?;
    let (m, k) = (grid.m, grid.k);
    let mut labels = Vec::with_capacity(m * k);
    for ((i, j), count) in f.cell_counts(&grid) {
        let t = tile_unindex(count as u128)
            .ok()
            .filter(|t| s.contains(t))
            .ok_or(FrameError::UnknownLabel { cell: (i, j), count })?;
        labels.push(t);
    }
    let labelling = Labelling::new(m, k, labels)?;

    let mut torus = build_torus(m, k)?;
    // replace the index-based successors with the geometric ones
    torus.add_relation(H, 2);
    torus.add_relation(V, 2);
    let at = |i: usize, j: usize| j * m + i;
    for j in 0..k {
        let row: Vec<usize> = (0..m).collect();
        for (a, b) in successors(&row, |i| grid.at(i, j), f.px()) {
            torus.insert(H, vec![at(a, j), at(b, j)])?;
        }
    }
    for i in 0..m {
        let col: Vec<usize> = (0..k).collect();
        for (a, b) in successors(&col, |j| grid.at(i, j), f.py()) {
            torus.insert(V, vec![at(i, a), at(i, b)])?;
        }
    }
    Ok((torus, labelling))
}

/// Orders `items` by position on the line towards `end` and pairs each
/// with the next, the last with the first.
fn successors<'g>(
    items: &[usize],
    point: impl Fn(usize) -> &'g Point,
    end: &Point,
) -> Vec<(usize, usize)> {
    let origin = point(items[0]);
    let mut sorted: Vec<(Rat, usize)> = items
        .iter()
        .map(|&i| (param(origin, end, point(i)), i))
        .collect();
    sorted.sort();
    let n = sorted.len();
    (0..n).map(|a| (sorted[a].1, sorted[(a + 1) % n].1)).collect()
}

#[derive(Debug)]
struct BetOracle(Vec<HomPoint>);

impl RelationOracle for BetOracle {
    fn arity(&self) -> usize {
        3
    }

    fn holds(&self, a: &[usize]) -> bool {
        HomPoint::between(&self.0[a[0]], &self.0[a[1]], &self.0[a[2]])
    }
}

/// A frame's relevant closure as a `{Bet, P, p0, px, py}`-structure.
#[derive(Clone, Debug)]
pub struct Closure {
    pub structure: FiniteStructure,
    pub points: Vec<Point>,
    grid: Option<IntersectionGrid>,
    grid_elements: Vec<usize>,
}

impl Closure {
    pub fn grid(&self) -> Option<&IntersectionGrid> {
        self.grid.as_ref()
    }

    /// Closure element of intersection point `(i, j)`.
    pub fn grid_element(&self, i: usize, j: usize) -> Option<usize> {
        let g = self.grid.as_ref()?;
        (i <= g.m && j <= g.k).then(|| self.grid_elements[j * (g.m + 1) + i])
    }

    /// The domain cell `(i, j)`, `i < m`, `j < k`, at element `e`.
    pub fn cell_of(&self, e: usize) -> Option<(usize, usize)> {
        let g = self.grid.as_ref()?;
        let pos = self.grid_elements.iter().position(|&x| x == e)?;
        let (i, j) = (pos % (g.m + 1), pos / (g.m + 1));
        (i < g.m && j < g.k).then_some((i, j))
    }
}

/// Universe: P followed by the intersection points outside P (ids
/// `g{i}_{j}`). `Bet` is decided exactly on demand. Frames whose grid is
/// undefined (collinear constants, an empty axis) get the universe P.
pub fn relevant_closure(f: &FiniteCartesianFrame) -> Result<Closure, FrameError> {
    let grid = f.grid().ok();
    let mut ids: Vec<String> = f.ids().to_vec();
    let mut points: Vec<Point> = f.points().to_vec();
    let mut index: BTreeMap<Point, usize> =
        points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let mut grid_elements = Vec::new();
    if let Some(g) = &grid {
        for j in 0..=g.k {
            for i in 0..=g.m {
                let p = g.at(i, j);
                let e = *index.entry(p.clone()).or_insert_with(|| {
                    ids.push(format!("g{i}_{j}"));
                    points.push(p.clone());
                    points.len() - 1
                });
                grid_elements.push(e);
            }
        }
    }
    let mut s = FiniteStructure::new(ids)?;
    s.set_oracle(BET, Arc::new(BetOracle(points.iter().map(HomPoint::new).collect())));
    s.add_relation(P, 1);
    for e in 0..f.len() {
        s.insert(P, vec![e])?;
    }
    s.set_constant(P0, f.p0)?;
    s.set_constant(PX, f.px)?;
    s.set_constant(PY, f.py)?;
    Ok(Closure {
        structure: s,
        points,
        grid,
        grid_elements,
    })
}

/// H, V and tile labels over cell ids `"i,j"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellRelations {
    pub domain: BTreeSet<String>,
    pub h: BTreeSet<(String, String)>,
    pub v: BTreeSet<(String, String)>,
    pub labels: BTreeMap<String, BTreeSet<TileType>>,
}

fn pairs(s: &FiniteStructure, rel: &str, name: impl Fn(usize) -> String) -> BTreeSet<(String, String)> {
    s.tuples(rel)
        .unwrap_or_default()
        .into_iter()
        .map(|t| (name(t[0]), name(t[1])))
        .collect()
}

/// The torus and labelling of [`extract_torus`] as cell relations.
pub fn geometric_relations(
    f: &FiniteCartesianFrame,
    s: &TileSet,
) -> Result<CellRelations, FrameError> {
    let (torus, labelling) = extract_torus(f, s)?;
    let name = |e: usize| torus.id(e).to_string();
    Ok(CellRelations {
        domain: torus.ids().iter().cloned().collect(),
        h: pairs(&torus, H, name),
        v: pairs(&torus, V, name),
        labels: labelling
            .by_id()
            .into_iter()
            .map(|(id, t)| (id, BTreeSet::from([t])))
            .collect(),
    })
}

/// The structure `scheme_torus(s)` induces on the closure, as cell
/// relations. Every induced element must be a domain cell.
pub fn interpreted_relations(c: &Closure, s: &TileSet) -> Result<CellRelations, FrameError> {
    let scheme = defgen::scheme_torus(s)?;
    let induced = induced_structure(&scheme, &c.structure)?;
    let mut names = Vec::with_capacity(induced.origin.len());
    for &e in &induced.origin {
        let (i, j) = c
            .cell_of(e)
            .ok_or_else(|| FrameError::StrayDomainElement(c.structure.id(e).to_string()))?;
        names.push(cell_id(i, j));
    }
    let st = &induced.structure;
    let name = |e: usize| names[e].clone();
    let mut labels: BTreeMap<String, BTreeSet<TileType>> =
        names.iter().map(|n| (n.clone(), BTreeSet::new())).collect();
    for t in s.tiles() {
        for tuple in st.tuples(&t.predicate()).unwrap_or_default() {
            labels.get_mut(&names[tuple[0]]).expect("named").insert(*t);
        }
    }
    Ok(CellRelations {
        domain: names.iter().cloned().collect(),
        h: pairs(st, H, name),
        v: pairs(st, V, name),
        labels,
    })
}

/// Definitions of sequences on a finite `{Bet}`-structure, with its
/// universe as T.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceReport {
    pub is_sequence: bool,
    pub is_discretely_spaced: bool,
    pub zero_points: BTreeSet<usize>,
    pub is_discretely_infinite: bool,
    pub is_omega_like: bool,
    /// Adjacent `(u, v)` with β(z, u, v) for some zero-point z.
    pub successor_pairs: BTreeSet<(usize, usize)>,
}

struct Seq<'a> {
    m: &'a FiniteStructure,
    q: &'a BTreeSet<usize>,
}

impl Seq<'_> {
    fn bet(&self, a: usize, b: usize, c: usize) -> bool {
        self.m.holds(BET, &[a, b, c]).unwrap_or(false)
    }

    fn bstar(&self, a: usize, b: usize, c: usize) -> bool {
        a != b && b != c && self.bet(a, b, c)
    }

    fn collinear(&self, a: usize, b: usize, c: usize) -> bool {
        self.bet(a, b, c) || self.bet(a, c, b) || self.bet(b, a, c)
    }

    fn universe(&self) -> std::ops::Range<usize> {
        0..self.m.size()
    }

    /// No Q-point strictly between `a` and `b`.
    fn clear(&self, a: usize, b: usize) -> bool {
        self.universe().all(|r| !self.bstar(a, r, b) || !self.q.contains(&r))
    }

    fn others(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.q.iter().copied().filter(move |&u| u != x)
    }

    fn is_zero(&self, s: usize) -> bool {
        !self
            .others(s)
            .any(|u| self.others(s).any(|v| self.bet(u, s, v)))
    }

    fn adjacent_pairs(&self, zeros: &BTreeSet<usize>) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for &u in self.q {
            for v in self.others(u) {
                if self.clear(u, v) && zeros.iter().any(|&z| self.bet(z, u, v)) {
                    out.insert((u, v));
                }
            }
        }
        out
    }
}

/// Checks each definition by enumeration. A property is reported true only
/// when the properties it refines hold too.
pub fn sequence_checks(m: &FiniteStructure, q: &BTreeSet<usize>) -> SequenceReport {
    let sq = Seq { m, q };
    let qs: Vec<usize> = q.iter().copied().collect();
    let is_sequence = !qs.is_empty()
        && qs.iter().all(|&a| {
            qs.iter()
                .all(|&b| qs.iter().all(|&c| sq.collinear(a, b, c)))
        });
    let spaced = qs.iter().all(|&s| {
        sq.others(s).all(|t| {
            sq.universe()
                .any(|u| u != s && sq.bet(s, u, t) && sq.clear(s, u))
        })
    });
    let is_discretely_spaced = is_sequence && spaced;
    let zero_points: BTreeSet<usize> = qs.iter().copied().filter(|&s| sq.is_zero(s)).collect();
    let infinite = qs
        .iter()
        .any(|&s| qs.iter().all(|&u| sq.others(u).any(|v| sq.bet(s, u, v))));
    let is_discretely_infinite = is_discretely_spaced && infinite;
    let omega = sq.universe().all(|r| {
        let inside = sq.others(r).any(|s| sq.others(r).any(|u| sq.bet(s, r, u)));
        !inside
            || sq.others(r).any(|s| {
                sq.others(r).any(|u| {
                    sq.bet(s, r, u)
                        && sq
                            .universe()
                            .all(|v| v == r || !sq.bstar(s, v, u) || !q.contains(&v))
                })
            })
    });
    let is_omega_like = is_discretely_infinite && !zero_points.is_empty() && omega;
    SequenceReport {
        is_sequence,
        is_discretely_spaced,
        successor_pairs: sq.adjacent_pairs(&zero_points),
        zero_points,
        is_discretely_infinite,
        is_omega_like,
    }
}

/// The successor relation with the zero-point fixed to `zero`.
pub fn successor_pairs(
    m: &FiniteStructure,
    q: &BTreeSet<usize>,
    zero: usize,
) -> BTreeSet<(usize, usize)> {
    Seq { m, q }.adjacent_pairs(&BTreeSet::from([zero]))
}
