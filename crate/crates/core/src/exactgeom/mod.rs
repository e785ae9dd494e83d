//! Exact affine geometry over ℚⁿ.
//!
//! Everything here is rational: betweenness is decided from vanishing 2×2
//! minors and a dot-product interval, never from Euclidean distances, so no
//! square roots (and no floating point) are ever involved.

mod hom;
mod rat;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use hom::HomPoint;
pub use rat::{Rat, RatParseError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate line: both defining points are equal")]
    DegenerateLine,
    #[error("vertices do not form a basis of a flat")]
    NotABasis,
    #[error("point set is empty")]
    EmptySet,
    #[error("simplex must have at least {min} vertices, got {found}")]
    TooFewVertices { min: usize, found: usize },
    #[error("points must have dimension at least 1")]
    ZeroDimension,
}

/// A point of ℚⁿ.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    coords: Vec<Rat>,
}

impl Point {
    pub fn new(coords: Vec<Rat>) -> Self {
        Point { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Point::new(coords.iter().map(|&c| Rat::from_int(c)).collect())
    }

    pub fn origin(dim: usize) -> Self {
        Point::new(vec![Rat::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Rat {
        &self.coords[i]
    }

    /// The vector `self - other`.
    pub fn sub(&self, other: &Point) -> Vec<Rat> {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect()
    }

    /// `self + scale * v`.
    pub fn offset(&self, v: &[Rat], scale: &Rat) -> Point {
        Point::new(
            self.coords
                .iter()
                .zip(v)
                .map(|(a, d)| a + &(d * scale))
                .collect(),
        )
    }

    /// Affine combination `(1 - lambda) * self + lambda * other`.
    pub fn lerp(&self, other: &Point, lambda: &Rat) -> Point {
        self.offset(&other.sub(self), lambda)
    }

    fn check_dim(&self, other: &Point) -> Result<(), GeomError> {
        if self.dim() != other.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Point {
    type Err = RatParseError;

    /// Parses `(a, b, ...)` or `a,b,...` with rational components.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let coords = inner
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<Rat>, _>>()?;
        Ok(Point::new(coords))
    }
}

/// The vertices `x_0..x_k` of a (possibly improper) k-simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplex {
    vertices: Vec<Point>,
}

impl Simplex {
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeomError> {
        let first = vertices.first().ok_or(GeomError::TooFewVertices { min: 1, found: 0 })?;
        for v in &vertices[1..] {
            first.check_dim(v)?;
        }
        Ok(Simplex { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Dimension `k` of the simplex (vertex count minus one).
    pub fn order(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn is_proper(&self) -> bool {
        is_basis(&self.vertices).unwrap_or(false)
    }
}

fn same_dim(points: &[&Point]) -> Result<usize, GeomError> {
    let d = points[0].dim();
    for p in &points[1..] {
        points[0].check_dim(p)?;
    }
    Ok(d)
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

fn all_minors_vanish(a: &[Rat], b: &[Rat]) -> bool {
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            if &a[i] * &b[j] != &a[j] * &b[i] {
                return false;
            }
        }
    }
    true
}

/// `t` lies on the closed segment `[s, u]`.
pub fn between(s: &Point, t: &Point, u: &Point) -> Result<bool, GeomError> {
    same_dim(&[s, t, u])?;
    let ts = t.sub(s);
    let us = u.sub(s);
    if !all_minors_vanish(&ts, &us) {
        return Ok(false);
    }
    let uu = dot(&us, &us);
    if uu.is_zero() {
        // degenerate segment: d(s,s) = 2·d(s,t) forces t = s
        return Ok(t == s);
    }
    let d = dot(&ts, &us);
    Ok(!d.is_negative() && d <= uu)
}

/// Betweenness with `t` distinct from both endpoints.
pub fn strictly_between(s: &Point, t: &Point, u: &Point) -> Result<bool, GeomError> {
    Ok(between(s, t, u)? && s != t && t != u)
}

/// The three points lie on a common line, in any order.
pub fn collinear3(s: &Point, t: &Point, u: &Point) -> Result<bool, GeomError> {
    Ok(between(s, t, u)? || between(s, u, t)? || between(t, s, u)?)
}

/// Lines `xy` and `tk` are parallel; coincident lines count as parallel.
pub fn parallel(x: &Point, y: &Point, t: &Point, k: &Point) -> Result<bool, GeomError> {
    same_dim(&[x, y, t, k])?;
    if x == y || t == k {
        return Ok(false);
    }
    Ok(all_minors_vanish(&y.sub(x), &k.sub(t)))
}

/// Rank of a list of row vectors, by Gaussian elimination over ℚ.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pivot);
        let inv = m[r][c].recip();
        for i in (r + 1)..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..cols {
                let v = &m[r][j] * &f;
                m[i][j] = &m[i][j] - &v;
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Solves `columns · x = rhs`, where `columns[j]` is the j-th column.
/// Returns the unique solution, or `None` if the system is inconsistent or
/// underdetermined.
fn solve_columns(columns: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let n = rhs.len();
    let k = columns.len();
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    let mut r = 0;
    let mut pivots = Vec::with_capacity(k);
    for c in 0..k {
        let Some(p) = (r..n).find(|&i| !m[i][c].is_zero()) else {
            return None;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for j in c..=k {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..n {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=k {
                    let v = &m[r][j] * &f;
                    m[i][j] = &m[i][j] - &v;
                }
            }
        }
        pivots.push(r);
        r += 1;
    }
    if (r..n).any(|i| !m[i][k].is_zero()) {
        return None;
    }
    Some(pivots.iter().map(|&row| m[row][k].clone()).collect())
}

/// The unique common point of lines `ab` and `cd`, if they are distinct,
/// coplanar and not parallel.
pub fn line_intersection(
    a: &Point,
    b: &Point,
    c: &Point,
    d: &Point,
) -> Result<Option<Point>, GeomError> {
    same_dim(&[a, b, c, d])?;
    if a == b || c == d {
        return Err(GeomError::DegenerateLine);
    }
    let u = b.sub(a);
    let v = d.sub(c);
    if all_minors_vanish(&u, &v) {
        return Ok(None);
    }
    // a + s·u = c + t·v  ⇔  s·u − t·v = c − a
    let neg_v: Vec<Rat> = v.iter().map(|x| -x).collect();
    let rhs = c.sub(a);
    Ok(solve_columns(&[u.clone(), neg_v], &rhs).map(|st| a.offset(&u, &st[0])))
}

fn edge_vectors(points: &[Point]) -> Vec<Vec<Rat>> {
    points[1..].iter().map(|p| p.sub(&points[0])).collect()
}

/// The vectors `x_i - x_0` are linearly independent. A single point is a
/// basis of a 0-flat; more than `n + 1` points never are.
pub fn is_basis(points: &[Point]) -> Result<bool, GeomError> {
    let first = points.first().ok_or(GeomError::EmptySet)?;
    for p in &points[1..] {
        first.check_dim(p)?;
    }
    let k = points.len() - 1;
    if k > first.dim() {
        return Ok(false);
    }
    Ok(rank(&edge_vectors(points)) == k)
}

/// `z` lies in the affine span of a basis.
pub fn in_flat(points: &[Point], z: &Point) -> Result<bool, GeomError> {
    if !is_basis(points)? {
        return Err(GeomError::NotABasis);
    }
    points[0].check_dim(z)?;
    let mut rows = edge_vectors(points);
    let k = rows.len();
    rows.push(z.sub(&points[0]));
    Ok(rank(&rows) == k)
}

/// `z` lies in the open simplex. Follows the recursive construction: a
/// segment's interior is strict betweenness, and `z` is inside a k-simplex
/// iff the ray from the last vertex through `z` meets the open facet at a
/// point `y` with `z` strictly between `y` and that vertex.
pub fn in_open_triangle(simplex: &Simplex, z: &Point) -> Result<bool, GeomError> {
    let verts = simplex.vertices();
    if verts.len() < 2 {
        return Err(GeomError::TooFewVertices { min: 2, found: verts.len() });
    }
    if !is_basis(verts)? {
        return Err(GeomError::NotABasis);
    }
    verts[0].check_dim(z)?;
    Ok(open_simplex_rec(verts, z))
}

fn open_simplex_rec(verts: &[Point], z: &Point) -> bool {
    let k = verts.len() - 1;
    if k == 1 {
        return strictly_between(&verts[0], z, &verts[1]).unwrap_or(false);
    }
    let apex = &verts[k];
    if z == apex {
        return false;
    }
    let face = &verts[..k];
    // y = z + s(z − apex) must lie in aff(face):
    //   Σ μ_i (x_i − x_0) − s(z − apex) = z − x_0
    let dir = z.sub(apex);
    let mut columns = edge_vectors(face);
    columns.push(dir.iter().map(|x| -x).collect());
    let Some(sol) = solve_columns(&columns, &z.sub(&face[0])) else {
        return false;
    };
    let s = &sol[k - 1];
    let y = z.offset(&dir, s);
    strictly_between(&y, z, apex).unwrap_or(false) && open_simplex_rec(face, &y)
}

fn linf(a: &Point, b: &Point) -> Rat {
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| (x - y).abs())
        .max()
        .unwrap_or_else(Rat::zero)
}

/// Right simplex `v0 = c − r·𝟙`, `v_i = v0 + (n+1)·r·e_i`. Its open interior
/// contains `c` (all barycentric coordinates equal `1/(n+1)`) and lies in the
/// box `|y_j − c_j| < n·r`.
fn reference_simplex(center: &Point, r: &Rat) -> Simplex {
    let n = center.dim();
    let v0 = Point::new(center.coords().iter().map(|c| c - r).collect());
    let side = r * &Rat::from_int(n as i64 + 1);
    let mut verts = vec![v0.clone()];
    for i in 0..n {
        let mut coords = v0.coords().to_vec();
        coords[i] = &coords[i] + &side;
        verts.push(Point::new(coords));
    }
    Simplex { vertices: verts }
}

/// A proper n-simplex whose open interior contains `x` and no other point
/// of `points`.
pub fn sepr_witness(points: &[Point], x: &Point) -> Result<Option<Simplex>, GeomError> {
    if x.dim() == 0 {
        return Err(GeomError::ZeroDimension);
    }
    for p in points {
        x.check_dim(p)?;
    }
    let n = Rat::from_int(x.dim() as i64);
    let nearest = points.iter().filter(|p| *p != x).map(|p| linf(p, x)).min();
    let r = match nearest {
        Some(d) => &d / &(&n * &Rat::from_int(2)),
        None => Rat::one(),
    };
    Ok(Some(reference_simplex(x, &r)))
}

/// A proper n-simplex whose open interior contains every point of `points`.
pub fn bounding_simplex(points: &[Point]) -> Result<Simplex, GeomError> {
    let c = points.first().ok_or(GeomError::EmptySet)?;
    if c.dim() == 0 {
        return Err(GeomError::ZeroDimension);
    }
    for p in points {
        c.check_dim(p)?;
    }
    let spread = points.iter().map(|p| linf(p, c)).max().unwrap_or_else(Rat::zero);
    let r = &(&spread * &Rat::from_int(c.dim() as i64)) + &Rat::one();
    Ok(reference_simplex(c, &r))
}
