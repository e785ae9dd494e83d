//! Generators for the definability constructions: geometric predicates,
//! finiteness and ω-like sequences over `{Bet, P}`, Cartesian frame
//! sentences, the grid, torus and recurrence interpretation schemes, and the
//! reduction sentences ψ_S and γ_S.
//!
//! Bound variables are chosen fresh against every name in scope, so no
//! generated formula shadows a variable.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::folang::{fresh_name, Formula, Term, Vocabulary};
use crate::interp::{translate, InterpError, InterpretationScheme};
use crate::tiling::{self, tile_index, TileSet, TileType, H, R, V};

pub const BET: &str = "Bet";
pub const P: &str = "P";
pub const P0: &str = "p0";
pub const PX: &str = "px";
pub const PY: &str = "py";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DefgenError {
    #[error("{kind} needs k >= {min}, got {k}")]
    InvalidK { kind: GeometryKind, k: usize, min: usize },
    #[error("tile {0} has an index too large to count")]
    IndexTooLarge(TileType),
    #[error(transparent)]
    Interp(#[from] InterpError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeometryKind {
    Collinear,
    Parallel,
    Basis,
    Flat,
    OpenTriangle,
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeometryKind::Collinear => "collinear",
            GeometryKind::Parallel => "parallel",
            GeometryKind::Basis => "basis",
            GeometryKind::Flat => "flat",
            GeometryKind::OpenTriangle => "opentriangle",
        })
    }
}

/// `{Bet/3}`.
pub fn geometry_vocabulary() -> Vocabulary {
    Vocabulary::new(&[(BET, 3)], &[])
}

/// `{Bet/3, P/1}`.
pub fn predicate_vocabulary() -> Vocabulary {
    Vocabulary::new(&[(BET, 3), (P, 1)], &[])
}

/// `{Bet/3, P/1, p0, px, py}`.
pub fn frame_vocabulary() -> Vocabulary {
    Vocabulary::new(&[(BET, 3), (P, 1)], &[P0, PX, PY])
}

/// `{H/2, V/2} ∪ {P_t/1 | t ∈ S}`.
pub fn grid_vocabulary(s: &TileSet) -> Vocabulary {
    let mut rels: Vec<(String, usize)> = vec![(H.into(), 2), (V.into(), 2)];
    rels.extend(s.canonical().iter().map(|t| (t.predicate(), 1)));
    Vocabulary {
        relations: rels.into_iter().collect(),
        ..Vocabulary::default()
    }
}

/// [`grid_vocabulary`] plus `R/2`.
pub fn recurrence_vocabulary(s: &TileSet) -> Vocabulary {
    let mut voc = grid_vocabulary(s);
    voc.relations.insert(R.into(), 2);
    voc
}

/// Names bound or free at a point of generation.
#[derive(Clone, Default)]
struct Scope(HashSet<String>);

impl Scope {
    fn of(terms: &[&Term]) -> Scope {
        Scope(
            terms
                .iter()
                .filter_map(|t| t.as_var().map(str::to_string))
                .collect(),
        )
    }

    fn bind(&mut self, base: &str) -> String {
        let n = fresh_name(base, &self.0);
        self.0.insert(n.clone());
        n
    }

    fn with(&self, terms: &[&Term]) -> Scope {
        let mut s = self.clone();
        s.0.extend(terms.iter().filter_map(|t| t.as_var().map(str::to_string)));
        s
    }
}

fn var(n: &str) -> Term {
    Term::var(n)
}

fn p0() -> Term {
    Term::cnst(P0)
}

fn px() -> Term {
    Term::cnst(PX)
}

fn py() -> Term {
    Term::cnst(PY)
}

fn pred(t: &Term) -> Formula {
    Formula::rel(P, vec![t.clone()])
}

pub fn bet(a: &Term, b: &Term, c: &Term) -> Formula {
    Formula::rel(BET, vec![a.clone(), b.clone(), c.clone()])
}

/// β*(a,b,c): `b` strictly between `a` and `c`.
pub fn bstar(a: &Term, b: &Term, c: &Term) -> Formula {
    Formula::and(vec![
        bet(a, b, c),
        Formula::neq(a.clone(), b.clone()),
        Formula::neq(b.clone(), c.clone()),
    ])
}

pub fn collinear(a: &Term, b: &Term, c: &Term) -> Formula {
    Formula::or(vec![bet(a, b, c), bet(a, c, b), bet(b, a, c)])
}

fn parallel(x: &Term, y: &Term, t: &Term, k: &Term, sc: &Scope) -> Formula {
    let sc = sc.with(&[x, y, t, k]);
    let mut s1 = sc.clone();
    let z = var(&s1.bind("z"));
    let mut s2 = sc;
    let z1 = var(&s2.bind("z1"));
    let z2 = var(&s2.bind("z2"));
    Formula::and(vec![
        Formula::neq(x.clone(), y.clone()),
        Formula::neq(t.clone(), k.clone()),
        Formula::or(vec![
            Formula::and(vec![collinear(x, y, t), collinear(x, y, k)]),
            Formula::and(vec![
                Formula::not(Formula::exists(
                    z.name(),
                    Formula::and(vec![collinear(x, y, &z), collinear(t, k, &z)]),
                )),
                Formula::exists_many(
                    &[z1.name(), z2.name()],
                    Formula::and(vec![
                        Formula::neq(x.clone(), z1.clone()),
                        collinear(x, y, &z1),
                        collinear(x, t, &z2),
                        collinear(&z1, &z2, k),
                    ]),
                ),
            ]),
        ]),
    ])
}

fn basis(xs: &[Term], sc: &Scope) -> Formula {
    let k = xs.len() - 1;
    if k == 0 {
        return Formula::eq(xs[0].clone(), xs[0].clone());
    }
    Formula::and(vec![
        basis(&xs[..k], sc),
        Formula::not(flat(&xs[..k], &xs[k], sc)),
    ])
}

fn flat(xs: &[Term], z: &Term, sc: &Scope) -> Formula {
    let k = xs.len() - 1;
    if k == 0 {
        return Formula::eq(xs[0].clone(), z.clone());
    }
    let refs: Vec<&Term> = xs.iter().chain([z]).collect();
    let mut inner = sc.with(&refs);
    let ys: Vec<Term> = (0..=k).map(|i| var(&inner.bind(&format!("y{i}")))).collect();
    let mut parts = vec![
        Formula::eq(ys[0].clone(), xs[0].clone()),
        Formula::eq(ys[k].clone(), z.clone()),
    ];
    for i in 0..k {
        parts.push(Formula::or(vec![
            Formula::eq(ys[i].clone(), ys[i + 1].clone()),
            parallel(&xs[0], &xs[i + 1], &ys[i], &ys[i + 1], &inner),
        ]));
    }
    let names: Vec<&str> = ys.iter().map(Term::name).collect();
    Formula::and(vec![
        basis(xs, &sc.with(&refs)),
        Formula::exists_many(&names, Formula::and(parts)),
    ])
}

fn opentriangle(xs: &[Term], z: &Term, sc: &Scope) -> Formula {
    let k = xs.len() - 1;
    if k == 1 {
        return bstar(&xs[0], z, &xs[1]);
    }
    let refs: Vec<&Term> = xs.iter().chain([z]).collect();
    let mut inner = sc.with(&refs);
    let y = var(&inner.bind("y"));
    Formula::and(vec![
        basis(xs, &sc.with(&refs)),
        Formula::exists(
            y.name(),
            Formula::and(vec![opentriangle(&xs[..k], &y, &inner), bstar(&y, z, &xs[k])]),
        ),
    ])
}

fn xs(k: usize) -> Vec<Term> {
    (0..=k).map(|i| var(&format!("x{i}"))).collect()
}

/// Free variables of [`geometry_formula`] in argument order.
pub fn geometry_params(kind: GeometryKind, k: usize) -> Vec<String> {
    let names = |extra: Option<&str>| {
        let mut v: Vec<String> = (0..=k).map(|i| format!("x{i}")).collect();
        v.extend(extra.map(str::to_string));
        v
    };
    match kind {
        GeometryKind::Collinear => vec!["x".into(), "y".into(), "z".into()],
        GeometryKind::Parallel => vec!["x".into(), "y".into(), "t".into(), "k".into()],
        GeometryKind::Basis => names(None),
        GeometryKind::Flat | GeometryKind::OpenTriangle => names(Some("z")),
    }
}

/// collinear(x,y,z), parallel(x,y,t,k), basis_k(x0..xk), flat_k(x0..xk,z)
/// or opentriangle_k(x0..xk,z). `k` is ignored for the first two.
pub fn geometry_formula(kind: GeometryKind, k: usize) -> Result<Formula, DefgenError> {
    let params = geometry_params(kind, k);
    let ts: Vec<Term> = params.iter().map(|p| var(p)).collect();
    let sc = Scope::of(&ts.iter().collect::<Vec<_>>());
    Ok(match kind {
        GeometryKind::Collinear => collinear(&ts[0], &ts[1], &ts[2]),
        GeometryKind::Parallel => parallel(&ts[0], &ts[1], &ts[2], &ts[3], &sc),
        GeometryKind::Basis => basis(&ts, &sc),
        GeometryKind::Flat => flat(&ts[..=k], &ts[k + 1], &sc),
        GeometryKind::OpenTriangle => {
            if k == 0 {
                return Err(DefgenError::InvalidK { kind, k, min: 1 });
            }
            opentriangle(&ts[..=k], &ts[k + 1], &sc)
        }
    })
}

fn sepr_with(x: &Term, n: usize, member: &dyn Fn(&Term) -> Formula, sc: &Scope) -> Formula {
    let mut inner = sc.with(&[x]);
    let vs: Vec<Term> = (0..=n).map(|i| var(&inner.bind(&format!("x{i}")))).collect();
    let mut body_sc = inner.clone();
    let y = var(&body_sc.bind("y"));
    let names: Vec<&str> = vs.iter().map(Term::name).collect();
    Formula::exists_many(
        &names,
        Formula::and(vec![
            opentriangle(&vs, x, &inner),
            Formula::forall(
                y.name(),
                Formula::implies(
                    Formula::and(vec![
                        opentriangle(&vs, &y, &body_sc),
                        Formula::neq(y.clone(), x.clone()),
                    ]),
                    Formula::not(member(&y)),
                ),
            ),
        ]),
    )
}

fn check_dim(n: usize) -> Result<(), DefgenError> {
    if n == 0 {
        return Err(DefgenError::InvalidK {
            kind: GeometryKind::OpenTriangle,
            k: 0,
            min: 1,
        });
    }
    Ok(())
}

/// sepr(x,P) in dimension `n`: some open n-triangle around `x` holds no
/// other P-point. Free variable `x`.
pub fn sepr(n: usize) -> Result<Formula, DefgenError> {
    check_dim(n)?;
    Ok(sepr_with(&var("x"), n, &pred, &Scope::default()))
}

/// φ1 ∧ φ2 ∧ φ3 in dimension `n`: P is closed, consists of isolated points
/// and lies inside an n-triangle.
pub fn finiteness_sentence(n: usize) -> Result<Formula, DefgenError> {
    check_dim(n)?;
    let x = var("x");
    let sc = Scope::of(&[&x]);
    let phi1 = Formula::forall(
        "x",
        Formula::implies(Formula::not(pred(&x)), sepr_with(&x, n, &pred, &sc)),
    );
    let phi2 = Formula::forall("x", Formula::implies(pred(&x), sepr_with(&x, n, &pred, &sc)));
    let vs = xs(n);
    let mut inner = Scope::of(&vs.iter().collect::<Vec<_>>());
    let y = var(&inner.bind("y"));
    let names: Vec<&str> = vs.iter().map(Term::name).collect();
    let phi3 = Formula::exists_many(
        &names,
        Formula::and(vec![
            basis(&vs, &Scope::of(&vs.iter().collect::<Vec<_>>())),
            Formula::forall(
                y.name(),
                Formula::implies(pred(&y), opentriangle(&vs, &y, &inner)),
            ),
        ]),
    );
    Ok(Formula::and(vec![phi1, phi2, phi3]))
}

type Member<'a> = &'a dyn Fn(&Term) -> Formula;

/// Binds a fresh variable named after `base` and returns the quantified
/// formula built from it.
fn q<F: FnOnce(&Term, &mut Scope) -> Formula>(
    sc: &Scope,
    base: &str,
    wrap: fn(String, Formula) -> Formula,
    body: F,
) -> Formula {
    let mut inner = sc.clone();
    let name = inner.bind(base);
    let b = body(&var(&name), &mut inner);
    wrap(name, b)
}

fn ex(v: String, f: Formula) -> Formula {
    Formula::exists(v, f)
}

fn all(v: String, f: Formula) -> Formula {
    Formula::forall(v, f)
}

fn member_not(m: Member<'_>, u: &Term, r: &Term) -> Formula {
    Formula::and(vec![m(u), Formula::neq(u.clone(), r.clone())])
}

/// sequence(Q) ∧ discretely spaced ∧ discretely infinite ∧ has a zero ∧
/// ω-like, for the set defined by `m`.
fn omega_with(m: Member<'_>, sc: &Scope) -> Formula {
    let sequence = Formula::and(vec![
        q(sc, "x", ex, |x, _| m(x)),
        q(sc, "x", all, |x, s| {
            q(s, "y", all, |y, s| {
                q(s, "z", all, |z, _| {
                    Formula::implies(
                        Formula::and(vec![m(x), m(y), m(z)]),
                        collinear(x, y, z),
                    )
                })
            })
        }),
    ]);
    let spaced = q(sc, "s", all, |s, sc1| {
        q(sc1, "t", all, |t, sc2| {
            Formula::implies(
                Formula::and(vec![m(s), m(t), Formula::neq(s.clone(), t.clone())]),
                q(sc2, "u", ex, |u, sc3| {
                    Formula::and(vec![
                        Formula::neq(u.clone(), s.clone()),
                        bet(s, u, t),
                        q(sc3, "r", all, |r, _| {
                            Formula::implies(bstar(s, r, u), Formula::not(m(r)))
                        }),
                    ])
                }),
            )
        })
    });
    let infinite = q(sc, "s", ex, |s, sc1| {
        Formula::and(vec![
            m(s),
            q(sc1, "u", all, |u, sc2| {
                Formula::implies(
                    m(u),
                    q(sc2, "v", ex, |v, _| {
                        Formula::and(vec![member_not(m, v, u), bet(s, u, v)])
                    }),
                )
            }),
        ])
    });
    let zero = q(sc, "s", ex, |s, sc1| Formula::and(vec![m(s), no_sides(m, s, sc1)]));
    let omega = q(sc, "r", all, |r, sc1| {
        Formula::implies(
            q(sc1, "s", ex, |s, sc2| {
                q(sc2, "u", ex, |u, _| {
                    Formula::and(vec![member_not(m, s, r), member_not(m, u, r), bet(s, r, u)])
                })
            }),
            q(sc1, "s", ex, |s, sc2| {
                q(sc2, "u", ex, |u, sc3| {
                    Formula::and(vec![
                        member_not(m, s, r),
                        member_not(m, u, r),
                        bet(s, r, u),
                        q(sc3, "v", all, |v, _| {
                            Formula::implies(
                                Formula::and(vec![
                                    Formula::neq(v.clone(), r.clone()),
                                    bstar(s, v, u),
                                ]),
                                Formula::not(m(v)),
                            )
                        }),
                    ])
                })
            }),
        )
    });
    Formula::and(vec![sequence, spaced, infinite, zero, omega])
}

/// No two Q-points other than `s` have `s` between them.
fn no_sides(m: Member<'_>, s: &Term, sc: &Scope) -> Formula {
    Formula::not(q(sc, "u", ex, |u, sc2| {
        q(sc2, "v", ex, |v, _| {
            Formula::and(vec![member_not(m, u, s), member_not(m, v, s), bet(u, s, v)])
        })
    }))
}

/// φ_ω(P): P is an ω-like sequence.
pub fn omega_sentence() -> Formula {
    omega_with(&pred, &Scope::default())
}

/// Intersection of line p–py with line q–px contains `u`.
fn isect(u: &Term, p: &Term, q: &Term) -> Formula {
    Formula::and(vec![collinear(p, &py(), u), collinear(q, &px(), u)])
}

fn count_of(t: &TileType) -> Result<usize, DefgenError> {
    usize::try_from(tile_index(t)).map_err(|_| DefgenError::IndexTooLarge(*t))
}

/// ⋁_{t∈S} ∃^{=N(t)}w(P(w) ∧ β*(u,w,v)).
fn label_count(s: &TileSet, u: &Term, v: &Term, sc: &Scope) -> Result<Formula, DefgenError> {
    let mut inner = sc.with(&[u, v]);
    let w = var(&inner.bind("w"));
    let parts = s
        .canonical()
        .iter()
        .map(|t| {
            Ok(Formula::count_exists(
                count_of(t)?,
                w.name(),
                Formula::and(vec![pred(&w), bstar(u, &w, v)]),
            ))
        })
        .collect::<Result<Vec<_>, DefgenError>>()?;
    Ok(Formula::or(parts))
}

/// ∀p ∀p' ∀q ∀q' (successor pairs → ∀u ∀v (u, v intersection points of
/// (p,q), (p',q') → label count)). `succ(a, a', end, scope)` states that `a'`
/// follows `a` on the axis towards `end`; `first(a)` guards `a`.
fn labelling(
    s: &TileSet,
    first: &dyn Fn(&Term, &Term) -> Formula,
    succ: &dyn Fn(&Term, &Term, &Term, &Scope) -> Formula,
) -> Result<Formula, DefgenError> {
    let sc = Scope::default();
    let mut s1 = sc.clone();
    let p = var(&s1.bind("p"));
    let p1 = var(&s1.bind("p1"));
    let q_ = var(&s1.bind("q"));
    let q1 = var(&s1.bind("q1"));
    let u = var(&s1.bind("u"));
    let v = var(&s1.bind("v"));
    let count = label_count(s, &u, &v, &s1)?;
    let inner = Formula::forall(
        u.name(),
        Formula::implies(
            isect(&u, &p, &q_),
            Formula::forall(v.name(), Formula::implies(isect(&v, &p1, &q1), count)),
        ),
    );
    let sc_p = Scope::of(&[&p, &p1]);
    let sc_q = Scope::of(&[&p, &p1, &q_, &q1]);
    Ok(Formula::forall(
        p.name(),
        Formula::implies(
            first(&p, &px()),
            Formula::forall(
                p1.name(),
                Formula::implies(
                    succ(&p, &p1, &px(), &sc_p),
                    Formula::forall(
                        q_.name(),
                        Formula::implies(
                            first(&q_, &py()),
                            Formula::forall(
                                q1.name(),
                                Formula::implies(succ(&q_, &q1, &py(), &sc_q), inner),
                            ),
                        ),
                    ),
                ),
            ),
        ),
    ))
}

fn constants_in_p() -> Formula {
    Formula::and(vec![pred(&p0()), pred(&px()), pred(&py())])
}

fn non_collinear() -> Formula {
    Formula::not(collinear(&p0(), &px(), &py()))
}

/// Conditions (2)–(4) for one axis ending in `end`: the axis minus `end` is
/// ω-like with zero `p0`, and `end` is its endpoint.
fn axis_conditions(end: &Term) -> Formula {
    let open = |u: &Term| {
        Formula::and(vec![
            pred(u),
            collinear(&p0(), u, end),
            Formula::neq(u.clone(), end.clone()),
        ])
    };
    let closed = |u: &Term| Formula::and(vec![pred(u), collinear(&p0(), u, end)]);
    let sc = Scope::default();
    let endpoint = q(&sc, "q", all, |x, _| Formula::implies(open(x), bet(&p0(), x, end)));
    let end_1 = Formula::not(q(&sc, "s", ex, |s, sc1| {
        q(sc1, "t", ex, |t, _| Formula::and(vec![closed(s), closed(t), bstar(s, end, t)]))
    }));
    let end_2 = q(&sc, "y", all, |y, sc1| {
        q(sc1, "z", all, |z, sc2| {
            Formula::implies(
                Formula::and(vec![closed(y), closed(z), bstar(end, y, z)]),
                q(sc2, "v", ex, |v, _| Formula::and(vec![closed(v), bstar(end, v, y)])),
            )
        })
    });
    let zero = Formula::and(vec![open(&p0()), no_sides(&open, &p0(), &sc)]);
    Formula::and(vec![omega_with(&open, &sc), endpoint, end_1, end_2, zero])
}

/// φ_Cf^S: p0, px, py span a plane; both axes are ω-like sequences with
/// zero p0 and endpoints px, py; the axis lines meet; each intersection
/// point and its diagonal successor have N(t) P-points between them for
/// some t ∈ S.
pub fn frame_sentence_infinite(s: &TileSet) -> Result<Formula, DefgenError> {
    let open = |u: &Term, end: &Term| {
        Formula::and(vec![
            pred(u),
            collinear(&p0(), u, end),
            Formula::neq(u.clone(), end.clone()),
        ])
    };
    let sc = Scope::default();
    let meet = q(&sc, "p", all, |p, sc1| {
        Formula::implies(
            open(p, &px()),
            q(sc1, "q", all, |qq, sc2| {
                Formula::implies(open(qq, &py()), q(sc2, "u", ex, |u, _| isect(u, p, qq)))
            }),
        )
    });
    let succ = |a: &Term, a1: &Term, end: &Term, sc: &Scope| {
        Formula::and(vec![
            bet(&p0(), a, a1),
            open(a1, end),
            Formula::neq(a.clone(), a1.clone()),
            q(sc, "r", all, |r, _| {
                Formula::implies(bstar(a, r, a1), Formula::not(open(r, end)))
            }),
        ])
    };
    let labels = labelling(s, &|a, end| open(a, end), &succ)?;
    Ok(Formula::and(vec![
        constants_in_p(),
        non_collinear(),
        axis_conditions(&px()),
        axis_conditions(&py()),
        meet,
        labels,
    ]))
}

/// φ_fCf^S: p0, px, py span a plane; each axis has an interior P-point;
/// the lines from interior axis points meet; each intersection point and
/// its diagonal successor have N(t) P-points between them for some t ∈ S.
pub fn frame_sentence_finite(s: &TileSet) -> Result<Formula, DefgenError> {
    let interior = |u: &Term, end: &Term| Formula::and(vec![bstar(&p0(), u, end), pred(u)]);
    let sc = Scope::default();
    let nonempty = Formula::and(vec![
        q(&sc, "p", ex, |p, _| interior(p, &px())),
        q(&sc, "q", ex, |qq, _| interior(qq, &py())),
    ]);
    let meet = q(&sc, "p", all, |p, sc1| {
        Formula::implies(
            interior(p, &px()),
            q(sc1, "q", all, |qq, sc2| {
                Formula::implies(interior(qq, &py()), q(sc2, "u", ex, |u, _| isect(u, p, qq)))
            }),
        )
    });
    let first = |a: &Term, end: &Term| Formula::and(vec![bet(&p0(), a, end), pred(a)]);
    let succ = |a: &Term, a1: &Term, end: &Term, sc: &Scope| {
        Formula::and(vec![
            bstar(a, a1, end),
            bet(&p0(), a, a1),
            pred(a1),
            Formula::not(q(sc, "w", ex, |w, _| Formula::and(vec![bstar(a, w, a1), pred(w)]))),
        ])
    };
    let labels = labelling(s, &first, &succ)?;
    Ok(Formula::and(vec![
        constants_in_p(),
        non_collinear(),
        nonempty,
        meet,
        labels,
    ]))
}

/// φ_Dom(u): intersection points of the lines joining py to interior
/// x-axis P-points with those joining px to interior y-axis P-points, plus
/// the axis P-points other than px, py.
fn phi_dom(u: &Term, sc: &Scope) -> Formula {
    let mut inner = sc.with(&[u]);
    let x = var(&inner.bind("x"));
    let y = var(&inner.bind("y"));
    Formula::or(vec![
        Formula::exists_many(
            &[x.name(), y.name()],
            Formula::and(vec![
                pred(&x),
                pred(&y),
                bstar(&p0(), &x, &px()),
                bstar(&p0(), &y, &py()),
                bstar(&x, u, &py()),
                bstar(&y, u, &px()),
            ]),
        ),
        Formula::and(vec![
            Formula::neq(u.clone(), px()),
            Formula::neq(u.clone(), py()),
            pred(u),
            Formula::or(vec![bet(&p0(), u, &px()), bet(&p0(), u, &py())]),
        ]),
    ])
}

/// φ_H (towards `end` = px, from the axis `start` = py) or φ_V (swapped).
fn phi_step(u: &Term, v: &Term, start: &Term, end: &Term, sc: &Scope) -> Formula {
    let sc = sc.with(&[u, v]);
    let mut s1 = sc.clone();
    let x = var(&s1.bind("x"));
    let mut s2 = sc;
    let r = var(&s2.bind("r"));
    Formula::and(vec![
        Formula::exists(
            x.name(),
            Formula::and(vec![bet(&p0(), &x, start), bet(&x, u, v), bstar(u, v, end)]),
        ),
        Formula::forall(
            r.name(),
            Formula::implies(bstar(u, &r, v), Formula::not(phi_dom(&r, &s2))),
        ),
    ])
}

fn phi_h(u: &Term, v: &Term, sc: &Scope) -> Formula {
    phi_step(u, v, &py(), &px(), sc)
}

fn phi_v(u: &Term, v: &Term, sc: &Scope) -> Formula {
    phi_step(u, v, &px(), &py(), sc)
}

fn diagonal(u: &Term, v: &Term, sc: &Scope) -> Formula {
    let mut inner = sc.with(&[u, v]);
    let x = var(&inner.bind("x"));
    Formula::exists(
        x.name(),
        Formula::and(vec![phi_dom(&x, &inner), phi_h(u, &x, &inner), phi_v(&x, v, &inner)]),
    )
}

/// φ_{P_t}(u): exactly N(t) P-points lie strictly between `u` and its
/// diagonal successor.
fn phi_tile(t: &TileType, u: &Term, sc: &Scope) -> Result<Formula, DefgenError> {
    let mut inner = sc.with(&[u]);
    let z = var(&inner.bind("z"));
    let x = var(&inner.bind("x"));
    Ok(Formula::exists(
        z.name(),
        Formula::count_exists(
            count_of(t)?,
            x.name(),
            Formula::and(vec![
                phi_dom(&z, &inner),
                diagonal(u, &z, &inner),
                pred(&x),
                bstar(u, &x, &z),
            ]),
        ),
    ))
}

fn phi_dom_fin(u: &Term, sc: &Scope) -> Formula {
    let mut inner = sc.with(&[u]);
    let x = var(&inner.bind("x"));
    let y = var(&inner.bind("y"));
    Formula::and(vec![
        phi_dom(u, sc),
        Formula::exists_many(
            &[x.name(), y.name()],
            Formula::and(vec![
                phi_dom(&x, &inner),
                phi_dom(&y, &inner),
                phi_h(u, &x, &inner),
                phi_v(u, &y, &inner),
            ]),
        ),
    ])
}

/// φ^fin_H (`start` = py, `end` = px) or φ^fin_V (swapped): a grid step, or
/// the wrap from the last domain point of a line back to its axis point.
fn phi_step_fin(u: &Term, v: &Term, start: &Term, end: &Term, sc: &Scope) -> Formula {
    let mut inner = sc.with(&[u, v]);
    let x = var(&inner.bind("x"));
    Formula::or(vec![
        phi_step(u, v, start, end, sc),
        Formula::and(vec![
            bet(&p0(), v, start),
            bet(v, u, end),
            Formula::forall(
                x.name(),
                Formula::implies(bstar(u, &x, end), Formula::not(phi_dom_fin(&x, &inner))),
            ),
        ]),
    ])
}

fn uv() -> (Term, Term, Scope) {
    let (u, v) = (var("u"), var("v"));
    let sc = Scope::of(&[&u, &v]);
    (u, v, sc)
}

fn tile_slots(
    s: &TileSet,
    rels: &mut BTreeMap<String, (Vec<String>, Formula)>,
) -> Result<(), DefgenError> {
    let u = var("u");
    let sc = Scope::of(&[&u]);
    for t in s.canonical() {
        rels.insert(t.predicate(), (vec!["u".into()], phi_tile(&t, &u, &sc)?));
    }
    Ok(())
}

fn grid_relations(s: &TileSet) -> Result<BTreeMap<String, (Vec<String>, Formula)>, DefgenError> {
    let (u, v, sc) = uv();
    let mut rels = BTreeMap::new();
    let params = vec!["u".to_string(), "v".to_string()];
    rels.insert(H.to_string(), (params.clone(), phi_h(&u, &v, &sc)));
    rels.insert(V.to_string(), (params, phi_v(&u, &v, &sc)));
    tile_slots(s, &mut rels)?;
    Ok(rels)
}

/// The interpretation of S-labelled supergrids in S-labelled Cartesian
/// frames: φ_Dom, φ_H, φ_V and φ_{P_t}.
pub fn scheme_grid(s: &TileSet) -> Result<InterpretationScheme, DefgenError> {
    let u = var("u");
    let dom = phi_dom(&u, &Scope::of(&[&u]));
    Ok(InterpretationScheme::new(
        grid_vocabulary(s),
        frame_vocabulary(),
        "u",
        dom,
        grid_relations(s)?,
    )?)
}

/// The interpretation of S-labelled tori in S-labelled finite Cartesian
/// frames: φ^fin_Dom, φ^fin_H, φ^fin_V and φ^fin_{P_t} = φ_{P_t}.
pub fn scheme_torus(s: &TileSet) -> Result<InterpretationScheme, DefgenError> {
    let (u, v, sc) = uv();
    let mut rels = BTreeMap::new();
    let params = vec!["u".to_string(), "v".to_string()];
    rels.insert(H.to_string(), (params.clone(), phi_step_fin(&u, &v, &py(), &px(), &sc)));
    rels.insert(V.to_string(), (params, phi_step_fin(&u, &v, &px(), &py(), &sc)));
    tile_slots(s, &mut rels)?;
    Ok(InterpretationScheme::new(
        grid_vocabulary(s),
        frame_vocabulary(),
        "u",
        phi_dom_fin(&u, &Scope::of(&[&u])),
        rels,
    )?)
}

/// [`scheme_grid`] plus φ_R(u,v): distinct domain points on the p0–py line,
/// `u` nearer p0.
pub fn scheme_recurrence(s: &TileSet) -> Result<InterpretationScheme, DefgenError> {
    let (u, v, sc) = uv();
    let mut rels = grid_relations(s)?;
    rels.insert(
        R.to_string(),
        (
            vec!["u".into(), "v".into()],
            Formula::and(vec![
                phi_dom(&u, &sc),
                phi_dom(&v, &sc),
                Formula::neq(u.clone(), v.clone()),
                collinear(&p0(), &u, &py()),
                collinear(&p0(), &v, &py()),
                bet(&p0(), &u, &v),
            ]),
        ),
    );
    Ok(InterpretationScheme::new(
        recurrence_vocabulary(s),
        frame_vocabulary(),
        "u",
        phi_dom(&u, &Scope::of(&[&u])),
        rels,
    )?)
}

/// ψ_S := φ_Cf^S ∧ I(φ_S).
pub fn reduction_sentence_grid(s: &TileSet) -> Result<Formula, DefgenError> {
    let translated = translate(&scheme_grid(s)?, &tiling::tiling_sentence(s))?;
    Ok(Formula::and(vec![frame_sentence_infinite(s)?, translated]))
}

/// γ_S := φ_fCf^S ∧ J(φ_S).
pub fn reduction_sentence_torus(s: &TileSet) -> Result<Formula, DefgenError> {
    let translated = translate(&scheme_torus(s)?, &tiling::tiling_sentence(s))?;
    Ok(Formula::and(vec![frame_sentence_finite(s)?, translated]))
}

/// Named generator outputs that are single formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construct {
    Geometry(GeometryKind, usize),
    Sepr(usize),
    Finiteness(usize),
    Omega,
    FrameInfinite(TileSet),
    FrameFinite(TileSet),
    PsiS(TileSet),
    GammaS(TileSet),
}

/// A generator output with its declared vocabulary and free variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedSentence {
    pub construct: Construct,
    pub formula: Formula,
    pub vocabulary: Vocabulary,
    pub free: Vec<String>,
}

impl GeneratedSentence {
    pub fn generate(construct: Construct) -> Result<GeneratedSentence, DefgenError> {
        let (formula, vocabulary, free) = match &construct {
            Construct::Geometry(kind, k) => (
                geometry_formula(*kind, *k)?,
                geometry_vocabulary(),
                geometry_params(*kind, *k),
            ),
            Construct::Sepr(n) => (sepr(*n)?, predicate_vocabulary(), vec!["x".into()]),
            Construct::Finiteness(n) => (finiteness_sentence(*n)?, predicate_vocabulary(), vec![]),
            Construct::Omega => (omega_sentence(), predicate_vocabulary(), vec![]),
            Construct::FrameInfinite(s) => (frame_sentence_infinite(s)?, frame_vocabulary(), vec![]),
            Construct::FrameFinite(s) => (frame_sentence_finite(s)?, frame_vocabulary(), vec![]),
            Construct::PsiS(s) => (reduction_sentence_grid(s)?, frame_vocabulary(), vec![]),
            Construct::GammaS(s) => (reduction_sentence_torus(s)?, frame_vocabulary(), vec![]),
        };
        Ok(GeneratedSentence {
            construct,
            formula,
            vocabulary,
            free,
        })
    }
}
