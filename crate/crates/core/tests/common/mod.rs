//! Brute-force re-derivations from raw rational coordinates. Nothing here
//! goes through `Space`, `Length` or the library's geometry helpers.

#![allow(dead_code)]

use num_traits::{One, Signed, Zero};

use equitower::{NormSpec, Point, Rational, RelationId, Scalar};

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn xy(p: &Point) -> (Rational, Rational) {
    match (&p.x, &p.y) {
        (Scalar::Exact(x), Scalar::Exact(y)) => (x.clone(), y.clone()),
        _ => panic!("reference oracles take exact points"),
    }
}

/// A distance in a form with exact comparisons: the distance itself for the
/// polygonal norms, its square for the Euclidean one.
#[derive(Clone, Debug, PartialEq)]
pub enum Dist {
    Lin(Rational),
    Sq(Rational),
}

pub fn dist(norm: &NormSpec, a: &Point, b: &Point) -> Dist {
    let (ax, ay) = xy(a);
    let (bx, by) = xy(b);
    let dx = (bx - ax).abs();
    let dy = (by - ay).abs();
    match norm {
        NormSpec::L1 => Dist::Lin(dx + dy),
        NormSpec::Linf => Dist::Lin(if dx > dy { dx } else { dy }),
        NormSpec::L2 => Dist::Sq(&dx * &dx + &dy * &dy),
        NormSpec::Lp(_) => panic!("reference oracles cover l1, l2 and linf"),
    }
}

impl Dist {
    /// Multiply the distance by `s ≥ 0`.
    pub fn scale(&self, s: &Rational) -> Dist {
        match self {
            Dist::Lin(v) => Dist::Lin(v * s),
            Dist::Sq(v) => Dist::Sq(v * s * s),
        }
    }

    fn raw(&self) -> &Rational {
        match self {
            Dist::Lin(v) | Dist::Sq(v) => v,
        }
    }

    pub fn le(&self, o: &Dist) -> bool {
        self.raw() <= o.raw()
    }

    pub fn is_zero(&self) -> bool {
        self.raw().is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let v = self.raw();
        let f = v.numer().to_string().parse::<f64>().unwrap()
            / v.denom().to_string().parse::<f64>().unwrap();
        match self {
            Dist::Lin(_) => f,
            Dist::Sq(_) => f.sqrt(),
        }
    }
}

/// `sqrt(p) + sqrt(q)` compared with `sqrt(s)`, all arguments nonnegative.
pub fn sqrt_sum_cmp(p: &Rational, q: &Rational, s: &Rational) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    // sqrt p + sqrt q ? sqrt s  <=>  2 sqrt(pq) ? s - p - q
    let rhs = s - p - q;
    if rhs.is_negative() {
        return Greater;
    }
    let lhs = r(4, 1) * p * q;
    let rhs2 = &rhs * &rhs;
    lhs.cmp(&rhs2)
}

/// `d1 + d2` compared with `d3`.
pub fn sum_cmp(d1: &Dist, d2: &Dist, d3: &Dist) -> std::cmp::Ordering {
    match (d1, d2, d3) {
        (Dist::Lin(a), Dist::Lin(b), Dist::Lin(c)) => (a + b).cmp(c),
        (Dist::Sq(a), Dist::Sq(b), Dist::Sq(c)) => sqrt_sum_cmp(a, b, c),
        _ => panic!("mixed distance forms"),
    }
}

pub fn same(a: &Point, b: &Point) -> bool {
    xy(a) == xy(b)
}

fn lerp(a: &Point, b: &Point, t: &Rational) -> (Rational, Rational) {
    let (ax, ay) = xy(a);
    let (bx, by) = xy(b);
    (&ax + t * (bx - &ax), &ay + t * (by - &ay))
}

pub fn midpoint_ref(a: &Point, b: &Point, c: &Point) -> bool {
    let (ax, ay) = xy(a);
    let (bx, by) = xy(b);
    let (cx, cy) = xy(c);
    !same(a, c) && &ax + &cx == r(2, 1) * bx && &ay + &cy == r(2, 1) * by
}

/// Solves `b = a + t(c − a)` for `t` and checks `0 ≤ t ≤ 1`.
pub fn between_ref(a: &Point, b: &Point, c: &Point) -> bool {
    let (ax, ay) = xy(a);
    let (bx, by) = xy(b);
    let (cx, cy) = xy(c);
    let (ux, uy) = (&cx - &ax, &cy - &ay);
    if ux.is_zero() && uy.is_zero() {
        return same(a, b);
    }
    let t = if !ux.is_zero() {
        (&bx - &ax) / &ux
    } else {
        (&by - &ay) / &uy
    };
    if t.is_negative() || t > Rational::one() {
        return false;
    }
    lerp(a, c, &t) == (bx, by)
}

pub fn gamma_ref(norm: &NormSpec, a: &Point, b: &Point, c: &Point) -> bool {
    !same(a, b)
        && !same(b, c)
        && !same(a, c)
        && sum_cmp(&dist(norm, a, b), &dist(norm, b, c), &dist(norm, a, c)).is_eq()
}

/// `d(a,b) + d(b,c) − d(a,c) ≤ eps·d(a,b)`.
pub fn gamma_defect_within(
    norm: &NormSpec,
    a: &Point,
    b: &Point,
    c: &Point,
    eps: &Rational,
) -> bool {
    let keep = Rational::one() - eps;
    let lhs1 = dist(norm, a, b).scale(&keep);
    sum_cmp(&lhs1, &dist(norm, b, c), &dist(norm, a, c)).is_le()
}

pub fn psi_ref(
    norm: &NormSpec,
    n: u32,
    k: u32,
    a: &Point,
    b: &Point,
    c: &Point,
    d: &Point,
) -> bool {
    if same(a, b) || same(c, d) {
        return false;
    }
    let unit = r(1, 1i64 << k);
    let dab = dist(norm, a, b);
    let dcd = dist(norm, c, d);
    let lo = dab.scale(&(&unit * r((n as i64 - 1).abs(), 1)));
    let hi = dab.scale(&(&unit * r(n as i64 + 1, 1)));
    lo.le(&dcd) && dcd.le(&hi)
}

pub fn reference(norm: &NormSpec, id: RelationId, p: &[Point]) -> bool {
    let eqd = |a: &Dist, b: &Dist| a == b;
    match id {
        RelationId::Equiv2 => eqd(
            &dist(norm, &p[0], &p[1]),
            &dist(norm, &p[2], &p[3]).scale(&r(2, 1)),
        ),
        RelationId::Phi(0) => {
            let xa = dist(norm, &p[2], &p[0]);
            eqd(&xa, &dist(norm, &p[2], &p[1]))
                && eqd(&dist(norm, &p[0], &p[1]), &xa.scale(&r(2, 1)))
        }
        RelationId::Phi(_) => panic!("no reference for PHI above 0"),
        RelationId::Midpoint => midpoint_ref(&p[0], &p[1], &p[2]),
        RelationId::Alpha(n) => {
            !same(&p[0], &p[1]) && lerp(&p[0], &p[1], &r(n as i64, 1)) == xy(&p[2])
        }
        RelationId::Beta(k) => {
            !same(&p[0], &p[1]) && lerp(&p[0], &p[1], &r(1, 1i64 << k)) == xy(&p[2])
        }
        RelationId::Psi(n, k) => psi_ref(norm, n, k, &p[0], &p[1], &p[2], &p[3]),
        RelationId::Gamma => gamma_ref(norm, &p[0], &p[1], &p[2]),
        RelationId::Between => between_ref(&p[0], &p[1], &p[2]),
        RelationId::Delta(n) => {
            let ac = dist(norm, &p[0], &p[2]);
            let ab = dist(norm, &p[0], &p[1]);
            if n == 1 {
                eqd(&ac, &ab)
            } else {
                ac.le(&ab.scale(&r(n as i64, 1)))
            }
        }
        RelationId::Neq => !same(&p[0], &p[1]),
        RelationId::Le => dist(norm, &p[0], &p[1]).le(&dist(norm, &p[2], &p[3])),
        RelationId::Collinear => {
            let (ax, ay) = xy(&p[0]);
            let (bx, by) = xy(&p[1]);
            let (cx, cy) = xy(&p[2]);
            ((&bx - &ax) * (&cy - &ay) - (&by - &ay) * (&cx - &ax)).is_zero()
        }
        RelationId::Parallelogram => {
            let (ax, ay) = xy(&p[0]);
            let (bx, by) = xy(&p[1]);
            let (cx, cy) = xy(&p[2]);
            let (dx, dy) = xy(&p[3]);
            let collinear = ((&bx - &ax) * (&cy - &ay) - (&by - &ay) * (&cx - &ax)).is_zero();
            &bx - &ax == &cx - &dx && &by - &ay == &cy - &dy && !collinear
        }
    }
}

/// Every relation id with an oracle, indices within the ranges the suites use.
pub fn oracle_ids() -> Vec<RelationId> {
    let mut v = vec![
        RelationId::Equiv2,
        RelationId::Phi(0),
        RelationId::Midpoint,
        RelationId::Gamma,
        RelationId::Between,
        RelationId::Neq,
        RelationId::Le,
        RelationId::Collinear,
        RelationId::Parallelogram,
    ];
    v.extend((1..=6).map(RelationId::Alpha));
    v.extend((1..=4).map(RelationId::Beta));
    v.extend((1..=8).map(RelationId::Delta));
    for n in 1..=8 {
        for k in 1..=4 {
            v.push(RelationId::Psi(n, k));
        }
    }
    v
}

pub fn polygonal_and_euclidean() -> [NormSpec; 3] {
    [NormSpec::L1, NormSpec::L2, NormSpec::Linf]
}

pub mod gen {
    use equitower::formula::{Bound, Countable, Formula, IndexExpr, SchemaRef, Term};
    use equitower::{Point, RelationKind};
    use rand::Rng;

    use super::r;

    const VARS: [&str; 8] = ["a", "b", "c", "d", "x", "y", "m1", "z0"];
    const IDX: [&str; 3] = ["n", "k", "j"];
    const BOUNDS: [Bound; 5] = [Bound::K, Bound::N, Bound::Depth, Bound::Chain, Bound::Phi];

    fn term<R: Rng>(rng: &mut R) -> Term {
        if rng.random_bool(0.15) {
            let c = |rng: &mut R| r(rng.random_range(-40..=40), rng.random_range(1..=9));
            Term::Const(Point::exact(c(rng), c(rng)))
        } else {
            Term::var(VARS[rng.random_range(0..VARS.len())])
        }
    }

    fn index<R: Rng>(rng: &mut R, depth: u32) -> IndexExpr {
        match if depth == 0 {
            rng.random_range(0..2)
        } else {
            rng.random_range(0..4)
        } {
            0 => IndexExpr::Lit(rng.random_range(0..20)),
            1 => IndexExpr::var(IDX[rng.random_range(0..IDX.len())]),
            2 => IndexExpr::Add(
                Box::new(index(rng, depth - 1)),
                Box::new(index(rng, depth - 1)),
            ),
            _ => IndexExpr::Pow2(Box::new(index(rng, depth - 1))),
        }
    }

    fn atom<R: Rng>(rng: &mut R) -> Formula {
        match rng.random_range(0..3) {
            0 => Formula::Equi(term(rng), term(rng), term(rng), term(rng)),
            1 => Formula::Eq(term(rng), term(rng)),
            _ => {
                let kind = RelationKind::ALL[rng.random_range(0..RelationKind::ALL.len())];
                Formula::Rel(SchemaRef {
                    kind,
                    idx: (0..kind.index_arity()).map(|_| index(rng, 2)).collect(),
                    terms: (0..kind.term_arity()).map(|_| term(rng)).collect(),
                })
            }
        }
    }

    /// A random well-formed formula with connectives nested at most `depth` deep.
    pub fn formula<R: Rng>(rng: &mut R, depth: u32) -> Formula {
        if depth == 0 || rng.random_bool(0.25) {
            return atom(rng);
        }
        let sub = |rng: &mut R| Box::new(formula(rng, depth - 1));
        let vars = |rng: &mut R| -> Vec<String> {
            (0..rng.random_range(1..=3))
                .map(|_| VARS[rng.random_range(0..VARS.len())].to_string())
                .collect()
        };
        match rng.random_range(0..8) {
            0 => Formula::Not(sub(rng)),
            1 => Formula::And(
                (0..rng.random_range(0..4))
                    .map(|_| formula(rng, depth - 1))
                    .collect(),
            ),
            2 => Formula::Or(
                (0..rng.random_range(0..4))
                    .map(|_| formula(rng, depth - 1))
                    .collect(),
            ),
            3 => Formula::Implies(sub(rng), sub(rng)),
            4 => Formula::Exists(vars(rng), sub(rng)),
            5 => Formula::ForAll(vars(rng), sub(rng)),
            k => {
                let c = Countable {
                    var: IDX[rng.random_range(0..IDX.len())].to_string(),
                    from: rng.random_range(0..3),
                    bound: BOUNDS[rng.random_range(0..BOUNDS.len())],
                    body: sub(rng),
                };
                if k == 6 {
                    Formula::BigAnd(c)
                } else {
                    Formula::BigOr(c)
                }
            }
        }
    }
}
