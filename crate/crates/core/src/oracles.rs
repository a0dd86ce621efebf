//! Analytic ground truth for every defined relation, computed from
//! coordinates. These are what formula evaluation is checked against.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{affine_combination, midpoint};
use crate::point::Point;
use crate::relation::RelationId;
use crate::scalar::{dyadic, int, rational_to_f64, Backend, Rational, Scalar};
use crate::space::{Length, NormSpec, Space};

/// `d(a,b) = 2·d(c,d)`.
pub fn oracle_equiv2(space: &Space, a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    space.len_eq(&space.dist(a, b), &space.dist(c, d).scale(&int(2)))
}

/// `xa ≡ xb ∧ d(a,b) = 2·d(x,a)`: `x` is a metric midpoint of `a` and `b`.
pub fn oracle_phi0(space: &Space, a: &Point, b: &Point, x: &Point) -> bool {
    let xa = space.dist(x, a);
    space.len_eq(&xa, &space.dist(x, b)) && space.len_eq(&space.dist(a, b), &xa.scale(&int(2)))
}

/// `M(abc)`: `a + c = 2b` and `a ≠ c`. Affine, so independent of the norm.
pub fn oracle_midpoint(space: &Space, a: &Point, b: &Point, c: &Point) -> bool {
    !space.same_point(a, c) && space.same_point(&midpoint(a, c), b)
}

/// `x = a + n(b − a)` with `a ≠ b`.
pub fn oracle_alpha(space: &Space, n: u32, a: &Point, b: &Point, x: &Point) -> bool {
    !space.same_point(a, b) && space.same_point(x, &affine_combination(a, b, &int(n as i64)))
}

/// `y = a + 2^-k (b − a)` with `a ≠ b`.
pub fn oracle_beta(space: &Space, k: u32, a: &Point, b: &Point, y: &Point) -> bool {
    !space.same_point(a, b) && space.same_point(y, &affine_combination(a, b, &dyadic(k)))
}

/// Some `e` has `d(c,e) = n·2^-k·d(a,b)` and `d(d,e) = 2^-k·d(a,b)`, with
/// `a ≠ b` and `c ≠ d`. In a normed plane that is the annulus condition
/// `|R − r| ≤ d(c,d) ≤ R + r`.
pub fn oracle_psi(
    space: &Space,
    n: u32,
    k: u32,
    a: &Point,
    b: &Point,
    c: &Point,
    d: &Point,
) -> bool {
    if space.same_point(a, b) || space.same_point(c, d) {
        return false;
    }
    psi_annulus(space, n, k, &space.dist(a, b), &space.dist(c, d))
}

/// `|R − r| ≤ d(c,d) ≤ R + r` with `R = n·2^-k·d(a,b)` and `r = 2^-k·d(a,b)`.
pub fn psi_annulus(space: &Space, n: u32, k: u32, dab: &Length, dcd: &Length) -> bool {
    let unit = dab.scale(&dyadic(k));
    let lower = unit.scale(&int((n as i64 - 1).abs()));
    if !space.len_le(&lower, dcd) {
        return false;
    }
    space.len_le(dcd, &unit.scale(&int(n as i64 + 1)))
}

/// Pairwise distinct with `d(a,b) + d(b,c) = d(a,c)`.
pub fn oracle_gamma(space: &Space, a: &Point, b: &Point, c: &Point) -> bool {
    if space.same_point(a, b) || space.same_point(b, c) || space.same_point(a, c) {
        return false;
    }
    space
        .sum_cmp(&space.dist(a, b), &space.dist(b, c), &space.dist(a, c))
        .is_eq()
}

/// Affine betweenness: `b = a + t(c − a)` for some `t ∈ [0,1]`.
pub fn oracle_between(space: &Space, a: &Point, b: &Point, c: &Point) -> bool {
    match space.backend {
        Backend::Exact => {
            if a == c {
                return a == b;
            }
            if !Point::cross(a, b, c).is_zero() {
                return false;
            }
            let ab = b.sub(a);
            let ac = c.sub(a);
            let dot = &(&ab.x * &ac.x) + &(&ab.y * &ac.y);
            let len2 = &(&ac.x * &ac.x) + &(&ac.y * &ac.y);
            match (dot, len2) {
                (Scalar::Exact(t), Scalar::Exact(l)) => !t.is_negative() && t <= l,
                _ => unreachable!(),
            }
        }
        Backend::Float => {
            // Euclidean triangle equality is affine betweenness.
            let e = Space::new(NormSpec::L2, Backend::Float, space.tolerance).expect("l2 float");
            e.sum_cmp(&e.dist(a, b), &e.dist(b, c), &e.dist(a, c))
                .is_eq()
        }
    }
}

/// `d(a,c) ≤ n·d(a,b)`: a chain of `n` steps of length `d(a,b)` reaches `c`.
///
/// A single step reaches exactly the sphere, so `n = 1` means `d(a,c) = d(a,b)`.
pub fn oracle_delta(space: &Space, n: u32, a: &Point, b: &Point, c: &Point) -> bool {
    let ac = space.dist(a, c);
    let ab = space.dist(a, b);
    if n == 1 {
        space.len_eq(&ac, &ab)
    } else {
        space.len_le(&ac, &ab.scale(&int(n as i64)))
    }
}

pub fn oracle_distinct(space: &Space, a: &Point, b: &Point) -> bool {
    !space.same_point(a, b)
}

/// `d(a,b) ≤ d(c,d)`.
pub fn oracle_le(space: &Space, a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    space.len_le(&space.dist(a, b), &space.dist(c, d))
}

pub fn oracle_collinear(space: &Space, a: &Point, b: &Point, c: &Point) -> bool {
    match Point::cross(a, b, c) {
        Scalar::Exact(v) => v.is_zero(),
        Scalar::Float(v) => {
            let e = |p: &Point, q: &Point| {
                let (dx, dy) = p.sub(q).to_f64_pair();
                dx.hypot(dy)
            };
            let scale = 1f64.max(e(b, a) * e(c, a));
            v.abs() <= space.tolerance * scale
        }
    }
}

/// `abcd` is a nondegenerate parallelogram: `b − a = c − d`, not collinear.
pub fn oracle_parallelogram(space: &Space, a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    space.same_point(&b.sub(a).add(d), c) && !oracle_collinear(space, a, b, c)
}

/// Dispatches on a relation id. `PHI(n)` has an oracle only at `n = 0`.
pub fn oracle(space: &Space, id: RelationId, pts: &[&Point]) -> Result<bool> {
    if pts.len() != id.term_arity() {
        return Err(Error::Arity {
            relation: id.to_string(),
            what: "points",
            expected: id.term_arity(),
            found: pts.len(),
        });
    }
    space.check_all(pts)?;
    let p = pts;
    Ok(match id {
        RelationId::Equiv2 => oracle_equiv2(space, p[0], p[1], p[2], p[3]),
        RelationId::Phi(0) => oracle_phi0(space, p[0], p[1], p[2]),
        RelationId::Phi(_) => return Err(Error::NoOracle(id.to_string())),
        RelationId::Midpoint => oracle_midpoint(space, p[0], p[1], p[2]),
        RelationId::Alpha(n) => oracle_alpha(space, n, p[0], p[1], p[2]),
        RelationId::Beta(k) => oracle_beta(space, k, p[0], p[1], p[2]),
        RelationId::Psi(n, k) => oracle_psi(space, n, k, p[0], p[1], p[2], p[3]),
        RelationId::Gamma => oracle_gamma(space, p[0], p[1], p[2]),
        RelationId::Between => oracle_between(space, p[0], p[1], p[2]),
        RelationId::Delta(n) => oracle_delta(space, n, p[0], p[1], p[2]),
        RelationId::Neq => oracle_distinct(space, p[0], p[1]),
        RelationId::Le => oracle_le(space, p[0], p[1], p[2], p[3]),
        RelationId::Collinear => oracle_collinear(space, p[0], p[1], p[2]),
        RelationId::Parallelogram => oracle_parallelogram(space, p[0], p[1], p[2], p[3]),
    })
}

/// The metric-betweenness defect `d(a,b) + d(b,c) − d(a,c)` as a double.
pub fn gamma_defect_f64(space: &Space, a: &Point, b: &Point, c: &Point) -> f64 {
    space.dist(a, b).to_f64() + space.dist(b, c).to_f64() - space.dist(a, c).to_f64()
}

/// Whether the defect exceeds `eps·d(a,b)`, decided exactly where possible.
pub fn gamma_defect_exceeds(
    space: &Space,
    a: &Point,
    b: &Point,
    c: &Point,
    eps: &Rational,
) -> bool {
    // d(a,b) + d(b,c) − d(a,c) > eps·d(a,b)  <=>  (1 − eps)·d(a,b) + d(b,c) > d(a,c)
    let one_minus = Rational::from_integer(1.into()) - eps;
    if one_minus.is_negative() {
        let lhs =
            space.dist(a, b).to_f64() * rational_to_f64(&one_minus) + space.dist(b, c).to_f64();
        return lhs > space.dist(a, c).to_f64();
    }
    space
        .sum_cmp(
            &space.dist(a, b).scale(&one_minus),
            &space.dist(b, c),
            &space.dist(a, c),
        )
        .is_gt()
}
