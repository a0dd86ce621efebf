//! Distances, the primitive equidistance relation, and the few constructions
//! (affine combinations, sphere intersections, ray transport) that oracles and
//! closures are built from.

use std::f64::consts::TAU;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::point::Point;
use crate::scalar::{rat, rational_to_f64, Backend, Rational, Scalar};
use crate::space::{Length, NormSpec, RatioValue, Space};

impl Space {
    /// The norm of a displacement vector.
    pub fn norm_of(&self, v: &Point) -> Length {
        self.dist(&Point::origin(v.backend()), v)
    }

    /// Distance without the backend check; callers hold points of this space.
    pub fn dist(&self, a: &Point, b: &Point) -> Length {
        match (&a.x, &a.y, &b.x, &b.y) {
            (Scalar::Exact(ax), Scalar::Exact(ay), Scalar::Exact(bx), Scalar::Exact(by)) => {
                let dx = (ax - bx).abs();
                let dy = (ay - by).abs();
                match self.norm {
                    NormSpec::L1 => Length::Rational(dx + dy),
                    NormSpec::Linf => Length::Rational(dx.max(dy)),
                    NormSpec::L2 => Length::SqrtOf(&dx * &dx + &dy * &dy),
                    NormSpec::Lp(_) => unreachable!("exact lp spaces are rejected at construction"),
                }
            }
            _ => {
                let dx = (a.x.to_f64() - b.x.to_f64()).abs();
                let dy = (a.y.to_f64() - b.y.to_f64()).abs();
                Length::Float(norm_f64(&self.norm, dx, dy))
            }
        }
    }

    pub fn check(&self, p: &Point) -> Result<()> {
        if p.x.backend() != self.backend || p.y.backend() != self.backend {
            return Err(Error::BackendMismatch {
                expected: self.backend.name(),
                found: p.backend().name(),
            });
        }
        Ok(())
    }

    pub fn check_all(&self, pts: &[&Point]) -> Result<()> {
        pts.iter().try_for_each(|p| self.check(p))
    }

    /// Point equality: exact coordinates, or distance within tolerance.
    pub fn same_point(&self, a: &Point, b: &Point) -> bool {
        match self.backend {
            Backend::Exact => a == b,
            Backend::Float => self.len_is_zero(&self.dist(a, b)),
        }
    }

    pub fn equi(&self, a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
        self.len_eq(&self.dist(a, b), &self.dist(c, d))
    }

    /// Lifts an exact rational into this space's scalar backend.
    pub fn scalar(&self, r: Rational) -> Scalar {
        Scalar::from_rational(r, self.backend)
    }

    pub fn point(&self, x: Rational, y: Rational) -> Point {
        Point {
            x: self.scalar(x),
            y: self.scalar(y),
        }
    }

    /// Length value of an exact rational in this space's representation.
    pub fn length(&self, r: Rational) -> Length {
        match (self.backend, &self.norm) {
            (Backend::Float, _) => Length::Float(rational_to_f64(&r)),
            (Backend::Exact, NormSpec::L2) => Length::SqrtOf(&r * &r),
            (Backend::Exact, _) => Length::Rational(r),
        }
    }
}

fn norm_f64(norm: &NormSpec, dx: f64, dy: f64) -> f64 {
    match norm {
        NormSpec::L1 => dx + dy,
        NormSpec::L2 => dx.hypot(dy),
        NormSpec::Linf => dx.max(dy),
        NormSpec::Lp(p) => {
            let m = dx.max(dy);
            if m == 0.0 {
                return 0.0;
            }
            let p = rational_to_f64(p);
            m * ((dx / m).powf(p) + (dy / m).powf(p)).powf(1.0 / p)
        }
    }
}

/// `‖a − b‖` under the space's norm.
pub fn distance(space: &Space, a: &Point, b: &Point) -> Result<Length> {
    space.check_all(&[a, b])?;
    Ok(space.dist(a, b))
}

/// The primitive `ab ≡ cd`.
pub fn equidistant(space: &Space, a: &Point, b: &Point, c: &Point, d: &Point) -> Result<bool> {
    space.check_all(&[a, b, c, d])?;
    Ok(space.equi(a, b, c, d))
}

/// `d(a,b) = q·d(c,d)` for a nonnegative rational `q`.
pub fn scaled_equidistant(
    space: &Space,
    a: &Point,
    b: &Point,
    q: &Rational,
    c: &Point,
    d: &Point,
) -> Result<bool> {
    space.check_all(&[a, b, c, d])?;
    if q.is_negative() {
        return Err(Error::Precondition(
            "scale factor must be nonnegative".into(),
        ));
    }
    Ok(space.len_eq(&space.dist(a, b), &space.dist(c, d).scale(q)))
}

/// `a + t(b − a)`.
pub fn affine_combination(a: &Point, b: &Point, t: &Rational) -> Point {
    a.add(&b.sub(a).scale(t))
}

pub fn midpoint(a: &Point, b: &Point) -> Point {
    affine_combination(a, b, &rat(1, 2))
}

/// The point at distance `dist` from `origin` on the ray through `through`.
///
/// `Ok(None)` when the position is irrational on the exact backend (L2 with a
/// non-square distance ratio) or when the ray is undefined (`origin == through`).
pub fn ray_point(
    space: &Space,
    origin: &Point,
    through: &Point,
    dist: &Length,
) -> Result<Option<Point>> {
    space.check_all(&[origin, through])?;
    let base = space.dist(origin, through);
    if space.len_is_zero(&base) {
        return Ok(None);
    }
    let dir = through.sub(origin);
    Ok(match dist.ratio(&base) {
        Some(RatioValue::Exact(q)) => Some(origin.add(&dir.scale(&q))),
        Some(RatioValue::Float(f)) => Some(origin.add(&dir.scale_by(&Scalar::Float(f)))),
        None => None,
    })
}

/// A point `e` with `d(c,e) = big_r` and `d(d,e) = small_r`.
///
/// Exact for L1/Linf (edge walk over the polygonal spheres), closed form for
/// float L2, and a bracketed angular solve for the other float norms. Exact L2
/// is refused because the intersection is generally irrational.
pub fn sphere_intersection_point(
    space: &Space,
    c: &Point,
    big_r: &Length,
    d: &Point,
    small_r: &Length,
) -> Result<Point> {
    space.check_all(&[c, d])?;
    if big_r.to_f64() < 0.0 || small_r.to_f64() < 0.0 {
        return Err(Error::Precondition("radii must be nonnegative".into()));
    }
    let dcd = space.dist(c, d);
    let reachable = space.sum_cmp(big_r, small_r, &dcd).is_ge()
        && space.sum_cmp(small_r, &dcd, big_r).is_ge()
        && space.sum_cmp(big_r, &dcd, small_r).is_ge();
    if !reachable {
        return Err(Error::NoIntersection(format!(
            "|R - r| <= d(c,d) <= R + r fails for R={big_r}, r={small_r}, d(c,d)={dcd}"
        )));
    }
    let e = match (space.backend, &space.norm) {
        (Backend::Exact, NormSpec::L2) => {
            return Err(Error::ExactL2Refused("sphere intersection"));
        }
        (Backend::Exact, _) => polygon_sphere_intersection(space, c, big_r, d, small_r)?,
        (Backend::Float, NormSpec::L2) => circle_intersection_f64(space, c, big_r, d, small_r),
        (Backend::Float, _) => angular_solve(space, c, big_r, d, small_r)?,
    };
    if !(space.len_eq(&space.dist(c, &e), big_r) && space.len_eq(&space.dist(d, &e), small_r)) {
        return Err(Error::SolverDiverged);
    }
    Ok(e)
}

fn rational_radius(l: &Length) -> Rational {
    match l {
        Length::Rational(r) => r.clone(),
        other => Rational::from_float(other.to_f64()).unwrap_or_default(),
    }
}

/// Vertices of the polygonal sphere of radius `r` about `c`, counterclockwise
/// from the +x direction.
fn sphere_polygon(norm: &NormSpec, c: &Point, r: &Rational) -> Vec<Point> {
    let z = Rational::zero();
    let offsets: [(Rational, Rational); 4] = match norm {
        NormSpec::L1 => [
            (r.clone(), z.clone()),
            (z.clone(), r.clone()),
            (-r, z.clone()),
            (z, -r),
        ],
        NormSpec::Linf => [
            (r.clone(), r.clone()),
            (-r, r.clone()),
            (-r, -r),
            (r.clone(), -r),
        ],
        _ => unreachable!("polygonal norms only"),
    };
    offsets
        .into_iter()
        .map(|(dx, dy)| c.add(&Point::exact(dx, dy)))
        .collect()
}

fn polygon_sphere_intersection(
    space: &Space,
    c: &Point,
    big_r: &Length,
    d: &Point,
    small_r: &Length,
) -> Result<Point> {
    let (rr, sr) = (rational_radius(big_r), rational_radius(small_r));
    if rr.is_zero() {
        return Ok(c.clone());
    }
    if sr.is_zero() {
        return Ok(d.clone());
    }
    let p = sphere_polygon(&space.norm, c, &rr);
    let q = sphere_polygon(&space.norm, d, &sr);
    for i in 0..4 {
        for j in 0..4 {
            if let Some(e) = segment_intersection(&p[i], &p[(i + 1) % 4], &q[j], &q[(j + 1) % 4]) {
                return Ok(e);
            }
        }
    }
    Err(Error::NoIntersection(
        "polygonal spheres are disjoint".into(),
    ))
}

/// Every distinct point where the spheres' edges meet, plus the midpoint of
/// each shared edge piece. Falls back to the single construction outside the
/// exact polygonal case.
pub fn sphere_intersection_candidates(
    space: &Space,
    c: &Point,
    big_r: &Length,
    d: &Point,
    small_r: &Length,
) -> Result<Vec<Point>> {
    let first = sphere_intersection_point(space, c, big_r, d, small_r)?;
    if !(space.is_exact() && space.norm.polygonal()) {
        return Ok(vec![first]);
    }
    let (rr, sr) = (rational_radius(big_r), rational_radius(small_r));
    if rr.is_zero() || sr.is_zero() {
        return Ok(vec![first]);
    }
    let p = sphere_polygon(&space.norm, c, &rr);
    let q = sphere_polygon(&space.norm, d, &sr);
    let mut out = vec![first];
    let push = |e: Point, out: &mut Vec<Point>| {
        if !out.contains(&e) {
            out.push(e);
        }
    };
    for i in 0..4 {
        for j in 0..4 {
            let (p1, p2, q1, q2) = (&p[i], &p[(i + 1) % 4], &q[j], &q[(j + 1) % 4]);
            let collinear =
                Point::cross(p1, p2, q1).is_zero() && Point::cross(p1, p2, q2).is_zero();
            let shared: Vec<&Point> = [q1, q2, p1, p2]
                .into_iter()
                .filter(|e| {
                    collinear && on_collinear_segment(e, p1, p2) && on_collinear_segment(e, q1, q2)
                })
                .collect();
            if shared.len() >= 2 {
                let (lo, hi) = (shared[0], shared[shared.len() - 1]);
                push(midpoint(lo, hi), &mut out);
                shared.into_iter().for_each(|e| push(e.clone(), &mut out));
            } else if let Some(e) = segment_intersection(p1, p2, q1, q2) {
                push(e, &mut out);
            }
        }
    }
    Ok(out)
}

fn on_collinear_segment(p: &Point, a: &Point, b: &Point) -> bool {
    let ab = b.sub(a);
    let ap = p.sub(a);
    let dot = &(&ab.x * &ap.x) + &(&ab.y * &ap.y);
    let len2 = &(&ab.x * &ab.x) + &(&ab.y * &ab.y);
    match (dot, len2) {
        (Scalar::Exact(t), Scalar::Exact(l)) => {
            if l.is_zero() {
                p == a
            } else {
                !t.is_negative() && t <= l
            }
        }
        _ => false,
    }
}

/// Exact intersection of closed segments `p1p2` and `q1q2` (any common point).
pub(crate) fn segment_intersection(
    p1: &Point,
    p2: &Point,
    q1: &Point,
    q2: &Point,
) -> Option<Point> {
    let r = p2.sub(p1);
    let s = q2.sub(q1);
    let qp = q1.sub(p1);
    let cross = |u: &Point, v: &Point| -> Rational {
        let val = &(&u.x * &v.y) - &(&u.y * &v.x);
        val.as_rational().cloned().expect("exact segments")
    };
    let denom = cross(&r, &s);
    if !denom.is_zero() {
        let t = cross(&qp, &s) / &denom;
        let u = cross(&qp, &r) / &denom;
        let unit = Rational::one();
        let inside = |v: &Rational| !v.is_negative() && *v <= unit;
        return (inside(&t) && inside(&u)).then(|| p1.add(&r.scale(&t)));
    }
    if !cross(&qp, &r).is_zero() {
        return None;
    }
    [q1, q2, p1, p2]
        .into_iter()
        .find(|cand| on_collinear_segment(cand, p1, p2) && on_collinear_segment(cand, q1, q2))
        .cloned()
}

fn circle_intersection_f64(
    space: &Space,
    c: &Point,
    big_r: &Length,
    d: &Point,
    small_r: &Length,
) -> Point {
    let (cx, cy) = c.to_f64_pair();
    let (dx, dy) = d.to_f64_pair();
    let (rr, sr) = (big_r.to_f64(), small_r.to_f64());
    let dist = space.dist(c, d).to_f64();
    if dist == 0.0 {
        return Point::float(cx + rr, cy);
    }
    let (ux, uy) = ((dx - cx) / dist, (dy - cy) / dist);
    let along = (rr * rr - sr * sr + dist * dist) / (2.0 * dist);
    let h = (rr * rr - along * along).max(0.0).sqrt();
    Point::float(cx + along * ux - h * uy, cy + along * uy + h * ux)
}

fn angular_solve(
    space: &Space,
    c: &Point,
    big_r: &Length,
    d: &Point,
    small_r: &Length,
) -> Result<Point> {
    const STEPS: usize = 1440;
    let (cx, cy) = c.to_f64_pair();
    let rr = big_r.to_f64();
    let sr = small_r.to_f64();
    let at = |theta: f64| -> Point {
        let (ux, uy) = (theta.cos(), theta.sin());
        let n = norm_f64(&space.norm, ux.abs(), uy.abs());
        Point::float(cx + rr * ux / n, cy + rr * uy / n)
    };
    let f = |theta: f64| space.dist(d, &at(theta)).to_f64() - sr;
    let thetas: Vec<f64> = (0..=STEPS).map(|i| TAU * i as f64 / STEPS as f64).collect();
    let vals: Vec<f64> = thetas.iter().map(|&t| f(t)).collect();
    for i in 0..STEPS {
        if vals[i] == 0.0 {
            return Ok(at(thetas[i]));
        }
        if vals[i].signum() != vals[i + 1].signum() {
            let (mut lo, mut hi) = (thetas[i], thetas[i + 1]);
            let lo_sign = vals[i].signum();
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid).signum() == lo_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(at(0.5 * (lo + hi)));
        }
    }
    // Tangency: refine the smallest |f| by golden-section search.
    let best = (0..STEPS)
        .min_by(|&i, &j| vals[i].abs().total_cmp(&vals[j].abs()))
        .unwrap_or(0);
    let step = TAU / STEPS as f64;
    let (mut lo, mut hi) = (thetas[best] - step, thetas[best] + step);
    let g = |t: f64| f(t).abs();
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if g(m1) < g(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    Ok(at(0.5 * (lo + hi)))
}
