//! Seeded instance generators. Positives are constructed rather than hoped
//! for: equal-length vectors come from the norm's own symmetries, chain and
//! dyadic points from affine combinations.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::TruncationParams;
use crate::geometry::{affine_combination, midpoint, sphere_intersection_point};
use crate::oracles::gamma_defect_exceeds;
use crate::point::Point;
use crate::relation::RelationId;
use crate::scalar::{dyadic, int, rat, Backend, Rational, Scalar};
use crate::space::{NormSpec, Space};

/// The generator for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

/// A rational `p/q` with `q` in `1..=max_den` and `|p/q| <= bound`.
pub fn small_rational<R: Rng>(rng: &mut R, bound: i64, max_den: i64) -> Rational {
    let q = rng.random_range(1..=max_den);
    let p = rng.random_range(-bound * q..=bound * q);
    rat(p, q)
}

/// A rational in `[lo, hi]` on a grid of step `1/den`.
pub fn rational_between<R: Rng>(rng: &mut R, lo: &Rational, hi: &Rational, den: i64) -> Rational {
    let j = rng.random_range(0..=den);
    lo + (hi - lo) * rat(j, den)
}

fn coords(p: &Point) -> (Rational, Rational) {
    let r = |s: &Scalar| match s {
        Scalar::Exact(r) => r.clone(),
        Scalar::Float(v) => Rational::from_float(*v).unwrap_or_default(),
    };
    (r(&p.x), r(&p.y))
}

/// A vector with the same norm as `v`, drawn from the norm's symmetries:
/// rational rotations for L2, redistributions of the coordinates for L1 and
/// Linf, signed coordinate permutations otherwise.
pub fn equal_norm_vector<R: Rng>(norm: &NormSpec, v: &Point, rng: &mut R) -> Point {
    let backend = v.backend();
    let (x, y) = coords(v);
    let sign = |rng: &mut R| {
        if rng.random_bool(0.5) {
            int(1)
        } else {
            int(-1)
        }
    };
    let (nx, ny) = match norm {
        NormSpec::L2 => {
            let m = rng.random_range(1..=5i64);
            let n = rng.random_range(0..=5i64);
            let h = m * m + n * n;
            let c = rat(m * m - n * n, h);
            let s = rat(2 * m * n, h) * sign(rng);
            let (rx, ry) = (&c * &x - &s * &y, &s * &x + &c * &y);
            if rng.random_bool(0.5) {
                (ry, rx)
            } else {
                (rx, ry)
            }
        }
        NormSpec::L1 => {
            let len = x.abs() + y.abs();
            let f = rat(rng.random_range(0..=6), 6);
            (&len * &f * sign(rng), &len * (int(1) - f) * sign(rng))
        }
        NormSpec::Linf => {
            let len = x.abs().max(y.abs());
            let t = &len * (rat(rng.random_range(0..=8), 4) - int(1));
            let edge = &len * sign(rng);
            if rng.random_bool(0.5) {
                (edge, t)
            } else {
                (t, edge)
            }
        }
        NormSpec::Lp(_) => {
            let (a, b) = if rng.random_bool(0.5) { (x, y) } else { (y, x) };
            (a * sign(rng), b * sign(rng))
        }
    };
    Point {
        x: Scalar::from_rational(nx, backend),
        y: Scalar::from_rational(ny, backend),
    }
}

/// How inputs for a relation are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplerKind {
    /// Constructed positives mixed with near and far negatives.
    Default,
    /// Betweenness-type relations drawn along lines, including reversed orders.
    CollinearBiased,
    /// `(a, b, c)` with `b` on the dyadic grid of segment `ac`.
    MidpointTriples,
    /// Cycles through the given tuples.
    Fixed(Vec<Vec<Point>>),
}

impl SamplerKind {
    pub fn name(&self) -> &'static str {
        match self {
            SamplerKind::Default => "default",
            SamplerKind::CollinearBiased => "collinear",
            SamplerKind::MidpointTriples => "midpoint-triples",
            SamplerKind::Fixed(_) => "fixed",
        }
    }

    pub fn parse(s: &str) -> Option<SamplerKind> {
        match s {
            "default" => Some(SamplerKind::Default),
            "collinear" => Some(SamplerKind::CollinearBiased),
            "midpoint-triples" => Some(SamplerKind::MidpointTriples),
            _ => None,
        }
    }
}

/// One drawn instance, with the number of candidates discarded on the way.
#[derive(Debug, Clone)]
pub struct Draw {
    pub inputs: Vec<Point>,
    pub filtered: u32,
}

/// Largest `d(b,c)/d(a,b)` drawn for GAMMA, keeping adaptive `N` small.
pub const GAMMA_RATIO_CAP: i64 = 8;

pub struct Sampler<'s> {
    space: &'s Space,
    kind: SamplerKind,
    trunc: TruncationParams,
    bound: i64,
    max_den: i64,
}

impl<'s> Sampler<'s> {
    pub fn new(space: &'s Space, kind: SamplerKind, trunc: TruncationParams) -> Sampler<'s> {
        Sampler {
            space,
            kind,
            trunc,
            bound: 6,
            max_den: 4,
        }
    }

    pub fn kind(&self) -> &SamplerKind {
        &self.kind
    }

    fn point<R: Rng>(&self, rng: &mut R) -> Point {
        let x = small_rational(rng, self.bound, self.max_den);
        let y = small_rational(rng, self.bound, self.max_den);
        self.space.point(x, y)
    }

    fn vector<R: Rng>(&self, rng: &mut R) -> Point {
        loop {
            let v = self.point(rng);
            if !v.is_zero() {
                return v;
            }
        }
    }

    fn lift(&self, r: Rational) -> Scalar {
        self.space.scalar(r)
    }

    fn scaled(&self, v: &Point, q: &Rational) -> Point {
        v.scale_by(&self.lift(q.clone()))
    }

    /// Draws the `index`-th instance for `id`.
    pub fn draw<R: Rng>(&self, id: RelationId, index: usize, rng: &mut R) -> Draw {
        if let SamplerKind::Fixed(list) = &self.kind {
            let inputs = list[index % list.len()]
                .iter()
                .map(|p| p.to_backend(self.space.backend))
                .collect();
            return Draw {
                inputs,
                filtered: 0,
            };
        }
        let mut filtered = 0;
        loop {
            let (inputs, keep) = self.candidate(id, rng);
            if keep {
                return Draw { inputs, filtered };
            }
            filtered += 1;
        }
    }

    fn candidate<R: Rng>(&self, id: RelationId, rng: &mut R) -> (Vec<Point>, bool) {
        let s = self.space;
        match id {
            RelationId::Equiv2 => {
                let c = self.point(rng);
                let d = if rng.random_bool(0.05) {
                    c.clone()
                } else {
                    c.add(&self.vector(rng))
                };
                let a = self.point(rng);
                let w = equal_norm_vector(&s.norm, &d.sub(&c), rng);
                let q = pick(
                    rng,
                    &[
                        int(2),
                        int(2),
                        int(2),
                        rat(1, 2),
                        int(1),
                        rat(3, 2),
                        rat(5, 2),
                        int(3),
                        int(0),
                    ],
                );
                (vec![a.clone(), a.add(&self.scaled(&w, &q)), c, d], true)
            }
            RelationId::Phi(_) | RelationId::Midpoint => {
                let a = self.point(rng);
                let other = if rng.random_bool(0.05) {
                    a.clone()
                } else {
                    a.add(&self.vector(rng))
                };
                let m = midpoint(&a, &other);
                let b = match rng.random_range(0..4) {
                    0 | 1 => m,
                    2 => self.metric_midpoint(&a, &other).unwrap_or(m),
                    _ => self.point(rng),
                };
                if id == RelationId::Midpoint {
                    (vec![a, b, other], true)
                } else {
                    (vec![a, other, b], true)
                }
            }
            RelationId::Alpha(n) => {
                let (a, b) = self.pair(rng);
                let n = n as i64;
                let t = match rng.random_range(0..6) {
                    0..=2 => int(n),
                    3 => int(-n),
                    4 => int(rng.random_range(0..=n + 2)),
                    _ => small_rational(rng, n + 2, 4),
                };
                let x = affine_combination(&a, &b, &t);
                (vec![a, b, x], true)
            }
            RelationId::Beta(k) => {
                let (a, b) = self.pair(rng);
                let t = match rng.random_range(0..6) {
                    0..=2 => dyadic(k),
                    3 => dyadic(rng.random_range(0..=k + 2)),
                    4 => int(1) - dyadic(k),
                    _ => small_rational(rng, 1, 8),
                };
                let y = affine_combination(&a, &b, &t);
                (vec![a, b, y], true)
            }
            RelationId::Psi(n, k) => {
                let (a, b) = self.pair(rng);
                let c = self.point(rng);
                let unit = self.scaled(&equal_norm_vector(&s.norm, &b.sub(&a), rng), &dyadic(k));
                let lo = int((n as i64 - 1).abs());
                let hi = int(n as i64 + 1);
                let t = match rng.random_range(0..6) {
                    0 => lo.clone(),
                    1 => hi.clone(),
                    2 | 3 => rational_between(rng, &lo, &hi, 8),
                    4 => rational_between(rng, &Rational::zero(), &(hi + int(2)), 16),
                    _ => Rational::zero(),
                };
                let d = c.add(&self.scaled(&unit, &t));
                (vec![a, b, c, d], true)
            }
            RelationId::Gamma => self.gamma_candidate(rng),
            RelationId::Between => self.between_candidate(rng),
            RelationId::Delta(n) => {
                let x = self.point(rng);
                let y = if rng.random_bool(0.03) {
                    x.clone()
                } else {
                    x.add(&self.vector(rng))
                };
                let w = equal_norm_vector(&s.norm, &y.sub(&x), rng);
                let n = n as i64;
                let q = match rng.random_range(0..6) {
                    0 | 1 => int(n),
                    2 => int(n) - rat(1, 2),
                    3 => int(n) + rat(1, 2),
                    4 => int(n + 1),
                    _ => rational_between(rng, &Rational::zero(), &int(n + 2), 12),
                };
                let z = x.add(&self.scaled(&w, &q));
                (vec![x, y, z], true)
            }
            RelationId::Neq => {
                let x = self.point(rng);
                let y = if rng.random_bool(0.3) {
                    x.clone()
                } else {
                    self.point(rng)
                };
                (vec![x, y], true)
            }
            RelationId::Le => {
                let c = self.point(rng);
                let d = if rng.random_bool(0.05) {
                    c.clone()
                } else {
                    c.add(&self.vector(rng))
                };
                let a = self.point(rng);
                let w = equal_norm_vector(&s.norm, &d.sub(&c), rng);
                let q = match rng.random_range(0..5) {
                    0 | 1 => int(1),
                    2 => rat(1, 2),
                    3 => int(2),
                    _ => rational_between(rng, &Rational::zero(), &int(3), 12),
                };
                (vec![a.clone(), a.add(&self.scaled(&w, &q)), c, d], true)
            }
            RelationId::Collinear => {
                let (a, b) = self.pair(rng);
                let c = if rng.random_bool(0.5) {
                    affine_combination(&a, &b, &small_rational(rng, 3, 4))
                } else {
                    self.point(rng)
                };
                (vec![a, b, c], true)
            }
            RelationId::Parallelogram => {
                let (a, b) = self.pair(rng);
                let d = self.point(rng);
                let c = if rng.random_bool(0.6) {
                    b.sub(&a).add(&d)
                } else {
                    self.point(rng)
                };
                (vec![a, b, c, d], true)
            }
        }
    }

    fn pair<R: Rng>(&self, rng: &mut R) -> (Point, Point) {
        let a = self.point(rng);
        let b = if rng.random_bool(0.05) {
            a.clone()
        } else {
            a.add(&self.vector(rng))
        };
        (a, b)
    }

    /// A point at half the distance from both `a` and `c`, off the segment
    /// where the norm allows it.
    fn metric_midpoint(&self, a: &Point, c: &Point) -> Option<Point> {
        let s = self.space;
        if !s.norm.polygonal() || !s.is_exact() {
            return None;
        }
        let half = s.dist(a, c).scale(&rat(1, 2));
        sphere_intersection_point(s, a, &half, c, &half).ok()
    }

    fn gamma_candidate<R: Rng>(&self, rng: &mut R) -> (Vec<Point>, bool) {
        let s = self.space;
        let a = self.point(rng);
        let w = self.vector(rng);
        let collinear = self.kind == SamplerKind::CollinearBiased;
        let style = if collinear {
            rng.random_range(0..3)
        } else {
            rng.random_range(0..6)
        };
        let (b, c) = match style {
            0 | 1 => {
                // a, b, c in order along a line
                let sb = rat(rng.random_range(1..=4), rng.random_range(1..=2));
                let extra = rat(rng.random_range(0..=16), rng.random_range(1..=4));
                let sc = &sb + &sb * &extra * rat(1, 2);
                (a.add(&self.scaled(&w, &sb)), a.add(&self.scaled(&w, &sc)))
            }
            2 => {
                // collinear but out of order
                let t1 = small_rational(rng, 3, 4);
                let t2 = small_rational(rng, 3, 4);
                (a.add(&self.scaled(&w, &t1)), a.add(&self.scaled(&w, &t2)))
            }
            3 => {
                // on both spheres of a split of d(a,c): metric but possibly not affine
                let c = a.add(&w);
                let total = s.dist(&a, &c);
                let f = rat(rng.random_range(1..=7), 8);
                let near = total.scale(&f);
                let far = total.scale(&(int(1) - f));
                match (s.is_exact() && s.norm.polygonal())
                    .then(|| sphere_intersection_point(s, &a, &near, &c, &far).ok())
                    .flatten()
                {
                    Some(b) => (b, c),
                    None => (self.point(rng), c),
                }
            }
            4 => {
                let c = a.add(&w);
                let perp = Point {
                    x: -&w.y,
                    y: w.x.clone(),
                };
                let t = rat(rng.random_range(1..=7), 8);
                let e = rat(rng.random_range(1..=4), 8);
                (
                    affine_combination(&a, &c, &t).add(&self.scaled(&perp, &e)),
                    c,
                )
            }
            _ => (self.point(rng), self.point(rng)),
        };
        let keep = self.gamma_keep(&a, &b, &c);
        (vec![a, b, c], keep)
    }

    /// Bounded ratio, and negatives only where truncation at `K` can tell.
    fn gamma_keep(&self, a: &Point, b: &Point, c: &Point) -> bool {
        let s = self.space;
        let (dab, dbc) = (s.dist(a, b), s.dist(b, c));
        if !s.len_is_zero(&dab) && s.cmp_len(&dbc, &dab.scale(&int(GAMMA_RATIO_CAP))).is_gt() {
            return false;
        }
        let distinct = !s.same_point(a, b) && !s.same_point(b, c) && !s.same_point(a, c);
        if !distinct || crate::oracles::oracle_gamma(s, a, b, c) {
            return true;
        }
        let eps = dyadic(self.trunc.k) * int(2);
        gamma_defect_exceeds(s, a, b, c, &eps)
    }

    fn between_candidate<R: Rng>(&self, rng: &mut R) -> (Vec<Point>, bool) {
        let a = self.point(rng);
        let c = if rng.random_bool(0.04) {
            a.clone()
        } else {
            a.add(&self.vector(rng))
        };
        let depth = self.trunc.b_depth;
        let grid = |rng: &mut R| {
            let m = rng.random_range(0..=depth + 1);
            let den = 1i64 << m;
            rat(rng.random_range(0..=den), den)
        };
        let style = match self.kind {
            SamplerKind::MidpointTriples => rng.random_range(0..2),
            SamplerKind::CollinearBiased => rng.random_range(0..5),
            _ => rng.random_range(0..7),
        };
        let b = match style {
            0 => midpoint(&a, &c),
            1 => affine_combination(&a, &c, &grid(rng)),
            2 => affine_combination(
                &a,
                &c,
                &rational_between(rng, &Rational::zero(), &Rational::one(), 12),
            ),
            3 => {
                let t = small_rational(rng, 2, 6);
                affine_combination(&a, &c, &t)
            }
            4 => {
                let t = if rng.random_bool(0.5) {
                    int(1) + rat(rng.random_range(1..=8), 4)
                } else {
                    -rat(rng.random_range(1..=8), 4)
                };
                affine_combination(&a, &c, &t)
            }
            5 => {
                let v = c.sub(&a);
                let perp = Point {
                    x: -&v.y,
                    y: v.x.clone(),
                };
                let t = rat(rng.random_range(0..=8), 8);
                let e = small_rational(rng, 1, 8);
                affine_combination(&a, &c, &t).add(&self.scaled(&perp, &e))
            }
            _ => self.point(rng),
        };
        let keep = self.between_keep(&a, &b, &c);
        (vec![a, b, c], keep)
    }

    /// In polygonal norms a negative is kept only when it lies farther than
    /// half a finest chain step from every chain point, so no metric
    /// interval of a chain segment can contain it.
    fn between_keep(&self, a: &Point, b: &Point, c: &Point) -> bool {
        let s = self.space;
        if s.norm.strictly_convex()
            || s.same_point(a, c)
            || crate::oracles::oracle_between(s, a, b, c)
        {
            return true;
        }
        let den = 1i64 << self.trunc.b_depth;
        let reach = s.dist(a, c).scale(&rat(1, 2 * den));
        (0..=den).all(|j| {
            let p = affine_combination(a, c, &rat(j, den));
            s.cmp_len(&s.dist(&p, b), &reach).is_gt()
        })
    }
}

fn pick<R: Rng>(rng: &mut R, options: &[Rational]) -> Rational {
    options[rng.random_range(0..options.len())].clone()
}

/// Converts a tuple to the given backend.
pub fn to_backend(points: &[Point], backend: Backend) -> Vec<Point> {
    points.iter().map(|p| p.to_backend(backend)).collect()
}
