//! The congruence axioms checked in coordinate models. Universal axioms are
//! sampled; existential ones are checked by building their witnesses and
//! re-measuring them.

use std::fmt;

use num_traits::{Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{BMode, TruncationParams};
use crate::geometry::{affine_combination, midpoint, ray_point, sphere_intersection_point};
use crate::io::{records, PointRecord};
use crate::oracles::{oracle_between, oracle_collinear, oracle_le, oracle_parallelogram};
use crate::point::Point;
use crate::relation::RelationId;
use crate::sample::{equal_norm_vector, sample_rng, small_rational};
use crate::scalar::{int, rat, rational_ceil, Rational, Scalar};
use crate::space::Space;
use crate::verify::check_instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
}

impl Axiom {
    pub const ALL: [Axiom; 9] = [
        Axiom::A,
        Axiom::B,
        Axiom::C,
        Axiom::D,
        Axiom::E,
        Axiom::F,
        Axiom::G,
        Axiom::H,
        Axiom::I,
    ];

    pub fn letter(self) -> char {
        (b'a' + self as u8) as char
    }

    pub fn parse(text: &str) -> Result<Axiom> {
        let t = text.trim().to_ascii_lowercase();
        Axiom::ALL
            .into_iter()
            .find(|a| t.len() == 1 && t.starts_with(a.letter()))
            .ok_or_else(|| Error::Format(format!("unknown axiom {text:?} (expected a..i)")))
    }

    /// Existential axioms are checked by construction.
    pub fn existential(self) -> bool {
        matches!(self, Axiom::B | Axiom::G | Axiom::I)
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl Serialize for Axiom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.letter().to_string())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AxiomConfig {
    pub samples: usize,
    pub seed: u64,
    /// Longest chain tried for the Archimedean axiom.
    pub chain_cap: u32,
    /// Schnabel's formula for `≤` is evaluated on every `stride`-th sample.
    pub formula_stride: usize,
    pub trunc: TruncationParams,
}

impl AxiomConfig {
    pub fn new(samples: usize, seed: u64) -> AxiomConfig {
        AxiomConfig {
            samples,
            seed,
            chain_cap: 64,
            formula_stride: 10,
            trunc: TruncationParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub sample: usize,
    pub clause: &'static str,
    pub points: Vec<PointRecord>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessRecord {
    pub sample: usize,
    pub points: Vec<PointRecord>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub norm: String,
    pub backend: String,
    pub seed: u64,
    pub samples: usize,
    /// Clause instances evaluated.
    pub checks: usize,
    /// Degenerate or inapplicable draws, not counted as samples.
    pub skipped: usize,
    /// Witnesses built and re-validated (existential axioms).
    pub witnesses: usize,
    /// Constructions done on the float companion (exact L2, irrational point).
    pub float_fallbacks: usize,
    /// Archimedean chains that did not reach `d` within the cap.
    pub incomplete: usize,
    pub pass: bool,
    pub violations: Vec<Violation>,
    /// The first few constructions, for inspection.
    pub witness_examples: Vec<WitnessRecord>,
}

const EXAMPLES: usize = 3;

struct Run {
    report: AxiomReport,
    sample: usize,
}

impl Run {
    fn new(axiom: Axiom, space: &Space, cfg: &AxiomConfig) -> Run {
        Run {
            report: AxiomReport {
                axiom,
                norm: space.norm.name(),
                backend: space.backend.name().to_string(),
                seed: cfg.seed,
                samples: cfg.samples,
                checks: 0,
                skipped: 0,
                witnesses: 0,
                float_fallbacks: 0,
                incomplete: 0,
                pass: true,
                violations: Vec::new(),
                witness_examples: Vec::new(),
            },
            sample: 0,
        }
    }

    fn check(
        &mut self,
        clause: &'static str,
        ok: bool,
        pts: &[&Point],
        detail: impl FnOnce() -> String,
    ) {
        self.report.checks += 1;
        if !ok {
            self.report.violations.push(Violation {
                sample: self.sample,
                clause,
                points: records(&pts.iter().map(|p| (*p).clone()).collect::<Vec<_>>()),
                detail: detail(),
            });
        }
    }

    fn witness(&mut self, pts: &[&Point], note: impl FnOnce() -> String) {
        self.report.witnesses += 1;
        if self.report.witness_examples.len() < EXAMPLES {
            self.report.witness_examples.push(WitnessRecord {
                sample: self.sample,
                points: records(&pts.iter().map(|p| (*p).clone()).collect::<Vec<_>>()),
                note: note(),
            });
        }
    }

    fn finish(mut self) -> AxiomReport {
        self.report.pass = self.report.violations.is_empty();
        self.report
    }
}

fn point<R: Rng>(space: &Space, rng: &mut R) -> Point {
    space.point(small_rational(rng, 6, 4), small_rational(rng, 6, 4))
}

fn vector<R: Rng>(space: &Space, rng: &mut R) -> Point {
    loop {
        let v = point(space, rng);
        if !v.is_zero() {
            return v;
        }
    }
}

fn rng_for(axiom: Axiom, seed: u64, i: usize) -> rand_chacha::ChaCha8Rng {
    sample_rng(seed, ((axiom as u64) << 40) | i as u64)
}

/// Runs the check for one axiom.
pub fn check_axiom(axiom: Axiom, space: &Space, cfg: &AxiomConfig) -> Result<AxiomReport> {
    if cfg.samples == 0 {
        return Err(Error::Precondition(
            "at least one sample is required".into(),
        ));
    }
    match axiom {
        Axiom::A => Ok(check_axiom_a(space, cfg)),
        Axiom::B => check_axiom_b(space, cfg),
        Axiom::C => Ok(check_axiom_c(space, cfg)),
        Axiom::D => Ok(check_axiom_d(space, cfg)),
        Axiom::E => Ok(check_axiom_e(space, cfg)),
        Axiom::F => check_axiom_f(space, cfg),
        Axiom::G => check_axiom_g(space, cfg),
        Axiom::H => check_axiom_h(space, cfg),
        Axiom::I => check_axiom_i(space, cfg),
    }
}

pub fn check_all(space: &Space, cfg: &AxiomConfig, which: &[Axiom]) -> Result<Vec<AxiomReport>> {
    which.iter().map(|a| check_axiom(*a, space, cfg)).collect()
}

/// `≡` is a nondegenerate equivalence on segments.
pub fn check_axiom_a(space: &Space, cfg: &AxiomConfig) -> AxiomReport {
    let mut run = Run::new(Axiom::A, space, cfg);
    for i in 0..cfg.samples {
        run.sample = i;
        let rng = &mut rng_for(Axiom::A, cfg.seed, i);
        let a = point(space, rng);
        let b = if rng.random_bool(0.1) {
            a.clone()
        } else {
            point(space, rng)
        };
        let ab = b.sub(&a);
        let c = point(space, rng);
        let d = c.add(&equal_norm_vector(&space.norm, &ab, rng));
        let e = point(space, rng);
        let f = if rng.random_bool(0.7) {
            e.add(&equal_norm_vector(&space.norm, &ab, rng))
        } else {
            point(space, rng)
        };
        run.check(
            "ab = ba",
            space.equi(&a, &b, &b, &a),
            &[&a, &b],
            String::new,
        );
        let premise = space.equi(&a, &b, &c, &d) && space.equi(&a, &b, &e, &f);
        run.check(
            "ab = cd and ab = ef imply cd = ef",
            !premise || space.equi(&c, &d, &e, &f),
            &[&a, &b, &c, &d, &e, &f],
            String::new,
        );
        run.check(
            "aa = bb",
            space.equi(&a, &a, &b, &b),
            &[&a, &b],
            String::new,
        );
        run.check(
            "ab = cc implies a = b",
            !space.equi(&a, &b, &c, &c) || space.same_point(&a, &b),
            &[&a, &b, &c],
            String::new,
        );
    }
    run.finish()
}

/// Evaluates `build` on `space`, moving to the float companion when an exact
/// L2 construction would be irrational.
fn constructive<T>(
    space: &Space,
    pts: &[Point],
    build: impl Fn(&Space, &[Point]) -> Result<Option<T>>,
) -> Result<Option<(T, bool)>> {
    match build(space, pts) {
        Ok(Some(t)) => Ok(Some((t, false))),
        Ok(None) | Err(Error::ExactL2Refused(_)) if space.is_exact() => {
            let f = space.float_companion();
            let fp: Vec<Point> = pts.iter().map(|p| p.to_backend(f.backend)).collect();
            Ok(build(&f, &fp)?.map(|t| (t, true)))
        }
        Ok(None) => Ok(None),
        Err(e) => Err(e),
    }
}

/// The point on the ray from `a` away from `c` at distance `d(a,b)`.
fn transport(space: &Space, a: &Point, b: &Point, c: &Point) -> Result<Option<Point>> {
    let away = a.add(&a.sub(c));
    ray_point(space, a, &away, &space.dist(a, b))
}

/// Segment transport: `d` with `B(cad)` and `ab ≡ ad`, unique on that ray.
pub fn check_axiom_b(space: &Space, cfg: &AxiomConfig) -> Result<AxiomReport> {
    let mut run = Run::new(Axiom::B, space, cfg);
    for i in 0..cfg.samples {
        run.sample = i;
        let rng = &mut rng_for(Axiom::B, cfg.seed, i);
        let (a, b, c) = loop {
            let a = point(space, rng);
            let b = point(space, rng);
            let c = point(space, rng);
            if !space.same_point(&a, &c) {
                break (a, b, c);
            }
            run.report.skipped += 1;
        };
        let other = small_rational(rng, 3, 4).abs() + rat(1, 4);
        let built = constructive(space, &[a.clone(), b.clone(), c.clone()], |s, p| {
            let (a, b, c) = (&p[0], &p[1], &p[2]);
            let Some(d) = transport(s, a, b, c)? else {
                return Ok(None);
            };
            // same ray, reached through a different direction vector
            let far = a.add(&a.sub(c).scale(&int(3)));
            let Some(e) = ray_point(s, a, &far, &s.dist(a, b))? else {
                return Ok(None);
            };
            Ok(Some((s.clone(), p.to_vec(), d, e)))
        })?;
        let Some(((s, p, d, e), fell_back)) = built else {
            run.report.skipped += 1;
            continue;
        };
        run.report.float_fallbacks += fell_back as usize;
        let (a, b, c) = (&p[0], &p[1], &p[2]);
        run.check(
            "B(cad)",
            oracle_between(&s, c, a, &d),
            &[a, b, c, &d],
            String::new,
        );
        run.check("ab = ad", s.equi(a, b, a, &d), &[a, b, c, &d], || {
            format!("d(a,b)={} d(a,d)={}", s.dist(a, b), s.dist(a, &d))
        });
        run.check(
            "second construction coincides",
            s.same_point(&d, &e),
            &[a, b, c, &d, &e],
            String::new,
        );
        // a different point of the same ray is not congruent unless it is d
        let q = a.add(&a.sub(c).scale_by(&s.scalar(other)));
        let unique = !s.equi(a, b, a, &q) || s.same_point(&q, &d);
        run.check(
            "uniqueness on the ray",
            unique,
            &[a, b, c, &d, &q],
            String::new,
        );
        run.witness(&[a, b, c, &d], || format!("d(a,d) = {}", s.dist(a, &d)));
    }
    Ok(run.finish())
}

/// Intersection of lines `p1p2` and `q1q2`, if they cross in one point.
pub fn line_intersection(p1: &Point, p2: &Point, q1: &Point, q2: &Point) -> Option<Point> {
    let r = p2.sub(p1);
    let s = q2.sub(q1);
    let denom = &(&r.x * &s.y) - &(&r.y * &s.x);
    let zero = match &denom {
        Scalar::Exact(v) => v.is_zero(),
        Scalar::Float(v) => v.abs() < 1e-12,
    };
    if zero {
        return None;
    }
    let qp = q1.sub(p1);
    let t = &(&(&qp.x * &s.y) - &(&qp.y * &s.x)) / &denom;
    Some(p1.add(&r.scale_by(&t)))
}

/// The affine midpoint, as the crossing of `ab` with the other diagonal of a
/// parallelogram `acbd`, is equidistant from `a` and `b`.
pub fn check_axiom_c(space: &Space, cfg: &AxiomConfig) -> AxiomReport {
    let mut run = Run::new(Axiom::C, space, cfg);
    for i in 0..cfg.samples {
        run.sample = i;
        let rng = &mut rng_for(Axiom::C, cfg.seed, i);
        let (a, b, c) = loop {
            let a = point(space, rng);
            let b = a.add(&vector(space, rng));
            let c = point(space, rng);
            if !oracle_collinear(space, &a, &b, &c) {
                break (a, b, c);
            }
            run.report.skipped += 1;
        };
        // ac ∥ bd and ad ∥ bc
        let d = a.add(&b).sub(&c);
        let Some(m) = line_intersection(&a, &b, &c, &d) else {
            run.report.skipped += 1;
            continue;
        };
        run.check(
            "m lies on ab",
            oracle_between(space, &a, &m, &b),
            &[&a, &b, &c, &d, &m],
            String::new,
        );
        run.check(
            "ma = mb",
            space.equi(&m, &a, &m, &b),
            &[&a, &b, &c, &d, &m],
            || {
                format!(
                    "d(m,a)={} d(m,b)={}",
                    space.dist(&m, &a),
                    space.dist(&m, &b)
                )
            },
        );
        run.check(
            "m is the coordinate midpoint",
            space.same_point(&m, &midpoint(&a, &b)),
            &[&a, &b, &m],
            String::new,
        );
    }
    run.finish()
}

/// Opposite sides of a parallelogram are congruent.
pub fn check_axiom_d(space: &Space, cfg: &AxiomConfig) -> AxiomReport {
    let mut run = Run::new(Axiom::D, space, cfg);
    for i in 0..cfg.samples {
        run.sample = i;
        let rng = &mut rng_for(Axiom::D, cfg.seed, i);
        let (a, b, c) = loop {
            let a = point(space, rng);
            let b = a.add(&vector(space, rng));
            let c = b.add(&vector(space, rng));
            if !oracle_collinear(space, &a, &b, &c) {
                break (a, b, c);
            }
            run.report.skipped += 1;
        };
        let d = a.add(&c).sub(&b);
        let pts = [&a, &b, &c, &d];
        run.check(
            "abcd is a parallelogram",
            oracle_parallelogram(space, &a, &b, &c, &d),
            &pts,
            String::new,
        );
        run.check("ab = cd", space.equi(&a, &b, &c, &d), &pts, String::new);
        run.check("bc = ad", space.equi(&b, &c, &a, &d), &pts, String::new);
    }
    run.finish()
}

/// A parallel to the base of an isosceles triangle cuts off an isosceles
/// triangle.
pub fn check_axiom_e(space: &Space, cfg: &AxiomConfig) -> AxiomReport {
    let mut run = Run::new(Axiom::E, space, cfg);
    for i in 0..cfg.samples {
        run.sample = i;
        let rng = &mut rng_for(Axiom::E, cfg.seed, i);
        let (o, a, a2) = loop {
            let o = point(space, rng);
            let a = o.add(&vector(space, rng));
            let a2 = o.add(&equal_norm_vector(&space.norm, &a.sub(&o), rng));
            if !oracle_collinear(space, &o, &a, &a2) {
                break (o, a, a2);
            }
            run.report.skipped += 1;
        };
        let t = loop {
            let t = small_rational(rng, 4, 4);
            if !t.is_zero() {
                break t;
            }
        };
        let b = affine_combination(&o, &a, &t);
        let b2 = affine_combination(&o, &a2, &t);
        let pts = [&o, &a, &a2, &b, &b2];
        let parallel = Point::cross(&Point::origin(space.backend), &a2.sub(&a), &b2.sub(&b));
        let parallel = match parallel {
            Scalar::Exact(v) => v.is_zero(),
            Scalar::Float(v) => v.abs() <= 1e-9 * (1.0 + b2.sub(&b).to_f64_pair().0.abs()),
        };
        run.check(
            "premises hold",
            parallel && space.equi(&o, &a, &o, &a2),
            &pts,
            String::new,
        );
        run.check("ob = ob'", space.equi(&o, &b, &o, &b2), &pts, || {
            format!(
                "d(o,b)={} d(o,b')={}",
                space.dist(&o, &b),
                space.dist(&o, &b2)
            )
        });
    }
    run.finish()
}

/// The weak triangle inequality: lay off `ba'` along `bc` with `ba ≡ ba'`,
/// then `a'c' ≡ ac` beyond `a'`; `c` lies between `b` and `c'`.
pub fn check_axiom_f(space: &Space, cfg: &AxiomConfig) -> Result<AxiomReport> {
    let mut run = Run::new(Axiom::F, space, cfg);
    for i in 0..cfg.samples {
        run.sample = i;
        let rng = &mut rng_for(Axiom::F, cfg.seed, i);
        let b = point(space, rng);
        let c = b.add(&vector(space, rng));
        let a = match rng.random_range(0..10) {
            0 => b.clone(),
            1 => affine_combination(&b, &c, &small_rational(rng, 2, 4)),
            _ => point(space, rng),
        };
        let built = constructive(space, &[a, b, c], |s, p| {
            let (a, b, c) = (&p[0], &p[1], &p[2]);
            let Some(a2) = ray_point(s, b, c, &s.dist(b, a))? else {
                return Ok(None);
            };
            let beyond = a2.add(&c.sub(b));
            let Some(c2) = ray_point(s, &a2, &beyond, &s.dist(a, c))? else {
                return Ok(None);
            };
            Ok(Some((s.clone(), p.to_vec(), a2, c2)))
        })?;
        let Some(((s, p, a2, c2), fell_back)) = built else {
            run.report.skipped += 1;
            continue;
        };
        run.report.float_fallbacks += fell_back as usize;
        let (a, b, c) = (&p[0], &p[1], &p[2]);
        let pts = [a, b, c, &a2, &c2];
        let premise = (oracle_between(&s, b, &a2, c) || oracle_between(&s, b, c, &a2))
            && s.equi(b, a, b, &a2)
            && oracle_between(&s, b, &a2, &c2)
            && s.equi(&a2, &c2, a, c);
        run.check("constructed premises hold", premise, &pts, String::new);
        run.check("B(bcc')", oracle_between(&s, b, c, &c2), &pts, || {
            format!("d(b,c)={} d(b,c')={}", s.dist(b, c), s.dist(b, &c2))
        });
    }
    Ok(run.finish())
}

/// Three segments obeying the weak triangle inequality bound a triangle.
pub fn check_axiom_g(space: &Space, cfg: &AxiomConfig) -> Result<AxiomReport> {
    let mut run = Run::new(Axiom::G, space, cfg);
    for i in 0..cfg.samples {
        run.sample = i;
        let rng = &mut rng_for(Axiom::G, cfg.seed, i);
        // draw until the three lengths are admissible; rejects are counted
        let (c, d, u, v) = loop {
            let c = point(space, rng);
            let d = c.add(&vector(space, rng));
            let u = vector(space, rng);
            let v = vector(space, rng);
            let (r, p, q) = (space.dist(&c, &d), space.norm_of(&u), space.norm_of(&v));
            let ok = space.sum_cmp(&p, &q, &r).is_ge()
                && space.sum_cmp(&q, &r, &p).is_ge()
                && space.sum_cmp(&r, &p, &q).is_ge();
            if ok {
                break (c, d, u, v);
            }
            run.report.skipped += 1;
        };
        let built = constructive(space, &[c, d, u, v], |s, p| {
            let (c, d) = (&p[0], &p[1]);
            let (rp, rq) = (s.norm_of(&p[2]), s.norm_of(&p[3]));
            match sphere_intersection_point(s, c, &rp, d, &rq) {
                Ok(e) => Ok(Some((s.clone(), p.to_vec(), e))),
                Err(e) => Err(e),
            }
        })?;
        let Some(((s, p, e), fell_back)) = built else {
            run.report.skipped += 1;
            continue;
        };
        run.report.float_fallbacks += fell_back as usize;
        let (c, d) = (&p[0], &p[1]);
        let (rp, rq) = (s.norm_of(&p[2]), s.norm_of(&p[3]));
        let ok = s.len_eq(&s.dist(c, &e), &rp) && s.len_eq(&s.dist(d, &e), &rq);
        run.check("triangle sides re-measure", ok, &[c, d, &e], || {
            format!("want {rp}, {rq}; got {}, {}", s.dist(c, &e), s.dist(d, &e))
        });
        run.witness(&[c, d, &e], || {
            format!("sides {}, {rp}, {rq}", s.dist(c, d))
        });
    }
    Ok(run.finish())
}

/// Any two segments are comparable; Schnabel's formula for `≤` matches the
/// length comparison on refuter-closed universes.
pub fn check_axiom_h(space: &Space, cfg: &AxiomConfig) -> Result<AxiomReport> {
    let mut run = Run::new(Axiom::H, space, cfg);
    let stride = cfg.formula_stride.max(1);
    for i in 0..cfg.samples {
        run.sample = i;
        let rng = &mut rng_for(Axiom::H, cfg.seed, i);
        let a = point(space, rng);
        let c = point(space, rng);
        let d = if rng.random_bool(0.03) {
            c.clone()
        } else {
            c.add(&vector(space, rng))
        };
        let b = match rng.random_range(0..3) {
            0 => a.add(&equal_norm_vector(&space.norm, &d.sub(&c), rng)),
            _ => point(space, rng),
        };
        let pts = [&a, &b, &c, &d];
        let le = oracle_le(space, &a, &b, &c, &d);
        let ge = oracle_le(space, &c, &d, &a, &b);
        run.check("ab <= cd or cd <= ab", le || ge, &pts, String::new);
        if i % stride == 0 {
            let inst = check_instance(
                RelationId::Le,
                space,
                &[a.clone(), b.clone(), c.clone(), d.clone()],
                &cfg.trunc,
                BMode::Repaired,
            )?;
            run.report.float_fallbacks += inst.float_fallback as usize;
            run.check(
                "Schnabel formula matches",
                inst.formula == inst.oracle,
                &pts,
                || format!("formula {} oracle {}", inst.formula, inst.oracle),
            );
        }
    }
    Ok(run.finish())
}

/// Result of laying off `ab` from `x1` towards `d`.
#[derive(Debug, Clone, PartialEq)]
pub enum Archimedes {
    /// `B(x1 d xn)` first holds at this `n`; chain `x1..xn` and rungs `y1..yn`.
    Reached {
        n: u32,
        xs: Vec<Point>,
        ys: Vec<Point>,
    },
    /// The cap was hit first; no claim either way.
    Incomplete,
    /// `d` is not on the ray from `x1` along `b − a`.
    NotApplicable,
}

/// The translate chain `x_{i+1} = x_i + (b − a)` with parallelogram rungs
/// `y_i = x_i + w`, scanned for the least `n ≤ cap` with `B(x1 d xn)`.
pub fn archimedean_chain(
    space: &Space,
    a: &Point,
    b: &Point,
    x1: &Point,
    d: &Point,
    cap: u32,
) -> Result<Archimedes> {
    if space.same_point(a, b) {
        return Err(Error::Precondition("a and b must differ".into()));
    }
    if cap < 2 {
        return Err(Error::Precondition("chain cap must be at least 2".into()));
    }
    let step = b.sub(a);
    let on_ray = oracle_collinear(space, x1, &x1.add(&step), d) && {
        let t = d.sub(x1);
        let dot = &(&t.x * &step.x) + &(&t.y * &step.y);
        dot.to_f64() >= -space.tolerance
    };
    if !on_ray {
        return Ok(Archimedes::NotApplicable);
    }
    let w = Point {
        x: -&step.y,
        y: step.x.clone(),
    };
    let mut xs = vec![x1.clone()];
    let mut ys = vec![x1.add(&w)];
    for n in 2..=cap {
        let next = xs.last().expect("nonempty").add(&step);
        ys.push(next.add(&w));
        xs.push(next);
        if oracle_between(space, x1, d, xs.last().expect("nonempty")) {
            return Ok(Archimedes::Reached { n, xs, ys });
        }
    }
    Ok(Archimedes::Incomplete)
}

/// The Archimedean axiom, with `n ≤ ceil(t) + 2` where `d = x1 + t(b − a)`.
pub fn check_axiom_i(space: &Space, cfg: &AxiomConfig) -> Result<AxiomReport> {
    if cfg.chain_cap < 2 {
        return Err(Error::Precondition("chain cap must be at least 2".into()));
    }
    let mut run = Run::new(Axiom::I, space, cfg);
    for i in 0..cfg.samples {
        run.sample = i;
        let rng = &mut rng_for(Axiom::I, cfg.seed, i);
        let a = point(space, rng);
        let b = a.add(&vector(space, rng));
        let x1 = point(space, rng);
        let t: Rational = if rng.random_bool(0.05) {
            Rational::zero()
        } else {
            let den = rng.random_range(1..=4);
            rat(rng.random_range(0..=40 * den), den)
        };
        let d = x1.add(&b.sub(&a).scale_by(&space.scalar(t.clone())));
        match archimedean_chain(space, &a, &b, &x1, &d, cfg.chain_cap)? {
            Archimedes::Reached { n, xs, ys } => {
                let mut ok = space.equi(&xs[0], &xs[1], &a, &b)
                    && (oracle_between(space, &xs[0], &xs[1], &d)
                        || oracle_between(space, &xs[0], &d, &xs[1]))
                    && oracle_between(space, &xs[0], &d, &xs[n as usize - 1]);
                for k in 0..n as usize - 1 {
                    ok &= oracle_parallelogram(space, &xs[k], &xs[k + 1], &ys[k + 1], &ys[k]);
                    if k + 2 < n as usize {
                        ok &=
                            oracle_parallelogram(space, &ys[k], &ys[k + 1], &xs[k + 2], &xs[k + 1]);
                    }
                }
                let pts = [&a, &b, &xs[0], &d];
                run.check("chain constraints re-validate", ok, &pts, || {
                    format!("n = {n}")
                });
                let bound = rational_ceil(&t) + 2;
                run.check(
                    "n <= ceil(t) + 2",
                    num_bigint::BigInt::from(n) <= bound,
                    &pts,
                    || format!("n = {n}, t = {t}"),
                );
                run.witness(&[&a, &b, &xs[0], &d, &xs[n as usize - 1]], || {
                    format!("n = {n}, t = {t}")
                });
            }
            Archimedes::Incomplete => run.report.incomplete += 1,
            Archimedes::NotApplicable => run.report.skipped += 1,
        }
    }
    Ok(run.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::NormSpec;

    #[test]
    fn transport_example() {
        let s = Space::float(NormSpec::L2);
        let d = transport(
            &s,
            &Point::float(0.0, 0.0),
            &Point::float(0.0, 2.0),
            &Point::float(1.0, 0.0),
        )
        .unwrap()
        .unwrap();
        assert!(s.same_point(&d, &Point::float(-2.0, 0.0)));
        let e = Space::exact(NormSpec::L2);
        let d = transport(
            &e,
            &Point::ints(0, 0),
            &Point::ints(0, 2),
            &Point::ints(1, 0),
        )
        .unwrap()
        .unwrap();
        assert_eq!(d, Point::ints(-2, 0));
    }

    #[test]
    fn archimedes_examples() {
        let s = Space::exact(NormSpec::L1);
        let (a, b, x1) = (Point::ints(0, 0), Point::ints(1, 0), Point::ints(0, 0));
        match archimedean_chain(&s, &a, &b, &x1, &Point::ratio(7, 2, 0, 1), 64).unwrap() {
            Archimedes::Reached { n, xs, .. } => {
                assert_eq!(n, 5);
                assert_eq!(xs[4], Point::ints(4, 0));
            }
            other => panic!("{other:?}"),
        }
        match archimedean_chain(&s, &a, &b, &x1, &x1, 64).unwrap() {
            Archimedes::Reached { n, .. } => assert_eq!(n, 2),
            other => panic!("{other:?}"),
        }
        let far = Point::ints(100, 0);
        assert_eq!(
            archimedean_chain(&s, &a, &b, &x1, &far, 10).unwrap(),
            Archimedes::Incomplete
        );
        let off = Point::ints(3, 1);
        assert_eq!(
            archimedean_chain(&s, &a, &b, &x1, &off, 10).unwrap(),
            Archimedes::NotApplicable
        );
    }

    #[test]
    fn every_axiom_passes_small_runs() {
        for norm in [NormSpec::L1, NormSpec::L2, NormSpec::Linf] {
            for space in [Space::exact(norm.clone()), Space::float(norm)] {
                for r in check_all(&space, &AxiomConfig::new(200, 3), &Axiom::ALL).unwrap() {
                    assert!(
                        r.pass,
                        "{} {}: {:?}",
                        r.axiom,
                        space.label(),
                        r.violations.first()
                    );
                    if r.axiom.existential() {
                        assert!(r.witnesses > 150, "{} {}", r.axiom, space.label());
                    }
                }
            }
        }
    }

    #[test]
    fn axiom_letters() {
        assert_eq!(Axiom::parse("h").unwrap(), Axiom::H);
        assert!(Axiom::parse("j").is_err());
        assert_eq!(Axiom::I.to_string(), "i");
    }
}
