//! Finite universes for bounded quantifiers, and the constructions that make
//! them faithful: every witness an existential needs is built analytically,
//! and every known counterexample a universal needs is added as a refuter.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Formula, IndexExpr, Term, TruncationParams, Valuation};
use crate::geometry::{
    affine_combination, midpoint, ray_point, sphere_intersection_candidates,
    sphere_intersection_point,
};
use crate::oracles::oracle_psi;
use crate::point::{Point, PointKey};
use crate::relation::RelationId;
use crate::scalar::{dyadic, int, rat, Rational};
use crate::space::{Length, RatioValue, Space};

pub const DEFAULT_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Input,
    MidpointClosure,
    ChainClosure,
    SphereWitness,
    Refuter,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Input => "input",
            Provenance::MidpointClosure => "midpoint-closure",
            Provenance::ChainClosure => "chain-closure",
            Provenance::SphereWitness => "sphere-witness",
            Provenance::Refuter => "refuter",
        }
    }

    pub fn parse(s: &str) -> Result<Provenance> {
        [
            Provenance::Input,
            Provenance::MidpointClosure,
            Provenance::ChainClosure,
            Provenance::SphereWitness,
            Provenance::Refuter,
        ]
        .into_iter()
        .find(|p| p.name() == s)
        .ok_or_else(|| Error::Format(format!("unknown provenance tag {s:?}")))
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An ordered, duplicate-free point set with a provenance tag per point.
#[derive(Debug, Clone)]
pub struct Universe {
    space: Space,
    points: Vec<Point>,
    tags: Vec<Provenance>,
    index: HashMap<PointKey, usize>,
    cap: usize,
}

impl Universe {
    pub fn new(space: &Space) -> Universe {
        Universe::with_cap(space, DEFAULT_CAP)
    }

    pub fn with_cap(space: &Space, cap: usize) -> Universe {
        Universe {
            space: space.clone(),
            points: Vec::new(),
            tags: Vec::new(),
            index: HashMap::new(),
            cap,
        }
    }

    pub fn from_points(space: &Space, pts: &[Point]) -> Result<Universe> {
        let mut u = Universe::new(space);
        u.extend(pts, Provenance::Input)?;
        Ok(u)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn tags(&self) -> &[Provenance] {
        &self.tags
    }

    pub fn find(&self, p: &Point) -> Option<usize> {
        if self.space.is_exact() {
            self.index.get(&p.key()).copied()
        } else {
            self.points.iter().position(|q| self.space.same_point(p, q))
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.find(p).is_some()
    }

    /// Index of `p`, inserting it when no equal point is present.
    pub fn insert(&mut self, p: Point, tag: Provenance) -> Result<usize> {
        self.space.check(&p)?;
        if let Some(i) = self.find(&p) {
            return Ok(i);
        }
        if self.points.len() >= self.cap {
            return Err(Error::UniverseOverflow { cap: self.cap });
        }
        if self.space.is_exact() {
            self.index.insert(p.key(), self.points.len());
        }
        self.points.push(p);
        self.tags.push(tag);
        Ok(self.points.len() - 1)
    }

    pub fn extend(&mut self, pts: &[Point], tag: Provenance) -> Result<()> {
        for p in pts {
            self.insert(p.clone(), tag)?;
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &Universe) -> Result<()> {
        for (p, t) in other.points.iter().zip(&other.tags) {
            self.insert(p.clone(), *t)?;
        }
        Ok(())
    }

    fn any(&self, pred: impl Fn(&Point) -> bool) -> bool {
        self.points.iter().any(pred)
    }
}

/// All iterated pairwise midpoints of `points`, `depth` rounds deep.
pub fn close_midpoints(space: &Space, points: &[Point], depth: u32) -> Result<Universe> {
    if depth == 0 {
        return Err(Error::Precondition(
            "midpoint closure depth must be at least 1".into(),
        ));
    }
    let mut u = Universe::from_points(space, points)?;
    for _ in 0..depth {
        let current = u.points.clone();
        for i in 0..current.len() {
            for j in i + 1..current.len() {
                u.insert(
                    midpoint(&current[i], &current[j]),
                    Provenance::MidpointClosure,
                )?;
            }
        }
    }
    Ok(u)
}

fn alpha_beta_into(u: &mut Universe, a: &Point, b: &Point, n: u32, k: u32) -> Result<()> {
    for i in 0..=n {
        u.insert(
            affine_combination(a, b, &int(i as i64)),
            Provenance::ChainClosure,
        )?;
    }
    for j in 0..=k {
        u.insert(
            affine_combination(a, b, &dyadic(j)),
            Provenance::MidpointClosure,
        )?;
    }
    Ok(())
}

/// The ray points `a + i(b − a)` for `i ≤ n` and the dyadic points
/// `a + 2^-j(b − a)` for `j ≤ k`.
pub fn close_for_alpha_beta(
    space: &Space,
    a: &Point,
    b: &Point,
    n: u32,
    k: u32,
) -> Result<Universe> {
    space.check_all(&[a, b])?;
    if space.same_point(a, b) {
        return Err(Error::Precondition(
            "alpha/beta closure needs a != b".into(),
        ));
    }
    let mut u = Universe::from_points(space, &[a.clone(), b.clone()])?;
    alpha_beta_into(&mut u, a, b, n, k)?;
    Ok(u)
}

fn psi_into(
    u: &mut Universe,
    space: &Space,
    [a, b, c, d]: [&Point; 4],
    n: u32,
    k: u32,
) -> Result<()> {
    if space.same_point(a, b) {
        return Ok(());
    }
    alpha_beta_into(u, a, b, 1, k)?;
    let v = affine_combination(a, b, &dyadic(k));
    let uu = affine_combination(a, &v, &int(n as i64));
    alpha_beta_into(u, a, &v, n, 1)?;
    u.insert(v.clone(), Provenance::ChainClosure)?;
    u.insert(uu.clone(), Provenance::ChainClosure)?;
    if !oracle_psi(space, n, k, a, b, c, d) {
        return Ok(());
    }
    let big_r = space.dist(a, &uu);
    let small_r = space.dist(a, &v);
    let has = u.any(|e| {
        space.len_eq(&space.dist(c, e), &big_r) && space.len_eq(&space.dist(d, e), &small_r)
    });
    if !has {
        let e = sphere_intersection_point(space, c, &big_r, d, &small_r)?;
        u.insert(e, Provenance::SphereWitness)?;
    }
    Ok(())
}

/// Inputs plus the `u`, `v` scaffolding on ray `ab`, and a constructed `e`
/// when the annulus condition holds.
pub fn close_for_psi(
    space: &Space,
    a: &Point,
    b: &Point,
    c: &Point,
    d: &Point,
    n: u32,
    k: u32,
) -> Result<Universe> {
    let mut u = Universe::from_points(space, &[a.clone(), b.clone(), c.clone(), d.clone()])?;
    psi_into(&mut u, space, [a, b, c, d], n, k)?;
    Ok(u)
}

fn step_toward(space: &Space, p: &Point, target: &Point, step: &Length) -> Result<Point> {
    match ray_point(space, p, target, step)? {
        Some(q) => Ok(q),
        None => Err(Error::ExactL2Refused(
            "chain step along an irrational ratio",
        )),
    }
}

/// Points `z1, ..., zn = z` with every step `z_i z_{i+1}` as long as `xy`,
/// starting from `z0 = x`; `None` when `d(x,z) > n·d(x,y)` (or, for `n = 1`,
/// when `d(x,z) != d(x,y)`).
pub fn delta_chain(
    space: &Space,
    x: &Point,
    y: &Point,
    z: &Point,
    n: u32,
) -> Result<Option<Vec<Point>>> {
    space.check_all(&[x, y, z])?;
    if n == 0 {
        return Err(Error::Precondition(
            "chain length must be at least 1".into(),
        ));
    }
    let s = space.dist(x, y);
    let total = space.dist(x, z);
    if n == 1 {
        return Ok(space.len_eq(&total, &s).then(|| vec![z.clone()]));
    }
    if !space.len_le(&total, &s.scale(&int(n as i64))) {
        return Ok(None);
    }
    if space.len_is_zero(&s) {
        return Ok(Some(vec![z.clone(); n as usize]));
    }
    // any vector of length s
    let w = y.sub(x);
    let mut chain = Vec::with_capacity(n as usize);
    let mut p = x.clone();
    let mut left = n;
    while left > 2 {
        let r = space.dist(&p, z);
        if space.len_le(&s, &r) {
            p = step_toward(space, &p, z, &s)?;
            chain.push(p.clone());
            left -= 1;
        } else if left >= 4 {
            chain.push(p.add(&w));
            chain.push(p.clone());
            left -= 2;
        } else {
            p = if space.len_is_zero(&r) {
                p.add(&w)
            } else {
                step_toward(space, &p, z, &s)?
            };
            chain.push(p.clone());
            left -= 1;
        }
    }
    let apex = sphere_intersection_point(space, &p, &s, z, &s)?;
    chain.push(apex);
    chain.push(z.clone());
    Ok(Some(chain))
}

/// A chain closure together with the number of steps it realises.
#[derive(Debug, Clone)]
pub struct DeltaClosure {
    pub universe: Universe,
    /// `None` when the required chain exceeds the step budget.
    pub steps: Option<u32>,
}

/// Full steps along `x → z`, then a two-step detour for any remainder.
pub fn close_for_delta(
    space: &Space,
    x: &Point,
    y: &Point,
    z: &Point,
    n_max: u32,
) -> Result<DeltaClosure> {
    space.check_all(&[x, y, z])?;
    if space.same_point(x, y) {
        return Err(Error::Precondition("chain closure needs x != y".into()));
    }
    let mut universe = Universe::from_points(space, &[x.clone(), y.clone(), z.clone()])?;
    let s = space.dist(x, y);
    let total = space.dist(x, z);
    let full = match total.ratio(&s) {
        Some(RatioValue::Exact(q)) => q.floor(),
        Some(RatioValue::Float(f)) => {
            let r = f.round();
            let q = if space.float_eq(f, r) { r } else { f.floor() };
            Rational::from_float(q).unwrap_or_default()
        }
        None => {
            return Err(Error::ExactL2Refused(
                "chain length along an irrational ratio",
            ))
        }
    };
    let full: u32 = full
        .to_integer()
        .try_into()
        .map_err(|_| Error::Precondition("chain is too long".into()))?;
    let exact_fit = space.len_eq(&total, &s.scale(&int(full as i64)));
    let steps = match (full, exact_fit) {
        (0, _) => 2,
        (f, true) => f,
        (f, false) => f + 2,
    };
    if steps > n_max {
        return Ok(DeltaClosure {
            universe,
            steps: None,
        });
    }
    let chain = delta_chain(space, x, y, z, steps)?.expect("length was checked");
    universe.extend(&chain, Provenance::ChainClosure)?;
    Ok(DeltaClosure {
        universe,
        steps: Some(steps),
    })
}

/// Inputs plus the analytic counterexamples for the universal part of
/// EQUIV2, LE or NEQ.
pub fn add_refuters(
    space: &Space,
    id: RelationId,
    points: &[Point],
    chain_max: u32,
) -> Result<Universe> {
    let mut u = Universe::from_points(space, points)?;
    refuters_into(&mut u, space, id, points, chain_max)?;
    Ok(u)
}

fn refuters_into(
    u: &mut Universe,
    space: &Space,
    id: RelationId,
    p: &[Point],
    chain_max: u32,
) -> Result<()> {
    let want = |n: usize| -> Result<()> {
        if p.len() == n {
            Ok(())
        } else {
            Err(Error::Arity {
                relation: id.to_string(),
                what: "points",
                expected: n,
                found: p.len(),
            })
        }
    };
    match id {
        RelationId::Equiv2 => {
            want(4)?;
            let x = midpoint(&p[0], &p[1]);
            let y = midpoint(&p[0], &x);
            u.insert(x, Provenance::Refuter)?;
            u.insert(y, Provenance::Refuter)?;
        }
        RelationId::Le => {
            want(4)?;
            u.insert(midpoint(&p[2], &p[3]), Provenance::Refuter)?;
        }
        RelationId::Neq => {
            want(2)?;
            let (x, y) = (&p[0], &p[1]);
            let far = if space.same_point(x, y) {
                x.add(&space.point(int(1), int(0)))
            } else {
                affine_combination(x, y, &int(chain_max as i64 + 1))
            };
            u.insert(far, Provenance::Refuter)?;
        }
        other => {
            return Err(Error::Precondition(format!("{other} has no refuters")));
        }
    }
    Ok(())
}

/// Rounds of witness completion before giving up on a fixpoint.
const FIXPOINT_ROUNDS: usize = 6;
const EQUIV2_ROUNDS: usize = 12;

fn equiv2_into(u: &mut Universe, space: &Space, [a, b, c, d]: [&Point; 4]) -> Result<()> {
    let t = space.dist(c, d);
    let dab = space.dist(a, b);
    let order = space.sum_cmp(&t, &t, &dab);
    if order.is_ge() {
        let has = u.any(|e| space.equi(a, e, c, d) && space.equi(b, e, c, d));
        if !has {
            let e = sphere_intersection_point(space, a, &t, b, &t)?;
            u.insert(e, Provenance::SphereWitness)?;
        }
    }
    if order.is_gt() {
        // d(a,b) < 2d(c,d): the guard pair of midpoint refuters has no z anywhere
        return refuters_into(
            u,
            space,
            RelationId::Equiv2,
            &[a.clone(), b.clone(), c.clone(), d.clone()],
            0,
        );
    }
    if order.is_lt() {
        return Ok(());
    }
    // d(a,b) = 2d(c,d): every guard pair (x, y) present needs its z
    let on_bisector = |w: &Point| space.equi(w, c, w, d);
    for _ in 0..EQUIV2_ROUNDS {
        let pts = u.points.clone();
        let xs: Vec<&Point> = pts.iter().filter(|x| space.equi(x, a, x, b)).collect();
        let mut covered: Vec<Length> = pts
            .iter()
            .filter(|w| on_bisector(w))
            .map(|w| space.dist(w, c))
            .collect();
        let mut added = false;
        for x in &xs {
            for y in pts.iter().filter(|y| space.equi(y, a, y, x)) {
                let r = space.dist(x, y);
                if covered.iter().any(|w| space.len_eq(w, &r)) {
                    continue;
                }
                let cands = match sphere_intersection_candidates(space, c, &r, d, &r) {
                    Ok(cands) => cands,
                    Err(Error::NoIntersection(_)) => continue,
                    Err(e) => return Err(e),
                };
                // reflections through mid(c,d) are witnesses too; pick the one
                // opening the fewest guard pairs whose radius is not yet covered
                let mirrored: Vec<Point> = cands.iter().map(|z| c.add(d).sub(z)).collect();
                let uncovered = |z: &Point| {
                    let mut need = Vec::new();
                    if xs.iter().any(|x| space.equi(z, a, z, x)) {
                        need.push(space.dist(a, z));
                    }
                    if space.equi(z, a, z, b) {
                        need.extend(
                            pts.iter()
                                .filter(|y| space.equi(y, a, y, z))
                                .map(|y| space.dist(a, y)),
                        );
                    }
                    need.iter()
                        .filter(|n| {
                            !space.len_eq(n, &r) && !covered.iter().any(|w| space.len_eq(w, n))
                        })
                        .count()
                };
                let z = cands
                    .iter()
                    .chain(&mirrored)
                    .min_by_key(|z| uncovered(z))
                    .expect("at least one candidate")
                    .clone();
                if !u.contains(&z) {
                    u.insert(z, Provenance::SphereWitness)?;
                    added = true;
                }
                covered.push(r);
            }
        }
        if !added {
            break;
        }
    }
    Ok(())
}

fn le_into(u: &mut Universe, space: &Space, [a, b, c, d]: [&Point; 4]) -> Result<()> {
    refuters_into(
        u,
        space,
        RelationId::Le,
        &[a.clone(), b.clone(), c.clone(), d.clone()],
        0,
    )?;
    let dab = space.dist(a, b);
    for _ in 0..FIXPOINT_ROUNDS {
        let pts = u.points.clone();
        let mut added = false;
        for m in pts.iter().filter(|m| space.equi(c, m, d, m)) {
            let dcm = space.dist(c, m);
            let has = pts.iter().any(|s| {
                space.len_eq(&space.dist(c, s), &dab) && space.len_eq(&space.dist(s, m), &dcm)
            });
            if has {
                continue;
            }
            match sphere_intersection_point(space, c, &dab, m, &dcm) {
                Ok(s) => {
                    if !u.contains(&s) {
                        u.insert(s, Provenance::SphereWitness)?;
                        added = true;
                    }
                }
                Err(Error::NoIntersection(_)) => {}
                Err(e) => return Err(e),
            }
        }
        if !added {
            break;
        }
    }
    Ok(())
}

fn between_into(u: &mut Universe, space: &Space, a: &Point, c: &Point, depth: u32) -> Result<()> {
    if space.same_point(a, c) {
        return Ok(());
    }
    let den = 1i64 << depth;
    for j in 1..den {
        u.insert(
            affine_combination(a, c, &rat(j, den)),
            Provenance::ChainClosure,
        )?;
    }
    Ok(())
}

/// Witnesses and refuters for evaluating `id` as a formula, with every
/// lower relation answered by its oracle.
pub fn close_layer(
    space: &Space,
    id: RelationId,
    inputs: &[Point],
    trunc: &TruncationParams,
) -> Result<Universe> {
    if inputs.len() != id.term_arity() {
        return Err(Error::Arity {
            relation: id.to_string(),
            what: "points",
            expected: id.term_arity(),
            found: inputs.len(),
        });
    }
    let mut u = Universe::from_points(space, inputs)?;
    close_layer_into(&mut u, space, id, inputs, trunc)?;
    Ok(u)
}

/// As [`close_layer`], adding to an existing universe. Running it twice on
/// the same inputs adds nothing the second time.
pub fn close_layer_into(
    u: &mut Universe,
    space: &Space,
    id: RelationId,
    p: &[Point],
    trunc: &TruncationParams,
) -> Result<()> {
    match id {
        RelationId::Equiv2 => equiv2_into(u, space, [&p[0], &p[1], &p[2], &p[3]]),
        RelationId::Phi(_) | RelationId::Midpoint => {
            let (a, b) = if id == RelationId::Midpoint {
                (&p[0], &p[2])
            } else {
                (&p[0], &p[1])
            };
            u.insert(midpoint(a, b), Provenance::MidpointClosure)
                .map(|_| ())
        }
        RelationId::Alpha(n) => {
            if !space.same_point(&p[0], &p[1]) {
                alpha_beta_into(u, &p[0], &p[1], n, 1)?;
            }
            Ok(())
        }
        RelationId::Beta(k) => {
            if !space.same_point(&p[0], &p[1]) {
                alpha_beta_into(u, &p[0], &p[1], 1, k)?;
            }
            Ok(())
        }
        RelationId::Psi(n, k) => psi_into(u, space, [&p[0], &p[1], &p[2], &p[3]], n, k),
        RelationId::Gamma | RelationId::Collinear | RelationId::Parallelogram => Ok(()),
        RelationId::Between => between_into(u, space, &p[0], &p[2], trunc.b_depth),
        RelationId::Delta(n) => {
            if let Some(chain) = delta_chain(space, &p[0], &p[1], &p[2], n)? {
                u.extend(&chain, Provenance::ChainClosure)?;
            }
            Ok(())
        }
        RelationId::Neq => {
            if space.same_point(&p[0], &p[1]) {
                u.insert(p[0].add(&space.point(int(1), int(0))), Provenance::Refuter)?;
            }
            Ok(())
        }
        RelationId::Le => le_into(u, space, [&p[0], &p[1], &p[2], &p[3]]),
    }
}

/// Universe for evaluating an arbitrary formula: the bound points and
/// constants, closed for every relation atom whose arguments are all known
/// points and whose indices are literals. Atoms under quantifiers that bind
/// their arguments contribute nothing.
pub fn close_for_formula(
    space: &Space,
    f: &Formula,
    valuation: &Valuation,
    trunc: &TruncationParams,
) -> Result<Universe> {
    let mut u = Universe::new(space);
    for p in valuation.values() {
        u.insert(p.clone(), Provenance::Input)?;
    }
    let mut atoms = Vec::new();
    collect_atoms(f, &mut atoms);
    for (kind, idx, terms) in atoms {
        let lits: Option<Vec<u64>> = idx
            .iter()
            .map(|e| match e {
                IndexExpr::Lit(n) => Some(*n),
                _ => None,
            })
            .collect();
        let pts: Option<Vec<Point>> = terms
            .iter()
            .map(|t| match t {
                Term::Var(v) => valuation.get(v).cloned(),
                Term::Const(p) => Some(p.clone()),
            })
            .collect();
        let (Some(lits), Some(pts)) = (lits, pts) else {
            continue;
        };
        for p in &pts {
            u.insert(p.clone(), Provenance::Input)?;
        }
        let id = RelationId::new(kind, &lits)?;
        if matches!(id, RelationId::Collinear | RelationId::Parallelogram) {
            continue;
        }
        close_layer_into(&mut u, space, id, &pts, trunc)?;
    }
    Ok(u)
}

type Atom<'f> = (crate::relation::RelationKind, &'f [IndexExpr], &'f [Term]);

fn collect_atoms<'f>(f: &'f Formula, out: &mut Vec<Atom<'f>>) {
    match f {
        Formula::Equi(..) | Formula::Eq(..) => {}
        Formula::Not(g) | Formula::Exists(_, g) | Formula::ForAll(_, g) => collect_atoms(g, out),
        Formula::And(l) | Formula::Or(l) => l.iter().for_each(|g| collect_atoms(g, out)),
        Formula::Implies(g, c) => {
            collect_atoms(g, out);
            collect_atoms(c, out);
        }
        Formula::BigAnd(c) | Formula::BigOr(c) => collect_atoms(&c.body, out),
        Formula::Rel(r) => out.push((r.kind, &r.idx, &r.terms)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::NormSpec;

    fn pt(x: i64, y: i64) -> Point {
        Point::ints(x, y)
    }

    #[test]
    fn midpoint_closure_depths() {
        let s = Space::exact(NormSpec::L2);
        let u1 = close_midpoints(&s, &[pt(0, 0), pt(1, 0)], 1).unwrap();
        assert!(u1.contains(&Point::ratio(1, 2, 0, 1)));
        let u2 = close_midpoints(&s, &[pt(0, 0), pt(1, 0)], 2).unwrap();
        assert!(u2.contains(&Point::ratio(1, 4, 0, 1)));
        assert!(u2.contains(&Point::ratio(3, 4, 0, 1)));
        assert!(close_midpoints(&s, &[pt(0, 0)], 0).is_err());
    }

    #[test]
    fn alpha_beta_scaffolding() {
        let s = Space::exact(NormSpec::L1);
        let u = close_for_alpha_beta(&s, &pt(0, 0), &pt(1, 0), 3, 2).unwrap();
        for p in [pt(2, 0), pt(3, 0), Point::ratio(1, 4, 0, 1)] {
            assert!(u.contains(&p));
        }
        let small = close_for_alpha_beta(&s, &pt(0, 0), &pt(1, 0), 1, 1).unwrap();
        assert_eq!(small.len(), 3);
    }

    #[test]
    fn psi_witness_float_l2() {
        let s = Space::float(NormSpec::L2);
        let f = |x, y| Point::float(x, y);
        let (a, b, c, d) = (f(0.0, 0.0), f(1.0, 0.0), f(0.0, 0.0), f(0.0, 1.0));
        let u = close_for_psi(&s, &a, &b, &c, &d, 2, 1).unwrap();
        let e = u
            .points()
            .iter()
            .zip(u.tags())
            .find(|(_, t)| **t == Provenance::SphereWitness)
            .map(|(p, _)| p.clone())
            .expect("witness");
        assert!((s.dist(&c, &e).to_f64() - 1.0).abs() <= 1e-9);
        assert!((s.dist(&d, &e).to_f64() - 0.5).abs() <= 1e-9);
    }

    #[test]
    fn psi_without_annulus_only_scaffolds() {
        let s = Space::exact(NormSpec::L1);
        let u = close_for_psi(&s, &pt(0, 0), &pt(1, 0), &pt(0, 0), &pt(10, 0), 2, 1).unwrap();
        assert!(u.tags().iter().all(|t| *t != Provenance::SphereWitness));
    }

    #[test]
    fn delta_chains() {
        let s = Space::exact(NormSpec::L1);
        let c = close_for_delta(&s, &pt(0, 0), &pt(1, 0), &pt(3, 0), 8).unwrap();
        assert_eq!(c.steps, Some(3));
        assert!(c.universe.contains(&pt(2, 0)));
        let c = close_for_delta(&s, &pt(0, 0), &pt(1, 0), &Point::ratio(5, 2, 0, 1), 8).unwrap();
        assert_eq!(c.steps, Some(4));
        let c = close_for_delta(&s, &pt(0, 0), &pt(1, 0), &pt(30, 0), 8).unwrap();
        assert_eq!(c.steps, None);
        assert!(close_for_delta(&s, &pt(0, 0), &pt(0, 0), &pt(3, 0), 8).is_err());
    }

    #[test]
    fn exact_length_chains_revalidate() {
        for norm in [NormSpec::L1, NormSpec::Linf] {
            let s = Space::exact(norm);
            let (x, y) = (pt(0, 0), Point::ratio(1, 1, 1, 2));
            for n in 1..=6 {
                for z in [pt(2, 1), pt(0, 0), Point::ratio(-3, 2, 5, 4), pt(7, 0)] {
                    let Some(chain) = delta_chain(&s, &x, &y, &z, n).unwrap() else {
                        continue;
                    };
                    assert_eq!(chain.len(), n as usize);
                    assert_eq!(chain.last(), Some(&z));
                    let mut prev = x.clone();
                    for q in &chain {
                        assert!(s.equi(&prev, q, &x, &y));
                        prev = q.clone();
                    }
                }
            }
        }
    }

    #[test]
    fn refuters() {
        let s = Space::exact(NormSpec::L2);
        let u = add_refuters(
            &s,
            RelationId::Equiv2,
            &[pt(0, 0), pt(4, 0), pt(0, 1), pt(0, 2)],
            0,
        )
        .unwrap();
        assert!(u.contains(&pt(2, 0)) && u.contains(&pt(1, 0)));
        let u = add_refuters(
            &s,
            RelationId::Le,
            &[pt(5, 5), pt(6, 6), pt(0, 0), pt(2, 0)],
            0,
        )
        .unwrap();
        assert!(u.contains(&pt(1, 0)));
        let u = add_refuters(&s, RelationId::Neq, &[pt(0, 0), pt(1, 0)], 4).unwrap();
        let far = u.points().last().unwrap();
        assert!(s
            .cmp_len(&s.dist(&pt(0, 0), far), &s.length(int(4)))
            .is_gt());
    }

    #[test]
    fn overflow_is_reported() {
        let s = Space::exact(NormSpec::L1);
        let mut u = Universe::with_cap(&s, 2);
        u.insert(pt(0, 0), Provenance::Input).unwrap();
        u.insert(pt(1, 0), Provenance::Input).unwrap();
        assert_eq!(u.insert(pt(0, 0), Provenance::Input).unwrap(), 0);
        assert!(matches!(
            u.insert(pt(2, 0), Provenance::Input),
            Err(Error::UniverseOverflow { cap: 2 })
        ));
    }
}
