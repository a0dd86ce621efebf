//! Bounded model checking of formulas over a finite universe.
//!
//! Quantifiers range over the universe's points. Countable connectives run
//! up to the truncation bounds. Relation references are dispatched through an
//! [`ImplMap`]: either the schema body is evaluated in place of the reference,
//! or the relation's oracle is called on the argument points.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use crate::closure::Universe;
use crate::error::{Error, Result};
use crate::oracles::{oracle, psi_annulus};
use crate::point::{Point, PointKey};
use crate::relation::RelationId;
use crate::space::{Length, Space};

use super::ast::{Formula, IndexExpr, SchemaRef, Term};
use super::schema::{expand_schema, BMode, Schema};
use super::{Impl, ImplMap, TruncationParams};

/// Bindings of free point variables.
pub type Valuation = BTreeMap<String, Point>;

type Env<'f> = Vec<(&'f str, u32)>;
type IEnv<'f> = Vec<(&'f str, u64)>;

/// One conjunct of a quantifier body, possibly negated.
type Item<'f> = (&'f Formula, bool);

pub struct Evaluator<'u> {
    space: &'u Space,
    universe: &'u Universe,
    trunc: TruncationParams,
    impls: ImplMap,
    mode: BMode,
    explain: bool,
    extra: Vec<Point>,
    consts: HashMap<PointKey, u32>,
    dist: RefCell<HashMap<(u32, u32), Length>>,
    schemas: RefCell<HashMap<RelationId, Rc<Schema>>>,
    memo: RefCell<HashMap<(RelationId, Vec<u32>), bool>>,
    trace: RefCell<Vec<String>>,
}

impl<'u> Evaluator<'u> {
    pub fn new(
        space: &'u Space,
        universe: &'u Universe,
        trunc: TruncationParams,
        impls: ImplMap,
    ) -> Evaluator<'u> {
        Evaluator {
            space,
            universe,
            trunc,
            impls,
            mode: BMode::default(),
            explain: false,
            extra: Vec::new(),
            consts: HashMap::new(),
            dist: RefCell::new(HashMap::new()),
            schemas: RefCell::new(HashMap::new()),
            memo: RefCell::new(HashMap::new()),
            trace: RefCell::new(Vec::new()),
        }
    }

    pub fn with_mode(mut self, mode: BMode) -> Self {
        self.mode = mode;
        self
    }

    /// Record the top-level witnesses and refuters found during evaluation.
    pub fn with_explain(mut self, on: bool) -> Self {
        self.explain = on;
        self
    }

    pub fn trace(&self) -> Vec<String> {
        self.trace.borrow().clone()
    }

    fn point(&self, i: u32) -> &Point {
        let u = self.universe.len();
        let i = i as usize;
        if i < u {
            self.universe.point(i)
        } else {
            &self.extra[i - u]
        }
    }

    fn intern(&mut self, p: &Point) -> Result<u32> {
        self.space.check(p)?;
        if let Some(i) = self.universe.find(p) {
            return Ok(i as u32);
        }
        if let Some(i) = self.extra.iter().position(|q| self.space.same_point(p, q)) {
            return Ok((self.universe.len() + i) as u32);
        }
        self.extra.push(p.clone());
        Ok((self.universe.len() + self.extra.len() - 1) as u32)
    }

    fn intern_constants(&mut self, f: &Formula) -> Result<()> {
        let mut found = Vec::new();
        collect_constants(f, &mut found);
        for p in found {
            let i = self.intern(&p)?;
            self.consts.insert(p.key(), i);
        }
        Ok(())
    }

    /// Evaluates `f` with its free variables bound by `valuation`.
    pub fn eval(&mut self, f: &Formula, valuation: &Valuation) -> Result<bool> {
        self.trunc.validate()?;
        self.intern_constants(f)?;
        let mut bound = Vec::new();
        for (name, p) in valuation {
            bound.push((name.clone(), self.intern(p)?));
        }
        let mut env: Env<'_> = bound.iter().map(|(n, i)| (n.as_str(), *i)).collect();
        let trunc = self.trunc;
        self.trace.borrow_mut().clear();
        self.ev(f, &mut env, &mut Vec::new(), &trunc, self.explain)
    }

    fn d(&self, i: u32, j: u32) -> Length {
        let key = if i <= j { (i, j) } else { (j, i) };
        if let Some(l) = self.dist.borrow().get(&key) {
            return l.clone();
        }
        let l = self.space.dist(self.point(i), self.point(j));
        self.dist.borrow_mut().insert(key, l.clone());
        l
    }

    fn same(&self, i: u32, j: u32) -> bool {
        i == j || self.space.same_point(self.point(i), self.point(j))
    }

    fn term(&self, t: &Term, env: &Env<'_>) -> Result<u32> {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(n, _)| *n == v.as_str())
                .map(|(_, i)| *i)
                .ok_or_else(|| Error::Unbound(v.clone())),
            Term::Const(p) => self
                .consts
                .get(&p.key())
                .copied()
                .ok_or_else(|| Error::Unbound(p.to_string())),
        }
    }

    fn index(&self, e: &IndexExpr, ix: &IEnv<'_>) -> Result<u64> {
        match e {
            IndexExpr::Lit(n) => Ok(*n),
            IndexExpr::Var(v) => ix
                .iter()
                .rev()
                .find(|(n, _)| *n == v.as_str())
                .map(|(_, i)| *i)
                .ok_or_else(|| Error::Unbound(v.clone())),
            IndexExpr::Add(a, b) => self
                .index(a, ix)?
                .checked_add(self.index(b, ix)?)
                .ok_or_else(|| Error::Precondition("index overflow".into())),
            IndexExpr::Pow2(a) => {
                let e = self.index(a, ix)?;
                if e >= 63 {
                    return Err(Error::Precondition(format!("2^{e} overflows")));
                }
                Ok(1 << e)
            }
        }
    }

    fn ev<'f>(
        &self,
        f: &'f Formula,
        env: &mut Env<'f>,
        ix: &mut IEnv<'f>,
        tr: &TruncationParams,
        top: bool,
    ) -> Result<bool> {
        match f {
            Formula::Equi(a, b, c, d) => {
                let (a, b) = (self.term(a, env)?, self.term(b, env)?);
                let (c, d) = (self.term(c, env)?, self.term(d, env)?);
                Ok(self.space.len_eq(&self.d(a, b), &self.d(c, d)))
            }
            Formula::Eq(a, b) => Ok(self.same(self.term(a, env)?, self.term(b, env)?)),
            Formula::Not(g) => Ok(!self.ev(g, env, ix, tr, top)?),
            Formula::And(l) => {
                for g in l {
                    if !self.ev(g, env, ix, tr, top)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(l) => {
                for g in l {
                    if self.ev(g, env, ix, tr, top)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Implies(g, c) => {
                Ok(!self.ev(g, env, ix, tr, top)? || self.ev(c, env, ix, tr, top)?)
            }
            Formula::Exists(vs, body) => {
                let mut items = Vec::new();
                flatten(body, false, &mut items);
                self.exists(vs, items, env, ix, tr, top.then_some("exists"))
            }
            Formula::ForAll(vs, body) => {
                let mut items = Vec::new();
                flatten(body, true, &mut items);
                Ok(!self.exists(vs, items, env, ix, tr, top.then_some("refuted by"))?)
            }
            Formula::BigAnd(c) | Formula::BigOr(c) => {
                let conj = matches!(f, Formula::BigAnd(_));
                let hi = tr.bound(c.bound);
                let mut i = c.from;
                while i <= hi {
                    ix.push((c.var.as_str(), i));
                    let r = self.ev(&c.body, env, ix, tr, false);
                    ix.pop();
                    if r? != conj {
                        return Ok(!conj);
                    }
                    i += 1;
                }
                Ok(conj)
            }
            Formula::Rel(r) => self.rel(r, env, ix, top),
        }
    }

    /// Whether some assignment of `vars` satisfies every item.
    fn exists<'f>(
        &self,
        vars: &'f [String],
        items: Vec<Item<'f>>,
        env: &mut Env<'f>,
        ix: &mut IEnv<'f>,
        tr: &TruncationParams,
        label: Option<&str>,
    ) -> Result<bool> {
        if self.universe.is_empty() {
            return Ok(false);
        }
        // ∃v (A ∨ B) splits into ∃v A ∨ ∃v B; disjuncts free of v need no search
        if let [(g, neg)] = items.as_slice() {
            if let Some(parts) = disjuncts(g, *neg) {
                for (h, hneg) in parts {
                    let mut sub = Vec::new();
                    flatten(h, hneg, &mut sub);
                    if self.exists(vars, sub, env, ix, tr, label)? {
                        return Ok(true);
                    }
                }
                return Ok(false);
            }
        }
        let (order, levels, pre) = schedule(vars, items);
        for (g, neg) in pre {
            if self.ev(g, env, ix, tr, false)? == neg {
                return Ok(false);
            }
        }
        if order.is_empty() {
            return Ok(true);
        }
        self.search(&order, &levels, 0, env, ix, tr, label)
    }

    #[allow(clippy::too_many_arguments)]
    fn search<'f>(
        &self,
        order: &[&'f str],
        levels: &[Vec<Item<'f>>],
        depth: usize,
        env: &mut Env<'f>,
        ix: &mut IEnv<'f>,
        tr: &TruncationParams,
        label: Option<&str>,
    ) -> Result<bool> {
        if depth == order.len() {
            if let Some(label) = label {
                let bound = &env[env.len() - order.len()..];
                let text = bound
                    .iter()
                    .map(|(n, i)| format!("{n} := {}", self.point(*i)))
                    .collect::<Vec<_>>()
                    .join(", ");
                self.trace.borrow_mut().push(format!("{label} {text}"));
            }
            return Ok(true);
        }
        for p in 0..self.universe.len() as u32 {
            env.push((order[depth], p));
            let mut ok = true;
            for (g, neg) in &levels[depth] {
                match self.ev(g, env, ix, tr, false) {
                    Ok(v) if v == *neg => {
                        ok = false;
                        break;
                    }
                    Ok(_) => {}
                    Err(e) => {
                        env.pop();
                        return Err(e);
                    }
                }
            }
            let found = ok && self.search(order, levels, depth + 1, env, ix, tr, label)?;
            env.pop();
            if found {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn schema(&self, id: RelationId) -> Result<Rc<Schema>> {
        if let Some(s) = self.schemas.borrow().get(&id) {
            return Ok(s.clone());
        }
        let s = Rc::new(expand_schema(id, self.trunc.b_depth, self.mode)?);
        self.schemas.borrow_mut().insert(id, s.clone());
        Ok(s)
    }

    fn rel(&self, r: &SchemaRef, env: &Env<'_>, ix: &IEnv<'_>, top: bool) -> Result<bool> {
        let idx = r
            .idx
            .iter()
            .map(|e| self.index(e, ix))
            .collect::<Result<Vec<_>>>()?;
        let id = RelationId::new(r.kind, &idx)?;
        let pts = r
            .terms
            .iter()
            .map(|t| self.term(t, env))
            .collect::<Result<Vec<_>>>()?;
        let how = self.impls.get(r.kind).ok_or(Error::MissingImpl(r.kind))?;
        let value = match how {
            Impl::AsOracle => self.call_oracle(id, &pts)?,
            Impl::AsFormula => {
                let key = (id, pts);
                let cached = self.memo.borrow().get(&key).copied();
                match cached {
                    Some(v) => v,
                    None => {
                        let v = self.expand(id, &key.1)?;
                        self.memo.borrow_mut().insert(key, v);
                        v
                    }
                }
            }
        };
        if top && self.explain {
            let how = if how == Impl::AsOracle {
                "oracle"
            } else {
                "formula"
            };
            self.trace
                .borrow_mut()
                .push(format!("{id} via {how}: {value}"));
        }
        Ok(value)
    }

    fn call_oracle(&self, id: RelationId, pts: &[u32]) -> Result<bool> {
        if let RelationId::Psi(n, k) = id {
            let [a, b, c, d] = [pts[0], pts[1], pts[2], pts[3]];
            if self.same(a, b) || self.same(c, d) {
                return Ok(false);
            }
            return Ok(psi_annulus(self.space, n, k, &self.d(a, b), &self.d(c, d)));
        }
        let refs: Vec<&Point> = pts.iter().map(|&i| self.point(i)).collect();
        oracle(self.space, id, &refs)
    }

    fn expand(&self, id: RelationId, pts: &[u32]) -> Result<bool> {
        let schema = self.schema(id)?;
        let mut tr = self.trunc;
        if id == RelationId::Gamma && tr.adaptive_n && !self.same(pts[0], pts[1]) {
            tr.n = tr.n.max(self.adaptive_n(pts[0], pts[1], pts[2]));
        }
        let mut env: Env<'_> = schema
            .params
            .iter()
            .map(String::as_str)
            .zip(pts.iter().copied())
            .collect();
        self.ev(&schema.body, &mut env, &mut Vec::new(), &tr, false)
    }

    /// `ceil(2^K·d(b,c)/d(a,b)) + 2`, clamped so shifted indices stay valid.
    fn adaptive_n(&self, a: u32, b: u32, c: u32) -> u32 {
        let scale = crate::scalar::int(1i64 << self.trunc.k);
        let m = self.space.ratio_ceil(&self.d(b, c), &self.d(a, b), &scale);
        let cap = crate::relation::MAX_INDEX - (1u64 << self.trunc.k);
        m.saturating_add(2).min(cap) as u32
    }
}

/// Convenience wrapper around [`Evaluator`] with the default B mode.
pub fn eval(
    f: &Formula,
    space: &Space,
    universe: &Universe,
    valuation: &Valuation,
    trunc: &TruncationParams,
    impls: &ImplMap,
) -> Result<bool> {
    Evaluator::new(space, universe, *trunc, impls.clone()).eval(f, valuation)
}

fn collect_constants(f: &Formula, out: &mut Vec<Point>) {
    let term = |t: &Term, out: &mut Vec<Point>| {
        if let Term::Const(p) = t {
            out.push(p.clone());
        }
    };
    match f {
        Formula::Equi(a, b, c, d) => [a, b, c, d].into_iter().for_each(|t| term(t, out)),
        Formula::Eq(a, b) => {
            term(a, out);
            term(b, out);
        }
        Formula::Not(g) | Formula::Exists(_, g) | Formula::ForAll(_, g) => {
            collect_constants(g, out)
        }
        Formula::And(l) | Formula::Or(l) => l.iter().for_each(|g| collect_constants(g, out)),
        Formula::Implies(g, c) => {
            collect_constants(g, out);
            collect_constants(c, out);
        }
        Formula::BigAnd(c) | Formula::BigOr(c) => collect_constants(&c.body, out),
        Formula::Rel(r) => r.terms.iter().for_each(|t| term(t, out)),
    }
}

/// Splits `f` (negated when `neg`) into the conjuncts it asserts.
fn flatten<'f>(f: &'f Formula, neg: bool, out: &mut Vec<Item<'f>>) {
    match (f, neg) {
        (Formula::And(l), false) => l.iter().for_each(|g| flatten(g, false, out)),
        (Formula::Or(l), true) => l.iter().for_each(|g| flatten(g, true, out)),
        (Formula::Implies(g, c), true) => {
            flatten(g, false, out);
            flatten(c, true, out);
        }
        (Formula::Not(g), _) => flatten(g, !neg, out),
        _ => out.push((f, neg)),
    }
}

/// The disjuncts `f` (negated when `neg`) asserts, if it is a disjunction.
fn disjuncts(f: &Formula, neg: bool) -> Option<Vec<Item<'_>>> {
    match (f, neg) {
        (Formula::Or(l), false) => Some(l.iter().map(|g| (g, false)).collect()),
        (Formula::And(l), true) => Some(l.iter().map(|g| (g, true)).collect()),
        (Formula::Implies(g, c), false) => Some(vec![(&**g, true), (&**c, false)]),
        _ => None,
    }
}

/// Orders the quantified variables greedily, binding first the variable
/// that completes the most conjuncts, and attaches each conjunct to the
/// level where its last variable is bound.
#[allow(clippy::type_complexity)]
fn schedule<'f>(
    vars: &'f [String],
    items: Vec<Item<'f>>,
) -> (Vec<&'f str>, Vec<Vec<Item<'f>>>, Vec<Item<'f>>) {
    let uses: Vec<Vec<usize>> = items
        .iter()
        .map(|(g, _)| (0..vars.len()).filter(|&v| g.mentions(&vars[v])).collect())
        .collect();
    let mut pre = Vec::new();
    let mut placed = vec![false; items.len()];
    for (i, u) in uses.iter().enumerate() {
        if u.is_empty() {
            pre.push(items[i]);
            placed[i] = true;
        }
    }
    let mut bound = vec![false; vars.len()];
    let mut order = Vec::new();
    let mut levels = Vec::new();
    for _ in 0..vars.len() {
        let completes = |v: usize| {
            (0..items.len())
                .filter(|&i| !placed[i] && uses[i].iter().all(|&w| w == v || bound[w]))
                .count()
        };
        let pick = (0..vars.len())
            .filter(|&v| !bound[v])
            .max_by_key(|&v| (completes(v), std::cmp::Reverse(v)))
            .expect("an unbound variable remains");
        bound[pick] = true;
        let mut level = Vec::new();
        for i in 0..items.len() {
            if !placed[i] && uses[i].iter().all(|&w| bound[w]) {
                level.push(items[i]);
                placed[i] = true;
            }
        }
        order.push(vars[pick].as_str());
        levels.push(level);
    }
    (order, levels, pre)
}
