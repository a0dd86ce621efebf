use crate::point::Point;
use crate::relation::RelationKind;

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Var(String),
    Const(Point),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }
}

/// Arithmetic over index variables, for index arguments such as `n + 2^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IndexExpr {
    Lit(u64),
    Var(String),
    Add(Box<IndexExpr>, Box<IndexExpr>),
    Pow2(Box<IndexExpr>),
}

impl IndexExpr {
    pub fn var(name: &str) -> IndexExpr {
        IndexExpr::Var(name.to_string())
    }
}

/// Which truncation parameter caps a countable connective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bound {
    K,
    N,
    Depth,
    Chain,
    Phi,
}

impl Bound {
    pub fn name(self) -> &'static str {
        match self {
            Bound::K => "k",
            Bound::N => "n",
            Bound::Depth => "depth",
            Bound::Chain => "chain",
            Bound::Phi => "phi",
        }
    }

    pub fn from_name(s: &str) -> Option<Bound> {
        [Bound::K, Bound::N, Bound::Depth, Bound::Chain, Bound::Phi]
            .into_iter()
            .find(|b| b.name() == s)
    }
}

/// `⋀_{var ≥ from}` or `⋁_{var ≥ from}`, truncated at evaluation time.
#[derive(Debug, Clone, PartialEq)]
pub struct Countable {
    pub var: String,
    pub from: u64,
    pub bound: Bound,
    pub body: Box<Formula>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemaRef {
    pub kind: RelationKind,
    pub idx: Vec<IndexExpr>,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Formula {
    /// `t1 t2 ≡ t3 t4`
    Equi(Term, Term, Term, Term),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
    ForAll(Vec<String>, Box<Formula>),
    BigAnd(Countable),
    BigOr(Countable),
    Rel(SchemaRef),
}

/// Shorthand constructors used by the schema registry and tests.
pub mod build {
    use super::*;

    pub fn v(name: &str) -> Term {
        Term::var(name)
    }

    pub fn equi(a: &str, b: &str, c: &str, d: &str) -> Formula {
        Formula::Equi(v(a), v(b), v(c), v(d))
    }

    pub fn eq(a: &str, b: &str) -> Formula {
        Formula::Eq(v(a), v(b))
    }

    pub fn neq(a: &str, b: &str) -> Formula {
        Formula::Not(Box::new(eq(a, b)))
    }

    pub fn rel(kind: RelationKind, idx: Vec<IndexExpr>, terms: &[&str]) -> Formula {
        Formula::Rel(SchemaRef {
            kind,
            idx,
            terms: terms.iter().map(|t| v(t)).collect(),
        })
    }

    pub fn lit(n: u64) -> IndexExpr {
        IndexExpr::Lit(n)
    }

    /// A conjunction, collapsed when it has a single member.
    pub fn and(mut items: Vec<Formula>) -> Formula {
        if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::And(items)
        }
    }

    pub fn or(mut items: Vec<Formula>) -> Formula {
        if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Formula::Or(items)
        }
    }

    /// An existential, dropped when no variables are bound.
    pub fn exists(vars: Vec<String>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    pub fn forall(vars: &[&str], body: Formula) -> Formula {
        Formula::ForAll(vars.iter().map(|s| s.to_string()).collect(), Box::new(body))
    }

    pub fn implies(g: Formula, c: Formula) -> Formula {
        Formula::Implies(Box::new(g), Box::new(c))
    }

    pub fn big_and(var: &str, from: u64, bound: Bound, body: Formula) -> Formula {
        Formula::BigAnd(Countable {
            var: var.to_string(),
            from,
            bound,
            body: Box::new(body),
        })
    }

    pub fn big_or(var: &str, from: u64, bound: Bound, body: Formula) -> Formula {
        Formula::BigOr(Countable {
            var: var.to_string(),
            from,
            bound,
            body: Box::new(body),
        })
    }
}

impl Formula {
    /// Whether the point variable `name` occurs anywhere in the formula.
    ///
    /// Inner rebinding is ignored, which only ever over-approximates.
    pub fn mentions(&self, name: &str) -> bool {
        let t = |t: &Term| matches!(t, Term::Var(v) if v == name);
        match self {
            Formula::Equi(a, b, c, d) => t(a) || t(b) || t(c) || t(d),
            Formula::Eq(a, b) => t(a) || t(b),
            Formula::Not(f) => f.mentions(name),
            Formula::And(l) | Formula::Or(l) => l.iter().any(|f| f.mentions(name)),
            Formula::Implies(g, c) => g.mentions(name) || c.mentions(name),
            Formula::Exists(_, f) | Formula::ForAll(_, f) => f.mentions(name),
            Formula::BigAnd(c) | Formula::BigOr(c) => c.body.mentions(name),
            Formula::Rel(r) => r.terms.iter().any(t),
        }
    }

    /// Free point variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        fn walk(f: &Formula, bound: &mut Vec<String>, out: &mut Vec<String>) {
            let term = |t: &Term, bound: &Vec<String>, out: &mut Vec<String>| {
                if let Term::Var(v) = t {
                    if !bound.contains(v) && !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            };
            match f {
                Formula::Equi(a, b, c, d) => {
                    for x in [a, b, c, d] {
                        term(x, bound, out);
                    }
                }
                Formula::Eq(a, b) => {
                    term(a, bound, out);
                    term(b, bound, out);
                }
                Formula::Not(g) => walk(g, bound, out),
                Formula::And(l) | Formula::Or(l) => l.iter().for_each(|g| walk(g, bound, out)),
                Formula::Implies(g, c) => {
                    walk(g, bound, out);
                    walk(c, bound, out);
                }
                Formula::Exists(vs, g) | Formula::ForAll(vs, g) => {
                    let n = bound.len();
                    bound.extend(vs.iter().cloned());
                    walk(g, bound, out);
                    bound.truncate(n);
                }
                Formula::BigAnd(c) | Formula::BigOr(c) => walk(&c.body, bound, out),
                Formula::Rel(r) => r.terms.iter().for_each(|t| term(t, bound, out)),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Relation kinds referenced directly, in order of first occurrence.
    pub fn relations(&self) -> Vec<RelationKind> {
        fn walk(f: &Formula, out: &mut Vec<RelationKind>) {
            match f {
                Formula::Equi(..) | Formula::Eq(..) => {}
                Formula::Not(g) | Formula::Exists(_, g) | Formula::ForAll(_, g) => walk(g, out),
                Formula::And(l) | Formula::Or(l) => l.iter().for_each(|g| walk(g, out)),
                Formula::Implies(g, c) => {
                    walk(g, out);
                    walk(c, out);
                }
                Formula::BigAnd(c) | Formula::BigOr(c) => walk(&c.body, out),
                Formula::Rel(r) => {
                    if !out.contains(&r.kind) {
                        out.push(r.kind);
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// True when the formula has no `∀`, no negation and no implication.
    pub fn is_existential_positive(&self) -> bool {
        match self {
            Formula::Equi(..) | Formula::Eq(..) | Formula::Rel(_) => true,
            Formula::And(l) | Formula::Or(l) => l.iter().all(Formula::is_existential_positive),
            Formula::Exists(_, f) => f.is_existential_positive(),
            Formula::BigAnd(c) | Formula::BigOr(c) => c.body.is_existential_positive(),
            Formula::Not(_) | Formula::Implies(..) | Formula::ForAll(..) => false,
        }
    }

    pub fn size(&self) -> usize {
        1 + match self {
            Formula::Equi(..) | Formula::Eq(..) | Formula::Rel(_) => 0,
            Formula::Not(f) | Formula::Exists(_, f) | Formula::ForAll(_, f) => f.size(),
            Formula::And(l) | Formula::Or(l) => l.iter().map(Formula::size).sum(),
            Formula::Implies(g, c) => g.size() + c.size(),
            Formula::BigAnd(c) | Formula::BigOr(c) => c.body.size(),
        }
    }
}
