//! The definitional tower, one schema per relation family, each written
//! over `≡`, `=` and references to lower schemas.

use crate::error::{Error, Result};
use crate::relation::{RelationId, RelationKind};

use super::ast::build::*;
use super::ast::{Bound, Formula, IndexExpr};

/// Shape of the betweenness schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BMode {
    /// Consecutive chain pairs only, as literally written.
    Strict,
    /// Also accepts `b` landing exactly on a chain point.
    #[default]
    Repaired,
}

impl BMode {
    pub fn name(self) -> &'static str {
        match self {
            BMode::Strict => "strict",
            BMode::Repaired => "repaired",
        }
    }

    pub fn parse(s: &str) -> Result<BMode> {
        match s {
            "strict" | "strict-paper" => Ok(BMode::Strict),
            "repaired" => Ok(BMode::Repaired),
            _ => Err(Error::Format(format!("unknown B mode {s:?}"))),
        }
    }
}

/// An expanded definition: formal parameters and a body over them.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub id: RelationId,
    pub params: Vec<String>,
    pub body: Formula,
}

use RelationKind as K;

fn names(prefix: &str, range: impl Iterator<Item = u64>) -> Vec<String> {
    range.map(|i| format!("{prefix}{i}")).collect()
}

fn m(a: &str, b: &str, c: &str) -> Formula {
    rel(K::Midpoint, vec![], &[a, b, c])
}

fn gamma(a: &str, b: &str, c: &str) -> Formula {
    rel(K::Gamma, vec![], &[a, b, c])
}

fn equiv2_body() -> Formula {
    exists(
        vec!["e".into()],
        and(vec![
            equi("a", "e", "c", "d"),
            equi("b", "e", "c", "d"),
            forall(
                &["x", "y"],
                implies(
                    and(vec![equi("x", "a", "x", "b"), equi("y", "a", "y", "x")]),
                    exists(
                        vec!["z".into()],
                        and(vec![equi("z", "c", "x", "y"), equi("z", "d", "x", "y")]),
                    ),
                ),
            ),
        ]),
    )
}

fn phi_body(n: u32) -> Formula {
    let phi0 = |x: &str| rel(K::Phi, vec![lit(0)], &["a", "b", x]);
    if n == 0 {
        return and(vec![
            equi("x", "a", "x", "b"),
            rel(K::Equiv2, vec![], &["a", "b", "x", "a"]),
        ]);
    }
    and(vec![
        rel(K::Phi, vec![lit(n as u64 - 1)], &["a", "b", "x"]),
        forall(
            &["x3"],
            exists(
                vec!["x1".into(), "x2".into(), "y".into()],
                implies(
                    phi0("x3"),
                    and(vec![
                        phi0("x1"),
                        phi0("x2"),
                        rel(K::Equiv2, vec![], &["x", "y", "x3", "x"]),
                        rel(K::Le, vec![], &["x", "y", "x1", "x2"]),
                    ]),
                ),
            ),
        ),
    ])
}

fn midpoint_body() -> Formula {
    and(vec![
        neq("a", "c"),
        big_and(
            "n",
            0,
            Bound::Phi,
            rel(K::Phi, vec![IndexExpr::var("n")], &["a", "c", "b"]),
        ),
    ])
}

/// Output point of `ALPHA(n)`.
pub fn alpha_output(n: u32) -> String {
    format!("x{}", n - 1)
}

fn alpha_body(n: u32) -> Formula {
    let out = alpha_output(n);
    if n == 1 {
        return and(vec![neq("a", "b"), eq(&out, "b")]);
    }
    // chain a, b, x1, ..., x_{n-1}; constraints only where all three exist
    let x = |i: u64| format!("x{i}");
    let mut chain = vec![m("a", "b", &x(1))];
    if n >= 3 {
        chain.push(m("b", &x(1), &x(2)));
    }
    for i in 2..=(n as u64).saturating_sub(2) {
        chain.push(m(&x(i - 1), &x(i), &x(i + 1)));
    }
    let hidden = names("x", 1..(n as u64).saturating_sub(1));
    and(vec![neq("a", "b"), exists(hidden, and(chain))])
}

/// Output point of `BETA(k)`.
pub fn beta_output(k: u32) -> String {
    format!("y{k}")
}

fn beta_body(k: u32) -> Formula {
    let y = |i: u64| format!("y{i}");
    let mut chain = vec![m("a", &y(1), "b")];
    for i in 1..k as u64 {
        chain.push(m("a", &y(i + 1), &y(i)));
    }
    let hidden = names("y", 1..k as u64);
    and(vec![neq("a", "b"), exists(hidden, and(chain))])
}

fn psi_body(n: u32, k: u32) -> Formula {
    and(vec![
        neq("a", "b"),
        neq("c", "d"),
        exists(
            vec!["e".into(), "u".into(), "v".into()],
            and(vec![
                equi("c", "e", "a", "u"),
                equi("d", "e", "a", "v"),
                rel(K::Beta, vec![lit(k as u64)], &["a", "b", "v"]),
                rel(K::Alpha, vec![lit(n as u64)], &["a", "v", "u"]),
            ]),
        ),
    ])
}

fn gamma_body() -> Formula {
    let n = || IndexExpr::var("n");
    let k = || IndexExpr::var("k");
    let shifted = IndexExpr::Add(Box::new(n()), Box::new(IndexExpr::Pow2(Box::new(k()))));
    big_and(
        "k",
        1,
        Bound::K,
        big_or(
            "n",
            1,
            Bound::N,
            and(vec![
                rel(K::Psi, vec![n(), k()], &["a", "b", "b", "c"]),
                rel(K::Psi, vec![shifted, k()], &["a", "b", "a", "c"]),
            ]),
        ),
    )
}

fn between_level(n: u32, mode: BMode) -> Formula {
    let len = 1u64 << n;
    let p = |j: u64| -> String {
        if j == 0 {
            "a".into()
        } else if j == len {
            "c".into()
        } else {
            format!("m{j}")
        }
    };
    let mut chain = Vec::new();
    if len == 2 {
        chain.push(m("a", "m1", "c"));
    } else {
        for i in 2..=len - 2 {
            chain.push(m(&p(i - 1), &p(i), &p(i + 1)));
        }
        chain.push(m("a", "m1", "m2"));
        chain.push(m(&p(len - 2), &p(len - 1), "c"));
    }
    let mut hits = Vec::new();
    match mode {
        BMode::Strict => {
            for i in 1..=len.saturating_sub(2) {
                hits.push(gamma(&p(i), "b", &p(i + 1)));
            }
            hits.push(gamma("a", "b", "m1"));
            hits.push(gamma(&p(len - 1), "b", "c"));
        }
        BMode::Repaired => {
            for j in 0..len {
                hits.push(gamma(&p(j), "b", &p(j + 1)));
            }
            for j in 1..len {
                hits.push(eq("b", &p(j)));
            }
        }
    }
    chain.push(or(hits));
    exists(names("m", 1..len), and(chain))
}

fn between_body(depth: u32, mode: BMode) -> Formula {
    let levels = (1..=depth).map(|n| between_level(n, mode)).collect();
    or(vec![eq("a", "b"), eq("b", "c"), and(levels)])
}

/// Output point of `DELTA(n)`.
pub fn delta_output(n: u32) -> String {
    format!("z{n}")
}

fn delta_body(n: u32) -> Formula {
    let z = |i: u32| format!("z{i}");
    let steps = (0..n).map(|i| equi(&z(i), &z(i + 1), "z0", "x")).collect();
    exists(names("z", 1..n as u64), and(steps))
}

fn neq_body() -> Formula {
    forall(
        &["z"],
        big_or(
            "n",
            2,
            Bound::Chain,
            rel(K::Delta, vec![IndexExpr::var("n")], &["x", "y", "z"]),
        ),
    )
}

fn le_body() -> Formula {
    forall(
        &["m"],
        exists(
            vec!["s".into()],
            implies(
                equi("c", "m", "d", "m"),
                and(vec![equi("a", "b", "c", "s"), equi("c", "m", "s", "m")]),
            ),
        ),
    )
}

/// Formal parameters of a relation, in argument order.
pub fn schema_params(id: RelationId) -> Vec<String> {
    let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    match id {
        RelationId::Equiv2 | RelationId::Psi(..) | RelationId::Le | RelationId::Parallelogram => {
            v(&["a", "b", "c", "d"])
        }
        RelationId::Phi(_) => v(&["a", "b", "x"]),
        RelationId::Alpha(n) => vec!["a".into(), "b".into(), alpha_output(n)],
        RelationId::Beta(k) => vec!["a".into(), "b".into(), beta_output(k)],
        RelationId::Delta(n) => vec!["z0".into(), "x".into(), delta_output(n)],
        RelationId::Neq => v(&["x", "y"]),
        RelationId::Midpoint | RelationId::Gamma | RelationId::Between | RelationId::Collinear => {
            v(&["a", "b", "c"])
        }
    }
}

/// One-step expansion of a relation; references to lower relations stay
/// symbolic. `depth` is the number of betweenness refinement levels.
pub fn expand_schema(id: RelationId, depth: u32, mode: BMode) -> Result<Schema> {
    let body = match id {
        RelationId::Equiv2 => equiv2_body(),
        RelationId::Phi(n) => phi_body(n),
        RelationId::Midpoint => midpoint_body(),
        RelationId::Alpha(n) => alpha_body(n),
        RelationId::Beta(k) => beta_body(k),
        RelationId::Psi(n, k) => psi_body(n, k),
        RelationId::Gamma => gamma_body(),
        RelationId::Between => {
            if depth == 0 {
                return Err(Error::Precondition("betweenness needs depth >= 1".into()));
            }
            if depth > 6 {
                return Err(Error::Precondition(format!(
                    "betweenness depth {depth} would quantify over {} chain points",
                    (1u64 << depth) - 1
                )));
            }
            between_body(depth, mode)
        }
        RelationId::Delta(n) => delta_body(n),
        RelationId::Neq => neq_body(),
        RelationId::Le => le_body(),
        RelationId::Collinear | RelationId::Parallelogram => {
            return Err(Error::NoDefinition(id.to_string()))
        }
    };
    Ok(Schema {
        id,
        params: schema_params(id),
        body,
    })
}
