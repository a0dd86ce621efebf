//! S-expression surface syntax for formulas.
//!
//! ```text
//! (equi a b c d)  (= a b)  (not f)  (and f ...)  (or f ...)  (implies f g)
//! (exists (x y) f)  (forall (x) f)
//! (bigand k f)  (bigor n f)  (bigor (n 2 chain) f)
//! (rel PSI (+ n (pow2 k)) k a b a c)
//! (pt 1/2 3)  (pt 0.5 3.0)
//! ```
//!
//! `;` starts a comment that runs to the end of the line.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::point::Point;
use crate::relation::RelationKind;
use crate::scalar::{format_rational, parse_rational, Scalar};

use super::ast::{Bound, Countable, Formula, IndexExpr, SchemaRef, Term};

#[derive(Debug, Clone)]
enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

fn err<T>(pos: Pos, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    })
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl<'a> Reader<'a> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn skip_blank(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp> {
        self.skip_blank();
        let start = self.pos;
        match self.chars.peek().copied() {
            None => err(start, "unexpected end of input"),
            Some(')') => err(start, "unexpected ')'"),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_blank();
                    match self.chars.peek() {
                        None => return err(start, "unclosed '('"),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Sexp::Atom(s, start))
            }
        }
    }
}

fn read_one(text: &str) -> Result<Sexp> {
    let mut r = Reader {
        chars: text.chars().peekable(),
        pos: Pos { line: 1, column: 1 },
    };
    let s = r.read()?;
    r.skip_blank();
    if r.chars.peek().is_some() {
        return err(r.pos, "trailing input after formula");
    }
    Ok(s)
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_alphabetic() || c == '_')
        && cs.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

fn ident(s: &Sexp, what: &str) -> Result<String> {
    match s {
        Sexp::Atom(a, _) if is_ident(a) => Ok(a.clone()),
        other => err(other.pos(), format!("expected {what}")),
    }
}

fn term(s: &Sexp) -> Result<Term> {
    match s {
        Sexp::Atom(a, p) => {
            if is_ident(a) {
                Ok(Term::Var(a.clone()))
            } else {
                err(*p, format!("expected a variable or (pt x y), found {a:?}"))
            }
        }
        Sexp::List(items, p) => {
            let head = items.first().and_then(|h| match h {
                Sexp::Atom(a, _) => Some(a.as_str()),
                _ => None,
            });
            if head != Some("pt") || items.len() != 3 {
                return err(*p, "expected (pt x y)");
            }
            let coord = |s: &Sexp| -> Result<Scalar> {
                match s {
                    Sexp::Atom(a, p) => {
                        let float = a.contains(['.', 'e', 'E']);
                        let parsed = if float {
                            a.parse::<f64>()
                                .ok()
                                .filter(|v| v.is_finite())
                                .map(Scalar::Float)
                        } else {
                            parse_rational(a).ok().map(Scalar::Exact)
                        };
                        match parsed {
                            Some(v) => Ok(v),
                            None => err(*p, format!("invalid coordinate {a:?}")),
                        }
                    }
                    other => err(other.pos(), "expected a coordinate literal"),
                }
            };
            let x = coord(&items[1])?;
            let y = coord(&items[2])?;
            match Point::new(x, y) {
                Ok(pt) => Ok(Term::Const(pt)),
                Err(_) => err(*p, "point mixes exact and float coordinates"),
            }
        }
    }
}

fn index_expr(s: &Sexp) -> Result<IndexExpr> {
    match s {
        Sexp::Atom(a, p) => {
            if let Ok(n) = a.parse::<u64>() {
                Ok(IndexExpr::Lit(n))
            } else if is_ident(a) {
                Ok(IndexExpr::Var(a.clone()))
            } else {
                err(*p, format!("invalid index expression {a:?}"))
            }
        }
        Sexp::List(items, p) => match items.as_slice() {
            [Sexp::Atom(h, _), x, y] if h == "+" => Ok(IndexExpr::Add(
                Box::new(index_expr(x)?),
                Box::new(index_expr(y)?),
            )),
            [Sexp::Atom(h, _), x] if h == "pow2" => Ok(IndexExpr::Pow2(Box::new(index_expr(x)?))),
            _ => err(*p, "expected (+ e e) or (pow2 e)"),
        },
    }
}

fn formula(s: &Sexp) -> Result<Formula> {
    let (items, pos) = match s {
        Sexp::List(items, p) => (items, *p),
        Sexp::Atom(a, p) => return err(*p, format!("expected a formula, found {a:?}")),
    };
    let head = match items.first() {
        Some(Sexp::Atom(h, _)) => h.as_str(),
        Some(other) => return err(other.pos(), "expected a connective name"),
        None => return err(pos, "empty formula"),
    };
    let args = &items[1..];
    let want = |n: usize| -> Result<()> {
        if args.len() == n {
            Ok(())
        } else {
            err(
                pos,
                format!("{head} takes {n} arguments, found {}", args.len()),
            )
        }
    };
    match head {
        "equi" => {
            want(4)?;
            Ok(Formula::Equi(
                term(&args[0])?,
                term(&args[1])?,
                term(&args[2])?,
                term(&args[3])?,
            ))
        }
        "=" => {
            want(2)?;
            Ok(Formula::Eq(term(&args[0])?, term(&args[1])?))
        }
        "not" => {
            want(1)?;
            Ok(Formula::Not(Box::new(formula(&args[0])?)))
        }
        "and" => Ok(Formula::And(
            args.iter().map(formula).collect::<Result<_>>()?,
        )),
        "or" => Ok(Formula::Or(
            args.iter().map(formula).collect::<Result<_>>()?,
        )),
        "implies" => {
            want(2)?;
            Ok(Formula::Implies(
                Box::new(formula(&args[0])?),
                Box::new(formula(&args[1])?),
            ))
        }
        "exists" | "forall" => {
            want(2)?;
            let vars = match &args[0] {
                Sexp::List(vs, _) if !vs.is_empty() => vs
                    .iter()
                    .map(|v| ident(v, "a variable name"))
                    .collect::<Result<Vec<_>>>()?,
                other => return err(other.pos(), "expected a nonempty variable list"),
            };
            let body = Box::new(formula(&args[1])?);
            Ok(if head == "exists" {
                Formula::Exists(vars, body)
            } else {
                Formula::ForAll(vars, body)
            })
        }
        "bigand" | "bigor" => {
            want(2)?;
            let default = if head == "bigand" { Bound::K } else { Bound::N };
            let (var, from, bound) = match &args[0] {
                Sexp::Atom(..) => (ident(&args[0], "an index variable")?, 1, default),
                Sexp::List(spec, p) => match spec.as_slice() {
                    [v, Sexp::Atom(f, fp), Sexp::Atom(b, bp)] => {
                        let from = match f.parse::<u64>() {
                            Ok(n) => n,
                            Err(_) => return err(*fp, "expected a starting index"),
                        };
                        let bound = match Bound::from_name(b) {
                            Some(b) => b,
                            None => return err(*bp, format!("unknown bound {b:?}")),
                        };
                        (ident(v, "an index variable")?, from, bound)
                    }
                    _ => return err(*p, "expected (var from bound)"),
                },
            };
            let c = Countable {
                var,
                from,
                bound,
                body: Box::new(formula(&args[1])?),
            };
            Ok(if head == "bigand" {
                Formula::BigAnd(c)
            } else {
                Formula::BigOr(c)
            })
        }
        "rel" => {
            let (name, npos) = match args.first() {
                Some(Sexp::Atom(a, p)) => (a.as_str(), *p),
                Some(other) => return err(other.pos(), "expected a relation name"),
                None => return err(pos, "rel needs a relation name"),
            };
            let kind = match RelationKind::from_name(name) {
                Ok(k) => k,
                Err(_) => return err(npos, format!("unknown relation {name:?}")),
            };
            let rest = &args[1..];
            let ni = kind.index_arity();
            let nt = kind.term_arity();
            if rest.len() != ni + nt {
                return err(
                    pos,
                    format!(
                        "{} takes {ni} index and {nt} point arguments, found {}",
                        kind.name(),
                        rest.len()
                    ),
                );
            }
            Ok(Formula::Rel(SchemaRef {
                kind,
                idx: rest[..ni].iter().map(index_expr).collect::<Result<_>>()?,
                terms: rest[ni..].iter().map(term).collect::<Result<_>>()?,
            }))
        }
        other => err(pos, format!("unknown connective {other:?}")),
    }
}

/// Parses one formula.
pub fn parse_formula(text: &str) -> Result<Formula> {
    formula(&read_one(text)?)
}

fn print_term(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(v),
        Term::Const(p) => {
            out.push_str("(pt ");
            print_scalar(&p.x, out);
            out.push(' ');
            print_scalar(&p.y, out);
            out.push(')');
        }
    }
}

fn print_scalar(s: &Scalar, out: &mut String) {
    match s {
        Scalar::Exact(r) => out.push_str(&format_rational(r)),
        // Debug formatting always keeps a '.' or exponent, so it reads back as float.
        Scalar::Float(v) => {
            let _ = write!(out, "{v:?}");
        }
    }
}

fn print_index(e: &IndexExpr, out: &mut String) {
    match e {
        IndexExpr::Lit(n) => {
            let _ = write!(out, "{n}");
        }
        IndexExpr::Var(v) => out.push_str(v),
        IndexExpr::Add(a, b) => {
            out.push_str("(+ ");
            print_index(a, out);
            out.push(' ');
            print_index(b, out);
            out.push(')');
        }
        IndexExpr::Pow2(a) => {
            out.push_str("(pow2 ");
            print_index(a, out);
            out.push(')');
        }
    }
}

fn print_into(f: &Formula, out: &mut String) {
    let list = |out: &mut String, head: &str, items: &[Formula]| {
        out.push('(');
        out.push_str(head);
        for g in items {
            out.push(' ');
            print_into(g, out);
        }
        out.push(')');
    };
    match f {
        Formula::Equi(a, b, c, d) => {
            out.push_str("(equi");
            for t in [a, b, c, d] {
                out.push(' ');
                print_term(t, out);
            }
            out.push(')');
        }
        Formula::Eq(a, b) => {
            out.push_str("(= ");
            print_term(a, out);
            out.push(' ');
            print_term(b, out);
            out.push(')');
        }
        Formula::Not(g) => {
            out.push_str("(not ");
            print_into(g, out);
            out.push(')');
        }
        Formula::And(l) => list(out, "and", l),
        Formula::Or(l) => list(out, "or", l),
        Formula::Implies(g, c) => {
            out.push_str("(implies ");
            print_into(g, out);
            out.push(' ');
            print_into(c, out);
            out.push(')');
        }
        Formula::Exists(vs, g) | Formula::ForAll(vs, g) => {
            let head = if matches!(f, Formula::Exists(..)) {
                "exists"
            } else {
                "forall"
            };
            let _ = write!(out, "({head} ({}) ", vs.join(" "));
            print_into(g, out);
            out.push(')');
        }
        Formula::BigAnd(c) | Formula::BigOr(c) => {
            let (head, default) = if matches!(f, Formula::BigAnd(_)) {
                ("bigand", Bound::K)
            } else {
                ("bigor", Bound::N)
            };
            if c.from == 1 && c.bound == default {
                let _ = write!(out, "({head} {} ", c.var);
            } else {
                let _ = write!(out, "({head} ({} {} {}) ", c.var, c.from, c.bound.name());
            }
            print_into(&c.body, out);
            out.push(')');
        }
        Formula::Rel(r) => {
            let _ = write!(out, "(rel {}", r.kind.name());
            for e in &r.idx {
                out.push(' ');
                print_index(e, out);
            }
            for t in &r.terms {
                out.push(' ');
                print_term(t, out);
            }
            out.push(')');
        }
    }
}

/// Canonical single-line rendering; `parse_formula` reads it back unchanged.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    print_into(f, &mut out);
    out
}

impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl std::str::FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Formula> {
        parse_formula(s)
    }
}
