//! Formulas over `≡`: syntax, the schema registry, and bounded evaluation.

pub mod ast;
pub mod eval;
pub mod parse;
pub mod schema;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use crate::relation::{RelationId, RelationKind};
pub use ast::{build, Bound, Countable, Formula, IndexExpr, SchemaRef, Term};
pub use eval::{eval, Evaluator, Valuation};
pub use parse::{parse_formula, print_formula};
pub use schema::{expand_schema, schema_params, BMode, Schema};

use crate::error::{Error, Result};

/// Finite cut-offs for the countable connectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncationParams {
    /// Conjunctions indexed by `k` run over `1..=k`.
    pub k: u32,
    /// Disjunctions indexed by `n` run over `1..=n`.
    pub n: u32,
    pub b_depth: u32,
    pub chain_max: u32,
    pub phi_depth: u32,
    /// Raise `n` per GAMMA query to `ceil(2^k·d(b,c)/d(a,b)) + 2`.
    pub adaptive_n: bool,
}

impl Default for TruncationParams {
    fn default() -> Self {
        TruncationParams {
            k: 6,
            n: 16,
            b_depth: 3,
            chain_max: 8,
            phi_depth: 2,
            adaptive_n: true,
        }
    }
}

/// Largest `k` accepted; keeps `n + 2^k` inside the index range.
pub const MAX_K: u32 = 16;

impl TruncationParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Precondition(m));
        if self.k == 0 || self.k > MAX_K {
            return bad(format!("K must lie in 1..={MAX_K}, got {}", self.k));
        }
        if self.n == 0 {
            return bad("N must be at least 1".into());
        }
        if self.b_depth == 0 {
            return bad("Bdepth must be at least 1".into());
        }
        if self.chain_max < 2 {
            return bad(format!(
                "chainMax must be at least 2, got {}",
                self.chain_max
            ));
        }
        Ok(())
    }

    pub fn bound(&self, b: Bound) -> u64 {
        (match b {
            Bound::K => self.k,
            Bound::N => self.n,
            Bound::Depth => self.b_depth,
            Bound::Chain => self.chain_max,
            Bound::Phi => self.phi_depth,
        }) as u64
    }
}

/// How a relation reference is resolved during evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Impl {
    #[serde(rename = "formula")]
    AsFormula,
    #[serde(rename = "oracle")]
    AsOracle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplMap(BTreeMap<RelationKind, Impl>);

impl Default for ImplMap {
    fn default() -> Self {
        ImplMap::formulas()
    }
}

impl ImplMap {
    /// Every defined relation expands; the analytic-only ones call oracles.
    pub fn formulas() -> ImplMap {
        ImplMap(
            RelationKind::ALL
                .into_iter()
                .map(|k| {
                    let i = if k.has_definition() {
                        Impl::AsFormula
                    } else {
                        Impl::AsOracle
                    };
                    (k, i)
                })
                .collect(),
        )
    }

    pub fn oracles() -> ImplMap {
        ImplMap(
            RelationKind::ALL
                .into_iter()
                .map(|k| (k, Impl::AsOracle))
                .collect(),
        )
    }

    /// `kind` as a formula over oracles for everything else. The midpoint
    /// relation also needs its refinement sequence expanded.
    pub fn layer(kind: RelationKind) -> ImplMap {
        let mut m = ImplMap::oracles();
        m.set(kind, Impl::AsFormula);
        if matches!(kind, RelationKind::Midpoint | RelationKind::Phi) {
            m.set(RelationKind::Phi, Impl::AsFormula);
        }
        m
    }

    /// Every relation named in `f` as a formula, oracles below it.
    pub fn for_formula(f: &Formula) -> ImplMap {
        let mut m = ImplMap::oracles();
        for kind in f.relations() {
            for (k, i) in ImplMap::layer(kind).iter() {
                if i == Impl::AsFormula && k.has_definition() {
                    m.set(k, i);
                }
            }
        }
        m
    }

    pub fn set(&mut self, kind: RelationKind, imp: Impl) {
        self.0.insert(kind, imp);
    }

    pub fn remove(&mut self, kind: RelationKind) {
        self.0.remove(&kind);
    }

    pub fn get(&self, kind: RelationKind) -> Option<Impl> {
        self.0.get(&kind).copied()
    }

    /// Applies `NAME=oracle` or `NAME=formula`.
    pub fn apply_override(&mut self, text: &str) -> Result<()> {
        let (name, which) = text
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("expected REL=oracle|formula, got {text:?}")))?;
        let kind = RelationKind::from_name(name.trim())?;
        let imp = match which.trim() {
            "oracle" => Impl::AsOracle,
            "formula" => Impl::AsFormula,
            other => return Err(Error::Format(format!("unknown implementation {other:?}"))),
        };
        self.set(kind, imp);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (RelationKind, Impl)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }
}
