//! Names of the defined relations, with their index and point arities.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A relation family, without index arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationKind {
    Equiv2,
    Phi,
    Midpoint,
    Alpha,
    Beta,
    Psi,
    Gamma,
    Between,
    Delta,
    Neq,
    Le,
    Collinear,
    Parallelogram,
}

impl RelationKind {
    pub const ALL: [RelationKind; 13] = [
        RelationKind::Equiv2,
        RelationKind::Phi,
        RelationKind::Midpoint,
        RelationKind::Alpha,
        RelationKind::Beta,
        RelationKind::Psi,
        RelationKind::Gamma,
        RelationKind::Between,
        RelationKind::Delta,
        RelationKind::Neq,
        RelationKind::Le,
        RelationKind::Collinear,
        RelationKind::Parallelogram,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Equiv2 => "EQUIV2",
            RelationKind::Phi => "PHI",
            RelationKind::Midpoint => "M",
            RelationKind::Alpha => "ALPHA",
            RelationKind::Beta => "BETA",
            RelationKind::Psi => "PSI",
            RelationKind::Gamma => "GAMMA",
            RelationKind::Between => "B",
            RelationKind::Delta => "DELTA",
            RelationKind::Neq => "NEQ",
            RelationKind::Le => "LE",
            RelationKind::Collinear => "COLLINEAR",
            RelationKind::Parallelogram => "PARALLELOGRAM",
        }
    }

    pub fn from_name(name: &str) -> Result<RelationKind> {
        RelationKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::UnknownRelation(name.to_string()))
    }

    pub fn index_arity(self) -> usize {
        match self {
            RelationKind::Phi | RelationKind::Alpha | RelationKind::Beta | RelationKind::Delta => 1,
            RelationKind::Psi => 2,
            _ => 0,
        }
    }

    pub fn term_arity(self) -> usize {
        match self {
            RelationKind::Neq => 2,
            RelationKind::Equiv2
            | RelationKind::Psi
            | RelationKind::Le
            | RelationKind::Parallelogram => 4,
            _ => 3,
        }
    }

    /// Collinearity and the parallelogram predicate are analytic only.
    pub fn has_definition(self) -> bool {
        !matches!(self, RelationKind::Collinear | RelationKind::Parallelogram)
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A relation with its index arguments resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationId {
    Equiv2,
    Phi(u32),
    Midpoint,
    Alpha(u32),
    Beta(u32),
    Psi(u32, u32),
    Gamma,
    Between,
    Delta(u32),
    Neq,
    Le,
    Collinear,
    Parallelogram,
}

/// Indices stay small enough that `2^k` and chain lengths fit comfortably.
pub const MAX_INDEX: u64 = 1 << 20;
pub const MAX_DYADIC: u64 = 40;

impl RelationId {
    pub fn kind(self) -> RelationKind {
        match self {
            RelationId::Equiv2 => RelationKind::Equiv2,
            RelationId::Phi(_) => RelationKind::Phi,
            RelationId::Midpoint => RelationKind::Midpoint,
            RelationId::Alpha(_) => RelationKind::Alpha,
            RelationId::Beta(_) => RelationKind::Beta,
            RelationId::Psi(..) => RelationKind::Psi,
            RelationId::Gamma => RelationKind::Gamma,
            RelationId::Between => RelationKind::Between,
            RelationId::Delta(_) => RelationKind::Delta,
            RelationId::Neq => RelationKind::Neq,
            RelationId::Le => RelationKind::Le,
            RelationId::Collinear => RelationKind::Collinear,
            RelationId::Parallelogram => RelationKind::Parallelogram,
        }
    }

    pub fn indices(self) -> Vec<u64> {
        match self {
            RelationId::Phi(n)
            | RelationId::Alpha(n)
            | RelationId::Beta(n)
            | RelationId::Delta(n) => {
                vec![n as u64]
            }
            RelationId::Psi(n, k) => vec![n as u64, k as u64],
            _ => vec![],
        }
    }

    pub fn new(kind: RelationKind, idx: &[u64]) -> Result<RelationId> {
        if idx.len() != kind.index_arity() {
            return Err(Error::Arity {
                relation: kind.name().to_string(),
                what: "index arguments",
                expected: kind.index_arity(),
                found: idx.len(),
            });
        }
        let invalid = |message: String| Error::InvalidIndex {
            relation: kind.name().to_string(),
            message,
        };
        let check = |v: u64, min: u64, max: u64, what: &str| -> Result<u32> {
            if v < min || v > max {
                Err(invalid(format!("{what}={v} outside {min}..={max}")))
            } else {
                Ok(v as u32)
            }
        };
        Ok(match kind {
            RelationKind::Equiv2 => RelationId::Equiv2,
            RelationKind::Phi => RelationId::Phi(check(idx[0], 0, 64, "n")?),
            RelationKind::Midpoint => RelationId::Midpoint,
            RelationKind::Alpha => RelationId::Alpha(check(idx[0], 1, MAX_INDEX, "n")?),
            RelationKind::Beta => RelationId::Beta(check(idx[0], 1, MAX_DYADIC, "k")?),
            RelationKind::Psi => RelationId::Psi(
                check(idx[0], 1, MAX_INDEX, "n")?,
                check(idx[1], 1, MAX_DYADIC, "k")?,
            ),
            RelationKind::Gamma => RelationId::Gamma,
            RelationKind::Between => RelationId::Between,
            RelationKind::Delta => RelationId::Delta(check(idx[0], 1, MAX_INDEX, "n")?),
            RelationKind::Neq => RelationId::Neq,
            RelationKind::Le => RelationId::Le,
            RelationKind::Collinear => RelationId::Collinear,
            RelationKind::Parallelogram => RelationId::Parallelogram,
        })
    }

    pub fn term_arity(self) -> usize {
        self.kind().term_arity()
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind().name())?;
        for i in self.indices() {
            write!(f, ":{i}")?;
        }
        Ok(())
    }
}

impl FromStr for RelationId {
    type Err = Error;

    /// `NAME` or `NAME:i` or `NAME:i:j`.
    fn from_str(s: &str) -> Result<RelationId> {
        let mut parts = s.trim().split(':');
        let kind = RelationKind::from_name(parts.next().unwrap_or_default())?;
        let idx = parts
            .map(|p| {
                p.parse::<u64>().map_err(|_| Error::InvalidIndex {
                    relation: kind.name().to_string(),
                    message: format!("{p:?} is not a nonnegative integer"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        RelationId::new(kind, &idx)
    }
}

impl Serialize for RelationId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints_indexed_ids() {
        let id: RelationId = "PSI:2:1".parse().unwrap();
        assert_eq!(id, RelationId::Psi(2, 1));
        assert_eq!(id.to_string(), "PSI:2:1");
        assert_eq!("m".parse::<RelationId>().unwrap(), RelationId::Midpoint);
        assert!("BETA:0".parse::<RelationId>().is_err());
        assert!("PSI:1".parse::<RelationId>().is_err());
        assert!(matches!(
            "FOO".parse::<RelationId>(),
            Err(Error::UnknownRelation(_))
        ));
    }
}
