//! Documents read and written by the command line: point lists, universes
//! and space configurations. Exact coordinates travel as `"p/q"` strings,
//! float coordinates as JSON numbers.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::closure::{Provenance, Universe};
use crate::error::{Error, Result};
use crate::point::Point;
use crate::scalar::{format_rational, parse_rational, Backend, Scalar};
use crate::space::{NormSpec, Space, DEFAULT_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Number(f64),
    Text(String),
}

impl Coord {
    fn from_scalar(s: &Scalar) -> Coord {
        match s {
            Scalar::Exact(r) => Coord::Text(format_rational(r)),
            Scalar::Float(v) => Coord::Number(*v),
        }
    }

    fn to_scalar(&self, backend: Backend) -> Result<Scalar> {
        match (self, backend) {
            (Coord::Text(t), b) => Scalar::parse(t, b),
            (Coord::Number(v), Backend::Float) => Ok(Scalar::Float(*v)),
            (Coord::Number(v), Backend::Exact) => {
                if v.fract() == 0.0 && v.abs() < 1e15 {
                    Ok(Scalar::Exact(parse_rational(&format!("{v:.0}"))?))
                } else {
                    Err(Error::InvalidScalar(format!(
                        "{v} (exact coordinates must be integers or \"p/q\" strings)"
                    )))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub x: Coord,
    pub y: Coord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

impl PointRecord {
    pub fn from_point(p: &Point) -> PointRecord {
        PointRecord {
            name: None,
            x: Coord::from_scalar(&p.x),
            y: Coord::from_scalar(&p.y),
            tag: None,
        }
    }

    pub fn to_point(&self, backend: Backend) -> Result<Point> {
        Point::new(self.x.to_scalar(backend)?, self.y.to_scalar(backend)?)
    }
}

pub fn records(points: &[Point]) -> Vec<PointRecord> {
    points.iter().map(PointRecord::from_point).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NormRepr {
    Name(String),
    Lp { lp: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceConfig {
    pub norm: NormRepr,
    #[serde(default = "default_backend")]
    pub backend: String,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_backend() -> String {
    "exact".into()
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

impl SpaceConfig {
    pub fn from_space(space: &Space) -> SpaceConfig {
        let norm = match &space.norm {
            NormSpec::Lp(p) => NormRepr::Lp {
                lp: format_rational(p),
            },
            n => NormRepr::Name(n.name()),
        };
        SpaceConfig {
            norm,
            backend: space.backend.name().into(),
            tolerance: if space.is_exact() {
                0.0
            } else {
                space.tolerance
            },
        }
    }

    pub fn to_space(&self) -> Result<Space> {
        let norm = match &self.norm {
            NormRepr::Name(n) => NormSpec::parse(n)?,
            NormRepr::Lp { lp } => NormSpec::Lp(parse_rational(lp)?),
        };
        Space::new(norm, parse_backend(&self.backend)?, self.tolerance)
    }
}

pub fn parse_backend(text: &str) -> Result<Backend> {
    match text.trim().to_ascii_lowercase().as_str() {
        "exact" => Ok(Backend::Exact),
        "float" => Ok(Backend::Float),
        other => Err(Error::InvalidSpace(format!("unknown backend {other:?}"))),
    }
}

/// A points document: either a bare list of records or `{"points": [...]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum PointsDoc {
    List(Vec<PointRecord>),
    Wrapped { points: Vec<PointRecord> },
}

/// Reads point records from JSON text.
pub fn parse_point_records(text: &str) -> Result<Vec<PointRecord>> {
    let doc: PointsDoc = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    Ok(match doc {
        PointsDoc::List(v) | PointsDoc::Wrapped { points: v } => v,
    })
}

/// Parses the inline form `x,y; x,y; ...` (whitespace also separates points).
pub fn parse_inline_points(text: &str, backend: Backend) -> Result<Vec<Point>> {
    text.split(|c: char| c == ';' || c.is_whitespace())
        .map(|s| s.trim().trim_start_matches('(').trim_end_matches(')'))
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (x, y) = s
                .split_once(',')
                .ok_or_else(|| Error::Format(format!("expected x,y, got {s:?}")))?;
            Point::new(
                Scalar::parse(x.trim(), backend)?,
                Scalar::parse(y.trim(), backend)?,
            )
        })
        .collect()
}

/// Reads points from a file path, or parses `arg` inline when no such file
/// exists. Names in the records are returned alongside the points.
pub fn load_points(arg: &str, backend: Backend) -> Result<Vec<(Option<String>, Point)>> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        if text.trim_start().starts_with(['[', '{']) {
            return parse_point_records(&text)?
                .iter()
                .map(|r| Ok((r.name.clone(), r.to_point(backend)?)))
                .collect();
        }
        return Ok(parse_inline_points(&text, backend)?
            .into_iter()
            .map(|p| (None, p))
            .collect());
    }
    Ok(parse_inline_points(arg, backend)?
        .into_iter()
        .map(|p| (None, p))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniverseDoc {
    pub space: SpaceConfig,
    pub points: Vec<PointRecord>,
}

impl UniverseDoc {
    pub fn from_universe(u: &Universe) -> UniverseDoc {
        let points = u
            .points()
            .iter()
            .zip(u.tags())
            .map(|(p, t)| PointRecord {
                tag: Some(t.name().to_string()),
                ..PointRecord::from_point(p)
            })
            .collect();
        UniverseDoc {
            space: SpaceConfig::from_space(u.space()),
            points,
        }
    }

    /// Rebuilds the universe; untagged records count as inputs.
    pub fn to_universe(&self, space: &Space) -> Result<Universe> {
        let mut u = Universe::new(space);
        for r in &self.points {
            let tag = match &r.tag {
                Some(t) => Provenance::parse(t)?,
                None => Provenance::Input,
            };
            u.insert(r.to_point(space.backend)?, tag)?;
        }
        Ok(u)
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn records_round_trip_both_backends() {
        let p = Point::exact(rat(-3, 4), rat(5, 1));
        let text = serde_json::to_string(&PointRecord::from_point(&p)).unwrap();
        assert_eq!(text, r#"{"x":"-3/4","y":"5"}"#);
        let back: PointRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_point(Backend::Exact).unwrap(), p);

        let q = Point::float(0.25, -1.5);
        let text = serde_json::to_string(&PointRecord::from_point(&q)).unwrap();
        assert_eq!(text, r#"{"x":0.25,"y":-1.5}"#);
    }

    #[test]
    fn exact_rejects_fractional_numbers() {
        let r: PointRecord = serde_json::from_str(r#"{"x":0.5,"y":1}"#).unwrap();
        assert!(r.to_point(Backend::Exact).is_err());
        assert_eq!(r.to_point(Backend::Float).unwrap(), Point::float(0.5, 1.0));
        let r: PointRecord = serde_json::from_str(r#"{"x":2,"y":"1/3"}"#).unwrap();
        assert_eq!(
            r.to_point(Backend::Exact).unwrap(),
            Point::ratio(2, 1, 1, 3)
        );
    }

    #[test]
    fn space_config_forms() {
        let c: SpaceConfig =
            serde_json::from_str(r#"{"norm":{"lp":"3/2"},"backend":"float","tolerance":1e-9}"#)
                .unwrap();
        let s = c.to_space().unwrap();
        assert_eq!(s.norm, NormSpec::Lp(rat(3, 2)));
        let c: SpaceConfig = serde_json::from_str(r#"{"norm":"linf"}"#).unwrap();
        assert!(c.to_space().unwrap().is_exact());
        let bad: SpaceConfig =
            serde_json::from_str(r#"{"norm":{"lp":"3"},"backend":"exact"}"#).unwrap();
        assert!(bad.to_space().is_err());
    }

    #[test]
    fn inline_points() {
        let pts = parse_inline_points("0,0; 2,1 (4,0)", Backend::Exact).unwrap();
        assert_eq!(
            pts,
            vec![Point::ints(0, 0), Point::ints(2, 1), Point::ints(4, 0)]
        );
        assert!(parse_inline_points("1;2", Backend::Exact).is_err());
    }

    #[test]
    fn universe_documents_keep_tags() {
        let s = Space::exact(NormSpec::L1);
        let mut u = Universe::new(&s);
        u.insert(Point::ints(0, 0), Provenance::Input).unwrap();
        u.insert(Point::ints(1, 0), Provenance::MidpointClosure)
            .unwrap();
        let doc = UniverseDoc::from_universe(&u);
        let text = to_json(&doc).unwrap();
        let back: UniverseDoc = serde_json::from_str(&text).unwrap();
        let v = back.to_universe(&s).unwrap();
        assert_eq!(v.points(), u.points());
        assert_eq!(v.tags(), u.tags());
    }
}
