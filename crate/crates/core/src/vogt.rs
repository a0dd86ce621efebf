//! Transformation fuzzing: does a map preserve `≡` in both directions, and
//! does it then preserve betweenness? Violations are claimed only with a
//! re-measured witness; absence of violations is reported as such.

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::affine_combination;
use crate::io::{records, PointRecord, SpaceConfig};
use crate::oracles::oracle_between;
use crate::point::Point;
use crate::sample::{equal_norm_vector, sample_rng, small_rational};
use crate::scalar::{format_rational, int, parse_rational, rat, Rational, Scalar};
use crate::space::{NormSpec, Space};

/// A linear isometry generator of the norm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Isometry {
    /// Bit 0 swaps the coordinates, bit 1 negates x, bit 2 negates y.
    SignedPermutation { code: u8 },
    /// Rotation with cosine `(m²−n²)/(m²+n²)`, optionally followed by a
    /// reflection. Euclidean only.
    Rotation { m: i64, n: i64, reflect: bool },
}

impl Isometry {
    pub fn matrix(&self) -> Result<[[Rational; 2]; 2]> {
        match *self {
            Isometry::SignedPermutation { code } => {
                if code > 7 {
                    return Err(Error::Format(format!(
                        "signed permutation code {code} outside 0..8"
                    )));
                }
                let (o, z) = (Rational::one(), Rational::zero());
                let mut m = if code & 1 == 1 {
                    [[z.clone(), o.clone()], [o, z]]
                } else {
                    [[o.clone(), z.clone()], [z, o]]
                };
                if code & 2 != 0 {
                    m[0] = [-m[0][0].clone(), -m[0][1].clone()];
                }
                if code & 4 != 0 {
                    m[1] = [-m[1][0].clone(), -m[1][1].clone()];
                }
                Ok(m)
            }
            Isometry::Rotation { m, n, reflect } => {
                let h = m * m + n * n;
                if h == 0 {
                    return Err(Error::Format(
                        "rotation parameters must not both be zero".into(),
                    ));
                }
                let c = rat(m * m - n * n, h);
                let s = rat(2 * m * n, h);
                Ok(if reflect {
                    [[c.clone(), s.clone()], [s, -c]]
                } else {
                    [[c.clone(), -s.clone()], [s, c]]
                })
            }
        }
    }

    /// Generators of the norm's linear isometry group used by the suites.
    pub fn generators(norm: &NormSpec) -> Vec<Isometry> {
        let mut out: Vec<Isometry> = (0..8)
            .map(|code| Isometry::SignedPermutation { code })
            .collect();
        if matches!(norm, NormSpec::L2) {
            out.push(Isometry::Rotation {
                m: 2,
                n: 1,
                reflect: false,
            });
            out.push(Isometry::Rotation {
                m: 3,
                n: 1,
                reflect: true,
            });
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapSpec {
    Translation {
        v: [String; 2],
    },
    /// `(x, y) ↦ (m11 x + m12 y, m21 x + m22 y)`.
    Linear {
        m: [[String; 2]; 2],
    },
    Similarity {
        isometry: Isometry,
        scale: String,
        translation: [String; 2],
    },
    /// `cube-x`: `(x, y) ↦ (x³, y)`; `bend`: `(x, y) ↦ (x, y + k x²)`.
    Nonlinear {
        family: String,
        #[serde(default)]
        params: Vec<String>,
    },
    /// Applied left to right.
    Compose {
        maps: Vec<MapSpec>,
    },
}

fn strs(v: [Rational; 2]) -> [String; 2] {
    [format_rational(&v[0]), format_rational(&v[1])]
}

impl MapSpec {
    pub fn translation(x: Rational, y: Rational) -> MapSpec {
        MapSpec::Translation { v: strs([x, y]) }
    }

    pub fn linear(m11: Rational, m12: Rational, m21: Rational, m22: Rational) -> MapSpec {
        MapSpec::Linear {
            m: [strs([m11, m12]), strs([m21, m22])],
        }
    }

    pub fn similarity(isometry: Isometry, scale: Rational, t: [Rational; 2]) -> MapSpec {
        MapSpec::Similarity {
            isometry,
            scale: format_rational(&scale),
            translation: strs(t),
        }
    }

    pub fn shear() -> MapSpec {
        MapSpec::linear(int(1), int(1), int(0), int(1))
    }

    pub fn anisotropic() -> MapSpec {
        MapSpec::linear(int(2), int(0), int(0), int(1))
    }

    pub fn compile(&self) -> Result<Map> {
        let r = |s: &String| parse_rational(s);
        match self {
            MapSpec::Translation { v } => Ok(Map::Affine(Box::new(Affine {
                m: [[int(1), int(0)], [int(0), int(1)]],
                t: [r(&v[0])?, r(&v[1])?],
            }))),
            MapSpec::Linear { m } => {
                let m = [[r(&m[0][0])?, r(&m[0][1])?], [r(&m[1][0])?, r(&m[1][1])?]];
                if det(&m).is_zero() {
                    return Err(Error::Precondition("linear map is singular".into()));
                }
                Ok(Map::Affine(Box::new(Affine {
                    m,
                    t: [Rational::zero(), Rational::zero()],
                })))
            }
            MapSpec::Similarity {
                isometry,
                scale,
                translation,
            } => {
                let l = r(scale)?;
                if l <= Rational::zero() {
                    return Err(Error::Precondition(format!(
                        "scale must be positive, got {scale}"
                    )));
                }
                let q = isometry.matrix()?;
                let m = [
                    [&q[0][0] * &l, &q[0][1] * &l],
                    [&q[1][0] * &l, &q[1][1] * &l],
                ];
                Ok(Map::Affine(Box::new(Affine {
                    m,
                    t: [r(&translation[0])?, r(&translation[1])?],
                })))
            }
            MapSpec::Nonlinear { family, params } => match family.as_str() {
                "cube-x" => Ok(Map::CubeX),
                "bend" => {
                    let k = params.first().map(r).transpose()?.unwrap_or_else(|| int(1));
                    Ok(Map::Bend(k))
                }
                other => Err(Error::Format(format!("unknown nonlinear family {other:?}"))),
            },
            MapSpec::Compose { maps } => Ok(Map::Compose(
                maps.iter().map(MapSpec::compile).collect::<Result<_>>()?,
            )),
        }
    }
}

fn det(m: &[[Rational; 2]; 2]) -> Rational {
    &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub m: [[Rational; 2]; 2],
    pub t: [Rational; 2],
}

/// A map ready to apply.
#[derive(Debug, Clone, PartialEq)]
pub enum Map {
    Affine(Box<Affine>),
    CubeX,
    Bend(Rational),
    Compose(Vec<Map>),
}

impl Map {
    pub fn apply(&self, p: &Point) -> Point {
        let lift = |r: &Rational| Scalar::from_rational(r.clone(), p.backend());
        match self {
            Map::Affine(f) => {
                let (m, t) = (&f.m, &f.t);
                Point {
                    x: &(&(&lift(&m[0][0]) * &p.x) + &(&lift(&m[0][1]) * &p.y)) + &lift(&t[0]),
                    y: &(&(&lift(&m[1][0]) * &p.x) + &(&lift(&m[1][1]) * &p.y)) + &lift(&t[1]),
                }
            }
            Map::CubeX => Point {
                x: &(&p.x * &p.x) * &p.x,
                y: p.y.clone(),
            },
            Map::Bend(k) => Point {
                x: p.x.clone(),
                y: &p.y + &(&lift(k) * &(&p.x * &p.x)),
            },
            Map::Compose(maps) => maps.iter().fold(p.clone(), |q, f| f.apply(&q)),
        }
    }

    /// The linear part and its inverse, for affine maps (composites included).
    fn linear_part(&self) -> Option<[[Rational; 2]; 2]> {
        match self {
            Map::Affine(f) => Some(f.m.clone()),
            Map::Compose(maps) => {
                maps.iter()
                    .try_fold([[int(1), int(0)], [int(0), int(1)]], |acc, f| {
                        let m = f.linear_part()?;
                        Some(mul(&m, &acc))
                    })
            }
            _ => None,
        }
    }
}

fn mul(a: &[[Rational; 2]; 2], b: &[[Rational; 2]; 2]) -> [[Rational; 2]; 2] {
    let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn inverse(m: &[[Rational; 2]; 2]) -> [[Rational; 2]; 2] {
    let d = det(m);
    [
        [&m[1][1] / &d, -(&m[0][1] / &d)],
        [-(&m[1][0] / &d), &m[0][0] / &d],
    ]
}

fn apply_linear(m: &[[Rational; 2]; 2], v: &Point) -> Point {
    let lift = |r: &Rational| Scalar::from_rational(r.clone(), v.backend());
    Point {
        x: &(&lift(&m[0][0]) * &v.x) + &(&lift(&m[0][1]) * &v.y),
        y: &(&lift(&m[1][0]) * &v.x) + &(&lift(&m[1][1]) * &v.y),
    }
}

/// Image of `p` under `spec`.
pub fn apply_map(spec: &MapSpec, p: &Point) -> Result<Point> {
    Ok(spec.compile()?.apply(p))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreservationWitness {
    pub points: Vec<PointRecord>,
    pub images: Vec<PointRecord>,
    /// The two compared lengths before and after the map.
    pub before: [String; 2],
    pub after: [String; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// No violation in either direction among the samples.
    BidirectionalPreserving,
    /// Images of congruent pairs stayed congruent, but not conversely.
    ForwardOnly,
    Violating,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreservationReport {
    pub name: String,
    pub map: MapSpec,
    pub norm: String,
    pub backend: String,
    pub seed: u64,
    pub quadruples: usize,
    /// Quadruples with `ab ≡ cd` before the map.
    pub congruent_before: usize,
    pub triples: usize,
    pub forward_violations: usize,
    pub backward_violations: usize,
    pub b_violations: usize,
    pub first_forward: Option<PreservationWitness>,
    pub first_backward: Option<PreservationWitness>,
    pub first_b: Option<Vec<PointRecord>>,
    pub classification: Classification,
}

impl PreservationReport {
    pub fn b_preserving(&self) -> bool {
        self.b_violations == 0
    }
}

fn witness(space: &Space, pts: &[&Point], imgs: &[Point]) -> PreservationWitness {
    let own = |v: &[&Point]| v.iter().map(|p| (*p).clone()).collect::<Vec<_>>();
    PreservationWitness {
        points: records(&own(pts)),
        images: records(imgs),
        before: [
            space.dist(pts[0], pts[1]).to_string(),
            space.dist(pts[2], pts[3]).to_string(),
        ],
        after: [
            space.dist(&imgs[0], &imgs[1]).to_string(),
            space.dist(&imgs[2], &imgs[3]).to_string(),
        ],
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

/// Checks both implications of `ab ≡ cd ⇔ f(a)f(b) ≡ f(c)f(d)` on
/// constructed quadruples, and betweenness on constructed segment triples.
pub fn check_preservation(
    space: &Space,
    name: &str,
    spec: &MapSpec,
    quadruples: usize,
    triples: usize,
    seed: u64,
) -> Result<PreservationReport> {
    let map = spec.compile()?;
    let lin = map.linear_part();
    let inv = lin.as_ref().map(inverse);
    let mut rep = PreservationReport {
        name: name.to_string(),
        map: spec.clone(),
        norm: space.norm.name(),
        backend: space.backend.name().to_string(),
        seed,
        quadruples,
        congruent_before: 0,
        triples,
        forward_violations: 0,
        backward_violations: 0,
        b_violations: 0,
        first_forward: None,
        first_backward: None,
        first_b: None,
        classification: Classification::BidirectionalPreserving,
    };
    for i in 0..quadruples {
        let rng = &mut sample_rng(seed, i as u64);
        let a = point(space, rng);
        let b = a.add(&vector(space, rng));
        let c = point(space, rng);
        let d = match (rng.random_range(0..10), &lin, &inv) {
            // congruent before the map
            (0..=5, ..) => c.add(&equal_norm_vector(&space.norm, &b.sub(&a), rng)),
            // congruent after the map, for affine maps
            (6..=7, Some(m), Some(mi)) => {
                let w = equal_norm_vector(&space.norm, &apply_linear(m, &b.sub(&a)), rng);
                c.add(&apply_linear(mi, &w))
            }
            _ => point(space, rng),
        };
        let imgs: Vec<Point> = [&a, &b, &c, &d].iter().map(|p| map.apply(p)).collect();
        let before = space.equi(&a, &b, &c, &d);
        let after = space.equi(&imgs[0], &imgs[1], &imgs[2], &imgs[3]);
        rep.congruent_before += before as usize;
        if before && !after {
            rep.forward_violations += 1;
            if rep.first_forward.is_none() {
                rep.first_forward = Some(witness(space, &[&a, &b, &c, &d], &imgs));
            }
        }
        if after && !before {
            rep.backward_violations += 1;
            if rep.first_backward.is_none() {
                rep.first_backward = Some(witness(space, &[&a, &b, &c, &d], &imgs));
            }
        }
    }
    for i in 0..triples {
        let rng = &mut sample_rng(seed ^ 0x5eed_b0b0, i as u64);
        let a = point(space, rng);
        let c = if rng.random_bool(0.03) {
            a.clone()
        } else {
            a.add(&vector(space, rng))
        };
        let den = rng.random_range(1..=8);
        let t = rat(rng.random_range(0..=den), den);
        let b = affine_combination(&a, &c, &t);
        let (fa, fb, fc) = (map.apply(&a), map.apply(&b), map.apply(&c));
        if !oracle_between(space, &fa, &fb, &fc) {
            rep.b_violations += 1;
            if rep.first_b.is_none() {
                rep.first_b = Some(records(&[a, b, c, fa, fb, fc]));
            }
        }
    }
    rep.classification = match (rep.forward_violations, rep.backward_violations) {
        (0, 0) => Classification::BidirectionalPreserving,
        (0, _) => Classification::ForwardOnly,
        _ => Classification::Violating,
    };
    Ok(rep)
}

/// What a configured map is expected to do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Preserving,
    Violating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectation>,
    pub map: MapSpec,
}

fn default_count() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VogtConfig {
    pub seed: u64,
    #[serde(default = "default_count")]
    pub quadruples: usize,
    #[serde(default = "default_count")]
    pub triples: usize,
    pub spaces: Vec<SpaceConfig>,
    /// Named generated families: `similarities`, `non-similarities`.
    #[serde(default)]
    pub suites: Vec<String>,
    #[serde(default)]
    pub maps: Vec<MapEntry>,
}

/// Scales `{1/2, 1, 2, 3}` × isometry generators × three translations.
pub fn similarity_suite(norm: &NormSpec) -> Vec<MapEntry> {
    let scales = [rat(1, 2), int(1), int(2), int(3)];
    let shifts = [[int(0), int(0)], [int(1), int(-2)], [rat(5, 2), rat(7, 3)]];
    let mut out = Vec::new();
    for l in &scales {
        for (g, iso) in Isometry::generators(norm).into_iter().enumerate() {
            for (k, t) in shifts.iter().enumerate() {
                out.push(MapEntry {
                    name: format!("similarity scale={} iso={g} shift={k}", format_rational(l)),
                    expect: Some(Expectation::Preserving),
                    map: MapSpec::similarity(iso.clone(), l.clone(), t.clone()),
                });
            }
        }
    }
    out
}

pub fn non_similarity_suite() -> Vec<MapEntry> {
    vec![
        MapEntry {
            name: "shear".into(),
            expect: Some(Expectation::Violating),
            map: MapSpec::shear(),
        },
        MapEntry {
            name: "anisotropic".into(),
            expect: Some(Expectation::Violating),
            map: MapSpec::anisotropic(),
        },
        MapEntry {
            name: "cube-x".into(),
            expect: Some(Expectation::Violating),
            map: MapSpec::Nonlinear {
                family: "cube-x".into(),
                params: vec![],
            },
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VogtEntry {
    pub expect: Option<Expectation>,
    pub met_expectation: bool,
    pub report: PreservationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VogtSummary {
    pub seed: u64,
    pub entries: Vec<VogtEntry>,
    /// Every map with no `≡` violation in either direction also preserved
    /// betweenness on all sampled triples.
    pub weak_vogt_consistent: bool,
    pub expectations_met: bool,
}

impl VogtSummary {
    pub fn passed(&self) -> bool {
        self.weak_vogt_consistent && self.expectations_met
    }
}

pub fn run_vogt_experiment(cfg: &VogtConfig) -> Result<VogtSummary> {
    let mut entries = Vec::new();
    for sc in &cfg.spaces {
        let space = sc.to_space()?;
        let mut maps = Vec::new();
        for suite in &cfg.suites {
            match suite.as_str() {
                "similarities" => maps.extend(similarity_suite(&space.norm)),
                "non-similarities" => maps.extend(non_similarity_suite()),
                other => return Err(Error::Format(format!("unknown suite {other:?}"))),
            }
        }
        maps.extend(cfg.maps.iter().cloned());
        for (j, entry) in maps.iter().enumerate() {
            let seed = cfg.seed.wrapping_add((j as u64) << 32);
            let report = check_preservation(
                &space,
                &entry.name,
                &entry.map,
                cfg.quadruples,
                cfg.triples,
                seed,
            )?;
            let met = match entry.expect {
                None => true,
                Some(Expectation::Preserving) => {
                    report.classification == Classification::BidirectionalPreserving
                        && report.b_preserving()
                }
                Some(Expectation::Violating) => {
                    report.classification != Classification::BidirectionalPreserving
                }
            };
            entries.push(VogtEntry {
                expect: entry.expect,
                met_expectation: met,
                report,
            });
        }
    }
    let weak_vogt_consistent = entries
        .iter()
        .filter(|e| e.report.classification == Classification::BidirectionalPreserving)
        .all(|e| e.report.b_preserving());
    let expectations_met = entries.iter().all(|e| e.met_expectation);
    Ok(VogtSummary {
        seed: cfg.seed,
        entries,
        weak_vogt_consistent,
        expectations_met,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn applies_examples() {
        let t = MapSpec::translation(int(1), int(2));
        assert_eq!(
            apply_map(&t, &Point::ints(0, 0)).unwrap(),
            Point::ints(1, 2)
        );
        let s = MapSpec::similarity(
            Isometry::SignedPermutation { code: 0 },
            int(2),
            [int(0), int(0)],
        );
        assert_eq!(
            apply_map(&s, &Point::ints(1, 1)).unwrap(),
            Point::ints(2, 2)
        );
        assert_eq!(
            apply_map(&MapSpec::shear(), &Point::ints(1, 1)).unwrap(),
            Point::ints(2, 1)
        );
        let c = MapSpec::Nonlinear {
            family: "cube-x".into(),
            params: vec![],
        };
        assert_eq!(
            apply_map(&c, &Point::ints(-2, 5)).unwrap(),
            Point::ints(-8, 5)
        );
    }

    #[test]
    fn isometry_generators_are_isometries() {
        for norm in [NormSpec::L1, NormSpec::L2, NormSpec::Linf] {
            let s = Space::exact(norm.clone());
            for g in Isometry::generators(&norm) {
                let m = g.matrix().unwrap();
                let v = Point::ratio(3, 2, -5, 3);
                assert!(
                    s.len_eq(&s.norm_of(&v), &s.norm_of(&apply_linear(&m, &v))),
                    "{g:?}"
                );
            }
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(MapSpec::linear(int(1), int(2), int(2), int(4))
            .compile()
            .is_err());
        let neg = MapSpec::similarity(
            Isometry::SignedPermutation { code: 0 },
            int(-1),
            [int(0), int(0)],
        );
        assert!(neg.compile().is_err());
        let fam = MapSpec::Nonlinear {
            family: "warp".into(),
            params: vec![],
        };
        assert!(fam.compile().is_err());
    }

    #[test]
    fn shear_is_caught_and_signed_permutation_is_not() {
        let s = Space::exact(NormSpec::L2);
        let r = check_preservation(&s, "shear", &MapSpec::shear(), 1000, 200, 1).unwrap();
        assert_eq!(r.classification, Classification::Violating);
        assert!(r.first_forward.is_some());
        let linf = Space::exact(NormSpec::Linf);
        let rot = MapSpec::linear(int(0), int(1), int(-1), int(0));
        let r = check_preservation(&linf, "quarter turn", &rot, 1000, 200, 1).unwrap();
        assert_eq!(r.classification, Classification::BidirectionalPreserving);
        assert!(r.b_preserving());
        assert!(r.congruent_before > 400);
    }

    #[test]
    fn empty_config_gives_empty_summary() {
        let cfg = VogtConfig {
            seed: 0,
            quadruples: 10,
            triples: 10,
            spaces: vec![],
            suites: vec![],
            maps: vec![],
        };
        let s = run_vogt_experiment(&cfg).unwrap();
        assert!(s.entries.is_empty() && s.passed());
    }
}
