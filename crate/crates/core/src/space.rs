//! Normed coordinate planes and the lengths measured in them.
//!
//! A [`Length`] is kept in whatever form makes comparisons decidable: exact
//! L1/Linf distances are rationals, exact L2 distances are square roots of
//! rationals (stored as the radicand), and the float backend carries plain
//! doubles compared with a mixed absolute/relative tolerance.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, rational_to_f64, Backend, Rational};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NormSpec {
    L1,
    L2,
    Linf,
    /// `p > 1`, float backend only.
    Lp(Rational),
}

impl NormSpec {
    pub fn name(&self) -> String {
        match self {
            NormSpec::L1 => "l1".into(),
            NormSpec::L2 => "l2".into(),
            NormSpec::Linf => "linf".into(),
            NormSpec::Lp(p) => format!("lp:{}", format_rational(p)),
        }
    }

    pub fn parse(text: &str) -> Result<NormSpec> {
        let t = text.trim().to_ascii_lowercase();
        match t.as_str() {
            "l1" => Ok(NormSpec::L1),
            "l2" => Ok(NormSpec::L2),
            "linf" => Ok(NormSpec::Linf),
            _ => {
                let p = t
                    .strip_prefix("lp:")
                    .or_else(|| t.strip_prefix("lp="))
                    .ok_or_else(|| Error::InvalidSpace(format!("unknown norm {text:?}")))?;
                Ok(NormSpec::Lp(crate::scalar::parse_rational(p)?))
            }
        }
    }

    /// Strictly convex norms make metric and affine betweenness coincide.
    pub fn strictly_convex(&self) -> bool {
        matches!(self, NormSpec::L2 | NormSpec::Lp(_))
    }

    /// L1 and Linf spheres are polygons.
    pub fn polygonal(&self) -> bool {
        matches!(self, NormSpec::L1 | NormSpec::Linf)
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    pub norm: NormSpec,
    pub backend: Backend,
    pub tolerance: f64,
}

impl Space {
    pub fn new(norm: NormSpec, backend: Backend, tolerance: f64) -> Result<Space> {
        if let NormSpec::Lp(p) = &norm {
            if *p <= Rational::one() {
                return Err(Error::InvalidSpace(format!(
                    "lp exponent must exceed 1, got {}",
                    format_rational(p)
                )));
            }
            if backend == Backend::Exact {
                return Err(Error::InvalidSpace(
                    "lp norms with p outside {1, 2, inf} are float-only".into(),
                ));
            }
        }
        if !(tolerance >= 0.0 && tolerance.is_finite()) {
            return Err(Error::InvalidSpace(format!("bad tolerance {tolerance}")));
        }
        let tolerance = if backend == Backend::Exact {
            0.0
        } else {
            tolerance
        };
        Ok(Space {
            norm,
            backend,
            tolerance,
        })
    }

    pub fn exact(norm: NormSpec) -> Space {
        Space::new(norm, Backend::Exact, 0.0).expect("exact space")
    }

    pub fn float(norm: NormSpec) -> Space {
        Space::new(norm, Backend::Float, DEFAULT_TOLERANCE).expect("float space")
    }

    pub fn is_exact(&self) -> bool {
        self.backend == Backend::Exact
    }

    /// The same norm over doubles, used where exact constructions are refused.
    pub fn float_companion(&self) -> Space {
        let tol = if self.is_exact() {
            DEFAULT_TOLERANCE
        } else {
            self.tolerance
        };
        Space::new(self.norm.clone(), Backend::Float, tol).expect("float companion")
    }

    pub fn label(&self) -> String {
        format!("{}/{}", self.norm, self.backend)
    }

    /// Mixed tolerance: `|u - v| <= tau * max(1, |u|, |v|)`.
    pub fn float_eq(&self, u: f64, v: f64) -> bool {
        let scale = 1f64.max(u.abs()).max(v.abs());
        (u - v).abs() <= self.tolerance * scale
    }

    pub fn float_cmp(&self, u: f64, v: f64) -> Ordering {
        if self.float_eq(u, v) {
            Ordering::Equal
        } else {
            u.total_cmp(&v)
        }
    }

    pub fn cmp_len(&self, a: &Length, b: &Length) -> Ordering {
        match (a, b) {
            (Length::Rational(x), Length::Rational(y)) => x.cmp(y),
            (Length::SqrtOf(x), Length::SqrtOf(y)) => x.cmp(y),
            (Length::Rational(x), Length::SqrtOf(y)) => (x * x).cmp(y),
            (Length::SqrtOf(x), Length::Rational(y)) => x.cmp(&(y * y)),
            _ => self.float_cmp(a.to_f64(), b.to_f64()),
        }
    }

    pub fn len_eq(&self, a: &Length, b: &Length) -> bool {
        self.cmp_len(a, b) == Ordering::Equal
    }

    pub fn len_le(&self, a: &Length, b: &Length) -> bool {
        self.cmp_len(a, b) != Ordering::Greater
    }

    pub fn len_is_zero(&self, a: &Length) -> bool {
        match a {
            Length::Rational(x) | Length::SqrtOf(x) => x.is_zero(),
            Length::Float(v) => self.float_eq(*v, 0.0),
        }
    }

    /// Compares `x + y` against `z`.
    pub fn sum_cmp(&self, x: &Length, y: &Length, z: &Length) -> Ordering {
        match (x, y, z) {
            (Length::Rational(a), Length::Rational(b), Length::Rational(c)) => (a + b).cmp(c),
            (Length::Float(_), _, _) | (_, Length::Float(_), _) | (_, _, Length::Float(_)) => {
                self.float_cmp(x.to_f64() + y.to_f64(), z.to_f64())
            }
            _ => sqrt_sum_cmp(&x.radicand(), &y.radicand(), &z.radicand()),
        }
    }

    /// Smallest integer `m >= 0` with `m * den >= scale * num`; `den` must be positive.
    pub fn ratio_ceil(&self, num: &Length, den: &Length, scale: &Rational) -> u64 {
        let est = (scale.to_f64().unwrap_or(f64::MAX) * num.to_f64() / den.to_f64()).ceil();
        let mut m = if est.is_finite() && est > 0.0 {
            est.min(u64::MAX as f64 / 2.0) as u64
        } else {
            0
        };
        let target = num.scale(scale);
        let ge = |m: u64| self.len_le(&target, &den.scale(&Rational::from_integer(m.into())));
        while !ge(m) {
            m += 1;
        }
        while m > 0 && ge(m - 1) {
            m -= 1;
        }
        m
    }
}

/// A distance value in the representation its space compares exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum Length {
    Rational(Rational),
    /// `sqrt(r)` for a nonnegative rational `r`.
    SqrtOf(Rational),
    Float(f64),
}

impl Length {
    pub fn zero_like(&self) -> Length {
        match self {
            Length::Rational(_) => Length::Rational(Rational::zero()),
            Length::SqrtOf(_) => Length::SqrtOf(Rational::zero()),
            Length::Float(_) => Length::Float(0.0),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Length::Rational(r) => rational_to_f64(r),
            Length::SqrtOf(r) => rational_to_f64(r).sqrt(),
            Length::Float(v) => *v,
        }
    }

    /// The square of the length, exact for the rational forms.
    pub fn radicand(&self) -> Rational {
        match self {
            Length::Rational(r) => r * r,
            Length::SqrtOf(r) => r.clone(),
            Length::Float(v) => Rational::from_float(v * v).unwrap_or_default(),
        }
    }

    /// Multiplies by a nonnegative rational.
    pub fn scale(&self, q: &Rational) -> Length {
        debug_assert!(!q.is_negative(), "lengths scale by nonnegative factors");
        match self {
            Length::Rational(r) => Length::Rational(r * q),
            Length::SqrtOf(r) => Length::SqrtOf(r * q * q),
            Length::Float(v) => Length::Float(v * rational_to_f64(q)),
        }
    }

    /// Exact `self / other` when it is rational; `None` for irrational L2 ratios.
    pub fn ratio(&self, other: &Length) -> Option<RatioValue> {
        match (self, other) {
            (Length::Float(a), Length::Float(b)) => Some(RatioValue::Float(a / b)),
            (Length::Rational(a), Length::Rational(b)) if !b.is_zero() => {
                Some(RatioValue::Exact(a / b))
            }
            (Length::Float(_), _) | (_, Length::Float(_)) => {
                Some(RatioValue::Float(self.to_f64() / other.to_f64()))
            }
            _ => {
                let den = other.radicand();
                if den.is_zero() {
                    return None;
                }
                crate::scalar::rational_sqrt(&(self.radicand() / den)).map(RatioValue::Exact)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RatioValue {
    Exact(Rational),
    Float(f64),
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Length::Rational(r) => f.write_str(&format_rational(r)),
            Length::SqrtOf(r) => match crate::scalar::rational_sqrt(r) {
                Some(s) => f.write_str(&format_rational(&s)),
                None => write!(f, "sqrt({})", format_rational(r)),
            },
            Length::Float(v) => write!(f, "{v}"),
        }
    }
}

/// Sign of `sqrt(a) + sqrt(b) - sqrt(c)` for nonnegative rationals.
pub fn sqrt_sum_cmp(a: &Rational, b: &Rational, c: &Rational) -> Ordering {
    // sqrt(a) + sqrt(b) vs sqrt(c)  <=>  a + b + 2 sqrt(ab) vs c
    let rest = c - a - b;
    if rest.is_negative() {
        return Ordering::Greater;
    }
    // 2 sqrt(ab) vs rest, both sides nonnegative
    let lhs = a * b * Rational::from_integer(BigInt::from(4));
    lhs.cmp(&(&rest * &rest))
}
