use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{int, rat, Backend, Rational, Scalar};

/// A point (or displacement vector) of the coordinate plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub x: Scalar,
    pub y: Scalar,
}

/// Hashable identity of a point; float coordinates compare by bit pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PointKey {
    Exact(Rational, Rational),
    Float(u64, u64),
}

impl Point {
    pub fn new(x: Scalar, y: Scalar) -> Result<Point> {
        if x.backend() != y.backend() {
            return Err(Error::BackendMismatch {
                expected: x.backend().name(),
                found: y.backend().name(),
            });
        }
        Ok(Point { x, y })
    }

    pub fn exact(x: Rational, y: Rational) -> Point {
        Point {
            x: Scalar::Exact(x),
            y: Scalar::Exact(y),
        }
    }

    pub fn ints(x: i64, y: i64) -> Point {
        Point::exact(int(x), int(y))
    }

    /// `(xn/xd, yn/yd)` on the exact backend.
    pub fn ratio(xn: i64, xd: i64, yn: i64, yd: i64) -> Point {
        Point::exact(rat(xn, xd), rat(yn, yd))
    }

    pub fn float(x: f64, y: f64) -> Point {
        Point {
            x: Scalar::Float(x),
            y: Scalar::Float(y),
        }
    }

    pub fn origin(backend: Backend) -> Point {
        Point {
            x: Scalar::zero(backend),
            y: Scalar::zero(backend),
        }
    }

    pub fn backend(&self) -> Backend {
        self.x.backend()
    }

    pub fn to_backend(&self, backend: Backend) -> Point {
        Point {
            x: self.x.to_backend(backend),
            y: self.y.to_backend(backend),
        }
    }

    pub fn key(&self) -> PointKey {
        match (&self.x, &self.y) {
            (Scalar::Exact(x), Scalar::Exact(y)) => PointKey::Exact(x.clone(), y.clone()),
            _ => PointKey::Float(self.x.to_f64().to_bits(), self.y.to_f64().to_bits()),
        }
    }

    pub fn add(&self, v: &Point) -> Point {
        Point {
            x: &self.x + &v.x,
            y: &self.y + &v.y,
        }
    }

    pub fn sub(&self, v: &Point) -> Point {
        Point {
            x: &self.x - &v.x,
            y: &self.y - &v.y,
        }
    }

    pub fn scale(&self, q: &Rational) -> Point {
        Point {
            x: self.x.scale(q),
            y: self.y.scale(q),
        }
    }

    pub fn scale_by(&self, s: &Scalar) -> Point {
        Point {
            x: &self.x * s,
            y: &self.y * s,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// `(b - a) x (c - a)`.
    pub fn cross(a: &Point, b: &Point, c: &Point) -> Scalar {
        let u = b.sub(a);
        let v = c.sub(a);
        &(&u.x * &v.y) - &(&u.y * &v.x)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}
