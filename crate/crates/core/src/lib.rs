//! Betweenness, midpoints and inequality defined from equidistance alone,
//! evaluated over finite universes in normed coordinate planes and checked
//! against analytic oracles.

pub mod axioms;
pub mod closure;
pub mod error;
pub mod formula;
pub mod geometry;
pub mod io;
pub mod oracles;
pub mod point;
pub mod relation;
pub mod sample;
pub mod scalar;
pub mod space;
pub mod verify;
pub mod vogt;

pub use closure::{close_for_formula, close_layer, Provenance, Universe};
pub use error::{Error, Result};
pub use formula::{
    eval, expand_schema, parse_formula, print_formula, BMode, Formula, Impl, ImplMap,
    TruncationParams, Valuation,
};
pub use geometry::{
    affine_combination, distance, equidistant, midpoint, scaled_equidistant,
    sphere_intersection_point,
};
pub use point::Point;
pub use relation::{RelationId, RelationKind};
pub use scalar::{Backend, Rational, Scalar};
pub use space::{Length, NormSpec, Space};
