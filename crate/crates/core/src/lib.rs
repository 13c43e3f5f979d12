//! Exact arithmetic for quotients of affine torus maps by plane
//! crystallographic groups: lattice algebra, the groups p1 through p6,
//! affine lifts, orbifold ramification portraits, and the induced map on
//! the quotient sphere.

pub mod affine;
pub mod corpus;
pub mod crystal;
pub mod error;
pub mod exec;
pub mod lattice;
pub mod mesh;
pub mod orbifold;
pub mod quotient;
mod serde_util;
pub mod suite;

pub use affine::{AffineMap, AffineTransform};
pub use crystal::{CrystGroup, GroupElement, GroupKind};
pub use exec::Strategy;
pub use lattice::{IntegerMatrix2, IntegerVector2, RationalMatrix2, RationalVector2};
pub use orbifold::{OrbifoldSignature, RamificationPortrait, RamificationValue};
pub use quotient::QuotientMapDatum;
