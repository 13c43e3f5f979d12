//! Exact 2×2 linear algebra over the integers and the rationals.
//!
//! Everything here works in lattice coordinates: the translation lattice is
//! always `ℤ²`, and the geometric shape of the lattice only enters through
//! [`Geometry`] when a metric is needed.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::LatticeError;

pub type Integer = BigInt;
pub type Rational = BigRational;

/// Largest exponent tried by [`IntegerMatrix2::order`].
pub const MAX_MATRIX_ORDER: u32 = 12;

pub fn int(v: i64) -> Integer {
    BigInt::from(v)
}

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_from_int(v: Integer) -> Rational {
    BigRational::from_integer(v)
}

/// Parses `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, LatticeError> {
    let t = s.trim();
    let parsed = BigRational::from_str(t).map_err(|_| LatticeError::Parse(s.to_string()))?;
    Ok(parsed)
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // numerator or denominator too large for a direct conversion
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

fn floor_rational(q: &Rational) -> Integer {
    q.numer().div_floor(q.denom())
}

/// A point or translation of the plane in lattice coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector2(pub [Rational; 2]);

impl RationalVector2 {
    pub fn new(x: Rational, y: Rational) -> Self {
        RationalVector2([x, y])
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        RationalVector2([rat(x, 1), rat(y, 1)])
    }

    /// Shorthand for `(xn/xd, yn/yd)`.
    pub fn from_fracs(xn: i64, xd: i64, yn: i64, yd: i64) -> Self {
        RationalVector2([rat(xn, xd), rat(yn, yd)])
    }

    pub fn zero() -> Self {
        RationalVector2([Rational::zero(), Rational::zero()])
    }

    pub fn x(&self) -> &Rational {
        &self.0[0]
    }

    pub fn y(&self) -> &Rational {
        &self.0[1]
    }

    pub fn is_zero(&self) -> bool {
        self.0[0].is_zero() && self.0[1].is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.is_integer())
    }

    pub fn to_integer(&self) -> Option<IntegerVector2> {
        if self.is_integral() {
            Some(IntegerVector2([self.0[0].to_integer(), self.0[1].to_integer()]))
        } else {
            None
        }
    }

    /// Integer part, coordinate-wise floor.
    pub fn floor(&self) -> IntegerVector2 {
        IntegerVector2([floor_rational(&self.0[0]), floor_rational(&self.0[1])])
    }

    /// Reduction into the half-open unit square `[0,1)²`.
    pub fn reduce_mod_lattice(&self) -> RationalVector2 {
        self - &self.floor().to_rational()
    }

    pub fn scale(&self, s: &Rational) -> RationalVector2 {
        RationalVector2([&self.0[0] * s, &self.0[1] * s])
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [rational_to_f64(&self.0[0]), rational_to_f64(&self.0[1])]
    }

    /// Least common denominator of both coordinates.
    pub fn denominator_lcm(&self) -> Integer {
        self.0[0].denom().lcm(self.0[1].denom())
    }
}

impl fmt::Display for RationalVector2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0[0], self.0[1])
    }
}

impl<'a> Add<&'a RationalVector2> for &'a RationalVector2 {
    type Output = RationalVector2;
    fn add(self, rhs: &RationalVector2) -> RationalVector2 {
        RationalVector2([&self.0[0] + &rhs.0[0], &self.0[1] + &rhs.0[1]])
    }
}

impl<'a> Sub<&'a RationalVector2> for &'a RationalVector2 {
    type Output = RationalVector2;
    fn sub(self, rhs: &RationalVector2) -> RationalVector2 {
        RationalVector2([&self.0[0] - &rhs.0[0], &self.0[1] - &rhs.0[1]])
    }
}

impl Add for RationalVector2 {
    type Output = RationalVector2;
    fn add(self, rhs: RationalVector2) -> RationalVector2 {
        &self + &rhs
    }
}

impl Sub for RationalVector2 {
    type Output = RationalVector2;
    fn sub(self, rhs: RationalVector2) -> RationalVector2 {
        &self - &rhs
    }
}

impl Neg for &RationalVector2 {
    type Output = RationalVector2;
    fn neg(self) -> RationalVector2 {
        RationalVector2([-&self.0[0], -&self.0[1]])
    }
}

impl Serialize for RationalVector2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.0[0].to_string(), self.0[1].to_string()].serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalVector2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: [RationalRepr; 2] = Deserialize::deserialize(d)?;
        let [x, y] = raw;
        Ok(RationalVector2([x.0, y.0]))
    }
}

/// A lattice vector with arbitrary-precision integer coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntegerVector2(pub [Integer; 2]);

impl IntegerVector2 {
    pub fn new(x: i64, y: i64) -> Self {
        IntegerVector2([int(x), int(y)])
    }

    pub fn zero() -> Self {
        IntegerVector2([Integer::zero(), Integer::zero()])
    }

    pub fn is_zero(&self) -> bool {
        self.0[0].is_zero() && self.0[1].is_zero()
    }

    pub fn squared_len(&self) -> Integer {
        &self.0[0] * &self.0[0] + &self.0[1] * &self.0[1]
    }

    pub fn to_rational(&self) -> RationalVector2 {
        RationalVector2([rat_from_int(self.0[0].clone()), rat_from_int(self.0[1].clone())])
    }
}

impl fmt::Display for IntegerVector2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0[0], self.0[1])
    }
}

impl Serialize for IntegerVector2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [IntegerRepr(self.0[0].clone()), IntegerRepr(self.0[1].clone())].serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntegerVector2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y]: [IntegerRepr; 2] = Deserialize::deserialize(d)?;
        Ok(IntegerVector2([x.0, y.0]))
    }
}

/// Exact 2×2 rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix2(pub [[Rational; 2]; 2]);

impl RationalMatrix2 {
    pub fn identity() -> Self {
        RationalMatrix2([
            [Rational::one(), Rational::zero()],
            [Rational::zero(), Rational::one()],
        ])
    }

    pub fn zero() -> Self {
        RationalMatrix2([
            [Rational::zero(), Rational::zero()],
            [Rational::zero(), Rational::zero()],
        ])
    }

    pub fn determinant(&self) -> Rational {
        let m = &self.0;
        &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
    }

    pub fn trace(&self) -> Rational {
        &self.0[0][0] + &self.0[1][1]
    }

    pub fn inverse(&self) -> Option<RationalMatrix2> {
        let det = self.determinant();
        if det.is_zero() {
            return None;
        }
        let m = &self.0;
        Some(RationalMatrix2([
            [&m[1][1] / &det, -&m[0][1] / &det],
            [-&m[1][0] / &det, &m[0][0] / &det],
        ]))
    }

    pub fn apply(&self, v: &RationalVector2) -> RationalVector2 {
        let m = &self.0;
        RationalVector2([
            &m[0][0] * &v.0[0] + &m[0][1] * &v.0[1],
            &m[1][0] * &v.0[0] + &m[1][1] * &v.0[1],
        ])
    }

    pub fn pow(&self, exp: u32) -> RationalMatrix2 {
        let mut acc = RationalMatrix2::identity();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_integer(&self) -> Option<IntegerMatrix2> {
        let m = &self.0;
        if m.iter().flatten().all(|c| c.is_integer()) {
            Some(IntegerMatrix2([
                [m[0][0].to_integer(), m[0][1].to_integer()],
                [m[1][0].to_integer(), m[1][1].to_integer()],
            ]))
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        let m = &self.0;
        [
            [rational_to_f64(&m[0][0]), rational_to_f64(&m[0][1])],
            [rational_to_f64(&m[1][0]), rational_to_f64(&m[1][1])],
        ]
    }
}

impl<'a> Mul<&'a RationalMatrix2> for &'a RationalMatrix2 {
    type Output = RationalMatrix2;
    fn mul(self, rhs: &RationalMatrix2) -> RationalMatrix2 {
        let (a, b) = (&self.0, &rhs.0);
        RationalMatrix2([
            [
                &a[0][0] * &b[0][0] + &a[0][1] * &b[1][0],
                &a[0][0] * &b[0][1] + &a[0][1] * &b[1][1],
            ],
            [
                &a[1][0] * &b[0][0] + &a[1][1] * &b[1][0],
                &a[1][0] * &b[0][1] + &a[1][1] * &b[1][1],
            ],
        ])
    }
}

impl<'a> Add<&'a RationalMatrix2> for &'a RationalMatrix2 {
    type Output = RationalMatrix2;
    fn add(self, rhs: &RationalMatrix2) -> RationalMatrix2 {
        let (a, b) = (&self.0, &rhs.0);
        RationalMatrix2([
            [&a[0][0] + &b[0][0], &a[0][1] + &b[0][1]],
            [&a[1][0] + &b[1][0], &a[1][1] + &b[1][1]],
        ])
    }
}

impl Serialize for RationalMatrix2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<[String; 2]> = self
            .0
            .iter()
            .map(|r| [r[0].to_string(), r[1].to_string()])
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [[a, b], [c, e]]: [[RationalRepr; 2]; 2] = Deserialize::deserialize(d)?;
        Ok(RationalMatrix2([[a.0, b.0], [c.0, e.0]]))
    }
}

/// Result of [`IntegerMatrix2::order`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixOrder {
    Finite(u32),
    Infinite,
}

/// Exact 2×2 integer matrix, row-major. Maps `ℤ²` into itself.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegerMatrix2(pub [[Integer; 2]; 2]);

impl IntegerMatrix2 {
    pub fn new(m: [[i64; 2]; 2]) -> Self {
        IntegerMatrix2([[int(m[0][0]), int(m[0][1])], [int(m[1][0]), int(m[1][1])]])
    }

    pub fn identity() -> Self {
        IntegerMatrix2::new([[1, 0], [0, 1]])
    }

    pub fn scalar(s: i64) -> Self {
        IntegerMatrix2::new([[s, 0], [0, s]])
    }

    pub fn determinant(&self) -> Integer {
        let m = &self.0;
        &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
    }

    pub fn trace(&self) -> Integer {
        &self.0[0][0] + &self.0[1][1]
    }

    pub fn is_identity(&self) -> bool {
        *self == IntegerMatrix2::identity()
    }

    pub fn to_rational(&self) -> RationalMatrix2 {
        let m = &self.0;
        RationalMatrix2([
            [rat_from_int(m[0][0].clone()), rat_from_int(m[0][1].clone())],
            [rat_from_int(m[1][0].clone()), rat_from_int(m[1][1].clone())],
        ])
    }

    pub fn inverse(&self) -> Option<RationalMatrix2> {
        self.to_rational().inverse()
    }

    pub fn apply(&self, v: &RationalVector2) -> RationalVector2 {
        let m = &self.0;
        let e = |i: usize, j: usize| rat_from_int(m[i][j].clone());
        RationalVector2([
            e(0, 0) * &v.0[0] + e(0, 1) * &v.0[1],
            e(1, 0) * &v.0[0] + e(1, 1) * &v.0[1],
        ])
    }

    pub fn apply_int(&self, v: &IntegerVector2) -> IntegerVector2 {
        let m = &self.0;
        IntegerVector2([
            &m[0][0] * &v.0[0] + &m[0][1] * &v.0[1],
            &m[1][0] * &v.0[0] + &m[1][1] * &v.0[1],
        ])
    }

    pub fn pow(&self, exp: u32) -> IntegerMatrix2 {
        let mut acc = IntegerMatrix2::identity();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Smallest `n ≥ 1` with `Mⁿ = I`, searched up to [`MAX_MATRIX_ORDER`].
    pub fn order(&self) -> MatrixOrder {
        let mut power = self.clone();
        for n in 1..=MAX_MATRIX_ORDER {
            if power.is_identity() {
                return MatrixOrder::Finite(n);
            }
            power = &power * self;
        }
        MatrixOrder::Infinite
    }

    /// Whether both roots of `z² − τz + δ` lie strictly outside the unit
    /// circle, with `τ` the trace and `δ` the determinant.
    ///
    /// Equivalent to the reciprocal polynomial `δz² − τz + 1` having both
    /// roots strictly inside the unit disk. The Jury conditions for that
    /// quadratic reduce to `|δ| > 1` and `|τ| < |1 + δ|`.
    pub fn is_expanding(&self) -> bool {
        let tau = self.trace();
        let delta = self.determinant();
        let one = Integer::one();
        delta.abs() > one && tau.abs() < (&one + &delta).abs()
    }

    /// Representatives of `ℤ² / L(ℤ²)`: exactly `|det L|` integer vectors,
    /// pairwise inequivalent, taken from the box `[0, |det L|)²`.
    ///
    /// A unimodular column operation brings `L` to `[[det/g, h], [0, g]]`
    /// with `g = gcd` of the second row, so the rectangle
    /// `[0, |det|/g) × [0, g)` is a full set of residues.
    pub fn coset_representatives(&self) -> Result<Vec<IntegerVector2>, LatticeError> {
        let det = self.determinant();
        if det.is_zero() {
            return Err(LatticeError::Singular);
        }
        let g = self.0[1][0].gcd(&self.0[1][1]);
        let width = (det.abs() / &g).to_i64().ok_or(LatticeError::TooLarge)?;
        let height = g.to_i64().ok_or(LatticeError::TooLarge)?;
        Ok((0..height)
            .flat_map(|y| (0..width).map(move |x| IntegerVector2::new(x, y)))
            .collect())
    }

    /// Whether `u − v ∈ L(ℤ²)`.
    pub fn congruent(&self, u: &IntegerVector2, v: &IntegerVector2) -> bool {
        match self.inverse() {
            Some(inv) => inv.apply(&(&u.to_rational() - &v.to_rational())).is_integral(),
            None => false,
        }
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        self.to_rational().to_f64()
    }
}

impl<'a> Mul<&'a IntegerMatrix2> for &'a IntegerMatrix2 {
    type Output = IntegerMatrix2;
    fn mul(self, rhs: &IntegerMatrix2) -> IntegerMatrix2 {
        let (a, b) = (&self.0, &rhs.0);
        IntegerMatrix2([
            [
                &a[0][0] * &b[0][0] + &a[0][1] * &b[1][0],
                &a[0][0] * &b[0][1] + &a[0][1] * &b[1][1],
            ],
            [
                &a[1][0] * &b[0][0] + &a[1][1] * &b[1][0],
                &a[1][0] * &b[0][1] + &a[1][1] * &b[1][1],
            ],
        ])
    }
}

impl fmt::Display for IntegerMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(f, "[[{},{}],[{},{}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl Serialize for IntegerMatrix2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let m = &self.0;
        [
            [IntegerRepr(m[0][0].clone()), IntegerRepr(m[0][1].clone())],
            [IntegerRepr(m[1][0].clone()), IntegerRepr(m[1][1].clone())],
        ]
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntegerMatrix2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [[a, b], [c, e]]: [[IntegerRepr; 2]; 2] = Deserialize::deserialize(d)?;
        Ok(IntegerMatrix2([[a.0, b.0], [c.0, e.0]]))
    }
}

/// Metric embedding of lattice coordinates into the Euclidean plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    /// Basis `(1,0)`, `(0,1)`.
    Square,
    /// Basis `(1,0)`, `(1/2, √3/2)`.
    Hexagonal,
}

impl Geometry {
    /// Exact squared Euclidean length of a lattice-coordinate vector.
    pub fn norm_squared(&self, v: &RationalVector2) -> Rational {
        let (x, y) = (v.x(), v.y());
        match self {
            Geometry::Square => x * x + y * y,
            Geometry::Hexagonal => x * x + x * y + y * y,
        }
    }

    pub fn embed(&self, p: [f64; 2]) -> [f64; 2] {
        match self {
            Geometry::Square => p,
            Geometry::Hexagonal => [p[0] + 0.5 * p[1], 0.75f64.sqrt() * p[1]],
        }
    }

    pub fn distance(&self, p: [f64; 2], q: [f64; 2]) -> f64 {
        let (a, b) = (self.embed(p), self.embed(q));
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
    }
}

/// JSON rational: a `"p/q"` string, or a bare integer.
struct RationalRepr(Rational);

impl<'de> Deserialize<'de> for RationalRepr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(i) => Ok(RationalRepr(rat(i, 1))),
            Raw::Text(s) => parse_rational(&s).map(RationalRepr).map_err(de::Error::custom),
        }
    }
}

/// JSON integer: a number when it fits in `i64`, a decimal string otherwise.
struct IntegerRepr(Integer);

impl Serialize for IntegerRepr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for IntegerRepr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(i) => Ok(IntegerRepr(int(i))),
            Raw::Text(s) => {
                let q = parse_rational(&s).map_err(de::Error::custom)?;
                if !q.is_integer() {
                    return Err(de::Error::custom(format!("expected an integer, got {s}")));
                }
                Ok(IntegerRepr(q.to_integer()))
            }
        }
    }
}
