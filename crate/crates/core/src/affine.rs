//! Affine maps `A(u) = Lu + a` with integer linear part, and the
//! equivariance and contraction checks built on them.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::crystal::{CrystGroup, GroupElement};
use crate::error::AffineError;
use crate::exec::{self, Strategy};
use crate::lattice::{
    Geometry, Integer, IntegerMatrix2, IntegerVector2, Rational, RationalMatrix2, RationalVector2,
};

/// A general exact affine map `u ↦ Mu + t` with rational `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineTransform {
    pub linear: RationalMatrix2,
    pub translation: RationalVector2,
}

impl AffineTransform {
    pub fn identity() -> Self {
        AffineTransform {
            linear: RationalMatrix2::identity(),
            translation: RationalVector2::zero(),
        }
    }

    pub fn translation(t: RationalVector2) -> Self {
        AffineTransform {
            linear: RationalMatrix2::identity(),
            translation: t,
        }
    }

    pub fn apply(&self, u: &RationalVector2) -> RationalVector2 {
        &self.linear.apply(u) + &self.translation
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineTransform) -> AffineTransform {
        AffineTransform {
            linear: &self.linear * &other.linear,
            translation: &self.linear.apply(&other.translation) + &self.translation,
        }
    }

    pub fn inverse(&self) -> Option<AffineTransform> {
        let inv = self.linear.inverse()?;
        let t = inv.apply(&self.translation);
        Some(AffineTransform {
            linear: inv,
            translation: -&t,
        })
    }

    pub fn from_group_element(group: &CrystGroup, g: &GroupElement) -> Self {
        AffineTransform {
            linear: group.power(g.k).to_rational(),
            translation: g.gamma.to_rational(),
        }
    }

    /// Reads `self` as an element of `group`, if it is one.
    pub fn to_group_element(&self, group: &CrystGroup) -> Option<GroupElement> {
        let linear = self.linear.to_integer()?;
        let k = group.rotation_exponent(&linear)?;
        let gamma = self.translation.to_integer()?;
        Some(GroupElement::new(k, gamma))
    }
}

/// `A(u) = Lu + a` with `L` integral and invertible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AffineMapRepr", into = "AffineMapRepr")]
pub struct AffineMap {
    linear: IntegerMatrix2,
    translation: RationalVector2,
}

#[derive(Serialize, Deserialize)]
struct AffineMapRepr {
    #[serde(rename = "L")]
    linear: IntegerMatrix2,
    a: RationalVector2,
}

impl TryFrom<AffineMapRepr> for AffineMap {
    type Error = AffineError;
    fn try_from(r: AffineMapRepr) -> Result<Self, Self::Error> {
        AffineMap::new(r.linear, r.a)
    }
}

impl From<AffineMap> for AffineMapRepr {
    fn from(m: AffineMap) -> Self {
        AffineMapRepr {
            linear: m.linear,
            a: m.translation,
        }
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u ↦ {}·u + {}", self.linear, self.translation)
    }
}

/// Why a pair `(G, A)` fails to define a Lattès-type map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum DatumDefect {
    /// `det(L) ≤ 1`.
    Determinant { det: String },
    /// `L·R·L⁻¹` is not a power of the rotation generator.
    LinearConjugation,
    /// `A∘g∘A⁻¹` has a non-integral translation part.
    Translation { element: String },
}

impl fmt::Display for DatumDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatumDefect::Determinant { det } => write!(f, "det(L) = {det} is not greater than 1"),
            DatumDefect::LinearConjugation => {
                write!(f, "L·R·L⁻¹ is not in the point group generated by R")
            }
            DatumDefect::Translation { element } => {
                write!(f, "A∘g∘A⁻¹ is not in G for g = {element}")
            }
        }
    }
}

impl AffineMap {
    pub fn new(linear: IntegerMatrix2, translation: RationalVector2) -> Result<Self, AffineError> {
        if linear.determinant().is_zero() {
            return Err(AffineError::Singular);
        }
        Ok(AffineMap {
            linear,
            translation,
        })
    }

    /// Linear map with zero translation.
    pub fn linear(m: [[i64; 2]; 2]) -> Result<Self, AffineError> {
        AffineMap::new(IntegerMatrix2::new(m), RationalVector2::zero())
    }

    pub fn linear_part(&self) -> &IntegerMatrix2 {
        &self.linear
    }

    pub fn translation_part(&self) -> &RationalVector2 {
        &self.translation
    }

    pub fn apply(&self, u: &RationalVector2) -> RationalVector2 {
        &self.linear.apply(u) + &self.translation
    }

    pub fn to_transform(&self) -> AffineTransform {
        AffineTransform {
            linear: self.linear.to_rational(),
            translation: self.translation.clone(),
        }
    }

    pub fn inverse_transform(&self) -> AffineTransform {
        self.to_transform()
            .inverse()
            .expect("linear part is invertible by construction")
    }

    pub fn degree(&self) -> Integer {
        self.linear.determinant()
    }

    pub fn is_expanding(&self) -> bool {
        self.linear.is_expanding()
    }

    /// `Aᵐ`: linear part `Lᵐ`, translation `(Lᵐ⁻¹ + … + L + I)a`.
    pub fn iterate(&self, m: u32) -> Result<AffineMap, AffineError> {
        if m == 0 {
            return Err(AffineError::ZeroIterate);
        }
        let mut power = IntegerMatrix2::identity();
        let mut translation = RationalVector2::zero();
        for _ in 0..m {
            translation = &translation + &power.apply(&self.translation);
            power = &power * &self.linear;
        }
        AffineMap::new(power, translation)
    }

    /// `L(γ)`, after checking `A∘τ_γ∘A⁻¹ = τ_{L(γ)}` exactly.
    pub fn conjugate_translation(&self, gamma: &IntegerVector2) -> Result<IntegerVector2, AffineError> {
        let image = self.linear.apply_int(gamma);
        let conj = self
            .to_transform()
            .compose(&AffineTransform::translation(gamma.to_rational()))
            .compose(&self.inverse_transform());
        if conj != AffineTransform::translation(image.to_rational()) {
            return Err(AffineError::ConjugationMismatch(gamma.to_string()));
        }
        Ok(image)
    }

    /// `A∘g∘A⁻¹` as an element of `group`, or `None` if it leaves the group.
    pub fn conjugate_element(&self, group: &CrystGroup, g: &GroupElement) -> Option<GroupElement> {
        self.to_transform()
            .compose(&AffineTransform::from_group_element(group, g))
            .compose(&self.inverse_transform())
            .to_group_element(group)
    }

    /// Exact optimal `C₀²` in `|A(x) − L(x)| ≤ C₀`; for affine `A` the
    /// difference is the constant `a`.
    pub fn coarse_bound(&self, geometry: Geometry) -> Rational {
        geometry.norm_squared(&self.translation)
    }

    /// The lifts `τ_γ∘A` for the given lattice translations.
    pub fn lift_family(&self, gammas: &[IntegerVector2]) -> Vec<AffineMap> {
        gammas
            .iter()
            .map(|g| AffineMap {
                linear: self.linear.clone(),
                translation: &self.translation + &g.to_rational(),
            })
            .collect()
    }

    /// The unique fixed point, when `1` is not an eigenvalue of `L`.
    pub fn fixed_point(&self) -> Option<RationalVector2> {
        let identity = RationalMatrix2::identity();
        let l = self.linear.to_rational();
        let neg = RationalMatrix2([
            [-&l.0[0][0], -&l.0[0][1]],
            [-&l.0[1][0], -&l.0[1][1]],
        ]);
        let shifted = &identity + &neg;
        Some(shifted.inverse()?.apply(&self.translation))
    }

    /// Floating-point `A⁻¹`, for diagnostics only.
    pub fn inverse_f64(&self) -> FloatAffine {
        let inv = self.inverse_transform();
        FloatAffine {
            linear: inv.linear.to_f64(),
            translation: inv.translation.to_f64(),
        }
    }

    /// Whether `(G, A)` is a Lattès-type datum; on failure names the first
    /// failing condition.
    pub fn lattes_validity(&self, group: &CrystGroup) -> Result<(), DatumDefect> {
        let det = self.linear.determinant();
        if det <= Integer::one() {
            return Err(DatumDefect::Determinant {
                det: det.to_string(),
            });
        }
        let inv = self.linear.inverse().expect("nonzero determinant");
        let conj = &(&self.linear.to_rational() * &group.rotation().to_rational()) * &inv;
        let in_point_group = conj
            .to_integer()
            .and_then(|m| group.rotation_exponent(&m))
            .is_some();
        if !in_point_group {
            return Err(DatumDefect::LinearConjugation);
        }
        let k = if group.point_group_order() > 1 { 1 } else { 0 };
        let probes = [
            GroupElement::new(k, IntegerVector2::zero()),
            GroupElement::new(k, IntegerVector2::new(1, 0)),
            GroupElement::new(k, IntegerVector2::new(0, 1)),
            GroupElement::translation(IntegerVector2::new(1, 0)),
            GroupElement::translation(IntegerVector2::new(0, 1)),
        ];
        for g in &probes {
            if self.conjugate_element(group, g).is_none() {
                return Err(DatumDefect::Translation {
                    element: g.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn is_valid_lattes_datum(&self, group: &CrystGroup) -> bool {
        self.lattes_validity(group).is_ok()
    }
}

/// Floating-point affine map, used by the numerical diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct FloatAffine {
    pub linear: [[f64; 2]; 2],
    pub translation: [f64; 2],
}

impl FloatAffine {
    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        let m = &self.linear;
        [
            m[0][0] * p[0] + m[0][1] * p[1] + self.translation[0],
            m[1][0] * p[0] + m[1][1] * p[1] + self.translation[1],
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractionParams {
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub n_max: usize,
}

impl Default for ContractionParams {
    fn default() -> Self {
        ContractionParams {
            epsilon1: 0.5,
            epsilon2: 0.5,
            n_max: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionReport {
    /// Smallest `n ≤ n_max` at which every pair satisfies the bound.
    pub holds_at: Option<usize>,
    /// Per `n = 1..=n_max`, the largest `|A⁻ⁿx − A⁻ⁿy| − (ε₁|x − y| + ε₂)`.
    pub worst_slack: Vec<f64>,
}

/// Witnesses `|A⁻ⁿ(x) − A⁻ⁿ(y)| ≤ ε₁|x − y| + ε₂` numerically on a sample
/// of point pairs given in lattice coordinates.
pub fn contraction_check(
    map: &AffineMap,
    geometry: Geometry,
    pairs: &[([f64; 2], [f64; 2])],
    params: ContractionParams,
    strategy: Strategy,
) -> Result<ContractionReport, AffineError> {
    if !map.is_expanding() {
        return Err(AffineError::NonExpanding);
    }
    if pairs.is_empty() {
        return Err(AffineError::EmptySample);
    }
    let inv = map.inverse_f64();
    let per_pair: Vec<Vec<f64>> = exec::map(strategy, pairs, |&(x, y)| {
        let bound = params.epsilon1 * geometry.distance(x, y) + params.epsilon2;
        let (mut px, mut py) = (x, y);
        (1..=params.n_max)
            .map(|_| {
                px = inv.apply(px);
                py = inv.apply(py);
                geometry.distance(px, py) - bound
            })
            .collect()
    });
    let worst_slack: Vec<f64> = (0..params.n_max)
        .map(|i| {
            per_pair
                .iter()
                .map(|s| s[i])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let holds_at = worst_slack.iter().position(|&s| s <= 0.0).map(|i| i + 1);
    Ok(ContractionReport {
        holds_at,
        worst_slack,
    })
}
