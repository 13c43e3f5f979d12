//! Orientation-preserving wallpaper groups in lattice coordinates.
//!
//! A group is `{u ↦ Rᵏu + γ : 0 ≤ k < n, γ ∈ ℤ²}` for an integer rotation
//! generator `R` of order `n`. The generators are fixed per kind:
//!
//! | kind | `R`               | `n` | geometry  |
//! |------|-------------------|-----|-----------|
//! | p1   | `[[1,0],[0,1]]`   | 1   | square    |
//! | p2   | `[[-1,0],[0,-1]]` | 2   | square    |
//! | p3   | `[[-1,-1],[1,0]]` | 3   | hexagonal |
//! | p4   | `[[0,-1],[1,0]]`  | 4   | square    |
//! | p6   | `[[0,-1],[1,1]]`  | 6   | hexagonal |
//!
//! The p3 generator is the square of the p6 generator, and both are
//! isometries of the hexagonal embedding.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::CrystalError;
use crate::lattice::{Geometry, IntegerMatrix2, IntegerVector2, RationalVector2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    P1,
    P2,
    P3,
    P4,
    P6,
}

impl GroupKind {
    pub const ALL: [GroupKind; 5] = [
        GroupKind::P1,
        GroupKind::P2,
        GroupKind::P3,
        GroupKind::P4,
        GroupKind::P6,
    ];

    /// The four kinds of non-torus type.
    pub const SPHERICAL: [GroupKind; 4] = [GroupKind::P2, GroupKind::P3, GroupKind::P4, GroupKind::P6];

    pub fn as_str(self) -> &'static str {
        match self {
            GroupKind::P1 => "p1",
            GroupKind::P2 => "p2",
            GroupKind::P3 => "p3",
            GroupKind::P4 => "p4",
            GroupKind::P6 => "p6",
        }
    }

    pub fn generator(self) -> IntegerMatrix2 {
        match self {
            GroupKind::P1 => IntegerMatrix2::identity(),
            GroupKind::P2 => IntegerMatrix2::new([[-1, 0], [0, -1]]),
            GroupKind::P3 => IntegerMatrix2::new([[-1, -1], [1, 0]]),
            GroupKind::P4 => IntegerMatrix2::new([[0, -1], [1, 0]]),
            GroupKind::P6 => IntegerMatrix2::new([[0, -1], [1, 1]]),
        }
    }

    pub fn point_group_order(self) -> usize {
        match self {
            GroupKind::P1 => 1,
            GroupKind::P2 => 2,
            GroupKind::P3 => 3,
            GroupKind::P4 => 4,
            GroupKind::P6 => 6,
        }
    }

    pub fn geometry(self) -> Geometry {
        match self {
            GroupKind::P3 | GroupKind::P6 => Geometry::Hexagonal,
            _ => Geometry::Square,
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GroupKind {
    type Err = CrystalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GroupKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| CrystalError::UnknownKind(s.to_string()))
    }
}

/// The map `u ↦ Rᵏu + γ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub k: usize,
    pub gamma: IntegerVector2,
}

impl GroupElement {
    pub fn new(k: usize, gamma: IntegerVector2) -> Self {
        GroupElement { k, gamma }
    }

    pub fn identity() -> Self {
        GroupElement::new(0, IntegerVector2::zero())
    }

    pub fn translation(gamma: IntegerVector2) -> Self {
        GroupElement::new(0, gamma)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k={}, γ={})", self.k, self.gamma)
    }
}

/// An orbit class with nontrivial stabilizer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConePointClass {
    pub representative: RationalVector2,
    pub stabilizer_order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrystGroup {
    kind: GroupKind,
    rotation: IntegerMatrix2,
    powers: Vec<IntegerMatrix2>,
}

impl CrystGroup {
    pub fn new(kind: GroupKind) -> Self {
        let rotation = kind.generator();
        let n = kind.point_group_order();
        let powers = (0..n as u32).map(|k| rotation.pow(k)).collect();
        CrystGroup {
            kind,
            rotation,
            powers,
        }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn rotation(&self) -> &IntegerMatrix2 {
        &self.rotation
    }

    pub fn point_group_order(&self) -> usize {
        self.powers.len()
    }

    pub fn geometry(&self) -> Geometry {
        self.kind.geometry()
    }

    /// `Rᵏ` for any `k`, reduced modulo the order.
    pub fn power(&self, k: usize) -> &IntegerMatrix2 {
        &self.powers[k % self.powers.len()]
    }

    pub fn point_group(&self) -> &[IntegerMatrix2] {
        &self.powers
    }

    /// The `k` with `Rᵏ = m`, if `m` belongs to the point group.
    pub fn rotation_exponent(&self, m: &IntegerMatrix2) -> Option<usize> {
        self.powers.iter().position(|p| p == m)
    }

    pub fn check_element(&self, g: &GroupElement) -> Result<(), CrystalError> {
        if g.k >= self.point_group_order() {
            return Err(CrystalError::ExponentOutOfRange {
                k: g.k,
                order: self.point_group_order(),
            });
        }
        Ok(())
    }

    pub fn apply(&self, g: &GroupElement, u: &RationalVector2) -> RationalVector2 {
        &self.power(g.k).apply(u) + &g.gamma.to_rational()
    }

    /// `a ∘ b`, i.e. apply `b` first.
    pub fn compose(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let n = self.point_group_order();
        let rotated = self.power(a.k).apply_int(&b.gamma);
        GroupElement::new(
            (a.k + b.k) % n,
            IntegerVector2([&rotated.0[0] + &a.gamma.0[0], &rotated.0[1] + &a.gamma.0[1]]),
        )
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        let n = self.point_group_order();
        let k = (n - g.k % n) % n;
        let back = self.power(k).apply_int(&g.gamma);
        GroupElement::new(k, IntegerVector2([-&back.0[0], -&back.0[1]]))
    }

    /// Deterministic orbit representative: the lexicographically smallest
    /// reduction into `[0,1)²` among the point-group images of `u`.
    pub fn canonical_representative(&self, u: &RationalVector2) -> RationalVector2 {
        let base = u.reduce_mod_lattice();
        self.powers
            .iter()
            .map(|r| r.apply(&base).reduce_mod_lattice())
            .min()
            .expect("point group is never empty")
    }

    pub fn same_orbit(&self, u: &RationalVector2, v: &RationalVector2) -> bool {
        self.canonical_representative(u) == self.canonical_representative(v)
    }

    /// Number of `k ∈ [0,n)` with `(I − Rᵏ)u ∈ ℤ²`.
    pub fn stabilizer_order(&self, u: &RationalVector2) -> usize {
        self.powers
            .iter()
            .filter(|r| (u - &r.apply(u)).is_integral())
            .count()
    }

    /// All orbit classes with nontrivial stabilizer, sorted by stabilizer
    /// order and then by representative.
    pub fn cone_point_classes(&self) -> Result<Vec<ConePointClass>, CrystalError> {
        if self.kind == GroupKind::P1 {
            return Err(CrystalError::TorusType);
        }
        let identity = IntegerMatrix2::identity();
        let mut found: BTreeMap<RationalVector2, usize> = BTreeMap::new();
        for r in self.powers.iter().skip(1) {
            let fixed = IntegerMatrix2([
                [&identity.0[0][0] - &r.0[0][0], &identity.0[0][1] - &r.0[0][1]],
                [&identity.0[1][0] - &r.0[1][0], &identity.0[1][1] - &r.0[1][1]],
            ]);
            // solutions of (I − Rᵏ)u ∈ ℤ² lie in (1/D)ℤ², D = |det(I − Rᵏ)|
            let d = fixed
                .determinant()
                .abs()
                .to_i64()
                .expect("point-group determinants are tiny");
            for yn in 0..d {
                for xn in 0..d {
                    let u = RationalVector2::from_fracs(xn, d, yn, d);
                    if fixed.apply(&u).is_integral() {
                        let canon = self.canonical_representative(&u);
                        let order = self.stabilizer_order(&canon);
                        found.insert(canon, order);
                    }
                }
            }
        }
        let mut classes: Vec<ConePointClass> = found
            .into_iter()
            .map(|(representative, stabilizer_order)| ConePointClass {
                representative,
                stabilizer_order,
            })
            .collect();
        classes.sort_by(|a, b| {
            a.stabilizer_order
                .cmp(&b.stabilizer_order)
                .then_with(|| a.representative.cmp(&b.representative))
        });
        Ok(classes)
    }

    /// An element `g` with `g(x) = y`. Among all solutions, the one with the
    /// shortest translation (lattice coordinates) wins, ties to the least `k`.
    pub fn deck_solve(
        &self,
        x: &RationalVector2,
        y: &RationalVector2,
    ) -> Result<GroupElement, CrystalError> {
        self.powers
            .iter()
            .enumerate()
            .filter_map(|(k, r)| (y - &r.apply(x)).to_integer().map(|g| GroupElement::new(k, g)))
            .min_by_key(|g| (g.gamma.squared_len(), g.k))
            .ok_or_else(|| CrystalError::NotInSameFiber {
                x: x.to_string(),
                y: y.to_string(),
            })
    }

    /// Orbit points `Rᵏu + γ` with `γ ∈ [−radius, radius]²`.
    pub fn orbit_window(&self, u: &RationalVector2, radius: i64) -> Vec<RationalVector2> {
        let mut out = Vec::new();
        for r in &self.powers {
            let ru = r.apply(u);
            for gy in -radius..=radius {
                for gx in -radius..=radius {
                    out.push(&ru + &RationalVector2::from_ints(gx, gy));
                }
            }
        }
        out
    }

    /// Uniformly random element with translation entries in `[−span, span]`.
    pub fn random_element<R: rand::Rng + ?Sized>(&self, rng: &mut R, span: i64) -> GroupElement {
        let k = rng.gen_range(0..self.point_group_order());
        GroupElement::new(
            k,
            IntegerVector2([
                BigInt::from(rng.gen_range(-span..=span)),
                BigInt::from(rng.gen_range(-span..=span)),
            ]),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::MatrixOrder;

    fn v(xn: i64, xd: i64, yn: i64, yd: i64) -> RationalVector2 {
        RationalVector2::from_fracs(xn, xd, yn, yd)
    }

    #[test]
    fn generators_have_documented_orders() {
        for kind in GroupKind::ALL {
            let g = CrystGroup::new(kind);
            let r = g.rotation();
            assert_eq!(r.order(), MatrixOrder::Finite(kind.point_group_order() as u32));
            assert_eq!(r.determinant(), 1.into());
        }
        let p2 = CrystGroup::new(GroupKind::P2);
        assert_eq!(p2.rotation(), &IntegerMatrix2::new([[-1, 0], [0, -1]]));
        let p6 = CrystGroup::new(GroupKind::P6);
        assert_eq!(p6.rotation().trace(), 1.into());
        assert_eq!(
            p6.power(2),
            CrystGroup::new(GroupKind::P3).rotation(),
            "p3 generator is the square of the p6 generator"
        );
    }

    #[test]
    fn generators_are_isometries() {
        for kind in GroupKind::ALL {
            let g = CrystGroup::new(kind);
            let geo = g.geometry();
            for u in [v(1, 1, 0, 1), v(0, 1, 1, 1), v(2, 3, -5, 7)] {
                assert_eq!(geo.norm_squared(&g.rotation().apply(&u)), geo.norm_squared(&u));
            }
        }
    }

    #[test]
    fn apply_examples() {
        let p2 = CrystGroup::new(GroupKind::P2);
        let q = v(1, 4, 1, 4);
        assert_eq!(p2.apply(&GroupElement::identity(), &q), q);
        let g = GroupElement::new(1, IntegerVector2::new(1, 0));
        assert_eq!(p2.apply(&g, &q), v(3, 4, -1, 4));
        let p4 = CrystGroup::new(GroupKind::P4);
        let g = GroupElement::new(1, IntegerVector2::zero());
        assert_eq!(p4.apply(&g, &v(1, 1, 0, 1)), v(0, 1, 1, 1));
    }

    #[test]
    fn canonical_examples() {
        let p2 = CrystGroup::new(GroupKind::P2);
        assert_eq!(
            p2.canonical_representative(&v(3, 4, -1, 4)),
            p2.canonical_representative(&v(1, 4, 1, 4))
        );
        let c = p2.canonical_representative(&v(5, 7, 2, 3));
        assert_eq!(p2.canonical_representative(&c), c);
        let p4 = CrystGroup::new(GroupKind::P4);
        assert_eq!(
            p4.canonical_representative(&v(1, 1, 0, 1)),
            p4.canonical_representative(&v(0, 1, 1, 1))
        );
    }

    #[test]
    fn stabilizer_examples() {
        let p2 = CrystGroup::new(GroupKind::P2);
        assert_eq!(p2.stabilizer_order(&RationalVector2::zero()), 2);
        assert_eq!(p2.stabilizer_order(&v(1, 3, 0, 1)), 1);
        let p4 = CrystGroup::new(GroupKind::P4);
        assert_eq!(p4.stabilizer_order(&v(1, 2, 1, 2)), 4);
    }

    #[test]
    fn cone_points() {
        let orders = |kind| -> Vec<usize> {
            CrystGroup::new(kind)
                .cone_point_classes()
                .unwrap()
                .iter()
                .map(|c| c.stabilizer_order)
                .collect()
        };
        assert_eq!(orders(GroupKind::P2), vec![2, 2, 2, 2]);
        assert_eq!(orders(GroupKind::P3), vec![3, 3, 3]);
        assert_eq!(orders(GroupKind::P4), vec![2, 4, 4]);
        assert_eq!(orders(GroupKind::P6), vec![2, 3, 6]);
        assert_eq!(
            CrystGroup::new(GroupKind::P1).cone_point_classes(),
            Err(CrystalError::TorusType)
        );
    }

    #[test]
    fn deck_examples() {
        let p2 = CrystGroup::new(GroupKind::P2);
        let x = v(1, 4, 1, 4);
        assert_eq!(p2.deck_solve(&x, &x).unwrap(), GroupElement::identity());
        assert_eq!(
            p2.deck_solve(&x, &v(3, 4, 3, 4)).unwrap(),
            GroupElement::new(1, IntegerVector2::new(1, 1))
        );
        let p4 = CrystGroup::new(GroupKind::P4);
        assert_eq!(
            p4.deck_solve(&v(1, 1, 0, 1), &v(0, 1, 1, 1)).unwrap(),
            GroupElement::new(1, IntegerVector2::zero())
        );
        assert!(matches!(
            p2.deck_solve(&x, &v(1, 3, 0, 1)),
            Err(CrystalError::NotInSameFiber { .. })
        ));
    }

    #[test]
    fn inverse_and_compose() {
        let p6 = CrystGroup::new(GroupKind::P6);
        let g = GroupElement::new(5, IntegerVector2::new(2, -3));
        let id = GroupElement::identity();
        assert_eq!(p6.compose(&g, &p6.inverse(&g)), id);
        assert_eq!(p6.compose(&p6.inverse(&g), &g), id);
        let u = v(1, 5, 2, 7);
        let h = GroupElement::new(2, IntegerVector2::new(-1, 4));
        assert_eq!(p6.apply(&p6.compose(&g, &h), &u), p6.apply(&g, &p6.apply(&h, &u)));
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("p4".parse::<GroupKind>().unwrap(), GroupKind::P4);
        assert!("pmm".parse::<GroupKind>().is_err());
        assert_eq!(serde_json::to_string(&GroupKind::P6).unwrap(), "\"p6\"");
        let g = GroupElement::new(1, IntegerVector2::new(1, -2));
        assert_eq!(serde_json::to_string(&g).unwrap(), r#"{"k":1,"gamma":[1,-2]}"#);
    }
}
