//! Canonical data, witnesses, and random generation of valid data.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::affine::AffineMap;
use crate::crystal::{CrystGroup, GroupKind};
use crate::lattice::{IntegerMatrix2, RationalVector2};
use crate::orbifold::{samples, RamificationPortrait};
use crate::quotient::QuotientMapDatum;

fn linear(kind: GroupKind, l: [[i64; 2]; 2]) -> QuotientMapDatum {
    QuotientMapDatum::from_parts(kind, l, RationalVector2::zero()).expect("canonical datum is valid")
}

/// `(p2, 2I)`, `(p3, 2I)`, `(p4, [[1,1],[-1,1]])`, `(p6, 2I)`, all with `a = 0`.
pub fn canonical_data() -> Vec<QuotientMapDatum> {
    vec![
        linear(GroupKind::P2, [[2, 0], [0, 2]]),
        linear(GroupKind::P3, [[2, 0], [0, 2]]),
        linear(GroupKind::P4, [[1, 1], [-1, 1]]),
        linear(GroupKind::P6, [[2, 0], [0, 2]]),
    ]
}

/// Non-expanding datum: `L = [[2,-1],[-1,2]]` has eigenvalues 1 and 3, and
/// the eigenvalue-1 direction `(1,1)` is the diagonal of the unit square.
pub fn eigenvalue_one_witness() -> QuotientMapDatum {
    linear(GroupKind::P2, [[2, -1], [-1, 2]])
}

/// Non-expanding datum `L = [[3,0],[0,1]]`.
pub fn axis_stretch_witness() -> QuotientMapDatum {
    linear(GroupKind::P2, [[3, 0], [0, 1]])
}

/// Translations `a ∈ [0,1)²` with denominators dividing 12 for which
/// `(G, Lu + a)` is a valid datum.
pub fn valid_translations(group: &CrystGroup, l: &IntegerMatrix2) -> Vec<RationalVector2> {
    let mut out = Vec::new();
    for yn in 0..12 {
        for xn in 0..12 {
            let a = RationalVector2::from_fracs(xn, 12, yn, 12);
            if let Ok(map) = AffineMap::new(l.clone(), a.clone()) {
                if map.is_valid_lattes_datum(group) {
                    out.push(a);
                }
            }
        }
    }
    out
}

/// Random valid datum over a random non-torus group, linear part with
/// entries in `[−bound, bound]`, translation from [`valid_translations`].
pub fn random_valid_datum<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> QuotientMapDatum {
    let kind = *GroupKind::SPHERICAL.choose(rng).expect("nonempty");
    let group = CrystGroup::new(kind);
    loop {
        let mut e = || rng.gen_range(-bound..=bound);
        let l = IntegerMatrix2::new([[e(), e()], [e(), e()]]);
        let Ok(map) = AffineMap::new(l.clone(), RationalVector2::zero()) else {
            continue;
        };
        if !map.is_valid_lattes_datum(&group) {
            continue;
        }
        let translations = valid_translations(&group, &l);
        let a = translations
            .choose(rng)
            .cloned()
            .unwrap_or_else(RationalVector2::zero);
        let map = AffineMap::new(l, a).expect("nonsingular");
        return QuotientMapDatum::new(group, map).expect("validated above");
    }
}

/// Hand-built portraits, named.
pub fn portrait_corpus() -> Vec<(&'static str, RamificationPortrait)> {
    vec![
        ("power map z^2", samples::power_map()),
        ("power map z^3", samples::cubic_power_map()),
        ("chebyshev T2", samples::chebyshev()),
        ("chebyshev T3", samples::chebyshev_cubic()),
        ("flat (2,2,2,2)", samples::flat()),
        ("three-fold (3,3,3)", samples::triple_three()),
        ("five-cycle (2,2,2,2,2)", samples::five_cycle()),
        ("triangle (2,3,7)", samples::triangle_237()),
        ("airplane", samples::airplane()),
        ("preperiodic quadratic", samples::preperiodic_quadratic()),
    ]
}
