//! Independent oracles for the integration tests. None of them reuse the
//! library's decision procedures.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use lattes_core::lattice::{Integer, RationalVector2};
use lattes_core::{CrystGroup, GroupElement, IntegerMatrix2, IntegerVector2, QuotientMapDatum};
use num_traits::{Signed, ToPrimitive};

/// Moduli of the roots of `z² − τz + δ`, by the quadratic formula.
pub fn root_moduli(m: &[[i64; 2]; 2]) -> [f64; 2] {
    let tau = (m[0][0] + m[1][1]) as f64;
    let delta = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) as f64;
    let disc = tau * tau - 4.0 * delta;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [((tau + s) / 2.0).abs(), ((tau - s) / 2.0).abs()]
    } else {
        let r = delta.sqrt();
        [r, r]
    }
}

/// Numeric verdict, or `None` when a root sits within `1e-6` of the unit circle.
pub fn numeric_expanding(m: &[[i64; 2]; 2]) -> Option<bool> {
    let moduli = root_moduli(m);
    if moduli.iter().any(|r| (r - 1.0).abs() < 1e-6) {
        return None;
    }
    Some(moduli.iter().all(|&r| r > 1.0 + 1e-9))
}

fn to_i64(x: &Integer) -> i64 {
    x.to_i64().expect("small")
}

/// `u − v ∈ L(ℤ²)` via the adjugate: `adj(L)(u − v) ≡ 0 (mod det)`.
pub fn in_image(l: &[[i64; 2]; 2], w: [i64; 2]) -> bool {
    let det = l[0][0] * l[1][1] - l[0][1] * l[1][0];
    let x = l[1][1] * w[0] - l[0][1] * w[1];
    let y = -l[1][0] * w[0] + l[0][0] * w[1];
    x % det == 0 && y % det == 0
}

pub fn int_pair(v: &IntegerVector2) -> [i64; 2] {
    [to_i64(&v.0[0]), to_i64(&v.0[1])]
}

/// A window radius large enough to hold `γ` for any element moving `u`
/// into `[0,1)²` or onto another point of the same size.
pub fn reach(u: &RationalVector2) -> i64 {
    let m = u.to_f64().iter().fold(0.0f64, |a, c| a.max(c.abs()));
    2 * m.ceil() as i64 + 2
}

/// Group elements `(k, γ)` with `γ ∈ [−r, r]²` mapping `u` to `v`.
pub fn brute_transporters(
    group: &CrystGroup,
    u: &RationalVector2,
    v: &RationalVector2,
    r: i64,
) -> Vec<GroupElement> {
    let mut out = Vec::new();
    for k in 0..group.point_group_order() {
        for gx in -r..=r {
            for gy in -r..=r {
                let g = GroupElement::new(k, IntegerVector2::new(gx, gy));
                if &group.apply(&g, u) == v {
                    out.push(g);
                }
            }
        }
    }
    out
}

/// Points of `[0,1)²` with coordinates in `(1/den)ℤ`.
pub fn grid(den: i64) -> impl Iterator<Item = RationalVector2> {
    (0..den).flat_map(move |y| (0..den).map(move |x| RationalVector2::from_fracs(x, den, y, den)))
}

/// Fiber over `p` by scanning a grid fine enough to hold every preimage.
/// A class with stabilizer of order `s` has `n/s` lifts in `[0,1)²`, so the
/// lift counts give the stabilizers, and `deg = s(target)/s(class)`.
pub fn brute_fiber(datum: &QuotientMapDatum, p: &RationalVector2) -> BTreeMap<RationalVector2, usize> {
    let group = datum.group();
    let map = datum.map();
    let target = group.canonical_representative(p);
    let det = to_i64(&map.degree()).abs();
    let den_p = to_i64(&target.denominator_lcm());
    let den_a = to_i64(&map.translation_part().denominator_lcm());
    let den = det * num_integer::lcm(den_p, den_a);
    let mut lifts: BTreeMap<RationalVector2, usize> = BTreeMap::new();
    for u in grid(den) {
        if group.canonical_representative(&map.apply(&u)) == target {
            *lifts.entry(group.canonical_representative(&u)).or_default() += 1;
        }
    }
    let n = group.point_group_order();
    let s_t = n / count_lifts(group, &target);
    lifts.into_iter().map(|(q, c)| (q, s_t / (n / c))).collect()
}

/// Number of distinct points of `[0,1)²` in the orbit of `u`.
pub fn count_lifts(group: &CrystGroup, u: &RationalVector2) -> usize {
    (0..group.point_group_order())
        .map(|k| group.power(k).apply(u).reduce_mod_lattice())
        .collect::<BTreeSet<_>>()
        .len()
}

pub fn abs_det(l: &IntegerMatrix2) -> i64 {
    to_i64(&l.determinant()).abs()
}

pub fn is_positive(x: &Integer) -> bool {
    x.is_positive()
}
