//! The sphere map induced on `ℝ²/G` by a Lattès-type datum `(G, A)`.
//!
//! Points of the sphere are represented by canonical orbit representatives.
//! The local degree of the quotient map at `u` is the stabilizer order of
//! `u`, so the local degree of the induced map `f` at the class of `u` is
//! `|stab(A(u))| / |stab(u)|`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::affine::AffineMap;
use crate::crystal::{CrystGroup, GroupKind};
use crate::error::{OrbifoldError, QuotientError};
use crate::exec::{self, Strategy};
use crate::lattice::{Integer, IntegerMatrix2, RationalVector2};
use crate::orbifold::{self, OrbifoldClassification, OrbifoldSignature, RamificationPortrait};

/// A validated Lattès-type datum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientMapDatum {
    group: CrystGroup,
    map: AffineMap,
}

/// JSON form: `{"group": "p4", "L": [[1,1],[-1,1]], "a": ["0","0"]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatumFile {
    pub group: GroupKind,
    #[serde(rename = "L")]
    pub linear: IntegerMatrix2,
    pub a: RationalVector2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberPoint {
    pub point: RationalVector2,
    pub degree: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitCheck {
    pub representative: RationalVector2,
    pub stabilizer_order: usize,
    pub points_checked: usize,
    pub constant: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstantFiberReport {
    pub constant: bool,
    pub orbits: Vec<OrbitCheck>,
}

/// A portrait together with the canonical point behind each label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractedPortrait {
    pub portrait: RamificationPortrait,
    pub points: Vec<RationalVector2>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremConditions {
    pub quotient_of_torus_endomorphism: bool,
    pub parabolic_orbifold: bool,
    pub lattes_type: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub group: GroupKind,
    #[serde(with = "crate::serde_util::integer_str")]
    pub degree: Integer,
    pub signature: OrbifoldSignature,
    #[serde(with = "crate::serde_util::rational_str")]
    pub euler_char: crate::lattice::Rational,
    pub parabolic: bool,
    pub expanding: bool,
    pub periodic_critical: bool,
    pub theorem_conditions: TheoremConditions,
}

/// Signature of every Lattès-type map built on `kind`.
pub fn expected_signature(kind: GroupKind) -> Option<OrbifoldSignature> {
    match kind {
        GroupKind::P1 => None,
        GroupKind::P2 => Some(OrbifoldSignature::finite(&[2, 2, 2, 2])),
        GroupKind::P3 => Some(OrbifoldSignature::finite(&[3, 3, 3])),
        GroupKind::P4 => Some(OrbifoldSignature::finite(&[2, 4, 4])),
        GroupKind::P6 => Some(OrbifoldSignature::finite(&[2, 3, 6])),
    }
}

impl QuotientMapDatum {
    pub fn new(group: CrystGroup, map: AffineMap) -> Result<Self, QuotientError> {
        if group.kind() == GroupKind::P1 {
            return Err(QuotientError::InvalidDatum(
                "p1 is of torus type and has no sphere quotient".into(),
            ));
        }
        map.lattes_validity(&group)
            .map_err(|d| QuotientError::InvalidDatum(d.to_string()))?;
        Ok(QuotientMapDatum { group, map })
    }

    pub fn from_parts(
        kind: GroupKind,
        linear: [[i64; 2]; 2],
        translation: RationalVector2,
    ) -> Result<Self, QuotientError> {
        let map = AffineMap::new(IntegerMatrix2::new(linear), translation)?;
        QuotientMapDatum::new(CrystGroup::new(kind), map)
    }

    pub fn from_file(file: &DatumFile) -> Result<Self, QuotientError> {
        let map = AffineMap::new(file.linear.clone(), file.a.clone())?;
        QuotientMapDatum::new(CrystGroup::new(file.group), map)
    }

    pub fn to_file(&self) -> DatumFile {
        DatumFile {
            group: self.group.kind(),
            linear: self.map.linear_part().clone(),
            a: self.map.translation_part().clone(),
        }
    }

    pub fn group(&self) -> &CrystGroup {
        &self.group
    }

    pub fn map(&self) -> &AffineMap {
        &self.map
    }

    pub fn degree(&self) -> Integer {
        self.map.degree()
    }

    /// The datum of `fᵐ`, i.e. `(G, Aᵐ)`.
    pub fn iterate(&self, m: u32) -> Result<QuotientMapDatum, QuotientError> {
        QuotientMapDatum::new(self.group.clone(), self.map.iterate(m)?)
    }

    pub fn canonical(&self, u: &RationalVector2) -> RationalVector2 {
        self.group.canonical_representative(u)
    }

    /// `f(Θ(u)) = Θ(A(u))`, as a canonical point.
    pub fn induced_image(&self, u: &RationalVector2) -> RationalVector2 {
        self.group.canonical_representative(&self.map.apply(u))
    }

    /// `deg(f, Θ(u)) = |stab(A(u))| / |stab(u)|`.
    pub fn local_degree(&self, u: &RationalVector2) -> Result<u64, QuotientError> {
        let stab = self.group.stabilizer_order(u);
        let image_stab = self.group.stabilizer_order(&self.map.apply(u));
        if !image_stab.is_multiple_of(stab) {
            return Err(QuotientError::NonIntegralLocalDegree {
                point: u.to_string(),
                stab,
                image_stab,
            });
        }
        Ok((image_stab / stab) as u64)
    }

    fn degree_usize(&self) -> usize {
        self.degree()
            .abs()
            .to_usize()
            .expect("desk-scale degree fits in usize")
    }

    /// All classes over the class of `p`, with local degrees. The degree sum
    /// is checked against `det(L)` before returning.
    ///
    /// Candidates are `L⁻¹(p + γ − a)` over coset representatives `γ`. Lifts
    /// `Rᵏp + γ` with `k ≠ 0` add nothing: `L` normalizes the point group, so
    /// some `g ∈ G` has `A∘g∘A⁻¹` with rotation part `R⁻ᵏ`, and `g(q)` lies in
    /// the same class as `q` with `A(g(q)) ∈ p + ℤ²`.
    pub fn fiber(&self, p: &RationalVector2, strategy: Strategy) -> Result<Vec<FiberPoint>, QuotientError> {
        let target = self.canonical(p);
        let linv = self
            .map
            .linear_part()
            .inverse()
            .expect("valid datum has invertible linear part");
        let reps = self.map.linear_part().coset_representatives()?;
        let base = &target - self.map.translation_part();
        let candidates: Vec<RationalVector2> = exec::map(strategy, &reps, |gamma| {
            self.canonical(&linv.apply(&(&base + &gamma.to_rational())))
        });
        let unique: BTreeSet<RationalVector2> = candidates.into_iter().collect();
        let mut out = Vec::with_capacity(unique.len());
        let mut sum = 0usize;
        for q in unique {
            debug_assert_eq!(self.induced_image(&q), target);
            let degree = self.local_degree(&q)?;
            sum += degree as usize;
            out.push(FiberPoint { point: q, degree });
        }
        if sum != self.degree_usize() {
            return Err(QuotientError::FiberCertificate {
                point: target.to_string(),
                sum,
                det: self.degree(),
            });
        }
        Ok(out)
    }

    /// Checks that the quotient map's local degree, the stabilizer order,
    /// is constant along each cone-point orbit and each sampled orbit.
    pub fn constant_fiber_degree_check(
        &self,
        samples: &[RationalVector2],
    ) -> Result<ConstantFiberReport, QuotientError> {
        let mut reps: Vec<RationalVector2> = self
            .group
            .cone_point_classes()?
            .into_iter()
            .map(|c| c.representative)
            .collect();
        reps.extend(samples.iter().map(|u| self.canonical(u)));
        let orbits: Vec<OrbitCheck> = reps
            .into_iter()
            .map(|rep| {
                let order = self.group.stabilizer_order(&rep);
                let window = self.group.orbit_window(&rep, 1);
                let constant = window
                    .iter()
                    .all(|w| self.group.stabilizer_order(w) == order);
                OrbitCheck {
                    representative: rep,
                    stabilizer_order: order,
                    points_checked: window.len(),
                    constant,
                }
            })
            .collect();
        Ok(ConstantFiberReport {
            constant: orbits.iter().all(|o| o.constant),
            orbits,
        })
    }

    /// Portrait on the cone-point classes, closed under `f`, together with
    /// every critical class lying over them.
    pub fn extract_portrait(&self, strategy: Strategy) -> Result<ExtractedPortrait, QuotientError> {
        let limit = 10 * self.group.point_group_order() * self.degree_usize();
        let mut points: Vec<RationalVector2> = Vec::new();
        let mut seen: BTreeSet<RationalVector2> = BTreeSet::new();
        let mut queue: VecDeque<RationalVector2> = self
            .group
            .cone_point_classes()?
            .into_iter()
            .map(|c| c.representative)
            .collect();
        let mut fibers_done: BTreeSet<RationalVector2> = BTreeSet::new();
        while let Some(p) = queue.pop_front() {
            if !seen.insert(p.clone()) {
                continue;
            }
            if seen.len() > limit {
                return Err(QuotientError::ClosureOverflow(limit));
            }
            points.push(p.clone());
            queue.push_back(self.induced_image(&p));
            if self.group.stabilizer_order(&p) > 1 && fibers_done.insert(p.clone()) {
                for q in self.fiber(&p, strategy)? {
                    if q.degree > 1 {
                        queue.push_back(q.point);
                    }
                }
            }
        }
        let labels: Vec<String> = points.iter().map(|p| p.to_string()).collect();
        let index: BTreeMap<&RationalVector2, usize> =
            points.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut entries = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            let image = self.induced_image(p);
            let j = *index.get(&image).ok_or_else(|| {
                QuotientError::Orbifold(OrbifoldError::UnknownLabel(image.to_string()))
            })?;
            entries.push((i, j, self.local_degree(p)?));
        }
        let triples: Vec<(&str, &str, u64)> = entries
            .iter()
            .map(|&(i, j, d)| (labels[i].as_str(), labels[j].as_str(), d))
            .collect();
        let degree = self.degree_usize() as u64;
        let portrait = RamificationPortrait::new(&triples, Some(degree))?;
        Ok(ExtractedPortrait { portrait, points })
    }

    pub fn classify_portrait(&self, strategy: Strategy) -> Result<OrbifoldClassification, QuotientError> {
        let extracted = self.extract_portrait(strategy)?;
        Ok(orbifold::classify(&extracted.portrait)?)
    }

    /// Degree, orbifold data and expansion, with the implications of the
    /// structure theory checked on the spot.
    pub fn theorem_report(&self, strategy: Strategy) -> Result<ClassificationReport, QuotientError> {
        let classification = self.classify_portrait(strategy)?;
        let report = ClassificationReport {
            group: self.group.kind(),
            degree: self.degree(),
            signature: classification.signature.clone(),
            euler_char: classification.euler_char.clone(),
            parabolic: classification.parabolic,
            expanding: self.map.is_expanding(),
            periodic_critical: classification.has_periodic_critical(),
            theorem_conditions: TheoremConditions {
                quotient_of_torus_endomorphism: true,
                parabolic_orbifold: classification.parabolic,
                lattes_type: true,
            },
        };
        let falsified = |msg: String| Err(QuotientError::FalsifiedTheorem(msg));
        if !report.parabolic {
            return falsified(format!("orbifold with signature {} is not parabolic", report.signature));
        }
        if report.periodic_critical {
            return falsified(format!(
                "periodic critical points {:?}",
                classification.periodic_critical
            ));
        }
        if expected_signature(self.group.kind()).as_ref() != Some(&report.signature) {
            return falsified(format!(
                "signature {} does not match group {}",
                report.signature,
                self.group.kind()
            ));
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;

    fn v(xn: i64, xd: i64, yn: i64, yd: i64) -> RationalVector2 {
        RationalVector2::from_fracs(xn, xd, yn, yd)
    }

    fn datum(kind: GroupKind, l: [[i64; 2]; 2]) -> QuotientMapDatum {
        QuotientMapDatum::from_parts(kind, l, RationalVector2::zero()).unwrap()
    }

    #[test]
    fn induced_image_examples() {
        let d = datum(GroupKind::P2, [[2, 0], [0, 2]]);
        assert_eq!(d.induced_image(&RationalVector2::zero()), RationalVector2::zero());
        assert_eq!(d.induced_image(&v(1, 2, 0, 1)), RationalVector2::zero());
        let d = datum(GroupKind::P4, [[1, 1], [-1, 1]]);
        // A(1/2,1/2) = (1,0), a lattice point
        assert_eq!(d.induced_image(&v(1, 2, 1, 2)), RationalVector2::zero());
    }

    #[test]
    fn local_degree_examples() {
        let d = datum(GroupKind::P2, [[2, 0], [0, 2]]);
        assert_eq!(d.local_degree(&v(1, 4, 0, 1)).unwrap(), 2);
        assert_eq!(d.local_degree(&v(1, 7, 2, 9)).unwrap(), 1);
        let d = datum(GroupKind::P4, [[1, 1], [-1, 1]]);
        // A(1/2,0) = (1/2,-1/2), an order-4 centre; stab(1/2,0) = 2
        assert_eq!(d.local_degree(&v(1, 2, 0, 1)).unwrap(), 2);
    }

    #[test]
    fn fiber_examples() {
        let d = datum(GroupKind::P2, [[2, 0], [0, 2]]);
        let fib = d.fiber(&RationalVector2::zero(), Strategy::Sequential).unwrap();
        let pts: Vec<_> = fib.iter().map(|f| f.point.clone()).collect();
        assert_eq!(
            pts,
            vec![v(0, 1, 0, 1), v(0, 1, 1, 2), v(1, 2, 0, 1), v(1, 2, 1, 2)]
        );
        assert!(fib.iter().all(|f| f.degree == 1));
        let generic = d.fiber(&v(1, 5, 2, 7), Strategy::Parallel).unwrap();
        assert_eq!(generic.iter().map(|f| f.degree).sum::<u64>(), 4);
    }

    #[test]
    fn constant_fiber_examples() {
        let d = datum(GroupKind::P2, [[2, 0], [0, 2]]);
        let r = d.constant_fiber_degree_check(&[v(1, 5, 2, 7)]).unwrap();
        assert!(r.constant);
        let half = r.orbits.iter().find(|o| o.representative == v(1, 2, 0, 1)).unwrap();
        assert_eq!(half.stabilizer_order, 2);
        assert_eq!(r.orbits.last().unwrap().stabilizer_order, 1);
        let d = datum(GroupKind::P4, [[1, 1], [-1, 1]]);
        let r = d.constant_fiber_degree_check(&[]).unwrap();
        let centre = r.orbits.iter().find(|o| o.representative == v(1, 2, 1, 2)).unwrap();
        assert_eq!(centre.stabilizer_order, 4);
        assert!(r.constant);
    }

    #[test]
    fn portrait_signatures() {
        let cases = [
            (GroupKind::P2, [[2, 0], [0, 2]], "(2,2,2,2)"),
            (GroupKind::P4, [[1, 1], [-1, 1]], "(2,4,4)"),
            (GroupKind::P6, [[2, 0], [0, 2]], "(2,3,6)"),
            (GroupKind::P3, [[2, 0], [0, 2]], "(3,3,3)"),
        ];
        for (kind, l, sig) in cases {
            let c = datum(kind, l).classify_portrait(Strategy::Parallel).unwrap();
            assert_eq!(c.signature.to_string(), sig, "{kind}");
        }
    }

    #[test]
    fn flat_portrait_structure() {
        let d = datum(GroupKind::P2, [[2, 0], [0, 2]]);
        let e = d.extract_portrait(Strategy::Sequential).unwrap();
        // four cone classes plus two simple critical classes over each of three of them
        assert_eq!(e.portrait.len(), 10);
        assert_eq!(e.portrait.degree(), 4);
        for cone in ["(0,0)", "(0,1/2)", "(1/2,0)", "(1/2,1/2)"] {
            let i = e.portrait.index_of(cone).unwrap();
            assert_eq!(e.portrait.next(i), e.portrait.index_of("(0,0)").unwrap());
        }
    }

    #[test]
    fn theorem_report_examples() {
        let r = datum(GroupKind::P2, [[2, 0], [0, 2]]).theorem_report(Strategy::Parallel).unwrap();
        assert_eq!(r.degree, 4.into());
        assert_eq!(r.signature.to_string(), "(2,2,2,2)");
        assert!(r.parabolic && r.expanding && !r.periodic_critical);
        assert_eq!(r.euler_char, rat(0, 1));
        let r = datum(GroupKind::P4, [[1, 1], [-1, 1]]).theorem_report(Strategy::Parallel).unwrap();
        assert_eq!(r.degree, 2.into());
        assert_eq!(r.signature.to_string(), "(2,4,4)");
        assert!(r.parabolic && r.expanding);
        let r = datum(GroupKind::P2, [[3, 0], [0, 1]]).theorem_report(Strategy::Parallel).unwrap();
        assert_eq!(r.degree, 3.into());
        assert!(r.parabolic && !r.expanding);
        assert!(r.theorem_conditions.lattes_type && r.theorem_conditions.quotient_of_torus_endomorphism);
    }

    #[test]
    fn translated_datum() {
        let d = QuotientMapDatum::from_parts(GroupKind::P2, [[2, 0], [0, 2]], v(1, 2, 1, 2)).unwrap();
        let r = d.theorem_report(Strategy::Sequential).unwrap();
        assert_eq!(r.signature.to_string(), "(2,2,2,2)");
        // A(0) = (1/2,1/2), so the origin is no longer fixed
        assert_eq!(d.induced_image(&RationalVector2::zero()), v(1, 2, 1, 2));
    }

    #[test]
    fn invalid_data_rejected() {
        assert!(matches!(
            QuotientMapDatum::from_parts(GroupKind::P4, [[1, 0], [0, 2]], RationalVector2::zero()),
            Err(QuotientError::InvalidDatum(_))
        ));
        assert!(matches!(
            QuotientMapDatum::from_parts(GroupKind::P1, [[2, 0], [0, 2]], RationalVector2::zero()),
            Err(QuotientError::InvalidDatum(_))
        ));
        assert!(matches!(
            QuotientMapDatum::from_parts(GroupKind::P2, [[1, 2], [2, 4]], RationalVector2::zero()),
            Err(QuotientError::Affine(_))
        ));
    }

    #[test]
    fn datum_json() {
        let json = r#"{"group":"p4","L":[[1,1],[-1,1]],"a":["0","0"]}"#;
        let file: DatumFile = serde_json::from_str(json).unwrap();
        let d = QuotientMapDatum::from_file(&file).unwrap();
        assert_eq!(serde_json::to_string(&d.to_file()).unwrap(), json);
    }
}
