//! Ramification portraits and the orbifold they determine.
//!
//! A portrait records a finite forward-invariant set of marked points, the
//! map on them, local degrees, and the degree of the whole map. Every
//! critical point must be marked, so the critical multiplicities add up to
//! `2d − 2`. Unmarked points are then non-critical and carry ramification
//! value 1, which is what makes the parabolicity test below exact: a marked
//! point whose marked preimages carry less than `d` in total also has an
//! unmarked simple preimage.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer as _;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::OrbifoldError;
use crate::lattice::{rat, Rational};

/// A value of the ramification function: a positive integer or `∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RamificationValue {
    Finite(u64),
    Infinite,
}

impl RamificationValue {
    pub const ONE: RamificationValue = RamificationValue::Finite(1);

    pub fn is_infinite(self) -> bool {
        self == RamificationValue::Infinite
    }

    /// `d·self`, with `d·∞ = ∞`.
    pub fn times(self, d: u64) -> Result<RamificationValue, OrbifoldError> {
        match self {
            RamificationValue::Infinite => Ok(RamificationValue::Infinite),
            RamificationValue::Finite(v) => v
                .checked_mul(d)
                .map(RamificationValue::Finite)
                .ok_or_else(|| OrbifoldError::Inconsistent("ramification value overflow".into())),
        }
    }

    pub fn lcm(self, other: RamificationValue) -> RamificationValue {
        match (self, other) {
            (RamificationValue::Finite(a), RamificationValue::Finite(b)) => {
                RamificationValue::Finite(a.lcm(&b))
            }
            _ => RamificationValue::Infinite,
        }
    }

    /// Whether `self` divides `other`; everything divides `∞`.
    pub fn divides(self, other: RamificationValue) -> bool {
        match (self, other) {
            (_, RamificationValue::Infinite) => true,
            (RamificationValue::Infinite, RamificationValue::Finite(_)) => false,
            (RamificationValue::Finite(a), RamificationValue::Finite(b)) => b % a == 0,
        }
    }

    /// `1 − 1/α`, with `1 − 1/∞ = 1`.
    pub fn defect(self) -> Rational {
        match self {
            RamificationValue::Infinite => Rational::one(),
            RamificationValue::Finite(v) => Rational::one() - rat(1, v as i64),
        }
    }
}

impl fmt::Display for RamificationValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RamificationValue::Finite(v) => write!(f, "{v}"),
            RamificationValue::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for RamificationValue {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "∞" => Ok(RamificationValue::Infinite),
            t => match t.parse::<u64>() {
                Ok(v) if v >= 1 => Ok(RamificationValue::Finite(v)),
                _ => Err(format!("invalid ramification value {s:?}")),
            },
        }
    }
}

impl Serialize for RamificationValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RamificationValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// The multiset of ramification values `≥ 2`, ascending with `∞` last.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbifoldSignature(Vec<RamificationValue>);

impl OrbifoldSignature {
    pub fn new(mut values: Vec<RamificationValue>) -> Self {
        values.retain(|v| *v != RamificationValue::ONE);
        values.sort();
        OrbifoldSignature(values)
    }

    pub fn finite(values: &[u64]) -> Self {
        OrbifoldSignature::new(values.iter().map(|&v| RamificationValue::Finite(v)).collect())
    }

    pub fn entries(&self) -> &[RamificationValue] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `2 − Σ (1 − 1/α)`.
    pub fn euler_characteristic(&self) -> Rational {
        self.0
            .iter()
            .fold(rat(2, 1), |acc, v| acc - v.defect())
    }

    pub fn is_parabolic_signature(&self) -> bool {
        parabolic_signatures().contains(self)
    }

    pub fn is_lattes_type_signature(&self) -> bool {
        lattes_type_signatures().contains(self)
    }
}

impl fmt::Display for OrbifoldSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for OrbifoldSignature {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| format!("invalid signature {s:?}"))?;
        if inner.trim().is_empty() {
            return Ok(OrbifoldSignature(Vec::new()));
        }
        let values = inner
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<RamificationValue>, _>>()?;
        let sig = OrbifoldSignature::new(values.clone());
        if sig.0 != values {
            return Err(format!("signature {s:?} is not in canonical order"));
        }
        Ok(sig)
    }
}

impl Serialize for OrbifoldSignature {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for OrbifoldSignature {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// The six signatures of parabolic orbifolds.
pub fn parabolic_signatures() -> Vec<OrbifoldSignature> {
    use RamificationValue::{Finite as F, Infinite as I};
    vec![
        OrbifoldSignature::new(vec![I, I]),
        OrbifoldSignature::new(vec![F(2), F(2), I]),
        OrbifoldSignature::finite(&[2, 4, 4]),
        OrbifoldSignature::finite(&[2, 3, 6]),
        OrbifoldSignature::finite(&[3, 3, 3]),
        OrbifoldSignature::finite(&[2, 2, 2, 2]),
    ]
}

/// The parabolic signatures without `∞`, i.e. those of Lattès-type maps.
pub fn lattes_type_signatures() -> Vec<OrbifoldSignature> {
    vec![
        OrbifoldSignature::finite(&[2, 4, 4]),
        OrbifoldSignature::finite(&[2, 3, 6]),
        OrbifoldSignature::finite(&[3, 3, 3]),
        OrbifoldSignature::finite(&[2, 2, 2, 2]),
    ]
}

/// Finite marked set with its dynamics and local degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamificationPortrait {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    next: Vec<usize>,
    local_degree: Vec<u64>,
    degree: u64,
    preimages: Vec<Vec<usize>>,
}

/// JSON form: `{"points": [...], "next": {...}, "deg": {...}, "degree": d}`.
/// Missing `deg` entries mean 1; a missing `degree` is inferred as the
/// largest local degree or marked-preimage degree sum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortraitFile {
    pub points: Vec<String>,
    pub next: BTreeMap<String, String>,
    #[serde(default)]
    pub deg: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u64>,
}

impl RamificationPortrait {
    /// Builds and validates a portrait from `(label, image, local degree)`
    /// triples.
    pub fn new(
        entries: &[(&str, &str, u64)],
        degree: Option<u64>,
    ) -> Result<Self, OrbifoldError> {
        let file = PortraitFile {
            points: entries.iter().map(|e| e.0.to_string()).collect(),
            next: entries
                .iter()
                .map(|e| (e.0.to_string(), e.1.to_string()))
                .collect(),
            deg: entries.iter().map(|e| (e.0.to_string(), e.2)).collect(),
            degree,
        };
        RamificationPortrait::from_file(&file)
    }

    pub fn from_file(file: &PortraitFile) -> Result<Self, OrbifoldError> {
        let mut index = HashMap::new();
        for (i, label) in file.points.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(OrbifoldError::DuplicateLabel(label.clone()));
            }
        }
        let lookup = |l: &String| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| OrbifoldError::UnknownLabel(l.clone()))
        };
        for key in file.next.keys().chain(file.deg.keys()) {
            lookup(key)?;
        }
        let mut next = Vec::with_capacity(file.points.len());
        let mut local_degree = Vec::with_capacity(file.points.len());
        for label in &file.points {
            let image = file
                .next
                .get(label)
                .ok_or_else(|| OrbifoldError::MissingImage(label.clone()))?;
            next.push(lookup(image)?);
            let d = file.deg.get(label).copied().unwrap_or(1);
            if d == 0 {
                return Err(OrbifoldError::InvalidDegree(label.clone()));
            }
            local_degree.push(d);
        }
        let mut preimages = vec![Vec::new(); file.points.len()];
        for (q, &p) in next.iter().enumerate() {
            preimages[p].push(q);
        }
        let sums: Vec<u64> = preimages
            .iter()
            .map(|qs| qs.iter().map(|&q| local_degree[q]).sum())
            .collect();
        let degree = match file.degree {
            Some(0) => return Err(OrbifoldError::ZeroDegree),
            Some(d) => d,
            None => sums
                .iter()
                .chain(local_degree.iter())
                .copied()
                .max()
                .unwrap_or(1),
        };
        for (p, &sum) in sums.iter().enumerate() {
            if sum > degree {
                return Err(OrbifoldError::PreimageOverflow {
                    label: file.points[p].clone(),
                    sum,
                    degree,
                });
            }
        }
        if let Some(p) = local_degree.iter().position(|&d| d > degree) {
            return Err(OrbifoldError::PreimageOverflow {
                label: file.points[next[p]].clone(),
                sum: local_degree[p],
                degree,
            });
        }
        let multiplicity: u64 = local_degree.iter().map(|d| d - 1).sum();
        if multiplicity > 0 && multiplicity != 2 * degree - 2 {
            return Err(OrbifoldError::CriticalCountMismatch {
                found: multiplicity,
                expected: 2 * degree - 2,
            });
        }
        Ok(RamificationPortrait {
            labels: file.points.clone(),
            index,
            next,
            local_degree,
            degree,
            preimages,
        })
    }

    pub fn to_file(&self) -> PortraitFile {
        PortraitFile {
            points: self.labels.clone(),
            next: self
                .labels
                .iter()
                .zip(&self.next)
                .map(|(l, &n)| (l.clone(), self.labels[n].clone()))
                .collect(),
            deg: self
                .labels
                .iter()
                .zip(&self.local_degree)
                .filter(|(_, &d)| d != 1)
                .map(|(l, &d)| (l.clone(), d))
                .collect(),
            degree: Some(self.degree),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn next(&self, i: usize) -> usize {
        self.next[i]
    }

    pub fn local_degree(&self, i: usize) -> u64 {
        self.local_degree[i]
    }

    /// Degree of the map itself.
    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn preimages(&self, i: usize) -> &[usize] {
        &self.preimages[i]
    }

    pub fn is_critical(&self, i: usize) -> bool {
        self.local_degree[i] >= 2
    }

    pub fn has_critical(&self) -> bool {
        (0..self.len()).any(|i| self.is_critical(i))
    }

    /// Whether `i` has a preimage outside the marked set.
    pub fn has_unmarked_preimage(&self, i: usize) -> bool {
        let marked: u64 = self.preimages[i].iter().map(|&q| self.local_degree[q]).sum();
        marked < self.degree
    }

    /// Labels on a cycle that contains a critical label.
    pub fn periodic_critical(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for start in 0..self.len() {
            let mut cycle = vec![start];
            let mut p = self.next[start];
            while p != start && cycle.len() <= self.len() {
                cycle.push(p);
                p = self.next[p];
            }
            if p == start && cycle.iter().any(|&q| self.is_critical(q)) {
                out.extend(cycle);
            }
        }
        out
    }

    pub fn periodic_critical_labels(&self) -> Vec<String> {
        self.periodic_critical()
            .into_iter()
            .map(|i| self.labels[i].clone())
            .collect()
    }
}

/// The ramification function on the marked set; unmarked points have value 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ramification {
    values: Vec<RamificationValue>,
}

impl Ramification {
    pub fn values(&self) -> &[RamificationValue] {
        &self.values
    }

    pub fn at(&self, i: usize) -> RamificationValue {
        self.values[i]
    }

    pub fn by_label(&self, portrait: &RamificationPortrait) -> BTreeMap<String, RamificationValue> {
        portrait
            .labels()
            .iter()
            .cloned()
            .zip(self.values.iter().copied())
            .collect()
    }

    /// `α(p) = lcm` of `deg(f,q)·α(q)` over marked preimages `q`.
    fn step(&self, portrait: &RamificationPortrait) -> Result<Vec<RamificationValue>, OrbifoldError> {
        (0..portrait.len())
            .map(|p| {
                if self.values[p].is_infinite() {
                    return Ok(RamificationValue::Infinite);
                }
                portrait.preimages(p).iter().try_fold(RamificationValue::ONE, |acc, &q| {
                    Ok(acc.lcm(self.values[q].times(portrait.local_degree(q))?))
                })
            })
            .collect()
    }

    pub fn is_fixed_point(&self, portrait: &RamificationPortrait) -> bool {
        matches!(self.step(portrait), Ok(v) if v == self.values)
    }

    pub fn euler_characteristic(&self) -> Rational {
        self.values
            .iter()
            .fold(rat(2, 1), |acc, v| acc - v.defect())
    }

    pub fn signature(&self) -> OrbifoldSignature {
        OrbifoldSignature::new(self.values.clone())
    }
}

/// Computes `α` by fixed-point iteration from `∞` on critical cycles and 1
/// elsewhere.
pub fn ramification_function(portrait: &RamificationPortrait) -> Result<Ramification, OrbifoldError> {
    let periodic = portrait.periodic_critical();
    let mut current = Ramification {
        values: (0..portrait.len())
            .map(|i| {
                if periodic.contains(&i) {
                    RamificationValue::Infinite
                } else {
                    RamificationValue::ONE
                }
            })
            .collect(),
    };
    let cap = portrait.len().max(1) * 64;
    for _ in 0..cap {
        let next = current.step(portrait)?;
        if next == current.values {
            return Ok(current);
        }
        current.values = next;
    }
    Err(OrbifoldError::IterationCap(cap))
}

pub fn euler_characteristic(alpha: &Ramification) -> Rational {
    alpha.euler_characteristic()
}

pub fn signature(alpha: &Ramification) -> OrbifoldSignature {
    alpha.signature()
}

/// Where `deg(f,p)·α(p) = α(f(p))` fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParabolicWitness {
    /// At a marked point.
    Marked { label: String },
    /// At an unmarked simple preimage of the marked point `image`.
    UnmarkedPreimage { image: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParabolicVerdict {
    pub parabolic: bool,
    pub witness: Option<ParabolicWitness>,
}

/// Decides `deg(f,p)·α(p) = α(f(p))` everywhere and cross-checks the
/// verdict against `χ = 0`.
pub fn is_parabolic(
    portrait: &RamificationPortrait,
    alpha: &Ramification,
) -> Result<ParabolicVerdict, OrbifoldError> {
    if !portrait.has_critical() {
        return Err(OrbifoldError::NotThurstonPortrait);
    }
    let chi = alpha.euler_characteristic();
    if chi > Rational::zero() {
        return Err(OrbifoldError::PositiveEuler(chi.to_string()));
    }
    let mut witness = None;
    for p in 0..portrait.len() {
        let lhs = alpha.at(p).times(portrait.local_degree(p))?;
        if lhs != alpha.at(portrait.next(p)) {
            witness = Some(ParabolicWitness::Marked {
                label: portrait.label(p).to_string(),
            });
            break;
        }
    }
    if witness.is_none() {
        witness = (0..portrait.len())
            .find(|&p| portrait.has_unmarked_preimage(p) && alpha.at(p) != RamificationValue::ONE)
            .map(|p| ParabolicWitness::UnmarkedPreimage {
                image: portrait.label(p).to_string(),
            });
    }
    let parabolic = witness.is_none();
    if parabolic != chi.is_zero() {
        return Err(OrbifoldError::Inconsistent(format!(
            "functional equation says parabolic = {parabolic}, but χ = {chi}"
        )));
    }
    Ok(ParabolicVerdict { parabolic, witness })
}

/// Orbifold data of a portrait.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbifoldClassification {
    pub alpha: BTreeMap<String, RamificationValue>,
    pub signature: OrbifoldSignature,
    #[serde(with = "crate::serde_util::rational_str")]
    pub euler_char: Rational,
    pub parabolic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<ParabolicWitness>,
    pub periodic_critical: Vec<String>,
    pub in_parabolic_list: bool,
}

impl OrbifoldClassification {
    pub fn has_periodic_critical(&self) -> bool {
        !self.periodic_critical.is_empty()
    }
}

pub fn classify(portrait: &RamificationPortrait) -> Result<OrbifoldClassification, OrbifoldError> {
    let alpha = ramification_function(portrait)?;
    let verdict = is_parabolic(portrait, &alpha)?;
    let signature = alpha.signature();
    let in_parabolic_list = signature.is_parabolic_signature();
    if verdict.parabolic != in_parabolic_list {
        return Err(OrbifoldError::Inconsistent(format!(
            "parabolic = {} but signature {signature} membership in the parabolic list is {in_parabolic_list}",
            verdict.parabolic
        )));
    }
    Ok(OrbifoldClassification {
        alpha: alpha.by_label(portrait),
        euler_char: alpha.euler_characteristic(),
        signature,
        parabolic: verdict.parabolic,
        witness: verdict.witness,
        periodic_critical: portrait.periodic_critical_labels(),
        in_parabolic_list,
    })
}

/// Small hand-built portraits used by the tests, the acceptance suite and
/// the CLI self-check.
pub mod samples {
    use super::RamificationPortrait;

    /// `z ↦ z²`: `0` and `∞` fixed and critical.
    pub fn power_map() -> RamificationPortrait {
        RamificationPortrait::new(&[("0", "0", 2), ("inf", "inf", 2)], None).unwrap()
    }

    /// `z ↦ z³`.
    pub fn cubic_power_map() -> RamificationPortrait {
        RamificationPortrait::new(&[("0", "0", 3), ("inf", "inf", 3)], None).unwrap()
    }

    /// `z ↦ z² − 2`: `0 → −2 → 2 → 2`, `∞` fixed.
    pub fn chebyshev() -> RamificationPortrait {
        RamificationPortrait::new(
            &[("0", "-2", 2), ("-2", "2", 1), ("2", "2", 1), ("inf", "inf", 2)],
            None,
        )
        .unwrap()
    }

    /// `z ↦ 4z³ − 3z`: `±1/2 → ∓1`, `±1` fixed, `∞` fixed of degree 3.
    pub fn chebyshev_cubic() -> RamificationPortrait {
        RamificationPortrait::new(
            &[
                ("1/2", "-1", 2),
                ("-1/2", "1", 2),
                ("1", "1", 1),
                ("-1", "-1", 1),
                ("inf", "inf", 3),
            ],
            Some(3),
        )
        .unwrap()
    }

    /// Degree 3: four fixed marked points, each with one simple critical
    /// preimage. Signature `(2,2,2,2)`.
    pub fn flat() -> RamificationPortrait {
        RamificationPortrait::new(
            &[
                ("a", "a", 1),
                ("b", "b", 1),
                ("c", "c", 1),
                ("d", "d", 1),
                ("ca", "a", 2),
                ("cb", "b", 2),
                ("cc", "c", 2),
                ("cd", "d", 2),
            ],
            Some(3),
        )
        .unwrap()
    }

    /// Degree 3: a 5-cycle `p1 → … → p5 → p1` with four simple critical
    /// points feeding `p1`..`p4`. Signature `(2,2,2,2,2)`, `χ = −1/2`.
    pub fn five_cycle() -> RamificationPortrait {
        RamificationPortrait::new(
            &[
                ("p1", "p2", 1),
                ("p2", "p3", 1),
                ("p3", "p4", 1),
                ("p4", "p5", 1),
                ("p5", "p1", 1),
                ("c1", "p1", 2),
                ("c2", "p2", 2),
                ("c3", "p3", 2),
                ("c4", "p4", 2),
            ],
            Some(3),
        )
        .unwrap()
    }

    /// Degree 43: fixed points `A`, `B`, `C` fed by 20 double, 14 triple and
    /// 6 sevenfold critical points. Signature `(2,3,7)`, `χ = −1/42`.
    pub fn triangle_237() -> RamificationPortrait {
        let mut owned: Vec<(String, String, u64)> = vec![
            ("A".into(), "A".into(), 1),
            ("B".into(), "B".into(), 1),
            ("C".into(), "C".into(), 1),
        ];
        for (target, local, count) in [("A", 2, 20), ("B", 3, 14), ("C", 7, 6)] {
            for i in 0..count {
                owned.push((format!("{target}{i}"), target.into(), local));
            }
        }
        let entries: Vec<(&str, &str, u64)> = owned
            .iter()
            .map(|(a, b, d)| (a.as_str(), b.as_str(), *d))
            .collect();
        RamificationPortrait::new(&entries, Some(43)).unwrap()
    }

    /// `z ↦ z² + c` with `0` of period 3 ("airplane"): signature `(∞,∞,∞,∞)`.
    pub fn airplane() -> RamificationPortrait {
        RamificationPortrait::new(
            &[("0", "c", 2), ("c", "c2", 1), ("c2", "0", 1), ("inf", "inf", 2)],
            None,
        )
        .unwrap()
    }

    /// Degree 2 with critical `0 → 1 → 2 → 3 → 2` and `∞` fixed: `(2,2,2,∞)`.
    pub fn preperiodic_quadratic() -> RamificationPortrait {
        RamificationPortrait::new(
            &[("0", "1", 2), ("1", "2", 1), ("2", "3", 1), ("3", "2", 1), ("inf", "inf", 2)],
            None,
        )
        .unwrap()
    }

    /// Degree 3: `x, y, z → z` and two triple critical points over `x`
    /// and `y`. Signature `(3,3,3)`.
    pub fn triple_three() -> RamificationPortrait {
        RamificationPortrait::new(
            &[("x", "z", 1), ("y", "z", 1), ("z", "z", 1), ("cx", "x", 3), ("cy", "y", 3)],
            Some(3),
        )
        .unwrap()
    }
}
