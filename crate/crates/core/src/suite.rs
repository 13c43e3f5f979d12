//! Randomized invariant suite run against a single datum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::affine::{contraction_check, AffineTransform, ContractionParams};
use crate::crystal::GroupElement;
use crate::exec::Strategy;
use crate::lattice::{IntegerVector2, RationalVector2};
use crate::orbifold;
use crate::quotient::{expected_signature, QuotientMapDatum};

pub const DEFAULT_SEED: u64 = 20_241_016;
pub const DEFAULT_SAMPLES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    pub contraction: ContractionParams,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
            contraction: ContractionParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn random_point<R: Rng>(rng: &mut R) -> RationalVector2 {
    let mut c = || {
        let den = rng.gen_range(1..=24);
        (rng.gen_range(-3 * den..=3 * den), den)
    };
    let (xn, xd) = c();
    let (yn, yd) = c();
    RationalVector2::from_fracs(xn, xd, yn, yd)
}

fn outcome(name: &'static str, failures: Vec<String>, checked: usize) -> InvariantOutcome {
    InvariantOutcome {
        name,
        passed: failures.is_empty(),
        detail: match failures.first() {
            None => format!("{checked} cases"),
            Some(f) => format!("{} of {checked} failed; first: {f}", failures.len()),
        },
    }
}

/// Runs every invariant with `config.samples` random cases each.
pub fn run_invariant_suite(
    datum: &QuotientMapDatum,
    config: &SuiteConfig,
    strategy: Strategy,
) -> Vec<InvariantOutcome> {
    let samples = config.samples;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let group = datum.group();
    let map = datum.map();
    let mut out = Vec::new();

    let cases: Vec<(GroupElement, RationalVector2)> = (0..samples)
        .map(|_| (group.random_element(&mut rng, 3), random_point(&mut rng)))
        .collect();

    let mut fails = Vec::new();
    for w in cases.windows(3) {
        let (h, k, l) = (&w[0].0, &w[1].0, &w[2].0);
        let left = group.compose(&group.compose(h, k), l);
        let right = group.compose(h, &group.compose(k, l));
        if left != right || group.compose(h, &group.inverse(h)) != GroupElement::identity() {
            fails.push(h.to_string());
        }
    }
    out.push(outcome("group axioms", fails, cases.len()));

    let fails = cases
        .iter()
        .filter(|(g, u)| group.canonical_representative(&group.apply(g, u)) != group.canonical_representative(u))
        .map(|(g, u)| format!("g={g}, u={u}"))
        .collect();
    out.push(outcome("orbit soundness", fails, cases.len()));

    let fails = cases
        .iter()
        .filter(|(g, u)| {
            let y = group.apply(g, u);
            !matches!(group.deck_solve(u, &y), Ok(s) if group.apply(&s, u) == y)
        })
        .map(|(g, u)| format!("g={g}, u={u}"))
        .collect();
    out.push(outcome("deck completeness", fails, cases.len()));

    let fails = cases
        .iter()
        .filter(|(g, u)| datum.induced_image(&group.apply(g, u)) != datum.induced_image(u))
        .map(|(g, u)| format!("g={g}, u={u}"))
        .collect();
    out.push(outcome("well-definedness", fails, cases.len()));

    let fails = cases
        .iter()
        .filter(|(g, _)| map.conjugate_element(group, g).is_none())
        .map(|(g, _)| g.to_string())
        .collect();
    out.push(outcome("equivariance closure", fails, cases.len()));

    let fails = cases
        .iter()
        .filter(|(g, _)| {
            let conj = map
                .to_transform()
                .compose(&AffineTransform::translation(g.gamma.to_rational()))
                .compose(&map.inverse_transform());
            conj != AffineTransform::translation(map.linear_part().apply_int(&g.gamma).to_rational())
        })
        .map(|(g, _)| g.gamma.to_string())
        .collect();
    out.push(outcome("translation conjugation", fails, cases.len()));

    let mut fails = Vec::new();
    let fiber_points: Vec<RationalVector2> = cases.iter().take(samples.min(20)).map(|(_, u)| u.clone()).collect();
    let mut checked = 0;
    let mut labels = Vec::new();
    match datum.extract_portrait(strategy) {
        Ok(e) => labels = e.points,
        Err(err) => fails.push(err.to_string()),
    }
    for p in labels.iter().chain(&fiber_points) {
        checked += 1;
        if let Err(err) = datum.fiber(p, strategy) {
            fails.push(err.to_string());
        }
    }
    out.push(outcome("fiber degree sum", fails, checked));

    let mut fails = Vec::new();
    match datum.classify_portrait(strategy) {
        Ok(c) => {
            if !c.parabolic {
                fails.push(format!("not parabolic: {}", c.signature));
            }
            if c.has_periodic_critical() {
                fails.push(format!("periodic critical: {:?}", c.periodic_critical));
            }
            if expected_signature(group.kind()).as_ref() != Some(&c.signature) {
                fails.push(format!("signature {} for {}", c.signature, group.kind()));
            }
        }
        Err(e) => fails.push(e.to_string()),
    }
    out.push(outcome("parabolic without periodic critical points", fails, 1));

    let mut fails = Vec::new();
    match datum.extract_portrait(strategy) {
        Ok(e) => match orbifold::ramification_function(&e.portrait) {
            Ok(alpha) => {
                if !alpha.is_fixed_point(&e.portrait) {
                    fails.push("one more lcm round changes α".into());
                }
                for p in 0..e.portrait.len() {
                    let lhs = alpha.at(p).times(e.portrait.local_degree(p));
                    if !matches!(lhs, Ok(v) if v.divides(alpha.at(e.portrait.next(p)))) {
                        fails.push(format!("divisibility at {}", e.portrait.label(p)));
                    }
                }
            }
            Err(err) => fails.push(err.to_string()),
        },
        Err(err) => fails.push(err.to_string()),
    }
    out.push(outcome("ramification fixed point and divisibility", fails, 1));

    let mut fails = Vec::new();
    let base = datum.classify_portrait(strategy).map(|c| c.signature);
    for m in [2, 3] {
        let iterated = datum
            .iterate(m)
            .and_then(|d| d.classify_portrait(strategy))
            .map(|c| c.signature);
        if iterated != base {
            fails.push(format!("A^{m}: {iterated:?} vs {base:?}"));
        }
    }
    out.push(outcome("iterate signature invariance", fails, 2));

    let mut fails = Vec::new();
    match datum.iterate(2) {
        Ok(square) => {
            for (_, u) in &cases {
                let lhs = square.local_degree(u);
                let rhs = datum
                    .local_degree(u)
                    .and_then(|a| Ok(a * datum.local_degree(&datum.induced_image(u))?));
                if lhs != rhs {
                    fails.push(format!("u={u}"));
                }
            }
            // cone points carry all the interesting degrees
            if let Ok(e) = datum.extract_portrait(strategy) {
                for u in &e.points {
                    let lhs = square.local_degree(u);
                    let rhs = datum
                        .local_degree(u)
                        .and_then(|a| Ok(a * datum.local_degree(&datum.induced_image(u))?));
                    if lhs != rhs {
                        fails.push(format!("u={u}"));
                    }
                }
            }
        }
        Err(e) => fails.push(e.to_string()),
    }
    out.push(outcome("local degree multiplicativity", fails, cases.len()));

    let sample_points: Vec<RationalVector2> = cases.iter().take(20).map(|(_, u)| u.clone()).collect();
    let fails = match datum.constant_fiber_degree_check(&sample_points) {
        Ok(r) => r
            .orbits
            .iter()
            .filter(|o| !o.constant)
            .map(|o| o.representative.to_string())
            .collect(),
        Err(e) => vec![e.to_string()],
    };
    out.push(outcome("constant quotient degree on orbits", fails, sample_points.len()));

    let mut fails = Vec::new();
    for m in 1..=3u32 {
        for k in 1..=3u32 {
            let lhs = map.iterate(m).and_then(|a| Ok(a.to_transform().compose(&map.iterate(k)?.to_transform())));
            let rhs = map.iterate(m + k).map(|a| a.to_transform());
            if lhs != rhs {
                fails.push(format!("m={m}, k={k}"));
            }
        }
    }
    out.push(outcome("iterate composition", fails, 9));

    if map.is_expanding() {
        let pairs: Vec<([f64; 2], [f64; 2])> = (0..samples)
            .map(|_| {
                let mut c = || rng.gen_range(-10.0..10.0);
                ([c(), c()], [c(), c()])
            })
            .collect();
        let fails = match contraction_check(map, group.geometry(), &pairs, config.contraction, strategy) {
            Ok(r) if r.holds_at.is_some() => Vec::new(),
            Ok(_) => vec![format!("bound not reached by n = {}", config.contraction.n_max)],
            Err(e) => vec![e.to_string()],
        };
        out.push(outcome("inverse-iterate contraction", fails, pairs.len()));
    }

    let gamma = IntegerVector2::new(1, 1);
    let fails = match map.conjugate_translation(&gamma) {
        Ok(_) => Vec::new(),
        Err(e) => vec![e.to_string()],
    };
    out.push(outcome("conjugate translation self-check", fails, 1));

    out
}
