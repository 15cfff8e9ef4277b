//! Checks of the axioms a trade map is expected to satisfy: positive
//! homogeneity and superadditivity by sampling, and the reversibility
//! hypothesis on `N⁰` structurally for the named models or by sampling.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::cone::{pairs, Sign};
use super::map::{OrderMatrix, TradeMap};
use super::markets::{MarketData, MarketKind};
use super::sample::{random_magnitude, random_order};
use crate::cones::n0::n0_membership;
use crate::cones::{Budget, ConeError, N0Membership};
use crate::rational::Rat;
use crate::space::{Filtration, RandomVector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomViolation {
    pub axiom: &'static str,
    pub t: usize,
    pub outcome: usize,
    pub a: OrderMatrix,
    pub b: OrderMatrix,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub samples: usize,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn add(a: &OrderMatrix, b: &OrderMatrix) -> OrderMatrix {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect()).collect()
}

fn scale(a: &OrderMatrix, s: &Rat) -> OrderMatrix {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

/// Superadditivity slack predicted from the generators: cells where `a` and `b`
/// have opposite signs lose `min(|a|, |b|)·(-(F(e) + F(-e)))`.
pub fn predicted_gap(map: &TradeMap, t: usize, w: usize, a: &OrderMatrix, b: &OrderMatrix) -> Vec<Rat> {
    let d = map.dim();
    let mut gap = vec![Rat::zero(); d];
    for (p, (i, j)) in pairs(d).into_iter().enumerate() {
        let (x, y) = (&a[i][j], &b[i][j]);
        if !(x.is_positive() && y.is_negative() || x.is_negative() && y.is_positive()) {
            continue;
        }
        let m = if x.abs() < y.abs() { x.abs() } else { y.abs() };
        let gp = map.generator(t, w, p, Sign::Plus);
        let gm = map.generator(t, w, p, Sign::Minus);
        for k in 0..d {
            gap[k] -= &m * (&gp[k] + &gm[k]);
        }
    }
    gap
}

/// Samples orders and checks `F(λa) = λF(a)` and `F(a+b) - F(a) - F(b) ≥ 0`,
/// the latter also against the generator-level prediction.
pub fn validate_axioms(map: &TradeMap, samples: usize, seed: u64) -> AxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = map.filtration();
    let n = f.space().len();
    let mut violations = Vec::new();
    for _ in 0..samples {
        let t = rng.gen_range(0..=f.horizon());
        let w = rng.gen_range(0..n);
        let a = random_order(&mut rng, map);
        let b = random_order(&mut rng, map);
        let lambda = random_magnitude(&mut rng);
        let eval = |m: &OrderMatrix| map.evaluate(t, w, m).expect("sampled orders are sign-feasible");
        let fa = eval(&a);
        let scaled: Vec<Rat> = fa.iter().map(|x| x * &lambda).collect();
        if eval(&scale(&a, &lambda)) != scaled {
            violations.push(AxiomViolation { axiom: "HF1", t, outcome: w, a: a.clone(), b: b.clone(), detail: "F(λa) differs from λF(a)".into() });
        }
        let fb = eval(&b);
        let fab = eval(&add(&a, &b));
        let gap: Vec<Rat> = (0..map.dim()).map(|k| &fab[k] - &fa[k] - &fb[k]).collect();
        if gap.iter().any(Signed::is_negative) {
            violations.push(AxiomViolation { axiom: "HF2", t, outcome: w, a: a.clone(), b: b.clone(), detail: "negative superadditivity gap".into() });
        } else if gap != predicted_gap(map, t, w, &a, &b) {
            violations.push(AxiomViolation { axiom: "HF2", t, outcome: w, a, b, detail: "gap differs from the generator prediction".into() });
        }
    }
    AxiomReport { samples, violations }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hn0Verdict {
    Holds(String),
    Unknown(String),
}

impl Hn0Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Hn0Verdict::Holds(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Hn0Error {
    #[error("no structural criterion for market kind {0}")]
    UnknownKind(String),
}

/// Sufficient conditions for HN⁰ in the named models.
pub fn check_hn0_structural(kind: MarketKind, data: Option<&MarketData>, filtration: &Filtration) -> Result<Hn0Verdict, Hn0Error> {
    match (kind, data) {
        (MarketKind::Security, _) => Ok(Hn0Verdict::Holds("security market with valid spreads".into())),
        (MarketKind::Currency1, Some(MarketData::Currency1 { lambda, .. })) => Ok(currency1_symmetric(lambda)),
        (MarketKind::Currency2, Some(MarketData::Currency2 { lambda, .. })) => Ok(currency2_efficient(lambda, filtration)),
        (k, _) => Err(Hn0Error::UnknownKind(k.name().into())),
    }
}

fn currency1_symmetric(lambda: &[Vec<OrderMatrix>]) -> Hn0Verdict {
    for (t, slice) in lambda.iter().enumerate() {
        for (w, l) in slice.iter().enumerate() {
            for (i, j) in pairs(l.len()) {
                if l[i][j].is_positive() != l[j][i].is_positive() {
                    return Hn0Verdict::Unknown(format!("cost support is asymmetric for ({i},{j}) at date {t}, outcome {w}"));
                }
            }
        }
    }
    Hn0Verdict::Holds("cost supports are symmetric".into())
}

fn triangle_and_positive(l: &OrderMatrix) -> bool {
    let d = l.len();
    let one = Rat::one();
    for (i, j) in pairs(d) {
        if !(&l[i][j] + &l[j][i]).is_positive() {
            return false;
        }
        for k in 0..d {
            if k != i && k != j && (&one + &l[i][j]) > (&one + &l[i][k]) * (&one + &l[k][j]) {
                return false;
            }
        }
    }
    true
}

fn currency2_efficient(lambda: &[Vec<OrderMatrix>], filtration: &Filtration) -> Hn0Verdict {
    for t in filtration.dates() {
        for (a, atom) in filtration.atoms(t).iter().enumerate() {
            if !atom.iter().any(|&w| triangle_and_positive(&lambda[t][w])) {
                return Hn0Verdict::Unknown(format!("no outcome of atom {a} at date {t} meets the triangle and positivity conditions"));
            }
        }
    }
    Hn0Verdict::Holds("every atom has an outcome with triangle costs and positive round trips, so N⁰ = {0}".into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hn0Sample {
    NoCounterexample { samples: usize, in_n0: usize },
    /// `F_t(eta) ∈ N⁰_t` but `-eta` is not admissible or `F_t(-eta) ≠ -F_t(eta)`.
    Counterexample { t: usize, eta: Vec<OrderMatrix>, reason: String },
}

/// Samples `H_t`-measurable orders and tests HN⁰ on those that land in `N⁰_t`.
pub fn check_hn0_sampled(map: &TradeMap, samples: usize, seed: u64, budget: &mut Budget) -> Result<Hn0Sample, ConeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = map.filtration();
    let mut in_n0 = 0;
    for _ in 0..samples {
        let t = rng.gen_range(0..=f.horizon());
        let eta: Vec<OrderMatrix> = f.atoms(t).iter().map(|_| random_order(&mut rng, map)).collect();
        let values: Vec<Vec<Rat>> =
            (0..f.space().len()).map(|w| map.evaluate(t, w, &eta[f.atom_of(t, w)])).collect::<Result<_, _>>()?;
        let v = RandomVector::new(values.clone()).map_err(|e| ConeError::InvariantViolation(e.to_string()))?;
        if let N0Membership::No = n0_membership(map, t, &v, budget)? {
            continue;
        }
        in_n0 += 1;
        for (w, fv) in values.iter().enumerate() {
            let neg = scale(&eta[f.atom_of(t, w)], &-Rat::one());
            let reason = match map.evaluate(t, w, &neg) {
                Err(_) => Some("the reversed order is not admissible".to_string()),
                Ok(back) if back.iter().zip(fv).any(|(x, y)| !(x + y).is_zero()) => {
                    Some(format!("F(-η) differs from -F(η) at outcome {w}"))
                }
                Ok(_) => None,
            };
            if let Some(reason) = reason {
                return Ok(Hn0Sample::Counterexample { t, eta, reason });
            }
        }
    }
    Ok(Hn0Sample::NoCounterexample { samples, in_n0 })
}
