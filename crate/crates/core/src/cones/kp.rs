//! Sampled test of the key property: if `V_T(F(η)) + V_T(F(η̃)) ≥ 0` then the
//! sum is zero and every increment of `F(η)` lies in `N⁰`.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::classify::frictionality_classify;
use super::n0::n0_membership_with;
use super::{Budget, ConeError};
use crate::rational::Rat;
use crate::space::RandomVector;
use crate::trade::sample::random_strategy;
use crate::trade::{wealth, Strategy, TradeMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KpViolation {
    pub eta: Strategy,
    pub eta_tilde: Strategy,
    /// `V_T(F(η)) + V_T(F(η̃))`.
    pub sum: Vec<Vec<Rat>>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KpVerdict {
    /// `triggered` counts the pairs whose terminal sum was nonnegative.
    Consistent { samples: usize, triggered: usize },
    Violation(Box<KpViolation>),
}

impl KpVerdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, KpVerdict::Consistent { .. })
    }
}

/// Checks one pair. `Ok(None)` when the premise fails or the conclusion holds.
pub fn kp_check_pair(map: &TradeMap, eta: &Strategy, eta_tilde: &Strategy, budget: &mut Budget) -> Result<Option<KpViolation>, ConeError> {
    let a = wealth(map, eta)?;
    let b = wealth(map, eta_tilde)?;
    let sum: Vec<Vec<Rat>> = a.terminal().iter().zip(b.terminal()).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect()).collect();
    if sum.iter().flatten().any(Signed::is_negative) {
        return Ok(None);
    }
    let violation = |reason: String| KpViolation { eta: eta.clone(), eta_tilde: eta_tilde.clone(), sum: sum.clone(), reason };
    if sum.iter().flatten().any(|x| !x.is_zero()) {
        return Ok(Some(violation("terminal sum is nonnegative and nonzero".into())));
    }
    let classes = frictionality_classify(map);
    for t in map.filtration().dates() {
        let xi = RandomVector::new(a.increments[t].clone()).map_err(|e| ConeError::InvariantViolation(e.to_string()))?;
        if !n0_membership_with(map, &classes, t, &xi, budget)?.is_yes() {
            return Ok(Some(violation(format!("increment at date {t} is not reversible"))));
        }
    }
    Ok(None)
}

fn feasible(map: &TradeMap, s: &Strategy) -> bool {
    s.values().iter().flatten().all(|m| map.check_sign_feasible(m).is_ok())
}

/// Samples `n` pairs. The second strategy is the negation of the first, zero,
/// or independent, each a third of the time, since independent pairs almost
/// never meet the premise.
pub fn kp_sample_test(map: &TradeMap, n: usize, seed: u64, budget: &mut Budget) -> Result<KpVerdict, ConeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = map.filtration();
    let mut triggered = 0;
    for _ in 0..n {
        let eta = random_strategy(&mut rng, map);
        let eta_tilde = match rng.gen_range(0..3) {
            0 if feasible(map, &eta.negated()) => eta.negated(),
            0 => Strategy::zero(f, map.dim()),
            1 => Strategy::zero(f, map.dim()),
            _ => random_strategy(&mut rng, map),
        };
        let a = wealth(map, &eta)?;
        let b = wealth(map, &eta_tilde)?;
        let nonneg = a.terminal().iter().zip(b.terminal()).all(|(x, y)| x.iter().zip(y).all(|(p, q)| !(p + q).is_negative()));
        if !nonneg {
            continue;
        }
        triggered += 1;
        if let Some(v) = kp_check_pair(map, &eta, &eta_tilde, budget)? {
            return Ok(KpVerdict::Violation(Box::new(v)));
        }
    }
    Ok(KpVerdict::Consistent { samples: n, triggered })
}
