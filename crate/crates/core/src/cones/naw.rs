//! Weak no-arbitrage and super-hedging, each a single LP over the cell layout.
//!
//! Buy and sell variables of a cell are independent. The wealth they produce is
//! dominated by that of the net order, and disposal is free, so this relaxation
//! describes the attainable claims exactly.

use num_traits::{One, Signed, Zero};

use super::cells::CellLayout;
use super::ConeError;
use crate::lp::{solve_lp, verify_outcome, FarkasCertificate, LinearProgram, LpOutcome, Relation, Sense};
use crate::rational::Rat;
use crate::space::RandomVector;
use crate::trade::{wealth, Strategy, TradeMap};

/// A strategy from zero wealth whose terminal value is nonnegative and nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArbitrageCertificate {
    pub strategy: Strategy,
    /// `V_T(ω)` per outcome.
    pub terminal: Vec<Vec<Rat>>,
}

impl ArbitrageCertificate {
    /// Re-evaluates the strategy and checks the terminal wealth claim.
    pub fn verify(&self, map: &TradeMap) -> Result<(), String> {
        let path = wealth(map, &self.strategy).map_err(|e| e.to_string())?;
        if path.terminal() != self.terminal.as_slice() {
            return Err("recorded terminal wealth differs from re-evaluation".into());
        }
        if self.terminal.iter().flatten().any(Signed::is_negative) {
            return Err("terminal wealth has a negative entry".into());
        }
        if self.terminal.iter().flatten().all(Zero::is_zero) {
            return Err("terminal wealth is identically zero".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NawVerdict {
    /// The optimal dual of the arbitrage LP proves that its value is zero.
    NoArbitrage { proof: LpOutcome },
    Arbitrage(ArbitrageCertificate),
}

impl NawVerdict {
    pub fn is_no_arbitrage(&self) -> bool {
        matches!(self, NawVerdict::NoArbitrage { .. })
    }
}

/// `max Σ_ω p_ω Σ_k W^k(ω)` subject to `W ≥ 0` and `Σ x ≤ 1`.
pub fn naw_program(map: &TradeMap) -> (LinearProgram, CellLayout) {
    let layout = CellLayout::all_dates(map);
    let n = layout.len();
    let space = map.space();
    let mut objective = vec![Rat::zero(); n];
    let mut rows = Vec::new();
    for w in 0..space.len() {
        for k in 0..map.dim() {
            let terms = layout.wealth_terms(map, w, k);
            for (v, g) in &terms {
                objective[*v] += space.prob(w) * g;
            }
            if !terms.is_empty() {
                rows.push(terms);
            }
        }
    }
    let mut lp = LinearProgram::new(Sense::Max, objective);
    for terms in rows {
        lp.add_sparse_row(&terms, Relation::Ge, Rat::zero());
    }
    lp.add_row(vec![Rat::one(); n], Relation::Le, Rat::one());
    (lp, layout)
}

pub fn check_naw(map: &TradeMap) -> Result<NawVerdict, ConeError> {
    let (lp, layout) = naw_program(map);
    let outcome = solve_lp(&lp)?;
    verify_outcome(&lp, &outcome).map_err(|e| ConeError::InvariantViolation(e.to_string()))?;
    let LpOutcome::Optimal { x, value, .. } = &outcome else {
        return Err(ConeError::InvariantViolation("arbitrage LP is feasible and bounded".into()));
    };
    if !value.is_positive() {
        return Ok(NawVerdict::NoArbitrage { proof: outcome });
    }
    let strategy = layout.to_strategy(map, x);
    let path = wealth(map, &strategy)?;
    let peak = path.terminal().iter().flatten().max().cloned().unwrap_or_else(Rat::zero);
    if !peak.is_positive() {
        return Err(ConeError::InvariantViolation("positive LP value but no positive terminal wealth".into()));
    }
    let strategy = strategy.scaled(&peak.recip());
    let terminal = wealth(map, &strategy)?.terminal().to_vec();
    let cert = ArbitrageCertificate { strategy, terminal };
    cert.verify(map).map_err(ConeError::InvariantViolation)?;
    Ok(NawVerdict::Arbitrage(cert))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HedgeVerdict {
    /// `V_T(strategy) - disposal = g`, with `disposal ≥ 0`.
    Attainable { strategy: Strategy, disposal: Vec<Vec<Rat>> },
    NotAttainable(FarkasCertificate),
}

/// `min Σ x` subject to `W(ω) ≥ g(ω)` for all outcomes.
pub fn superhedge_program(map: &TradeMap, claim: &RandomVector) -> Result<(LinearProgram, CellLayout), ConeError> {
    let space = map.space();
    if claim.len() != space.len() || claim.dim() != map.dim() {
        return Err(ConeError::DimensionMismatch { expected: space.len() * map.dim(), found: claim.len() * claim.dim() });
    }
    let layout = CellLayout::all_dates(map);
    let mut lp = LinearProgram::new(Sense::Min, vec![Rat::one(); layout.len()]);
    for w in 0..space.len() {
        for k in 0..map.dim() {
            let terms = layout.wealth_terms(map, w, k);
            lp.add_sparse_row(&terms, Relation::Ge, claim.get(w)[k].clone());
        }
    }
    Ok((lp, layout))
}

pub fn superhedge_membership(map: &TradeMap, claim: &RandomVector) -> Result<HedgeVerdict, ConeError> {
    let (lp, layout) = superhedge_program(map, claim)?;
    let outcome = solve_lp(&lp)?;
    verify_outcome(&lp, &outcome).map_err(|e| ConeError::InvariantViolation(e.to_string()))?;
    match outcome {
        LpOutcome::Optimal { x, .. } => {
            let strategy = layout.to_strategy(map, &x);
            let terminal = wealth(map, &strategy)?.terminal().to_vec();
            let disposal: Vec<Vec<Rat>> = terminal
                .iter()
                .zip(claim.values())
                .map(|(v, g)| v.iter().zip(g).map(|(a, b)| a - b).collect())
                .collect();
            if disposal.iter().flatten().any(Signed::is_negative) {
                return Err(ConeError::InvariantViolation("net strategy fails to super-replicate".into()));
            }
            Ok(HedgeVerdict::Attainable { strategy, disposal })
        }
        LpOutcome::Infeasible(cert) => Ok(HedgeVerdict::NotAttainable(cert)),
        LpOutcome::Unbounded { .. } => Err(ConeError::InvariantViolation("hedging LP is bounded below".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::fixtures::{bin1, bin1_arb};
    use crate::lp::verify::check_farkas;
    use crate::rational::{int, rat};

    fn claim(u: Rat, d: Rat) -> RandomVector {
        RandomVector::new(vec![vec![u, Rat::zero()], vec![d, Rat::zero()]]).unwrap()
    }

    #[test]
    fn arbitrage_certificate_is_normalized() {
        let map = bin1_arb();
        let NawVerdict::Arbitrage(cert) = check_naw(&map).unwrap() else { panic!("expected an arbitrage") };
        cert.verify(&map).unwrap();
        assert_eq!(cert.terminal, vec![vec![int(1), int(0)], vec![int(0), int(0)]]);
    }

    #[test]
    fn no_arbitrage_proof_verifies() {
        let map = bin1();
        let NawVerdict::NoArbitrage { proof } = check_naw(&map).unwrap() else { panic!("unexpected arbitrage") };
        verify_outcome(&naw_program(&map).0, &proof).unwrap();
    }

    #[test]
    fn tampered_certificate_fails() {
        let map = bin1_arb();
        let NawVerdict::Arbitrage(mut cert) = check_naw(&map).unwrap() else { panic!("expected an arbitrage") };
        cert.terminal[0][0] = int(2);
        assert!(cert.verify(&map).is_err());
    }

    #[test]
    fn superhedging() {
        let map = bin1();
        for g in [claim(int(0), int(0)), claim(int(1), rat(-1, 2))] {
            let HedgeVerdict::Attainable { strategy, disposal } = superhedge_membership(&map, &g).unwrap() else { panic!("claim should be attainable") };
            let v = wealth(&map, &strategy).unwrap();
            for w in 0..2 {
                for k in 0..2 {
                    assert!(!disposal[w][k].is_negative());
                    assert_eq!(&v.terminal()[w][k] - &disposal[w][k], g.get(w)[k]);
                }
            }
        }
        let g = claim(int(1), int(1));
        let HedgeVerdict::NotAttainable(cert) = superhedge_membership(&map, &g).unwrap() else { panic!("riskless profit is not attainable") };
        check_farkas(&superhedge_program(&map, &g).unwrap().0, &cert).unwrap();
    }
}
