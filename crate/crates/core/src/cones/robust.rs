//! The dominating map `G` built from a consistent price system, and the robust
//! no-arbitrage check it certifies.
//!
//! With `δ^± = -E[Z·F(±e) | H_t]` on each atom,
//!
//! ```text
//! G^k(e)  = min(F^k(e)  + δ⁺/(d Z̄^k), -F^k(-e))
//! G^k(-e) = min(F^k(-e) + δ⁻/(d Z̄^k), -G^k(e))
//! ```
//!
//! where a cap whose direction is not admissible is dropped. Each direction
//! raises `E[Z·G | H_t]` by at most `δ`, so `Z` still prices `G` and `G` has no
//! weak arbitrage.

use num_traits::{Signed, Zero};

use super::classify::frictionality_classify;
use super::cps::{atom_pairing, find_cps, verify_cps, CpsVerdict, PricingKernel};
use super::naw::{check_naw, NawVerdict};
use super::ConeError;
use crate::lp::{LpOutcome, StrictCertificate};
use crate::rational::Rat;
use crate::trade::{Sign, TradeMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobustPerturbation {
    pub g: TradeMap,
    /// `δ⁺[t][atom][pair]`.
    pub delta_plus: Vec<Vec<Vec<Rat>>>,
    pub delta_minus: Vec<Vec<Vec<Rat>>>,
}

pub fn build_robust_perturbation(map: &TradeMap, kernel: &PricingKernel) -> Result<RobustPerturbation, ConeError> {
    let report = verify_cps(map, &kernel.z)?;
    if !report.is_valid() {
        return Err(ConeError::KernelMismatch(format!("{} dual rows fail for this map", report.discrepancies())));
    }
    let f = map.filtration();
    let d = map.dim();
    let dr = Rat::from_integer(d.into());
    let cone = map.cone();
    let mut plus = map.table(Sign::Plus).clone();
    let mut minus = map.table(Sign::Minus).clone();
    let mut delta_plus = Vec::new();
    let mut delta_minus = Vec::new();
    for t in f.dates() {
        let mut dp_t = Vec::new();
        let mut dm_t = Vec::new();
        for (a, atom) in f.atoms(t).iter().enumerate() {
            let zbar = kernel.zbar.value(t, a);
            let mut dp_a = Vec::new();
            let mut dm_a = Vec::new();
            for p in 0..map.num_pairs() {
                let (up, um) = (cone.allowed(p, Sign::Plus), cone.allowed(p, Sign::Minus));
                let dp = if up { -atom_pairing(map, &kernel.z, t, atom, p, Sign::Plus).0 } else { Rat::zero() };
                let dm = if um { -atom_pairing(map, &kernel.z, t, atom, p, Sign::Minus).0 } else { Rat::zero() };
                if dp.is_negative() || dm.is_negative() {
                    return Err(ConeError::InvariantViolation(format!("negative δ at date {t}, atom {a}, pair {p}")));
                }
                for &w in atom {
                    let fp = map.generator(t, w, p, Sign::Plus);
                    let fm = map.generator(t, w, p, Sign::Minus);
                    for k in 0..d {
                        let scale = &dr * &zbar[k];
                        if up {
                            let mut v = &fp[k] + &dp / &scale;
                            if um {
                                let cap = -fm[k].clone();
                                if cap < v {
                                    v = cap;
                                }
                            }
                            plus[t][w][p][k] = v;
                        }
                        if um {
                            let mut v = &fm[k] + &dm / &scale;
                            if up {
                                let cap = -plus[t][w][p][k].clone();
                                if cap < v {
                                    v = cap;
                                }
                            }
                            minus[t][w][p][k] = v;
                        }
                    }
                }
                dp_a.push(dp);
                dm_a.push(dm);
            }
            dp_t.push(dp_a);
            dm_t.push(dm_a);
        }
        delta_plus.push(dp_t);
        delta_minus.push(dm_t);
    }
    let g = TradeMap::new(f.clone(), cone.clone(), plus, minus)?;
    Ok(RobustPerturbation { g, delta_plus, delta_minus })
}

/// Componentwise dominance of `G` over `F` and strict improvement on the cells
/// that are not reversible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceReport {
    pub violations: Vec<String>,
    /// Signed cells on Frictional or OneSidedActive pairs.
    pub strict_cells: usize,
    pub improved_cells: usize,
}

impl DominanceReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty() && self.strict_cells == self.improved_cells
    }
}

pub fn dominance_report(f_map: &TradeMap, g_map: &TradeMap) -> Result<DominanceReport, ConeError> {
    if f_map.filtration() != g_map.filtration() || f_map.cone() != g_map.cone() {
        return Err(ConeError::KernelMismatch("maps live on different filtrations or cones".into()));
    }
    let f = f_map.filtration();
    let classes = frictionality_classify(f_map);
    let mut violations = Vec::new();
    let mut strict_cells = 0;
    let mut improved_cells = 0;
    for t in f.dates() {
        for (a, atom) in f.atoms(t).iter().enumerate() {
            for p in 0..f_map.num_pairs() {
                let class = classes.get(t, a, p);
                for sign in Sign::BOTH {
                    if !f_map.cone().allowed(p, sign) {
                        continue;
                    }
                    let mut improved = false;
                    for &w in atom {
                        let gf = f_map.generator(t, w, p, sign);
                        let gg = g_map.generator(t, w, p, sign);
                        for k in 0..f_map.dim() {
                            if gg[k] < gf[k] {
                                violations.push(format!("G below F at date {t}, outcome {w}, pair {p}{}, component {k}", sign.symbol()));
                            }
                            improved |= gg[k] > gf[k];
                        }
                    }
                    if class.is_strict() {
                        strict_cells += 1;
                        improved_cells += usize::from(improved);
                    }
                }
            }
        }
    }
    Ok(DominanceReport { violations, strict_cells, improved_cells })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NarVerdict {
    Holds { kernel: PricingKernel, perturbation: Box<RobustPerturbation>, naw_proof: LpOutcome },
    /// No consistent price system exists. This refutes robust no-arbitrage when HN⁰ holds.
    Fails { certificate: StrictCertificate },
}

impl NarVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, NarVerdict::Holds { .. })
    }
}

pub fn check_nar(map: &TradeMap) -> Result<NarVerdict, ConeError> {
    let kernel = match find_cps(map)? {
        CpsVerdict::Found(k) => k,
        CpsVerdict::NotFound(certificate) => return Ok(NarVerdict::Fails { certificate }),
    };
    let perturbation = build_robust_perturbation(map, &kernel)?;
    let dominance = dominance_report(map, &perturbation.g)?;
    if !dominance.is_valid() {
        return Err(ConeError::InvariantViolation(format!(
            "perturbation fails dominance: {} violations, {}/{} strict cells improved",
            dominance.violations.len(),
            dominance.improved_cells,
            dominance.strict_cells
        )));
    }
    match check_naw(&perturbation.g)? {
        NawVerdict::NoArbitrage { proof } => Ok(NarVerdict::Holds { kernel, perturbation: Box::new(perturbation), naw_proof: proof }),
        NawVerdict::Arbitrage(_) => Err(ConeError::InvariantViolation("perturbed map admits a weak arbitrage".into())),
    }
}
