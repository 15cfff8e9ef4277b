//! Consistent price systems: strictly positive `Z` whose conditional pairings with
//! every admissible generator are nonpositive, and negative wherever the pair is
//! not reversible on the atom.

use num_traits::{One, Signed, Zero};

use super::classify::{frictionality_classify, Classification};
use super::ConeError;
use crate::lp::{strict_feasibility, StrictCertificate, StrictOutcome, StrictRelation, StrictSystem};
use crate::rational::Rat;
use crate::space::{optional_projection, AdaptedProcess, RandomVector};
use crate::trade::{Sign, TradeMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PricingKernel {
    pub z: RandomVector,
    /// `Z̄_t = E[Z | H_t]` under the reference measure.
    pub zbar: AdaptedProcess,
    /// The certified gap `ε*` of the strict-feasibility solve.
    pub gap: Rat,
}

impl PricingKernel {
    pub fn from_z(map: &TradeMap, z: RandomVector, gap: Rat) -> Result<Self, ConeError> {
        let f = map.filtration();
        if z.len() != f.space().len() || z.dim() != map.dim() {
            return Err(ConeError::DimensionMismatch { expected: f.space().len() * map.dim(), found: z.len() * z.dim() });
        }
        let xs = vec![z.clone(); f.horizon() + 1];
        let zbar = optional_projection(&xs, f, f.space()).map_err(|e| ConeError::KernelMismatch(e.to_string()))?;
        Ok(PricingKernel { z, zbar, gap })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CpsVerdict {
    Found(PricingKernel),
    NotFound(StrictCertificate),
}

impl CpsVerdict {
    pub fn kernel(&self) -> Option<&PricingKernel> {
        match self {
            CpsVerdict::Found(k) => Some(k),
            CpsVerdict::NotFound(_) => None,
        }
    }
}

/// Strict system over `Z^k(ω)` (variable `ω·d + k`).
pub fn cps_system(map: &TradeMap, classes: &Classification) -> StrictSystem {
    let f = map.filtration();
    let d = map.dim();
    let n = f.space().len();
    let mut sys = StrictSystem::new(n * d, vec![Rat::one(); n * d]);
    sys.positive = (0..n * d).collect();
    for t in f.dates() {
        for (a, atom) in f.atoms(t).iter().enumerate() {
            for p in 0..map.num_pairs() {
                let strict = classes.get(t, a, p).is_strict();
                for sign in Sign::BOTH {
                    if !map.cone().allowed(p, sign) {
                        continue;
                    }
                    let mut row = vec![Rat::zero(); n * d];
                    for &w in atom {
                        for (k, g) in map.generator(t, w, p, sign).iter().enumerate() {
                            if !g.is_zero() {
                                row[w * d + k] = f.space().prob(w) * g;
                            }
                        }
                    }
                    if row.iter().all(Zero::is_zero) && !strict {
                        continue;
                    }
                    sys.add_row(row, if strict { StrictRelation::Lt } else { StrictRelation::Le });
                }
            }
        }
    }
    sys
}

pub fn find_cps(map: &TradeMap) -> Result<CpsVerdict, ConeError> {
    let classes = frictionality_classify(map);
    let sys = cps_system(map, &classes);
    match strict_feasibility(&sys)? {
        StrictOutcome::Feasible { point, gap } => {
            let d = map.dim();
            let z = RandomVector::new(point.chunks(d).map(<[Rat]>::to_vec).collect())
                .map_err(|e| ConeError::InvariantViolation(e.to_string()))?;
            let kernel = PricingKernel::from_z(map, z, gap)?;
            let report = verify_cps(map, &kernel.z)?;
            if !report.is_valid() {
                return Err(ConeError::InvariantViolation(format!(
                    "kernel from the strict solve fails {} rows",
                    report.discrepancies()
                )));
            }
            Ok(CpsVerdict::Found(kernel))
        }
        StrictOutcome::Infeasible(cert) => {
            cert.verify(&sys).map_err(|e| ConeError::InvariantViolation(e.to_string()))?;
            Ok(CpsVerdict::NotFound(cert))
        }
    }
}

/// One dual row: the conditional pairing of `Z` with one admissible generator on one atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CpsRow {
    pub t: usize,
    pub atom: usize,
    pub pair: usize,
    pub sign: Sign,
    /// `F̄ = E[Z · F(±e) | H_t]` on the atom.
    pub value: Rat,
    /// `Z̄ · F̂` computed through the projected generator.
    pub projected_pairing: Rat,
    pub strict_required: bool,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CpsReport {
    pub rows: Vec<CpsRow>,
    pub positive: bool,
}

impl CpsReport {
    pub fn discrepancies(&self) -> usize {
        self.rows.iter().filter(|r| !r.passes).count() + usize::from(!self.positive)
    }

    pub fn is_valid(&self) -> bool {
        self.discrepancies() == 0
    }
}

/// Conditional pairing `E[Z·g | A]` and the projected form `Z̄·F̂` on one atom.
pub(crate) fn atom_pairing(map: &TradeMap, z: &RandomVector, t: usize, atom: &[usize], pair: usize, sign: Sign) -> (Rat, Rat) {
    let space = map.space();
    let d = map.dim();
    let mass: Rat = atom.iter().map(|&w| space.prob(w)).sum();
    let mut zbar = vec![Rat::zero(); d];
    let mut weighted = vec![Rat::zero(); d];
    for &w in atom {
        let g = map.generator(t, w, pair, sign);
        for k in 0..d {
            let pz = space.prob(w) * &z.get(w)[k];
            weighted[k] += &pz * &g[k];
            zbar[k] += pz;
        }
    }
    let value: Rat = weighted.iter().sum::<Rat>() / &mass;
    let projected: Rat = (0..d)
        .map(|k| {
            let zb = &zbar[k] / &mass;
            let fhat = &weighted[k] / &zbar[k];
            zb * fhat
        })
        .sum();
    (value, projected)
}

pub fn verify_cps(map: &TradeMap, z: &RandomVector) -> Result<CpsReport, ConeError> {
    let f = map.filtration();
    if z.len() != f.space().len() || z.dim() != map.dim() {
        return Err(ConeError::DimensionMismatch { expected: f.space().len() * map.dim(), found: z.len() * z.dim() });
    }
    let positive = z.values().iter().flatten().all(Signed::is_positive);
    if !positive {
        return Ok(CpsReport { rows: Vec::new(), positive });
    }
    let classes = frictionality_classify(map);
    let mut rows = Vec::new();
    for t in f.dates() {
        for (a, atom) in f.atoms(t).iter().enumerate() {
            for p in 0..map.num_pairs() {
                let strict = classes.get(t, a, p).is_strict();
                for sign in Sign::BOTH {
                    if !map.cone().allowed(p, sign) {
                        continue;
                    }
                    let (value, projected_pairing) = atom_pairing(map, z, t, atom, p, sign);
                    let passes = !value.is_positive() && (!strict || value.is_negative()) && projected_pairing == value;
                    rows.push(CpsRow { t, atom: a, pair: p, sign, value, projected_pairing, strict_required: strict, passes });
                }
            }
        }
    }
    Ok(CpsReport { rows, positive })
}
