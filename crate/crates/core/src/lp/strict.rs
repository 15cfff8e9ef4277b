//! Homogeneous systems with strict rows, decided by maximizing a shared gap `ε`.

use num_traits::{One, Signed, Zero};

use super::program::{LinearProgram, LpError, LpOutcome, Relation, Sense};
use super::simplex::solve_lp;
use super::verify::{verify_outcome, VerifyError};
use crate::rational::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrictRelation {
    /// `a·z ≤ 0`
    Le,
    /// `a·z < 0`
    Lt,
}

/// `{ z : rows, z_j > 0 for j ∈ positive, n·z = 1 }`. Variables outside `positive`
/// are free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrictSystem {
    pub num_vars: usize,
    pub rows: Vec<(Vec<Rat>, StrictRelation)>,
    pub positive: Vec<usize>,
    pub normalization: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrictOutcome {
    Feasible { point: Vec<Rat>, gap: Rat },
    Infeasible(StrictCertificate),
}

/// The gap program together with its solved outcome: either a Farkas certificate
/// (the weak system is already empty) or an optimal dual proving `ε* ≤ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrictCertificate {
    pub outcome: LpOutcome,
}

impl StrictCertificate {
    pub fn gap(&self) -> Option<&Rat> {
        self.outcome.value()
    }

    pub fn verify(&self, system: &StrictSystem) -> Result<(), VerifyError> {
        verify_outcome(&system.gap_program(), &self.outcome)?;
        match self.outcome.value() {
            Some(v) if v.is_positive() => Err(VerifyError("gap is positive".into())),
            _ => Ok(()),
        }
    }
}

impl StrictSystem {
    pub fn new(num_vars: usize, normalization: Vec<Rat>) -> Self {
        StrictSystem { num_vars, rows: Vec::new(), positive: Vec::new(), normalization }
    }

    pub fn add_row(&mut self, coeffs: Vec<Rat>, rel: StrictRelation) {
        self.rows.push((coeffs, rel));
    }

    /// The LP over `(z, ε)` with `ε ≤ 1` that [`strict_feasibility`] maximizes.
    pub fn gap_program(&self) -> LinearProgram {
        let n = self.num_vars;
        let eps = n;
        let mut objective = vec![Rat::zero(); n + 1];
        objective[eps] = Rat::one();
        let mut lp = LinearProgram::new(Sense::Max, objective);
        for j in 0..=n {
            lp.set_free(j);
        }
        lp.set_bounds(eps, None, Some(Rat::one()));
        for (coeffs, rel) in &self.rows {
            let mut row = coeffs.clone();
            row.push(match rel {
                StrictRelation::Le => Rat::zero(),
                StrictRelation::Lt => Rat::one(),
            });
            lp.add_row(row, Relation::Le, Rat::zero());
        }
        for &j in &self.positive {
            let mut row = vec![Rat::zero(); n + 1];
            row[j] = Rat::one();
            row[eps] = -Rat::one();
            lp.add_row(row, Relation::Ge, Rat::zero());
        }
        let mut norm = self.normalization.clone();
        norm.push(Rat::zero());
        lp.add_row(norm, Relation::Eq, Rat::one());
        lp
    }
}

pub fn strict_feasibility(system: &StrictSystem) -> Result<StrictOutcome, LpError> {
    if system.normalization.len() != system.num_vars
        || system.rows.iter().any(|(r, _)| r.len() != system.num_vars)
        || system.positive.iter().any(|&j| j >= system.num_vars)
    {
        return Err(LpError::MalformedProgram("strict system dimensions disagree".into()));
    }
    let lp = system.gap_program();
    let outcome = solve_lp(&lp)?;
    match &outcome {
        LpOutcome::Optimal { x, value, .. } if value.is_positive() => Ok(StrictOutcome::Feasible {
            point: x[..system.num_vars].to_vec(),
            gap: value.clone(),
        }),
        LpOutcome::Unbounded { .. } => unreachable!("ε is capped at 1 and appears only in the objective"),
        _ => Ok(StrictOutcome::Infeasible(StrictCertificate { outcome })),
    }
}
