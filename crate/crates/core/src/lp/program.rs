use num_traits::Zero;
use thiserror::Error;

use crate::rational::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rel: Relation,
    pub rhs: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("malformed program: {0}")]
    MalformedProgram(String),
}

/// `sense c·x` subject to row constraints and per-variable bounds.
///
/// Variables created by [`LinearProgram::new`] default to `x ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rat>,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<Option<Rat>>,
    pub upper: Vec<Option<Rat>>,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<Rat>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            constraints: Vec::new(),
            lower: vec![Some(Rat::zero()); n],
            upper: vec![None; n],
        }
    }

    /// Pure feasibility problem on `n` nonnegative variables.
    pub fn feasibility(n: usize) -> Self {
        LinearProgram::new(Sense::Max, vec![Rat::zero(); n])
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.constraints.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<Rat>, rel: Relation, rhs: Rat) -> usize {
        self.constraints.push(Constraint { coeffs, rel, rhs });
        self.constraints.len() - 1
    }

    /// Adds a row given as `(variable, coefficient)` terms; repeated variables accumulate.
    pub fn add_sparse_row(&mut self, terms: &[(usize, Rat)], rel: Relation, rhs: Rat) -> usize {
        let mut coeffs = vec![Rat::zero(); self.num_vars()];
        for (j, a) in terms {
            coeffs[*j] += a;
        }
        self.add_row(coeffs, rel, rhs)
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<Rat>, upper: Option<Rat>) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn set_free(&mut self, var: usize) {
        self.set_bounds(var, None, None);
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::MalformedProgram(format!(
                "{} variables but {} lower / {} upper bounds",
                n,
                self.lower.len(),
                self.upper.len()
            )));
        }
        for (r, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::MalformedProgram(format!(
                    "row {r} has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[Rat]) -> Rat {
        crate::rational::dot(&self.objective, x)
    }

    pub fn row_value(&self, r: usize, x: &[Rat]) -> Rat {
        crate::rational::dot(&self.constraints[r].coeffs, x)
    }

    /// Plain-text rendering used by the tableau dump.
    pub fn render(&self) -> String {
        use crate::rational::fmt_rat;
        let mut out = String::new();
        let sense = match self.sense {
            Sense::Max => "max",
            Sense::Min => "min",
        };
        let obj: Vec<String> = self.objective.iter().map(fmt_rat).collect();
        out.push_str(&format!("{sense} [{}]\n", obj.join(" ")));
        for c in &self.constraints {
            let row: Vec<String> = c.coeffs.iter().map(fmt_rat).collect();
            let rel = match c.rel {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            out.push_str(&format!("  [{}] {rel} {}\n", row.join(" "), fmt_rat(&c.rhs)));
        }
        for j in 0..self.num_vars() {
            let lo = self.lower[j].as_ref().map(fmt_rat).unwrap_or_else(|| "-inf".into());
            let hi = self.upper[j].as_ref().map(fmt_rat).unwrap_or_else(|| "+inf".into());
            out.push_str(&format!("  x{j} in [{lo}, {hi}]\n"));
        }
        out
    }
}

/// Dual multipliers proving that no `x` satisfies the rows and bounds.
///
/// Sign convention: `≤` rows carry `m ≥ 0`, `≥` rows carry `m ≤ 0`, equality rows are
/// free. Every feasible `x` then satisfies `(Aᵀm)·x ≤ m·b`, while the minimum of
/// `(Aᵀm)·x` over the variable bounds exceeds `m·b`. When the bounds alone are
/// contradictory (`lower > upper`), `bound_conflict` names the variable instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rat>,
    pub bound_conflict: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    /// Duals follow the convention of [`FarkasCertificate`] for maximization and the
    /// opposite signs for minimization.
    Optimal { x: Vec<Rat>, duals: Vec<Rat>, value: Rat },
    Unbounded { x: Vec<Rat>, ray: Vec<Rat> },
    Infeasible(FarkasCertificate),
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible(_))
    }

    pub fn value(&self) -> Option<&Rat> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&[Rat]> {
        match self {
            LpOutcome::Optimal { x, .. } | LpOutcome::Unbounded { x, .. } => Some(x),
            LpOutcome::Infeasible(_) => None,
        }
    }
}
