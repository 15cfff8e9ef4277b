//! Certificate checks that only read the constraint data, never the solver state.

use num_traits::{Signed, Zero};
use thiserror::Error;

use super::program::{FarkasCertificate, LinearProgram, LpOutcome, Relation, Sense};
use crate::rational::{dot, fmt_rat, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("certificate rejected: {0}")]
pub struct VerifyError(pub String);

fn fail<T>(msg: impl Into<String>) -> Result<T, VerifyError> {
    Err(VerifyError(msg.into()))
}

pub fn check_feasible(lp: &LinearProgram, x: &[Rat]) -> Result<(), VerifyError> {
    if x.len() != lp.num_vars() {
        return fail(format!("point has {} entries, program has {} variables", x.len(), lp.num_vars()));
    }
    for (j, v) in x.iter().enumerate() {
        if lp.lower[j].as_ref().is_some_and(|l| v < l) {
            return fail(format!("x{j} = {} below its lower bound", fmt_rat(v)));
        }
        if lp.upper[j].as_ref().is_some_and(|u| v > u) {
            return fail(format!("x{j} = {} above its upper bound", fmt_rat(v)));
        }
    }
    for (r, c) in lp.constraints.iter().enumerate() {
        let lhs = dot(&c.coeffs, x);
        let ok = match c.rel {
            Relation::Le => lhs <= c.rhs,
            Relation::Ge => lhs >= c.rhs,
            Relation::Eq => lhs == c.rhs,
        };
        if !ok {
            return fail(format!("row {r} violated: lhs {} vs rhs {}", fmt_rat(&lhs), fmt_rat(&c.rhs)));
        }
    }
    Ok(())
}

/// `Aᵀm` for row multipliers `m`.
fn transpose_times(lp: &LinearProgram, m: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); lp.num_vars()];
    for (c, mr) in lp.constraints.iter().zip(m) {
        if mr.is_zero() {
            continue;
        }
        for (o, a) in out.iter_mut().zip(&c.coeffs) {
            if !a.is_zero() {
                *o += mr * a;
            }
        }
    }
    out
}

/// Multipliers must be `≥ 0` on `≤` rows and `≤ 0` on `≥` rows.
fn check_multiplier_signs(lp: &LinearProgram, m: &[Rat]) -> Result<(), VerifyError> {
    if m.len() != lp.num_rows() {
        return fail(format!("{} multipliers for {} rows", m.len(), lp.num_rows()));
    }
    for (r, (c, mr)) in lp.constraints.iter().zip(m).enumerate() {
        let ok = match c.rel {
            Relation::Le => !mr.is_negative(),
            Relation::Ge => !mr.is_positive(),
            Relation::Eq => true,
        };
        if !ok {
            return fail(format!("multiplier {} on row {r} has the wrong sign", fmt_rat(mr)));
        }
    }
    Ok(())
}

pub fn check_farkas(lp: &LinearProgram, cert: &FarkasCertificate) -> Result<(), VerifyError> {
    if let Some(j) = cert.bound_conflict {
        return match (lp.lower.get(j), lp.upper.get(j)) {
            (Some(Some(l)), Some(Some(u))) if l > u => Ok(()),
            _ => fail(format!("variable {j} has no conflicting bounds")),
        };
    }
    check_multiplier_signs(lp, &cert.multipliers)?;
    let combo = transpose_times(lp, &cert.multipliers);
    let mut box_min = Rat::zero();
    for (j, a) in combo.iter().enumerate() {
        if a.is_positive() {
            match &lp.lower[j] {
                Some(l) => box_min += a * l,
                None => return fail(format!("combined coefficient on x{j} is unbounded below")),
            }
        } else if a.is_negative() {
            match &lp.upper[j] {
                Some(u) => box_min += a * u,
                None => return fail(format!("combined coefficient on x{j} is unbounded below")),
            }
        }
    }
    let mb: Rat = lp.constraints.iter().zip(&cert.multipliers).map(|(c, m)| m * &c.rhs).sum();
    if box_min > mb {
        Ok(())
    } else {
        fail(format!("combination gives {} ≤ {}, no contradiction", fmt_rat(&box_min), fmt_rat(&mb)))
    }
}

fn check_optimal(lp: &LinearProgram, x: &[Rat], duals: &[Rat], value: &Rat) -> Result<(), VerifyError> {
    check_feasible(lp, x)?;
    if lp.objective_value(x) != *value {
        return fail("reported value differs from c·x");
    }
    // Work in maximization form.
    let (c, m): (Vec<Rat>, Vec<Rat>) = match lp.sense {
        Sense::Max => (lp.objective.clone(), duals.to_vec()),
        Sense::Min => (lp.objective.iter().map(|v| -v).collect(), duals.iter().map(|v| -v).collect()),
    };
    check_multiplier_signs(lp, &m)?;
    for (r, mr) in m.iter().enumerate() {
        if !mr.is_zero() && lp.row_value(r, x) != lp.constraints[r].rhs {
            return fail(format!("row {r} has a nonzero dual but is slack"));
        }
    }
    let at = transpose_times(lp, &m);
    let mut dual_value: Rat = lp.constraints.iter().zip(&m).map(|(c, mr)| mr * &c.rhs).sum();
    for j in 0..lp.num_vars() {
        let r = &c[j] - &at[j];
        if r.is_positive() {
            if lp.upper[j].as_ref() != Some(&x[j]) {
                return fail(format!("x{j} could still increase (reduced cost {})", fmt_rat(&r)));
            }
        } else if r.is_negative() && lp.lower[j].as_ref() != Some(&x[j]) {
            return fail(format!("x{j} could still decrease (reduced cost {})", fmt_rat(&r)));
        }
        dual_value += &r * &x[j];
    }
    let primal: Rat = dot(&c, x);
    if dual_value != primal {
        return fail("primal and dual objective values differ");
    }
    Ok(())
}

fn check_unbounded(lp: &LinearProgram, x: &[Rat], ray: &[Rat]) -> Result<(), VerifyError> {
    check_feasible(lp, x)?;
    if ray.len() != lp.num_vars() {
        return fail("ray has the wrong length");
    }
    for (j, d) in ray.iter().enumerate() {
        if d.is_negative() && lp.lower[j].is_some() {
            return fail(format!("ray leaves the lower bound of x{j}"));
        }
        if d.is_positive() && lp.upper[j].is_some() {
            return fail(format!("ray leaves the upper bound of x{j}"));
        }
    }
    for (r, c) in lp.constraints.iter().enumerate() {
        let lhs = dot(&c.coeffs, ray);
        let ok = match c.rel {
            Relation::Le => !lhs.is_positive(),
            Relation::Ge => !lhs.is_negative(),
            Relation::Eq => lhs.is_zero(),
        };
        if !ok {
            return fail(format!("ray violates the recession condition of row {r}"));
        }
    }
    let gain = lp.objective_value(ray);
    let improving = match lp.sense {
        Sense::Max => gain.is_positive(),
        Sense::Min => gain.is_negative(),
    };
    if improving {
        Ok(())
    } else {
        fail("ray does not improve the objective")
    }
}

/// Re-derives the claim made by `outcome` from the program data alone.
pub fn verify_outcome(lp: &LinearProgram, outcome: &LpOutcome) -> Result<(), VerifyError> {
    match outcome {
        LpOutcome::Optimal { x, duals, value } => check_optimal(lp, x, duals, value),
        LpOutcome::Unbounded { x, ray } => check_unbounded(lp, x, ray),
        LpOutcome::Infeasible(cert) => check_farkas(lp, cert),
    }
}
