//! Dual-side reports: the measure change induced by a pricing kernel, projected
//! market data, and the bid-ask inequalities the projected kernel satisfies.
//!
//! Every quantity is recomputed from the raw market data and `Z`, so a report
//! also serves as an independent check of the kernel.

use num_traits::{One, Signed};
use thiserror::Error;

use crate::cones::{frictionality_classify, verify_cps, EfVerdict, FrictionClass};
use crate::rational::Rat;
use crate::space::{cond_expect, is_martingale, optional_projection, AdaptedProcess, Filtration, FiniteSpace, RandomVector, SpaceError};
use crate::trade::{pair_index, MarketData, MarketKind, OrderMatrix, TradeError, TradeMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("kernel does not fit the market: {0}")]
    KernelMismatch(String),
    #[error("efficient frictions have not been established for this market")]
    EfNotEstablished,
    #[error(transparent)]
    Trade(#[from] TradeError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// `lower ≤ value ≤ upper` on one atom, strict on both sides when `strict`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InequalityRow {
    pub t: usize,
    pub atom: usize,
    pub i: usize,
    pub j: usize,
    pub lower: Option<Rat>,
    pub value: Rat,
    pub upper: Rat,
    pub strict: bool,
    pub passes: bool,
    /// Lower bound in the projected-rate form, where it is reported separately.
    pub alt_lower: Option<Rat>,
}

impl InequalityRow {
    fn new(t: usize, atom: usize, (i, j): (usize, usize), lower: Option<Rat>, value: Rat, upper: Rat, strict: bool) -> Self {
        let below = |a: &Rat, b: &Rat| if strict { a < b } else { a <= b };
        let passes = lower.as_ref().map_or(true, |l| below(l, &value)) && below(&value, &upper);
        InequalityRow { t, atom, i, j, lower, value, upper, strict, passes, alt_lower: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MartingaleCheck {
    pub name: String,
    pub holds: bool,
    pub first_failure: Option<(usize, usize)>,
}

/// Projected data `[t][atom]` as a matrix per atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectedSeries {
    pub name: String,
    pub values: Vec<Vec<OrderMatrix>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionReport {
    pub kind: MarketKind,
    /// `dQ/dP = Z⁰ / E[Z⁰]`.
    pub q: FiniteSpace,
    pub zbar: AdaptedProcess,
    pub projected: Vec<ProjectedSeries>,
    pub rows: Vec<InequalityRow>,
    pub martingales: Vec<MartingaleCheck>,
    /// Failed dual rows of the kernel against the market.
    pub kernel_discrepancies: usize,
    /// Projected data via `E[Z⁰X | H]/Z̄⁰` equals `E_Q[X | H]`.
    pub measure_paths_agree: bool,
    /// Row strictness matches the friction classes used by the kernel search.
    pub engine_agreement: bool,
}

impl ProjectionReport {
    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| !r.passes).count()
    }
}

struct Ctx<'a> {
    f: &'a Filtration,
    z: &'a RandomVector,
    zbar: AdaptedProcess,
    q: FiniteSpace,
}

impl<'a> Ctx<'a> {
    fn new(map: &TradeMap, f: &'a Filtration, z: &'a RandomVector) -> Result<Self, ReportError> {
        if z.len() != f.space().len() || z.dim() != map.dim() {
            return Err(ReportError::KernelMismatch(format!("Z must have {} outcomes of dimension {}", f.space().len(), map.dim())));
        }
        if z.values().iter().flatten().any(|x| !x.is_positive()) {
            return Err(ReportError::KernelMismatch("Z must be strictly positive".into()));
        }
        let zbar = optional_projection(&vec![z.clone(); f.horizon() + 1], f, f.space())?;
        let q = f.space().change_measure(&z.component(0))?;
        Ok(Ctx { f, z, zbar, q })
    }

    /// `E_P[Z^k X | A]` for a scalar `x[ω]` on atom `a` of date `t`.
    fn weighted(&self, t: usize, a: usize, k: usize, x: impl Fn(usize) -> Rat) -> Rat {
        let space = self.f.space();
        let atom = &self.f.atoms(t)[a];
        let mass: Rat = atom.iter().map(|&w| space.prob(w)).sum();
        let s: Rat = atom.iter().map(|&w| space.prob(w) * &self.z.get(w)[k] * x(w)).sum();
        s / mass
    }

    fn zbar(&self, t: usize, a: usize, k: usize) -> &Rat {
        &self.zbar.value(t, a)[k]
    }

    /// `E[Z^k X | H_t] / Z̄^k` per atom for a matrix-valued `X[t][ω]`.
    fn project(&self, data: &[Vec<OrderMatrix>], row_weight: bool) -> Vec<Vec<OrderMatrix>> {
        self.f
            .dates()
            .map(|t| {
                (0..self.f.atoms(t).len())
                    .map(|a| {
                        let d = data[t][0].len();
                        (0..d)
                            .map(|i| {
                                (0..d)
                                    .map(|j| {
                                        let k = if row_weight { i } else { 0 };
                                        self.weighted(t, a, k, |w| data[t][w][i][j].clone()) / self.zbar(t, a, k)
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    fn kernel_discrepancies(&self, map: &TradeMap) -> Result<usize, ReportError> {
        verify_cps(map, self.z).map(|r| r.discrepancies()).map_err(|e| ReportError::KernelMismatch(e.to_string()))
    }

    fn ratio_martingale(&self) -> Result<MartingaleCheck, ReportError> {
        let d = self.z.dim();
        let values = self
            .f
            .dates()
            .map(|t| {
                (0..self.f.atoms(t).len())
                    .map(|a| (0..d).map(|k| self.zbar(t, a, k) / self.zbar(t, a, 0)).collect())
                    .collect()
            })
            .collect();
        let process = AdaptedProcess::new(self.f, d, values)?;
        let v = is_martingale(&process, self.f, &self.q)?;
        Ok(MartingaleCheck { name: "Zbar/Zbar0 under (Q,H)".into(), holds: v.holds, first_failure: v.first_failure })
    }
}

/// Security market: `Z̄⁰π̄^{i0} ≤ Z̄^i ≤ Z̄⁰π̄^{0i}` with `π̄ = E[Z⁰π | H]/Z̄⁰`,
/// strict where the projected spread is open.
pub fn report_security(pi: &[Vec<OrderMatrix>], filtration: &Filtration, z: &RandomVector) -> Result<ProjectionReport, ReportError> {
    let map = crate::trade::security_market(filtration, pi)?;
    let ctx = Ctx::new(&map, filtration, z)?;
    let d = map.dim();
    let pibar = ctx.project(pi, false);
    let mut agree = true;
    for t in filtration.dates() {
        for i in 0..d {
            for j in 0..d {
                let x = RandomVector::scalar((0..filtration.space().len()).map(|w| pi[t][w][i][j].clone()).collect());
                let under_q = cond_expect(&x, filtration, t, &ctx.q)?;
                agree &= under_q.iter().enumerate().all(|(a, v)| v[0] == pibar[t][a][i][j]);
            }
        }
    }
    let classes = frictionality_classify(&map);
    let mut rows = Vec::new();
    let mut engine_agreement = true;
    for t in filtration.dates() {
        for a in 0..filtration.atoms(t).len() {
            let z0 = ctx.zbar(t, a, 0);
            for i in 1..d {
                let (bid, ask) = (&pibar[t][a][i][0], &pibar[t][a][0][i]);
                let strict = ask > bid;
                engine_agreement &= strict == (classes.get(t, a, pair_index(d, 0, i)) == FrictionClass::Frictional);
                rows.push(InequalityRow::new(t, a, (i, 0), Some(z0 * bid), ctx.zbar(t, a, i).clone(), z0 * ask, strict));
            }
        }
    }
    let mut martingales = vec![ctx.ratio_martingale()?];
    for i in 1..d {
        let frictionless = pi.iter().flatten().all(|m| m[i][0] == m[0][i]);
        if !frictionless {
            continue;
        }
        let values: Vec<Vec<Vec<Rat>>> =
            filtration.dates().map(|t| (0..filtration.atoms(t).len()).map(|a| vec![pibar[t][a][0][i].clone()]).collect()).collect();
        let process = AdaptedProcess::new(filtration, 1, values)?;
        let v = is_martingale(&process, filtration, &ctx.q)?;
        martingales.push(MartingaleCheck { name: format!("projected price {i} under (Q,H)"), holds: v.holds, first_failure: v.first_failure });
        // The same price in the filtration it generates itself.
        let own: Vec<Vec<Vec<Rat>>> = pi.iter().map(|s| s.iter().map(|m| vec![m[0][i].clone()]).collect()).collect();
        let natural = Filtration::generated_by(filtration.space().clone(), &own)?;
        let values = natural
            .dates()
            .map(|t| natural.atoms(t).iter().map(|atom| own[t][atom[0]].clone()).collect())
            .collect();
        let process = AdaptedProcess::new(&natural, 1, values)?;
        let v = is_martingale(&process, &natural, &ctx.q)?;
        martingales.push(MartingaleCheck { name: format!("price {i} under Q in its own filtration"), holds: v.holds, first_failure: v.first_failure });
    }
    Ok(ProjectionReport {
        kind: MarketKind::Security,
        q: ctx.q.clone(),
        zbar: ctx.zbar.clone(),
        projected: vec![ProjectedSeries { name: "pi".into(), values: pibar }],
        rows,
        martingales,
        kernel_discrepancies: ctx.kernel_discrepancies(&map)?,
        measure_paths_agree: agree,
        engine_agreement,
    })
}

/// Currency market with costs paid in the sold asset:
/// `E[Z^j τ^{ji} | H] / (1+λ̄^{ij}) ≤ Z̄^i ≤ E[Z^j τ^{ji}(1+λ^{ji}) | H]`,
/// strict where either cost is positive on the atom. The lower bound is also
/// given in the projected-rate form `Z̄^j τ̄^{ji} / (1+λ̄^{ij})` as `alt_lower`.
pub fn report_currency1(
    tau: &[Vec<OrderMatrix>],
    lambda: &[Vec<OrderMatrix>],
    filtration: &Filtration,
    z: &RandomVector,
) -> Result<ProjectionReport, ReportError> {
    let map = crate::trade::currency_market_v1_rates(filtration, tau, lambda)?;
    let ctx = Ctx::new(&map, filtration, z)?;
    let d = map.dim();
    let one = Rat::one();
    let lbar = ctx.project(lambda, true);
    let composite: Vec<Vec<OrderMatrix>> =
        tau.iter().zip(lambda).map(|(ts, ls)| ts.iter().zip(ls).map(|(r, l)| mul_cost(r, l)).collect()).collect();
    let cbar = ctx.project(&composite, true);
    // τ̄^{ij} = E[Z^i τ^{ij}(1+λ^{ij}) | H] / (Z̄^i (1+λ̄^{ij})).
    let taubar: Vec<Vec<OrderMatrix>> = cbar
        .iter()
        .zip(&lbar)
        .map(|(cs, ls)| cs.iter().zip(ls).map(|(c, l)| c.iter().zip(l).map(|(cr, lr)| cr.iter().zip(lr).map(|(x, y)| x / (&one + y)).collect()).collect()).collect())
        .collect();
    let classes = frictionality_classify(&map);
    let mut rows = Vec::new();
    let mut engine_agreement = true;
    for t in filtration.dates() {
        for a in 0..filtration.atoms(t).len() {
            for i in 0..d {
                for j in 0..d {
                    if i == j {
                        continue;
                    }
                    let zi = ctx.zbar(t, a, i).clone();
                    let zj = ctx.zbar(t, a, j);
                    let upper = ctx.weighted(t, a, j, |w| &tau[t][w][j][i] * (&one + &lambda[t][w][j][i]));
                    let lower = ctx.weighted(t, a, j, |w| tau[t][w][j][i].clone()) / (&one + &lbar[t][a][i][j]);
                    let strict = lbar[t][a][i][j].is_positive() || lbar[t][a][j][i].is_positive();
                    engine_agreement &= strict == (classes.get(t, a, pair_index(d, j, i)) == FrictionClass::Frictional);
                    let mut row = InequalityRow::new(t, a, (i, j), Some(lower), zi, upper, strict);
                    row.alt_lower = Some(zj * &taubar[t][a][j][i] / (&one + &lbar[t][a][i][j]));
                    rows.push(row);
                }
            }
        }
    }
    Ok(ProjectionReport {
        kind: MarketKind::Currency1,
        q: ctx.q.clone(),
        zbar: ctx.zbar.clone(),
        projected: vec![
            ProjectedSeries { name: "tau".into(), values: taubar },
            ProjectedSeries { name: "lambda".into(), values: lbar },
        ],
        rows,
        martingales: vec![ctx.ratio_martingale()?],
        kernel_discrepancies: ctx.kernel_discrepancies(&map)?,
        measure_paths_agree: true,
        engine_agreement,
    })
}

fn mul_cost(r: &OrderMatrix, l: &OrderMatrix) -> OrderMatrix {
    r.iter().zip(l).map(|(rr, lr)| rr.iter().zip(lr).map(|(x, y)| x * (Rat::one() + y)).collect()).collect()
}

/// Currency market on nonnegative orders: `Z̄^i < E[Z^j τ^{ji}(1+λ^{ji}) | H]`
/// for all ordered pairs. Requires efficient frictions.
pub fn report_currency2(
    tau: &[Vec<OrderMatrix>],
    lambda: &[Vec<OrderMatrix>],
    filtration: &Filtration,
    z: &RandomVector,
    ef: &EfVerdict,
) -> Result<ProjectionReport, ReportError> {
    if !ef.holds() {
        return Err(ReportError::EfNotEstablished);
    }
    let map = crate::trade::currency_market_v2(filtration, tau, lambda)?;
    let ctx = Ctx::new(&map, filtration, z)?;
    let d = map.dim();
    let composite: Vec<Vec<OrderMatrix>> =
        tau.iter().zip(lambda).map(|(ts, ls)| ts.iter().zip(ls).map(|(r, l)| mul_cost(r, l)).collect()).collect();
    let cbar = ctx.project(&composite, true);
    let mut rows = Vec::new();
    for t in filtration.dates() {
        for a in 0..filtration.atoms(t).len() {
            for i in 0..d {
                for j in 0..d {
                    if i != j {
                        let upper = ctx.zbar(t, a, j) * &cbar[t][a][j][i];
                        rows.push(InequalityRow::new(t, a, (i, j), None, ctx.zbar(t, a, i).clone(), upper, true));
                    }
                }
            }
        }
    }
    Ok(ProjectionReport {
        kind: MarketKind::Currency2,
        q: ctx.q.clone(),
        zbar: ctx.zbar.clone(),
        projected: vec![ProjectedSeries { name: "tau(1+lambda)".into(), values: cbar }],
        rows,
        martingales: vec![ctx.ratio_martingale()?],
        kernel_discrepancies: ctx.kernel_discrepancies(&map)?,
        measure_paths_agree: true,
        engine_agreement: true,
    })
}

/// Dispatches on the market kind.
pub fn report_market(data: &MarketData, filtration: &Filtration, z: &RandomVector, ef: &EfVerdict) -> Result<ProjectionReport, ReportError> {
    match data {
        MarketData::Security { pi } => report_security(pi, filtration, z),
        MarketData::Currency1 { tau, lambda } => report_currency1(tau, lambda, filtration, z),
        MarketData::Currency2 { tau, lambda } => report_currency2(tau, lambda, filtration, z, ef),
    }
}
