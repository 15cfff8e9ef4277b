use num_traits::{Signed, Zero};
use thiserror::Error;

use super::cone::{pair_index, pairs, ConeSpec, Sign};
use crate::rational::{fmt_rat, Rat};
use crate::space::{Filtration, FiniteSpace};

/// A `d × d` order matrix; entry `(i, j)` is the signed size of the `e_ij` order.
pub type OrderMatrix = Vec<Vec<Rat>>;

pub fn zero_matrix(d: usize) -> OrderMatrix {
    vec![vec![Rat::zero(); d]; d]
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TradeError {
    #[error("generator table has the wrong shape: {0}")]
    Shape(String),
    #[error("date {t}, outcome {outcome}: generator for {sign}e_{i}{j} must be zero because the direction is not admissible", sign = sign.symbol())]
    ConventionViolation { t: usize, outcome: usize, i: usize, j: usize, sign: Sign },
    #[error("date {t}, outcome {outcome}, pair ({i},{j}), component {k}: buy and sell generators sum to {sum} > 0")]
    FrictionSignViolation { t: usize, outcome: usize, i: usize, j: usize, k: usize, sum: String },
    #[error("order ({i},{j}) = {value} uses a direction outside the admissible cone")]
    SignInfeasible { i: usize, j: usize, value: String },
    #[error("strategy shape does not match the filtration of the trade map")]
    FiltrationMismatch,
    #[error("date {t}, outcome {outcome}, asset {i}: ask {ask} is below bid {bid}")]
    SpreadViolation { t: usize, outcome: usize, i: usize, bid: String, ask: String },
    #[error("date {t}, outcome {outcome}, asset {i}: bid {bid} is not positive")]
    NonPositiveBid { t: usize, outcome: usize, i: usize, bid: String },
    #[error("date {t}, outcome {outcome}: diagonal entry {i} is {value}, expected 1")]
    DiagonalNotOne { t: usize, outcome: usize, i: usize, value: String },
    #[error("date {t}, outcome {outcome}: price of asset {i} is not positive")]
    NonPositivePrice { t: usize, outcome: usize, i: usize },
    #[error("date {t}, outcome {outcome}: cost ({i},{j}) is negative")]
    NegativeCost { t: usize, outcome: usize, i: usize, j: usize },
    #[error("date {t}, outcome {outcome}: exchange rate ({i},{j}) is not positive")]
    NonPositiveRate { t: usize, outcome: usize, i: usize, j: usize },
}

/// Generator table indexed `[t][outcome][pair]`, each entry a vector in `ℚ^d`.
pub type GeneratorTable = Vec<Vec<Vec<Vec<Rat>>>>;

/// A random trade map, stored as the images of the signed elementary orders.
///
/// Generators are per outcome: the engine never assumes they are adapted to the
/// filtration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradeMap {
    filtration: Filtration,
    cone: ConeSpec,
    gen_plus: GeneratorTable,
    gen_minus: GeneratorTable,
}

impl TradeMap {
    pub fn new(
        filtration: Filtration,
        cone: ConeSpec,
        gen_plus: GeneratorTable,
        gen_minus: GeneratorTable,
    ) -> Result<Self, TradeError> {
        let d = cone.dim();
        let np = cone.num_pairs();
        let n = filtration.space().len();
        let dates = filtration.horizon() + 1;
        for (name, table) in [("gen_plus", &gen_plus), ("gen_minus", &gen_minus)] {
            if table.len() != dates {
                return Err(TradeError::Shape(format!("{name} has {} dates, expected {dates}", table.len())));
            }
            for (t, slice) in table.iter().enumerate() {
                if slice.len() != n {
                    return Err(TradeError::Shape(format!("{name}[{t}] has {} outcomes, expected {n}", slice.len())));
                }
                for (w, per_pair) in slice.iter().enumerate() {
                    if per_pair.len() != np || per_pair.iter().any(|g| g.len() != d) {
                        return Err(TradeError::Shape(format!(
                            "{name}[{t}][{w}] must hold {np} vectors of length {d}"
                        )));
                    }
                }
            }
        }
        let all_pairs = pairs(d);
        for t in 0..dates {
            for w in 0..n {
                for (p, &(i, j)) in all_pairs.iter().enumerate() {
                    for sign in Sign::BOTH {
                        let g = match sign {
                            Sign::Plus => &gen_plus[t][w][p],
                            Sign::Minus => &gen_minus[t][w][p],
                        };
                        if !cone.allowed(p, sign) && g.iter().any(|x| !x.is_zero()) {
                            return Err(TradeError::ConventionViolation { t, outcome: w, i, j, sign });
                        }
                    }
                    if cone.allowed(p, Sign::Plus) && cone.allowed(p, Sign::Minus) {
                        for k in 0..d {
                            let sum = &gen_plus[t][w][p][k] + &gen_minus[t][w][p][k];
                            if sum.is_positive() {
                                return Err(TradeError::FrictionSignViolation {
                                    t,
                                    outcome: w,
                                    i,
                                    j,
                                    k,
                                    sum: fmt_rat(&sum),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(TradeMap { filtration, cone, gen_plus, gen_minus })
    }

    /// The map sending every order to zero.
    pub fn zero(filtration: Filtration, cone: ConeSpec) -> Self {
        let d = cone.dim();
        let table = vec![vec![vec![vec![Rat::zero(); d]; cone.num_pairs()]; filtration.space().len()]; filtration.horizon() + 1];
        TradeMap { filtration, cone, gen_plus: table.clone(), gen_minus: table }
    }

    pub fn dim(&self) -> usize {
        self.cone.dim()
    }

    pub fn horizon(&self) -> usize {
        self.filtration.horizon()
    }

    pub fn filtration(&self) -> &Filtration {
        &self.filtration
    }

    pub fn space(&self) -> &FiniteSpace {
        self.filtration.space()
    }

    pub fn cone(&self) -> &ConeSpec {
        &self.cone
    }

    pub fn num_pairs(&self) -> usize {
        self.cone.num_pairs()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        pairs(self.dim())
    }

    pub fn generator(&self, t: usize, outcome: usize, pair: usize, sign: Sign) -> &[Rat] {
        match sign {
            Sign::Plus => &self.gen_plus[t][outcome][pair],
            Sign::Minus => &self.gen_minus[t][outcome][pair],
        }
    }

    pub fn table(&self, sign: Sign) -> &GeneratorTable {
        match sign {
            Sign::Plus => &self.gen_plus,
            Sign::Minus => &self.gen_minus,
        }
    }

    /// Checks that the nonzero entries of `eta` use admissible directions.
    pub fn check_sign_feasible(&self, eta: &OrderMatrix) -> Result<(), TradeError> {
        let d = self.dim();
        if eta.len() != d || eta.iter().any(|r| r.len() != d) {
            return Err(TradeError::Shape(format!("order matrix must be {d}×{d}")));
        }
        for (i, j) in pairs(d) {
            let v = &eta[i][j];
            let p = pair_index(d, i, j);
            let ok = if v.is_positive() {
                self.cone.allowed(p, Sign::Plus)
            } else if v.is_negative() {
                self.cone.allowed(p, Sign::Minus)
            } else {
                true
            };
            if !ok {
                return Err(TradeError::SignInfeasible { i, j, value: fmt_rat(v) });
            }
        }
        Ok(())
    }

    /// `F_t(η)(ω) = Σ (η^{ij})⁺ F_t(e_ij)(ω) + (η^{ij})⁻ F_t(-e_ij)(ω)`; the diagonal is ignored.
    pub fn evaluate(&self, t: usize, outcome: usize, eta: &OrderMatrix) -> Result<Vec<Rat>, TradeError> {
        self.check_sign_feasible(eta)?;
        let d = self.dim();
        let mut out = vec![Rat::zero(); d];
        for (p, (i, j)) in pairs(d).into_iter().enumerate() {
            let v = &eta[i][j];
            if v.is_zero() {
                continue;
            }
            let (g, mag) = if v.is_positive() {
                (&self.gen_plus[t][outcome][p], v.clone())
            } else {
                (&self.gen_minus[t][outcome][p], -v.clone())
            };
            for (o, gk) in out.iter_mut().zip(g) {
                if !gk.is_zero() {
                    *o += &mag * gk;
                }
            }
        }
        Ok(out)
    }
}

/// An adapted order process: one matrix per date and atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    values: Vec<Vec<OrderMatrix>>,
}

impl Strategy {
    pub fn zero(filtration: &Filtration, d: usize) -> Self {
        Strategy {
            values: filtration.dates().map(|t| vec![zero_matrix(d); filtration.atoms(t).len()]).collect(),
        }
    }

    pub fn new(filtration: &Filtration, d: usize, values: Vec<Vec<OrderMatrix>>) -> Result<Self, TradeError> {
        let s = Strategy { values };
        if !s.fits(filtration, d) {
            return Err(TradeError::FiltrationMismatch);
        }
        Ok(s)
    }

    pub fn fits(&self, filtration: &Filtration, d: usize) -> bool {
        self.values.len() == filtration.horizon() + 1
            && self.values.iter().enumerate().all(|(t, slice)| {
                slice.len() == filtration.atoms(t).len()
                    && slice.iter().all(|m| m.len() == d && m.iter().all(|r| r.len() == d))
            })
    }

    pub fn get(&self, t: usize, atom: usize) -> &OrderMatrix {
        &self.values[t][atom]
    }

    pub fn get_mut(&mut self, t: usize, atom: usize) -> &mut OrderMatrix {
        &mut self.values[t][atom]
    }

    pub fn values(&self) -> &[Vec<OrderMatrix>] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().flatten().flatten().flatten().all(Zero::is_zero)
    }

    pub fn scaled(&self, factor: &Rat) -> Strategy {
        Strategy {
            values: self
                .values
                .iter()
                .map(|s| s.iter().map(|m| m.iter().map(|r| r.iter().map(|v| v * factor).collect()).collect()).collect())
                .collect(),
        }
    }

    pub fn negated(&self) -> Strategy {
        self.scaled(&-Rat::from_integer(1.into()))
    }

    /// Entrywise sum, used to combine strategies whose cells do not mix signs.
    pub fn plus(&self, other: &Strategy) -> Strategy {
        Strategy {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| {
                    a.iter()
                        .zip(b)
                        .map(|(ma, mb)| {
                            ma.iter().zip(mb).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect()).collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

/// Increments `ξ_t(ω)` and running sums `V_t(ω)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WealthPath {
    pub increments: Vec<Vec<Vec<Rat>>>,
    pub values: Vec<Vec<Vec<Rat>>>,
}

impl WealthPath {
    pub fn terminal(&self) -> &[Vec<Rat>] {
        self.values.last().expect("at least one date")
    }
}

pub fn wealth(map: &TradeMap, strategy: &Strategy) -> Result<WealthPath, TradeError> {
    let f = map.filtration();
    if !strategy.fits(f, map.dim()) {
        return Err(TradeError::FiltrationMismatch);
    }
    let n = f.space().len();
    let mut increments = Vec::with_capacity(f.horizon() + 1);
    let mut values: Vec<Vec<Vec<Rat>>> = Vec::with_capacity(f.horizon() + 1);
    for t in f.dates() {
        let xi: Vec<Vec<Rat>> = (0..n)
            .map(|w| map.evaluate(t, w, strategy.get(t, f.atom_of(t, w))))
            .collect::<Result<_, _>>()?;
        let v = match values.last() {
            Some(prev) => prev.iter().zip(&xi).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect()).collect(),
            None => xi.clone(),
        };
        increments.push(xi);
        values.push(v);
    }
    Ok(WealthPath { increments, values })
}
