//! The three named market models, built from raw price and cost data.
//!
//! All data is indexed `[t][outcome]`. Assets are numbered from 0, so asset 0 is
//! the numéraire of the security market.

use num_traits::{One, Signed, Zero};

use super::cone::{pair_index, pairs, ConeSpec, Sign};
use super::map::{GeneratorTable, OrderMatrix, TradeError, TradeMap};
use crate::rational::{fmt_rat, Rat};
use crate::space::Filtration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarketKind {
    Security,
    Currency1,
    Currency2,
    Generic,
}

impl MarketKind {
    pub fn name(self) -> &'static str {
        match self {
            MarketKind::Security => "security",
            MarketKind::Currency1 => "currency1",
            MarketKind::Currency2 => "currency2",
            MarketKind::Generic => "generic",
        }
    }
}

/// Per-date, per-outcome market inputs for the named models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MarketData {
    /// `pi[t][ω][i][j]`: `pi[i][0]` is the bid and `pi[0][i]` the ask of asset `i` in units of asset 0.
    Security { pi: Vec<Vec<OrderMatrix>> },
    /// `tau[t][ω][i][j]` units of `i` per unit of `j`; costs `lambda[t][ω][i][j]`.
    Currency1 { tau: Vec<Vec<OrderMatrix>>, lambda: Vec<Vec<OrderMatrix>> },
    Currency2 { tau: Vec<Vec<OrderMatrix>>, lambda: Vec<Vec<OrderMatrix>> },
}

impl MarketData {
    pub fn kind(&self) -> MarketKind {
        match self {
            MarketData::Security { .. } => MarketKind::Security,
            MarketData::Currency1 { .. } => MarketKind::Currency1,
            MarketData::Currency2 { .. } => MarketKind::Currency2,
        }
    }

    pub fn build(&self, filtration: &Filtration) -> Result<TradeMap, TradeError> {
        match self {
            MarketData::Security { pi } => security_market(filtration, pi),
            MarketData::Currency1 { tau, lambda } => currency_market_v1_rates(filtration, tau, lambda),
            MarketData::Currency2 { tau, lambda } => currency_market_v2(filtration, tau, lambda),
        }
    }
}

fn unit(d: usize, k: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); d];
    v[k] = Rat::one();
    v
}

fn check_shape(filtration: &Filtration, data: &[Vec<OrderMatrix>], what: &str) -> Result<usize, TradeError> {
    let dates = filtration.horizon() + 1;
    let n = filtration.space().len();
    if data.len() != dates || data.iter().any(|s| s.len() != n) {
        return Err(TradeError::Shape(format!("{what} must be given for {dates} dates × {n} outcomes")));
    }
    let d = data[0][0].len();
    if d == 0 || data.iter().flatten().any(|m| m.len() != d || m.iter().any(|r| r.len() != d)) {
        return Err(TradeError::Shape(format!("{what} must hold square matrices of one size")));
    }
    Ok(d)
}

fn empty_tables(filtration: &Filtration, d: usize) -> (GeneratorTable, GeneratorTable) {
    let t = vec![vec![vec![vec![Rat::zero(); d]; pairs(d).len()]; filtration.space().len()]; filtration.horizon() + 1];
    (t.clone(), t)
}

/// Numéraire-based market with bid `π^{i0}` and ask `π^{0i}`.
pub fn security_market(filtration: &Filtration, pi: &[Vec<OrderMatrix>]) -> Result<TradeMap, TradeError> {
    let d = check_shape(filtration, pi, "pi")?;
    let (mut plus, mut minus) = empty_tables(filtration, d);
    for (t, slice) in pi.iter().enumerate() {
        for (w, m) in slice.iter().enumerate() {
            for i in 0..d {
                if !m[i][i].is_one() {
                    return Err(TradeError::DiagonalNotOne { t, outcome: w, i, value: fmt_rat(&m[i][i]) });
                }
            }
            for i in 1..d {
                let (bid, ask) = (&m[i][0], &m[0][i]);
                if !bid.is_positive() {
                    return Err(TradeError::NonPositiveBid { t, outcome: w, i, bid: fmt_rat(bid) });
                }
                if ask < bid {
                    return Err(TradeError::SpreadViolation { t, outcome: w, i, bid: fmt_rat(bid), ask: fmt_rat(ask) });
                }
                let p = pair_index(d, 0, i);
                // Selling one unit of i for the bid, or buying one at the ask.
                let mut g = unit(d, i).into_iter().map(|x| -x).collect::<Vec<_>>();
                g[0] = bid.clone();
                plus[t][w][p] = g;
                let mut g = unit(d, i);
                g[0] = -ask.clone();
                minus[t][w][p] = g;
            }
        }
    }
    TradeMap::new(filtration.clone(), ConeSpec::full(d), plus, minus)
}

/// `τ^{ji} = S^i / S^j` for a price table `prices[t][ω][i]`.
pub fn rates_from_prices(prices: &[Vec<Vec<Rat>>]) -> Result<Vec<Vec<OrderMatrix>>, TradeError> {
    prices
        .iter()
        .enumerate()
        .map(|(t, slice)| {
            slice
                .iter()
                .enumerate()
                .map(|(w, s)| {
                    if let Some(i) = s.iter().position(|x| !x.is_positive()) {
                        return Err(TradeError::NonPositivePrice { t, outcome: w, i });
                    }
                    Ok((0..s.len()).map(|j| (0..s.len()).map(|i| &s[i] / &s[j]).collect()).collect())
                })
                .collect()
        })
        .collect()
}

fn check_costs(lambda: &[Vec<OrderMatrix>]) -> Result<(), TradeError> {
    for (t, slice) in lambda.iter().enumerate() {
        for (w, m) in slice.iter().enumerate() {
            for (i, j) in pairs(m.len()) {
                if m[i][j].is_negative() {
                    return Err(TradeError::NegativeCost { t, outcome: w, i, j });
                }
            }
        }
    }
    Ok(())
}

fn check_rates(tau: &[Vec<OrderMatrix>]) -> Result<(), TradeError> {
    for (t, slice) in tau.iter().enumerate() {
        for (w, m) in slice.iter().enumerate() {
            for (i, j) in pairs(m.len()) {
                if !m[i][j].is_positive() {
                    return Err(TradeError::NonPositiveRate { t, outcome: w, i, j });
                }
            }
        }
    }
    Ok(())
}

/// Currency market with costs paid in the asset given up, from a price process.
pub fn currency_market_v1(
    filtration: &Filtration,
    prices: &[Vec<Vec<Rat>>],
    lambda: &[Vec<OrderMatrix>],
) -> Result<TradeMap, TradeError> {
    let dates = filtration.horizon() + 1;
    let n = filtration.space().len();
    if prices.len() != dates || prices.iter().any(|s| s.len() != n) {
        return Err(TradeError::Shape(format!("prices must be given for {dates} dates × {n} outcomes")));
    }
    let tau = rates_from_prices(prices)?;
    currency_market_v1_rates(filtration, &tau, lambda)
}

/// Same model from exchange rates directly.
///
/// `+e_pq` receives one unit of `q` and pays `τ^{pq}(1+λ^{pq})` units of `p`;
/// `-e_pq` delivers `1+λ^{qp}` units of `q` and receives `τ^{pq}` units of `p`.
pub fn currency_market_v1_rates(
    filtration: &Filtration,
    tau: &[Vec<OrderMatrix>],
    lambda: &[Vec<OrderMatrix>],
) -> Result<TradeMap, TradeError> {
    let d = check_shape(filtration, tau, "tau")?;
    if check_shape(filtration, lambda, "lambda")? != d {
        return Err(TradeError::Shape("tau and lambda differ in size".into()));
    }
    check_rates(tau)?;
    check_costs(lambda)?;
    let (mut plus, mut minus) = empty_tables(filtration, d);
    for t in 0..tau.len() {
        for w in 0..tau[t].len() {
            let (r, l) = (&tau[t][w], &lambda[t][w]);
            for (k, (p, q)) in pairs(d).into_iter().enumerate() {
                let mut g = unit(d, q);
                g[p] = -(&r[p][q] * (Rat::one() + &l[p][q]));
                plus[t][w][k] = g;
                let mut g = vec![Rat::zero(); d];
                g[q] = -(Rat::one() + &l[q][p]);
                g[p] = r[p][q].clone();
                minus[t][w][k] = g;
            }
        }
    }
    TradeMap::new(filtration.clone(), ConeSpec::full(d), plus, minus)
}

/// Currency market restricted to nonnegative orders.
pub fn currency_market_v2(
    filtration: &Filtration,
    tau: &[Vec<OrderMatrix>],
    lambda: &[Vec<OrderMatrix>],
) -> Result<TradeMap, TradeError> {
    let d = check_shape(filtration, tau, "tau")?;
    if check_shape(filtration, lambda, "lambda")? != d {
        return Err(TradeError::Shape("tau and lambda differ in size".into()));
    }
    check_rates(tau)?;
    check_costs(lambda)?;
    let (mut plus, minus) = empty_tables(filtration, d);
    for t in 0..tau.len() {
        for w in 0..tau[t].len() {
            let (r, l) = (&tau[t][w], &lambda[t][w]);
            for (k, (i, j)) in pairs(d).into_iter().enumerate() {
                let mut g = unit(d, j);
                g[i] = -(&r[i][j] * (Rat::one() + &l[i][j]));
                plus[t][w][k] = g;
            }
        }
    }
    TradeMap::new(filtration.clone(), ConeSpec::nonnegative(d), plus, minus)
}

/// Generic helper for tests and samplers: checks whether a pair's generators are
/// exact negatives at every outcome of a set.
pub fn reversible_on(map: &TradeMap, t: usize, outcomes: &[usize], pair: usize) -> bool {
    outcomes.iter().all(|&w| {
        map.generator(t, w, pair, Sign::Plus)
            .iter()
            .zip(map.generator(t, w, pair, Sign::Minus))
            .all(|(a, b)| (a + b).is_zero())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::space::FiniteSpace;

    fn static_filtration(n: usize) -> Filtration {
        let labels: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
        Filtration::new(FiniteSpace::uniform(labels).unwrap(), vec![vec![(0..n).collect()]]).unwrap()
    }

    fn pi(bid: Rat, ask: Rat) -> OrderMatrix {
        vec![vec![int(1), ask], vec![bid, int(1)]]
    }

    #[test]
    fn security_examples() {
        let f = static_filtration(1);
        let m = security_market(&f, &[vec![pi(int(3), int(3))]]).unwrap();
        assert!(reversible_on(&m, 0, &[0], 0));
        let m = security_market(&f, &[vec![pi(int(1), int(2))]]).unwrap();
        assert_eq!(m.generator(0, 0, 0, Sign::Plus), &[int(1), int(-1)]);
        assert_eq!(m.generator(0, 0, 0, Sign::Minus), &[int(-2), int(1)]);
        assert!(matches!(security_market(&f, &[vec![pi(int(2), int(1))]]), Err(TradeError::SpreadViolation { .. })));
        assert!(matches!(security_market(&f, &[vec![pi(int(0), int(1))]]), Err(TradeError::NonPositiveBid { .. })));
        let mut bad = pi(int(1), int(1));
        bad[1][1] = int(2);
        assert!(matches!(security_market(&f, &[vec![bad]]), Err(TradeError::DiagonalNotOne { .. })));
    }

    #[test]
    fn security_ignores_non_numeraire_entries() {
        let f = static_filtration(1);
        let m = vec![vec![int(1), int(2), int(3)], vec![int(1), int(1), int(7)], vec![int(2), int(9), int(1)]];
        let map = security_market(&f, &[vec![m]]).unwrap();
        let mut eta = vec![vec![Rat::zero(); 3]; 3];
        eta[1][2] = int(5);
        eta[2][1] = int(-4);
        assert!(map.evaluate(0, 0, &eta).unwrap().iter().all(Zero::is_zero));
    }

    #[test]
    fn currency1_examples() {
        let f = static_filtration(1);
        let zero = vec![vec![vec![vec![int(0), int(0)], vec![int(0), int(0)]]]];
        let m = currency_market_v1(&f, &[vec![vec![int(1), int(2)]]], &zero).unwrap();
        for p in 0..2 {
            assert!(reversible_on(&m, 0, &[0], p));
        }
        let tenth = vec![vec![vec![vec![int(0), rat(1, 10)], vec![rat(1, 10), int(0)]]]];
        let m = currency_market_v1(&f, &[vec![vec![int(1), int(2)]]], &tenth).unwrap();
        assert_eq!(m.generator(0, 0, 0, Sign::Plus), &[rat(-11, 5), int(1)]);
        let tau = rates_from_prices(&[vec![vec![int(3), int(3)]]]).unwrap();
        assert_eq!(tau[0][0][0][1], int(1));
        assert!(matches!(
            currency_market_v1(&f, &[vec![vec![int(1), int(0)]]], &zero),
            Err(TradeError::NonPositivePrice { .. })
        ));
        let neg = vec![vec![vec![vec![int(0), int(-1)], vec![int(0), int(0)]]]];
        assert!(matches!(
            currency_market_v1(&f, &[vec![vec![int(1), int(1)]]], &neg),
            Err(TradeError::NegativeCost { .. })
        ));
    }

    #[test]
    fn currency2_examples() {
        let f = static_filtration(1);
        let ones = vec![vec![vec![vec![int(1); 3]; 3]]];
        let tenth = vec![vec![vec![vec![rat(1, 10); 3]; 3]]];
        let m = currency_market_v2(&f, &ones, &tenth).unwrap();
        assert_eq!(m.generator(0, 0, 0, Sign::Plus), &[rat(-11, 10), int(1), int(0)]);
        for p in 0..6 {
            assert!(m.generator(0, 0, p, Sign::Minus).iter().all(Zero::is_zero));
            let g = m.generator(0, 0, p, Sign::Plus);
            assert_eq!(g.iter().filter(|x| x.is_positive()).count(), 1);
            assert_eq!(g.iter().filter(|x| x.is_negative()).count(), 1);
        }
        let mut zero_rate = ones.clone();
        zero_rate[0][0][0][2] = int(0);
        assert!(matches!(currency_market_v2(&f, &zero_rate, &tenth), Err(TradeError::NonPositiveRate { .. })));
    }
}
