#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tcna_core::rational::{int, rat};
use tcna_core::space::{Filtration, FiniteSpace};
use tcna_core::trade::{rates_from_prices, MarketData, OrderMatrix, TradeMap};
use tcna_core::Rat;

pub fn pi(bid: Rat, ask: Rat) -> OrderMatrix {
    vec![vec![int(1), ask], vec![bid, int(1)]]
}

pub fn flat(s: Rat) -> OrderMatrix {
    pi(s.clone(), s)
}

pub fn binomial() -> Filtration {
    let s = FiniteSpace::new(vec!["u".into(), "d".into()], vec![rat(1, 2), rat(1, 2)]).unwrap();
    Filtration::new(s, vec![vec![vec![0, 1]], vec![vec![0], vec![1]]]).unwrap()
}

pub fn bin1_data() -> MarketData {
    MarketData::Security { pi: vec![vec![flat(int(1)); 2], vec![flat(int(2)), flat(rat(1, 2))]] }
}

pub fn bin1_arb_data() -> MarketData {
    MarketData::Security { pi: vec![vec![flat(int(1)); 2], vec![flat(int(2)), flat(int(1))]] }
}

pub fn bin1_tc_data() -> MarketData {
    MarketData::Security {
        pi: vec![vec![pi(int(1), int(2)); 2], vec![pi(rat(3, 2), rat(5, 2)), pi(rat(1, 2), rat(3, 2))]],
    }
}

pub fn build(data: &MarketData, f: &Filtration) -> TradeMap {
    data.build(f).unwrap()
}

pub fn bin1() -> TradeMap {
    build(&bin1_data(), &binomial())
}

pub fn bin1_arb() -> TradeMap {
    build(&bin1_arb_data(), &binomial())
}

pub fn bin1_tc() -> TradeMap {
    build(&bin1_tc_data(), &binomial())
}

fn delay_space() -> FiniteSpace {
    FiniteSpace::uniform(["uu", "ud", "du", "dd"]).unwrap()
}

/// Full information: the price tree itself.
pub fn delay1_full() -> Filtration {
    Filtration::new(delay_space(), vec![vec![vec![0, 1, 2, 3]], vec![vec![0, 1], vec![2, 3]], vec![vec![0], vec![1], vec![2], vec![3]]]).unwrap()
}

/// Nothing is learned before the last date.
pub fn delay1_delayed() -> Filtration {
    Filtration::delayed(delay_space(), 2, 2).unwrap()
}

pub fn delay1_prices() -> Vec<Vec<Rat>> {
    vec![vec![int(1); 4], vec![int(2), int(2), rat(1, 2), rat(1, 2)], vec![int(3), rat(5, 2), int(1), rat(1, 8)]]
}

pub fn delay1_data() -> MarketData {
    MarketData::Security { pi: delay1_prices().into_iter().map(|s| s.into_iter().map(flat).collect()).collect() }
}

pub fn cur2_data() -> MarketData {
    let m = |x: Rat| vec![vec![vec![vec![x; 3]; 3]; 2]; 2];
    MarketData::Currency2 { tau: m(int(1)), lambda: m(rat(1, 10)) }
}

pub fn cur2() -> TradeMap {
    build(&cur2_data(), &binomial())
}

/// A random refining chain of partitions over `n` outcomes, `H_0` trivial.
pub fn random_filtration(rng: &mut ChaCha8Rng, n: usize, horizon: usize) -> Filtration {
    let probs: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
    let total: u32 = probs.iter().sum();
    let space = FiniteSpace::new((0..n).map(|w| format!("w{w}")).collect(), probs.iter().map(|&p| rat(p as i64, total as i64)).collect()).unwrap();
    let mut parts = vec![vec![(0..n).collect::<Vec<usize>>()]];
    for _ in 0..horizon {
        let prev = parts.last().unwrap().clone();
        let mut next = Vec::new();
        for atom in prev {
            // Split each atom with probability one half at a random cut.
            if atom.len() > 1 && rng.gen_bool(0.5) {
                let cut = rng.gen_range(1..atom.len());
                next.push(atom[..cut].to_vec());
                next.push(atom[cut..].to_vec());
            } else {
                next.push(atom);
            }
        }
        parts.push(next);
    }
    Filtration::new(space, parts).unwrap()
}

fn pick(rng: &mut ChaCha8Rng, xs: &[Rat]) -> Rat {
    xs[rng.gen_range(0..xs.len())].clone()
}

/// Random market data on `f` for a model chosen by `kind` (0 security, 1 and 2 currency).
pub fn random_market(rng: &mut ChaCha8Rng, f: &Filtration, d: usize, kind: usize) -> MarketData {
    let dates = f.horizon() + 1;
    let n = f.space().len();
    let levels = [rat(1, 2), int(1), rat(3, 2), int(2)];
    let spreads = [int(0), int(0), rat(1, 2), int(1)];
    let costs = [int(0), rat(1, 10), rat(1, 5)];
    match kind {
        0 => {
            let pi = (0..dates)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            let mut m = vec![vec![int(0); d]; d];
                            for (i, row) in m.iter_mut().enumerate() {
                                row[i] = int(1);
                            }
                            for i in 1..d {
                                let bid = pick(rng, &levels);
                                m[0][i] = &bid + pick(rng, &spreads);
                                m[i][0] = bid;
                            }
                            m
                        })
                        .collect()
                })
                .collect();
            MarketData::Security { pi }
        }
        1 => {
            let prices: Vec<Vec<Vec<Rat>>> = (0..dates).map(|_| (0..n).map(|_| (0..d).map(|_| pick(rng, &levels)).collect()).collect()).collect();
            let tau = rates_from_prices(&prices).unwrap();
            let lambda = (0..dates)
                .map(|_| (0..n).map(|_| (0..d).map(|i| (0..d).map(|j| if i == j { int(0) } else { pick(rng, &costs) }).collect()).collect()).collect())
                .collect();
            MarketData::Currency1 { tau, lambda }
        }
        _ => {
            let prices: Vec<Vec<Vec<Rat>>> = (0..dates).map(|_| (0..n).map(|_| (0..d).map(|_| pick(rng, &levels)).collect()).collect()).collect();
            let tau = rates_from_prices(&prices).unwrap();
            let lambda = (0..dates)
                .map(|_| (0..n).map(|_| (0..d).map(|i| (0..d).map(|j| if i == j { int(0) } else { pick(rng, &costs[1..]) }).collect()).collect()).collect())
                .collect();
            MarketData::Currency2 { tau, lambda }
        }
    }
}

/// A random instance small enough for the enumerating checkers.
pub fn random_instance(rng: &mut ChaCha8Rng) -> (MarketData, Filtration) {
    let kind = rng.gen_range(0..3);
    let d = if rng.gen_bool(0.25) { 3 } else { 2 };
    let (n, horizon) = if d == 3 { (rng.gen_range(1..=2), 1) } else { (rng.gen_range(2..=4), rng.gen_range(1..=2)) };
    let f = random_filtration(rng, n, horizon);
    let data = random_market(rng, &f, d, kind);
    (data, f)
}
