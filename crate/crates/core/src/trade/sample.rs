//! Seeded samplers for orders and strategies.

use num_bigint::BigInt;
use rand::Rng;

use super::cone::{pairs, Sign};
use super::map::{zero_matrix, OrderMatrix, Strategy, TradeMap};
use crate::rational::Rat;

/// A positive rational `p/q` with `1 ≤ p ≤ 4`, `1 ≤ q ≤ 3`.
pub fn random_magnitude<R: Rng>(rng: &mut R) -> Rat {
    Rat::new(BigInt::from(rng.gen_range(1..=4)), BigInt::from(rng.gen_range(1..=3)))
}

/// A sign-feasible order matrix; each admissible cell is left at zero with
/// probability one half so that sparse orders are common.
pub fn random_order<R: Rng>(rng: &mut R, map: &TradeMap) -> OrderMatrix {
    let d = map.dim();
    let mut eta = zero_matrix(d);
    for (p, (i, j)) in pairs(d).into_iter().enumerate() {
        if rng.gen_bool(0.5) {
            continue;
        }
        let options: Vec<Sign> = Sign::BOTH.into_iter().filter(|&s| map.cone().allowed(p, s)).collect();
        if options.is_empty() {
            continue;
        }
        let sign = options[rng.gen_range(0..options.len())];
        let m = random_magnitude(rng);
        eta[i][j] = match sign {
            Sign::Plus => m,
            Sign::Minus => -m,
        };
    }
    eta
}

pub fn random_strategy<R: Rng>(rng: &mut R, map: &TradeMap) -> Strategy {
    let f = map.filtration();
    let mut s = Strategy::zero(f, map.dim());
    for t in f.dates() {
        for a in 0..f.atoms(t).len() {
            *s.get_mut(t, a) = random_order(rng, map);
        }
    }
    s
}
