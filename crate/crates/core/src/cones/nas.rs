//! Direct check of strict no-arbitrage by extreme-ray enumeration.
//!
//! At date `t` the set `A_t ∩ (-N_t + ℝ₊)` is the image of the cone of tuples
//! `(x, r₁, y, r₂) ≥ 0` with `Lx - r₁ + My - r₂ = 0`, where `L` collects the
//! trades on dates up to `t` and `M` the date-`t` reversal orders, under
//! `V = Lx - r₁`. Buy and sell amounts of a cell are independent: mixing them
//! only lowers `Lx` and `My` below the net order's wealth, which disposal absorbs.
//!
//! Each extreme ray is tested for `V ∈ N⁰_t`. A ray outside is a genuine
//! violation. Checking rays suffices when `N⁰_t` is a linear space, which holds
//! under HN⁰.

use std::collections::{HashMap, HashSet};

use num_traits::{Signed, Zero};

use super::cells::CellLayout;
use super::classify::frictionality_classify;
use super::dd::{extreme_rays, primitive, verify_extreme_ray};
use super::n0::{n0_membership, n0_membership_with};
use super::{Budget, ConeError};
use crate::rational::Rat;
use crate::space::RandomVector;
use crate::trade::{wealth, OrderMatrix, Strategy, TradeMap};

/// An element of `A_t ∩ (-N_t + ℝ₊)` outside `N⁰_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NasWitness {
    pub t: usize,
    /// `V = V_t(strategy) - r₁ = -F_t(reversal) + r₂`.
    pub v: RandomVector,
    /// Trades on dates `0..=t`; later dates are zero.
    pub strategy: Strategy,
    /// Reversal order per atom of `H_t`.
    pub reversal: Vec<OrderMatrix>,
    /// The extreme ray of the lifted cone and its constraint matrix.
    pub ray: Vec<Rat>,
    pub constraint: Vec<Vec<Rat>>,
}

impl NasWitness {
    /// Recomputes both disposals and re-decides `V ∉ N⁰_t`.
    pub fn verify(&self, map: &TradeMap, budget: &mut Budget) -> Result<(), String> {
        let f = map.filtration();
        let path = wealth(map, &self.strategy).map_err(|e| e.to_string())?;
        for w in 0..f.space().len() {
            let eta = &self.reversal[f.atom_of(self.t, w)];
            let rev = map.evaluate(self.t, w, eta).map_err(|e| e.to_string())?;
            for k in 0..map.dim() {
                let v = &self.v.get(w)[k];
                if (&path.values[self.t][w][k] - v).is_negative() {
                    return Err(format!("V exceeds the trade wealth at outcome {w}"));
                }
                if (v + &rev[k]).is_negative() {
                    return Err(format!("V is below the reversal bound at outcome {w}"));
                }
            }
        }
        verify_extreme_ray(&self.constraint, &self.ray)?;
        match n0_membership(map, self.t, &self.v, budget).map_err(|e| e.to_string())? {
            super::N0Membership::No => Ok(()),
            super::N0Membership::Yes { .. } => Err("witness lies in N⁰".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NasVerdict {
    Holds { rays_checked: usize },
    Fails(Box<NasWitness>),
}

impl NasVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, NasVerdict::Holds { .. })
    }
}

struct Lifted {
    b: Vec<Vec<Rat>>,
    p: Vec<Vec<Rat>>,
    /// Per column: index into trade layout, reversal layout, or a disposal slot.
    origin: Vec<Column>,
}

#[derive(Debug, Clone, Copy)]
enum Column {
    Trade(usize),
    Disposal,
    Reversal(usize),
    Absorb,
}

fn lifted_cone(map: &TradeMap, trades: &CellLayout, reversals: &CellLayout) -> Lifted {
    let n = map.space().len();
    let d = map.dim();
    let rows = n * d;
    let mut cols: Vec<(Vec<Rat>, Vec<Rat>, Column)> = Vec::new();
    let generator_column = |layout: &CellLayout, v: usize| {
        let c = layout.cells[v];
        let f = map.filtration();
        let mut col = vec![Rat::zero(); rows];
        for w in 0..n {
            if f.atom_of(c.t, w) == c.atom {
                for (k, g) in map.generator(c.t, w, c.pair, c.sign).iter().enumerate() {
                    col[w * d + k] = g.clone();
                }
            }
        }
        col
    };
    let unit = |r: usize| {
        let mut col = vec![Rat::zero(); rows];
        col[r] = -Rat::from_integer(1.into());
        col
    };
    for v in 0..trades.len() {
        let col = generator_column(trades, v);
        cols.push((col.clone(), col, Column::Trade(v)));
    }
    for r in 0..rows {
        cols.push((unit(r), unit(r), Column::Disposal));
    }
    for v in 0..reversals.len() {
        cols.push((generator_column(reversals, v), vec![Rat::zero(); rows], Column::Reversal(v)));
    }
    for r in 0..rows {
        cols.push((unit(r), vec![Rat::zero(); rows], Column::Absorb));
    }
    // Positive multiples of a column are redundant generators.
    let mut seen: HashSet<Vec<Rat>> = HashSet::new();
    cols.retain(|(b, p, _)| {
        let stacked: Vec<Rat> = b.iter().chain(p).cloned().collect();
        !stacked.iter().all(Zero::is_zero) && seen.insert(primitive(&stacked))
    });
    let m = cols.len();
    let mut b = vec![vec![Rat::zero(); m]; rows];
    let mut p = vec![vec![Rat::zero(); m]; rows];
    for (j, (cb, cp, _)) in cols.iter().enumerate() {
        for r in 0..rows {
            b[r][j] = cb[r].clone();
            p[r][j] = cp[r].clone();
        }
    }
    Lifted { b, p, origin: cols.into_iter().map(|(_, _, o)| o).collect() }
}

pub fn check_nas_direct(map: &TradeMap, budget: &mut Budget) -> Result<NasVerdict, ConeError> {
    let f = map.filtration();
    let n = f.space().len();
    let d = map.dim();
    let classes = frictionality_classify(map);
    let mut rays_checked = 0;
    for t in f.dates() {
        let trades = CellLayout::for_dates(map, 0..=t);
        let reversals = CellLayout::for_dates(map, [t]);
        let cone = lifted_cone(map, &trades, &reversals);
        let rays = extreme_rays(&cone.b, cone.origin.len(), budget.guard.max_rays)?;
        let mut cache: HashMap<Vec<Rat>, bool> = HashMap::new();
        for z in rays {
            rays_checked += 1;
            let flat: Vec<Rat> = cone.p.iter().map(|row| row.iter().zip(&z).map(|(a, b)| a * b).sum()).collect();
            if flat.iter().all(Zero::is_zero) {
                continue;
            }
            let key = primitive(&flat);
            let member = match cache.get(&key) {
                Some(&m) => m,
                None => {
                    let v = RandomVector::new(key.chunks(d).map(<[Rat]>::to_vec).collect())
                        .map_err(|e| ConeError::InvariantViolation(e.to_string()))?;
                    let m = n0_membership_with(map, &classes, t, &v, budget)?.is_yes();
                    cache.insert(key.clone(), m);
                    m
                }
            };
            if member {
                continue;
            }
            let mut x = vec![Rat::zero(); trades.len()];
            let mut y = vec![Rat::zero(); reversals.len()];
            for (j, o) in cone.origin.iter().enumerate() {
                match *o {
                    Column::Trade(v) => x[v] += &z[j],
                    Column::Reversal(v) => y[v] += &z[j],
                    Column::Disposal | Column::Absorb => {}
                }
            }
            let strategy = trades.to_strategy(map, &x);
            let reversal = reversals.to_strategy(map, &y).values()[t].clone();
            let v = RandomVector::new(flat.chunks(d).map(<[Rat]>::to_vec).collect())
                .map_err(|e| ConeError::InvariantViolation(e.to_string()))?;
            debug_assert_eq!(v.len(), n);
            let witness = NasWitness { t, v, strategy, reversal, ray: z, constraint: cone.b };
            return Ok(NasVerdict::Fails(Box::new(witness)));
        }
    }
    Ok(NasVerdict::Holds { rays_checked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::fixtures::{bin1, bin1_arb, bin1_tc};
    use crate::cones::Guard;

    #[test]
    fn verdicts_on_binomial_markets() {
        assert!(check_nas_direct(&bin1(), &mut Budget::unlimited()).unwrap().holds());
        assert!(check_nas_direct(&bin1_tc(), &mut Budget::unlimited()).unwrap().holds());
        let map = bin1_arb();
        let NasVerdict::Fails(w) = check_nas_direct(&map, &mut Budget::unlimited()).unwrap() else { panic!("expected a witness") };
        w.verify(&map, &mut Budget::unlimited()).unwrap();
    }

    #[test]
    fn tampered_witness_fails() {
        let map = bin1_arb();
        let NasVerdict::Fails(mut w) = check_nas_direct(&map, &mut Budget::unlimited()).unwrap() else { panic!("expected a witness") };
        w.v = RandomVector::new(vec![vec![Rat::zero(); 2]; 2]).unwrap();
        assert!(w.verify(&map, &mut Budget::unlimited()).is_err());
    }

    #[test]
    fn ray_guard() {
        let mut budget = Budget::new(Guard { max_lp_calls: 4096, max_rays: 1 });
        assert!(matches!(check_nas_direct(&bin1_tc(), &mut budget), Err(ConeError::SizeGuardExceeded { .. })));
    }
}
