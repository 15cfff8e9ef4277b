//! Variable layout shared by the strategy LPs: one nonnegative variable per
//! admissible signed order on each atom.

use num_traits::Zero;

use crate::rational::Rat;
use crate::trade::{Sign, Strategy, TradeMap};

/// A signed elementary order placed on one atom of one date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub t: usize,
    pub atom: usize,
    pub pair: usize,
    pub sign: Sign,
}

/// Cells in lexicographic `(t, atom, pair, sign)` order. Cells whose generator
/// vanishes on the whole atom are omitted since they never move wealth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellLayout {
    pub cells: Vec<Cell>,
}

impl CellLayout {
    pub fn for_dates(map: &TradeMap, dates: impl IntoIterator<Item = usize>) -> Self {
        let f = map.filtration();
        let mut cells = Vec::new();
        for t in dates {
            for (a, atom) in f.atoms(t).iter().enumerate() {
                for p in 0..map.num_pairs() {
                    for sign in Sign::BOTH {
                        if !map.cone().allowed(p, sign) {
                            continue;
                        }
                        let active = atom.iter().any(|&w| map.generator(t, w, p, sign).iter().any(|x| !x.is_zero()));
                        if active {
                            cells.push(Cell { t, atom: a, pair: p, sign });
                        }
                    }
                }
            }
        }
        CellLayout { cells }
    }

    pub fn all_dates(map: &TradeMap) -> Self {
        Self::for_dates(map, map.filtration().dates())
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Terms `(variable, coefficient)` of wealth component `k` at outcome `w`,
    /// summed over the cells in the layout.
    pub fn wealth_terms(&self, map: &TradeMap, w: usize, k: usize) -> Vec<(usize, Rat)> {
        let f = map.filtration();
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| f.atom_of(c.t, w) == c.atom)
            .filter_map(|(v, c)| {
                let g = &map.generator(c.t, w, c.pair, c.sign)[k];
                (!g.is_zero()).then(|| (v, g.clone()))
            })
            .collect()
    }

    /// Net strategy `η = x⁺ - x⁻` per cell.
    pub fn to_strategy(&self, map: &TradeMap, x: &[Rat]) -> Strategy {
        let f = map.filtration();
        let pairs = map.pairs();
        let mut s = Strategy::zero(f, map.dim());
        for (c, v) in self.cells.iter().zip(x) {
            if v.is_zero() {
                continue;
            }
            let (i, j) = pairs[c.pair];
            let m = s.get_mut(c.t, c.atom);
            match c.sign {
                Sign::Plus => m[i][j] += v,
                Sign::Minus => m[i][j] -= v,
            }
        }
        s
    }
}
