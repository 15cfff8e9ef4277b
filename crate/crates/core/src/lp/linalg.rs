//! Exact Gaussian elimination.

use num_traits::Zero;

use crate::rational::Rat;

/// Reduces `m` in place to row echelon form and returns the pivot columns.
fn echelon(m: &mut [Vec<Rat>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(row, p);
        let piv = m[row][col].clone();
        for v in m[row].iter_mut() {
            if !v.is_zero() {
                *v /= &piv;
            }
        }
        let prow = m[row].clone();
        for (i, r) in m.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for (v, pv) in r.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut m = rows.to_vec();
    echelon(&mut m, ncols).len()
}

/// Coefficients `c` with `Σ_k c_k columns[k] = target`, if any exist.
pub fn solve_combination(columns: &[Vec<Rat>], target: &[Rat]) -> Option<Vec<Rat>> {
    let k = columns.len();
    let n = target.len();
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = echelon(&mut m, k + 1);
    if pivots.last() == Some(&k) {
        return None;
    }
    let mut c = vec![Rat::zero(); k];
    for (row, &col) in pivots.iter().enumerate() {
        c[col] = m[row][k].clone();
    }
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn rank_of_dependent_rows() {
        let rows = vec![vec![int(1), int(2)], vec![int(2), int(4)], vec![int(0), int(1)]];
        assert_eq!(rank(&rows), 2);
        assert_eq!(rank(&[vec![int(0), int(0)]]), 0);
    }

    #[test]
    fn combination_found_and_missing() {
        let cols = vec![vec![int(2), int(-1)]];
        assert_eq!(solve_combination(&cols, &[int(1), rat(-1, 2)]), Some(vec![rat(1, 2)]));
        assert_eq!(solve_combination(&cols, &[int(1), int(0)]), None);
        assert_eq!(solve_combination(&[], &[int(0)]), Some(vec![]));
    }
}
