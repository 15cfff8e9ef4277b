//! Extreme rays of `{z ≥ 0 : Bz = 0}` by double description.
//!
//! Starts from the unit rays of the orthant and cuts by one hyperplane at a
//! time. Adjacency is decided combinatorially: two rays are adjacent iff no
//! third ray has its support inside the union of their supports.

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ConeError;
use crate::lp::linalg::rank;
use crate::rational::{dot, Rat};

/// Scales a nonzero vector to the primitive integer vector on its ray.
pub fn primitive(v: &[Rat]) -> Vec<Rat> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return v.to_vec();
    }
    ints.into_iter().map(|x| Rat::from_integer(x / &gcd)).collect()
}

struct Ray {
    z: Vec<Rat>,
    supp: FixedBitSet,
}

impl Ray {
    fn new(z: Vec<Rat>) -> Self {
        let mut supp = FixedBitSet::with_capacity(z.len());
        for (j, x) in z.iter().enumerate() {
            if !x.is_zero() {
                supp.insert(j);
            }
        }
        Ray { z, supp }
    }
}

/// All extreme rays of `{z ∈ ℝⁿ : z ≥ 0, Bz = 0}` as primitive integer vectors,
/// sorted lexicographically.
pub fn extreme_rays(b: &[Vec<Rat>], n: usize, max_rays: usize) -> Result<Vec<Vec<Rat>>, ConeError> {
    if b.iter().any(|r| r.len() != n) {
        return Err(ConeError::DimensionMismatch { expected: n, found: b.iter().map(Vec::len).find(|&l| l != n).unwrap_or(0) });
    }
    if n > max_rays {
        return Err(ConeError::SizeGuardExceeded { what: "extreme rays", limit: max_rays });
    }
    let mut rays: Vec<Ray> = (0..n)
        .map(|j| {
            let mut z = vec![Rat::zero(); n];
            z[j] = Rat::one();
            Ray::new(z)
        })
        .collect();
    let mut pending: Vec<&Vec<Rat>> = b.iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    let mut processed = 0usize;
    while !pending.is_empty() && !rays.is_empty() {
        // Pick the row with the fewest candidate pairs.
        let scored: Vec<(usize, usize, Vec<Rat>)> = pending
            .iter()
            .enumerate()
            .map(|(idx, row)| {
                let vals: Vec<Rat> = rays.iter().map(|r| dot(row, &r.z)).collect();
                let pos = vals.iter().filter(|v| v.is_positive()).count();
                let neg = vals.iter().filter(|v| v.is_negative()).count();
                (pos * neg, idx, vals)
            })
            .collect();
        let (_, idx, vals) = scored.into_iter().min_by_key(|(cost, idx, _)| (*cost, *idx)).expect("nonempty");
        pending.remove(idx);

        let pos: Vec<usize> = (0..rays.len()).filter(|&r| vals[r].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&r| vals[r].is_negative()).collect();
        let mut next: Vec<Ray> = Vec::new();
        for (r, ray) in rays.iter().enumerate() {
            if vals[r].is_zero() {
                next.push(Ray::new(ray.z.clone()));
            }
        }
        for &p in &pos {
            for &q in &neg {
                let mut union = rays[p].supp.clone();
                union.union_with(&rays[q].supp);
                // A two-dimensional face of the current cone has rank(B_k[:,U]) = |U| - 2.
                if union.count_ones(..) > processed + 2 {
                    continue;
                }
                let blocked = rays
                    .iter()
                    .enumerate()
                    .any(|(o, other)| o != p && o != q && other.supp.is_subset(&union));
                if blocked {
                    continue;
                }
                let z: Vec<Rat> = rays[q].z.iter().zip(&rays[p].z).map(|(zq, zp)| &vals[p] * zq - &vals[q] * zp).collect();
                next.push(Ray::new(primitive(&z)));
                if next.len() > max_rays {
                    return Err(ConeError::SizeGuardExceeded { what: "extreme rays", limit: max_rays });
                }
            }
        }
        rays = next;
        processed += 1;
    }
    let mut out: Vec<Vec<Rat>> = rays.into_iter().map(|r| r.z).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Independent check that `z` is an extreme ray of `{z ≥ 0 : Bz = 0}`.
pub fn verify_extreme_ray(b: &[Vec<Rat>], z: &[Rat]) -> Result<(), String> {
    if z.iter().any(Signed::is_negative) {
        return Err("ray has a negative entry".into());
    }
    if z.iter().all(Zero::is_zero) {
        return Err("ray is zero".into());
    }
    if b.iter().any(|row| !dot(row, z).is_zero()) {
        return Err("ray leaves the equality subspace".into());
    }
    let supp: Vec<usize> = (0..z.len()).filter(|&j| !z[j].is_zero()).collect();
    let sub: Vec<Vec<Rat>> = b.iter().map(|row| supp.iter().map(|&j| row[j].clone()).collect()).collect();
    if rank(&sub) + 1 != supp.len() {
        return Err("support columns leave more than one degree of freedom".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn ints(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn primitive_scaling() {
        assert_eq!(primitive(&[rat(1, 2), rat(3, 4), int(0)]), ints(&[2, 3, 0]));
        assert_eq!(primitive(&[int(4), int(6)]), ints(&[2, 3]));
    }

    #[test]
    fn no_rows_gives_unit_rays() {
        let rays = extreme_rays(&[], 3, 100).unwrap();
        assert_eq!(rays.len(), 3);
    }

    #[test]
    fn simplex_section() {
        // z1 + z2 - z3 - z4 = 0: rays pair one of {1,2} with one of {3,4}.
        let b = vec![ints(&[1, 1, -1, -1])];
        let rays = extreme_rays(&b, 4, 100).unwrap();
        assert_eq!(rays, vec![ints(&[0, 1, 0, 1]), ints(&[0, 1, 1, 0]), ints(&[1, 0, 0, 1]), ints(&[1, 0, 1, 0])]);
        for r in &rays {
            verify_extreme_ray(&b, r).unwrap();
        }
    }

    #[test]
    fn pointed_to_zero() {
        let b = vec![ints(&[1, 1])];
        assert!(extreme_rays(&b, 2, 100).unwrap().is_empty());
    }

    #[test]
    fn rejects_interior_point() {
        let b = vec![ints(&[1, 1, -1, -1])];
        assert!(verify_extreme_ray(&b, &ints(&[1, 1, 1, 1])).is_err());
        assert!(verify_extreme_ray(&b, &ints(&[1, 0, 0, 0])).is_err());
    }

    #[test]
    fn guard_trips() {
        let b = vec![ints(&[1, 1, 1, -1, -1, -1])];
        assert!(matches!(extreme_rays(&b, 6, 7), Err(ConeError::SizeGuardExceeded { .. })));
    }

    // Brute force over supports: a support S yields an extreme ray iff the
    // kernel of B[:,S] is one-dimensional and spanned by a positive vector.
    fn brute(b: &[Vec<Rat>], n: usize) -> Vec<Vec<Rat>> {
        let mut out = Vec::new();
        for mask in 1u32..(1 << n) {
            let supp: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
            let sub: Vec<Vec<Rat>> = b.iter().map(|row| supp.iter().map(|&j| row[j].clone()).collect()).collect();
            if rank(&sub) + 1 != supp.len() {
                continue;
            }
            // Kernel vector: fix the last support entry to 1 and solve.
            let last = *supp.last().unwrap();
            let cols: Vec<Vec<Rat>> = supp[..supp.len() - 1].iter().map(|&j| b.iter().map(|r| r[j].clone()).collect()).collect();
            let target: Vec<Rat> = b.iter().map(|r| -r[last].clone()).collect();
            let Some(c) = crate::lp::linalg::solve_combination(&cols, &target) else { continue };
            let mut z = vec![Rat::zero(); n];
            for (k, &j) in supp[..supp.len() - 1].iter().enumerate() {
                z[j] = c[k].clone();
            }
            z[last] = Rat::one();
            if z.iter().all(|x| !x.is_negative()) && supp.iter().all(|&j| x_pos(&z[j])) {
                out.push(primitive(&z));
            }
        }
        out.sort();
        out
    }

    fn x_pos(x: &Rat) -> bool {
        x.is_positive()
    }

    #[test]
    fn matches_brute_force() {
        let b = vec![ints(&[2, -1, 0, 1, -3]), ints(&[0, 1, -1, 1, 1])];
        assert_eq!(extreme_rays(&b, 5, 1000).unwrap(), brute(&b, 5));
        let b = vec![ints(&[1, -1, 2, -2, 1, 0]), ints(&[1, 1, -1, 0, -1, 1]), ints(&[0, 2, -1, -1, 0, -1])];
        assert_eq!(extreme_rays(&b, 6, 1000).unwrap(), brute(&b, 6));
    }
}
