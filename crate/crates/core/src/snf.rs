//! Exact Smith normal form over the integers.
//!
//! Sparse elimination with pivoting on minimal-norm entries, arbitrary
//! precision throughout. The matrix is first reduced to an equivalent
//! diagonal form; the invariant factors are then obtained from the
//! diagonal by the pairwise gcd/lcm massage.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::homology::IntegerMatrix;

/// Default cap on input nonzeros; larger matrices signal the caller to
/// skip homology for the trial.
pub const DEFAULT_NONZERO_CAP: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf {
    pub rank: usize,
    /// Invariant factors > 1, in divisibility order.
    pub invariant_factors: Vec<BigInt>,
}

struct SparseMat {
    rows: Vec<HashMap<usize, BigInt>>,
    /// For each column, the set of rows with a nonzero entry.
    cols: Vec<HashMap<usize, ()>>,
}

impl SparseMat {
    fn from_matrix(m: &IntegerMatrix) -> Self {
        let mut rows = vec![HashMap::new(); m.rows];
        let mut cols = vec![HashMap::new(); m.cols];
        for &(i, j, ref v) in &m.entries {
            if v.is_zero() {
                continue;
            }
            let e = rows[i].entry(j).or_insert_with(BigInt::zero);
            *e += v;
            if e.is_zero() {
                rows[i].remove(&j);
            }
        }
        for (i, row) in rows.iter().enumerate() {
            for &j in row.keys() {
                cols[j].insert(i, ());
            }
        }
        SparseMat { rows, cols }
    }

    fn set(&mut self, i: usize, j: usize, v: BigInt) {
        if v.is_zero() {
            self.rows[i].remove(&j);
            self.cols[j].remove(&i);
        } else {
            self.rows[i].insert(j, v);
            self.cols[j].insert(i, ());
        }
    }

    fn get(&self, i: usize, j: usize) -> BigInt {
        self.rows[i].get(&j).cloned().unwrap_or_else(BigInt::zero)
    }

    /// row_k -= q * row_i
    fn row_op(&mut self, k: usize, i: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let src: Vec<(usize, BigInt)> =
            self.rows[i].iter().map(|(&j, v)| (j, v.clone())).collect();
        for (j, v) in src {
            let cur = self.get(k, j);
            self.set(k, j, cur - q * v);
        }
    }

    /// col_l -= q * col_j
    fn col_op(&mut self, l: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let src: Vec<usize> = self.cols[j].keys().copied().collect();
        for i in src {
            let v = self.get(i, j);
            let cur = self.get(i, l);
            self.set(i, l, cur - q * &v);
        }
    }
}

/// Quotient rounding toward the nearest integer, so the remainder has
/// magnitude at most |b| / 2.
fn nearest_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut q, r) = a.div_rem(b);
    if &r.abs() * 2 > b.abs() {
        if (a.sign() == b.sign()) || r.is_zero() {
            q += 1;
        } else {
            q -= 1;
        }
    }
    q
}

/// Exact SNF. Errors with `SizeLimitExceeded` if the input has more than
/// `nonzero_cap` nonzeros.
pub fn smith_normal_form_capped(m: &IntegerMatrix, nonzero_cap: usize) -> Result<Snf> {
    let nnz = m.entries.iter().filter(|(_, _, v)| !v.is_zero()).count();
    if nnz > nonzero_cap {
        return Err(Error::SizeLimitExceeded(nnz, nonzero_cap));
    }
    let mut sm = SparseMat::from_matrix(m);
    let mut row_active = vec![true; m.rows];
    let mut col_active = vec![true; m.cols];
    let mut diag: Vec<BigInt> = Vec::new();

    loop {
        // Minimal-norm pivot among active entries, preferring sparse rows
        // to limit fill.
        let mut best: Option<(usize, usize, BigInt, usize)> = None;
        for i in 0..m.rows {
            if !row_active[i] {
                continue;
            }
            let weight = self_row_weight(&sm, i, &col_active);
            for (&j, v) in &sm.rows[i] {
                if !col_active[j] {
                    continue;
                }
                let a = v.abs();
                match &best {
                    None => best = Some((i, j, a, weight)),
                    Some((_, _, ba, bw)) => {
                        if a < *ba || (a == *ba && weight < *bw) {
                            best = Some((i, j, a, weight));
                        }
                    }
                }
            }
        }
        let Some((mut pi, mut pj, _, _)) = best else {
            break;
        };

        // Euclidean reduction: shrink the pivot until it divides everything
        // in its row and column, then clear them.
        loop {
            let pivot = sm.get(pi, pj);
            debug_assert!(!pivot.is_zero());
            // Clear column pj.
            let col_rows: Vec<usize> = sm.cols[pj]
                .keys()
                .copied()
                .filter(|&k| k != pi && row_active[k])
                .collect();
            let mut switched = false;
            for k in col_rows {
                let a = sm.get(k, pj);
                if a.is_zero() {
                    continue;
                }
                let q = nearest_quotient(&a, &pivot);
                sm.row_op(k, pi, &q);
                if !sm.get(k, pj).is_zero() {
                    // Strictly smaller remainder becomes the new pivot.
                    pi = k;
                    switched = true;
                    break;
                }
            }
            if switched {
                continue;
            }
            // Clear row pi.
            let pivot = sm.get(pi, pj);
            let row_cols: Vec<usize> = sm.rows[pi]
                .keys()
                .copied()
                .filter(|&l| l != pj && col_active[l])
                .collect();
            let mut switched = false;
            for l in row_cols {
                let a = sm.get(pi, l);
                if a.is_zero() {
                    continue;
                }
                let q = nearest_quotient(&a, &pivot);
                sm.col_op(l, pj, &q);
                if !sm.get(pi, l).is_zero() {
                    pj = l;
                    switched = true;
                    break;
                }
            }
            if switched {
                continue;
            }
            // Row and column are clear except for the pivot.
            break;
        }

        diag.push(sm.get(pi, pj).abs());
        row_active[pi] = false;
        col_active[pj] = false;
    }

    // Diagonal -> invariant factors: pairwise (a, b) -> (gcd, lcm) until the
    // divisibility chain holds.
    let mut d = diag;
    d.sort();
    loop {
        let mut changed = false;
        for i in 0..d.len() {
            for j in (i + 1)..d.len() {
                if (&d[j] % &d[i]).is_zero() {
                    continue;
                }
                let g = d[i].gcd(&d[j]);
                let l = (&d[i] * &d[j]) / &g;
                d[i] = g;
                d[j] = l;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        d.sort();
    }
    let rank = d.len();
    let one = BigInt::from(1);
    let invariant_factors = d.into_iter().filter(|x| *x != one).collect();
    Ok(Snf {
        rank,
        invariant_factors,
    })
}

fn self_row_weight(sm: &SparseMat, i: usize, col_active: &[bool]) -> usize {
    sm.rows[i].keys().filter(|&&j| col_active[j]).count()
}

/// SNF with the default nonzero cap.
pub fn smith_normal_form(m: &IntegerMatrix) -> Result<Snf> {
    smith_normal_form_capped(m, DEFAULT_NONZERO_CAP)
}

/// Exact rank over the integers (= rank over Q).
pub fn rank_capped(m: &IntegerMatrix, cap: usize) -> Result<usize> {
    Ok(smith_normal_form_capped(m, cap)?.rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::IntegerMatrix;

    fn mat(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> IntegerMatrix {
        IntegerMatrix {
            rows,
            cols,
            entries: entries
                .iter()
                .map(|&(i, j, v)| (i, j, BigInt::from(v)))
                .collect(),
        }
    }

    #[test]
    fn identity() {
        let m = mat(3, 3, &[(0, 0, 1), (1, 1, 1), (2, 2, 1)]);
        let s = smith_normal_form(&m).unwrap();
        assert_eq!(s.rank, 3);
        assert!(s.invariant_factors.is_empty());
    }

    #[test]
    fn diagonal_2_6() {
        let m = mat(2, 2, &[(0, 0, 2), (1, 1, 6)]);
        let s = smith_normal_form(&m).unwrap();
        assert_eq!(s.rank, 2);
        assert_eq!(
            s.invariant_factors,
            vec![BigInt::from(2), BigInt::from(6)]
        );
    }

    #[test]
    fn diagonal_needs_massage() {
        // diag(4, 6) has SNF diag(2, 12).
        let m = mat(2, 2, &[(0, 0, 4), (1, 1, 6)]);
        let s = smith_normal_form(&m).unwrap();
        assert_eq!(
            s.invariant_factors,
            vec![BigInt::from(2), BigInt::from(12)]
        );
    }

    #[test]
    fn classic_example() {
        // SNF of [[2,4,4],[-6,6,12],[10,4,16]] is diag(2, 2, 156).
        let m = mat(
            3,
            3,
            &[
                (0, 0, 2),
                (0, 1, 4),
                (0, 2, 4),
                (1, 0, -6),
                (1, 1, 6),
                (1, 2, 12),
                (2, 0, 10),
                (2, 1, 4),
                (2, 2, 16),
            ],
        );
        let s = smith_normal_form(&m).unwrap();
        assert_eq!(s.rank, 3);
        assert_eq!(
            s.invariant_factors,
            vec![BigInt::from(2), BigInt::from(2), BigInt::from(156)]
        );
    }

    #[test]
    fn zero_matrix() {
        let m = mat(4, 5, &[]);
        let s = smith_normal_form(&m).unwrap();
        assert_eq!(s.rank, 0);
        assert!(s.invariant_factors.is_empty());
    }

    #[test]
    fn cap_enforced() {
        let m = mat(2, 2, &[(0, 0, 1), (1, 1, 1)]);
        assert!(matches!(
            smith_normal_form_capped(&m, 1),
            Err(Error::SizeLimitExceeded(2, 1))
        ));
    }
}
