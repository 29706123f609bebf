//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::laurent::Scalar;

/// Sparse-row linear system `A x = b` with a fixed number of unknowns.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    ncols: usize,
    rows: Vec<Vec<(usize, Scalar)>>,
    rhs: Vec<Scalar>,
}

/// Solution set `{x0 + Σ t_i n_i}`.
#[derive(Clone, Debug)]
pub struct AffineSolution {
    pub particular: Vec<Scalar>,
    pub nullspace: Vec<Vec<Scalar>>,
    pub pivots: Vec<usize>,
    pub free: Vec<usize>,
}

impl LinearSystem {
    pub fn new(ncols: usize) -> Self {
        LinearSystem {
            ncols,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// Adds `Σ coeffs = rhs`; repeated column indices are summed.
    pub fn push(&mut self, coeffs: Vec<(usize, Scalar)>, rhs: Scalar) {
        let mut dense: std::collections::BTreeMap<usize, Scalar> = Default::default();
        for (c, v) in coeffs {
            assert!(c < self.ncols);
            *dense.entry(c).or_insert_with(Scalar::zero) += v;
        }
        let row: Vec<(usize, Scalar)> = dense.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    /// Reduced row echelon form; `None` if inconsistent.
    pub fn solve(&self) -> Option<AffineSolution> {
        let n = self.ncols;
        let mut rows: Vec<Vec<Scalar>> = self
            .rows
            .iter()
            .zip(&self.rhs)
            .map(|(r, b)| {
                let mut dense = vec![Scalar::zero(); n + 1];
                for (c, v) in r {
                    dense[*c] = v.clone();
                }
                dense[n] = b.clone();
                dense
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let inv = Scalar::one() / &rows[r][c];
            for v in rows[r][c..].iter_mut() {
                *v *= &inv;
            }
            let pivot_row = rows[r].clone();
            let nz: Vec<usize> = (c..=n).filter(|&j| !pivot_row[j].is_zero()).collect();
            for (i, row) in rows.iter_mut().enumerate() {
                if i == r || row[c].is_zero() {
                    continue;
                }
                let f = row[c].clone();
                for &j in &nz {
                    let t = &f * &pivot_row[j];
                    row[j] -= t;
                }
            }
            pivots.push(c);
            r += 1;
        }
        if rows[r..].iter().any(|row| !row[n].is_zero()) {
            return None;
        }
        let mut particular = vec![Scalar::zero(); n];
        for (i, &c) in pivots.iter().enumerate() {
            particular[c] = rows[i][n].clone();
        }
        let is_pivot = {
            let mut v = vec![false; n];
            for &c in &pivots {
                v[c] = true;
            }
            v
        };
        let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let nullspace = free
            .iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(); n];
                v[f] = Scalar::one();
                for (i, &c) in pivots.iter().enumerate() {
                    v[c] = -rows[i][f].clone();
                }
                v
            })
            .collect();
        Some(AffineSolution {
            particular,
            nullspace,
            pivots,
            free,
        })
    }

    /// Checks `A x = b` exactly.
    pub fn is_satisfied_by(&self, x: &[Scalar]) -> bool {
        self.rows.iter().zip(&self.rhs).all(|(r, b)| {
            let s = r.iter().fold(Scalar::zero(), |acc, (c, v)| acc + v * &x[*c]);
            s == *b
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::{int, rat};

    #[test]
    fn unique_solution() {
        let mut s = LinearSystem::new(2);
        s.push(vec![(0, int(2)), (1, int(1))], int(3));
        s.push(vec![(0, int(1)), (1, int(-1))], int(0));
        let sol = s.solve().unwrap();
        assert_eq!(sol.particular, vec![int(1), int(1)]);
        assert!(sol.nullspace.is_empty());
    }

    #[test]
    fn underdetermined_has_nullspace() {
        let mut s = LinearSystem::new(3);
        s.push(vec![(0, int(1)), (1, int(1)), (2, int(1))], int(1));
        let sol = s.solve().unwrap();
        assert_eq!(sol.nullspace.len(), 2);
        assert!(s.is_satisfied_by(&sol.particular));
        for n in &sol.nullspace {
            let x: Vec<Scalar> = sol.particular.iter().zip(n).map(|(a, b)| a + b * rat(3, 7)).collect();
            assert!(s.is_satisfied_by(&x));
        }
    }

    #[test]
    fn inconsistent() {
        let mut s = LinearSystem::new(1);
        s.push(vec![(0, int(1))], int(1));
        s.push(vec![(0, int(2))], int(3));
        assert!(s.solve().is_none());
    }
}
