//! Sparse LDLᵀ factorization of symmetric quasi-definite matrices.
//!
//! Up-looking factorization over the elimination tree, no pivoting. The
//! matrices handed to it by the solver are regularized so that every pivot is
//! nonzero regardless of elimination order. A degree-sorted symmetric
//! permutation keeps dense columns (the spline-coefficient block) last, which
//! is all the fill reduction this problem structure needs.

use crate::sparse::SparseMatrix;
use crate::SolverError;

pub struct LdlFactor {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
    diag: Vec<f64>,
}

impl LdlFactor {
    /// Factor a symmetric matrix given by its upper triangle in CSC form
    /// (every stored entry must satisfy row ≤ col, with the diagonal present).
    pub fn new(upper: &SparseMatrix) -> Result<Self, SolverError> {
        let n = upper.ncols();
        if upper.nrows() != n {
            return Err(SolverError::DimensionMismatch(
                "LDL input must be square".to_string(),
            ));
        }

        // Symbolic: elimination tree and column counts of L.
        let mut parent = vec![usize::MAX; n];
        let mut flag = vec![usize::MAX; n];
        let mut l_nz = vec![0usize; n];
        for j in 0..n {
            flag[j] = j;
            for (row, _) in upper.col_iter(j) {
                if row > j {
                    return Err(SolverError::Factorization(
                        "LDL input has entries below the diagonal".to_string(),
                    ));
                }
                let mut i = row;
                while i != j && flag[i] != j {
                    if parent[i] == usize::MAX {
                        parent[i] = j;
                    }
                    l_nz[i] += 1;
                    flag[i] = j;
                    i = parent[i];
                }
            }
        }
        let mut col_ptr = vec![0usize; n + 1];
        for j in 0..n {
            col_ptr[j + 1] = col_ptr[j] + l_nz[j];
        }
        let nnz = col_ptr[n];

        // Numeric pass.
        let mut row_idx = vec![0usize; nnz];
        let mut values = vec![0.0f64; nnz];
        let mut diag = vec![0.0f64; n];
        let mut y = vec![0.0f64; n];
        let mut pattern = vec![0usize; n];
        let mut stack = vec![0usize; n];
        let mut fill = vec![0usize; n]; // entries written so far per column of L
        for f in flag.iter_mut() {
            *f = usize::MAX;
        }

        for j in 0..n {
            let mut top = n;
            flag[j] = j;
            for (row, val) in upper.col_iter(j) {
                y[row] += val;
                let mut len = 0usize;
                let mut i = row;
                while i != j && flag[i] != j {
                    pattern[len] = i;
                    len += 1;
                    flag[i] = j;
                    i = parent[i];
                }
                while len > 0 {
                    len -= 1;
                    top -= 1;
                    stack[top] = pattern[len];
                }
            }
            diag[j] = y[j];
            y[j] = 0.0;
            for &k in &stack[top..n] {
                let yk = y[k];
                y[k] = 0.0;
                let l_jk = yk / diag[k];
                for p in col_ptr[k]..col_ptr[k] + fill[k] {
                    y[row_idx[p]] -= values[p] * yk;
                }
                diag[j] -= l_jk * yk;
                let p = col_ptr[k] + fill[k];
                row_idx[p] = j;
                values[p] = l_jk;
                fill[k] += 1;
            }
            if diag[j] == 0.0 || !diag[j].is_finite() {
                return Err(SolverError::Factorization(format!(
                    "zero or non-finite pivot at column {j}"
                )));
            }
        }

        Ok(LdlFactor {
            n,
            col_ptr,
            row_idx,
            values,
            diag,
        })
    }

    /// Solve L D Lᵀ x = b in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        debug_assert_eq!(b.len(), self.n);
        for j in 0..self.n {
            let bj = b[j];
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                b[self.row_idx[p]] -= self.values[p] * bj;
            }
        }
        for j in 0..self.n {
            b[j] /= self.diag[j];
        }
        for j in (0..self.n).rev() {
            let mut acc = b[j];
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                acc -= self.values[p] * b[self.row_idx[p]];
            }
            b[j] = acc;
        }
    }
}

/// LDLᵀ factorization combined with a degree-sorted symmetric permutation.
pub struct PermutedLdl {
    order: Vec<usize>, // order[new] = old
    inv: Vec<usize>,   // inv[old] = new
    factor: LdlFactor,
}

impl PermutedLdl {
    /// Factor a symmetric matrix given as upper-triangle triplets (row ≤ col;
    /// duplicates are summed). The diagonal must be fully present.
    pub fn from_upper_triplets(
        n: usize,
        triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self, SolverError> {
        let merged = SparseMatrix::from_triplets(n, n, triplets)?;

        // Degree per index from the merged off-diagonal pattern.
        let mut degree = vec![0usize; n];
        for (i, j, _) in merged.triplets() {
            if i != j {
                degree[i] += 1;
                degree[j] += 1;
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (degree[i], i));
        let mut inv = vec![0usize; n];
        for (new, &old) in order.iter().enumerate() {
            inv[old] = new;
        }

        let mut permuted = Vec::with_capacity(merged.nnz());
        for (i, j, v) in merged.triplets() {
            let (pi, pj) = (inv[i], inv[j]);
            permuted.push((pi.min(pj), pi.max(pj), v));
        }
        let upper = SparseMatrix::from_triplets(n, n, permuted)?;
        let factor = LdlFactor::new(&upper)?;
        Ok(PermutedLdl { order, inv, factor })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        debug_assert_eq!(n, self.order.len());
        let mut work: Vec<f64> = (0..n).map(|new| rhs[self.order[new]]).collect();
        self.factor.solve_in_place(&mut work);
        let mut out = vec![0.0; n];
        for old in 0..n {
            out[old] = work[self.inv[old]];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_spd_system() {
        // A = [[4,1,0],[1,3,1],[0,1,2]], b = [1,2,3]
        let trips = vec![(0, 0, 4.0), (0, 1, 1.0), (1, 1, 3.0), (1, 2, 1.0), (2, 2, 2.0)];
        let f = PermutedLdl::from_upper_triplets(3, trips).unwrap();
        let x = f.solve(&[1.0, 2.0, 3.0]);
        // residual check
        let r0 = 4.0 * x[0] + x[1] - 1.0;
        let r1 = x[0] + 3.0 * x[1] + x[2] - 2.0;
        let r2 = x[1] + 2.0 * x[2] - 3.0;
        for r in [r0, r1, r2] {
            assert!(r.abs() < 1e-12, "residual {r}");
        }
    }

    #[test]
    fn solves_quasi_definite_system() {
        // [[1, 0, 1], [0, 1, 1], [1, 1, -1]] is quasi-definite.
        let trips = vec![(0, 0, 1.0), (1, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (2, 2, -1.0)];
        let f = PermutedLdl::from_upper_triplets(3, trips).unwrap();
        let b = [1.0, 0.0, 2.0];
        let x = f.solve(&b);
        let r0 = x[0] + x[2] - b[0];
        let r1 = x[1] + x[2] - b[1];
        let r2 = x[0] + x[1] - x[2] - b[2];
        for r in [r0, r1, r2] {
            assert!(r.abs() < 1e-12, "residual {r}");
        }
    }

    #[test]
    fn rejects_singular() {
        let trips = vec![(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0)];
        assert!(PermutedLdl::from_upper_triplets(2, trips).is_err());
    }
}
