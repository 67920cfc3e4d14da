//! Compressed sparse column matrices, just enough for the QP solver.

use crate::SolverError;

/// Sparse matrix in compressed sparse column form with sorted, deduplicated
/// row indices within each column.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            col_ptr: vec![0; ncols + 1],
            row_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            nrows: n,
            ncols: n,
            col_ptr: (0..=n).collect(),
            row_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Build from (row, col, value) triplets. Duplicate entries are summed.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self, SolverError> {
        for &(i, j, _) in &triplets {
            if i >= nrows || j >= ncols {
                return Err(SolverError::DimensionMismatch(format!(
                    "triplet ({i}, {j}) outside {nrows}x{ncols} matrix"
                )));
            }
        }
        triplets.sort_unstable_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));

        let mut out_col_ptr = vec![0usize; ncols + 1];
        let mut out_row = Vec::with_capacity(triplets.len());
        let mut out_val = Vec::with_capacity(triplets.len());
        let mut t = 0usize;
        for col in 0..ncols {
            while t < triplets.len() && triplets[t].1 == col {
                let row = triplets[t].0;
                let mut v = triplets[t].2;
                t += 1;
                while t < triplets.len() && triplets[t].1 == col && triplets[t].0 == row {
                    v += triplets[t].2;
                    t += 1;
                }
                out_row.push(row);
                out_val.push(v);
            }
            out_col_ptr[col + 1] = out_row.len();
        }
        Ok(SparseMatrix {
            nrows,
            ncols,
            col_ptr: out_col_ptr,
            row_idx: out_row,
            values: out_val,
        })
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self, SolverError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut trips = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(SolverError::DimensionMismatch(
                    "ragged dense matrix".to_string(),
                ));
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    trips.push((i, j, v));
                }
            }
        }
        Self::from_triplets(nrows, ncols, trips)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.ncols);
        let mut y = vec![0.0; self.nrows];
        for j in 0..self.ncols {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                y[self.row_idx[p]] += self.values[p] * xj;
            }
        }
        y
    }

    /// y = Aᵀ x
    pub fn mul_vec_t(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.nrows);
        let mut y = vec![0.0; self.ncols];
        for j in 0..self.ncols {
            let mut acc = 0.0;
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                acc += self.values[p] * x[self.row_idx[p]];
            }
            y[j] = acc;
        }
        y
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut trips = Vec::with_capacity(self.nnz());
        for (i, j, v) in self.triplets() {
            trips.push((j, i, v));
        }
        SparseMatrix::from_triplets(self.ncols, self.nrows, trips)
            .expect("transpose preserves bounds")
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.ncols).flat_map(move |j| {
            (self.col_ptr[j]..self.col_ptr[j + 1]).map(move |p| (self.row_idx[p], j, self.values[p]))
        })
    }

    /// Iterate the entries of one column as (row, value).
    pub fn col_iter(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.col_ptr[j]..self.col_ptr[j + 1]).map(move |p| (self.row_idx[p], self.values[p]))
    }

    pub fn col_inf_norms(&self) -> Vec<f64> {
        let mut norms = vec![0.0f64; self.ncols];
        for j in 0..self.ncols {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                norms[j] = norms[j].max(self.values[p].abs());
            }
        }
        norms
    }

    pub fn row_inf_norms(&self) -> Vec<f64> {
        let mut norms = vec![0.0f64; self.nrows];
        for p in 0..self.nnz() {
            let i = self.row_idx[p];
            norms[i] = norms[i].max(self.values[p].abs());
        }
        norms
    }

    pub fn inf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// In-place A ← diag(row_scale) · A · diag(col_scale).
    pub fn scale(&mut self, row_scale: &[f64], col_scale: &[f64]) {
        debug_assert_eq!(row_scale.len(), self.nrows);
        debug_assert_eq!(col_scale.len(), self.ncols);
        for j in 0..self.ncols {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                self.values[p] *= row_scale[self.row_idx[p]] * col_scale[j];
            }
        }
    }

    pub fn scale_values(&mut self, c: f64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    /// Largest |A_ij − A_ji| over all index pairs.
    pub fn max_symmetry_violation(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        let t = self.transpose();
        let mut worst = 0.0f64;
        for j in 0..self.ncols {
            let mut a = self.col_ptr[j];
            let mut b = t.col_ptr[j];
            let (a_end, b_end) = (self.col_ptr[j + 1], t.col_ptr[j + 1]);
            while a < a_end || b < b_end {
                if a < a_end && (b >= b_end || self.row_idx[a] < t.row_idx[b]) {
                    worst = worst.max(self.values[a].abs());
                    a += 1;
                } else if b < b_end && (a >= a_end || t.row_idx[b] < self.row_idx[a]) {
                    worst = worst.max(t.values[b].abs());
                    b += 1;
                } else {
                    worst = worst.max((self.values[a] - t.values[b]).abs());
                    a += 1;
                    b += 1;
                }
            }
        }
        worst
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, j, v) in self.triplets() {
            out[i][j] += v;
        }
        out
    }
}
