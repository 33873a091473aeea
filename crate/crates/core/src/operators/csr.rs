//! Compressed sparse row storage for square matrices.

use nalgebra::DMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds an `n×n` matrix from `(row, col, value)` triplets. Duplicate
    /// positions are summed, explicit zeros are dropped.
    ///
    /// Panics if an index is out of range.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        for &(i, j, _) in &sorted {
            assert!(
                i < n && j < n,
                "triplet ({i}, {j}) out of range for n = {n}"
            );
        }
        sorted.sort_by_key(|a| (a.0, a.1));

        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(sorted.len());
        for (i, j, v) in sorted {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                rows.push(i);
                last = Some((i, j));
            }
        }
        // drop explicit zeros after summation
        let mut keep_cols = Vec::with_capacity(col_idx.len());
        let mut keep_vals = Vec::with_capacity(values.len());
        for ((i, j), v) in rows.into_iter().zip(col_idx).zip(values) {
            if v != 0.0 {
                row_ptr[i + 1] += 1;
                keep_cols.push(j);
                keep_vals.push(v);
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            col_idx: keep_cols,
            values: keep_vals,
        }
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        let mut t = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)] != 0.0 {
                    t.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), &t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates over stored `(row, col, value)` entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1])
                .map(move |p| (i, self.col_idx[p], self.values[p]))
        })
    }

    /// `y = A x`
    pub fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[p] * x[self.col_idx[p]];
            }
            *yi = acc;
        }
    }

    /// `y = Aᵀ x`
    pub fn mul_transpose_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (i, &xi) in x.iter().enumerate() {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                y[self.col_idx[p]] += self.values[p] * xi;
            }
        }
    }

    pub fn transpose(&self) -> Self {
        let t: Vec<_> = self.entries().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.n, &t)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.entries() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        crate::vector::norm2(&self.values)
    }

    /// `max |A + Aᵀ|` over all entries.
    pub fn max_symmetric_part(&self) -> f64 {
        let t = self.transpose();
        let mut worst = 0.0_f64;
        for i in 0..self.n {
            let (mut p, pe) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let (mut q, qe) = (t.row_ptr[i], t.row_ptr[i + 1]);
            while p < pe || q < qe {
                let cp = if p < pe { self.col_idx[p] } else { usize::MAX };
                let cq = if q < qe { t.col_idx[q] } else { usize::MAX };
                let s = if cp == cq {
                    let s = self.values[p] + t.values[q];
                    p += 1;
                    q += 1;
                    s
                } else if cp < cq {
                    p += 1;
                    self.values[p - 1]
                } else {
                    q += 1;
                    t.values[q - 1]
                };
                worst = worst.max(s.abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let a = CsrMatrix::from_triplets(2, &[(0, 1, 1.0), (0, 1, 2.0), (1, 0, 1.0), (1, 0, -1.0)]);
        assert_eq!(a.nnz(), 1);
        assert_eq!(
            a.to_dense(),
            DMatrix::from_row_slice(2, 2, &[0.0, 3.0, 0.0, 0.0])
        );
    }

    #[test]
    fn transpose_product_matches_dense() {
        let d = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 0.0, -1.0, 4.0, 5.0, 0.0, 0.5]);
        let a = CsrMatrix::from_dense(&d);
        let x = [0.3, -1.2, 2.0];
        let mut y = [0.0; 3];
        a.mul_transpose_into(&x, &mut y);
        let expected = d.transpose() * nalgebra::DVector::from_row_slice(&x);
        for i in 0..3 {
            assert!((y[i] - expected[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn symmetric_part_of_skew_is_zero() {
        let a =
            CsrMatrix::from_triplets(3, &[(0, 1, 2.0), (1, 0, -2.0), (1, 2, 1.0), (2, 1, -1.0)]);
        assert_eq!(a.max_symmetric_part(), 0.0);
        let b = CsrMatrix::from_triplets(3, &[(0, 1, 2.0), (1, 0, 2.0), (2, 2, 0.5)]);
        assert_eq!(b.max_symmetric_part(), 4.0);
    }
}
