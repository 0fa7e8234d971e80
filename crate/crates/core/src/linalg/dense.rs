//! Row-major dense matrices and the `gemm` kernel.

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            values: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn from_vec(n_rows: usize, n_cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n_rows * n_cols {
            return Err(Error::ShapeMismatch {
                op: "DenseMatrix::from_vec",
                details: format!("{} values for {}x{}", values.len(), n_rows, n_cols),
            });
        }
        Ok(Self {
            n_rows,
            n_cols,
            values,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput("DenseMatrix::from_rows"));
        }
        let n_cols = rows[0].len();
        let mut values = Vec::with_capacity(rows.len() * n_cols);
        for row in rows {
            if row.len() != n_cols {
                return Err(Error::ShapeMismatch {
                    op: "DenseMatrix::from_rows",
                    details: format!("ragged row: {} vs {}", row.len(), n_cols),
                });
            }
            values.extend_from_slice(row);
        }
        Ok(Self {
            n_rows: rows.len(),
            n_cols,
            values,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.n_cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Elementwise map into a new matrix.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            values: self.values.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Dense product with optional transposes: `op(a) * op(b)`.
///
/// Accumulation order over the inner dimension is fixed, so results do not
/// depend on the rayon thread count.
pub fn gemm(
    a: &DenseMatrix,
    b: &DenseMatrix,
    transpose_a: bool,
    transpose_b: bool,
) -> Result<DenseMatrix> {
    let (m, k_a) = if transpose_a {
        (a.n_cols(), a.n_rows())
    } else {
        (a.n_rows(), a.n_cols())
    };
    let (k_b, n) = if transpose_b {
        (b.n_cols(), b.n_rows())
    } else {
        (b.n_rows(), b.n_cols())
    };
    if k_a != k_b {
        return Err(Error::ShapeMismatch {
            op: "gemm",
            details: format!(
                "inner dims {} vs {} (a {}x{}{}, b {}x{}{})",
                k_a,
                k_b,
                a.n_rows(),
                a.n_cols(),
                if transpose_a { "^T" } else { "" },
                b.n_rows(),
                b.n_cols(),
                if transpose_b { "^T" } else { "" },
            ),
        });
    }
    let k = k_a;
    let mut out = DenseMatrix::zeros(m, n);
    match (transpose_a, transpose_b) {
        (false, false) => {
            out.values_mut()
                .par_chunks_mut(n)
                .enumerate()
                .for_each(|(i, out_row)| {
                    let a_row = a.row(i);
                    for (p, &s) in a_row.iter().enumerate() {
                        if s == 0.0 {
                            continue;
                        }
                        let b_row = b.row(p);
                        for (o, &x) in out_row.iter_mut().zip(b_row) {
                            *o += s * x;
                        }
                    }
                });
        }
        (true, false) => {
            // out[i, j] = sum_p a[p, i] * b[p, j]
            out.values_mut()
                .par_chunks_mut(n)
                .enumerate()
                .for_each(|(i, out_row)| {
                    for p in 0..k {
                        let s = a.get(p, i);
                        if s == 0.0 {
                            continue;
                        }
                        let b_row = b.row(p);
                        for (o, &x) in out_row.iter_mut().zip(b_row) {
                            *o += s * x;
                        }
                    }
                });
        }
        (false, true) => {
            // out[i, j] = dot(a.row(i), b.row(j))
            out.values_mut()
                .par_chunks_mut(n)
                .enumerate()
                .for_each(|(i, out_row)| {
                    let a_row = a.row(i);
                    for (j, o) in out_row.iter_mut().enumerate() {
                        let b_row = b.row(j);
                        let mut acc = 0.0;
                        for (&x, &y) in a_row.iter().zip(b_row) {
                            acc += x * y;
                        }
                        *o = acc;
                    }
                });
        }
        (true, true) => {
            // out[i, j] = sum_p a[p, i] * b[j, p]
            out.values_mut()
                .par_chunks_mut(n)
                .enumerate()
                .for_each(|(i, out_row)| {
                    for (j, o) in out_row.iter_mut().enumerate() {
                        let b_row = b.row(j);
                        let mut acc = 0.0;
                        for (p, &y) in b_row.iter().enumerate() {
                            acc += a.get(p, i) * y;
                        }
                        *o = acc;
                    }
                });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zz_t_identity_and_scalar() {
        let z = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let g = gemm(&z, &z, false, true).unwrap();
        assert_eq!(
            g,
            DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
        );

        let z = DenseMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let g = gemm(&z, &z, false, true).unwrap();
        assert_eq!(g.get(0, 0), 5.0);
    }

    #[test]
    fn transpose_flags_agree_with_explicit_transpose() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let b =
            DenseMatrix::from_rows(&[vec![7.0, 8.0], vec![9.0, 10.0], vec![11.0, 12.0]]).unwrap();
        let direct = gemm(&a, &b, false, false).unwrap();
        let via_ta = gemm(&a.transpose(), &b, true, false).unwrap();
        let via_tb = gemm(&a, &b.transpose(), false, true).unwrap();
        let via_tt = gemm(&a.transpose(), &b.transpose(), true, true).unwrap();
        assert_eq!(direct, via_ta);
        assert_eq!(direct, via_tb);
        assert_eq!(direct, via_tt);
    }

    #[test]
    fn gemm_rejects_bad_inner_dims() {
        let a = DenseMatrix::zeros(2, 3);
        let b = DenseMatrix::zeros(2, 3);
        assert!(gemm(&a, &b, false, false).is_err());
        assert!(gemm(&a, &b, false, true).is_ok());
    }
}
