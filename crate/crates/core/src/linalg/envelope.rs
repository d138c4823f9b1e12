use super::dense::{cholesky_spd, dot, Matrix, NotPositiveDefinite};
use super::sparse::CsrMatrix;

/// Lower-triangular Cholesky factor stored by rows over the matrix envelope.
///
/// Row `i` holds `L[i][first[i]..=i]`. Fill-in of a Cholesky factor never leaves
/// the envelope of the input, so the factor needs no more storage than that.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    first: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

impl EnvelopeCholesky {
    /// Factors a symmetric positive definite sparse matrix in its given ordering.
    pub fn factor(a: &CsrMatrix) -> Result<Self, NotPositiveDefinite> {
        let n = a.dim();
        let first: Vec<usize> = (0..n)
            .map(|i| a.row(i).map(|(j, _)| j).filter(|&j| j <= i).min().unwrap_or(i))
            .collect();
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let fi = first[i];
            let mut row = vec![0.0; i - fi + 1];
            for (j, v) in a.row(i) {
                if j <= i {
                    row[j - fi] = v;
                }
            }
            for j in fi..i {
                let fj = first[j];
                let start = fi.max(fj);
                let lj = &rows[j];
                let s = dot(&row[start - fi..j - fi], &lj[start - fj..j - fj]);
                row[j - fi] = (row[j - fi] - s) / lj[j - fj];
            }
            let s = dot(&row[..i - fi], &row[..i - fi]);
            let d = row[i - fi] - s;
            if !(d > 0.0) || !d.is_finite() {
                return Err(NotPositiveDefinite { index: i, pivot: d });
            }
            row[i - fi] = d.sqrt();
            rows.push(row);
        }
        Ok(EnvelopeCholesky { first, rows })
    }

    /// Factors a dense symmetric matrix, delegating to the dense kernel.
    pub fn factor_dense(a: &Matrix) -> Result<Self, NotPositiveDefinite> {
        let l = cholesky_spd(a)?;
        let n = l.rows();
        let rows = (0..n).map(|i| l.row(i)[..=i].to_vec()).collect();
        Ok(EnvelopeCholesky { first: vec![0; n], rows })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Number of stored entries of the factor.
    pub fn envelope_size(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i || j < self.first[i] {
            0.0
        } else {
            self.rows[i][j - self.first[i]]
        }
    }

    pub fn to_dense(&self) -> Matrix {
        let n = self.dim();
        Matrix::from_fn(n, n, |i, j| self.get(i, j))
    }

    /// Solves `L z = b` in place.
    pub fn forward(&self, b: &mut [f64]) {
        for i in 0..self.dim() {
            let fi = self.first[i];
            let row = &self.rows[i];
            let s = dot(&row[..i - fi], &b[fi..i]);
            b[i] = (b[i] - s) / row[i - fi];
        }
    }

    /// Solves `Lᵀ x = z` in place.
    pub fn backward(&self, z: &mut [f64]) {
        for i in (0..self.dim()).rev() {
            let fi = self.first[i];
            let row = &self.rows[i];
            z[i] /= row[i - fi];
            let xi = z[i];
            for (zk, &lik) in z[fi..i].iter_mut().zip(&row[..i - fi]) {
                *zk -= lik * xi;
            }
        }
    }

    /// Solves `L Z = B` for a dense right-hand side with many columns, in place.
    pub fn forward_many(&self, b: &mut Matrix) {
        assert_eq!(b.rows(), self.dim());
        let m = b.cols();
        let mut acc = vec![0.0; m];
        for i in 0..self.dim() {
            let fi = self.first[i];
            let row = &self.rows[i];
            acc.copy_from_slice(b.row(i));
            for (k, &lik) in (fi..i).zip(row.iter()) {
                if lik != 0.0 {
                    super::dense::axpy(-lik, b.row(k), &mut acc);
                }
            }
            let d = row[i - fi];
            for (dst, a) in b.row_mut(i).iter_mut().zip(&acc) {
                *dst = a / d;
            }
        }
    }
}
