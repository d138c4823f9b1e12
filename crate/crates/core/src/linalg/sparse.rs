use super::dense::Matrix;

/// Coordinate-format accumulator. Duplicates are summed in insertion order.
#[derive(Debug, Clone, Default)]
pub struct CooBuilder {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl CooBuilder {
    pub fn new(n: usize) -> Self {
        CooBuilder { n, entries: Vec::new() }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n && col < self.n);
        self.entries.push((row, col, value));
    }

    pub fn build(mut self) -> CsrMatrix {
        // Stable sort keeps the insertion order among duplicates, so the sums are
        // reproducible bit for bit.
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { n: self.n, row_ptr, col_idx, values }
    }
}

/// Square sparse matrix in compressed-row form, both triangles stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(n: usize) -> Self {
        CooBuilder::new(n).build()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[span.clone()].binary_search(&j) {
            Ok(pos) => self.values[span.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "matvec dimension mismatch");
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        super::dense::dot(x, &self.matvec(x))
    }

    /// Sum of two matrices of the same dimension.
    pub fn add(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.n, other.n);
        let mut coo = CooBuilder::new(self.n);
        for (i, j, v) in self.triplets().chain(other.triplets()) {
            coo.push(i, j, v);
        }
        coo.build()
    }

    pub fn scaled(&self, s: f64) -> CsrMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Exact transpose comparison.
    pub fn is_symmetric(&self) -> bool {
        self.triplets().all(|(i, j, v)| self.get(j, i) == v)
    }

    /// Rows that hold at least one nonzero value.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.row(i).any(|(_, v)| v != 0.0)).collect()
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n, self.n);
        for (i, j, v) in self.triplets() {
            m[(i, j)] += v;
        }
        m
    }

    pub fn from_dense(m: &Matrix) -> CsrMatrix {
        assert!(m.is_square());
        let mut coo = CooBuilder::new(m.rows());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if m[(i, j)] != 0.0 {
                    coo.push(i, j, m[(i, j)]);
                }
            }
        }
        coo.build()
    }

    /// Symmetric permutation: entry (i, j) of the result is entry (perm[i], perm[j]).
    pub fn permuted(&self, perm: &[usize]) -> CsrMatrix {
        assert_eq!(perm.len(), self.n);
        let mut inv = vec![0usize; self.n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut coo = CooBuilder::new(self.n);
        for (i, j, v) in self.triplets() {
            coo.push(inv[i], inv[j], v);
        }
        coo.build()
    }
}

/// Reverse Cuthill-McKee ordering of the sparsity graph. `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.dim();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).filter(|&(j, _)| j != i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));
    for &start in &by_degree {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let mut head = order.len();
        order.push(start);
        while head < order.len() {
            let node = order[head];
            head += 1;
            let mut next: Vec<usize> =
                a.row(node).map(|(j, _)| j).filter(|&j| !visited[j]).collect();
            next.sort_by_key(|&j| (degree[j], j));
            for j in next {
                visited[j] = true;
                order.push(j);
            }
        }
    }
    order.reverse();
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let mut coo = CooBuilder::new(3);
        coo.push(0, 1, 1.0);
        coo.push(2, 2, 4.0);
        coo.push(0, 1, 2.5);
        coo.push(1, 0, 3.5);
        let m = coo.build();
        assert_eq!(m.get(0, 1), 3.5);
        assert_eq!(m.get(1, 0), 3.5);
        assert_eq!(m.get(2, 2), 4.0);
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(m.nnz(), 3);
        assert!(m.is_symmetric());
        assert_eq!(m.support(), vec![0, 1, 2]);
    }

    #[test]
    fn permutation_roundtrip() {
        let dense = Matrix::from_rows(&[
            vec![4.0, 1.0, 0.0],
            vec![1.0, 5.0, 2.0],
            vec![0.0, 2.0, 6.0],
        ]);
        let a = CsrMatrix::from_dense(&dense);
        let perm = vec![2, 0, 1];
        let p = a.permuted(&perm);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(p.get(i, j), dense[(perm[i], perm[j])]);
            }
        }
    }

    #[test]
    fn rcm_is_a_permutation() {
        let mut coo = CooBuilder::new(6);
        for i in 0..6 {
            coo.push(i, i, 2.0);
            coo.push(i, (i + 3) % 6, -1.0);
            coo.push((i + 3) % 6, i, -1.0);
        }
        let perm = reverse_cuthill_mckee(&coo.build());
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..6).collect::<Vec<_>>());
    }
}
