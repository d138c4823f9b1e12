//! Householder reduction to tridiagonal form with Sturm-sequence bisection and
//! inverse iteration. Used for dense symmetric matrices too large for Jacobi
//! sweeps when only the leading part of the spectrum needs eigenvectors.

use super::dense::{dot, Matrix};

/// `A = H Tᵀ Hᵀ` with `T` tridiagonal and `H` a product of Householder reflectors.
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    reflectors: Vec<Vec<f64>>,
}

impl Tridiagonal {
    /// Reduces a symmetric matrix. Only symmetric input gives a meaningful result.
    pub fn reduce(a: &Matrix) -> Self {
        assert!(a.is_square());
        let n = a.rows();
        let mut work = a.clone();
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
        for k in 0..n.saturating_sub(2) {
            let x: Vec<f64> = work.row(k)[k + 1..].to_vec();
            let xnorm = dot(&x, &x).sqrt();
            diag[k] = work[(k, k)];
            if xnorm == 0.0 {
                off[k] = 0.0;
                reflectors.push(vec![0.0; x.len()]);
                continue;
            }
            let alpha = if x[0] > 0.0 { -xnorm } else { xnorm };
            let mut v = x;
            v[0] -= alpha;
            let vnorm = dot(&v, &v).sqrt();
            v.iter_mut().for_each(|t| *t /= vnorm);
            off[k] = alpha;

            // Trailing block update: A ← A − 2 v wᵀ − 2 w vᵀ with w = A v − (vᵀ A v) v.
            let m = n - k - 1;
            let mut p = vec![0.0; m];
            for (i, pi) in p.iter_mut().enumerate() {
                *pi = dot(&work.row(k + 1 + i)[k + 1..], &v);
            }
            let vp = dot(&v, &p);
            let w: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi - vp * vi).collect();
            for i in 0..m {
                let (vi, wi) = (v[i], w[i]);
                let row = &mut work.row_mut(k + 1 + i)[k + 1..];
                for j in 0..m {
                    row[j] -= 2.0 * (vi * w[j] + wi * v[j]);
                }
            }
            reflectors.push(v);
        }
        if n >= 2 {
            diag[n - 2] = work[(n - 2, n - 2)];
            off[n - 2] = work[(n - 2, n - 1)];
        }
        if n >= 1 {
            diag[n - 1] = work[(n - 1, n - 1)];
        }
        Tridiagonal { diag, off, reflectors }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    fn norm_bound(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly less than `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let (lo, hi) = self.norm_bound();
        let tiny = f64::MIN_POSITIVE.sqrt() * (hi - lo).abs().max(1.0);
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.dim() {
            let e2 = if i > 0 { self.off[i - 1] * self.off[i - 1] } else { 0.0 };
            q = self.diag[i] - x - if i > 0 { e2 / q } else { 0.0 };
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `index`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, index: usize) -> f64 {
        assert!(index < self.dim());
        let (mut lo, mut hi) = self.norm_bound();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        lo -= scale * 1e-14;
        hi += scale * 1e-14;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * scale {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// All eigenvalues in descending order.
    pub fn eigenvalues_desc(&self) -> Vec<f64> {
        (0..self.dim()).rev().map(|i| self.eigenvalue(i)).collect()
    }

    /// Orthonormal eigenvectors of the tridiagonal matrix for the given
    /// eigenvalues (assumed accurate), by inverse iteration. Vectors of
    /// clustered eigenvalues are kept mutually orthogonal.
    pub fn tridiagonal_vectors(&self, values: &[f64]) -> Vec<Vec<f64>> {
        let n = self.dim();
        let (lo, hi) = self.norm_bound();
        let tnorm = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        let cluster_tol = 1e-3 * tnorm;
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(values.len());
        let mut seed = 0x2545_f491_4f6c_dd1du64;
        for (idx, &lambda) in values.iter().enumerate() {
            let shift = lambda + 10.0 * f64::EPSILON * tnorm * (1 + idx % 3) as f64;
            let lu = TridiagLu::new(&self.diag, &self.off, shift, f64::EPSILON * tnorm);
            let mut x: Vec<f64> = (0..n)
                .map(|_| {
                    seed ^= seed << 13;
                    seed ^= seed >> 7;
                    seed ^= seed << 17;
                    (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
                })
                .collect();
            let cluster: Vec<usize> =
                (0..idx).filter(|&j| (values[j] - lambda).abs() <= cluster_tol).collect();
            for _ in 0..6 {
                for &j in &cluster {
                    let c = dot(&x, &out[j]);
                    super::dense::axpy(-c, &out[j], &mut x);
                }
                let nrm = dot(&x, &x).sqrt();
                x.iter_mut().for_each(|t| *t /= nrm);
                lu.solve(&mut x);
            }
            for _ in 0..2 {
                for &j in &cluster {
                    let c = dot(&x, &out[j]);
                    super::dense::axpy(-c, &out[j], &mut x);
                }
            }
            let nrm = dot(&x, &x).sqrt();
            x.iter_mut().for_each(|t| *t /= nrm);
            out.push(x);
        }
        out
    }

    /// Maps an eigenvector of the tridiagonal matrix back to the original basis.
    pub fn back_transform(&self, v: &mut [f64]) {
        for (k, h) in self.reflectors.iter().enumerate().rev() {
            let tail = &mut v[k + 1..];
            let c = 2.0 * dot(h, tail);
            if c != 0.0 {
                super::dense::axpy(-c, h, tail);
            }
        }
    }
}

// LU factorization with partial pivoting of T − shift·I.
struct TridiagLu {
    // Row i of U has entries at columns i, i+1, i+2.
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn new(diag: &[f64], off: &[f64], shift: f64, tiny: f64) -> Self {
        let n = diag.len();
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut mult = vec![0.0; n];
        let mut swapped = vec![false; n];
        // Current working row i: (a, b, c) at columns i, i+1, i+2.
        let mut a = diag.first().map_or(0.0, |d| d - shift);
        let mut b = off.first().copied().unwrap_or(0.0);
        let mut c = 0.0;
        for i in 0..n {
            if i + 1 == n {
                u0[i] = if a.abs() < tiny { tiny } else { a };
                break;
            }
            // Next row i+1: (sub, d, e) at columns i, i+1, i+2.
            let sub = off[i];
            let d = diag[i + 1] - shift;
            let e = if i + 2 < n { off[i + 1] } else { 0.0 };
            if sub.abs() > a.abs() {
                swapped[i] = true;
                u0[i] = sub;
                u1[i] = d;
                u2[i] = e;
                let m = a / sub;
                mult[i] = m;
                a = b - m * d;
                b = c - m * e;
            } else {
                let piv = if a.abs() < tiny { tiny } else { a };
                u0[i] = piv;
                u1[i] = b;
                u2[i] = c;
                let m = sub / piv;
                mult[i] = m;
                a = d - m * b;
                b = e - m * c;
            }
            c = 0.0;
        }
        TridiagLu { u0, u1, u2, mult, swapped }
    }

    fn solve(&self, x: &mut [f64]) {
        let n = x.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                x.swap(i, i + 1);
            }
            x[i + 1] -= self.mult[i] * x[i];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            if i + 1 < n {
                s -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * x[i + 2];
            }
            x[i] = s / self.u0[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{sym_eig_dense, DEFAULT_MAX_SWEEPS};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.gen_range(-1.0..1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    #[test]
    fn eigenvalues_agree_with_jacobi() {
        for seed in 0..5 {
            let a = random_symmetric(30, seed);
            let t = Tridiagonal::reduce(&a);
            let bis = t.eigenvalues_desc();
            let (jac, _) = sym_eig_dense(&a, 1e-15, DEFAULT_MAX_SWEEPS).unwrap();
            for (x, y) in bis.iter().zip(&jac) {
                assert!((x - y).abs() < 1e-12, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn eigenvectors_have_small_residual() {
        let a = random_symmetric(40, 11);
        let t = Tridiagonal::reduce(&a);
        let vals: Vec<f64> = t.eigenvalues_desc().into_iter().take(6).collect();
        let vecs = t.tridiagonal_vectors(&vals);
        let mut full = Vec::new();
        for (lambda, mut v) in vals.iter().zip(vecs) {
            t.back_transform(&mut v);
            let av = a.matvec(&v);
            let res: f64 = av.iter().zip(&v).map(|(x, y)| (x - lambda * y).powi(2)).sum();
            assert!(res.sqrt() < 1e-12, "residual {}", res.sqrt());
            full.push(v);
        }
        for i in 0..full.len() {
            for j in 0..full.len() {
                let d = dot(&full[i], &full[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((d - target).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn repeated_eigenvalues_get_orthogonal_vectors() {
        // diag(3, 3, 3, 1) rotated by a random orthogonal basis.
        let q = {
            let (_, v) = sym_eig_dense(&random_symmetric(4, 5), 1e-15, DEFAULT_MAX_SWEEPS).unwrap();
            v
        };
        let a = q.matmul(&Matrix::from_diag(&[3.0, 3.0, 3.0, 1.0])).matmul(&q.transpose());
        let t = Tridiagonal::reduce(&a);
        let vals: Vec<f64> = t.eigenvalues_desc().into_iter().take(3).collect();
        let mut vecs = t.tridiagonal_vectors(&vals);
        for v in vecs.iter_mut() {
            t.back_transform(v);
        }
        for i in 0..3 {
            let av = a.matvec(&vecs[i]);
            assert!(av.iter().zip(&vecs[i]).all(|(x, y)| (x - 3.0 * y).abs() < 1e-12));
            for j in 0..i {
                assert!(dot(&vecs[i], &vecs[j]).abs() < 1e-12);
            }
        }
    }
}
