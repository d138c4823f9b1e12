//! Generalized symmetric pencil `K x = μ B x` with `K` positive definite and
//! `B` positive semidefinite.
//!
//! The pencil is reduced to the standard problem for `C = L⁻¹ B L⁻ᵀ`
//! (`K = L Lᵀ`). Eigenvalues `θ` of `C` map to `μ = 1/θ`; directions with
//! `θ ≤ theta_tol · θ_max` are B-null (infinite Rayleigh quotient) and are
//! deflated. When `B` is supported on a small subset of the dofs (boundary
//! weights only) the same nonzero spectrum is obtained from a low-rank factor
//! `B = F Fᵀ` through the Gram matrix `(L⁻¹F)ᵀ(L⁻¹F)`.

use serde::Serialize;

use crate::assembly::OperatorPair;
use crate::linalg::dense::{fix_sign, sym_eig_dense, JacobiNotConverged, Matrix, DEFAULT_MAX_SWEEPS};
use crate::linalg::envelope::EnvelopeCholesky;
use crate::linalg::sparse::reverse_cuthill_mckee;
use crate::linalg::tridiag::Tridiagonal;
use crate::linalg::{dot, norm2};

pub use crate::linalg::dense::{cholesky_spd, sym_eig_dense as jacobi_eig, NotPositiveDefinite};

/// Dense kernels above this size switch from Jacobi sweeps to tridiagonal reduction.
pub const JACOBI_LIMIT: usize = 200;
/// Largest dense transformed matrix the CLI will form.
pub const DENSE_LIMIT: usize = 3000;

const DEFLATION_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct SolveOptions {
    /// Relative threshold on `θ / θ_max` below which a direction is deflated.
    pub theta_tol: f64,
    /// Jacobi stopping threshold on the off-diagonal norm relative to `‖C‖_F`.
    pub sweep_tol: f64,
    pub max_sweeps: usize,
    /// Keep the pulled-back deflated directions (forces the full `C` route).
    #[serde(skip)]
    pub keep_deflated: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { theta_tol: 1e-10, sweep_tol: 1e-14, max_sweeps: DEFAULT_MAX_SWEEPS, keep_deflated: false }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("K is not positive definite: pivot at dof {dof} is {pivot:e} (Assumption ASMP fails on the discrete space)")]
    NotPositiveDefinite { dof: usize, pivot: f64 },
    #[error("B vanishes identically (θ_max = {theta_max:e}); there is no finite spectrum (condition MP)")]
    AllDeflated { theta_max: f64 },
    #[error(transparent)]
    Jacobi(#[from] JacobiNotConverged),
    #[error("residual of a zero vector is undefined")]
    ZeroVector,
    #[error("vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("pencil of dimension {dim} exceeds the limit {limit} of this method")]
    TooLarge { dim: usize, limit: usize },
    #[error("determinant scan found {found} roots in (0, {mu_max}] but B has rank {rank}; refine the grid or raise mu_max")]
    GridTooCoarse { found: usize, rank: usize, mu_max: f64, roots: Vec<f64> },
}

/// Ascending eigenvalues with B-orthonormal, K-orthogonal eigenvectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub mus: Vec<f64>,
    /// Eigenvectors as columns, matching `mus`.
    pub vectors: Matrix,
    /// Number of deflated (B-null) directions.
    pub kernel_dim: usize,
    /// `‖Kφ − μBφ‖₂ / ‖Kφ‖₂` per pair.
    pub residuals: Vec<f64>,
    pub theta_tol: f64,
    pub theta_max: f64,
    /// Pulled-back deflated directions as columns, when requested.
    pub deflated: Option<Matrix>,
    /// Finite eigenvalues in total, whether or not their vectors were returned.
    pub available: usize,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.mus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mus.is_empty()
    }

    pub fn vector(&self, j: usize) -> Vec<f64> {
        self.vectors.col(j)
    }

    /// True when every finite eigenpair is present.
    pub fn is_complete(&self, dim: usize) -> bool {
        self.kernel_dim + self.len() == dim
    }
}

/// `‖Kx − μBx‖₂ / ‖Kx‖₂`.
pub fn residual(pair: &OperatorPair, mu: f64, x: &[f64]) -> Result<f64, SolverError> {
    if x.len() != pair.dim() {
        return Err(SolverError::LengthMismatch { expected: pair.dim(), found: x.len() });
    }
    if x.iter().all(|&v| v == 0.0) {
        return Err(SolverError::ZeroVector);
    }
    let kx = pair.stiffness.matvec(x);
    let bx = pair.mass.matvec(x);
    let r: Vec<f64> = kx.iter().zip(&bx).map(|(a, b)| a - mu * b).collect();
    Ok(norm2(&r) / norm2(&kx))
}

/// Descending eigenpairs of a dense symmetric matrix; vectors only for the
/// leading `want` eigenvalues.
fn leading_eigenpairs(
    c: &Matrix,
    want: impl FnOnce(&[f64]) -> usize,
    opts: &SolveOptions,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), SolverError> {
    if c.rows() <= JACOBI_LIMIT {
        let (values, vecs) = sym_eig_dense(c, opts.sweep_tol, opts.max_sweeps)?;
        let count = want(&values);
        let vectors = (0..count).map(|j| vecs.col(j)).collect();
        return Ok((values, vectors));
    }
    let tri = Tridiagonal::reduce(c);
    let values = tri.eigenvalues_desc();
    let count = want(&values);
    let mut vectors = tri.tridiagonal_vectors(&values[..count]);
    for v in vectors.iter_mut() {
        tri.back_transform(v);
    }
    Ok((values, vectors))
}

/// Solves the pencil and returns up to `n_eigs` pairs with the smallest `μ`.
/// Size of the dense matrix `solve_pencil` forms without `keep_deflated`.
pub fn dense_dimension(pair: &OperatorPair) -> usize {
    let n = pair.dim();
    let s = pair.mass.support().len();
    if 2 * s <= n { s } else { n }
}

pub fn solve_pencil(pair: &OperatorPair, n_eigs: usize, opts: &SolveOptions) -> Result<Spectrum, SolverError> {
    let n = pair.dim();
    let perm = reverse_cuthill_mckee(&pair.stiffness);
    let kp = pair.stiffness.permuted(&perm);
    let bp = pair.mass.permuted(&perm);
    let chol = EnvelopeCholesky::factor(&kp)
        .map_err(|e| SolverError::NotPositiveDefinite { dof: perm[e.index], pivot: e.pivot })?;

    let support = bp.support();
    let low_rank = !opts.keep_deflated && 2 * support.len() <= n;
    let theta_cut = |values: &[f64]| -> Result<(f64, usize), SolverError> {
        let theta_max = values.first().copied().unwrap_or(0.0);
        if !(theta_max > DEFLATION_FLOOR) {
            return Err(SolverError::AllDeflated { theta_max });
        }
        let kept = values.iter().take_while(|&&t| t > opts.theta_tol * theta_max).count();
        Ok((theta_max, kept))
    };

    // Each returned `y` satisfies Cy = θy, ‖y‖ = 1 in the permuted ordering.
    let (values, ys, hidden_kernel) = if low_rank {
        let s = support.len();
        let bss = Matrix::from_fn(s, s, |i, j| bp.get(support[i], support[j]));
        let (bvals, bvecs) = if s <= JACOBI_LIMIT {
            sym_eig_dense(&bss, opts.sweep_tol, opts.max_sweeps)?
        } else {
            full_tridiagonal_eig(&bss)
        };
        let mut f = Matrix::zeros(n, s);
        for (r, &dof) in support.iter().enumerate() {
            for c in 0..s {
                f[(dof, c)] = bvecs[(r, c)] * bvals[c].max(0.0).sqrt();
            }
        }
        chol.forward_many(&mut f);
        let gram = f.transpose().matmul(&f);
        let mut cut = Ok((0.0, 0));
        let (values, ws) = leading_eigenpairs(
            &gram,
            |vals| {
                cut = theta_cut(vals);
                cut.as_ref().map_or(0, |&(_, kept)| kept.min(n_eigs))
            },
            opts,
        )?;
        cut?;
        let ys = ws
            .iter()
            .map(|w| {
                let mut y = f.matvec(w);
                let nrm = norm2(&y);
                if nrm > 0.0 {
                    y.iter_mut().for_each(|v| *v /= nrm);
                }
                y
            })
            .collect::<Vec<_>>();
        (values, ys, n - s)
    } else {
        let mut c = bp.to_dense();
        chol.forward_many(&mut c);
        let mut c = c.transpose();
        chol.forward_many(&mut c);
        let c = Matrix::from_fn(n, n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
        let keep_all = opts.keep_deflated;
        let mut cut = Ok((0.0, 0));
        let (values, ys) = leading_eigenpairs(
            &c,
            |vals| {
                cut = theta_cut(vals);
                match &cut {
                    Ok(_) if keep_all => vals.len(),
                    Ok((_, kept)) => (*kept).min(n_eigs),
                    Err(_) => 0,
                }
            },
            opts,
        )?;
        cut?;
        (values, ys, 0)
    };

    let (theta_max, kept) = theta_cut(&values)?;
    let count = kept.min(n_eigs);
    let unpermute = |xp: &[f64]| {
        let mut x = vec![0.0; n];
        for (j, &old) in perm.iter().enumerate() {
            x[old] = xp[j];
        }
        x
    };

    let mut mus = Vec::with_capacity(count);
    let mut vectors = Matrix::zeros(n, count);
    let mut residuals = Vec::with_capacity(count);
    for j in 0..count {
        let mut x = ys[j].clone();
        chol.backward(&mut x);
        let mut x = unpermute(&x);
        let bnorm = pair.mass.quadratic_form(&x).sqrt();
        x.iter_mut().for_each(|v| *v /= bnorm);
        fix_sign(&mut x);
        let mu = 1.0 / values[j];
        residuals.push(residual(pair, mu, &x)?);
        mus.push(mu);
        vectors.set_col(j, &x);
    }

    let deflated = if opts.keep_deflated {
        let cols: Vec<Vec<f64>> = (kept..values.len())
            .map(|j| {
                let mut z = ys[j].clone();
                chol.backward(&mut z);
                unpermute(&z)
            })
            .collect();
        let mut m = Matrix::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            m.set_col(j, c);
        }
        Some(m)
    } else {
        None
    };

    Ok(Spectrum {
        mus,
        vectors,
        kernel_dim: hidden_kernel + values.len() - kept,
        residuals,
        theta_tol: opts.theta_tol,
        theta_max,
        deflated,
        available: kept,
    })
}

fn full_tridiagonal_eig(a: &Matrix) -> (Vec<f64>, Matrix) {
    let tri = Tridiagonal::reduce(a);
    let values = tri.eigenvalues_desc();
    let mut vecs = tri.tridiagonal_vectors(&values);
    let mut out = Matrix::zeros(a.rows(), a.rows());
    for (j, v) in vecs.iter_mut().enumerate() {
        tri.back_transform(v);
        out.set_col(j, v);
    }
    (values, out)
}

/// Largest pencil dimension accepted by [`det_scan_oracle`].
pub const DET_SCAN_LIMIT: usize = 12;

/// Independent eigenvalue oracle: scans the sign of `det(K − μB)` on a uniform
/// grid over `(0, mu_max]` and bisects every sign change to `1e-12`.
///
/// Fails with [`SolverError::GridTooCoarse`] when the number of roots found
/// differs from the numerical rank of `B` (two roots in one cell, or roots
/// beyond `mu_max`).
pub fn det_scan_oracle(pair: &OperatorPair, mu_max: f64, grid_points: usize) -> Result<Vec<f64>, SolverError> {
    let n = pair.dim();
    if n > DET_SCAN_LIMIT {
        return Err(SolverError::TooLarge { dim: n, limit: DET_SCAN_LIMIT });
    }
    let k = pair.stiffness.to_dense();
    let b = pair.mass.to_dense();
    let sign_at = |mu: f64| -> f64 {
        let shifted = Matrix::from_fn(n, n, |i, j| k[(i, j)] - mu * b[(i, j)]);
        det_sign(&shifted)
    };
    let mut roots = Vec::new();
    let mut prev_mu = 0.0;
    let mut prev_sign = sign_at(0.0);
    for step in 1..=grid_points {
        let mu = mu_max * step as f64 / grid_points as f64;
        let sign = sign_at(mu);
        if sign == 0.0 {
            roots.push(mu);
        } else if prev_sign != 0.0 && sign != prev_sign {
            let (mut lo, mut hi) = (prev_mu, mu);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let s = sign_at(mid);
                if s == 0.0 {
                    lo = mid;
                    hi = mid;
                } else if s == prev_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_mu = mu;
        prev_sign = sign;
    }
    let rank = numerical_rank(&b);
    if roots.len() != rank {
        return Err(SolverError::GridTooCoarse { found: roots.len(), rank, mu_max, roots });
    }
    Ok(roots)
}

// Sign of the determinant by Gaussian elimination with partial pivoting.
fn det_sign(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut m = a.clone();
    let mut sign = 1.0;
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs())).unwrap();
        if m[(piv, col)] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..n {
                let t = m[(col, j)];
                m[(col, j)] = m[(piv, j)];
                m[(piv, j)] = t;
            }
            sign = -sign;
        }
        let p = m[(col, col)];
        if p < 0.0 {
            sign = -sign;
        }
        for i in (col + 1)..n {
            let f = m[(i, col)] / p;
            if f != 0.0 {
                for j in col..n {
                    m[(i, j)] -= f * m[(col, j)];
                }
            }
        }
    }
    sign
}

// Rank by Gaussian elimination with full pivoting, relative tolerance 1e-10.
pub(crate) fn numerical_rank(a: &Matrix) -> usize {
    let n = a.rows();
    let mut m = a.clone();
    let scale = m.max_abs();
    if scale == 0.0 {
        return 0;
    }
    let mut rank = 0;
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..a.cols()).collect();
    while !rows.is_empty() && !cols.is_empty() {
        let mut best = (0, 0, 0.0_f64);
        for (ri, &r) in rows.iter().enumerate() {
            for (ci, &c) in cols.iter().enumerate() {
                if m[(r, c)].abs() > best.2 {
                    best = (ri, ci, m[(r, c)].abs());
                }
            }
        }
        if best.2 <= 1e-10 * scale {
            break;
        }
        let pr = rows.swap_remove(best.0);
        let pc = cols.swap_remove(best.1);
        rank += 1;
        for &r in &rows {
            let f = m[(r, pc)] / m[(pr, pc)];
            for &c in &cols {
                m[(r, c)] -= f * m[(pr, c)];
            }
        }
    }
    rank
}

/// `max |ΦᵀBΦ − I|` and `max |ΦᵀKΦ − diag(μ)| / max μ`.
pub fn orthonormality_defects(spec: &Spectrum, pair: &OperatorPair) -> (f64, f64) {
    let m = spec.len();
    let cols: Vec<Vec<f64>> = (0..m).map(|j| spec.vector(j)).collect();
    let kcols: Vec<Vec<f64>> = cols.iter().map(|c| pair.stiffness.matvec(c)).collect();
    let bcols: Vec<Vec<f64>> = cols.iter().map(|c| pair.mass.matvec(c)).collect();
    let mu_max = spec.mus.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut b_def = 0.0_f64;
    let mut k_def = 0.0_f64;
    for i in 0..m {
        for j in 0..m {
            let target_b = if i == j { 1.0 } else { 0.0 };
            let target_k = if i == j { spec.mus[i] } else { 0.0 };
            b_def = b_def.max((dot(&cols[i], &bcols[j]) - target_b).abs());
            k_def = k_def.max((dot(&cols[i], &kcols[j]) - target_k).abs() / mu_max);
        }
    }
    (b_def, k_def)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CsrMatrix;

    fn pair(k: &[Vec<f64>], b: &[Vec<f64>]) -> OperatorPair {
        OperatorPair::from_matrices(
            CsrMatrix::from_dense(&Matrix::from_rows(k)),
            CsrMatrix::from_dense(&Matrix::from_rows(b)),
        )
    }

    #[test]
    fn diagonal_pencil() {
        let p = pair(&[vec![2.0, 0.0], vec![0.0, 3.0]], &[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let s = solve_pencil(&p, 5, &SolveOptions::default()).unwrap();
        assert_eq!(s.kernel_dim, 0);
        assert!((s.mus[0] - 2.0).abs() < 1e-14 && (s.mus[1] - 3.0).abs() < 1e-14);
        assert!(s.residuals.iter().all(|&r| r <= 1e-14));
        assert!(s.is_complete(2));
    }

    #[test]
    fn singular_weight_deflates() {
        let p = pair(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[vec![1.0, 0.0], vec![0.0, 0.0]]);
        let opts = SolveOptions { keep_deflated: true, ..SolveOptions::default() };
        let s = solve_pencil(&p, 5, &opts).unwrap();
        assert_eq!(s.mus.len(), 1);
        assert!((s.mus[0] - 1.0).abs() < 1e-14);
        assert_eq!(s.kernel_dim, 1);
        let z = s.deflated.unwrap().col(0);
        assert!(p.mass.quadratic_form(&z) <= 10.0 * s.theta_tol * s.theta_max * p.stiffness.quadratic_form(&z));
    }

    #[test]
    fn zero_weight_is_an_error() {
        let p = pair(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert!(matches!(solve_pencil(&p, 1, &SolveOptions::default()), Err(SolverError::AllDeflated { .. })));
    }

    #[test]
    fn indefinite_stiffness_is_an_error() {
        let p = pair(&[vec![1.0, 2.0], vec![2.0, 1.0]], &[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(matches!(solve_pencil(&p, 1, &SolveOptions::default()), Err(SolverError::NotPositiveDefinite { .. })));
    }

    #[test]
    fn residual_behaviour() {
        let p = pair(&[vec![2.0, 0.0], vec![0.0, 3.0]], &[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(residual(&p, 2.0, &[1.0, 0.0]).unwrap() <= 1e-14);
        assert_eq!(residual(&p, 2.0, &[0.0, 0.0]), Err(SolverError::ZeroVector));
        let mut last = 0.0;
        for e in [1e-6, 1e-4, 1e-2] {
            let r = residual(&p, 2.0, &[1.0, e]).unwrap();
            assert!(r > last);
            last = r;
        }
        assert!(residual(&p, 2.0, &[1.0, 1.0]).unwrap() > 0.0);
    }

    #[test]
    fn det_scan_small_cases() {
        let p = pair(&[vec![2.0, 0.0], vec![0.0, 3.0]], &[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let roots = det_scan_oracle(&p, 10.0, 1000).unwrap();
        assert!((roots[0] - 2.0).abs() < 1e-11 && (roots[1] - 3.0).abs() < 1e-11);
        let p = pair(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[vec![1.0, 0.0], vec![0.0, 0.0]]);
        let roots = det_scan_oracle(&p, 10.0, 1000).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 1.0).abs() < 1e-11);
        let p = pair(&[vec![2.0, 0.0], vec![0.0, 3.0]], &[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(matches!(det_scan_oracle(&p, 2.5, 100), Err(SolverError::GridTooCoarse { found: 1, rank: 2, .. })));
    }

    #[test]
    fn rank_by_elimination() {
        let b = Matrix::from_rows(&[vec![1.0, 1.0, 0.0], vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 2.0]]);
        assert_eq!(numerical_rank(&b), 2);
        assert_eq!(numerical_rank(&Matrix::zeros(3, 3)), 0);
    }
}
