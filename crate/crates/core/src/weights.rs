//! Matrix-valued coefficient fields and their admissibility checks.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::linalg::dense::{sym_eig_dense, Matrix, DEFAULT_MAX_SWEEPS};
use crate::mesh::{Point, TriMesh};
use crate::quadrature;

/// Absolute tolerance on the smallest eigenvalue of a weight: anything above
/// `-PSD_TOL` counts as positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;
/// A weight is positive definite at a point when its smallest eigenvalue exceeds this.
pub const PD_TOL: f64 = 1e-10;
/// Relative Frobenius tolerance on `W - Wᵀ`.
pub const SYMMETRY_TOL: f64 = 1e-12;

const EIG_SWEEP_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Support {
    Interior,
    Boundary,
}

/// Which coefficient a field plays in the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Role {
    A,
    Sigma,
    M,
    P,
}

impl Role {
    pub fn support(self) -> Support {
        match self {
            Role::A | Role::M => Support::Interior,
            Role::Sigma | Role::P => Support::Boundary,
        }
    }

    /// Label of the admissibility condition the role must satisfy.
    pub fn condition(self) -> &'static str {
        match self {
            Role::A => "A2",
            Role::Sigma => "S2",
            Role::M => "M1",
            Role::P => "P1",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::A => "A",
            Role::Sigma => "Sigma",
            Role::M => "M",
            Role::P => "P",
        })
    }
}

pub type WeightFn = Arc<dyn Fn(Point) -> Matrix + Send + Sync>;

#[derive(Clone)]
pub enum WeightRule {
    Constant(Matrix),
    PerTag(BTreeMap<u32, Matrix>),
    Function(WeightFn),
}

impl fmt::Debug for WeightRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightRule::Constant(m) => f.debug_tuple("Constant").field(m).finish(),
            WeightRule::PerTag(t) => f.debug_tuple("PerTag").field(t).finish(),
            WeightRule::Function(_) => f.write_str("Function(..)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WeightError {
    #[error("weight is not symmetric at ({x}, {y}): relative asymmetry {defect:e}")]
    Asymmetric { x: f64, y: f64, defect: f64 },
    #[error("weight has no entry for tag {0}")]
    MissingTag(u32),
    #[error("weight matrix is {rows}x{cols}, expected {k}x{k}")]
    Shape { rows: usize, cols: usize, k: usize },
    #[error("weight has non-finite entries at ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("{role} is supported on the {found:?} but must live on the {expected:?}")]
    SupportMismatch { role: Role, expected: Support, found: Support },
    #[error("component counts differ: {0:?}")]
    DimensionMismatch(Vec<usize>),
}

/// A symmetric k×k matrix-valued coefficient over the interior or the boundary.
#[derive(Debug, Clone)]
pub struct MatrixWeightField {
    k: usize,
    support: Support,
    rule: WeightRule,
}

impl MatrixWeightField {
    pub fn new(k: usize, support: Support, rule: WeightRule) -> Self {
        assert!(k >= 1, "weight fields need k >= 1");
        MatrixWeightField { k, support, rule }
    }

    pub fn constant(support: Support, matrix: Matrix) -> Self {
        Self::new(matrix.rows(), support, WeightRule::Constant(matrix))
    }

    pub fn zero(k: usize, support: Support) -> Self {
        Self::new(k, support, WeightRule::Constant(Matrix::zeros(k, k)))
    }

    pub fn identity(k: usize, support: Support) -> Self {
        Self::new(k, support, WeightRule::Constant(Matrix::identity(k)))
    }

    pub fn scalar(support: Support, value: f64) -> Self {
        Self::new(1, support, WeightRule::Constant(Matrix::from_diag(&[value])))
    }

    pub fn per_tag(k: usize, support: Support, table: BTreeMap<u32, Matrix>) -> Self {
        Self::new(k, support, WeightRule::PerTag(table))
    }

    pub fn function(
        k: usize,
        support: Support,
        f: impl Fn(Point) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        Self::new(k, support, WeightRule::Function(Arc::new(f)))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn rule(&self) -> &WeightRule {
        &self.rule
    }

    /// True when the field is the constant zero matrix.
    pub fn is_zero(&self) -> bool {
        matches!(&self.rule, WeightRule::Constant(m) if m.max_abs() == 0.0)
    }

    /// Evaluates the weight at a point with the given region or boundary tag.
    pub fn eval(&self, point: Point, tag: u32) -> Result<Matrix, WeightError> {
        let m = match &self.rule {
            WeightRule::Constant(m) => m.clone(),
            WeightRule::PerTag(table) => table.get(&tag).cloned().ok_or(WeightError::MissingTag(tag))?,
            WeightRule::Function(f) => f(point),
        };
        if m.rows() != self.k || m.cols() != self.k {
            return Err(WeightError::Shape { rows: m.rows(), cols: m.cols(), k: self.k });
        }
        if !m.as_slice().iter().all(|v| v.is_finite()) {
            return Err(WeightError::NonFinite { x: point[0], y: point[1] });
        }
        let norm = m.frobenius_norm();
        if norm > 0.0 {
            let defect = m.sub(&m.transpose()).frobenius_norm() / norm;
            if defect > SYMMETRY_TOL {
                return Err(WeightError::Asymmetric { x: point[0], y: point[1], defect });
            }
        }
        Ok(m)
    }

    /// Replaces `J` by `Qᵀ J Q` at every point.
    pub fn conjugated(&self, q: &Matrix) -> MatrixWeightField {
        let qt = q.transpose();
        let conj = {
            let (q, qt) = (q.clone(), qt.clone());
            move |m: &Matrix| qt.matmul(m).matmul(&q)
        };
        let rule = match &self.rule {
            WeightRule::Constant(m) => WeightRule::Constant(conj(m)),
            WeightRule::PerTag(t) => WeightRule::PerTag(t.iter().map(|(k, m)| (*k, conj(m))).collect()),
            WeightRule::Function(f) => {
                let f = Arc::clone(f);
                WeightRule::Function(Arc::new(move |p| conj(&f(p))))
            }
        };
        MatrixWeightField { k: self.k, support: self.support, rule }
    }

    /// Scales the field by a nonnegative factor.
    pub fn scaled(&self, s: f64) -> MatrixWeightField {
        let scale = move |m: &Matrix| {
            let mut m = m.clone();
            m.scale(s);
            m
        };
        let rule = match &self.rule {
            WeightRule::Constant(m) => WeightRule::Constant(scale(m)),
            WeightRule::PerTag(t) => WeightRule::PerTag(t.iter().map(|(k, m)| (*k, scale(m))).collect()),
            WeightRule::Function(f) => {
                let f = Arc::clone(f);
                WeightRule::Function(Arc::new(move |p| scale(&f(p))))
            }
        };
        MatrixWeightField { k: self.k, support: self.support, rule }
    }

    /// Restricts the field to a single diagonal entry, giving a scalar field.
    pub fn diagonal_entry(&self, c: usize) -> MatrixWeightField {
        let pick = move |m: &Matrix| Matrix::from_diag(&[m[(c, c)]]);
        let rule = match &self.rule {
            WeightRule::Constant(m) => WeightRule::Constant(pick(m)),
            WeightRule::PerTag(t) => WeightRule::PerTag(t.iter().map(|(k, m)| (*k, pick(m))).collect()),
            WeightRule::Function(f) => {
                let f = Arc::clone(f);
                WeightRule::Function(Arc::new(move |p| pick(&f(p))))
            }
        };
        MatrixWeightField { k: 1, support: self.support, rule }
    }
}

/// Eigen-decomposition `W = Qᵀ D Q` of a symmetric matrix.
///
/// The rows of `Q` are orthonormal eigenvectors and `D` lists the eigenvalues
/// in nonincreasing order.
pub fn eigen_decompose(matrix: &Matrix) -> (Matrix, Vec<f64>) {
    let (values, vectors) = sym_eig_dense(matrix, EIG_SWEEP_TOL, DEFAULT_MAX_SWEEPS)
        .expect("Jacobi converges for small symmetric matrices");
    (vectors.transpose(), values)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(matrix: &Matrix) -> f64 {
    match matrix.rows() {
        1 => matrix[(0, 0)],
        _ => *eigen_decompose(matrix).1.last().expect("nonempty"),
    }
}

/// Zeroes eigenvalues in `[-PSD_TOL, 0)`. Returns `None` if the matrix has an
/// eigenvalue below `-PSD_TOL`. Matrices that are already PSD are returned as is.
pub fn clamp_psd(matrix: &Matrix) -> Option<Matrix> {
    if matrix.rows() == 1 {
        let v = matrix[(0, 0)];
        return if v < -PSD_TOL {
            None
        } else {
            Some(Matrix::from_diag(&[v.max(0.0)]))
        };
    }
    let (q, d) = eigen_decompose(matrix);
    let lowest = *d.last().expect("nonempty");
    if lowest >= 0.0 {
        return Some(matrix.clone());
    }
    if lowest < -PSD_TOL {
        return None;
    }
    let clamped: Vec<f64> = d.iter().map(|v| v.max(0.0)).collect();
    Some(q.transpose().matmul(&Matrix::from_diag(&clamped)).matmul(&q))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldVerdict {
    pub role: Role,
    /// All entries nonnegative at every sample.
    pub cooperative: bool,
    /// Smallest eigenvalue `>= -PSD_TOL` at every sample.
    pub psd_everywhere: bool,
    /// Share of samples whose smallest eigenvalue exceeds `PD_TOL`.
    pub pd_fraction: f64,
    pub min_eigenvalue: f64,
}

/// Samples a field and reports cooperativity, semidefiniteness and the
/// positive-definite share.
pub fn validate_admissibility(
    field: &MatrixWeightField,
    samples: &[(Point, u32)],
    role: Role,
) -> Result<FieldVerdict, WeightError> {
    assert!(!samples.is_empty(), "validate_admissibility needs samples");
    let mut cooperative = true;
    let mut psd = true;
    let mut pd_count = 0usize;
    let mut lowest = f64::INFINITY;
    for &(p, tag) in samples {
        let m = field.eval(p, tag)?;
        cooperative &= m.as_slice().iter().all(|&v| v >= 0.0);
        let e = min_eigenvalue(&m);
        lowest = lowest.min(e);
        psd &= e >= -PSD_TOL;
        if e > PD_TOL {
            pd_count += 1;
        }
    }
    Ok(FieldVerdict {
        role,
        cooperative,
        psd_everywhere: psd,
        pd_fraction: pd_count as f64 / samples.len() as f64,
        min_eigenvalue: lowest,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub a: FieldVerdict,
    pub sigma: FieldVerdict,
    pub m: FieldVerdict,
    pub p: FieldVerdict,
    /// A or Σ positive definite somewhere.
    pub k_side_ok: bool,
    /// M or P positive definite somewhere.
    pub b_side_ok: bool,
    /// Every entry (i, j) has positive combined integral of `m_ij` and `ρ_ij`.
    pub mp_ok: bool,
    /// Row-major k×k table of `∫ m_ij + ∫ ρ_ij`.
    pub mp_integrals: Vec<f64>,
}

/// Why a problem was refused before assembly.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AssumptionViolation {
    #[error("Assumption ASMP (A2/S2): K side has no positive-definite region (A and Sigma are nowhere positive definite)")]
    KSide,
    #[error("Assumption ASMP (M1/P1): B side has no positive-definite region (M and P are nowhere positive definite)")]
    BSide,
    #[error("condition {condition}: {role} is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotSemidefinite { role: Role, condition: &'static str, min_eigenvalue: f64 },
}

impl AssumptionReport {
    pub fn verdicts(&self) -> [&FieldVerdict; 4] {
        [&self.a, &self.sigma, &self.m, &self.p]
    }

    /// The checks a problem must pass before it can be assembled.
    pub fn gate(&self) -> Result<(), AssumptionViolation> {
        for v in self.verdicts() {
            if !v.psd_everywhere {
                return Err(AssumptionViolation::NotSemidefinite {
                    role: v.role,
                    condition: v.role.condition(),
                    min_eigenvalue: v.min_eigenvalue,
                });
            }
        }
        if !self.k_side_ok {
            return Err(AssumptionViolation::KSide);
        }
        if !self.b_side_ok {
            return Err(AssumptionViolation::BSide);
        }
        Ok(())
    }

    /// Advisory findings that do not block a solve.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.mp_ok {
            out.push(
                "condition MP: some entry (i, j) has zero combined integral of m_ij and rho_ij".to_string(),
            );
        }
        for v in self.verdicts() {
            if !v.cooperative {
                out.push(format!("{} is not cooperative-plus (has negative entries)", v.role));
            }
        }
        out
    }
}

/// Checks every field against the mesh's quadrature points.
pub fn check_assumptions(
    a: &MatrixWeightField,
    sigma: &MatrixWeightField,
    m: &MatrixWeightField,
    p: &MatrixWeightField,
    mesh: &TriMesh,
) -> Result<AssumptionReport, WeightError> {
    let fields = [(a, Role::A), (sigma, Role::Sigma), (m, Role::M), (p, Role::P)];
    let ks: Vec<usize> = fields.iter().map(|(f, _)| f.k()).collect();
    if ks.iter().any(|&k| k != ks[0]) {
        return Err(WeightError::DimensionMismatch(ks));
    }
    for (f, role) in fields {
        if f.support() != role.support() {
            return Err(WeightError::SupportMismatch {
                role,
                expected: role.support(),
                found: f.support(),
            });
        }
    }
    let k = ks[0];
    let interior = quadrature::interior_points(mesh);
    let boundary = quadrature::boundary_points(mesh);
    let strip = |pts: &[(Point, u32, f64)]| pts.iter().map(|&(x, t, _)| (x, t)).collect::<Vec<_>>();
    let (int_samples, bnd_samples) = (strip(&interior), strip(&boundary));

    let va = validate_admissibility(a, &int_samples, Role::A)?;
    let vs = validate_admissibility(sigma, &bnd_samples, Role::Sigma)?;
    let vm = validate_admissibility(m, &int_samples, Role::M)?;
    let vp = validate_admissibility(p, &bnd_samples, Role::P)?;

    let mut integrals = vec![0.0; k * k];
    for (field, pts) in [(m, &interior), (p, &boundary)] {
        for &(x, tag, w) in pts {
            let val = field.eval(x, tag)?;
            for (acc, v) in integrals.iter_mut().zip(val.as_slice()) {
                *acc += w * v;
            }
        }
    }
    let mp_ok = integrals.iter().all(|&v| v > 0.0);
    Ok(AssumptionReport {
        k_side_ok: va.pd_fraction > 0.0 || vs.pd_fraction > 0.0,
        b_side_ok: vm.pd_fraction > 0.0 || vp.pd_fraction > 0.0,
        a: va,
        sigma: vs,
        m: vm,
        p: vp,
        mp_ok,
        mp_integrals: integrals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::unit_square_mesh;
    use proptest::prelude::*;

    fn m2(a: f64, b: f64, c: f64, d: f64) -> Matrix {
        Matrix::from_rows(&[vec![a, b], vec![c, d]])
    }

    #[test]
    fn eval_constant_identity() {
        let f = MatrixWeightField::identity(3, Support::Interior);
        assert_eq!(f.eval([0.3, 0.7], 0).unwrap(), Matrix::identity(3));
    }

    #[test]
    fn eval_per_tag() {
        let mut table = BTreeMap::new();
        table.insert(1, m2(2.0, 0.0, 0.0, 2.0));
        table.insert(2, Matrix::zeros(2, 2));
        let f = MatrixWeightField::per_tag(2, Support::Boundary, table);
        assert_eq!(f.eval([1.0, 0.5], 2).unwrap(), Matrix::zeros(2, 2));
        assert_eq!(f.eval([1.0, 0.5], 3), Err(WeightError::MissingTag(3)));
    }

    #[test]
    fn eval_rejects_asymmetry() {
        let f = MatrixWeightField::function(2, Support::Interior, |_| m2(1.0, 2.0, 0.0, 1.0));
        assert!(matches!(f.eval([0.5, 0.5], 0), Err(WeightError::Asymmetric { .. })));
    }

    #[test]
    fn eval_rejects_wrong_shape() {
        let f = MatrixWeightField::function(2, Support::Interior, |_| Matrix::identity(3));
        assert!(matches!(f.eval([0.0, 0.0], 0), Err(WeightError::Shape { rows: 3, .. })));
    }

    #[test]
    fn eval_is_deterministic() {
        let f = MatrixWeightField::function(2, Support::Interior, |p| {
            let s = (p[0] * 3.1).sin() * p[1];
            m2(1.0 + s * s, s, s, 2.0)
        });
        let x = [0.123, 0.456];
        assert_eq!(f.eval(x, 0).unwrap().as_slice(), f.eval(x, 0).unwrap().as_slice());
    }

    #[test]
    fn admissibility_verdicts() {
        let samples = vec![([0.0, 0.0], 0), ([0.5, 0.5], 0)];
        let id = validate_admissibility(&MatrixWeightField::identity(2, Support::Interior), &samples, Role::A)
            .unwrap();
        assert!(id.cooperative && id.psd_everywhere);
        assert_eq!(id.pd_fraction, 1.0);

        let ones = MatrixWeightField::constant(Support::Interior, m2(1.0, 1.0, 1.0, 1.0));
        let v = validate_admissibility(&ones, &samples, Role::A).unwrap();
        assert!(v.psd_everywhere);
        assert_eq!(v.pd_fraction, 0.0);

        let swap = MatrixWeightField::constant(Support::Interior, m2(0.0, 1.0, 1.0, 0.0));
        let v = validate_admissibility(&swap, &samples, Role::A).unwrap();
        assert!(v.cooperative);
        assert!(!v.psd_everywhere);
    }

    #[test]
    fn admissibility_is_monotone_in_pd_region() {
        let samples: Vec<(Point, u32)> = (0..20).map(|i| ([i as f64 / 19.0, 0.0], 0)).collect();
        let mut last = -1.0;
        for cut in [0.0, 0.25, 0.5, 0.75, 1.01] {
            let f = MatrixWeightField::function(1, Support::Interior, move |p| {
                Matrix::from_diag(&[if p[0] < cut { 1.0 } else { 0.0 }])
            });
            let v = validate_admissibility(&f, &samples, Role::M).unwrap();
            assert!(v.pd_fraction >= last);
            last = v.pd_fraction;
        }
        assert_eq!(last, 1.0);
    }

    #[test]
    fn decompose_diagonal_and_rank_one() {
        let (q, d) = eigen_decompose(&Matrix::from_diag(&[3.0, 1.0]));
        assert_eq!(d, vec![3.0, 1.0]);
        assert_eq!(q.as_slice().iter().map(|v| v.abs()).collect::<Vec<_>>(), vec![1.0, 0.0, 0.0, 1.0]);
        let (_, d) = eigen_decompose(&m2(1.0, 1.0, 1.0, 1.0));
        assert!((d[0] - 2.0).abs() < 1e-15 && d[1].abs() < 1e-15);
    }

    fn symmetric(n: usize, entries: &[f64]) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        let mut it = entries.iter();
        for i in 0..n {
            for j in i..n {
                let v = *it.next().unwrap();
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    proptest! {
        #[test]
        fn decompose_reconstructs(entries in prop::collection::vec(-5.0f64..5.0, 10)) {
            let w = symmetric(4, &entries);
            let (q, d) = eigen_decompose(&w);
            let qqt = q.transpose().matmul(&q).sub(&Matrix::identity(4)).max_abs();
            prop_assert!(qqt <= 1e-12);
            let rec = q.transpose().matmul(&Matrix::from_diag(&d)).matmul(&q).sub(&w).frobenius_norm();
            prop_assert!(rec <= 1e-12 * w.frobenius_norm().max(1.0));
            prop_assert!(d.windows(2).all(|p| p[0] >= p[1]));
        }

        #[test]
        fn cooperative_psd_eigenvalues_bounded(entries in prop::collection::vec(0.0f64..3.0, 6)) {
            // Gram matrix of nonnegative vectors: cooperative and PSD.
            let g = Matrix::from_fn(3, 2, |i, j| entries[2 * i + j]);
            let w = g.matmul(&g.transpose());
            let (_, d) = eigen_decompose(&w);
            prop_assert!(d.iter().all(|&v| v >= -1e-12));
            prop_assert!(d[0] <= w.trace() + 1e-12);
        }
    }

    #[test]
    fn clamp_handles_roundoff_only() {
        let tiny = m2(1.0, 0.0, 0.0, -1e-12);
        let c = clamp_psd(&tiny).unwrap();
        assert!(min_eigenvalue(&c) >= 0.0);
        assert!(clamp_psd(&m2(1.0, 0.0, 0.0, -1e-6)).is_none());
        let fine = m2(2.0, 1.0, 1.0, 2.0);
        assert_eq!(clamp_psd(&fine).unwrap(), fine);
    }

    fn fields(a: f64, s: f64, m: f64, p: f64) -> [MatrixWeightField; 4] {
        [
            MatrixWeightField::scalar(Support::Interior, a),
            MatrixWeightField::scalar(Support::Boundary, s),
            MatrixWeightField::scalar(Support::Interior, m),
            MatrixWeightField::scalar(Support::Boundary, p),
        ]
    }

    #[test]
    fn assumption_cases() {
        let mesh = unit_square_mesh(2, 2);
        let [a, s, m, p] = fields(1.0, 0.0, 1.0, 0.0);
        let r = check_assumptions(&a, &s, &m, &p, &mesh).unwrap();
        assert!(r.k_side_ok && r.b_side_ok && r.mp_ok);
        assert!(r.gate().is_ok());
        assert!((r.mp_integrals[0] - 1.0).abs() < 1e-14);

        let [a, s, m, p] = fields(0.0, 0.0, 1.0, 0.0);
        let r = check_assumptions(&a, &s, &m, &p, &mesh).unwrap();
        assert!(!r.k_side_ok);
        assert_eq!(r.gate(), Err(AssumptionViolation::KSide));
        assert!(r.gate().unwrap_err().to_string().contains("ASMP"));

        let [a, s, m, p] = fields(1.0, 0.0, 0.0, 1.0);
        let r = check_assumptions(&a, &s, &m, &p, &mesh).unwrap();
        assert!(r.b_side_ok && r.mp_ok);
        assert!((r.mp_integrals[0] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn assumption_dimension_and_support_errors() {
        let mesh = unit_square_mesh(1, 1);
        let a = MatrixWeightField::identity(2, Support::Interior);
        let [_, s, m, p] = fields(1.0, 0.0, 1.0, 0.0);
        assert!(matches!(check_assumptions(&a, &s, &m, &p, &mesh), Err(WeightError::DimensionMismatch(_))));
        let wrong = MatrixWeightField::scalar(Support::Boundary, 1.0);
        assert!(matches!(
            check_assumptions(&wrong, &s, &m, &p, &mesh),
            Err(WeightError::SupportMismatch { role: Role::A, .. })
        ));
    }

    #[test]
    fn diagonal_weights_fail_mp_but_pass_gate() {
        let mesh = unit_square_mesh(2, 2);
        let a = MatrixWeightField::identity(2, Support::Interior);
        let s = MatrixWeightField::zero(2, Support::Boundary);
        let m = MatrixWeightField::identity(2, Support::Interior);
        let p = MatrixWeightField::zero(2, Support::Boundary);
        let r = check_assumptions(&a, &s, &m, &p, &mesh).unwrap();
        assert!(!r.mp_ok);
        assert!(r.gate().is_ok());
        assert!(!r.warnings().is_empty());
    }
}
