//! Assembly of the discrete Gram pair `(K, B)` and the quadratic functionals
//! built on it.
//!
//! `K` realizes `∫ ∇U·∇V + ⟨AU,V⟩ dx + ∫_∂Ω ⟨ΣU,V⟩ ds` and `B` realizes
//! `∫ ⟨MU,V⟩ dx + ∫_∂Ω ⟨PU,V⟩ ds` on continuous piecewise-linear fields with
//! `k` components. Degrees of freedom are node-major: `dof(i, c) = i·k + c`.

use crate::linalg::dense::dot;
use crate::linalg::{CooBuilder, CsrMatrix};
use crate::mesh::{Point, TriMesh};
use crate::problem::Problem;
use crate::quadrature::{edge_rule, triangle_rule};
use crate::weights::{
    clamp_psd, AssumptionReport, AssumptionViolation, MatrixWeightField, Role, Support, WeightError,
    PSD_TOL,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AssemblyError {
    #[error("triangle {triangle} is degenerate (area {area:e})")]
    DegenerateTriangle { triangle: usize, area: f64 },
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error("condition {condition}: {role} has eigenvalue {min_eigenvalue:e} < -{PSD_TOL:e} at ({x}, {y})")]
    NotSemidefinite { role: Role, condition: &'static str, min_eigenvalue: f64, x: f64, y: f64 },
    #[error(transparent)]
    Assumption(#[from] AssumptionViolation),
    #[error("vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
}

/// The discrete pair: `K` for `⟨·,·⟩_(A,Σ)` and `B` for `⟨·,·⟩_(M,P)`.
#[derive(Debug, Clone)]
pub struct OperatorPair {
    pub nodes: usize,
    pub k: usize,
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
}

impl OperatorPair {
    /// Builds a pair directly from matrices (one component per dof).
    pub fn from_matrices(stiffness: CsrMatrix, mass: CsrMatrix) -> Self {
        assert_eq!(stiffness.dim(), mass.dim(), "K and B must have the same size");
        OperatorPair { nodes: stiffness.dim(), k: 1, stiffness, mass }
    }

    pub fn dim(&self) -> usize {
        self.stiffness.dim()
    }

    pub fn dof(&self, node: usize, component: usize) -> usize {
        node * self.k + component
    }

    fn check_len(&self, u: &[f64]) -> Result<(), AssemblyError> {
        if u.len() != self.dim() {
            return Err(AssemblyError::LengthMismatch { expected: self.dim(), found: u.len() });
        }
        Ok(())
    }

    /// `Λ(U) = UᵀKU = ‖U‖²_(A,Σ)`.
    pub fn lambda_form(&self, u: &[f64]) -> Result<f64, AssemblyError> {
        self.check_len(u)?;
        Ok(self.stiffness.quadratic_form(u))
    }

    /// `Υ(U) = UᵀBU − 1 = ‖U‖²_(M,P) − 1`.
    pub fn upsilon_form(&self, u: &[f64]) -> Result<f64, AssemblyError> {
        self.check_len(u)?;
        Ok(self.mass.quadratic_form(u) - 1.0)
    }

    /// `∇Λ(U) = 2KU`, so that `∇Λ(U)·V = 2⟨U,V⟩_(A,Σ)`.
    pub fn grad_lambda(&self, u: &[f64]) -> Result<Vec<f64>, AssemblyError> {
        self.check_len(u)?;
        Ok(self.stiffness.matvec(u).into_iter().map(|v| 2.0 * v).collect())
    }

    /// `∇Υ(U) = 2BU`.
    pub fn grad_upsilon(&self, u: &[f64]) -> Result<Vec<f64>, AssemblyError> {
        self.check_len(u)?;
        Ok(self.mass.matvec(u).into_iter().map(|v| 2.0 * v).collect())
    }

    /// `⟨U,V⟩_(A,Σ)`.
    pub fn energy_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        dot(u, &self.stiffness.matvec(v))
    }

    /// `⟨U,V⟩_(M,P)`.
    pub fn weight_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        dot(u, &self.mass.matvec(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("degenerate triangle (area {area:e})")]
pub struct DegenerateTriangle {
    pub area: f64,
}

/// P1 stiffness matrix of one triangle: `area · G Gᵀ` with `G` the constant
/// basis gradients.
pub fn local_stiffness(v: [Point; 3]) -> Result<[[f64; 3]; 3], DegenerateTriangle> {
    let area = crate::mesh::signed_area(v[0], v[1], v[2]);
    let xs = v.map(|p| p[0]);
    let ys = v.map(|p| p[1]);
    let extent = |c: [f64; 3]| c.iter().cloned().fold(f64::MIN, f64::max) - c.iter().cloned().fold(f64::MAX, f64::min);
    let size = extent(xs).max(extent(ys));
    if !(area > 1e-14 * size * size) {
        return Err(DegenerateTriangle { area });
    }
    let grads: [[f64; 2]; 3] = std::array::from_fn(|i| {
        let j = (i + 1) % 3;
        let l = (i + 2) % 3;
        [(v[j][1] - v[l][1]) / (2.0 * area), (v[l][0] - v[j][0]) / (2.0 * area)]
    });
    Ok(std::array::from_fn(|a| {
        std::array::from_fn(|b| area * (grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1]))
    }))
}

fn stiffness_block(mesh: &TriMesh, k: usize, coo: &mut CooBuilder) -> Result<(), AssemblyError> {
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let local = local_stiffness(mesh.triangle_vertices(t))
            .map_err(|e| AssemblyError::DegenerateTriangle { triangle: t, area: e.area })?;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..k {
                    coo.push(tri[a] * k + c, tri[b] * k + c, local[a][b]);
                }
            }
        }
    }
    Ok(())
}

/// Evaluates a weight, enforces symmetry exactly and clamps roundoff-level
/// negative eigenvalues.
fn weight_at(field: &MatrixWeightField, role: Role, x: Point, tag: u32) -> Result<Vec<f64>, AssemblyError> {
    let m = field.eval(x, tag)?;
    let m = clamp_psd(&m).ok_or_else(|| AssemblyError::NotSemidefinite {
        role,
        condition: role.condition(),
        min_eigenvalue: crate::weights::min_eigenvalue(&m),
        x: x[0],
        y: x[1],
    })?;
    let k = m.rows();
    let mut sym = vec![0.0; k * k];
    for c in 0..k {
        for d in 0..k {
            sym[c * k + d] = if c == d { m[(c, c)] } else { 0.5 * (m[(c, d)] + m[(d, c)]) };
        }
    }
    Ok(sym)
}

fn push_local<const N: usize>(
    coo: &mut CooBuilder,
    nodes: [usize; N],
    k: usize,
    local: &[f64],
) {
    let width = N * k;
    for a in 0..N {
        for c in 0..k {
            for b in 0..N {
                for d in 0..k {
                    let v = local[(a * k + c) * width + b * k + d];
                    if v != 0.0 {
                        coo.push(nodes[a] * k + c, nodes[b] * k + d, v);
                    }
                }
            }
        }
    }
}

fn accumulate<const N: usize>(local: &mut [f64], k: usize, weight: f64, w: &[f64], basis: [f64; N]) {
    let width = N * k;
    for a in 0..N {
        for b in 0..N {
            let phi = basis[a] * basis[b];
            if phi == 0.0 {
                continue;
            }
            for c in 0..k {
                for d in 0..k {
                    local[(a * k + c) * width + b * k + d] += weight * w[c * k + d] * phi;
                }
            }
        }
    }
}

fn domain_mass_into(
    mesh: &TriMesh,
    field: &MatrixWeightField,
    role: Role,
    coo: &mut CooBuilder,
) -> Result<(), AssemblyError> {
    if field.support() != Support::Interior {
        return Err(WeightError::SupportMismatch { role, expected: Support::Interior, found: field.support() }.into());
    }
    if field.is_zero() {
        return Ok(());
    }
    let k = field.k();
    let mut local = vec![0.0; 9 * k * k];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let tag = mesh.region_tags()[t];
        local.iter_mut().for_each(|v| *v = 0.0);
        for q in triangle_rule(mesh.triangle_vertices(t), mesh.triangle_area(t)) {
            let w = weight_at(field, role, q.x, tag)?;
            accumulate(&mut local, k, q.weight, &w, q.basis);
        }
        push_local(coo, *tri, k, &local);
    }
    Ok(())
}

fn boundary_mass_into(
    mesh: &TriMesh,
    field: &MatrixWeightField,
    role: Role,
    coo: &mut CooBuilder,
) -> Result<(), AssemblyError> {
    if field.support() != Support::Boundary {
        return Err(WeightError::SupportMismatch { role, expected: Support::Boundary, found: field.support() }.into());
    }
    if field.is_zero() {
        return Ok(());
    }
    let k = field.k();
    let nodes = mesh.nodes();
    let mut local = vec![0.0; 4 * k * k];
    for e in mesh.boundary_edges() {
        local.iter_mut().for_each(|v| *v = 0.0);
        for q in edge_rule(nodes[e.nodes[0]], nodes[e.nodes[1]]) {
            let w = weight_at(field, role, q.x, e.tag)?;
            accumulate(&mut local, k, q.weight, &w, q.basis);
        }
        push_local(coo, e.nodes, k, &local);
    }
    Ok(())
}

/// `∫_Ω ⟨W U, V⟩ dx` over P1 fields with `W.k()` components.
pub fn domain_mass_weighted(mesh: &TriMesh, field: &MatrixWeightField) -> Result<CsrMatrix, AssemblyError> {
    let mut coo = CooBuilder::new(mesh.node_count() * field.k());
    domain_mass_into(mesh, field, Role::M, &mut coo)?;
    Ok(coo.build())
}

/// `∫_∂Ω ⟨W U, V⟩ ds` over P1 fields with `W.k()` components.
pub fn boundary_mass_weighted(mesh: &TriMesh, field: &MatrixWeightField) -> Result<CsrMatrix, AssemblyError> {
    let mut coo = CooBuilder::new(mesh.node_count() * field.k());
    boundary_mass_into(mesh, field, Role::P, &mut coo)?;
    Ok(coo.build())
}

/// Componentwise P1 stiffness (no cross-component coupling).
pub fn stiffness_matrix(mesh: &TriMesh, k: usize) -> Result<CsrMatrix, AssemblyError> {
    let mut coo = CooBuilder::new(mesh.node_count() * k);
    stiffness_block(mesh, k, &mut coo)?;
    Ok(coo.build())
}

/// Runs the assumption checks, refuses inadmissible problems, and assembles
/// `K` and `B`.
pub fn assemble_pair(problem: &Problem) -> Result<(OperatorPair, AssumptionReport), AssemblyError> {
    let report = problem.check_assumptions()?;
    report.gate()?;
    Ok((assemble_unchecked(problem)?, report))
}

/// Assembles without the admissibility gate. Used to study deliberately
/// inadmissible configurations.
pub fn assemble_unchecked(problem: &Problem) -> Result<OperatorPair, AssemblyError> {
    let mesh = &problem.mesh;
    let k = problem.k();
    let n = mesh.node_count() * k;

    let mut kc = CooBuilder::new(n);
    stiffness_block(mesh, k, &mut kc)?;
    domain_mass_into(mesh, &problem.a, Role::A, &mut kc)?;
    boundary_mass_into(mesh, &problem.sigma, Role::Sigma, &mut kc)?;

    let mut bc = CooBuilder::new(n);
    domain_mass_into(mesh, &problem.m, Role::M, &mut bc)?;
    boundary_mass_into(mesh, &problem.p, Role::P, &mut bc)?;

    Ok(OperatorPair { nodes: mesh.node_count(), k, stiffness: kc.build(), mass: bc.build() })
}
