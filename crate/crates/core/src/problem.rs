//! A full problem: mesh plus the four weight fields.

use crate::linalg::dense::Matrix;
use crate::mesh::TriMesh;
use crate::quadrature;
use crate::weights::{check_assumptions, AssumptionReport, MatrixWeightField, WeightError};

/// `−ΔU + A U = μ M U` in Ω, `∂U/∂ν + Σ U = μ P U` on ∂Ω.
#[derive(Debug, Clone)]
pub struct Problem {
    pub mesh: TriMesh,
    pub a: MatrixWeightField,
    pub sigma: MatrixWeightField,
    pub m: MatrixWeightField,
    pub p: MatrixWeightField,
}

impl Problem {
    pub fn new(
        mesh: TriMesh,
        a: MatrixWeightField,
        sigma: MatrixWeightField,
        m: MatrixWeightField,
        p: MatrixWeightField,
    ) -> Self {
        Problem { mesh, a, sigma, m, p }
    }

    pub fn k(&self) -> usize {
        self.a.k()
    }

    pub fn dofs(&self) -> usize {
        self.mesh.node_count() * self.k()
    }

    pub fn weights(&self) -> [&MatrixWeightField; 4] {
        [&self.a, &self.sigma, &self.m, &self.p]
    }

    pub fn check_assumptions(&self) -> Result<AssumptionReport, WeightError> {
        check_assumptions(&self.a, &self.sigma, &self.m, &self.p, &self.mesh)
    }

    /// Same problem on another mesh.
    pub fn with_mesh(&self, mesh: TriMesh) -> Problem {
        Problem { mesh, ..self.clone() }
    }

    /// Every weight `J` replaced by `Qᵀ J Q`.
    pub fn conjugated(&self, q: &Matrix) -> Problem {
        Problem {
            mesh: self.mesh.clone(),
            a: self.a.conjugated(q),
            sigma: self.sigma.conjugated(q),
            m: self.m.conjugated(q),
            p: self.p.conjugated(q),
        }
    }

    /// `M` and `P` scaled by `s`.
    pub fn with_weight_scaled(&self, s: f64) -> Problem {
        Problem { m: self.m.scaled(s), p: self.p.scaled(s), ..self.clone() }
    }

    /// Scalar problem formed by the `c`-th diagonal entries of every weight.
    pub fn component(&self, c: usize) -> Problem {
        Problem {
            mesh: self.mesh.clone(),
            a: self.a.diagonal_entry(c),
            sigma: self.sigma.diagonal_entry(c),
            m: self.m.diagonal_entry(c),
            p: self.p.diagonal_entry(c),
        }
    }

    /// True when every weight is diagonal at every quadrature point.
    pub fn has_diagonal_weights(&self) -> Result<bool, WeightError> {
        let interior = quadrature::interior_points(&self.mesh);
        let boundary = quadrature::boundary_points(&self.mesh);
        let k = self.k();
        for (field, pts) in [(&self.a, &interior), (&self.sigma, &boundary), (&self.m, &interior), (&self.p, &boundary)] {
            for &(x, tag, _) in pts {
                let w = field.eval(x, tag)?;
                for i in 0..k {
                    for j in 0..k {
                        if i != j && w[(i, j)] != 0.0 {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }
}
