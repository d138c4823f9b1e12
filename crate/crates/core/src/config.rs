//! JSON problem configuration.
//!
//! ```json
//! {
//!   "mesh": {"kind": "unit_square", "nx": 32, "ny": 32},
//!   "k": 1,
//!   "weights": {
//!     "A": {"kind": "zero"},
//!     "Sigma": {"kind": "constant", "matrix": [[1.0]]},
//!     "M": {"kind": "constant", "matrix": [[1.0]]},
//!     "P": {"kind": "per_tag", "table": {"1": [[0.5]], "3": [[2.0]]}}
//!   },
//!   "n_eigs": 6,
//!   "solver": {"theta_tol": 1e-10, "sweep_tol": 1e-14, "ortho_tol": 1e-8},
//!   "seed": 7
//! }
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::eigensolver::SolveOptions;
use crate::linalg::dense::{Matrix, DEFAULT_MAX_SWEEPS};
use crate::mesh::{load_mesh, unit_disk_mesh, unit_square_mesh, MeshError, TriMesh, MAX_DISK_LEVEL};
use crate::problem::Problem;
use crate::verify::{BatterySettings, BATTERY_DOF_LIMIT};
use crate::weights::{MatrixWeightField, Role, Support};

pub const SEED_ENV: &str = "STEKROB_SEED";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("config is not valid JSON for a problem: {0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
    #[error("weight {role}: {detail}")]
    Matrix { role: Role, detail: String },
    #[error("mesh file {path}: {source}")]
    Mesh { path: String, source: MeshError },
    #[error("{SEED_ENV}={value} is not an unsigned integer")]
    Seed { value: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSource {
    UnitSquare {
        nx: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ny: Option<usize>,
    },
    UnitDisk {
        level: u32,
    },
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant { matrix: Vec<Vec<f64>> },
    PerTag { table: BTreeMap<String, Vec<Vec<f64>>> },
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSpec {
    #[serde(rename = "A")]
    pub a: WeightSpec,
    #[serde(rename = "Sigma")]
    pub sigma: WeightSpec,
    #[serde(rename = "M")]
    pub m: WeightSpec,
    #[serde(rename = "P")]
    pub p: WeightSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    pub theta_tol: f64,
    pub sweep_tol: f64,
    pub ortho_tol: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec { theta_tol: 1e-10, sweep_tol: 1e-14, ortho_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerificationSpec {
    pub rayleigh_trials: usize,
    pub splitting_trials: usize,
    /// Largest `nodes · k` accepted by `verify`.
    pub max_dofs: usize,
    /// Check names reported as skipped instead of run.
    pub disabled: Vec<String>,
}

impl Default for VerificationSpec {
    fn default() -> Self {
        VerificationSpec { rayleigh_trials: 1000, splitting_trials: 100, max_dofs: BATTERY_DOF_LIMIT, disabled: Vec::new() }
    }
}

fn default_n_eigs() -> usize {
    6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub mesh: MeshSource,
    pub k: usize,
    pub weights: WeightsSpec,
    #[serde(default = "default_n_eigs")]
    pub n_eigs: usize,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub verification: VerificationSpec,
    #[serde(default)]
    pub seed: u64,
}

impl ProblemSpec {
    /// Parses and validates a config document.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let spec: ProblemSpec = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Reads a config file; relative mesh paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        let mut spec = Self::from_json(&text)?;
        if let MeshSource::File { path: mesh_path } = &mut spec.mesh {
            if mesh_path.is_relative() {
                if let Some(dir) = path.parent() {
                    *mesh_path = dir.join(&*mesh_path);
                }
            }
        }
        spec.mesh()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Replaces the seed with `STEKROB_SEED` when set.
    pub fn apply_seed_override(&mut self, value: Option<&str>) -> Result<(), ConfigError> {
        if let Some(v) = value {
            self.seed = v.trim().parse().map_err(|_| ConfigError::Seed { value: v.to_string() })?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.k == 0 {
            return Err(ConfigError::Invalid("k must be at least 1".into()));
        }
        if self.n_eigs == 0 {
            return Err(ConfigError::Invalid("n_eigs must be at least 1".into()));
        }
        for (name, v) in [
            ("theta_tol", self.solver.theta_tol),
            ("sweep_tol", self.solver.sweep_tol),
            ("ortho_tol", self.solver.ortho_tol),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(ConfigError::Invalid(format!("solver.{name} must lie in (0, 1), got {v}")));
            }
        }
        match &self.mesh {
            MeshSource::UnitSquare { nx, ny } => {
                if *nx == 0 || ny.is_some_and(|n| n == 0) {
                    return Err(ConfigError::Invalid("unit_square mesh needs nx, ny >= 1".into()));
                }
            }
            MeshSource::UnitDisk { level } => {
                if *level > MAX_DISK_LEVEL {
                    return Err(ConfigError::Invalid(format!("unit_disk level {level} exceeds {MAX_DISK_LEVEL}")));
                }
            }
            MeshSource::File { .. } => {}
        }
        for (role, w) in self.roles() {
            check_weight(role, w, self.k)?;
        }
        Ok(())
    }

    fn roles(&self) -> [(Role, &WeightSpec); 4] {
        [(Role::A, &self.weights.a), (Role::Sigma, &self.weights.sigma), (Role::M, &self.weights.m), (Role::P, &self.weights.p)]
    }

    pub fn mesh(&self) -> Result<TriMesh, ConfigError> {
        self.mesh_at(0)
    }

    /// Mesh after `refinements` uniform refinements of the generator.
    pub fn mesh_at(&self, refinements: u32) -> Result<TriMesh, ConfigError> {
        let scale = 1usize << refinements;
        match &self.mesh {
            MeshSource::UnitSquare { nx, ny } => Ok(unit_square_mesh(nx * scale, ny.unwrap_or(*nx) * scale)),
            MeshSource::UnitDisk { level } => {
                let level = level + refinements;
                if level > MAX_DISK_LEVEL {
                    return Err(ConfigError::Invalid(format!("unit_disk level {level} exceeds {MAX_DISK_LEVEL}")));
                }
                Ok(unit_disk_mesh(level))
            }
            MeshSource::File { path } => {
                if refinements > 0 {
                    return Err(ConfigError::Invalid("refinement needs a generator mesh, not a file".into()));
                }
                let shown = path.display().to_string();
                let text = std::fs::read_to_string(path)
                    .map_err(|e| ConfigError::Io { path: shown.clone(), message: e.to_string() })?;
                load_mesh(&text).map_err(|source| ConfigError::Mesh { path: shown, source })
            }
        }
    }

    pub fn problem(&self) -> Result<Problem, ConfigError> {
        Ok(self.problem_on(self.mesh()?))
    }

    pub fn problem_on(&self, mesh: TriMesh) -> Problem {
        let field = |role: Role, w: &WeightSpec| build_field(role.support(), w, self.k);
        Problem::new(
            mesh,
            field(Role::A, &self.weights.a),
            field(Role::Sigma, &self.weights.sigma),
            field(Role::M, &self.weights.m),
            field(Role::P, &self.weights.p),
        )
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            theta_tol: self.solver.theta_tol,
            sweep_tol: self.solver.sweep_tol,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            keep_deflated: false,
        }
    }

    pub fn battery_settings(&self) -> BatterySettings {
        BatterySettings {
            seed: self.seed,
            solve: self.solve_options(),
            ortho_tol: self.solver.ortho_tol,
            rayleigh_trials: self.verification.rayleigh_trials,
            splitting_trials: self.verification.splitting_trials,
            ..BatterySettings::default()
        }
    }

    /// The constant scalar value of a weight, when it has one.
    pub fn scalar_weight(&self, role: Role) -> Option<f64> {
        if self.k != 1 {
            return None;
        }
        let w = match role {
            Role::A => &self.weights.a,
            Role::Sigma => &self.weights.sigma,
            Role::M => &self.weights.m,
            Role::P => &self.weights.p,
        };
        match w {
            WeightSpec::Zero => Some(0.0),
            WeightSpec::Constant { matrix } => Some(matrix[0][0]),
            WeightSpec::PerTag { .. } => None,
        }
    }
}

fn check_matrix(role: Role, label: &str, m: &[Vec<f64>], k: usize) -> Result<(), ConfigError> {
    let err = |detail: String| Err(ConfigError::Matrix { role, detail });
    if m.len() != k {
        return err(format!("{label}has {} rows, expected {k} (k = {k})", m.len()));
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != k {
            return err(format!("{label}row {i} has {} columns, expected {k}", row.len()));
        }
        for (j, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return err(format!("{label}entry ({i}, {j}) is not finite"));
            }
        }
    }
    for i in 0..k {
        for j in 0..i {
            if m[i][j] != m[j][i] {
                return err(format!("{label}is not symmetric: entry ({i}, {j}) = {} but ({j}, {i}) = {}", m[i][j], m[j][i]));
            }
        }
    }
    Ok(())
}

fn check_weight(role: Role, w: &WeightSpec, k: usize) -> Result<(), ConfigError> {
    match w {
        WeightSpec::Zero => Ok(()),
        WeightSpec::Constant { matrix } => check_matrix(role, "matrix ", matrix, k),
        WeightSpec::PerTag { table } => {
            if table.is_empty() {
                return Err(ConfigError::Matrix { role, detail: "per_tag table is empty".into() });
            }
            for (tag, m) in table {
                if tag.parse::<u32>().is_err() {
                    return Err(ConfigError::Matrix { role, detail: format!("tag {tag:?} is not a non-negative integer") });
                }
                check_matrix(role, &format!("tag {tag} matrix "), m, k)?;
            }
            Ok(())
        }
    }
}

fn to_matrix(rows: &[Vec<f64>]) -> Matrix {
    Matrix::from_rows(rows)
}

fn build_field(support: Support, w: &WeightSpec, k: usize) -> MatrixWeightField {
    match w {
        WeightSpec::Zero => MatrixWeightField::zero(k, support),
        WeightSpec::Constant { matrix } => MatrixWeightField::constant(support, to_matrix(matrix)),
        WeightSpec::PerTag { table } => MatrixWeightField::per_tag(
            k,
            support,
            table.iter().map(|(t, m)| (t.parse().expect("validated tag"), to_matrix(m))).collect(),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROBIN: &str = r#"{
        "mesh": {"kind": "unit_square", "nx": 4},
        "k": 1,
        "weights": {
            "A": {"kind": "zero"},
            "Sigma": {"kind": "constant", "matrix": [[1.0]]},
            "M": {"kind": "constant", "matrix": [[1.0]]},
            "P": {"kind": "zero"}
        },
        "seed": 3
    }"#;

    #[test]
    fn parses_defaults() {
        let spec = ProblemSpec::from_json(ROBIN).unwrap();
        assert_eq!(spec.n_eigs, 6);
        assert_eq!(spec.solver, SolverSpec::default());
        assert_eq!(spec.seed, 3);
        let problem = spec.problem().unwrap();
        assert_eq!(problem.mesh.node_count(), 25);
        assert_eq!(spec.scalar_weight(Role::Sigma), Some(1.0));
    }

    #[test]
    fn round_trips() {
        let spec = ProblemSpec::from_json(ROBIN).unwrap();
        assert_eq!(ProblemSpec::from_json(&spec.to_json()).unwrap(), spec);
    }

    #[test]
    fn malformed_matrix_names_row_and_column() {
        let text = ROBIN.replace(r#""k": 1"#, r#""k": 2"#).replace("[[1.0]]", "[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]");
        let err = ProblemSpec::from_json(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 0 has 3 columns, expected 2"), "{msg}");
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ProblemSpec::from_json(&ROBIN.replace(r#""k": 1"#, r#""k": 0"#)).is_err());
        let loose = ROBIN.replace(r#""seed": 3"#, r#""seed": 3, "solver": {"theta_tol": 1.5}"#);
        assert!(ProblemSpec::from_json(&loose).unwrap_err().to_string().contains("theta_tol"));
        let unknown = ROBIN.replace(r#""kind": "zero"}"#, r#""kind": "gaussian"}"#);
        assert!(matches!(ProblemSpec::from_json(&unknown), Err(ConfigError::Parse(_))));
        let asym = ROBIN.replace(r#""k": 1"#, r#""k": 2"#).replace("[[1.0]]", "[[1.0, 0.5], [0.0, 1.0]]");
        assert!(ProblemSpec::from_json(&asym).unwrap_err().to_string().contains("symmetric"));
        let tag = ROBIN.replace(r#""P": {"kind": "zero"}"#, r#""P": {"kind": "per_tag", "table": {"x": [[1.0]]}}"#);
        assert!(ProblemSpec::from_json(&tag).is_err());
    }

    #[test]
    fn seed_override() {
        let mut spec = ProblemSpec::from_json(ROBIN).unwrap();
        spec.apply_seed_override(Some("42")).unwrap();
        assert_eq!(spec.seed, 42);
        assert!(spec.apply_seed_override(Some("abc")).is_err());
        spec.apply_seed_override(None).unwrap();
        assert_eq!(spec.seed, 42);
    }

    #[test]
    fn mesh_file_relative_to_config() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("m.txt"), unit_square_mesh(1, 1).to_text()).unwrap();
        let cfg = ROBIN.replace(r#""kind": "unit_square", "nx": 4"#, r#""kind": "file", "path": "m.txt""#);
        let path = dir.path().join("c.json");
        std::fs::write(&path, cfg).unwrap();
        let spec = ProblemSpec::load(&path).unwrap();
        assert_eq!(spec.mesh().unwrap().node_count(), 4);
        std::fs::write(dir.path().join("m.txt"), "trimesh 1\nnodes 1\n").unwrap();
        assert!(matches!(ProblemSpec::load(&path), Err(ConfigError::Mesh { .. })));
    }

    #[test]
    fn refinement_levels() {
        let spec = ProblemSpec::from_json(ROBIN).unwrap();
        assert_eq!(spec.mesh_at(2).unwrap().node_count(), 17 * 17);
        let disk = ROBIN.replace(r#""kind": "unit_square", "nx": 4"#, r#""kind": "unit_disk", "level": 7"#);
        let disk = ProblemSpec::from_json(&disk).unwrap();
        assert!(disk.mesh_at(1).is_ok());
        assert!(disk.mesh_at(2).is_err());
    }

    #[test]
    fn per_tag_weights_build() {
        let text = ROBIN.replace(r#""P": {"kind": "zero"}"#, r#""P": {"kind": "per_tag", "table": {"1": [[2.0]], "3": [[0.5]]}}"#);
        let spec = ProblemSpec::from_json(&text).unwrap();
        let p = spec.problem().unwrap();
        assert_eq!(p.p.eval([0.5, 0.0], 1).unwrap()[(0, 0)], 2.0);
    }
}
