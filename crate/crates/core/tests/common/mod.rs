#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use stekrob::linalg::Matrix;
use stekrob::mesh::{unit_disk_mesh, unit_square_mesh, TriMesh};
use stekrob::problem::Problem;
use stekrob::weights::{MatrixWeightField, Support};

pub fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

pub fn config(name: &str) -> PathBuf {
    configs_dir().join(name)
}

pub fn stekrob(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stekrob"))
        .args(args)
        .current_dir(dir)
        .env_remove("STEKROB_SEED")
        .output()
        .expect("binary runs")
}

/// `A = 0`, `Σ = σ`, `M = 1`, `P = 0` on the unit square.
pub fn robin_square(n: usize, sigma: f64) -> Problem {
    Problem::new(
        unit_square_mesh(n, n),
        MatrixWeightField::zero(1, Support::Interior),
        MatrixWeightField::scalar(Support::Boundary, sigma),
        MatrixWeightField::identity(1, Support::Interior),
        MatrixWeightField::zero(1, Support::Boundary),
    )
}

/// `A = I`, `Σ = 0`, `M = 0`, `P = I`.
pub fn steklov(mesh: TriMesh, k: usize) -> Problem {
    Problem::new(
        mesh,
        MatrixWeightField::identity(k, Support::Interior),
        MatrixWeightField::zero(k, Support::Boundary),
        MatrixWeightField::zero(k, Support::Interior),
        MatrixWeightField::identity(k, Support::Boundary),
    )
}

pub fn disk_steklov(level: u32) -> Problem {
    steklov(unit_disk_mesh(level), 1)
}

/// Diagonal Robin-type system with per-component Σ and M entries.
pub fn diagonal_system(n: usize, sigmas: &[f64], masses: &[f64]) -> Problem {
    Problem::new(
        unit_square_mesh(n, n),
        MatrixWeightField::zero(sigmas.len(), Support::Interior),
        MatrixWeightField::constant(Support::Boundary, Matrix::from_diag(sigmas)),
        MatrixWeightField::constant(Support::Interior, Matrix::from_diag(masses)),
        MatrixWeightField::zero(sigmas.len(), Support::Boundary),
    )
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
