//! Finite-element solver for generalized Steklov–Robin eigenproblems of
//! k-component systems with matrix weights.
//!
//! The continuous problem is `−ΔU + A U = μ M U` in the domain and
//! `∂U/∂ν + Σ U = μ P U` on the boundary. P1 elements on a triangle mesh turn
//! it into the symmetric pencil `K x = μ B x`, solved by [`eigensolver::solve_pencil`].

pub mod assembly;
pub mod cli;
pub mod config;
pub mod eigensolver;
pub mod linalg;
pub mod mesh;
pub mod problem;
pub mod quadrature;
pub mod reference;
pub mod report;
pub mod verify;
pub mod weights;
