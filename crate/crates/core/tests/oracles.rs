use std::time::Instant;

use stekrob::assembly::assemble_pair;
use stekrob::eigensolver::{solve_pencil, SolveOptions};
use stekrob::mesh::{unit_disk_mesh, unit_square_mesh};
use stekrob::problem::Problem;
use stekrob::reference::{disk_steklov_exact, robin_square_spectrum};
use stekrob::weights::{MatrixWeightField, Support};

fn robin_square(n: usize) -> Problem {
    Problem::new(
        unit_square_mesh(n, n),
        MatrixWeightField::zero(1, Support::Interior),
        MatrixWeightField::scalar(Support::Boundary, 1.0),
        MatrixWeightField::identity(1, Support::Interior),
        MatrixWeightField::zero(1, Support::Boundary),
    )
}

fn disk_steklov(level: u32) -> Problem {
    Problem::new(
        unit_disk_mesh(level),
        MatrixWeightField::identity(1, Support::Interior),
        MatrixWeightField::zero(1, Support::Boundary),
        MatrixWeightField::zero(1, Support::Interior),
        MatrixWeightField::identity(1, Support::Boundary),
    )
}

#[test]
fn robin_square_matches_separable_spectrum() {
    let start = Instant::now();
    let (pair, _) = assemble_pair(&robin_square(32)).unwrap();
    let spec = solve_pencil(&pair, 6, &SolveOptions::default()).unwrap();
    let exact = robin_square_spectrum(1.0, 6).unwrap();
    eprintln!("robin {:?} vs {:?} in {:?}", spec.mus, exact, start.elapsed());
    assert!((spec.mus[0] - exact[0]).abs() / exact[0] < 5e-3);
    assert!((spec.mus[1] - spec.mus[2]).abs() / spec.mus[1] < 1e-3);
    for j in 1..3 {
        assert!((spec.mus[j] - exact[j]).abs() / exact[j] < 1e-2);
    }
}

#[test]
fn disk_steklov_matches_bessel_ratios() {
    let start = Instant::now();
    let (pair, _) = assemble_pair(&disk_steklov(5)).unwrap();
    let spec = solve_pencil(&pair, 5, &SolveOptions::default()).unwrap();
    eprintln!("disk {:?} kernel {} in {:?}", spec.mus, spec.kernel_dim, start.elapsed());
    assert!((spec.mus[0] - disk_steklov_exact(0)).abs() / disk_steklov_exact(0) < 2e-2);
    for j in 1..3 {
        assert!((spec.mus[j] - disk_steklov_exact(1)).abs() / disk_steklov_exact(1) < 2e-2);
    }
    assert!((spec.mus[1] - spec.mus[2]).abs() / spec.mus[1] < 5e-3);
    assert_eq!(spec.kernel_dim, pair.dim() - unit_disk_mesh(5).boundary_nodes().len());
}
