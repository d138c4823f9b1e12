//! Command-line front end. Every path ends in one of the exit codes below.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::assembly::{assemble_pair, AssemblyError, OperatorPair};
use crate::config::{ConfigError, MeshSource, ProblemSpec, SEED_ENV};
use crate::eigensolver::{dense_dimension, solve_pencil, SolverError, Spectrum, DENSE_LIMIT};
use crate::reference::{disk_steklov_spectrum, robin_square_spectrum, OracleTable, ReferenceError};
use crate::report::{eigenfunction_csv, fmt_f64, matrix_triplets, spectrum_csv, write_atomic, Report, SpectrumSummary};
use crate::verify::{run_battery, Verdict, VerifyError};
use crate::weights::Role;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSUMPTION: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;
pub const EXIT_VERIFY: i32 = 5;

/// Eigenvalues per level in convergence studies.
pub const CONVERGE_MUS: usize = 5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Assumption(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("cannot write output: {0}")]
    Output(String),
    #[error("{0} verification check(s) failed")]
    VerificationFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => EXIT_CONFIG,
            CliError::Assumption(_) => EXIT_ASSUMPTION,
            CliError::Solver(_) | CliError::Output(_) => EXIT_SOLVER,
            CliError::VerificationFailed(_) => EXIT_VERIFY,
        }
    }
}

impl From<AssemblyError> for CliError {
    fn from(e: AssemblyError) -> Self {
        match e {
            AssemblyError::Assumption(_) | AssemblyError::NotSemidefinite { .. } => CliError::Assumption(e.to_string()),
            AssemblyError::Weight(_) | AssemblyError::DegenerateTriangle { .. } => CliError::Usage(e.to_string()),
            AssemblyError::LengthMismatch { .. } => CliError::Solver(e.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::NotPositiveDefinite { .. } | SolverError::AllDeflated { .. } => {
                CliError::Assumption(e.to_string())
            }
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Solver(s) => s.into(),
            VerifyError::Assembly(a) => a.into(),
            VerifyError::TooLarge { .. } | VerifyError::Weight(_) => CliError::Usage(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<ReferenceError> for CliError {
    fn from(e: ReferenceError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn output_err(e: std::io::Error) -> CliError {
    CliError::Output(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "stekrob", version, about = "Generalized Steklov-Robin eigenvalues of k-component systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleName {
    #[value(alias = "robin_square")]
    RobinSquare,
    #[value(alias = "robin_1d")]
    Robin1d,
    #[value(alias = "disk_steklov")]
    DiskSteklov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DumpWhat {
    Matrices,
    Eigenfunction,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assemble and solve; writes report.json and spectrum.csv.
    Solve {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Full spectrum plus every property check; exit 5 on any failure.
    Verify {
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Solve on successive uniform refinements and report observed orders.
    Converge {
        config: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: u32,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print an analytic eigenvalue table as CSV.
    Oracle {
        name: OracleName,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 6)]
        count: usize,
    },
    /// Write assembled matrices or one eigenfunction.
    Dump {
        config: PathBuf,
        #[arg(long, value_enum)]
        what: DumpWhat,
        /// 1-based eigenpair index for `--what eigenfunction`.
        #[arg(long, default_value_t = 1)]
        index: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
        }
    };
    let seed = std::env::var(SEED_ENV).ok();
    match run(&cli.command, seed.as_deref()) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: &Command, seed_override: Option<&str>) -> Result<(), CliError> {
    let load = |path: &Path| -> Result<ProblemSpec, CliError> {
        let mut spec = ProblemSpec::load(path)?;
        spec.apply_seed_override(seed_override)?;
        Ok(spec)
    };
    match command {
        Command::Solve { config, out } => cmd_solve(&load(config)?, out),
        Command::Verify { config, out } => cmd_verify(&load(config)?, out),
        Command::Converge { config, levels, out } => {
            let csv = cmd_converge(&load(config)?, *levels)?;
            print!("{csv}");
            write_atomic(&out.join("converge.csv"), &csv).map_err(output_err)
        }
        Command::Oracle { name, sigma, count } => {
            let table = match name {
                OracleName::RobinSquare => OracleTable::robin_square(*sigma, *count)?,
                OracleName::Robin1d => OracleTable::robin_1d(*sigma, *count)?,
                OracleName::DiskSteklov => OracleTable::disk_steklov(*count)?,
            };
            print!("{}", table.to_csv());
            Ok(())
        }
        Command::Dump { config, what, index, out } => cmd_dump(&load(config)?, *what, *index, out),
    }
}

fn print_spectrum(spec: &Spectrum) {
    println!("{:>5}  {:>24}  {:>12}", "index", "mu", "residual");
    for (j, (mu, r)) in spec.mus.iter().zip(&spec.residuals).enumerate() {
        println!("{:>5}  {:>24}  {:>12.3e}", j + 1, fmt_f64(*mu), r);
    }
    println!("kernel_dim {}", spec.kernel_dim);
}

/// Assembles behind the assumption gate and solves for `n_eigs` pairs.
pub fn solve_config(spec: &ProblemSpec, report: &mut Report) -> Result<(OperatorPair, Spectrum), CliError> {
    let problem = spec.problem()?;
    let t = Instant::now();
    let (pair, assumptions) = assemble_pair(&problem)?;
    report.timing.assembly_seconds = t.elapsed().as_secs_f64();
    let dense = dense_dimension(&pair);
    if dense > DENSE_LIMIT {
        return Err(CliError::Usage(format!(
            "the transformed problem has dense size {dense}, above the cap {DENSE_LIMIT}; use a coarser mesh"
        )));
    }
    report.warnings = assumptions.warnings();
    report.assumptions = Some(assumptions);
    let t = Instant::now();
    let spectrum = solve_pencil(&pair, spec.n_eigs, &spec.solve_options())?;
    report.timing.solve_seconds = t.elapsed().as_secs_f64();
    report.spectrum = Some(SpectrumSummary::new(&spectrum, pair.dim()));
    Ok((pair, spectrum))
}

pub fn cmd_solve(spec: &ProblemSpec, out: &Path) -> Result<(), CliError> {
    let mut report = Report::new("solve", spec.clone());
    let (_, spectrum) = solve_config(spec, &mut report)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    print_spectrum(&spectrum);
    write_atomic(&out.join("spectrum.csv"), &spectrum_csv(&spectrum)).map_err(output_err)?;
    write_atomic(&out.join("report.json"), &report.to_json()).map_err(output_err)
}

pub fn cmd_verify(spec: &ProblemSpec, out: &Path) -> Result<(), CliError> {
    let problem = spec.problem()?;
    let dim = problem.dofs();
    if dim > spec.verification.max_dofs {
        return Err(CliError::Usage(format!(
            "verify needs a full spectrum; {dim} unknowns exceed the cap {}",
            spec.verification.max_dofs
        )));
    }
    let mut report = Report::new("verify", spec.clone());
    solve_config(spec, &mut report)?;
    let t = Instant::now();
    let mut battery = run_battery(&problem, &spec.battery_settings())?;
    report.timing.verify_seconds = t.elapsed().as_secs_f64();
    for check in battery.checks.iter_mut() {
        if spec.verification.disabled.iter().any(|d| d == &check.name) {
            check.verdict = Verdict::Skipped;
            check.note = Some("skipped: disabled by configuration".into());
        }
    }
    for c in &battery.checks {
        let tag = match c.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIP",
            Verdict::Inconclusive => "INCONCLUSIVE",
        };
        println!("{tag:<12} {:<26} defect {:.3e}  tol {:.1e}  {}", c.name, c.defect, c.tolerance, c.note.as_deref().unwrap_or(""));
    }
    let failed = battery.failures().len();
    report.verification = Some(battery);
    write_atomic(&out.join("report.json"), &report.to_json()).map_err(output_err)?;
    if failed > 0 {
        return Err(CliError::VerificationFailed(failed));
    }
    Ok(())
}

/// Analytic spectrum for configurations that have one.
pub fn oracle_spectrum(spec: &ProblemSpec, count: usize) -> Option<Vec<f64>> {
    let w = |r| spec.scalar_weight(r);
    let (a, s, m, p) = (w(Role::A)?, w(Role::Sigma)?, w(Role::M)?, w(Role::P)?);
    match spec.mesh {
        MeshSource::UnitSquare { .. } if a == 0.0 && s > 0.0 && m == 1.0 && p == 0.0 => {
            robin_square_spectrum(s, count).ok()
        }
        MeshSource::UnitDisk { .. } if a == 1.0 && s == 0.0 && m == 0.0 && p == 1.0 => {
            Some(disk_steklov_spectrum(count))
        }
        _ => None,
    }
}

/// `log₂((μ_a − μ_b)/(μ_b − μ_c))` for three successive levels, when defined.
pub fn observed_order(coarse: f64, mid: f64, fine: f64) -> Option<f64> {
    let ratio = (coarse - mid) / (mid - fine);
    (ratio > 0.0 && ratio.is_finite()).then(|| ratio.log2())
}

/// Convergence table as CSV: `level,h_proxy,mu_index,mu,error_vs_oracle,observed_order`.
pub fn cmd_converge(spec: &ProblemSpec, levels: u32) -> Result<String, CliError> {
    if levels < 3 {
        return Err(CliError::Usage(format!("converge needs at least 3 levels, got {levels}")));
    }
    if matches!(spec.mesh, MeshSource::File { .. }) {
        return Err(CliError::Usage("converge needs a generator mesh (unit_square or unit_disk)".into()));
    }
    let oracle = oracle_spectrum(spec, CONVERGE_MUS);
    let mut table: Vec<(f64, Vec<f64>)> = Vec::new();
    for level in 0..levels {
        let mesh = spec.mesh_at(level)?;
        let h = mesh.max_edge_length();
        let (pair, _) = assemble_pair(&spec.problem_on(mesh))?;
        let spectrum = solve_pencil(&pair, CONVERGE_MUS, &spec.solve_options())?;
        table.push((h, spectrum.mus));
    }
    let mut csv = String::from("level,h_proxy,mu_index,mu,error_vs_oracle,observed_order\n");
    for (level, (h, mus)) in table.iter().enumerate() {
        for (j, mu) in mus.iter().enumerate() {
            let err = oracle.as_ref().and_then(|o| o.get(j)).map(|e| fmt_f64((mu - e).abs())).unwrap_or_default();
            let order = if level >= 2 {
                let at = |l: usize| table[l].1.get(j).copied();
                match (at(level - 2), at(level - 1)) {
                    (Some(a), Some(b)) => observed_order(a, b, *mu).map(fmt_f64).unwrap_or_default(),
                    _ => String::new(),
                }
            } else {
                String::new()
            };
            csv.push_str(&format!("{level},{},{},{},{err},{order}\n", fmt_f64(*h), j + 1, fmt_f64(*mu)));
        }
    }
    Ok(csv)
}

pub fn cmd_dump(spec: &ProblemSpec, what: DumpWhat, index: usize, out: &Path) -> Result<(), CliError> {
    let problem = spec.problem()?;
    match what {
        DumpWhat::Matrices => {
            let (pair, _) = assemble_pair(&problem)?;
            write_atomic(&out.join("stiffness.txt"), &matrix_triplets(&pair.stiffness)).map_err(output_err)?;
            write_atomic(&out.join("mass.txt"), &matrix_triplets(&pair.mass)).map_err(output_err)?;
            println!("wrote stiffness.txt and mass.txt ({} × {})", pair.dim(), pair.dim());
            Ok(())
        }
        DumpWhat::Eigenfunction => {
            if index == 0 || index > spec.n_eigs {
                return Err(CliError::Usage(format!("eigenfunction {index} out of range 1..={}", spec.n_eigs)));
            }
            let mut report = Report::new("dump", spec.clone());
            let (pair, spectrum) = solve_config(spec, &mut report)?;
            if index > spectrum.len() {
                return Err(CliError::Usage(format!(
                    "eigenfunction {index} out of range: only {} finite eigenpairs",
                    spectrum.len()
                )));
            }
            let name = format!("eigenfunction_{index}.csv");
            let csv = eigenfunction_csv(&problem.mesh, &pair, &spectrum.vector(index - 1));
            write_atomic(&out.join(&name), &csv).map_err(output_err)?;
            println!("wrote {name} (mu = {})", fmt_f64(spectrum.mus[index - 1]));
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage(String::new()).exit_code(), 4);
        assert_eq!(CliError::Assumption(String::new()).exit_code(), 2);
        assert_eq!(CliError::Solver(String::new()).exit_code(), 3);
        assert_eq!(CliError::VerificationFailed(1).exit_code(), 5);
    }

    #[test]
    fn order_formula() {
        assert_eq!(observed_order(1.0 + 16.0, 1.0 + 4.0, 1.0 + 1.0), Some(2.0));
        assert_eq!(observed_order(1.0, 1.0, 1.0), None);
        assert_eq!(observed_order(3.0, 2.0, 2.5), None);
    }

    #[test]
    fn bad_arguments_map_to_config_error() {
        assert_eq!(main_with_args(["stekrob", "frobnicate"]), EXIT_CONFIG);
        assert_eq!(main_with_args(["stekrob", "solve", "/nonexistent/config.json"]), EXIT_CONFIG);
        assert_eq!(main_with_args(["stekrob", "--help"]), EXIT_OK);
    }
}
