//! Property checks on computed spectra.
//!
//! Each check is a pure function of its inputs (random vectors come from a
//! seeded generator) and returns a [`CheckResult`] with the measured defect,
//! the tolerance and a verdict. [`run_battery`] runs every applicable check
//! on one problem.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::assembly::{assemble_pair, assemble_unchecked, AssemblyError, OperatorPair};
use crate::eigensolver::{numerical_rank, orthonormality_defects, solve_pencil, SolveOptions, SolverError, Spectrum};
use crate::linalg::dense::Matrix;
use crate::linalg::dot;
use crate::mesh::TriMesh;
use crate::problem::Problem;
use crate::weights::{MatrixWeightField, Support, WeightError};

/// Largest pencil accepted by [`sequential_min_oracle`].
pub const SEQ_MIN_LIMIT: usize = 200;
/// Largest system accepted by [`run_battery`].
pub const BATTERY_DOF_LIMIT: usize = 600;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub anchor: String,
    pub defect: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    fn measured(name: &str, anchor: &str, defect: f64, tolerance: f64, ok: bool) -> Self {
        CheckResult {
            name: name.into(),
            anchor: anchor.into(),
            defect: if defect.is_finite() { defect } else { f64::MAX },
            tolerance,
            verdict: if ok && defect.is_finite() { Verdict::Pass } else { Verdict::Fail },
            note: None,
        }
    }

    fn skipped(name: &str, anchor: &str, reason: &str) -> Self {
        CheckResult {
            name: name.into(),
            anchor: anchor.into(),
            defect: 0.0,
            tolerance: 0.0,
            verdict: Verdict::Skipped,
            note: Some(format!("skipped: {reason}")),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Anything but an outright failure.
    pub fn acceptable(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn all_acceptable(&self) -> bool {
        self.checks.iter().all(CheckResult::acceptable)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.acceptable()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("spectrum vectors have length {found}, pencil has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("spectrum is incomplete: {pairs} pairs + {kernel_dim} deflated != dimension {dim}")]
    IncompleteSpectrum { pairs: usize, kernel_dim: usize, dim: usize },
    #[error("index {index} out of range for {count} eigenpairs")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("weights are not diagonal; the system does not decouple")]
    NotDiagonal,
    #[error("Q is not orthogonal: max |QᵀQ − I| = {defect:e}")]
    NotOrthogonal { defect: f64 },
    #[error("Q is {rows}×{cols}, expected {k}×{k}")]
    BadTransform { rows: usize, cols: usize, k: usize },
    #[error("problem has {dim} unknowns, limit is {limit}")]
    TooLarge { dim: usize, limit: usize },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

fn check_dimension(spec: &Spectrum, pair: &OperatorPair) -> Result<(), VerifyError> {
    if spec.vectors.rows() != pair.dim() {
        return Err(VerifyError::DimensionMismatch { expected: pair.dim(), found: spec.vectors.rows() });
    }
    Ok(())
}

fn random_vector(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn combination(spec: &Spectrum, coeffs: &[(usize, f64)]) -> Vec<f64> {
    let mut out = vec![0.0; spec.vectors.rows()];
    for &(j, c) in coeffs {
        for (i, o) in out.iter_mut().enumerate() {
            *o += c * spec.vectors[(i, j)];
        }
    }
    out
}

const ANCHOR_ORTHO: &str = "eigenfunctions are (A,Σ)-orthogonal and (M,P)-orthonormal";
const ANCHOR_PARSEVAL: &str = "U = Σ c_j φ_j with ‖U‖²_(A,Σ) = Σ μ_j c_j², ‖U‖²_(M,P) = Σ c_j², c_j = ⟨U,φ_j⟩_(A,Σ)/μ_j = ⟨U,φ_j⟩_(M,P)";
const ANCHOR_RAYLEIGH: &str = "μ₁ ‖U‖²_(M,P) ≤ ‖U‖²_(A,Σ), equality at φ₁";
const ANCHOR_SPLIT: &str = "Rayleigh quotient ≤ μ_j on span(φ_1..φ_j) and ≥ μ_(j+1) on span(φ_(j+1)..)";
const ANCHOR_DELTA: &str = "‖U‖_(M,P) ≤ δ^(-1/2) ‖U‖_(A,Σ) with δ = μ₁";
const ANCHOR_SIGN: &str = "μ₁ is simple iff φ₁ does not change sign";
const ANCHOR_POSITIVE: &str = "μ₁ > 0";
const ANCHOR_DEFLATION: &str = "directions with vanishing (M,P)-norm carry no finite eigenvalue";
const ANCHOR_DECOUPLE: &str = "diagonal weights split the system into k scalar problems";
const ANCHOR_CONJ: &str = "weights J ↦ QᵀJQ for constant orthogonal Q leave the spectrum unchanged";
const ANCHOR_SCALE: &str = "(M,P) ↦ s·(M,P) maps μ ↦ μ/s";
const ANCHOR_DEGENERATE: &str = "A = Σ = 0 gives μ = 0 with a constant eigenfunction";

/// `max |ΦᵀBΦ − I|` and `max |ΦᵀKΦ − diag μ| / max μ`, both against `tol`.
pub fn check_orthonormality(spec: &Spectrum, pair: &OperatorPair, tol: f64) -> Result<CheckResult, VerifyError> {
    check_dimension(spec, pair)?;
    let (b_def, k_def) = orthonormality_defects(spec, pair);
    let defect = b_def.max(k_def);
    Ok(CheckResult::measured("orthonormality", ANCHOR_ORTHO, defect, tol, b_def <= tol && k_def <= tol)
        .with_note(format!("B defect {b_def:e}, K defect {k_def:e}")))
}

/// Expansion of `u` in a complete eigenbasis: both energy identities and the
/// agreement of the two coefficient formulas.
pub fn check_parseval(spec: &Spectrum, pair: &OperatorPair, u: &[f64], tol: f64) -> Result<CheckResult, VerifyError> {
    check_dimension(spec, pair)?;
    if !spec.is_complete(pair.dim()) {
        return Err(VerifyError::IncompleteSpectrum { pairs: spec.len(), kernel_dim: spec.kernel_dim, dim: pair.dim() });
    }
    if u.len() != pair.dim() {
        return Err(VerifyError::DimensionMismatch { expected: pair.dim(), found: u.len() });
    }
    let bu = pair.mass.matvec(u);
    let ku = pair.stiffness.matvec(u);
    let mut coeffs = Vec::with_capacity(spec.len());
    let mut cross = 0.0_f64;
    for j in 0..spec.len() {
        let phi = spec.vector(j);
        let c_b = dot(&phi, &bu);
        let c_k = dot(&phi, &ku) / spec.mus[j];
        cross = cross.max((c_k - c_b).abs());
        coeffs.push((j, c_b));
    }
    let range = combination(spec, &coeffs);
    let energy_k = pair.energy_inner(&range, &range);
    let energy_b = pair.weight_inner(&range, &range);
    let sum_k: f64 = coeffs.iter().map(|&(j, c)| spec.mus[j] * c * c).sum();
    let sum_b: f64 = coeffs.iter().map(|&(_, c)| c * c).sum();
    let rel = |a: f64, b: f64| if b > 0.0 { (a - b).abs() / b } else { a.abs() };
    let (dk, db) = (rel(energy_k, sum_k), rel(energy_b, sum_b));
    let defect = dk.max(db).max(cross);
    Ok(CheckResult::measured("parseval", ANCHOR_PARSEVAL, defect, tol, defect <= tol)
        .with_note(format!("(A,Σ) identity {dk:e}, (M,P) identity {db:e}, coefficient cross-check {cross:e}")))
}

/// `μ₁ UᵀBU ≤ (1 + tol) UᵀKU` for `trials` random `U`, and equality at `φ₁`.
pub fn check_rayleigh_lower_bound(
    spec: &Spectrum,
    pair: &OperatorPair,
    trials: usize,
    rng: &mut impl Rng,
    tol: f64,
) -> Result<CheckResult, VerifyError> {
    check_dimension(spec, pair)?;
    if spec.is_empty() {
        return Err(VerifyError::IndexOutOfRange { index: 0, count: 0 });
    }
    let mu1 = spec.mus[0];
    let mut violations = 0;
    let mut worst = 0.0_f64;
    let mut min_margin = f64::INFINITY;
    for _ in 0..trials {
        let u = random_vector(rng, pair.dim());
        let (uk, ub) = (pair.energy_inner(&u, &u), pair.weight_inner(&u, &u));
        let excess = (mu1 * ub - uk) / uk;
        min_margin = min_margin.min(-excess);
        if excess > tol {
            violations += 1;
        }
        worst = worst.max(excess);
    }
    let phi = spec.vector(0);
    let equality = (pair.energy_inner(&phi, &phi) - mu1 * pair.weight_inner(&phi, &phi)).abs() / mu1;
    let defect = worst.max(equality);
    Ok(CheckResult::measured("rayleigh_lower_bound", ANCHOR_RAYLEIGH, defect, tol, violations == 0 && equality <= tol)
        .with_note(format!("{violations} violations in {trials} trials, smallest relative margin {min_margin:e}")))
}

/// Splitting inequalities for one index `1 ≤ j < len`.
pub fn check_splitting(
    spec: &Spectrum,
    pair: &OperatorPair,
    j: usize,
    trials: usize,
    rng: &mut impl Rng,
    tol: f64,
) -> Result<CheckResult, VerifyError> {
    check_dimension(spec, pair)?;
    if j == 0 || j >= spec.len() {
        return Err(VerifyError::IndexOutOfRange { index: j, count: spec.len() });
    }
    let worst = splitting_defect(spec, pair, j, trials, rng);
    Ok(CheckResult::measured(&format!("splitting_{j}"), ANCHOR_SPLIT, worst, tol, worst <= tol))
}

// Largest relative violation of both inequalities at split index j.
fn splitting_defect(spec: &Spectrum, pair: &OperatorPair, j: usize, trials: usize, rng: &mut impl Rng) -> f64 {
    let (mu_j, mu_next) = (spec.mus[j - 1], spec.mus[j]);
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let lower: Vec<(usize, f64)> = (0..j).map(|i| (i, rng.gen_range(-1.0..1.0))).collect();
        let v = combination(spec, &lower);
        let (vk, vb) = (pair.energy_inner(&v, &v), pair.weight_inner(&v, &v));
        worst = worst.max((vk - mu_j * vb) / (mu_j * vb));
        let upper: Vec<(usize, f64)> = (j..spec.len()).map(|i| (i, rng.gen_range(-1.0..1.0))).collect();
        let w = combination(spec, &upper);
        let (wk, wb) = (pair.energy_inner(&w, &w), pair.weight_inner(&w, &w));
        worst = worst.max((mu_next * wb - wk) / (mu_next * wb));
    }
    worst
}

/// Splitting inequalities at every index, reported as one check.
pub fn check_splitting_all(
    spec: &Spectrum,
    pair: &OperatorPair,
    trials: usize,
    rng: &mut impl Rng,
    tol: f64,
) -> Result<CheckResult, VerifyError> {
    check_dimension(spec, pair)?;
    if spec.len() < 2 {
        return Ok(CheckResult::skipped("splitting", ANCHOR_SPLIT, "fewer than two eigenpairs"));
    }
    let mut worst = 0.0_f64;
    let mut failing = Vec::new();
    for j in 1..spec.len() {
        let d = splitting_defect(spec, pair, j, trials, rng);
        if d > tol {
            failing.push(j);
        }
        worst = worst.max(d);
    }
    let note = format!("{} split indices, {} failing {:?}", spec.len() - 1, failing.len(), failing);
    Ok(CheckResult::measured("splitting", ANCHOR_SPLIT, worst, tol, failing.is_empty()).with_note(note))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequentialMin {
    /// Ascending minima, one per constrained stage.
    pub values: Vec<f64>,
    pub converged: Vec<bool>,
    pub iterations: Vec<usize>,
}

/// Literal sequential minimization: for each `j`, minimize `xᵀKx` over
/// `xᵀBx = 1` with `x` B-orthogonal to the earlier minimizers.
///
/// Each step does a Rayleigh–Ritz update on `span{x, g}` where `g` is the
/// projected gradient. Stops when the relative decrease of the quotient stays
/// below `tol` for three steps; non-convergence is reported, not fatal.
pub fn sequential_min_oracle(
    pair: &OperatorPair,
    count: usize,
    iters: usize,
    tol: f64,
) -> Result<SequentialMin, VerifyError> {
    let n = pair.dim();
    if n > SEQ_MIN_LIMIT {
        return Err(VerifyError::TooLarge { dim: n, limit: SEQ_MIN_LIMIT });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut out = SequentialMin { values: Vec::new(), converged: Vec::new(), iterations: Vec::new() };
    let project = |x: &mut Vec<f64>, found: &[Vec<f64>]| {
        for phi in found {
            let c = pair.weight_inner(phi, x);
            for (xi, pi) in x.iter_mut().zip(phi) {
                *xi -= c * pi;
            }
        }
    };
    for _ in 0..count.min(n) {
        let mut x = Vec::new();
        for _ in 0..10 {
            let mut cand = random_vector(&mut rng, n);
            project(&mut cand, &found);
            let b = pair.weight_inner(&cand, &cand);
            if b > 1e-12 * dot(&cand, &cand) {
                let s = b.sqrt();
                cand.iter_mut().for_each(|v| *v /= s);
                x = cand;
                break;
            }
        }
        if x.is_empty() {
            break;
        }
        let mut rho = pair.energy_inner(&x, &x);
        let mut converged = false;
        let mut quiet = 0;
        let mut steps = 0;
        while steps < iters {
            steps += 1;
            let kx = pair.stiffness.matvec(&x);
            let bx = pair.mass.matvec(&x);
            let mut g: Vec<f64> = kx.iter().zip(&bx).map(|(a, b)| a - rho * b).collect();
            project(&mut g, &found);
            let gk = pair.energy_inner(&g, &g);
            if !(gk > 0.0) {
                converged = true;
                break;
            }
            let gs = gk.sqrt();
            g.iter_mut().for_each(|v| *v /= gs);
            let Some((c0, c1)) = ritz_2x2(pair, &x, &g) else {
                converged = true;
                break;
            };
            let mut next: Vec<f64> = x.iter().zip(&g).map(|(a, b)| c0 * a + c1 * b).collect();
            project(&mut next, &found);
            let nb = pair.weight_inner(&next, &next).sqrt();
            next.iter_mut().for_each(|v| *v /= nb);
            let new_rho = pair.energy_inner(&next, &next);
            let change = (rho - new_rho).abs() / new_rho.abs().max(f64::MIN_POSITIVE);
            if new_rho <= rho {
                x = next;
                rho = new_rho;
            }
            quiet = if change <= tol { quiet + 1 } else { 0 };
            if quiet >= 3 {
                converged = true;
                break;
            }
        }
        out.values.push(rho);
        out.converged.push(converged);
        out.iterations.push(steps);
        found.push(x);
    }
    Ok(out)
}

// Coefficients (c0, c1) of the smallest Ritz vector of (K, B) on span{x, g},
// with g normalized in the K-norm. None when x and g are K-dependent.
fn ritz_2x2(pair: &OperatorPair, x: &[f64], g: &[f64]) -> Option<(f64, f64)> {
    let (a, b, d) = (pair.energy_inner(x, x), pair.energy_inner(x, g), pair.energy_inner(g, g));
    let (p, q, r) = (pair.weight_inner(x, x), pair.weight_inner(x, g), pair.weight_inner(g, g));
    let l11 = a.sqrt();
    let l21 = b / l11;
    let t = d - l21 * l21;
    if !(t > 1e-14 * d) {
        return None;
    }
    let l22 = t.sqrt();
    // C = L⁻¹ Bᵣ L⁻ᵀ; its largest eigenvalue θ gives the smallest μ = 1/θ.
    let c11 = p / (l11 * l11);
    let c21 = (q - l21 * c11 * l11) / (l11 * l22);
    let c22 = (r - 2.0 * l21 * q / l11 + l21 * l21 * c11) / (l22 * l22);
    let half = 0.5 * (c11 - c22);
    let theta = 0.5 * (c11 + c22) + (half * half + c21 * c21).sqrt();
    let (y0, y1) = {
        let u = (c21, theta - c11);
        let v = (theta - c22, c21);
        if u.0.hypot(u.1) >= v.0.hypot(v.1) {
            u
        } else {
            v
        }
    };
    if y0 == 0.0 && y1 == 0.0 {
        return Some((1.0, 0.0));
    }
    // Back-substitute Lᵀ c = y.
    let c1 = y1 / l22;
    let c0 = (y0 - l21 * c1) / l11;
    Some((c0, c1))
}

/// `δ = min xᵀKx` over `xᵀBx = 1` computed by the pencil solver and, for small
/// pencils, by [`sequential_min_oracle`]; both against `mu1`. Also checks the
/// norm bound `‖x‖²_B ≤ ‖x‖²_K / δ` on random vectors.
pub fn check_delta_equals_mu1(
    pair: &OperatorPair,
    mu1: f64,
    opts: &SolveOptions,
    trials: usize,
    rng: &mut impl Rng,
    tol: f64,
) -> Result<CheckResult, VerifyError> {
    let solver_delta = solve_pencil(pair, 1, &SolveOptions { keep_deflated: false, ..*opts })?.mus[0];
    let consistency = (solver_delta - mu1).abs() / mu1;
    let mut note = format!("solver δ = {solver_delta:?}, consistency {consistency:e}");
    let mut defect = consistency;
    let mut ok = consistency <= tol;
    if pair.dim() <= SEQ_MIN_LIMIT {
        let oracle = sequential_min_oracle(pair, 1, 5000, 1e-15)?;
        let est = oracle.values[0];
        let rel = (est - mu1).abs() / mu1;
        note.push_str(&format!(", sequential minimum {est:?} (relative {rel:e}, converged {})", oracle.converged[0]));
        defect = defect.max(rel);
        ok &= rel <= tol;
    }
    let mut violations = 0;
    for _ in 0..trials {
        let x = random_vector(rng, pair.dim());
        let (xk, xb) = (pair.energy_inner(&x, &x), pair.weight_inner(&x, &x));
        if xb * solver_delta > xk * (1.0 + 1e-10) {
            violations += 1;
        }
    }
    note.push_str(&format!(", {violations} norm-bound violations in {trials} trials"));
    ok &= violations == 0;
    Ok(CheckResult::measured("delta_equals_mu1", ANCHOR_DELTA, defect, tol, ok).with_note(note))
}

/// Simplicity of `μ₁` against the nodal sign pattern of `φ₁` (scalar case).
///
/// `μ₁` counts as simple when `μ₂ − μ₁ > gap_tol·μ₁`; near-degenerate cases
/// are inconclusive. `φ₁` is one-signed when `min·max > −tol·max|φ₁|²`.
pub fn check_first_sign(spec: &Spectrum, k: usize, gap_tol: f64, tol: f64) -> CheckResult {
    if k > 1 {
        return CheckResult::skipped("first_sign", ANCHOR_SIGN, "sign statement is ambiguous for systems (k > 1)");
    }
    if spec.is_empty() {
        return CheckResult::skipped("first_sign", ANCHOR_SIGN, "no eigenpairs");
    }
    let phi = spec.vector(0);
    let lo = phi.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = phi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scale = lo.abs().max(hi.abs());
    let crossing = (-(lo * hi) / (scale * scale)).max(0.0);
    let one_signed = crossing <= tol;
    let simple = spec.len() < 2 || spec.mus[1] - spec.mus[0] > gap_tol * spec.mus[0];
    let gap = if spec.len() < 2 { f64::INFINITY } else { (spec.mus[1] - spec.mus[0]) / spec.mus[0] };
    let note = format!("relative gap {gap:e}, sign crossing {crossing:e}");
    if simple {
        CheckResult::measured("first_sign", ANCHOR_SIGN, crossing, tol, one_signed).with_note(note)
    } else {
        CheckResult {
            verdict: Verdict::Inconclusive,
            ..CheckResult::measured("first_sign", ANCHOR_SIGN, crossing, tol, true).with_note(format!("near-degenerate: {note}"))
        }
    }
}

pub fn check_first_positive(spec: &Spectrum) -> CheckResult {
    let mu1 = spec.mus.first().copied().unwrap_or(f64::NAN);
    CheckResult::measured("first_eigenvalue_positive", ANCHOR_POSITIVE, (-mu1).max(0.0), 0.0, mu1 > 0.0)
        .with_note(format!("μ₁ = {mu1:?}"))
}

/// Deflated directions must be B-null at the default threshold, independently
/// of the threshold used for the solve, and their count must equal the
/// nullity of `B`.
pub fn check_deflation(spec: &Spectrum, pair: &OperatorPair) -> Result<CheckResult, VerifyError> {
    check_dimension(spec, pair)?;
    let Some(deflated) = &spec.deflated else {
        return Ok(CheckResult::skipped("deflation", ANCHOR_DEFLATION, "deflated directions not retained"));
    };
    let tol = 10.0 * SolveOptions::default().theta_tol;
    let mut worst = 0.0_f64;
    for j in 0..deflated.cols() {
        let z = deflated.col(j);
        let ratio = pair.weight_inner(&z, &z) / (spec.theta_max * pair.energy_inner(&z, &z));
        worst = worst.max(ratio);
    }
    let nullity = pair.dim() - numerical_rank(&pair.mass.to_dense());
    let ok = worst <= tol && spec.kernel_dim == nullity;
    Ok(CheckResult::measured("deflation", ANCHOR_DEFLATION, worst, tol, ok)
        .with_note(format!("{} deflated, nullity of B {nullity}", spec.kernel_dim)))
}

fn full_spectrum(problem: &Problem, opts: &SolveOptions) -> Result<Vec<f64>, VerifyError> {
    let (pair, _) = assemble_pair(problem)?;
    let opts = SolveOptions { keep_deflated: false, ..*opts };
    Ok(solve_pencil(&pair, pair.dim(), &opts)?.mus)
}

// Largest |a − b| / max(1, |b|) over sorted lists, or None on length mismatch.
fn multiset_defect(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Some(a.iter().zip(&b).map(|(x, y)| (x - y).abs() / y.abs().max(1.0)).fold(0.0, f64::max))
}

fn compare_spectra(name: &str, anchor: &str, a: &[f64], b: &[f64], tol: f64) -> CheckResult {
    match multiset_defect(a, b) {
        Some(d) => CheckResult::measured(name, anchor, d, tol, d <= tol).with_note(format!("{} eigenvalues compared", a.len())),
        None => CheckResult::measured(name, anchor, 1.0, tol, false)
            .with_note(format!("eigenvalue counts differ: {} vs {}", a.len(), b.len())),
    }
}

/// Full spectrum of a diagonal-weight system against the union of its `k`
/// scalar spectra.
pub fn check_decoupling(problem: &Problem, opts: &SolveOptions, tol: f64) -> Result<CheckResult, VerifyError> {
    if !problem.has_diagonal_weights()? {
        return Err(VerifyError::NotDiagonal);
    }
    let system = full_spectrum(problem, opts)?;
    let mut union = Vec::new();
    for c in 0..problem.k() {
        union.extend(full_spectrum(&problem.component(c), opts)?);
    }
    Ok(compare_spectra("decoupling", ANCHOR_DECOUPLE, &system, &union, tol))
}

/// Full spectra before and after `J ↦ QᵀJQ` on every weight.
pub fn check_conjugation_invariance(
    problem: &Problem,
    q: &Matrix,
    opts: &SolveOptions,
    tol: f64,
) -> Result<CheckResult, VerifyError> {
    let k = problem.k();
    if q.rows() != k || q.cols() != k {
        return Err(VerifyError::BadTransform { rows: q.rows(), cols: q.cols(), k });
    }
    let defect = q.transpose().matmul(q).sub(&Matrix::identity(k)).max_abs();
    if defect > 1e-12 {
        return Err(VerifyError::NotOrthogonal { defect });
    }
    let before = full_spectrum(problem, opts)?;
    let after = full_spectrum(&problem.conjugated(q), opts)?;
    Ok(compare_spectra("conjugation_invariance", ANCHOR_CONJ, &after, &before, tol))
}

/// `μ(s·M, s·P) = μ(M, P)/s`, relative.
pub fn check_scale_equivariance(
    problem: &Problem,
    s: f64,
    opts: &SolveOptions,
    tol: f64,
) -> Result<CheckResult, VerifyError> {
    let base = full_spectrum(problem, opts)?;
    let scaled = full_spectrum(&problem.with_weight_scaled(s), opts)?;
    if base.len() != scaled.len() {
        return Ok(CheckResult::measured("scale_equivariance", ANCHOR_SCALE, 1.0, tol, false)
            .with_note(format!("eigenvalue counts differ: {} vs {}", base.len(), scaled.len())));
    }
    let defect = base.iter().zip(&scaled).map(|(m, ms)| (ms * s - m).abs() / m.abs()).fold(0.0, f64::max);
    Ok(CheckResult::measured("scale_equivariance", ANCHOR_SCALE, defect, tol, defect <= tol)
        .with_note(format!("s = {s}")))
}

/// With `A = Σ = 0`, `M = I`, `P = 0` the pencil loses definiteness: either
/// the factorization fails or `μ₁ ≈ 0`, and constants have zero quotient.
pub fn check_degenerate_weights(mesh: &TriMesh, k: usize, opts: &SolveOptions) -> Result<CheckResult, VerifyError> {
    let problem = Problem::new(
        mesh.clone(),
        MatrixWeightField::zero(k, Support::Interior),
        MatrixWeightField::zero(k, Support::Boundary),
        MatrixWeightField::identity(k, Support::Interior),
        MatrixWeightField::zero(k, Support::Boundary),
    );
    let pair = assemble_unchecked(&problem)?;
    let ones = vec![1.0; pair.dim()];
    let quotient = pair.energy_inner(&ones, &ones) / pair.weight_inner(&ones, &ones);
    let (collapsed, what) = match solve_pencil(&pair, 1, &SolveOptions { keep_deflated: false, ..*opts }) {
        Err(SolverError::NotPositiveDefinite { dof, .. }) => (true, format!("factorization failed at dof {dof}")),
        Ok(s) => (s.mus[0] <= 1e-8, format!("μ₁ = {:?}", s.mus[0])),
        Err(e) => return Err(e.into()),
    };
    let ok = collapsed && quotient.abs() <= 1e-12;
    Ok(CheckResult::measured("degenerate_weights", ANCHOR_DEGENERATE, quotient.abs(), 1e-12, ok)
        .with_note(format!("{what}, constant-vector quotient {quotient:e}")))
}

/// Rotation by `angle` in the plane of the first two components (or `−I` for k = 1).
pub fn plane_rotation(k: usize, angle: f64) -> Matrix {
    if k == 1 {
        return Matrix::from_diag(&[-1.0]);
    }
    let mut q = Matrix::identity(k);
    let (s, c) = angle.sin_cos();
    q[(0, 0)] = c;
    q[(0, 1)] = -s;
    q[(1, 0)] = s;
    q[(1, 1)] = c;
    q
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BatterySettings {
    pub seed: u64,
    pub solve: SolveOptions,
    pub ortho_tol: f64,
    pub identity_tol: f64,
    pub rayleigh_trials: usize,
    pub rayleigh_tol: f64,
    pub splitting_trials: usize,
    pub splitting_tol: f64,
    pub delta_tol: f64,
    pub gap_tol: f64,
    pub sign_tol: f64,
    pub structure_tol: f64,
    pub scale: f64,
    pub scale_tol: f64,
}

impl Default for BatterySettings {
    fn default() -> Self {
        BatterySettings {
            seed: 0,
            solve: SolveOptions::default(),
            ortho_tol: 1e-8,
            identity_tol: 1e-9,
            rayleigh_trials: 1000,
            rayleigh_tol: 1e-10,
            splitting_trials: 100,
            splitting_tol: 1e-10,
            delta_tol: 1e-6,
            gap_tol: 1e-6,
            sign_tol: 1e-10,
            structure_tol: 1e-9,
            scale: 2.5,
            scale_tol: 1e-10,
        }
    }
}

/// Every applicable check on the full spectrum of `problem`.
pub fn run_battery(problem: &Problem, settings: &BatterySettings) -> Result<VerificationReport, VerifyError> {
    let dim = problem.dofs();
    if dim > BATTERY_DOF_LIMIT {
        return Err(VerifyError::TooLarge { dim, limit: BATTERY_DOF_LIMIT });
    }
    let (pair, _) = assemble_pair(problem)?;
    let opts = SolveOptions { keep_deflated: true, ..settings.solve };
    let spec = solve_pencil(&pair, dim, &opts)?;
    let rng = |salt: u64| ChaCha8Rng::seed_from_u64(settings.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));

    let mut checks = vec![
        check_orthonormality(&spec, &pair, settings.ortho_tol)?,
        check_parseval(&spec, &pair, &random_vector(&mut rng(1), dim), settings.identity_tol)?,
        check_rayleigh_lower_bound(&spec, &pair, settings.rayleigh_trials, &mut rng(2), settings.rayleigh_tol)?,
        check_splitting_all(&spec, &pair, settings.splitting_trials, &mut rng(3), settings.splitting_tol)?,
        check_delta_equals_mu1(&pair, spec.mus[0], &opts, settings.rayleigh_trials, &mut rng(4), settings.delta_tol)?,
        check_first_positive(&spec),
        check_first_sign(&spec, problem.k(), settings.gap_tol, settings.sign_tol),
        check_deflation(&spec, &pair)?,
    ];
    checks.push(if problem.k() == 1 {
        CheckResult::skipped("decoupling", ANCHOR_DECOUPLE, "k = 1")
    } else if !problem.has_diagonal_weights()? {
        CheckResult::skipped("decoupling", ANCHOR_DECOUPLE, "weights are not diagonal")
    } else {
        check_decoupling(problem, &opts, settings.structure_tol)?
    });
    let q = plane_rotation(problem.k(), std::f64::consts::FRAC_PI_4);
    checks.push(check_conjugation_invariance(problem, &q, &opts, settings.structure_tol)?);
    checks.push(check_scale_equivariance(problem, settings.scale, &opts, settings.scale_tol)?);
    checks.push(check_degenerate_weights(&problem.mesh, problem.k(), &opts)?);
    Ok(VerificationReport { seed: settings.seed, checks })
}
