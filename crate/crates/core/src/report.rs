//! Run reports and the text/CSV artifacts written by the CLI.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::assembly::OperatorPair;
use crate::config::ProblemSpec;
use crate::eigensolver::Spectrum;
use crate::linalg::CsrMatrix;
use crate::mesh::TriMesh;
use crate::verify::VerificationReport;
use crate::weights::AssumptionReport;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub mus: Vec<f64>,
    pub residuals: Vec<f64>,
    pub kernel_dim: usize,
    pub dimension: usize,
    pub theta_max: f64,
}

impl SpectrumSummary {
    pub fn new(spec: &Spectrum, dimension: usize) -> Self {
        SpectrumSummary {
            mus: spec.mus.clone(),
            residuals: spec.residuals.clone(),
            kernel_dim: spec.kernel_dim,
            dimension,
            theta_max: spec.theta_max,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timing {
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
    pub verify_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub command: String,
    pub config: ProblemSpec,
    pub assumptions: Option<AssumptionReport>,
    pub warnings: Vec<String>,
    pub spectrum: Option<SpectrumSummary>,
    pub verification: Option<VerificationReport>,
    pub timing: Timing,
}

impl Report {
    pub fn new(command: &str, config: ProblemSpec) -> Self {
        Report {
            version: VERSION,
            command: command.to_string(),
            config,
            assumptions: None,
            warnings: Vec::new(),
            spectrum: None,
            verification: None,
            timing: Timing::default(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// `index,mu,residual`, 1-based.
pub fn spectrum_csv(spec: &Spectrum) -> String {
    let mut out = String::from("index,mu,residual\n");
    for (j, (mu, r)) in spec.mus.iter().zip(&spec.residuals).enumerate() {
        out.push_str(&format!("{},{},{}\n", j + 1, fmt_f64(*mu), fmt_f64(*r)));
    }
    out
}

/// `row col value` per stored entry, 0-based.
pub fn matrix_triplets(m: &CsrMatrix) -> String {
    let mut out = String::new();
    for (i, j, v) in m.triplets() {
        out.push_str(&format!("{i} {j} {}\n", fmt_f64(v)));
    }
    out
}

/// `node_x,node_y,comp_0,...` with nodal values of one eigenvector.
pub fn eigenfunction_csv(mesh: &TriMesh, pair: &OperatorPair, values: &[f64]) -> String {
    let k = pair.k;
    let mut out = String::from("node_x,node_y");
    for c in 0..k {
        out.push_str(&format!(",comp_{c}"));
    }
    out.push('\n');
    for (i, p) in mesh.nodes().iter().enumerate() {
        out.push_str(&format!("{},{}", fmt_f64(p[0]), fmt_f64(p[1])));
        for c in 0..k {
            out.push_str(&format!(",{}", fmt_f64(values[pair.dof(i, c)])));
        }
        out.push('\n');
    }
    out
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}
