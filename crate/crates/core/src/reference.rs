//! Closed-form spectra used as oracles: the Steklov problem on the unit disk
//! (modified Bessel ratios) and the Robin Laplacian on the unit square
//! (sums of 1D transcendental eigenvalues).

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

pub const MAX_BESSEL_ORDER: u32 = 20;
pub const MAX_ROBIN_COUNT: usize = 50;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReferenceError {
    #[error("no sign change of the Robin characteristic function on ({lo}, {hi})")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Modified Bessel function of the first kind `I_n(x)` by its power series.
///
/// Accurate to rounding for `n ≤ 20`, `0 ≤ x ≤ 10`.
pub fn bessel_i(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    let mut term = (1..=n).fold(1.0, |t, j| t * half / j as f64);
    let mut sum = term;
    let q = half * half;
    for m in 1..500u32 {
        term *= q / (m as f64 * (m + n) as f64);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// `I_n'(1) / I_n(1)`, the Steklov eigenvalue of `−Δu + u = 0`, `∂u/∂ν = μu`
/// on the unit disk for the mode `I_n(r) cos(nθ)`.
pub fn disk_steklov_exact(n: u32) -> f64 {
    let i_n = bessel_i(n, 1.0);
    let derivative = if n == 0 { bessel_i(1, 1.0) } else { 0.5 * (bessel_i(n - 1, 1.0) + bessel_i(n + 1, 1.0)) };
    derivative / i_n
}

/// Ascending disk eigenvalues with multiplicity (each mode `n ≥ 1` twice).
pub fn disk_steklov_spectrum(count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut n = 0;
    while out.len() < count {
        let mu = disk_steklov_exact(n);
        out.push(mu);
        if n > 0 && out.len() < count {
            out.push(mu);
        }
        n += 1;
    }
    out
}

/// `(σ² − ω²) sin ω + 2σω cos ω`; its positive zeros give the 1D Robin
/// eigenvalues `ω²` on `(0, 1)`.
pub fn robin_characteristic(sigma: f64, omega: f64) -> f64 {
    (sigma * sigma - omega * omega) * omega.sin() + 2.0 * sigma * omega * omega.cos()
}

/// First `count` positive roots of [`robin_characteristic`], one per interval
/// `(mπ, (m+1)π)`, bisected to machine resolution.
pub fn robin_interval_roots(sigma: f64, count: usize) -> Result<Vec<f64>, ReferenceError> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(ReferenceError::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    if count > MAX_ROBIN_COUNT {
        return Err(ReferenceError::InvalidParameter(format!("count {count} exceeds {MAX_ROBIN_COUNT}")));
    }
    (0..count).map(|m| robin_root(sigma, m)).collect()
}

fn robin_root(sigma: f64, m: usize) -> Result<f64, ReferenceError> {
    let f = |w: f64| robin_characteristic(sigma, w);
    // Near 0⁺ the function behaves like σ(σ+2)ω > 0; at mπ it has sign (−1)^m.
    let left_sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let (mut lo, mut hi) = (m as f64 * PI, (m + 1) as f64 * PI);
    let lo_value = if m == 0 { 1.0 } else { f(lo) };
    if lo_value * left_sign <= 0.0 || f(hi) * left_sign >= 0.0 {
        return Err(ReferenceError::BracketFailure { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) * left_sign > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Ascending Robin eigenvalues `ω_i² + ω_j²` on the unit square, with multiplicity.
pub fn robin_square_spectrum(sigma: f64, count: usize) -> Result<Vec<f64>, ReferenceError> {
    let roots = robin_interval_roots(sigma, count)?;
    let squares: Vec<f64> = roots.iter().map(|w| w * w).collect();
    let mut sums: Vec<f64> = squares.iter().flat_map(|a| squares.iter().map(move |b| a + b)).collect();
    sums.sort_by(f64::total_cmp);
    sums.truncate(count);
    Ok(sums)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleTable {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub values: Vec<f64>,
    /// Bound on the absolute error of each value.
    pub accuracy: f64,
}

impl OracleTable {
    pub fn robin_square(sigma: f64, count: usize) -> Result<Self, ReferenceError> {
        Ok(OracleTable {
            name: "robin_square".into(),
            params: BTreeMap::from([("sigma".into(), sigma), ("count".into(), count as f64)]),
            values: robin_square_spectrum(sigma, count)?,
            accuracy: 1e-10,
        })
    }

    pub fn robin_1d(sigma: f64, count: usize) -> Result<Self, ReferenceError> {
        let values = robin_interval_roots(sigma, count)?.iter().map(|w| w * w).collect();
        Ok(OracleTable {
            name: "robin_1d".into(),
            params: BTreeMap::from([("sigma".into(), sigma), ("count".into(), count as f64)]),
            values,
            accuracy: 1e-10,
        })
    }

    pub fn disk_steklov(count: usize) -> Result<Self, ReferenceError> {
        if count > 2 * MAX_BESSEL_ORDER as usize + 1 {
            return Err(ReferenceError::InvalidParameter(format!(
                "count {count} needs Bessel orders above {MAX_BESSEL_ORDER}"
            )));
        }
        Ok(OracleTable {
            name: "disk_steklov".into(),
            params: BTreeMap::from([("count".into(), count as f64)]),
            values: disk_steklov_spectrum(count),
            accuracy: 1e-12,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,value\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{:?}\n", i + 1, v));
        }
        out
    }
}
