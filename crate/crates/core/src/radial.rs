//! The one-dimensional sector operator and its truncated spectra.
//!
//! On the sector `u = f(ρ) P(ω)` the substitution `g = ρ^{(N-1)/2} f` turns
//! `-Δ + k/|x|²` into `-g'' + c/ρ²` on `L²((0, ∞), dρ)` with
//!
//! ```text
//! c = λ_ℓ + k + (N-1)(N-3)/4.
//! ```
//!
//! The sector form is bounded below exactly when `c ≥ -1/4`, which is the same
//! statement as `λ_ℓ ≥ -(N-2)²/4 - k`. Below that threshold the bottom of the
//! Dirichlet spectrum on `(ε, R)` scales like `-ε^{-2}` (fall to the center).
//!
//! Truncations use Dirichlet conditions at both ends, a three-point stencil
//! and Sturm-count bisection for the lowest eigenvalues.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonics::{validate_degree, Dimension};

/// Lower tolerance for a truncated eigenvalue to count as nonnegative.
pub const BOUNDED_TOL: f64 = 1e-8;
/// The last `λ_min` of a scan must fall below this to be classified unbounded.
pub const UNBOUNDED_THRESHOLD: f64 = -1e3;
const BISECTION_MAX_ITER: usize = 400;

/// `c = λ_ℓ + k + (N-1)(N-3)/4`.
pub fn effective_coupling(n: i64, ell: i64, k: f64) -> Result<f64> {
    let (dim, ell) = validate_degree(n, ell)?;
    Ok(coupling(dim, ell, k))
}

fn coupling(dim: Dimension, ell: u32, k: f64) -> f64 {
    let n = dim.get() as i64;
    dim.eigenvalue(ell) as f64 + k + ((n - 1) * (n - 3)) as f64 / 4.0
}

/// `λ_ℓ ≥ -(N-2)²/4 - k`, evaluated as `4λ_ℓ + (N-2)² + 4k ≥ 0`.
pub fn condition_holds(n: i64, ell: i64, k: f64) -> Result<bool> {
    let (dim, ell) = validate_degree(n, ell)?;
    Ok(condition(dim, ell, k))
}

fn condition(dim: Dimension, ell: u32, k: f64) -> bool {
    let n = dim.get() as f64;
    4.0 * dim.eigenvalue(ell) as f64 + (n - 2.0) * (n - 2.0) + 4.0 * k >= 0.0
}

/// Smallest `ℓ ≥ 0` for which the lower-bound condition holds.
pub fn minimal_degree(n: i64, k: f64) -> Result<u32> {
    let dim = Dimension::new(n)?;
    if !k.is_finite() {
        return Err(Error::Domain(format!("coupling k must be finite, got {k}")));
    }
    Ok((0u32..).find(|&ell| condition(dim, ell, k)).expect("λ_ℓ grows without bound"))
}

/// Lower bounds on `k` from the four existence regimes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeThresholds {
    /// `-(N-2)²/4`, Friedrichs extension via the classical Hardy inequality.
    pub friedrichs: f64,
    /// `-(N-2)²/4 + 1`, essential selfadjointness on `C_0^∞(R^N \ {0})`.
    pub essential_sa: f64,
    /// `-N/4`, domain avoiding the coordinate hyperplanes.
    pub quadrant: f64,
    /// Any `k` once the harmonic sector is chosen: `-∞`.
    pub theorem1: f64,
}

/// Each entry is a quarter-integer and therefore exact in `f64`.
pub fn regime_thresholds(n: i64) -> Result<RegimeThresholds> {
    let dim = Dimension::new(n)?;
    let n = dim.get() as i64;
    let sq = (n - 2) * (n - 2);
    Ok(RegimeThresholds {
        friedrichs: (-sq) as f64 / 4.0,
        essential_sa: (4 - sq) as f64 / 4.0,
        quadrant: (-n) as f64 / 4.0,
        theorem1: f64::NEG_INFINITY,
    })
}

/// `(N, ℓ, k)` together with its effective coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialProblem {
    pub dim: Dimension,
    pub ell: u32,
    pub k: f64,
    pub c: f64,
}

impl RadialProblem {
    pub fn new(n: i64, ell: i64, k: f64) -> Result<Self> {
        let (dim, ell) = validate_degree(n, ell)?;
        if !k.is_finite() {
            return Err(Error::Domain(format!("coupling k must be finite, got {k}")));
        }
        Ok(RadialProblem {
            dim,
            ell,
            k,
            c: coupling(dim, ell, k),
        })
    }

    /// A bare `-g'' + c/ρ²` problem with no `(N, ℓ, k)` behind it; `N = 3`, `ℓ = 0`, `k = c`.
    pub fn with_coupling(c: f64) -> Result<Self> {
        Self::new(3, 0, c)
    }

    pub fn condition_holds(&self) -> bool {
        condition(self.dim, self.ell, self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Spacing {
    LogUniform,
    Uniform,
}

impl FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "log" | "log-uniform" | "loguniform" => Ok(Spacing::LogUniform),
            "uniform" => Ok(Spacing::Uniform),
            other => Err(Error::Parse(format!("unknown grid spacing `{other}`"))),
        }
    }
}

/// Interior nodes `j = 1..=n` of a grid on `[inner, outer]`; `j = 0` and
/// `j = n + 1` are the Dirichlet endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub inner: f64,
    pub outer: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub const DEFAULT_POINTS: usize = 4000;
    pub const DEFAULT_OUTER: f64 = 100.0;

    /// `inner = 0` is allowed for uniform grids only.
    pub fn new(inner: f64, outer: f64, points: usize, spacing: Spacing) -> Result<Self> {
        if points < 16 {
            return Err(Error::Domain(format!("grid needs at least 16 points, got {points}")));
        }
        if !(inner >= 0.0) || !(outer > inner) || !outer.is_finite() {
            return Err(Error::Domain(format!("grid interval ({inner}, {outer}) must satisfy 0 ≤ ε < R")));
        }
        if spacing == Spacing::LogUniform && inner == 0.0 {
            return Err(Error::Domain("log-uniform grid needs ε > 0".into()));
        }
        Ok(GridSpec {
            inner,
            outer,
            points,
            spacing,
        })
    }

    /// Node `j` in `0..=n+1`.
    pub fn node(&self, j: usize) -> f64 {
        let frac = j as f64 / (self.points + 1) as f64;
        if j == 0 {
            return self.inner;
        }
        if j == self.points + 1 {
            return self.outer;
        }
        match self.spacing {
            Spacing::LogUniform => self.inner * (self.outer / self.inner).powf(frac),
            Spacing::Uniform => self.inner + frac * (self.outer - self.inner),
        }
    }
}

/// Symmetric tridiagonal matrix: `diagonal[0..n]`, `off_diagonal[0..n-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diagonal: Vec<f64>,
    pub off_diagonal: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() || off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::Domain(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal entries",
                diagonal.len(),
                off_diagonal.len()
            )));
        }
        if diagonal.iter().chain(&off_diagonal).any(|v| !v.is_finite()) {
            return Err(Error::Domain("tridiagonal matrix has non-finite entries".into()));
        }
        Ok(Tridiagonal { diagonal, off_diagonal })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Number of eigenvalues strictly below `x` (negative pivots of `LDLᵀ` of `T - x`).
    pub fn sturm_count(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diagonal[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for (d, e) in self.diagonal[1..].iter().zip(&self.off_diagonal) {
            // a zero pivot is nudged off zero; the count is unaffected at generic x
            let pivot = if q == 0.0 { f64::EPSILON * (e.abs() + f64::MIN_POSITIVE) } else { q };
            q = (d - x) - e * e / pivot;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off_diagonal[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off_diagonal[i].abs() } else { 0.0 };
            lo = lo.min(self.diagonal[i] - left - right);
            hi = hi.max(self.diagonal[i] + left + right);
        }
        (lo, hi)
    }
}

/// Symmetric three-point discretisation of `-g'' + c/ρ²` with Dirichlet ends.
///
/// With steps `h_j = ρ_j - ρ_{j-1}` and dual cell widths
/// `w_j = (h_j + h_{j+1})/2`, the variable-step second difference is
/// `W^{-1} K` with `K` symmetric; the returned matrix is the similar
/// `W^{-1/2} K W^{-1/2} + diag(c/ρ_j²)`. On a uniform grid this is the usual
/// `(-1, 2, -1)/h²` stencil.
pub fn assemble(problem: &RadialProblem, grid: &GridSpec) -> Result<Tridiagonal> {
    let n = grid.points;
    let nodes: Vec<f64> = (0..=n + 1).map(|j| grid.node(j)).collect();
    let steps: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
    if steps.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::Domain("grid nodes are not strictly increasing".into()));
    }
    let cell: Vec<f64> = (1..=n).map(|j| 0.5 * (steps[j - 1] + steps[j])).collect();
    let diagonal: Vec<f64> = (1..=n)
        .map(|j| {
            let rho = nodes[j];
            (1.0 / steps[j - 1] + 1.0 / steps[j]) / cell[j - 1] + problem.c / (rho * rho)
        })
        .collect();
    let off_diagonal: Vec<f64> = (1..n).map(|j| -1.0 / (steps[j] * (cell[j - 1] * cell[j]).sqrt())).collect();
    Tridiagonal::new(diagonal, off_diagonal)
}

/// The `count` smallest eigenvalues, ascending, by Sturm bisection.
///
/// Each eigenvalue is bracketed to width `≤ 1e-10 · max(1, |λ|)`.
pub fn lowest_eigenvalues(matrix: &Tridiagonal, count: usize) -> Result<Vec<f64>> {
    if count == 0 || count > matrix.dim() {
        return Err(Error::Domain(format!(
            "requested {count} eigenvalues of a {}×{} matrix",
            matrix.dim(),
            matrix.dim()
        )));
    }
    let (glo, ghi) = matrix.gershgorin();
    let pad = 1e-12 * glo.abs().max(ghi.abs()).max(1.0);
    let (glo, ghi) = (glo - pad, ghi + pad);
    let mut out = Vec::with_capacity(count);
    let mut lo = glo;
    for index in 0..count {
        // λ_index is the smallest x with sturm_count(x) > index
        let (mut a, mut b) = (lo, ghi);
        let mut converged = false;
        for _ in 0..BISECTION_MAX_ITER {
            let mid = 0.5 * (a + b);
            if b - a <= 1e-10 * mid.abs().max(1.0) || mid <= a || mid >= b {
                converged = true;
                break;
            }
            if matrix.sturm_count(mid) > index {
                b = mid;
            } else {
                a = mid;
            }
        }
        if !converged {
            return Err(Error::Bisection {
                index,
                iterations: BISECTION_MAX_ITER,
            });
        }
        let value = 0.5 * (a + b);
        out.push(value);
        lo = a;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub grid: GridSpec,
    pub problem: RadialProblem,
    pub sturm_counts_verified: bool,
}

/// Assembles the truncation and extracts its `count` lowest eigenvalues,
/// re-checking them against Sturm counts at the midpoints between neighbours.
pub fn spectrum(problem: &RadialProblem, grid: &GridSpec, count: usize) -> Result<SpectrumResult> {
    let matrix = assemble(problem, grid)?;
    let eigenvalues = lowest_eigenvalues(&matrix, count)?;
    let increasing = eigenvalues.windows(2).all(|w| w[0] < w[1]);
    let counts_ok = eigenvalues.iter().enumerate().all(|(i, &lam)| {
        let below = if i == 0 { matrix.gershgorin().0 - 1.0 } else { 0.5 * (eigenvalues[i - 1] + lam) };
        let above = match eigenvalues.get(i + 1) {
            Some(&next) => 0.5 * (lam + next),
            None => lam + 1e-9 * lam.abs().max(1.0),
        };
        matrix.sturm_count(below) == i && matrix.sturm_count(above) == i + 1
    });
    Ok(SpectrumResult {
        eigenvalues,
        grid: *grid,
        problem: *problem,
        sturm_counts_verified: increasing && counts_ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Bounded,
    Unbounded,
    Inconclusive,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::Bounded => "BOUNDED",
            Classification::Unbounded => "UNBOUNDED",
            Classification::Inconclusive => "INCONCLUSIVE",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub epsilon: f64,
    pub lambda_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub problem: RadialProblem,
    pub rows: Vec<ScanRow>,
    pub classification: Classification,
    pub condition_holds: bool,
}

impl ScanReport {
    /// The numerics agree with the lower-bound condition.
    pub fn consistent(&self) -> bool {
        let expected = if self.condition_holds {
            Classification::Bounded
        } else {
            Classification::Unbounded
        };
        self.classification == expected
    }
}

pub fn classify(lambda_mins: &[f64]) -> Classification {
    if lambda_mins.iter().all(|&l| l >= -BOUNDED_TOL) {
        return Classification::Bounded;
    }
    let decreasing = lambda_mins.windows(2).all(|w| w[1] < w[0]);
    match lambda_mins.last() {
        Some(&last) if decreasing && last < UNBOUNDED_THRESHOLD => Classification::Unbounded,
        _ => Classification::Inconclusive,
    }
}

/// Lowest truncated eigenvalue for each inner radius on a log-uniform grid.
///
/// Returns the report when the classification matches the lower-bound
/// condition, and [`Error::Diagnostic`] otherwise; use
/// [`fall_to_center_report`] to get the report regardless.
pub fn fall_to_center_scan(problem: &RadialProblem, eps_list: &[f64], outer: f64, points: usize) -> Result<ScanReport> {
    let report = fall_to_center_report(problem, eps_list, outer, points)?;
    if !report.consistent() {
        return Err(Error::Diagnostic(format!(
            "N={}, ℓ={}, k={}: scan classified {} but the lower-bound condition is {}",
            problem.dim, problem.ell, problem.k, report.classification, report.condition_holds
        )));
    }
    Ok(report)
}

pub fn fall_to_center_report(
    problem: &RadialProblem,
    eps_list: &[f64],
    outer: f64,
    points: usize,
) -> Result<ScanReport> {
    if eps_list.is_empty() {
        return Err(Error::Domain("ε list is empty".into()));
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Domain("ε list must be strictly decreasing".into()));
    }
    if eps_list.iter().any(|&e| !(e > 0.0) || !(e < outer)) {
        return Err(Error::Domain(format!("every ε must lie in (0, R = {outer})")));
    }
    let rows = eps_list
        .par_iter()
        .map(|&eps| {
            let grid = GridSpec::new(eps, outer, points, Spacing::LogUniform)?;
            let matrix = assemble(problem, &grid)?;
            let lambda_min = lowest_eigenvalues(&matrix, 1)?[0];
            Ok(ScanRow { epsilon: eps, lambda_min })
        })
        .collect::<Result<Vec<_>>>()?;
    let mins: Vec<f64> = rows.iter().map(|r| r.lambda_min).collect();
    Ok(ScanReport {
        problem: *problem,
        classification: classify(&mins),
        condition_holds: problem.condition_holds(),
        rows,
    })
}
