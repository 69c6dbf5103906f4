//! Numerical integration primitives.
//!
//! [`integrate_line`] is an adaptive composite Gauss-Legendre rule: every
//! panel is integrated with 15 nodes and compared against the sum over its two
//! halves. A panel is accepted once that difference is below its share of the
//! requested tolerance, otherwise both halves are refined recursively. The
//! recursion sums left before right, so the result is a fixed pairwise tree
//! and bit-reproducible.
//!
//! Sphere integrals by Monte Carlo use ChaCha8 (`rand_chacha::ChaCha8Rng`
//! seeded with `seed_from_u64`) to draw standard Gaussian vectors which are
//! then normalised onto the sphere.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Nodes per Gauss-Legendre panel.
pub const GL_POINTS: usize = 15;
/// Number of equal panels the interval is split into before refinement.
const INITIAL_PANELS: usize = 8;
/// Maximum bisection depth below an initial panel.
const MAX_DEPTH: u32 = 48;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

struct Rule {
    nodes: [f64; GL_POINTS],
    weights: [f64; GL_POINTS],
}

/// Legendre polynomial P_n and its derivative at `x`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_POINTS;
        let mut nodes = [0.0; GL_POINTS];
        let mut weights = [0.0; GL_POINTS];
        for i in 0..n {
            // Newton from the Tricomi initial guess; converges in a handful of steps.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Rule { nodes, weights }
    })
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let r = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    for (x, w) in r.nodes.iter().zip(r.weights.iter()) {
        sum += w * f(mid + half * x);
    }
    sum * half
}

struct Partial {
    value: f64,
    error: f64,
    evaluations: usize,
    converged: bool,
}

fn refine<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> Partial {
    let mid = 0.5 * (a + b);
    let left = panel(f, a, mid);
    let right = panel(f, mid, b);
    let evaluations = 2 * GL_POINTS;
    let refined = left + right;
    let diff = (refined - whole).abs();
    // Below this the difference is rounding noise and further bisection cannot help.
    let noise = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if diff <= tol || diff <= noise {
        return Partial {
            value: refined,
            error: diff,
            evaluations,
            converged: true,
        };
    }
    if depth >= MAX_DEPTH || mid <= a || mid >= b {
        return Partial {
            value: refined,
            error: diff,
            evaluations,
            converged: false,
        };
    }
    let l = refine(f, a, mid, left, 0.5 * tol, depth + 1);
    let r = refine(f, mid, b, right, 0.5 * tol, depth + 1);
    Partial {
        value: l.value + r.value,
        error: l.error + r.error,
        evaluations: evaluations + l.evaluations + r.evaluations,
        converged: l.converged && r.converged,
    }
}

/// Non-adaptive composite rule over `panels` equal panels, used to size tolerances.
pub fn integrate_fixed<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let width = (b - a) / panels as f64;
    (0..panels)
        .map(|i| panel(&f, a + width * i as f64, a + width * (i + 1) as f64))
        .sum()
}

/// Adaptive Gauss-Legendre integral of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate_line<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<IntegralResult> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("integration interval [{a}, {b}] must satisfy a < b")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let width = (b - a) / INITIAL_PANELS as f64;
    let share = tol / INITIAL_PANELS as f64;
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut converged = true;
    for i in 0..INITIAL_PANELS {
        let lo = a + width * i as f64;
        let hi = if i + 1 == INITIAL_PANELS { b } else { a + width * (i + 1) as f64 };
        let whole = panel(&f, lo, hi);
        let p = refine(&f, lo, hi, whole, share, 0);
        value += p.value;
        error += p.error;
        evaluations += GL_POINTS + p.evaluations;
        converged &= p.converged;
    }
    if !value.is_finite() {
        return Err(Error::Domain("integrand is not finite on the interval".into()));
    }
    if !converged || error > tol {
        return Err(Error::Quadrature {
            value,
            error_estimate: error,
            tol,
        });
    }
    Ok(IntegralResult {
        value,
        error_estimate: error,
        evaluations,
    })
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of |Γ(x)| (Lanczos, g = 7, nine terms).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx)
        return (PI / (PI * x).sin()).abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Surface area of the unit sphere `S^{N-1}` in `R^N`: `2 π^{N/2} / Γ(N/2)`.
///
/// `N = 1` gives 2, the counting measure on `S^0 = {-1, 1}`.
pub fn sphere_surface_area(n: usize) -> f64 {
    assert!(n >= 1, "sphere_surface_area needs N >= 1");
    let half = n as f64 / 2.0;
    2.0 * (half * PI.ln() - ln_gamma(half)).exp()
}

/// Monte Carlo estimate of `∫_{S^{N-1}} f dω` and its standard error.
pub fn integrate_sphere_mc<F: Fn(&[f64]) -> f64>(f: F, n: usize, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if n < 1 {
        return Err(Error::Domain("sphere dimension must be at least 1".into()));
    }
    if samples < 100 {
        return Err(Error::Domain(format!("need at least 100 samples, got {samples}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = vec![0.0; n];
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut count = 0usize;
    while count < samples {
        let mut norm_sq = 0.0;
        for c in point.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *c = z;
            norm_sq += z * z;
        }
        if norm_sq == 0.0 {
            continue;
        }
        let inv = norm_sq.sqrt().recip();
        point.iter_mut().for_each(|c| *c *= inv);
        let v = f(&point);
        count += 1;
        // Welford update
        let delta = v - mean;
        mean += delta / count as f64;
        m2 += delta * (v - mean);
    }
    let area = sphere_surface_area(n);
    let variance = m2 / (samples as f64 - 1.0);
    Ok((area * mean, area * (variance / samples as f64).sqrt()))
}
