//! The sharp Hardy constant on `R^N \ F_P` and its minimizing sequence.
//!
//! Everything here works with separable functions `u(x) = f(|x|) P(x/|x|)`.
//! For those, the integrals over `R^N` factor into `‖P‖²_{L²(S^{N-1})}` times a
//! one-dimensional radial integral, which is evaluated in the logarithmic
//! variable `s = log ρ`:
//!
//! ```text
//! ∫ |u|²/|x|² dx = ‖P‖² ∫ g(s)² e^{(N-2)s} ds
//! ∫ |∇u|² dx     = ‖P‖² ∫ (g'(s)² + λ_ℓ g(s)²) e^{(N-2)s} ds
//! ```
//!
//! with `g(s) = f(e^s)` and `g'(s) = ρ f'(ρ)`. Along
//! `u_m = m^{-1/2} φ(log|x|/m) ψ(x)` both integrands are smooth and supported
//! in `s ∈ [-m, m]`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonics::{euclidean_norm, fd_laplacian, validate_degree, HarmonicSpec};
use crate::quadrature::{integrate_fixed, integrate_line, sphere_surface_area};

/// Absolute tolerance per radial integral, scaled up for integrals much larger than one.
pub const QUAD_TOL: f64 = 1e-9;

/// `((N-2)/2)² + λ_ℓ`.
pub fn sharp_constant(n: i64, ell: i64) -> Result<f64> {
    let (dim, ell) = validate_degree(n, ell)?;
    let n = dim.get() as f64;
    Ok((n - 2.0) * (n - 2.0) / 4.0 + dim.eigenvalue(ell) as f64)
}

/// [`sharp_constant`] for the degree and dimension of `spec`.
pub fn sharp_constant_of(spec: &HarmonicSpec) -> f64 {
    let n = spec.n() as f64;
    (n - 2.0) * (n - 2.0) / 4.0 + spec.eigenvalue()
}

/// `ψ(x) = |x|^{1-N/2} P(x/|x|)`.
pub fn weight_psi(spec: &HarmonicSpec, x: &[f64]) -> Result<f64> {
    spec.check_dim(x.len())?;
    let r = euclidean_norm(x);
    if !(r > 0.0) {
        return Err(Error::Domain("ψ is undefined at the origin".into()));
    }
    Ok(psi_unchecked(spec, x, r))
}

fn psi_unchecked(spec: &HarmonicSpec, x: &[f64], r: f64) -> f64 {
    let w: Vec<f64> = x.iter().map(|c| c / r).collect();
    r.powf(1.0 - spec.n() as f64 / 2.0) * spec.eval_unit(&w)
}

/// `|Δ_h ψ(x) + C ψ(x)/|x|²|` with `C` the sharp constant.
pub fn delta_psi_residual(spec: &HarmonicSpec, x: &[f64], h: f64) -> Result<f64> {
    let psi = weight_psi(spec, x)?;
    let lap = fd_laplacian(|y| psi_unchecked(spec, y, euclidean_norm(y)), x, h)?;
    let r2: f64 = x.iter().map(|c| c * c).sum();
    Ok((lap + sharp_constant_of(spec) * psi / r2).abs())
}

/// Size of the two terms of the `Δψ` identity at `x`: `(1 + C)|ψ(x)|/|x|²`.
pub fn psi_local_scale(spec: &HarmonicSpec, x: &[f64]) -> Result<f64> {
    let psi = weight_psi(spec, x)?;
    let r2: f64 = x.iter().map(|c| c * c).sum();
    Ok((1.0 + sharp_constant_of(spec)) * psi.abs() / r2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BumpKind {
    /// `exp(-1/(1-t²))`, smooth.
    Mollifier,
    /// `cos²(πt/2)`, continuously differentiable.
    CosineWindow,
}

impl FromStr for BumpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mollifier" => Ok(BumpKind::Mollifier),
            "cosine" | "cosine-window" | "cosinewindow" => Ok(BumpKind::CosineWindow),
            other => Err(Error::Parse(format!("unknown bump kind `{other}`"))),
        }
    }
}

impl fmt::Display for BumpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BumpKind::Mollifier => write!(f, "mollifier"),
            BumpKind::CosineWindow => write!(f, "cosine"),
        }
    }
}

impl BumpKind {
    /// Unnormalised shape and its first two derivatives at `t`.
    fn shape(self, t: f64) -> (f64, f64, f64) {
        if !(t.abs() < 1.0) {
            return (0.0, 0.0, 0.0);
        }
        match self {
            BumpKind::Mollifier => {
                let x = 1.0 - t * t;
                // exp(-1/x) underflows long before the polynomial prefactors overflow
                if x < 1.0 / 740.0 {
                    return (0.0, 0.0, 0.0);
                }
                let v = (-1.0 / x).exp();
                let q = -2.0 * t / (x * x);
                let dq = -2.0 / (x * x) - 8.0 * t * t / (x * x * x);
                (v, v * q, v * (q * q + dq))
            }
            BumpKind::CosineWindow => {
                let a = 0.5 * PI * t;
                let c = a.cos();
                (c * c, -0.5 * PI * (PI * t).sin(), -0.5 * PI * PI * (PI * t).cos())
            }
        }
    }
}

/// A compactly supported profile `φ` on `[-1, 1]` with `‖φ‖_{L²(R)} = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BumpProfile {
    kind: BumpKind,
    scale: f64,
    l2_norm: f64,
    derivative_energy: f64,
}

impl BumpProfile {
    pub fn new(kind: BumpKind) -> Result<Self> {
        let raw_sq = integrate_line(|t| kind.shape(t).0.powi(2), -1.0, 1.0, 1e-15)?.value;
        let scale = raw_sq.sqrt().recip();
        let l2_norm = integrate_line(|t| (scale * kind.shape(t).0).powi(2), -1.0, 1.0, 1e-14)?
            .value
            .sqrt();
        let derivative_energy = integrate_line(|t| (scale * kind.shape(t).1).powi(2), -1.0, 1.0, 1e-13)?.value;
        Ok(BumpProfile {
            kind,
            scale,
            l2_norm,
            derivative_energy,
        })
    }

    pub fn kind(&self) -> BumpKind {
        self.kind
    }

    /// Quadrature-verified `‖φ‖_{L²(R)}`.
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm
    }

    /// `‖φ'‖²_{L²(R)}`.
    pub fn derivative_energy(&self) -> f64 {
        self.derivative_energy
    }

    /// Normalisation constant applied to the raw shape.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn value(&self, t: f64) -> f64 {
        self.scale * self.kind.shape(t).0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.scale * self.kind.shape(t).1
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        self.scale * self.kind.shape(t).2
    }
}

/// Radial factor `f` of a separable test function.
///
/// Implementors give `f` and `f'` on `(0, ∞)`. The logarithmic forms
/// `g(s) = f(e^s)` and `g'(s) = ρ f'(ρ)` used by the integrals default to
/// those, but can be overridden with a more accurate direct formula.
pub trait RadialProfile: fmt::Debug + Send + Sync {
    fn value(&self, rho: f64) -> f64;

    fn derivative(&self, rho: f64) -> f64;

    /// Support `[a, b]` with `0 < a < b < ∞`.
    fn support(&self) -> (f64, f64);

    fn log_support(&self) -> (f64, f64) {
        let (a, b) = self.support();
        (a.ln(), b.ln())
    }

    fn log_value(&self, s: f64) -> f64 {
        self.value(s.exp())
    }

    fn log_derivative(&self, s: f64) -> f64 {
        let rho = s.exp();
        rho * self.derivative(rho)
    }
}

/// Radial factor of `u_m`: `f(ρ) = m^{-1/2} φ(log ρ / m) ρ^{1-N/2}`.
#[derive(Debug, Clone)]
pub struct MinimizerProfile {
    bump: BumpProfile,
    m: u32,
    exponent: f64,
}

impl MinimizerProfile {
    pub fn new(bump: BumpProfile, m: u32, n: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("minimizing sequence index m must be at least 1".into()));
        }
        Ok(MinimizerProfile {
            bump,
            m,
            exponent: 1.0 - n as f64 / 2.0,
        })
    }
}

impl RadialProfile for MinimizerProfile {
    fn value(&self, rho: f64) -> f64 {
        self.log_value(rho.ln())
    }

    fn derivative(&self, rho: f64) -> f64 {
        self.log_derivative(rho.ln()) / rho
    }

    fn support(&self) -> (f64, f64) {
        let m = f64::from(self.m);
        ((-m).exp(), m.exp())
    }

    fn log_support(&self) -> (f64, f64) {
        let m = f64::from(self.m);
        (-m, m)
    }

    fn log_value(&self, s: f64) -> f64 {
        let m = f64::from(self.m);
        self.bump.value(s / m) * (self.exponent * s).exp() / m.sqrt()
    }

    fn log_derivative(&self, s: f64) -> f64 {
        let m = f64::from(self.m);
        let t = s / m;
        (self.bump.derivative(t) / m + self.exponent * self.bump.value(t)) * (self.exponent * s).exp() / m.sqrt()
    }
}

/// One term `amplitude · B((log ρ - center)/width)` of a [`BumpSum`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpTerm {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

/// `f(ρ) = ρ^p Σ_j a_j B((log ρ - c_j)/w_j)` for a raw bump shape `B`.
#[derive(Debug, Clone)]
pub struct BumpSum {
    kind: BumpKind,
    power: f64,
    terms: Vec<BumpTerm>,
}

impl BumpSum {
    pub fn new(kind: BumpKind, power: f64, terms: Vec<BumpTerm>) -> Result<Self> {
        if terms.is_empty() || terms.iter().any(|t| !(t.width > 0.0) || !t.center.is_finite()) {
            return Err(Error::Domain("bump sum needs terms with positive widths".into()));
        }
        Ok(BumpSum { kind, power, terms })
    }
}

impl RadialProfile for BumpSum {
    fn value(&self, rho: f64) -> f64 {
        self.log_value(rho.ln())
    }

    fn derivative(&self, rho: f64) -> f64 {
        self.log_derivative(rho.ln()) / rho
    }

    fn support(&self) -> (f64, f64) {
        let (a, b) = self.log_support();
        (a.exp(), b.exp())
    }

    fn log_support(&self) -> (f64, f64) {
        let lo = self.terms.iter().map(|t| t.center - t.width).fold(f64::INFINITY, f64::min);
        let hi = self.terms.iter().map(|t| t.center + t.width).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    fn log_value(&self, s: f64) -> f64 {
        let sum: f64 = self
            .terms
            .iter()
            .map(|t| t.amplitude * self.kind.shape((s - t.center) / t.width).0)
            .sum();
        (self.power * s).exp() * sum
    }

    fn log_derivative(&self, s: f64) -> f64 {
        let (mut v, mut d) = (0.0, 0.0);
        for t in &self.terms {
            let (b, db, _) = self.kind.shape((s - t.center) / t.width);
            v += t.amplitude * b;
            d += t.amplitude * db / t.width;
        }
        (self.power * s).exp() * (self.power * v + d)
    }
}

/// `f(σρ)`: the radial factor of `u(σx)`.
#[derive(Debug, Clone)]
pub struct Dilated {
    inner: Arc<dyn RadialProfile>,
    sigma: f64,
}

impl RadialProfile for Dilated {
    fn value(&self, rho: f64) -> f64 {
        self.inner.value(self.sigma * rho)
    }

    fn derivative(&self, rho: f64) -> f64 {
        self.sigma * self.inner.derivative(self.sigma * rho)
    }

    fn support(&self) -> (f64, f64) {
        let (a, b) = self.inner.support();
        (a / self.sigma, b / self.sigma)
    }

    fn log_support(&self) -> (f64, f64) {
        let (a, b) = self.inner.log_support();
        let shift = self.sigma.ln();
        (a - shift, b - shift)
    }

    fn log_value(&self, s: f64) -> f64 {
        self.inner.log_value(s + self.sigma.ln())
    }

    fn log_derivative(&self, s: f64) -> f64 {
        self.inner.log_derivative(s + self.sigma.ln())
    }
}

/// `c · f(ρ)`.
#[derive(Debug, Clone)]
pub struct Scaled {
    inner: Arc<dyn RadialProfile>,
    factor: f64,
}

impl RadialProfile for Scaled {
    fn value(&self, rho: f64) -> f64 {
        self.factor * self.inner.value(rho)
    }

    fn derivative(&self, rho: f64) -> f64 {
        self.factor * self.inner.derivative(rho)
    }

    fn support(&self) -> (f64, f64) {
        self.inner.support()
    }

    fn log_support(&self) -> (f64, f64) {
        self.inner.log_support()
    }

    fn log_value(&self, s: f64) -> f64 {
        self.factor * self.inner.log_value(s)
    }

    fn log_derivative(&self, s: f64) -> f64 {
        self.factor * self.inner.log_derivative(s)
    }
}

/// `u(x) = f(|x|) P(x/|x|)` with `f` compactly supported in `(0, ∞)`.
///
/// `u` vanishes on the rays of `F_P` through the factor `P`; `f` keeps it away
/// from the origin and from infinity.
#[derive(Debug, Clone)]
pub struct SeparableTestFunction {
    radial: Arc<dyn RadialProfile>,
    angular: HarmonicSpec,
    label: String,
}

impl SeparableTestFunction {
    pub fn new(radial: Arc<dyn RadialProfile>, angular: HarmonicSpec, label: impl Into<String>) -> Result<Self> {
        let (a, b) = radial.support();
        if !(a > 0.0 && a < b && b.is_finite()) {
            return Err(Error::Domain(format!("radial support [{a}, {b}] must satisfy 0 < a < b < ∞")));
        }
        let (sa, sb) = radial.log_support();
        let ends = [radial.log_value(sa), radial.log_value(sb)];
        let peak = (0..=64)
            .map(|i| sa + (sb - sa) * f64::from(i) / 64.0)
            .map(|s| radial.log_value(s).abs())
            .fold(0.0, f64::max);
        if ends.iter().any(|v| v.abs() > 1e-12 * peak.max(f64::MIN_POSITIVE)) {
            return Err(Error::Domain("radial profile must vanish at both ends of its support".into()));
        }
        if !(angular.l2_norm() > 0.0) {
            return Err(Error::Domain("angular factor vanishes identically".into()));
        }
        let u = SeparableTestFunction {
            radial,
            angular,
            label: label.into(),
        };
        if !(u.raw_radial_mass() > 0.0) {
            return Err(Error::Domain("radial profile vanishes identically".into()));
        }
        Ok(u)
    }

    fn raw_radial_mass(&self) -> f64 {
        let (sa, sb) = self.radial.log_support();
        integrate_fixed(|s| self.radial.log_value(s).powi(2), sa, sb, 64)
    }

    pub fn radial(&self) -> &Arc<dyn RadialProfile> {
        &self.radial
    }

    pub fn angular(&self) -> &HarmonicSpec {
        &self.angular
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `u(x)`.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.angular.check_dim(x.len())?;
        let r = euclidean_norm(x);
        if r == 0.0 {
            return Ok(0.0);
        }
        let w: Vec<f64> = x.iter().map(|c| c / r).collect();
        let (a, b) = self.radial.support();
        let f = if r <= a || r >= b { 0.0 } else { self.radial.value(r) };
        Ok(f * self.angular.eval_unit(&w))
    }

    /// `x ↦ u(σx)`.
    pub fn dilated(&self, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Domain(format!("dilation factor must be positive, got {sigma}")));
        }
        Ok(SeparableTestFunction {
            radial: Arc::new(Dilated {
                inner: Arc::clone(&self.radial),
                sigma,
            }),
            angular: self.angular.clone(),
            label: format!("{} dilated by {sigma}", self.label),
        })
    }

    /// `c · u` (the factor multiplies the radial part).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if factor == 0.0 || !factor.is_finite() {
            return Err(Error::Domain("scale factor must be finite and nonzero".into()));
        }
        Ok(SeparableTestFunction {
            radial: Arc::new(Scaled {
                inner: Arc::clone(&self.radial),
                factor,
            }),
            angular: self.angular.clone(),
            label: format!("{} scaled by {factor}", self.label),
        })
    }

    fn radial_integral<F: Fn(f64) -> f64>(&self, integrand: F) -> Result<f64> {
        let (sa, sb) = self.radial.log_support();
        let size = integrate_fixed(|s| integrand(s).abs(), sa, sb, 64);
        let tol = if size > 0.0 && size.is_finite() { QUAD_TOL * size } else { QUAD_TOL };
        Ok(integrate_line(integrand, sa, sb, tol)?.value)
    }
}

/// `u_m(x) = m^{-1/2} φ(log|x|/m) ψ(x)`, supported in `e^{-m} ≤ |x| ≤ e^m`.
///
/// The harmonic is used as given; pass a normalised one for `‖u_m/|x|‖ = 1`.
pub fn minimizer_element(spec: &HarmonicSpec, bump: &BumpProfile, m: u32) -> Result<SeparableTestFunction> {
    let profile = MinimizerProfile::new(*bump, m, spec.n())?;
    SeparableTestFunction::new(Arc::new(profile), spec.clone(), format!("u_{m} ({} bump)", bump.kind()))
}

/// `Δu_m(x) = m^{-5/2} φ''(log|x|/m) ψ(x)/|x|² - C u_m(x)/|x|²`.
pub fn minimizer_laplacian(spec: &HarmonicSpec, bump: &BumpProfile, m: u32, x: &[f64]) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("minimizing sequence index m must be at least 1".into()));
    }
    let psi = weight_psi(spec, x)?;
    let r2: f64 = x.iter().map(|c| c * c).sum();
    let m = f64::from(m);
    let t = 0.5 * r2.ln() / m;
    let u = bump.value(t) * psi / m.sqrt();
    Ok(bump.second_derivative(t) * psi / (m.powf(2.5) * r2) - sharp_constant_of(spec) * u / r2)
}

/// `∫ |u|²/|x|² dx`.
pub fn weighted_l2_norm_sq(u: &SeparableTestFunction) -> Result<f64> {
    let shift = u.angular.n() as f64 - 2.0;
    let p_sq = u.angular.l2_norm().powi(2);
    let r = u.radial.as_ref();
    Ok(p_sq * u.radial_integral(|s| r.log_value(s).powi(2) * (shift * s).exp())?)
}

/// `∫ |∇u|² dx = ‖P‖² ∫ (f'² + λ_ℓ f²/ρ²) ρ^{N-1} dρ`.
pub fn dirichlet_energy(u: &SeparableTestFunction) -> Result<f64> {
    let shift = u.angular.n() as f64 - 2.0;
    let lambda = u.angular.eigenvalue();
    let p_sq = u.angular.l2_norm().powi(2);
    let r = u.radial.as_ref();
    Ok(p_sq
        * u.radial_integral(|s| {
            let g = r.log_value(s);
            let dg = r.log_derivative(s);
            (dg * dg + lambda * g * g) * (shift * s).exp()
        })?)
}

pub fn rayleigh_quotient(u: &SeparableTestFunction) -> Result<f64> {
    let denom = weighted_l2_norm_sq(u)?;
    if !(denom > 0.0) {
        return Err(Error::Domain("weighted norm of the test function is zero".into()));
    }
    Ok(dirichlet_energy(u)? / denom)
}

/// `⟨H_P u, u⟩ = ∫|∇u|² + k ∫|u|²/|x|²`.
pub fn form_value(u: &SeparableTestFunction, k: f64) -> Result<f64> {
    Ok(dirichlet_energy(u)? + k * weighted_l2_norm_sq(u)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalitySweepRow {
    pub m: u32,
    pub rayleigh: f64,
    /// `C + ‖φ'‖²/m²`.
    pub predicted: f64,
    pub gap: f64,
}

/// Rayleigh quotient of `u_m` against `C + ‖φ'‖²/m²` for every `m`.
pub fn optimality_sweep(spec: &HarmonicSpec, bump: &BumpProfile, m_list: &[u32]) -> Result<Vec<OptimalitySweepRow>> {
    if m_list.is_empty() {
        return Err(Error::Domain("m list is empty".into()));
    }
    if m_list.contains(&0) {
        return Err(Error::Domain("entries of the m list must be at least 1".into()));
    }
    let constant = sharp_constant_of(spec);
    m_list
        .par_iter()
        .map(|&m| {
            let u = minimizer_element(spec, bump, m)?;
            let rayleigh = rayleigh_quotient(&u)?;
            let predicted = constant + bump.derivative_energy() / f64::from(m * m);
            Ok(OptimalitySweepRow {
                m,
                rayleigh,
                predicted,
                gap: rayleigh - predicted,
            })
        })
        .collect()
}

/// Random point with `|x| ∈ [1, 2]` whose direction stays away from `F_P`:
/// `|P(ω)|` is at least half the root-mean-square of `P` over the sphere.
pub fn sample_off_nodal_point<R: Rng + ?Sized>(spec: &HarmonicSpec, rng: &mut R) -> Vec<f64> {
    let n = spec.n();
    let rms = spec.l2_norm() / sphere_surface_area(n).sqrt();
    loop {
        let mut w: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = euclidean_norm(&w);
        if norm == 0.0 {
            continue;
        }
        w.iter_mut().for_each(|c| *c /= norm);
        if spec.eval_unit(&w).abs() < 0.5 * rms {
            continue;
        }
        let r = rng.random_range(1.0..2.0);
        return w.into_iter().map(|c| c * r).collect();
    }
}

/// Random separable test function with the angular part `spec`.
///
/// The radial factor is a [`BumpSum`] of one to four bumps in `log ρ` times
/// `ρ^p`; roughly one draw in four uses the critical power `p = 1 - N/2` and
/// wide bumps, which puts the Rayleigh quotient close to the sharp constant.
/// The amplitude is rescaled so that `∫|u|²/|x|² ≈ 1`.
pub fn random_test_function<R: Rng + ?Sized>(spec: &HarmonicSpec, rng: &mut R) -> Result<SeparableTestFunction> {
    let n = spec.n() as f64;
    let kind = if rng.random_bool(0.5) {
        BumpKind::Mollifier
    } else {
        BumpKind::CosineWindow
    };
    let near_critical = rng.random_bool(0.25);
    let power = if near_critical {
        1.0 - n / 2.0
    } else {
        rng.random_range(-n / 2.0 - 1.0..2.0)
    };
    let count = rng.random_range(1..=4);
    let terms = (0..count)
        .map(|_| BumpTerm {
            amplitude: rng.random_range(-1.0..1.0),
            center: rng.random_range(-3.0..3.0),
            width: if near_critical {
                rng.random_range(2.0..8.0)
            } else {
                rng.random_range(0.3..2.5)
            },
        })
        .collect();
    let profile = BumpSum::new(kind, power, terms)?;
    let u = SeparableTestFunction::new(Arc::new(profile), spec.clone(), "random bump sum")?;
    let norm = weighted_l2_norm_sq(&u)?;
    u.scaled(norm.sqrt().recip())
}
