//! Eigenfunctions of the negative Laplace-Beltrami operator on `S^{N-1}`.
//!
//! Four concrete families are available:
//!
//! * `Zonal(ℓ)`: the Gegenbauer polynomial `C_ℓ^{(N-2)/2}` of the polar
//!   cosine, where the polar axis is the first coordinate. For `N = 2` the
//!   Gegenbauer parameter is zero and the Chebyshev polynomial `T_ℓ` is used
//!   instead, so the zonal harmonic is `cos(ℓθ)`.
//! * `Planar(ℓ, parity)`: `cos(ℓθ)` or `sin(ℓθ)` on the circle (`N = 2` only).
//! * `Product`: `x_1 x_2 ⋯ x_N`, of degree `N`. Its nodal set is the union of
//!   the coordinate hyperplanes.
//! * `HomogeneousPoly`: an explicit harmonic polynomial, homogeneous of
//!   degree `ℓ`, restricted to the sphere.
//!
//! A [`HarmonicSpec`] carries an amplitude so that `P` can be rescaled (for
//! example normalised to unit `L²(S^{N-1})` norm) without changing family.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_line, ln_gamma, sphere_surface_area};

/// Ambient dimension `N ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(n: i64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("dimension N must be at least 2, got {n}")));
        }
        Ok(Dimension(n as usize))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// `λ_ℓ = ℓ(N - 2 + ℓ)` in integer arithmetic.
    pub fn eigenvalue(self, ell: u32) -> u64 {
        let ell = u64::from(ell);
        ell * (self.0 as u64 - 2 + ell)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Checks `N ≥ 2` and `ℓ ≥ 0` and returns them in their typed forms.
pub fn validate_degree(n: i64, ell: i64) -> Result<(Dimension, u32)> {
    let dim = Dimension::new(n)?;
    if ell < 0 || ell > i64::from(u32::MAX) {
        return Err(Error::Domain(format!("degree ℓ must be a non-negative integer, got {ell}")));
    }
    Ok((dim, ell as u32))
}

/// `λ_ℓ = ℓ(N − 2 + ℓ)`.
pub fn eigenvalue_of_degree(n: i64, ell: i64) -> Result<f64> {
    let (dim, ell) = validate_degree(n, ell)?;
    Ok(dim.eigenvalue(ell) as f64)
}

/// A point of the unit sphere `S^{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint(Vec<f64>);

impl SpherePoint {
    /// Accepts coordinates whose Euclidean norm is 1 within `1e-12`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if coords.is_empty() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("point with norm {norm} is not on the unit sphere")));
        }
        Ok(SpherePoint(coords))
    }

    /// Radial projection `x / |x|` of a nonzero vector.
    pub fn from_direction(x: &[f64]) -> Result<Self> {
        let norm = euclidean_norm(x);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Domain("cannot project the origin onto the sphere".into()));
        }
        Ok(SpherePoint(x.iter().map(|c| c / norm).collect()))
    }

    /// Planar point `(cos θ, sin θ)`.
    pub fn on_circle(theta: f64) -> Self {
        SpherePoint(vec![theta.cos(), theta.sin()])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

pub(crate) fn euclidean_norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Cos,
    Sin,
}

/// A polynomial given as `(exponent vector, coefficient)` terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    terms: Vec<(Vec<u32>, f64)>,
}

impl Polynomial {
    /// Merges repeated monomials and drops zero coefficients. All exponent
    /// vectors must have the same length.
    pub fn new(terms: Vec<(Vec<u32>, f64)>) -> Result<Self> {
        let Some(width) = terms.first().map(|t| t.0.len()) else {
            return Err(Error::Domain("polynomial has no terms".into()));
        };
        let mut merged: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (exps, c) in terms {
            if exps.len() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    got: exps.len(),
                });
            }
            if !c.is_finite() {
                return Err(Error::Domain("polynomial coefficient is not finite".into()));
            }
            *merged.entry(exps).or_insert(0.0) += c;
        }
        let terms: Vec<_> = merged.into_iter().filter(|(_, c)| *c != 0.0).collect();
        if terms.is_empty() {
            return Err(Error::Domain("polynomial is identically zero".into()));
        }
        Ok(Polynomial { terms })
    }

    pub fn terms(&self) -> &[(Vec<u32>, f64)] {
        &self.terms
    }

    pub fn nvars(&self) -> usize {
        self.terms[0].0.len()
    }

    /// Common total degree, or `None` if the terms have mixed degrees.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let deg = |e: &Vec<u32>| e.iter().sum::<u32>();
        let d = deg(&self.terms[0].0);
        self.terms.iter().all(|(e, _)| deg(e) == d).then_some(d)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// Exact Euclidean Laplacian.
    pub fn laplacian(&self) -> BTreeMap<Vec<u32>, f64> {
        let mut out: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (e, c) in &self.terms {
            for i in 0..e.len() {
                if e[i] >= 2 {
                    let mut d = e.clone();
                    d[i] -= 2;
                    *out.entry(d).or_insert(0.0) += c * f64::from(e[i]) * f64::from(e[i] - 1);
                }
            }
        }
        out
    }

    fn max_abs_coefficient(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.abs()).fold(0.0, f64::max)
    }
}

/// `∫_{S^{N-1}} x^e dω = 2 ∏ Γ((e_i+1)/2) / Γ((|e|+N)/2)`, zero if any `e_i` is odd.
fn monomial_sphere_integral(exps: &[u32]) -> f64 {
    if exps.iter().any(|e| e % 2 == 1) {
        return 0.0;
    }
    let n = exps.len() as f64;
    let total: u32 = exps.iter().sum();
    let log_num: f64 = exps.iter().map(|&e| ln_gamma((f64::from(e) + 1.0) / 2.0)).sum();
    2.0 * (log_num - ln_gamma((f64::from(total) + n) / 2.0)).exp()
}

fn polynomial_norm_sq(poly: &Polynomial) -> f64 {
    let terms = poly.terms();
    let mut acc = 0.0;
    for (ea, ca) in terms {
        for (eb, cb) in terms {
            let sum: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
            acc += ca * cb * monomial_sphere_integral(&sum);
        }
    }
    acc
}

/// The family an eigenfunction belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Family {
    Zonal,
    Planar(Parity),
    Product,
    HomogeneousPoly(Polynomial),
}

/// Family selector as accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Zonal,
    PlanarCos,
    PlanarSin,
    Product,
    Poly,
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zonal" => Ok(FamilyKind::Zonal),
            "planar-cos" | "cos" => Ok(FamilyKind::PlanarCos),
            "planar-sin" | "sin" => Ok(FamilyKind::PlanarSin),
            "product" => Ok(FamilyKind::Product),
            "poly" | "homogeneous-poly" => Ok(FamilyKind::Poly),
            other => Err(Error::Parse(format!("unknown harmonic family `{other}`"))),
        }
    }
}

/// A chosen eigenfunction `P` of `-Δ_{S^{N-1}}` scaled by `amplitude`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicSpec {
    family: Family,
    dim: Dimension,
    degree: u32,
    eigenvalue: u64,
    amplitude: f64,
    /// `‖P‖_{L²(S^{N-1})}` of the unit-amplitude function.
    base_norm: f64,
}

/// `α = (N-2)/2`; `α = 0` falls back to Chebyshev `T_ℓ`.
pub fn gegenbauer(ell: u32, alpha: f64, t: f64) -> f64 {
    if ell == 0 {
        return 1.0;
    }
    if alpha == 0.0 {
        let (mut t0, mut t1) = (1.0, t);
        for _ in 2..=ell {
            let t2 = 2.0 * t * t1 - t0;
            t0 = t1;
            t1 = t2;
        }
        return t1;
    }
    let (mut c0, mut c1) = (1.0, 2.0 * alpha * t);
    for n in 2..=ell {
        let nf = f64::from(n);
        let c2 = (2.0 * t * (nf + alpha - 1.0) * c1 - (nf + 2.0 * alpha - 2.0) * c0) / nf;
        c0 = c1;
        c1 = c2;
    }
    c1
}

/// `∫ f` to a relative tolerance: a coarse pass sets the scale for the final one.
fn integrate_relative<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    let rough = integrate_line(&f, a, b, 1e-6)?.value;
    let tol = (rough.abs() * 1e-13).max(1e-300);
    Ok(integrate_line(&f, a, b, tol)?.value)
}

impl HarmonicSpec {
    pub fn zonal(dim: Dimension, ell: u32) -> Result<Self> {
        Self::build(Family::Zonal, dim, ell)
    }

    pub fn planar(dim: Dimension, ell: u32, parity: Parity) -> Result<Self> {
        if dim.get() != 2 {
            return Err(Error::Domain(format!("planar harmonics need N = 2, got N = {dim}")));
        }
        if parity == Parity::Sin && ell == 0 {
            return Err(Error::Domain("sin(0·θ) vanishes identically".into()));
        }
        Self::build(Family::Planar(parity), dim, ell)
    }

    /// `x_1 ⋯ x_N`; the degree is forced to `N`.
    pub fn product(dim: Dimension) -> Result<Self> {
        Self::build(Family::Product, dim, dim.get() as u32)
    }

    /// Restriction of a homogeneous harmonic polynomial in `N` variables.
    pub fn homogeneous_poly(dim: Dimension, poly: Polynomial) -> Result<Self> {
        if poly.nvars() != dim.get() {
            return Err(Error::DimensionMismatch {
                expected: dim.get(),
                got: poly.nvars(),
            });
        }
        let degree = poly
            .homogeneous_degree()
            .ok_or_else(|| Error::Domain("polynomial is not homogeneous".into()))?;
        let scale = poly.max_abs_coefficient() * f64::from(degree.max(2)).powi(2);
        if let Some((mono, c)) = poly.laplacian().into_iter().find(|(_, c)| c.abs() > 1e-12 * scale) {
            return Err(Error::Domain(format!(
                "polynomial is not harmonic: Laplacian has coefficient {c} on monomial {mono:?}"
            )));
        }
        Self::build(Family::HomogeneousPoly(poly), dim, degree)
    }

    fn build(family: Family, dim: Dimension, degree: u32) -> Result<Self> {
        let mut spec = HarmonicSpec {
            family,
            dim,
            degree,
            eigenvalue: dim.eigenvalue(degree),
            amplitude: 1.0,
            base_norm: 1.0,
        };
        spec.base_norm = spec.compute_base_norm()?;
        if !(spec.base_norm > 0.0) {
            return Err(Error::Domain("harmonic vanishes identically".into()));
        }
        Ok(spec)
    }

    fn compute_base_norm(&self) -> Result<f64> {
        let n = self.dim.get();
        let norm_sq = match &self.family {
            Family::Zonal => {
                let alpha = (n as f64 - 2.0) / 2.0;
                let ell = self.degree;
                let weight_power = n as i32 - 2;
                let integral = integrate_relative(
                    |theta: f64| {
                        let p = gegenbauer(ell, alpha, theta.cos());
                        p * p * theta.sin().powi(weight_power)
                    },
                    0.0,
                    PI,
                )?;
                sphere_surface_area(n - 1) * integral
            }
            Family::Planar(parity) => {
                let ell = f64::from(self.degree);
                let parity = *parity;
                integrate_relative(
                    |theta: f64| {
                        let v = planar_value(parity, ell, theta);
                        v * v
                    },
                    0.0,
                    2.0 * PI,
                )?
            }
            Family::Product => monomial_sphere_integral(&vec![2; n]),
            Family::HomogeneousPoly(poly) => polynomial_norm_sq(poly),
        };
        Ok(norm_sq.sqrt())
    }

    /// Same function rescaled to unit `L²(S^{N-1})` norm.
    pub fn normalized(&self) -> Self {
        let mut out = self.clone();
        out.amplitude = 1.0 / self.base_norm;
        out
    }

    /// Same function with amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.amplitude *= factor;
        out
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.dim.get()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// `λ_ℓ` as an exact integer.
    pub fn eigenvalue_exact(&self) -> u64 {
        self.eigenvalue
    }

    pub fn eigenvalue(&self) -> f64 {
        self.eigenvalue as f64
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// `‖P‖_{L²(S^{N-1})}`.
    pub fn l2_norm(&self) -> f64 {
        self.amplitude.abs() * self.base_norm
    }

    /// `P(ω)` for a unit vector given as a slice; no dimension check.
    pub(crate) fn eval_unit(&self, w: &[f64]) -> f64 {
        let raw = match &self.family {
            Family::Zonal => gegenbauer(self.degree, (self.n() as f64 - 2.0) / 2.0, w[0].clamp(-1.0, 1.0)),
            Family::Planar(parity) => planar_value(*parity, f64::from(self.degree), w[1].atan2(w[0])),
            Family::Product => w.iter().product(),
            Family::HomogeneousPoly(poly) => poly.eval(w),
        };
        self.amplitude * raw
    }

    /// `P(ω)`.
    pub fn evaluate(&self, omega: &SpherePoint) -> Result<f64> {
        self.check_dim(omega.dim())?;
        Ok(self.eval_unit(omega.coords()))
    }

    pub(crate) fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got,
            });
        }
        Ok(())
    }

    /// `true` iff `|P(ω)| ≤ tol`.
    ///
    /// For the product family `|P(ω)| = min_i |ω_i| · ∏_{j≠i} |ω_j|`, so this is
    /// the hyperplane test `min_i |ω_i| ≤ tol / ∏_{j≠i} |ω_j|`.
    pub fn on_nodal_set(&self, omega: &SpherePoint, tol: f64) -> Result<bool> {
        if !(tol > 0.0) {
            return Err(Error::Domain(format!("nodal tolerance must be positive, got {tol}")));
        }
        Ok(self.evaluate(omega)?.abs() <= tol)
    }

    /// Homogeneous harmonic extension `|x|^ℓ P(x/|x|)`.
    pub fn extension(&self, x: &[f64]) -> f64 {
        let r = euclidean_norm(x);
        let w: Vec<f64> = x.iter().map(|c| c / r).collect();
        r.powi(self.degree as i32) * self.eval_unit(&w)
    }

    /// `|Δ_h E(x)|` for the extension `E`; vanishes to `O(h²)` for a valid spec.
    pub fn harmonicity_residual(&self, x: &[f64], h: f64) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(fd_laplacian(|y| self.extension(y), x, h)?.abs())
    }
}

fn planar_value(parity: Parity, ell: f64, theta: f64) -> f64 {
    match parity {
        Parity::Cos => (ell * theta).cos(),
        Parity::Sin => (ell * theta).sin(),
    }
}

/// `(2N+1)`-point central-difference Laplacian of `f` at `x`.
pub fn fd_laplacian<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step h must be positive, got {h}")));
    }
    let radius = euclidean_norm(x);
    if h >= radius {
        return Err(Error::StencilOrigin { radius, h });
    }
    let center = f(x);
    let mut y = x.to_vec();
    let mut acc = 0.0;
    for i in 0..x.len() {
        y[i] = x[i] + h;
        let plus = f(&y);
        y[i] = x[i] - h;
        let minus = f(&y);
        y[i] = x[i];
        acc += plus + minus - 2.0 * center;
    }
    Ok(acc / (h * h))
}
