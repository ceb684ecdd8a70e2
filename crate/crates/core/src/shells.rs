//! Gaussians g_N, interference functions π_N and shell functions Ω_N for
//! N = 1, 2, 3, together with the algebra of shell-function sums.
//!
//! Every shell function is evaluated as
//!
//! ```text
//! Ω_N(x; μ, ν) = (2πν)^{−N/2} · exp(−(x − μ)²/2ν) · b_N(t),   t = xμ/ν
//! b_1(t) = (1 + e^{−2t})/2,  b_2(t) = I₀(t)e^{−t},  b_3(t) = (1 − e^{−2t})/2t
//! ```
//!
//! whose brackets stay bounded for arbitrarily large t. For t ≤ 1e-4 the
//! small-argument expansion around the Gaussian envelope is used instead.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, domain, Error, Result};
use crate::specfun::raw;

/// Spatial dimension of an isotropic field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Dim {
    One,
    Two,
    Three,
}

impl Dim {
    pub const ALL: [Dim; 3] = [Dim::One, Dim::Two, Dim::Three];

    pub fn n(self) -> u8 {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    #[inline]
    pub fn nf(self) -> f64 {
        self.n() as f64
    }

    /// Volume of the unit ball, π̄_N(0).
    pub fn unit_ball_volume(self) -> f64 {
        match self {
            Dim::One => 2.0,
            Dim::Two => PI,
            Dim::Three => 4.0 * PI / 3.0,
        }
    }
}

impl TryFrom<u8> for Dim {
    type Error = Error;

    fn try_from(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Dim::One),
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            _ => Err(Error::Argument(format!(
                "dimension must be 1, 2 or 3, got {n}"
            ))),
        }
    }
}

impl From<Dim> for u8 {
    fn from(d: Dim) -> u8 {
        d.n()
    }
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.n())
    }
}

/// Threshold on t = xμ/ν below which the small-argument expansion is used.
pub const SMALL_T: f64 = 1e-4;

fn check_nu(op: &'static str, nu: f64) -> Result<()> {
    if nu > 0.0 && nu.is_finite() {
        Ok(())
    } else {
        Err(domain(
            op,
            format!("width nu must be positive and finite, got {nu}"),
        ))
    }
}

fn check_radial(op: &'static str, name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(
            op,
            format!("{name} must be finite and non-negative, got {v}"),
        ))
    }
}

#[inline]
fn norm(dim: Dim, nu: f64) -> f64 {
    let two_pi_nu = 2.0 * PI * nu;
    match dim {
        Dim::One => 1.0 / two_pi_nu.sqrt(),
        Dim::Two => 1.0 / two_pi_nu,
        Dim::Three => 1.0 / (two_pi_nu * two_pi_nu.sqrt()),
    }
}

/// Normalized isotropic Gaussian (2πν)^{−N/2} exp(−x²/2ν).
pub fn gaussian_radial(dim: Dim, x: f64, nu: f64) -> Result<f64> {
    check_nu("gaussian_radial", nu)?;
    check_finite("gaussian_radial", x)?;
    Ok(gaussian(dim, x, nu))
}

#[inline]
pub(crate) fn gaussian(dim: Dim, x: f64, nu: f64) -> f64 {
    norm(dim, nu) * (-x * x / (2.0 * nu)).exp()
}

/// Radial component of the interference function of the unit ball.
pub fn interference_radial(dim: Dim, x: f64) -> Result<f64> {
    check_finite("interference_radial", x)?;
    Ok(interference(dim, x))
}

pub(crate) fn interference(dim: Dim, x: f64) -> f64 {
    let u = 2.0 * PI * x.abs();
    match dim {
        Dim::One => 2.0 * raw::sinc(u),
        Dim::Two => {
            if u == 0.0 {
                PI
            } else {
                2.0 * PI * raw::bessel_j1(u) / u
            }
        }
        Dim::Three => {
            if u < 1e-2 {
                let u2 = u * u;
                let series = 1.0 / 3.0
                    + u2 * (-1.0 / 30.0
                        + u2 * (1.0 / 840.0 + u2 * (-1.0 / 45360.0 + u2 / 3_991_680.0)));
                4.0 * PI * series
            } else {
                4.0 * PI * (u.sin() - u * u.cos()) / (u * u * u)
            }
        }
    }
}

/// Radial component of the shell function Ω_N(x; μ, ν).
pub fn omega_radial(dim: Dim, x: f64, mu: f64, nu: f64) -> Result<f64> {
    check_nu("omega_radial", nu)?;
    check_radial("omega_radial", "x", x)?;
    check_radial("omega_radial", "mu", mu)?;
    Ok(omega(dim, x, mu, nu))
}

/// Bounded bracket b_N(t) for t ≥ 0.
#[inline]
fn bracket(dim: Dim, t: f64) -> f64 {
    match dim {
        Dim::One => 0.5 * (1.0 + (-2.0 * t).exp()),
        Dim::Two => raw::bessel_i0_scaled(t),
        Dim::Three => -(-2.0 * t).exp_m1() / (2.0 * t),
    }
}

// Series of cosh t, I₀(t) and sinhc t through t⁴.
#[inline]
fn small_t_factor(dim: Dim, t: f64) -> f64 {
    let t2 = t * t;
    let (c2, c4) = match dim {
        Dim::One => (1.0 / 2.0, 1.0 / 24.0),
        Dim::Two => (1.0 / 4.0, 1.0 / 64.0),
        Dim::Three => (1.0 / 6.0, 1.0 / 120.0),
    };
    1.0 + t2 * (c2 + t2 * c4)
}

#[inline]
pub(crate) fn omega(dim: Dim, x: f64, mu: f64, nu: f64) -> f64 {
    let t = x * mu / nu;
    if t <= SMALL_T {
        norm(dim, nu) * (-(x * x + mu * mu) / (2.0 * nu)).exp() * small_t_factor(dim, t)
    } else {
        let d = x - mu;
        norm(dim, nu) * (-d * d / (2.0 * nu)).exp() * bracket(dim, t)
    }
}

/// Logarithmic derivative b_N'(t)/b_N(t).
#[inline]
fn bracket_log_derivative(dim: Dim, t: f64) -> f64 {
    match dim {
        Dim::One => {
            let e = (-2.0 * t).exp();
            -2.0 * e / (1.0 + e)
        }
        Dim::Two => {
            if t == 0.0 {
                -1.0
            } else {
                raw::bessel_i1_scaled(t) / raw::bessel_i0_scaled(t) - 1.0
            }
        }
        Dim::Three => raw::langevin(t) - 1.0,
    }
}

/// Partial derivatives of Ω̄_N with respect to x, μ and ν.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaGradient {
    pub d_x: f64,
    pub d_mu: f64,
    pub d_nu: f64,
}

/// Analytic gradient of Ω̄_N(x; μ, ν).
///
/// With ln Ω = −(N/2)·ln 2πν − (x − μ)²/2ν + ln b_N(t) and β = b_N'/b_N:
///
/// ```text
/// ∂Ω/∂x = Ω·(−(x − μ) + βμ)/ν
/// ∂Ω/∂μ = Ω·( (x − μ) + βx)/ν
/// ∂Ω/∂ν = Ω·(−N/2ν + (x − μ)²/2ν² − βt/ν)
/// ```
pub fn omega_gradient(dim: Dim, x: f64, mu: f64, nu: f64) -> Result<OmegaGradient> {
    check_nu("omega_gradient", nu)?;
    check_radial("omega_gradient", "x", x)?;
    check_radial("omega_gradient", "mu", mu)?;
    Ok(omega_with_gradient(dim, x, mu, nu).1)
}

#[inline]
pub(crate) fn omega_with_gradient(dim: Dim, x: f64, mu: f64, nu: f64) -> (f64, OmegaGradient) {
    let value = omega(dim, x, mu, nu);
    let t = x * mu / nu;
    let beta = bracket_log_derivative(dim, t);
    let d = x - mu;
    let inv_nu = 1.0 / nu;
    let grad = OmegaGradient {
        d_x: value * (-d + beta * mu) * inv_nu,
        d_mu: value * (d + beta * x) * inv_nu,
        d_nu: value * (-0.5 * dim.nf() + 0.5 * d * d * inv_nu - beta * t) * inv_nu,
    };
    (value, grad)
}

/// Radial Fourier transform of Ω_N: P̄⁰_N(s; μ)·exp(−2π²νs²).
pub fn omega_fourier_radial(dim: Dim, s: f64, mu: f64, nu: f64) -> Result<f64> {
    check_nu("omega_fourier_radial", nu)?;
    check_radial("omega_fourier_radial", "s", s)?;
    check_radial("omega_fourier_radial", "mu", mu)?;
    Ok(shell_transform(dim, s, mu) * gaussian_transform(s, nu))
}

/// Transform of the uniform unit-mass distribution on the radius-μ sphere.
pub fn shell_transform(dim: Dim, s: f64, mu: f64) -> f64 {
    let u = 2.0 * PI * mu * s;
    match dim {
        Dim::One => u.cos(),
        Dim::Two => raw::bessel_j0(u),
        Dim::Three => raw::sinc(u),
    }
}

/// exp(−2π²νs²), the transform of the normalized Gaussian of width ν.
#[inline]
pub fn gaussian_transform(s: f64, nu: f64) -> f64 {
    (-2.0 * PI * PI * nu * s * s).exp()
}

/// One weighted shell κ·Ω_N(x; μ, ν).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellTerm {
    pub kappa: f64,
    pub mu: f64,
    pub nu: f64,
}

impl ShellTerm {
    pub fn new(kappa: f64, mu: f64, nu: f64) -> Result<Self> {
        let term = Self { kappa, mu, nu };
        term.validate()?;
        Ok(term)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.kappa.is_finite() {
            return Err(Error::Argument(format!(
                "kappa must be finite, got {}",
                self.kappa
            )));
        }
        check_radial("ShellTerm", "mu", self.mu)?;
        check_nu("ShellTerm", self.nu)
    }

    #[inline]
    pub fn eval(&self, dim: Dim, x: f64) -> f64 {
        self.kappa * omega(dim, x, self.mu, self.nu)
    }
}

/// An ordered sum of shell terms in a given dimension, valid on [0, x_max].
#[derive(Debug, Clone, PartialEq)]
pub struct ShellModel {
    dim: Dim,
    terms: Vec<ShellTerm>,
    x_max: f64,
    label: String,
}

impl ShellModel {
    pub fn new(
        dim: Dim,
        terms: Vec<ShellTerm>,
        x_max: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Argument(
                "a shell model needs at least one term".into(),
            ));
        }
        for (i, t) in terms.iter().enumerate() {
            t.validate()
                .map_err(|e| Error::Argument(format!("term {}: {e}", i + 1)))?;
        }
        if !(x_max > 0.0 && x_max.is_finite()) {
            return Err(Error::Argument(format!(
                "x_max must be positive, got {x_max}"
            )));
        }
        Ok(Self {
            dim,
            terms,
            x_max,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn terms(&self) -> &[ShellTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Σ κ_m Ω̄_N(x; μ_m, ν_m) over all terms, or over the first `truncate_to`.
    pub fn eval(&self, x: f64, truncate_to: Option<usize>) -> Result<f64> {
        check_radial("shell_sum_eval", "x", x)?;
        let m = match truncate_to {
            None => self.terms.len(),
            Some(m) if m >= 1 && m <= self.terms.len() => m,
            Some(m) => {
                return Err(Error::Argument(format!(
                    "truncate_to = {m} outside 1..={}",
                    self.terms.len()
                )))
            }
        };
        Ok(self.eval_first(x, m))
    }

    #[inline]
    pub(crate) fn eval_first(&self, x: f64, m: usize) -> f64 {
        self.terms[..m].iter().map(|t| t.eval(self.dim, x)).sum()
    }

    /// Sum over all terms; `x` must be non-negative and finite.
    #[inline]
    pub fn eval_unchecked(&self, x: f64) -> f64 {
        self.eval_first(x, self.terms.len())
    }

    /// Model of the sum convolved with g_N(·; ν₀): every ν_m grows by ν₀.
    pub fn convolve_with_gaussian(&self, nu0: f64) -> Result<ShellModel> {
        if !(nu0 >= 0.0 && nu0.is_finite()) {
            return Err(domain(
                "convolve_with_gaussian",
                format!("nu0 must be >= 0, got {nu0}"),
            ));
        }
        let mut out = self.clone();
        for t in &mut out.terms {
            t.nu += nu0;
        }
        Ok(out)
    }

    /// Terms (κ, αμ, α²ν) and x_max → α·x_max. The α^N amplitude is left to
    /// the caller: `rescale(m, α).eval(x)·α^N == m.eval(x/α)`.
    pub fn rescale(&self, alpha: f64) -> Result<ShellModel> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(domain("rescale", format!("alpha must be > 0, got {alpha}")));
        }
        let mut out = self.clone();
        for t in &mut out.terms {
            t.mu *= alpha;
            t.nu *= alpha * alpha;
        }
        out.x_max *= alpha;
        Ok(out)
    }

    /// Multiply every weight by `factor`.
    pub fn scale_weights(&self, factor: f64) -> ShellModel {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.kappa *= factor;
        }
        out
    }

    /// Total mass Σ κ_m (each Ω integrates to one).
    pub fn total_mass(&self) -> f64 {
        self.terms.iter().map(|t| t.kappa).sum()
    }

    /// Model restricted to its first `m` terms.
    pub fn truncated(&self, m: usize) -> Result<ShellModel> {
        if m == 0 || m > self.terms.len() {
            return Err(Error::Argument(format!(
                "cannot truncate a {}-term model to {m} terms",
                self.terms.len()
            )));
        }
        let mut out = self.clone();
        out.terms.truncate(m);
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeakKind {
    MonotoneDecreasing,
    InteriorPeak,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakReport {
    pub kind: PeakKind,
    pub x_peak: Option<f64>,
    pub value_at_peak: Option<f64>,
}

/// χ_N(t): the normalized logarithmic slope whose level set χ_N(t) = ν/μ²
/// locates the interior maximum. Decreases from 1/N at t = 0 towards 1/t.
pub fn chi(dim: Dim, t: f64) -> f64 {
    if t == 0.0 {
        return 1.0 / dim.nf();
    }
    match dim {
        Dim::One => t.tanh() / t,
        Dim::Two => raw::bessel_i1_scaled(t) / (t * raw::bessel_i0_scaled(t)),
        Dim::Three => raw::langevin(t) / t,
    }
}

/// Classify Ω̄_N(·; μ, ν) as decreasing from the origin (μ² ≤ Nν) or having
/// a single interior maximum, and locate that maximum.
pub fn peak_location(dim: Dim, mu: f64, nu: f64) -> Result<PeakReport> {
    check_nu("peak_location", nu)?;
    check_radial("peak_location", "mu", mu)?;
    let a = mu * mu / nu;
    if a <= dim.nf() {
        return Ok(PeakReport {
            kind: PeakKind::MonotoneDecreasing,
            x_peak: None,
            value_at_peak: None,
        });
    }
    // χ_N(0) = 1/N > 1/a and χ_N(a) < 1/a bracket the root.
    let target = 1.0 / a;
    let (mut lo, mut hi) = (0.0, a);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if chi(dim, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    let t = 0.5 * (lo + hi);
    let x = t * nu / mu;
    Ok(PeakReport {
        kind: PeakKind::InteriorPeak,
        x_peak: Some(x),
        value_at_peak: Some(omega(dim, x, mu, nu)),
    })
}

#[cfg(test)]
#[path = "shells_tests.rs"]
mod tests;
