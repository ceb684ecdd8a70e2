//! Radial Fourier transforms, resolution-truncated inverse transforms and
//! direct-space radial convolution, all by adaptive quadrature.
//!
//! For an isotropic function f̄ in N dimensions the transform reduces to
//!
//! ```text
//! N = 1:  F̄(s) = 2∫ f̄(x) cos(2πsx) dx
//! N = 2:  F̄(s) = 2π∫ x f̄(x) J₀(2πsx) dx
//! N = 3:  F̄(s) = 4π∫ x² f̄(x) sinc(2πsx) dx
//! ```
//!
//! and the inverse uses the same kernels with x and s exchanged.

pub mod quadrature;

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{check_finite, domain, Error, Result};
use crate::shells::Dim;
use crate::specfun::raw;
use quadrature::{graded_breaks, integrate, merge_breaks, uniform_breaks, Integral, Tolerance};

/// Tolerances, budget and truncation radius for one radial integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Upper integration limit, in x for forward transforms and convolutions.
    pub upper_cutoff: f64,
    /// Widest initial panel; defaults to a sixteenth of the cutoff.
    pub panel_width: Option<f64>,
}

impl QuadratureSpec {
    pub fn new(
        abs_tol: f64,
        rel_tol: f64,
        max_subdivisions: usize,
        upper_cutoff: f64,
    ) -> Result<Self> {
        let q = QuadratureSpec {
            abs_tol,
            rel_tol,
            max_subdivisions,
            upper_cutoff,
            panel_width: None,
        };
        q.validate()?;
        Ok(q)
    }

    /// Ten standard deviations of a Gaussian of width ν centred at `center`.
    pub fn gaussian_decay(center: f64, nu: f64) -> Self {
        QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_subdivisions: 20_000,
            upper_cutoff: center + 10.0 * nu.sqrt(),
            panel_width: Some(nu.sqrt().min((center + 10.0 * nu.sqrt()) / 16.0)),
        }
    }

    pub fn with_cutoff(mut self, upper_cutoff: f64) -> Self {
        self.upper_cutoff = upper_cutoff;
        self
    }

    pub fn with_panel_width(mut self, width: f64) -> Self {
        self.panel_width = Some(width);
        self
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0)
            || (self.abs_tol == 0.0 && self.rel_tol == 0.0)
        {
            return Err(Error::Argument(format!(
                "quadrature tolerances must be non-negative and not both zero (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Argument("max_subdivisions must be positive".into()));
        }
        if !(self.upper_cutoff > 0.0 && self.upper_cutoff.is_finite()) {
            return Err(Error::Argument(format!(
                "upper_cutoff must be positive, got {}",
                self.upper_cutoff
            )));
        }
        if let Some(w) = self.panel_width {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Argument(format!(
                    "panel_width must be positive, got {w}"
                )));
            }
        }
        Ok(())
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_subdivisions: self.max_subdivisions,
        }
    }

    fn coarse_width(&self, span: f64) -> f64 {
        self.panel_width.unwrap_or(span / 16.0).min(span)
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_subdivisions: 20_000,
            upper_cutoff: 10.0,
            panel_width: None,
        }
    }
}

/// Radial kernel k_N(x, s) such that F̄(s) = ∫₀^∞ k_N(x, s) f̄(x) dx.
/// It is symmetric in its arguments.
#[inline]
pub fn radial_kernel(dim: Dim, x: f64, s: f64) -> f64 {
    let u = 2.0 * PI * s * x;
    match dim {
        Dim::One => 2.0 * u.cos(),
        Dim::Two => 2.0 * PI * x * raw::bessel_j0(u),
        Dim::Three => 4.0 * PI * x * x * raw::sinc(u),
    }
}

// Panel edges on [0, upper] no wider than a quarter of the kernel period 1/k.
fn oscillation_breaks(upper: f64, k: f64, coarse: f64) -> Vec<f64> {
    let mut width = coarse;
    if k > 0.0 {
        width = width.min(0.25 / k);
    }
    uniform_breaks(0.0, upper, width)
}

fn check_arg(op: &'static str, name: &str, v: f64) -> Result<()> {
    check_finite(op, v)?;
    if v < 0.0 {
        return Err(domain(op, format!("{name} must be ≥ 0, got {v}")));
    }
    Ok(())
}

fn transform(
    dim: Dim,
    f: impl Fn(f64) -> f64,
    k: f64,
    upper: f64,
    q: &QuadratureSpec,
) -> Result<Integral> {
    let breaks = oscillation_breaks(upper, k, q.coarse_width(upper));
    integrate(|x| radial_kernel(dim, x, k) * f(x), &breaks, q.tolerance())
}

/// Forward radial transform with its quadrature error estimate.
pub fn radial_ft_estimate(
    dim: Dim,
    f: impl Fn(f64) -> f64,
    s: f64,
    q: &QuadratureSpec,
) -> Result<Integral> {
    check_arg("radial_ft", "s", s)?;
    q.validate()?;
    transform(dim, f, s, q.upper_cutoff, q)
}

/// Forward radial transform F̄(s), integrating x over [0, upper_cutoff].
pub fn radial_ft(dim: Dim, f: impl Fn(f64) -> f64, s: f64, q: &QuadratureSpec) -> Result<f64> {
    radial_ft_estimate(dim, f, s, q).map(|r| r.value)
}

/// Forward transform of a sampled profile, integrating over its grid range
/// or the cutoff, whichever ends first.
pub fn radial_ft_profile(profile: &RadialProfile, s: f64, q: &QuadratureSpec) -> Result<f64> {
    let q = q.with_cutoff(q.upper_cutoff.min(profile.x_end()));
    radial_ft(profile.dim, |x| profile.interpolate(x), s, &q)
}

/// Inverse transform truncated at s_max, with its error estimate.
pub fn radial_ift_truncated_estimate(
    dim: Dim,
    big_f: impl Fn(f64) -> f64,
    x: f64,
    s_max: f64,
    q: &QuadratureSpec,
) -> Result<Integral> {
    check_arg("radial_ift_truncated", "x", x)?;
    if !(s_max > 0.0 && s_max.is_finite()) {
        return Err(domain(
            "radial_ift_truncated",
            format!("s_max must be positive, got {s_max}"),
        ));
    }
    q.validate()?;
    let q = q.with_cutoff(s_max);
    transform(dim, big_f, x, s_max, &q)
}

/// Field value at radius x of the image whose transform is F̄ on [0, s_max]
/// and zero beyond: the image at resolution d0 = 1/s_max.
pub fn radial_ift_truncated(
    dim: Dim,
    big_f: impl Fn(f64) -> f64,
    x: f64,
    s_max: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    radial_ift_truncated_estimate(dim, big_f, x, s_max, q).map(|r| r.value)
}

/// Value at radius x of the convolution of the isotropic extensions of f̄
/// and ḡ in one or three dimensions. Both are taken to vanish beyond
/// upper_cutoff.
pub fn radial_convolve(
    dim: Dim,
    f: impl Fn(f64) -> f64,
    g: impl Fn(f64) -> f64,
    x: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    check_arg("radial_convolve", "x", x)?;
    q.validate()?;
    let r_max = q.upper_cutoff;
    let coarse = q.coarse_width(r_max);
    let fine = 1e-7 * coarse;
    let tol = q.tolerance();
    match dim {
        Dim::Two => Err(Error::Argument(
            "direct-space convolution is available for N = 1 and N = 3 only".into(),
        )),
        Dim::One => {
            let lo = x - r_max;
            if lo >= r_max {
                return Ok(0.0);
            }
            let breaks = merge_breaks(&[
                uniform_breaks(lo, r_max, coarse),
                graded_breaks(0.0, lo, r_max, fine, coarse),
                graded_breaks(x, lo, r_max, fine, coarse),
            ]);
            integrate(|y| f(y.abs()) * g((x - y).abs()), &breaks, tol).map(|r| r.value)
        }
        Dim::Three if x == 0.0 => {
            let breaks = merge_breaks(&[
                uniform_breaks(0.0, r_max, coarse),
                graded_breaks(0.0, 0.0, r_max, fine, coarse),
            ]);
            integrate(|r| 4.0 * PI * r * r * f(r) * g(r), &breaks, tol).map(|r| r.value)
        }
        Dim::Three => {
            let g = &g;
            let shell = |r: f64| -> Result<f64> {
                let lo = (x - r).abs();
                let hi = (x + r).min(r_max);
                if lo >= hi {
                    return Ok(0.0);
                }
                let breaks = merge_breaks(&[
                    uniform_breaks(lo, hi, coarse),
                    graded_breaks(lo, lo, hi, fine, coarse),
                ]);
                integrate(|t| t * g(t), &breaks, tol).map(|r| r.value)
            };
            let breaks = merge_breaks(&[
                uniform_breaks(0.0, r_max, coarse),
                graded_breaks(x, 0.0, r_max, fine, coarse),
            ]);
            let failure = std::cell::Cell::new(None);
            let outer = integrate(
                |r| match shell(r) {
                    Ok(v) => r * f(r) * v,
                    Err(e) => {
                        failure.set(Some(e));
                        0.0
                    }
                },
                &breaks,
                tol,
            )?;
            if let Some(e) = failure.take() {
                return Err(e);
            }
            Ok(2.0 * PI / x * outer.value)
        }
    }
}

/// Radial samples f̄(x0 + i·step), i = 0..len.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub x0: f64,
    pub step: f64,
    pub values: Vec<f64>,
    pub dim: Dim,
}

impl RadialProfile {
    pub fn new(x0: f64, step: f64, values: Vec<f64>, dim: Dim) -> Result<Self> {
        let p = RadialProfile {
            x0,
            step,
            values,
            dim,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) || !self.x0.is_finite() {
            return Err(Error::Argument(format!(
                "profile grid needs finite x0 and step > 0 (x0 {}, step {})",
                self.x0, self.step
            )));
        }
        if self.values.len() < 2 {
            return Err(Error::Argument(
                "a profile needs at least two samples".into(),
            ));
        }
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("profile value {i} is not finite")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.step
    }

    pub fn x_end(&self) -> f64 {
        self.x(self.values.len() - 1)
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (self.x(i), v))
    }

    /// Cubic Lagrange interpolation on the four nearest samples; exact at the
    /// nodes and zero outside the grid.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.values.len();
        let u = (x - self.x0) / self.step;
        if !(u >= -1e-9 && u <= (n - 1) as f64 + 1e-9) {
            return 0.0;
        }
        let nearest = u.round();
        if (u - nearest).abs() <= 1e-9 {
            return self.values[nearest as usize];
        }
        if n < 4 {
            let i = (u.floor() as usize).min(n - 2);
            let w = u - i as f64;
            return (1.0 - w) * self.values[i] + w * self.values[i + 1];
        }
        let i0 = (u.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let mut sum = 0.0;
        for j in 0..4 {
            let mut w = 1.0;
            for k in 0..4 {
                if k != j {
                    w *= (u - (i0 + k) as f64) / (j as f64 - k as f64);
                }
            }
            sum += w * self.values[i0 + j];
        }
        sum
    }

    /// Two-column text with a `# x f` header and 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(48 * self.values.len() + 8);
        out.push_str("# x f\n");
        for (x, v) in self.points() {
            let _ = writeln!(out, "{x:.16e} {v:.16e}");
        }
        out
    }

    /// Parses the two-column text format. The grid must be uniform.
    pub fn from_text(text: &str, dim: Dim) -> Result<Self> {
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split_whitespace();
            let mut next = |name: &str| -> Result<f64> {
                cols.next()
                    .ok_or_else(|| {
                        Error::Parse(format!("line {}: missing {name} column", lineno + 1))
                    })?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            xs.push(next("x")?);
            vs.push(next("f")?);
        }
        if xs.len() < 2 {
            return Err(Error::Parse("a profile needs at least two samples".into()));
        }
        let step = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        for (i, &x) in xs.iter().enumerate() {
            let expected = xs[0] + i as f64 * step;
            if (x - expected).abs() > 1e-9 * step.abs().max(x.abs()) {
                return Err(Error::Parse(format!(
                    "sample {i} at x = {x} breaks the uniform grid"
                )));
            }
        }
        RadialProfile::new(xs[0], step, vs, dim)
    }
}

/// Samples f at x0 + i·step for i in 0..count.
pub fn sample_profile(
    f: impl Fn(f64) -> f64,
    x0: f64,
    step: f64,
    count: usize,
    dim: Dim,
) -> Result<RadialProfile> {
    if count < 2 || !(step > 0.0) {
        return Err(Error::Argument(format!(
            "sampling needs step > 0 and count ≥ 2 (step {step}, count {count})"
        )));
    }
    let values = (0..count).map(|i| f(x0 + i as f64 * step)).collect();
    RadialProfile::new(x0, step, values, dim)
}
