//! Special functions needed by the shell-function closed forms.
//!
//! Every function comes in two flavours: a checked entry point that returns
//! [`Result`] and rejects non-finite or out-of-domain input, and an unchecked
//! `*_raw` variant in [`raw`] used on hot paths once the caller has already
//! validated its arguments.

mod bessel;
mod erf;
mod sici;


use crate::error::{check_finite, domain, Error, Result};

/// Termination control for power series and continued fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracySpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl AccuracySpec {
    pub const DOUBLE: AccuracySpec = AccuracySpec {
        abs_tol: 0.0,
        rel_tol: 1e-17,
        max_terms: 2000,
    };

    pub fn new(abs_tol: f64, rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol >= 0.0 && rel_tol >= 0.0) || (abs_tol == 0.0 && rel_tol == 0.0) {
            return Err(Error::Argument(format!(
                "accuracy tolerances must be non-negative and not both zero (abs {abs_tol}, rel {rel_tol})"
            )));
        }
        if max_terms == 0 {
            return Err(Error::Argument("max_terms must be positive".into()));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_terms,
        })
    }

    /// True once `term` no longer changes `sum` at the requested accuracy.
    #[inline]
    pub(crate) fn converged(&self, term: f64, sum: f64) -> bool {
        term.abs() <= self.abs_tol.max(self.rel_tol * sum.abs())
    }
}

impl Default for AccuracySpec {
    fn default() -> Self {
        Self::DOUBLE
    }
}

/// Largest |x| accepted by [`sinhc`].
pub const SINHC_MAX_ARG: f64 = 700.0;

/// Unchecked evaluations. Arguments are assumed finite and in-domain.
pub mod raw {
    pub use super::bessel::{bessel_i0_scaled, bessel_i1_scaled, bessel_j0, bessel_j1};
    pub use super::erf::{erf, erfc};
    pub use super::sici::sine_integral;

    /// sin(x)/x with the removable singularity filled in.
    #[inline]
    pub fn sinc(x: f64) -> f64 {
        let ax = x.abs();
        if ax < 1e-4 {
            let x2 = x * x;
            1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
        } else {
            x.sin() / x
        }
    }

    /// sinh(x)/x for |x| <= 700.
    #[inline]
    pub fn sinhc(x: f64) -> f64 {
        let ax = x.abs();
        if ax < 1e-4 {
            let x2 = x * x;
            1.0 + x2 / 6.0 * (1.0 + x2 / 20.0)
        } else {
            x.sinh() / x
        }
    }

    /// Langevin function coth(t) - 1/t, accurate near zero.
    pub fn langevin(t: f64) -> f64 {
        let at = t.abs();
        if at < 0.05 {
            // t/3 - t^3/45 + 2t^5/945 - t^7/4725 + 2t^9/93555
            let t2 = t * t;
            t * (1.0 / 3.0
                + t2 * (-1.0 / 45.0
                    + t2 * (2.0 / 945.0 + t2 * (-1.0 / 4725.0 + t2 * (2.0 / 93555.0)))))
        } else if at > 20.0 {
            t.signum() - 1.0 / t
        } else {
            1.0 / t.tanh() - 1.0 / t
        }
    }
}

pub fn erf(x: f64) -> Result<f64> {
    check_finite("erf", x)?;
    Ok(erf::erf(x))
}

pub fn erfc(x: f64) -> Result<f64> {
    check_finite("erfc", x)?;
    Ok(erf::erfc(x))
}

pub fn sinc(x: f64) -> Result<f64> {
    check_finite("sinc", x)?;
    Ok(raw::sinc(x))
}

/// sinh(x)/x. Arguments beyond [`SINHC_MAX_ARG`] are a range error: callers
/// that can reach them must work with exponentially scaled forms instead.
pub fn sinhc(x: f64) -> Result<f64> {
    check_finite("sinhc", x)?;
    if x.abs() > SINHC_MAX_ARG {
        return Err(Error::Range {
            op: "sinhc",
            value: x.abs(),
            threshold: SINHC_MAX_ARG,
        });
    }
    Ok(raw::sinhc(x))
}

/// Si(x) = ∫₀ˣ sin t / t dt, odd in x.
pub fn sine_integral(x: f64) -> Result<f64> {
    check_finite("sine_integral", x)?;
    Ok(sici::sine_integral(x))
}

pub fn bessel_j0(x: f64) -> Result<f64> {
    check_finite("bessel_j0", x)?;
    Ok(bessel::bessel_j0(x))
}

pub fn bessel_j1(x: f64) -> Result<f64> {
    check_finite("bessel_j1", x)?;
    Ok(bessel::bessel_j1(x))
}

/// I₀(x)·e^{−x} for x ≥ 0. The unscaled function is not exposed.
pub fn bessel_i0_scaled(x: f64) -> Result<f64> {
    check_finite("bessel_i0_scaled", x)?;
    if x < 0.0 {
        return Err(domain("bessel_i0_scaled", format!("x = {x} < 0")));
    }
    Ok(bessel::bessel_i0_scaled(x))
}

/// I₁(x)·e^{−x} for x ≥ 0.
pub fn bessel_i1_scaled(x: f64) -> Result<f64> {
    check_finite("bessel_i1_scaled", x)?;
    if x < 0.0 {
        return Err(domain("bessel_i1_scaled", format!("x = {x} < 0")));
    }
    Ok(bessel::bessel_i1_scaled(x))
}
