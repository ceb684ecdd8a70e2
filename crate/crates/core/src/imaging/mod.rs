//! Limited-resolution images of Gaussian-mixture atoms and Coulomb-type
//! potentials, and their synthesis into 3-D maps.

mod volume;

use std::cell::RefCell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::decomp::{decompose, FitConfig};
use crate::error::{check_finite, domain, Error, Result};
use crate::rfourier::{radial_ift_truncated, QuadratureSpec};
use crate::shells::{Dim, ShellModel, ShellTerm};
use crate::specfun::raw;

pub use volume::{cutoff_radius, synthesize_map, AtomSite, GridSpec, VolumeGrid};

/// Converts a displacement parameter B to the Gaussian width ν = B/8π².
#[inline]
pub fn b_to_nu(b: f64) -> f64 {
    b / (8.0 * PI * PI)
}

/// Converts a Gaussian width ν to the displacement parameter B = 8π²ν.
#[inline]
pub fn nu_to_b(nu: f64) -> f64 {
    nu * 8.0 * PI * PI
}

/// One a·g₃(x; B/8π²) contribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianTerm {
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
}

/// An atom type's contribution as a sum of isotropic 3-D Gaussians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianAtomModel {
    pub terms: Vec<GaussianTerm>,
    #[serde(default)]
    pub label: String,
}

impl GaussianAtomModel {
    pub fn new(terms: Vec<GaussianTerm>, label: impl Into<String>) -> Result<Self> {
        let m = GaussianAtomModel {
            terms,
            label: label.into(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::Argument(format!(
                "atom model `{}` has no terms",
                self.label
            )));
        }
        for (i, t) in self.terms.iter().enumerate() {
            if !t.a.is_finite() || !(t.b >= 0.0 && t.b.is_finite()) {
                return Err(Error::Argument(format!(
                    "atom model `{}` term {}: need finite a and B >= 0, got a = {}, B = {}",
                    self.label,
                    i + 1,
                    t.a,
                    t.b
                )));
            }
        }
        Ok(())
    }

    /// Σ a^(k), the integral of the contribution.
    pub fn total_mass(&self) -> f64 {
        self.terms.iter().map(|t| t.a).sum()
    }

    /// Radial form factor Σ a^(k) exp(−(B^(k) + B_extra) s²/4).
    pub fn form_factor(&self, b_extra: f64, s: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.a * (-(t.b + b_extra) * s * s / 4.0).exp())
            .sum()
    }
}

/// Resolution cutoff d0 and additional Gaussian blur ν₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolutionSpec {
    pub d0: f64,
    pub nu0: f64,
}

impl ResolutionSpec {
    pub fn new(d0: f64, nu0: f64) -> Result<Self> {
        let r = ResolutionSpec { d0, nu0 };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d0 > 0.0 && self.d0.is_finite()) {
            return Err(domain(
                "resolution",
                format!("d0 must be > 0, got {}", self.d0),
            ));
        }
        if !(self.nu0 >= 0.0 && self.nu0.is_finite()) {
            return Err(domain(
                "resolution",
                format!("nu0 must be >= 0, got {}", self.nu0),
            ));
        }
        Ok(())
    }
}

fn check_three_dimensional(op: &str, model: &ShellModel) -> Result<()> {
    if model.dim() != Dim::Three {
        return Err(Error::Argument(format!(
            "{op} needs a 3-D shell model, got dimension {}",
            model.dim()
        )));
    }
    Ok(())
}

/// Image of a·g₃(x; b) at resolution d0 with extra blur ν₀, built from the
/// shell approximation `pi3` of the unit-resolution point image: terms
/// (a·κ_m, d0·μ_m, b + d0²·ν_m + ν₀).
pub fn gaussian_image_model(
    a: f64,
    b: f64,
    res: &ResolutionSpec,
    pi3: &ShellModel,
) -> Result<ShellModel> {
    check_three_dimensional("gaussian_image_model", pi3)?;
    res.validate()?;
    check_finite("gaussian_image_model", a)?;
    if !(b >= 0.0 && b.is_finite()) {
        return Err(domain(
            "gaussian_image_model",
            format!("b must be >= 0, got {b}"),
        ));
    }
    let d0 = res.d0;
    let terms = pi3
        .terms()
        .iter()
        .map(|t| ShellTerm {
            kappa: a * t.kappa,
            mu: d0 * t.mu,
            nu: (b + d0 * d0 * t.nu) + res.nu0,
        })
        .collect();
    ShellModel::new(Dim::Three, terms, d0 * pi3.x_max(), "gaussian image")
}

/// Shell model of one atom's image: every Gaussian of the type model imaged
/// with the site's B_n added, concatenated in type-model order.
pub fn atom_image_model(
    model: &GaussianAtomModel,
    b_n: f64,
    res: &ResolutionSpec,
    pi3: &ShellModel,
) -> Result<ShellModel> {
    model.validate()?;
    if !(b_n >= 0.0 && b_n.is_finite()) {
        return Err(domain("atom_image", format!("B_n must be >= 0, got {b_n}")));
    }
    let mut terms = Vec::with_capacity(model.terms.len() * pi3.len());
    let mut x_max = 0.0f64;
    for g in &model.terms {
        let img = gaussian_image_model(g.a, b_to_nu(b_n + g.b), res, pi3)?;
        x_max = x_max.max(img.x_max());
        terms.extend_from_slice(img.terms());
    }
    ShellModel::new(Dim::Three, terms, x_max, model.label.clone())
}

/// Value at radius x of an atom's image at resolution d0.
pub fn atom_image_radial(
    model: &GaussianAtomModel,
    b_n: f64,
    res: &ResolutionSpec,
    pi3: &ShellModel,
    x: f64,
) -> Result<f64> {
    atom_image_model(model, b_n, res, pi3)?.eval(x, None)
}

/// Shell decomposition of the resolution-d0 image of an immobile atom with
/// radial form factor F̄, fitted on [0, x_max].
pub fn precompute_type_image(
    form_factor: impl Fn(f64) -> f64,
    d0: f64,
    x_max: f64,
    fit: &FitConfig,
) -> Result<ShellModel> {
    ResolutionSpec::new(d0, 0.0)?;
    let q = QuadratureSpec::default().with_tolerances(1e-12, 1e-10);
    let s_max = 1.0 / d0;
    let failure = RefCell::new(None);
    let profile = fit.sample_target(Dim::Three, x_max, |x| {
        match radial_ift_truncated(Dim::Three, &form_factor, x, s_max, &q) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    })?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let (model, report) = decompose(Dim::Three, &profile, fit)?;
    log::info!(
        "type image at d0 = {d0}: {} terms, max error {:.3e}",
        model.len(),
        report.max_abs_error
    );
    Ok(model.with_label("type image"))
}

/// Every ν_m increased by B/8π².
pub fn apply_b_shift(model: &ShellModel, b: f64) -> Result<ShellModel> {
    check_three_dimensional("apply_b_shift", model)?;
    if !(b >= 0.0 && b.is_finite()) {
        return Err(domain("apply_b_shift", format!("B must be >= 0, got {b}")));
    }
    model.convolve_with_gaussian(b_to_nu(b))
}

/// Coulomb potential K/x of a source with Gaussian position uncertainty ν:
/// (K/x)·erf(x/√(2ν)).
pub fn coulomb_blurred(k: f64, nu: f64, x: f64) -> Result<f64> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(domain(
            "coulomb_blurred",
            format!("nu must be > 0, got {nu}"),
        ));
    }
    check_finite("coulomb_blurred", k)?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(domain(
            "coulomb_blurred",
            format!("x must be >= 0, got {x}"),
        ));
    }
    let s = (2.0 * nu).sqrt();
    let z = x / s;
    // erf(z)/z, by its Maclaurin series near the origin.
    let erf_over_z = if z < 1e-3 {
        let z2 = z * z;
        2.0 / PI.sqrt() * (1.0 - z2 / 3.0 + z2 * z2 / 10.0)
    } else {
        raw::erf(z) / z
    };
    Ok(k / s * erf_over_z)
}

/// Radial transform 4πK/(λ² + 4π²s²) of the screened potential K e^{−λx}/x.
pub fn yukawa_ft(k: f64, lambda: f64, s: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(domain(
            "yukawa_ft",
            format!("lambda must be > 0, got {lambda}"),
        ));
    }
    check_finite("yukawa_ft", k)?;
    if !(s >= 0.0 && s.is_finite()) {
        return Err(domain("yukawa_ft", format!("s must be >= 0, got {s}")));
    }
    Ok(4.0 * PI * k / (lambda * lambda + 4.0 * PI * PI * s * s))
}

/// Image at resolution d0 of the potential K/x: (4K/d0)·Si(u)/u, u = 2πx/d0.
pub fn coulomb_resolution_image(k: f64, d0: f64, x: f64) -> Result<f64> {
    if !(d0 > 0.0 && d0.is_finite()) {
        return Err(domain(
            "coulomb_resolution_image",
            format!("d0 must be > 0, got {d0}"),
        ));
    }
    check_finite("coulomb_resolution_image", k)?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(domain(
            "coulomb_resolution_image",
            format!("x must be >= 0, got {x}"),
        ));
    }
    let u = 2.0 * PI * x / d0;
    let si_over_u = if u < 1e-4 {
        1.0 - u * u / 18.0
    } else {
        raw::sine_integral(u) / u
    };
    Ok(4.0 * k / d0 * si_over_u)
}
