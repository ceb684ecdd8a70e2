use std::f64::consts::PI;

use shellfield_core::imaging::coulomb_blurred;
use shellfield_core::shells::interference_radial;
use shellfield_core::specfun::raw::sine_integral;
use shellfield_core::Dim;

use crate::CliError;

/// Short and full names of the bundled tables.
const TABLES: [(&str, &str); 4] = [
    ("pi3", "pi3_interference"),
    ("pi1", "pi1_interference"),
    ("pi2", "pi2_interference"),
    ("si_over_x", "si_over_x"),
];

pub fn table_name(name: &str) -> Result<&'static str, CliError> {
    TABLES
        .iter()
        .find(|(short, full)| name == *short || name == *full)
        .map(|&(_, full)| full)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "`{name}` is not a bundled table (pi1, pi2, pi3, si_over_x)"
            ))
        })
}

pub fn all_tables() -> impl Iterator<Item = &'static str> {
    TABLES.iter().map(|&(_, full)| full)
}

/// Si(2πx)/(2πx), the unit-resolution image of a 1/x potential up to a factor 4.
pub fn si_over_x(x: f64) -> f64 {
    let u = 2.0 * PI * x.abs();
    if u < 1e-4 {
        1.0 - u * u / 18.0
    } else {
        sine_integral(u) / u
    }
}

/// The function a bundled table approximates.
pub fn table_target(full_name: &str) -> (Dim, fn(f64) -> f64) {
    match full_name {
        "pi3_interference" => (Dim::Three, |x| {
            interference_radial(Dim::Three, x).unwrap_or(f64::NAN)
        }),
        "pi1_interference" => (Dim::One, |x| {
            interference_radial(Dim::One, x).unwrap_or(f64::NAN)
        }),
        "pi2_interference" => (Dim::Two, |x| {
            interference_radial(Dim::Two, x).unwrap_or(f64::NAN)
        }),
        _ => (Dim::Three, si_over_x),
    }
}

pub enum Target {
    Builtin {
        name: String,
        dim: Dim,
        default_xmax: f64,
        f: Box<dyn Fn(f64) -> f64>,
    },
    File(std::path::PathBuf),
}

pub fn parse_target(spec: &str) -> Result<Target, CliError> {
    if let Some(path) = spec.strip_prefix("file:") {
        return Ok(Target::File(path.into()));
    }
    if let Some(nu) = spec.strip_prefix("coulomb_erf:") {
        let nu: f64 = nu
            .parse()
            .ok()
            .filter(|v: &f64| *v > 0.0 && v.is_finite())
            .ok_or_else(|| CliError::Usage(format!("--target: bad coulomb_erf width `{nu}`")))?;
        return Ok(Target::Builtin {
            name: format!("coulomb_erf_{nu}"),
            dim: Dim::Three,
            default_xmax: 10.0,
            f: Box::new(move |x| coulomb_blurred(1.0, nu, x).unwrap_or(f64::NAN)),
        });
    }
    let full = match spec {
        "pi1" | "pi2" | "pi3" | "si_over_x" => table_name(spec)?,
        _ => {
            return Err(CliError::Usage(format!(
                "--target `{spec}` is not one of pi1, pi2, pi3, si_over_x, coulomb_erf:<nu>, file:<path>"
            )))
        }
    };
    let (dim, f) = table_target(full);
    Ok(Target::Builtin {
        name: spec.to_string(),
        dim,
        default_xmax: if spec == "pi3" { 20.0 } else { 10.0 },
        f: Box::new(f),
    })
}
