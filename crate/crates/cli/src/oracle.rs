use std::f64::consts::PI;

use shellfield_core::decomp::{bundled_table, published_max_error};
use shellfield_core::imaging::atom_image_model;
use shellfield_core::rfourier::{
    radial_convolve, radial_ft, radial_ift_truncated, QuadratureSpec, RadialProfile,
};
use shellfield_core::shells::{
    gaussian_radial, gaussian_transform, omega_fourier_radial, omega_radial, shell_transform,
};
use shellfield_core::Dim;

use crate::args::OracleCheck;
use crate::commands::{
    dimension, emit_text, grid_points, load_atoms, non_negative, positive, resolution, usage,
};
use crate::manifest::Recorder;
use crate::targets::{table_name, table_target};
use crate::CliError;

/// Accuracy bounds for the complete bundled tables.
fn full_table_bound(name: &str) -> f64 {
    match name {
        "pi3_interference" => 7.5e-4,
        "pi1_interference" => 1.0e-4,
        "pi2_interference" => 5.2e-4,
        _ => 3.0e-4,
    }
}

fn verdict(worst: f64, tol: f64, at: &str) -> Result<(), CliError> {
    println!("max_diff   {worst:.6e}");
    println!("tolerance  {tol:.6e}");
    if worst <= tol {
        println!("status     pass");
        Ok(())
    } else {
        println!("status     FAIL");
        Err(CliError::OracleFailed(format!(
            "difference {worst:.3e} exceeds {tol:.3e} at {at}"
        )))
    }
}

pub fn run(check: OracleCheck) -> Result<(), CliError> {
    match check {
        OracleCheck::Ft {
            dim,
            mu,
            nu,
            s,
            tol,
        } => {
            let dim = dimension(dim)?;
            let (mu, nu, s) = (
                non_negative(mu, "--mu")?,
                positive(nu, "--nu")?,
                non_negative(s, "--s")?,
            );
            let numeric = radial_ft(
                dim,
                |x| omega_radial(dim, x, mu, nu).unwrap_or(f64::NAN),
                s,
                &QuadratureSpec::gaussian_decay(mu, nu),
            )?;
            let exact = omega_fourier_radial(dim, s, mu, nu)?;
            println!("numeric    {numeric:.16e}");
            println!("exact      {exact:.16e}");
            verdict((numeric - exact).abs(), tol, &format!("s = {s}"))
        }
        OracleCheck::Conv {
            dim,
            mu,
            nu,
            nu0,
            tol,
        } => {
            let dim = dimension(dim)?;
            let (mu, nu, nu0) = (
                non_negative(mu, "--mu")?,
                positive(nu, "--nu")?,
                positive(nu0, "--nu0")?,
            );
            let mut worst = (0.0f64, String::new());
            if dim == Dim::Two {
                // No direct-space route in two dimensions; compare transforms.
                for i in 0..=300 {
                    let s = i as f64 * 0.01;
                    let product = shell_transform(dim, s, mu)
                        * gaussian_transform(s, nu)
                        * gaussian_transform(s, nu0);
                    let d = (product - omega_fourier_radial(dim, s, mu, nu + nu0)?).abs();
                    if d > worst.0 {
                        worst = (d, format!("s = {s}"));
                    }
                }
            } else {
                let width = (nu + nu0).sqrt();
                let q = QuadratureSpec::default()
                    .with_cutoff(mu + 1.0 + 12.0 * width)
                    .with_panel_width(nu.sqrt().min(nu0.sqrt()))
                    .with_tolerances(1e-12, 1e-10);
                for x in [0.0, 1.0, mu, mu + 1.0] {
                    let direct = radial_convolve(
                        dim,
                        |r| omega_radial(dim, r, mu, nu).unwrap_or(f64::NAN),
                        |r| gaussian_radial(dim, r, nu0).unwrap_or(f64::NAN),
                        x,
                        &q,
                    )?;
                    let widened = omega_radial(dim, x, mu, nu + nu0)?;
                    println!("x = {x:<8} convolved {direct:.12e}  widened {widened:.12e}");
                    let d = (direct - widened).abs();
                    if d >= worst.0 {
                        worst = (d, format!("x = {x}"));
                    }
                }
            }
            verdict(worst.0, tol, &worst.1)
        }
        OracleCheck::Image {
            model,
            d0,
            nu0,
            atom,
            xmax,
            step,
            tol,
            output,
        } => {
            let mut rec = Recorder::start();
            let doc = load_atoms(&model, &mut rec)?;
            let res = resolution(d0, nu0)?;
            let site = doc.sites().into_iter().nth(atom).ok_or_else(|| {
                usage(format!(
                    "--atom {atom} out of range ({} atoms)",
                    doc.atoms.len()
                ))
            })?;
            let gaussians = &doc.types[&site.type_label];
            let pi3 = bundled_table("pi3_interference")?;
            let series = atom_image_model(gaussians, site.b_factor, &res, &pi3)?
                .scale_weights(site.occupancy);
            let form = |s: f64| {
                site.occupancy
                    * gaussians.form_factor(site.b_factor, s)
                    * (-2.0 * PI * PI * nu0 * s * s).exp()
            };
            let q = QuadratureSpec::default().with_tolerances(1e-13, 1e-11);
            let (count, step) = grid_points(xmax.unwrap_or(10.0 * d0), step, 500.0)?;
            let mut diffs = Vec::with_capacity(count);
            let mut peak = 0.0f64;
            for i in 0..count {
                let x = i as f64 * step;
                let exact = radial_ift_truncated(Dim::Three, form, x, 1.0 / d0, &q)?;
                peak = peak.max(exact.abs());
                diffs.push(series.eval_unchecked(x) - exact);
            }
            let (k, worst) = diffs
                .iter()
                .enumerate()
                .fold((0, 0.0f64), |(bk, bw), (k, d)| {
                    if d.abs() > bw {
                        (k, d.abs())
                    } else {
                        (bk, bw)
                    }
                });
            if output.is_some() {
                emit_text(
                    &RadialProfile::new(0.0, step, diffs, Dim::Three)?.to_text(),
                    output.as_deref(),
                    rec,
                )?;
            }
            println!("peak       {peak:.6e}");
            verdict(worst, tol * peak, &format!("x = {}", k as f64 * step))
        }
        OracleCheck::Table {
            name,
            trunc,
            xmax,
            step,
            tol,
            output,
        } => {
            let full = table_name(&name)?;
            let model = bundled_table(full)?;
            let m = trunc.unwrap_or(model.len());
            if m == 0 || m > model.len() {
                return Err(usage(format!(
                    "--trunc must lie in 1..={}, got {m}",
                    model.len()
                )));
            }
            let tol = match (tol, trunc) {
                (Some(t), _) => positive(t, "--tol")?,
                (None, Some(_)) => 2.0 * published_max_error(full).unwrap_or(1e-3),
                (None, None) => full_table_bound(full),
            };
            let (_, target) = table_target(full);
            let xmax = xmax.unwrap_or(model.x_max());
            let (count, step) = grid_points(xmax, Some(step), 1.0)?;
            let diffs = (0..count)
                .map(|i| {
                    let x = i as f64 * step;
                    Ok(model.eval(x, Some(m))? - target(x))
                })
                .collect::<Result<Vec<f64>, CliError>>()?;
            let (k, worst) = diffs
                .iter()
                .enumerate()
                .fold((0, 0.0f64), |(bk, bw), (k, d)| {
                    if d.abs() > bw {
                        (k, d.abs())
                    } else {
                        (bk, bw)
                    }
                });
            if output.is_some() {
                let profile = RadialProfile::new(0.0, step, diffs, model.dim())?;
                emit_text(&profile.to_text(), output.as_deref(), Recorder::start())?;
            }
            println!("table      {full} ({m} of {} terms)", model.len());
            println!("range      [0, {xmax}] step {step}");
            verdict(worst, tol, &format!("x = {}", k as f64 * step))
        }
    }
}
