use std::path::{Path, PathBuf};

use shellfield_core::decomp::{
    bundled_table, decompose as fit, published_max_error, FitConfig, FitReport, ResidualStrategy,
    WeightMode,
};
use shellfield_core::imaging::{
    atom_image_model, coulomb_resolution_image, synthesize_map, GridSpec, ResolutionSpec,
};
use shellfield_core::io::{AtomModelDocument, TableDocument, TableMeta};
use shellfield_core::rfourier::RadialProfile;
use shellfield_core::shells::{gaussian_radial, interference_radial, omega_radial};
use shellfield_core::{Dim, ShellModel};

use crate::args::{
    DecomposeArgs, EvalArgs, EvalFunction, GridArgs, ImageArgs, Strategy, TablesArgs, VolumeFormat,
    Weights,
};
use crate::manifest::{manifest_path, Recorder};
use crate::targets::{all_tables, parse_target, si_over_x, table_name, Target};
use crate::CliError;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn required<T>(value: Option<T>, flag: &str, what: &str) -> Result<T, CliError> {
    value.ok_or_else(|| usage(format!("{flag} is required {what}")))
}

pub fn positive(value: f64, flag: &str) -> Result<f64, CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(usage(format!(
            "{flag} must be a positive number, got {value}"
        )))
    }
}

pub fn non_negative(value: f64, flag: &str) -> Result<f64, CliError> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(usage(format!(
            "{flag} must be a non-negative number, got {value}"
        )))
    }
}

pub fn dimension(n: u8) -> Result<Dim, CliError> {
    Dim::try_from(n).map_err(|_| usage(format!("--dim must be 1, 2 or 3, got {n}")))
}

/// Number of samples and the adjusted step covering [0, xmax].
pub fn grid_points(
    xmax: f64,
    step: Option<f64>,
    default_divisions: f64,
) -> Result<(usize, f64), CliError> {
    let xmax = positive(xmax, "--xmax")?;
    let step = positive(step.unwrap_or(xmax / default_divisions), "--step")?;
    if step > xmax {
        return Err(usage(format!("--step {step} exceeds --xmax {xmax}")));
    }
    let intervals = (xmax / step).round().max(1.0);
    if intervals > 1e8 {
        return Err(usage(format!("--step {step} gives too many samples")));
    }
    Ok((intervals as usize + 1, xmax / intervals))
}

/// Writes `text` to `path` with its manifest, or to stdout.
pub fn emit_text(text: &str, output: Option<&Path>, mut rec: Recorder) -> Result<(), CliError> {
    match output {
        Some(path) => {
            std::fs::write(path, text)?;
            rec.output(path);
            rec.finish(&manifest_path(path))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn load_table(spec: &str, rec: &mut Recorder) -> Result<ShellModel, CliError> {
    if let Ok(name) = table_name(spec) {
        return Ok(bundled_table(name)?);
    }
    let path = Path::new(spec);
    if !path.is_file() {
        return Err(usage(format!(
            "--table `{spec}` is neither a bundled table nor a file"
        )));
    }
    rec.input(path);
    Ok(TableDocument::read(path)?.to_model()?)
}

fn sample(
    f: &dyn Fn(f64) -> Result<f64, CliError>,
    grid: &GridArgs,
    dim: Dim,
    output: Option<&Path>,
    rec: Recorder,
) -> Result<(), CliError> {
    if let Some(x) = grid.x {
        non_negative(x, "--x")?;
        let v = f(x)?;
        println!("{v:.16e}");
        return match output {
            Some(_) => emit_text(&format!("# x f\n{x:.16e} {v:.16e}\n"), output, rec),
            None => Ok(()),
        };
    }
    let xmax = required(grid.xmax, "--xmax", "unless --x is given")?;
    let (count, step) = grid_points(xmax, grid.step, 1000.0)?;
    let values = (0..count)
        .map(|i| f(i as f64 * step))
        .collect::<Result<Vec<_>, _>>()?;
    let profile = RadialProfile::new(0.0, step, values, dim)?;
    emit_text(&profile.to_text(), output, rec)
}

pub fn eval(a: EvalArgs) -> Result<(), CliError> {
    let mut rec = Recorder::start();
    let dim = dimension(a.dim)?;
    let output = a.output.as_deref();
    match a.function {
        EvalFunction::Omega => {
            let mu = non_negative(required(a.mu, "--mu", "for omega")?, "--mu")?;
            let nu = positive(required(a.nu, "--nu", "for omega")?, "--nu")?;
            sample(
                &|x| Ok(omega_radial(dim, x, mu, nu)?),
                &a.grid,
                dim,
                output,
                rec,
            )
        }
        EvalFunction::Pi => sample(
            &|x| Ok(interference_radial(dim, x)?),
            &a.grid,
            dim,
            output,
            rec,
        ),
        EvalFunction::Gauss => {
            let nu = positive(required(a.nu, "--nu", "for gauss")?, "--nu")?;
            sample(
                &|x| Ok(gaussian_radial(dim, x, nu)?),
                &a.grid,
                dim,
                output,
                rec,
            )
        }
        EvalFunction::ShellSum => {
            let model = load_table(&required(a.table, "--table", "for shell_sum")?, &mut rec)?;
            if let Some(m) = a.trunc {
                if m == 0 || m > model.len() {
                    return Err(usage(format!(
                        "--trunc must lie in 1..={}, got {m}",
                        model.len()
                    )));
                }
            }
            let dim = model.dim();
            sample(&|x| Ok(model.eval(x, a.trunc)?), &a.grid, dim, output, rec)
        }
        EvalFunction::CoulombImage => {
            let k = required(a.k, "--K", "for coulomb_image")?;
            let d0 = positive(required(a.d0, "--d0", "for coulomb_image")?, "--d0")?;
            sample(
                &|x| Ok(coulomb_resolution_image(k, d0, x)?),
                &a.grid,
                Dim::Three,
                output,
                rec,
            )
        }
        EvalFunction::SiOverX => sample(&|x| Ok(si_over_x(x)), &a.grid, Dim::Three, output, rec),
    }
}

fn print_report(model: &ShellModel, report: &FitReport, output: &Path) {
    println!("terms          {}", model.len());
    println!("max_abs_error  {:.6e}", report.max_abs_error);
    println!("rms_error      {:.6e}", report.rms_error);
    println!("iterations     {}", report.iterations);
    println!(
        "termination    {}",
        serde_json::to_value(report.termination)
            .map(|v| v.as_str().unwrap_or("").to_string())
            .unwrap_or_default()
    );
    println!("converged      {}", report.converged);
    println!("output         {}", output.display());
}

pub fn decompose(a: DecomposeArgs) -> Result<(), CliError> {
    let mut rec = Recorder::start();
    let (name, profile, mut config) = match parse_target(&a.target)? {
        Target::Builtin {
            name,
            dim,
            default_xmax,
            f,
        } => {
            let xmax = positive(a.xmax.unwrap_or(default_xmax), "--xmax")?;
            let mut config = FitConfig::for_range(xmax);
            if let Some(step) = a.step {
                config.grid_step = positive(step, "--step")?;
            }
            config
                .validate(xmax)
                .map_err(|e| usage(format!("--step: {e}")))?;
            let profile = config.sample_target(dim, xmax, f)?;
            (name, profile, config)
        }
        Target::File(path) => {
            let dim = dimension(a.dim)?;
            let text = std::fs::read_to_string(&path)
                .map_err(|e| usage(format!("--target file {}: {e}", path.display())))?;
            rec.input(&path);
            let mut profile = RadialProfile::from_text(&text, dim)?;
            if let Some(xmax) = a.xmax {
                let keep = profile
                    .points()
                    .take_while(|&(x, _)| x <= xmax * (1.0 + 1e-12))
                    .count();
                if keep < 2 {
                    return Err(usage(format!(
                        "--xmax {xmax} leaves fewer than two samples"
                    )));
                }
                profile = RadialProfile::new(
                    profile.x0,
                    profile.step,
                    profile.values[..keep].to_vec(),
                    dim,
                )?;
            }
            let mut config = FitConfig::for_range(profile.x_end());
            config.grid_step = profile.step;
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("profile")
                .to_string();
            (stem, profile, config)
        }
    };
    config.max_iterations = a.max_iterations;
    config.weight_mode = match a.weights {
        Weights::Uniform => WeightMode::Uniform,
        Weights::Radial => WeightMode::Radial,
    };
    config.residual_strategy = match (a.strategy, a.accuracy) {
        (Some(Strategy::PerRipple), Some(_)) => {
            return Err(usage("--accuracy needs --strategy until-accuracy"));
        }
        (Some(Strategy::UntilAccuracy), None) => {
            return Err(usage("--strategy until-accuracy needs --accuracy"));
        }
        (_, Some(eps)) => ResidualStrategy::AddUntilAccuracy {
            target: positive(eps, "--accuracy")?,
            max_terms: a.max_terms,
        },
        (_, None) => ResidualStrategy::OneTermPerRipple,
    };

    let (model, report) = match fit(profile.dim, &profile, &config) {
        Ok(r) => r,
        Err(shellfield_core::Error::Divergence { best, .. }) => *best,
        Err(e) => return Err(e.into()),
    };
    let output = a
        .output
        .unwrap_or_else(|| PathBuf::from(format!("{name}_fit.json")));
    let doc = TableDocument::from_model(
        &model.with_label(name.clone()),
        TableMeta {
            source: format!("fit:{}", a.target),
            max_abs_error: Some(report.max_abs_error),
        },
    );
    doc.write(&output)?;
    rec.output(&output);
    rec.finish(&manifest_path(&output))?;
    print_report(&doc.to_model()?, &report, &output);
    if !report.converged {
        return Err(CliError::NotConverged(format!(
            "{} after {} iterations, best model written to {}",
            serde_json::to_string(&report.termination).unwrap_or_default(),
            report.iterations,
            output.display()
        )));
    }
    Ok(())
}

pub fn load_atoms(path: &Path, rec: &mut Recorder) -> Result<AtomModelDocument, CliError> {
    let doc = AtomModelDocument::read(path)
        .map_err(|e| usage(format!("--model {}: {e}", path.display())))?;
    rec.input(path);
    let missing = doc.missing_types();
    if !missing.is_empty() {
        return Err(usage(format!(
            "unknown atom type(s): {}",
            missing.join(", ")
        )));
    }
    if doc.atoms.is_empty() {
        return Err(usage(format!("--model {} lists no atoms", path.display())));
    }
    Ok(doc)
}

pub fn resolution(d0: f64, nu0: f64) -> Result<ResolutionSpec, CliError> {
    positive(d0, "--d0")?;
    non_negative(nu0, "--nu0")?;
    Ok(ResolutionSpec::new(d0, nu0)?)
}

pub fn image(a: ImageArgs) -> Result<(), CliError> {
    let mut rec = Recorder::start();
    let doc = load_atoms(&a.model, &mut rec)?;
    let res = resolution(a.d0, a.nu0)?;
    let pi3 = match &a.pi3 {
        Some(p) => load_table(&p.to_string_lossy(), &mut rec)?,
        None => bundled_table("pi3_interference")?,
    };
    if pi3.dim() != Dim::Three {
        return Err(usage("--pi3 must be a 3-D table"));
    }

    if a.radial {
        let site = doc.sites().into_iter().nth(a.atom).ok_or_else(|| {
            usage(format!(
                "--atom {} out of range ({} atoms)",
                a.atom,
                doc.atoms.len()
            ))
        })?;
        let model = atom_image_model(&doc.types[&site.type_label], site.b_factor, &res, &pi3)?;
        let model = model.scale_weights(site.occupancy);
        let xmax = a.xmax.unwrap_or(10.0 * a.d0);
        let (count, step) = grid_points(xmax, a.step, 1000.0)?;
        let values = (0..count)
            .map(|i| model.eval_unchecked(i as f64 * step))
            .collect();
        let profile = RadialProfile::new(0.0, step, values, Dim::Three)?;
        return emit_text(&profile.to_text(), a.output.as_deref(), rec);
    }

    let output = required(a.output.clone(), "--output", "with --map")?;
    let sharp = ResolutionSpec::new(a.d0, 0.0)?;
    let type_models = doc
        .types
        .iter()
        .map(|(label, m)| Ok((label.clone(), atom_image_model(m, 0.0, &sharp, &pi3)?)))
        .collect::<Result<_, CliError>>()?;
    let spacing = positive(a.spacing.unwrap_or(a.d0 / 4.0), "--spacing")?;
    let padding = non_negative(a.padding.unwrap_or(4.0 * a.d0), "--padding")?;
    let sites = doc.sites();
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for s in &sites {
        for k in 0..3 {
            lo[k] = lo[k].min(s.position[k] - padding);
            hi[k] = hi[k].max(s.position[k] + padding);
        }
    }
    let dims = [0, 1, 2].map(|k| ((hi[k] - lo[k]) / spacing).ceil() as usize + 1);
    if dims.iter().product::<usize>() > 512 * 512 * 512 {
        return Err(usage(format!(
            "--spacing {spacing} gives a {dims:?} grid, too large"
        )));
    }
    let grid = GridSpec::new(lo, [spacing; 3], dims)?;
    let volume = synthesize_map(&sites, &type_models, &res, &grid)?;
    match a.format {
        VolumeFormat::Mrc => volume.write_mrc_file(&output)?,
        VolumeFormat::RawMeta => {
            let sidecar = volume.write_raw_meta(&output)?;
            rec.output(&sidecar);
        }
    }
    rec.output(&output);
    rec.finish(&manifest_path(&output))?;
    let (min, max, mean, _) = volume.statistics();
    println!("dims       {} {} {}", dims[0], dims[1], dims[2]);
    println!("spacing    {spacing}");
    println!("min        {min:.6e}");
    println!("max        {max:.6e}");
    println!("mean       {mean:.6e}");
    println!("integral   {:.6e}", volume.integral());
    println!("output     {}", output.display());
    Ok(())
}

pub fn tables(a: TablesArgs) -> Result<(), CliError> {
    let mut rec = Recorder::start();
    let names: Vec<&str> = match &a.name {
        Some(n) => vec![table_name(n)?],
        None => all_tables().collect(),
    };
    std::fs::create_dir_all(&a.output)?;
    for name in &names {
        let doc = TableDocument::from_model(
            &bundled_table(name)?,
            TableMeta {
                source: "paper".into(),
                max_abs_error: published_max_error(name),
            },
        );
        let path = a.output.join(format!("{name}.json"));
        doc.write(&path)?;
        rec.output(&path);
        println!("{}", path.display());
    }
    rec.finish(&a.output.join("tables.manifest.json"))
}
