//! One test per acceptance criterion. Each writes a single PASS/FAIL line to
//! stderr, outside the test harness's output capture.

use std::f64::consts::PI;
use std::io::Write;
use std::process::Command;
use std::time::Instant;

use shellfield_core::decomp::{bundled_table, decompose, FitConfig};
use shellfield_core::imaging::{
    coulomb_blurred, coulomb_resolution_image, gaussian_image_model, yukawa_ft, ResolutionSpec,
};
use shellfield_core::rfourier::{radial_convolve, radial_ft, radial_ift_truncated, QuadratureSpec};
use shellfield_core::shells::{
    gaussian_radial, interference_radial, omega_fourier_radial, omega_gradient, omega_radial,
    peak_location, PeakKind,
};
use shellfield_core::specfun::{bessel_i0_scaled, sine_integral};
use shellfield_core::{Dim, ShellModel};

fn report(n: u32, title: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "criterion {n:>2} {verdict}  {title}: {detail}");
    assert!(ok, "criterion {n} ({title}) failed: {detail}");
}

fn max_discrepancy(
    model: &ShellModel,
    truncate: Option<usize>,
    f: impl Fn(f64) -> f64,
    x_max: f64,
    step: f64,
) -> f64 {
    let n = (x_max / step).round() as usize;
    (0..=n)
        .map(|i| i as f64 * step)
        .map(|x| (model.eval(x, truncate).unwrap() - f(x)).abs())
        .fold(0.0, f64::max)
}

fn interference(dim: Dim) -> impl Fn(f64) -> f64 {
    move |x| interference_radial(dim, x).unwrap()
}

fn si_normalized(x: f64) -> f64 {
    let u = 2.0 * PI * x;
    if u == 0.0 {
        1.0
    } else {
        sine_integral(u).unwrap() / u
    }
}

#[test]
fn criterion_01_table1_fidelity() {
    let start = Instant::now();
    let err = max_discrepancy(
        &bundled_table("pi3_interference").unwrap(),
        None,
        interference(Dim::Three),
        20.0,
        0.005,
    );
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        "bundled pi3_interference vs pi3 on [0, 20]",
        err <= 7.5e-4 && secs < 2.0,
        &format!("max {err:.3e} (bound 7.5e-4), {secs:.3} s (bound 2 s)"),
    );
}

#[test]
fn criterion_02_table2_fidelity() {
    let err = max_discrepancy(
        &bundled_table("pi1_interference").unwrap(),
        None,
        interference(Dim::One),
        10.0,
        0.0025,
    );
    report(
        2,
        "bundled pi1_interference vs pi1 on [0, 10]",
        err <= 1.0e-4,
        &format!("max {err:.3e} (bound 1.0e-4)"),
    );
}

#[test]
fn criterion_03_table3_fidelity() {
    let err = max_discrepancy(
        &bundled_table("pi2_interference").unwrap(),
        None,
        interference(Dim::Two),
        10.0,
        0.0025,
    );
    report(
        3,
        "bundled pi2_interference vs pi2 on [0, 10]",
        err <= 5.2e-4,
        &format!("max {err:.3e} (bound 5.2e-4)"),
    );
}

#[test]
fn criterion_04_table4_ladder() {
    let table = bundled_table("si_over_x").unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (m, bound) in [(4, 2.0e-2), (16, 1.0e-3), (33, 3.0e-4)] {
        let err = max_discrepancy(&table, Some(m), si_normalized, 10.0, 0.0025);
        let pass = err <= bound;
        ok &= pass;
        parts.push(format!(
            "M={m} {err:.3e}/{bound:.1e} {}",
            if pass { "ok" } else { "over" }
        ));
    }
    report(
        4,
        "bundled si_over_x first-M rows vs Si(2 pi x)/(2 pi x)",
        ok,
        &parts.join(", "),
    );
}

#[test]
fn criterion_05_decomposition_parity() {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_shellfield"))
        .args([
            "decompose",
            "--target",
            "pi3",
            "--xmax",
            "20",
            "--strategy",
            "per-ripple",
            "--output",
            "pi3.json",
        ])
        .current_dir(dir.path())
        .output()
        .unwrap();
    let secs = start.elapsed().as_secs_f64();
    let stdout = String::from_utf8_lossy(&out.stdout);
    let reported: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("max_abs_error"))
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(f64::INFINITY);
    let doc = shellfield_core::io::TableDocument::read(&dir.path().join("pi3.json")).unwrap();
    let model = doc.to_model().unwrap();
    let err = max_discrepancy(&model, None, interference(Dim::Three), 20.0, 0.005);
    report(
        5,
        "decompose pi3 per-ripple",
        model.len() == 40 && reported <= 1e-3 && err <= 1e-3 && secs < 60.0,
        &format!(
            "{} terms, reported max {reported:.3e}, rechecked max {err:.3e} (bound 1e-3), {secs:.1} s, exit {:?}",
            model.len(),
            out.status.code()
        ),
    );
}

#[test]
fn criterion_06_round_trip_recovery() {
    let cfg = FitConfig::for_range(6.0);
    let target = cfg
        .sample_target(Dim::Three, 6.0, |x| {
            omega_radial(Dim::Three, x, 2.0, 0.05).unwrap()
        })
        .unwrap();
    let (model, _) = decompose(Dim::Three, &target, &cfg).unwrap();
    let t = model.terms()[0];
    let errs = [
        (t.kappa - 1.0).abs(),
        (t.mu - 2.0).abs(),
        (t.nu - 0.05).abs(),
    ];
    report(
        6,
        "one-term recovery of Omega3(x; 2, 0.05)",
        model.len() == 1 && errs.iter().all(|&e| e <= 1e-6),
        &format!(
            "{} term(s), |dkappa| {:.1e}, |dmu| {:.1e}, |dnu| {:.1e}",
            model.len(),
            errs[0],
            errs[1],
            errs[2]
        ),
    );
}

#[test]
fn criterion_07_fourier_oracle() {
    let mut worst = 0.0f64;
    for dim in Dim::ALL {
        for mu in [0.0, 0.5, 2.0, 10.0] {
            for nu in [0.01, 0.1, 1.0] {
                let q = QuadratureSpec::gaussian_decay(mu, nu);
                for s in [0.0, 0.1, 0.5, 1.0, 3.0] {
                    let numeric =
                        radial_ft(dim, |x| omega_radial(dim, x, mu, nu).unwrap(), s, &q).unwrap();
                    worst =
                        worst.max((numeric - omega_fourier_radial(dim, s, mu, nu).unwrap()).abs());
                }
            }
        }
    }
    report(
        7,
        "radial_ft(Omega) vs P0*G over 180 points",
        worst <= 1e-6,
        &format!("max {worst:.3e} (bound 1e-6)"),
    );
}

#[test]
fn criterion_08_convolution_invariance() {
    let (mu, nu, nu0) = (2.0, 0.05, 0.03);
    let q = QuadratureSpec::default()
        .with_cutoff(mu + 1.0 + 12.0 * f64::sqrt(nu + nu0))
        .with_panel_width(f64::sqrt(nu0))
        .with_tolerances(1e-12, 1e-10);
    let mut direct = 0.0f64;
    for dim in [Dim::One, Dim::Three] {
        for x in [0.0, 1.0, mu, mu + 1.0] {
            let v = radial_convolve(
                dim,
                |r| omega_radial(dim, r, mu, nu).unwrap(),
                |r| gaussian_radial(dim, r, nu0).unwrap(),
                x,
                &q,
            )
            .unwrap();
            direct = direct.max((v - omega_radial(dim, x, mu, nu + nu0).unwrap()).abs());
        }
    }
    let mut fourier = 0.0f64;
    for i in 0..=300 {
        let s = i as f64 * 0.01;
        let product = omega_fourier_radial(Dim::Two, s, mu, nu).unwrap()
            * (-2.0 * PI * PI * nu0 * s * s).exp();
        fourier =
            fourier.max((product - omega_fourier_radial(Dim::Two, s, mu, nu + nu0).unwrap()).abs());
    }
    report(
        8,
        "Gaussian blur of Omega widens nu",
        direct <= 1e-6 && fourier <= 1e-14,
        &format!("N=1,3 direct max {direct:.3e} (bound 1e-6), N=2 Fourier max {fourier:.1e}"),
    );
}

#[test]
fn criterion_09_image_equivalence() {
    let (b, d0) = (0.1, 2.0);
    let pi3 = bundled_table("pi3_interference").unwrap();
    let image = gaussian_image_model(1.0, b, &ResolutionSpec::new(d0, 0.0).unwrap(), &pi3).unwrap();
    let q = QuadratureSpec::default().with_tolerances(1e-13, 1e-11);
    let oracle = |x: f64| {
        radial_ift_truncated(
            Dim::Three,
            |s| (-2.0 * PI * PI * b * s * s).exp(),
            x,
            1.0 / d0,
            &q,
        )
        .unwrap()
    };
    let peak = oracle(0.0);
    let worst = (0..=1000)
        .map(|i| i as f64 * 0.01)
        .map(|x| (image.eval(x, None).unwrap() - oracle(x)).abs())
        .fold(0.0, f64::max);
    report(
        9,
        "Gaussian atom image, shell series vs truncated IFT",
        worst <= 1.5e-3 * peak,
        &format!(
            "max {worst:.3e}, peak {peak:.4}, ratio {:.3e} (bound 1.5e-3)",
            worst / peak
        ),
    );
}

#[test]
fn criterion_10_coulomb_closed_forms() {
    let q = QuadratureSpec::default().with_tolerances(1e-14, 1e-12);
    let mut si = 0.0f64;
    for &d0 in &[0.5, 1.0, 2.0, 3.0] {
        for &x in &[0.0, 0.3, 1.1, 4.0, 9.5] {
            let exact = coulomb_resolution_image(1.0, d0, x).unwrap();
            let numeric =
                radial_ift_truncated(Dim::Three, |s| 1.0 / (PI * s * s), x, 1.0 / d0, &q).unwrap();
            si = si.max((exact - numeric).abs());
        }
    }
    let mut erf = 0.0f64;
    for &nu in &[0.05f64, 0.3, 1.0, 2.5] {
        for &x in &[0.0, 0.2, 1.2, 3.0, 7.0] {
            let exact = coulomb_blurred(1.0, nu, x).unwrap();
            let form = |s: f64| (-2.0 * PI * PI * nu * s * s).exp() / (PI * s * s);
            let numeric = radial_ift_truncated(Dim::Three, form, x, 8.0 / nu.sqrt(), &q).unwrap();
            erf = erf.max((exact - numeric).abs());
        }
    }
    let mut yukawa = 0.0f64;
    for &lambda in &[0.5f64, 1.0, 3.0] {
        let spec = QuadratureSpec::default()
            .with_cutoff(45.0 / lambda)
            .with_tolerances(1e-13, 1e-12);
        for &s in &[0.0, 0.25, 0.5, 1.5] {
            let f = |x: f64| {
                if x > 0.0 {
                    (-lambda * x).exp() / x
                } else {
                    0.0
                }
            };
            let numeric = radial_ft(Dim::Three, f, s, &spec).unwrap();
            yukawa = yukawa.max((yukawa_ft(1.0, lambda, s).unwrap() - numeric).abs());
        }
    }
    report(
        10,
        "Coulomb closed forms vs quadrature",
        si <= 1e-8 && erf <= 1e-6 && yukawa <= 1e-7,
        &format!("Si image {si:.2e}/1e-8 (20 pts), erf {erf:.2e}/1e-6 (20 pts), Yukawa {yukawa:.2e}/1e-7"),
    );
}

fn gradient_error(dim: Dim, x: f64, mu: f64, nu: f64) -> f64 {
    let g = omega_gradient(dim, x, mu, nu).unwrap();
    let f = |x: f64, mu: f64, nu: f64| omega_radial(dim, x, mu, nu).unwrap();
    let fd = |h: f64, e: &dyn Fn(f64) -> f64| (e(h) - e(-h)) / (2.0 * h);
    let numeric = [
        fd(1e-6 * x.max(1.0), &|h| f(x + h, mu, nu)),
        fd(1e-6 * mu.max(1.0), &|h| f(x, mu + h, nu)),
        fd(1e-6 * nu.max(1.0), &|h| f(x, mu, nu + h)),
    ];
    let scale = f(x, mu, nu) / nu * (1.0 + (x + mu) / nu.sqrt());
    [g.d_x, g.d_mu, g.d_nu]
        .iter()
        .zip(numeric)
        .map(|(a, b)| (a - b).abs() / b.abs().max(1e-4 * scale))
        .fold(0.0, f64::max)
}

#[test]
fn criterion_11_property_suite() {
    let mut failures = Vec::new();
    for dim in Dim::ALL {
        let n = dim.n() as i32;
        for (mu, nu) in [(0.5, 0.1), (2.0, 0.3), (3.0, 1.0)] {
            let v = omega_radial(dim, 0.0, mu, nu).unwrap();
            let expected = (2.0 * PI * nu).powf(-(n as f64) / 2.0) * (-mu * mu / (2.0 * nu)).exp();
            if ((v - expected) / expected).abs() > 1e-12 {
                failures.push(format!("origin N={n}"));
            }
        }
        for nu in [0.01, 0.1, 1.0] {
            for t in [1e-8, 1e-6, 1e-4, 1e-3] {
                let mu = 0.5;
                let x = t * nu / mu;
                let scaled = omega_radial(dim, x, mu, nu).unwrap()
                    * (2.0 * PI * nu).powf(n as f64 / 2.0)
                    * ((x * x + mu * mu) / (2.0 * nu)).exp();
                if (scaled - 1.0).abs() > t * t + 1e-15 {
                    failures.push(format!("small-t N={n} t={t}"));
                }
            }
        }
        let two = ShellModel::new(
            dim,
            vec![
                shellfield_core::ShellTerm {
                    kappa: 1.3,
                    mu: 0.0,
                    nu: 0.2,
                },
                shellfield_core::ShellTerm {
                    kappa: -0.4,
                    mu: 1.5,
                    nu: 0.05,
                },
            ],
            5.0,
            "p4",
        )
        .unwrap();
        for alpha in [0.5f64, 2.0, 3.7] {
            let scaled = two.rescale(alpha).unwrap();
            for x in [0.0, 0.4, 1.1, 2.9, 6.0] {
                let lhs = scaled.eval(x, None).unwrap() * alpha.powi(n);
                let rhs = two.eval(x / alpha, None).unwrap();
                if (lhs - rhs).abs() > 1e-12 * rhs.abs().max(1e-300) {
                    failures.push(format!("scaling N={n} alpha={alpha} x={x}"));
                }
            }
        }
        for mu in [0.0, 0.3, 1.0, 2.0] {
            for nu in [0.01, 0.1, 0.5] {
                let step = 1e-3 * f64::sqrt(nu);
                let count = ((mu + 10.0 * nu.sqrt()) / step) as usize;
                let values: Vec<f64> = (0..count)
                    .map(|i| omega_radial(dim, i as f64 * step, mu, nu).unwrap())
                    .collect();
                let rising: Vec<bool> = values
                    .windows(2)
                    .filter(|w| w[1] != w[0])
                    .map(|w| w[1] > w[0])
                    .collect();
                let changes = rising.windows(2).filter(|w| w[0] != w[1]).count();
                let r = peak_location(dim, mu, nu).unwrap();
                let interior = mu * mu > dim.nf() * nu;
                let consistent = match r.kind {
                    PeakKind::MonotoneDecreasing => !interior && rising.iter().all(|&up| !up),
                    PeakKind::InteriorPeak => {
                        let argmax = values
                            .iter()
                            .enumerate()
                            .max_by(|a, b| a.1.total_cmp(b.1))
                            .unwrap()
                            .0;
                        interior && (argmax as f64 * step - r.x_peak.unwrap()).abs() <= 2.0 * step
                    }
                };
                if changes > 1 || !consistent {
                    failures.push(format!("unimodality N={n} mu={mu} nu={nu}"));
                }
            }
        }
        for mu in [0.1, 0.5, 2.0, 10.0] {
            for nu in [0.01, 0.1, 1.0, 10.0] {
                let h = 1e-7 * mu;
                if omega_radial(dim, mu + h, mu, nu).unwrap()
                    >= omega_radial(dim, mu, mu, nu).unwrap()
                {
                    failures.push(format!("peak shift N={n} mu={mu} nu={nu}"));
                }
            }
        }
    }
    // Deterministic pseudo-random points.
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut uniform = |lo: f64, hi: f64| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        lo + (hi - lo) * (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut worst_gradient = 0.0f64;
    for i in 0..100 {
        let dim = Dim::ALL[i % 3];
        let (x, mu, nu) = (uniform(0.05, 5.0), uniform(0.0, 5.0), uniform(0.02, 2.0));
        worst_gradient = worst_gradient.max(gradient_error(dim, x, mu, nu));
    }
    if worst_gradient > 1e-6 {
        failures.push(format!("gradient rel err {worst_gradient:.2e}"));
    }
    report(
        11,
        "origin value, small-t limit, scaling, unimodality, peak shift and gradients",
        failures.is_empty(),
        &if failures.is_empty() {
            format!("all grids hold, worst gradient rel err {worst_gradient:.2e} at 100 points")
        } else {
            failures.join("; ")
        },
    );
}

#[test]
fn criterion_12_truncated_pi3() {
    let err = max_discrepancy(
        &bundled_table("pi3_interference").unwrap(),
        Some(21),
        interference(Dim::Three),
        10.0,
        0.005,
    );
    report(
        12,
        "pi3_interference first 21 terms vs pi3 on [0, 10]",
        err <= 1.2e-3,
        &format!("max {err:.3e} (bound 1.2e-3)"),
    );
}

#[test]
fn criterion_13_stability_at_huge_t() {
    let (mu, nu) = (10.0f64, 1e-6f64);
    let mut worst = 0.0f64;
    let mut finite = true;
    for x in [10.0, 10.0 + 1e-3, 10.0 - 1e-3] {
        let t = x * mu / nu;
        let a = (-(x - mu).powi(2) / (2.0 * nu)).exp();
        let b = (-(x + mu).powi(2) / (2.0 * nu)).exp();
        let oracles = [
            (Dim::One, (2.0 * PI * nu).powf(-0.5) * 0.5 * (a + b)),
            (
                Dim::Two,
                (2.0 * PI * nu).recip() * a * bessel_i0_scaled(t).unwrap(),
            ),
            (Dim::Three, (2.0 * PI * nu).powf(-1.5) * (a - b) / (2.0 * t)),
        ];
        for (dim, oracle) in oracles {
            let v = omega_radial(dim, x, mu, nu).unwrap();
            finite &= v.is_finite();
            let err = if oracle == 0.0 {
                v.abs()
            } else {
                ((v - oracle) / oracle).abs()
            };
            worst = worst.max(err);
        }
    }
    report(
        13,
        "omega_radial at x mu / nu = 1e8",
        finite && worst <= 1e-9,
        &format!("all finite: {finite}, max rel deviation from exponential forms {worst:.2e}"),
    );
}
