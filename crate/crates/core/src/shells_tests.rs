use std::f64::consts::PI;

use super::*;
use crate::oracle::GaussLegendre;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

// Closed forms with both Gaussians written out; N = 2 via the angular integral.
fn omega_direct(gl: &GaussLegendre, dim: Dim, x: f64, mu: f64, nu: f64) -> f64 {
    let g1 = |d: f64| (-d * d / (2.0 * nu)).exp() / (2.0 * PI * nu).sqrt();
    match dim {
        Dim::One => 0.5 * (g1(x - mu) + g1(x + mu)),
        Dim::Three => (g1(x - mu) - g1(x + mu)) / (4.0 * PI * x * mu),
        Dim::Two => {
            let t = x * mu / nu;
            let width = (1.0 / t.sqrt()).min(PI);
            let mut breaks = vec![0.0];
            let mut b = width / 64.0;
            while b < PI {
                breaks.push(b);
                b *= 2.0;
            }
            breaks.push(PI);
            let ang = gl.integrate_breaks(|th| (-t * (1.0 - th.cos())).exp(), &breaks, 2) / PI;
            (-(x - mu) * (x - mu) / (2.0 * nu)).exp() / (2.0 * PI * nu) * ang
        }
    }
}

#[test]
fn gaussian_examples() {
    let v = gaussian_radial(Dim::Three, 0.0, 1.0 / (2.0 * PI)).unwrap();
    assert!((v - 1.0).abs() < 1e-15);
    let v = gaussian_radial(Dim::One, 0.0, 0.5).unwrap();
    assert!((v - 0.564_189_583_5).abs() < 1e-10);
    assert!(matches!(
        gaussian_radial(Dim::Two, 1.0, 0.0),
        Err(Error::Domain { .. })
    ));
    assert!(matches!(
        gaussian_radial(Dim::Two, 1.0, -1.0),
        Err(Error::Domain { .. })
    ));
}

#[test]
fn interference_examples() {
    let v3 = interference_radial(Dim::Three, 0.0).unwrap();
    assert!((v3 - 4.188_790_204_8).abs() < 1e-10);
    assert_eq!(v3, Dim::Three.unit_ball_volume());
    assert_eq!(interference_radial(Dim::Two, 0.0).unwrap(), PI);
    assert_eq!(interference_radial(Dim::One, 0.0).unwrap(), 2.0);
    assert!((interference_radial(Dim::One, 0.25).unwrap() - 1.273_239_544_7).abs() < 1e-10);
    assert!(interference_radial(Dim::One, 0.5).unwrap().abs() < 1e-15);
}

#[test]
fn interference_taylor_branch_is_continuous() {
    // u = 2πx = 1e-2 boundary
    let x = 1e-2 / (2.0 * PI);
    for xx in [x * (1.0 - 1e-9), x * (1.0 + 1e-9)] {
        let u = 2.0 * PI * xx;
        let direct = 4.0 * PI * (u.sin() - u * u.cos()) / (u * u * u);
        let v = interference_radial(Dim::Three, xx).unwrap();
        assert!(rel(v, direct) < 1e-9, "{v} vs {direct}");
    }
}

#[test]
fn omega_examples() {
    let (x, nu) = (1.3, 0.2);
    assert_eq!(
        omega_radial(Dim::Three, x, 0.0, nu).unwrap(),
        gaussian_radial(Dim::Three, x, nu).unwrap()
    );
    for dim in Dim::ALL {
        assert_eq!(
            omega_radial(dim, 0.7, 0.0, 0.3).unwrap(),
            gaussian_radial(dim, 0.7, 0.3).unwrap()
        );
    }
    let v = omega_radial(Dim::Three, 0.0, 1.0, 0.5).unwrap();
    let expected = (2.0 * PI * 0.5f64).powf(-1.5) * (-1.0f64).exp();
    assert!(rel(v, expected) < 1e-14);
    assert!((v - 0.066_066_4).abs() < 1e-7);
    assert!(matches!(
        omega_radial(Dim::One, 1.0, 1.0, 0.0),
        Err(Error::Domain { .. })
    ));
}

#[test]
fn property1_origin_value() {
    for dim in Dim::ALL {
        for (mu, nu) in [(0.5, 0.1), (2.0, 0.3), (3.0, 1.0)] {
            let v = omega_radial(dim, 0.0, mu, nu).unwrap();
            let expected = (2.0 * PI * nu).powf(-dim.nf() / 2.0) * (-mu * mu / (2.0 * nu)).exp();
            assert!(rel(v, expected) < 1e-13);
        }
        assert!(omega_radial(dim, 1e3, 2.0, 0.1).unwrap() == 0.0);
    }
}

#[test]
fn property2_small_argument_regime() {
    for dim in Dim::ALL {
        for nu in [0.01, 0.1, 1.0] {
            for t in [1e-8, 1e-6, 1e-5, 1e-4, 5e-4, 1e-3] {
                let mu = 0.5;
                let x = t * nu / mu;
                let v = omega_radial(dim, x, mu, nu).unwrap();
                let envelope =
                    (2.0 * PI * nu).powf(dim.nf() / 2.0) * ((x * x + mu * mu) / (2.0 * nu)).exp();
                assert!((v * envelope - 1.0).abs() <= t * t + 1e-15, "N={dim} t={t}");
            }
        }
    }
}

#[test]
fn branch_continuity_in_crossover_band() {
    let gl = GaussLegendre::new(32);
    for dim in Dim::ALL {
        for t in [1e-5, 5e-5, 9.9e-5, 1e-4, 1.01e-4, 2e-4, 1e-3] {
            let (mu, nu) = (1.0, 0.2);
            let x = t * nu / mu;
            let fast = omega(dim, x, mu, nu);
            let d = x - mu;
            let bracketed = norm(dim, nu) * (-d * d / (2.0 * nu)).exp() * bracket(dim, t);
            let expansion =
                norm(dim, nu) * (-(x * x + mu * mu) / (2.0 * nu)).exp() * small_t_factor(dim, t);
            assert!(rel(bracketed, expansion) < 1e-10, "N={dim} t={t}");
            assert!(rel(fast, omega_direct(&gl, dim, x, mu, nu)) < 1e-10);
        }
    }
}

#[test]
fn closed_forms_agree_with_direct_expressions() {
    let gl = GaussLegendre::new(32);
    for dim in Dim::ALL {
        for &(x, mu, nu) in &[
            (0.3, 1.0, 0.2),
            (1.9, 2.0, 0.05),
            (2.5, 2.0, 0.5),
            (5.0, 0.1, 3.0),
        ] {
            let v = omega_radial(dim, x, mu, nu).unwrap();
            assert!(
                rel(v, omega_direct(&gl, dim, x, mu, nu)) < 1e-11,
                "N={dim} {x} {mu} {nu}"
            );
        }
    }
}

#[test]
fn no_overflow_for_huge_t() {
    for dim in Dim::ALL {
        let v = omega_radial(dim, 50.0, 50.0, 1e-6).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }
}

#[test]
fn stable_at_t_1e8() {
    let gl = GaussLegendre::new(32);
    for dim in Dim::ALL {
        // x = μ = 10, ν = 1e-6 gives t = 1e8
        for &x in &[10.0, 10.001, 9.999] {
            let (mu, nu) = (10.0, 1e-6);
            let v = omega_radial(dim, x, mu, nu).unwrap();
            assert!(v.is_finite());
            let o = omega_direct(&gl, dim, x, mu, nu);
            assert!(rel(v, o) < 1e-9, "N={dim} x={x}: {v} vs {o}");
        }
    }
}

#[test]
fn property4_rescaling() {
    for dim in Dim::ALL {
        for alpha in [0.5, 2.0, 3.7] {
            for &(x, mu, nu) in &[(0.4, 1.0, 0.1), (2.2, 2.0, 0.05), (0.0, 0.5, 0.3)] {
                let lhs = omega_radial(dim, x / alpha, mu, nu).unwrap();
                let rhs = alpha.powi(dim.n() as i32)
                    * omega_radial(dim, x, alpha * mu, alpha * alpha * nu).unwrap();
                assert!(rel(rhs, lhs) < 1e-12);
            }
        }
    }
}

#[test]
fn gradient_examples() {
    for dim in Dim::ALL {
        let g = omega_gradient(dim, 0.0, 1.3, 0.2).unwrap();
        assert_eq!(g.d_x, 0.0);
    }
    let g = omega_gradient(Dim::Three, 2.0, 2.0, 0.1).unwrap();
    assert!(g.d_x < 0.0);
    assert!(omega_gradient(Dim::Two, 1.0, 1.0, 0.0).is_err());
}

fn finite_difference(dim: Dim, x: f64, mu: f64, nu: f64) -> [f64; 3] {
    let fd = |f: &dyn Fn(f64) -> f64, p: f64| {
        let h = 1e-6 * p.abs().max(1.0);
        (f(p + h) - f(p - h)) / (2.0 * h)
    };
    [
        fd(&|v| omega(dim, v, mu, nu), x),
        fd(&|v| omega(dim, x, v, nu), mu),
        fd(&|v| omega(dim, x, mu, v), nu),
    ]
}

fn assert_gradient_matches(dim: Dim, x: f64, mu: f64, nu: f64, tol: f64) {
    let g = omega_gradient(dim, x, mu, nu).unwrap();
    let fd = finite_difference(dim, x, mu, nu);
    let scale = omega(dim, x, mu, nu) * (1.0 / nu) * (1.0 + (x + mu) / nu.sqrt());
    for (a, b) in [g.d_x, g.d_mu, g.d_nu].into_iter().zip(fd) {
        // relative to the component, with a floor for near-zero components
        let err = (a - b).abs() / b.abs().max(1e-4 * scale);
        assert!(err <= tol, "N={dim} ({x}, {mu}, {nu}): analytic {a} fd {b}");
    }
}

#[test]
fn gradient_matches_finite_differences() {
    assert_gradient_matches(Dim::Two, 1.7, 2.3, 0.08, 1e-6);
    for dim in Dim::ALL {
        for &(x, mu, nu) in &[
            (0.5, 0.0, 0.2),
            (1.0, 1.0, 0.3),
            (0.01, 2.0, 0.5),
            (3.0, 2.0, 1.0),
        ] {
            assert_gradient_matches(dim, x, mu, nu, 1e-6);
        }
    }
}

#[test]
fn gradient_matches_finite_differences_at_random_points() {
    use proptest::strategy::{Strategy, ValueTree};
    use proptest::test_runner::TestRunner;
    let mut runner = TestRunner::deterministic();
    let strat = (0usize..3, 0.05f64..5.0, 0.0f64..5.0, 0.02f64..2.0);
    for _ in 0..100 {
        let (d, x, mu, nu) = strat.new_tree(&mut runner).unwrap().current();
        assert_gradient_matches(Dim::ALL[d], x, mu, nu, 1e-6);
    }
}

#[test]
fn property6_unimodality_and_peak_report() {
    for dim in Dim::ALL {
        let r = peak_location(dim, 0.0, 0.3).unwrap();
        assert_eq!(r.kind, PeakKind::MonotoneDecreasing);
        assert!(r.x_peak.is_none() && r.value_at_peak.is_none());
        // boundary μ² = Nν
        let (mu, nu) = [(0.5, 0.25), (1.0, 0.5), (1.5, 0.75)][dim.n() as usize - 1];
        assert_eq!(mu * mu / nu, dim.nf());
        let r = peak_location(dim, mu, nu).unwrap();
        assert_eq!(r.kind, PeakKind::MonotoneDecreasing);
    }
    let r = peak_location(Dim::Three, 2.0, 0.01).unwrap();
    assert_eq!(r.kind, PeakKind::InteriorPeak);
    let xp = r.x_peak.unwrap();
    assert!(xp > 0.0 && xp < 2.0);
    let (mut best_x, mut best_v) = (0.0, f64::MIN);
    for i in 0..=40_000 {
        let x = i as f64 * 1e-4;
        let v = omega(Dim::Three, x, 2.0, 0.01);
        if v > best_v {
            best_v = v;
            best_x = x;
        }
    }
    assert!((best_x - xp).abs() < 2e-4);
    assert!(r.value_at_peak.unwrap() >= best_v * (1.0 - 1e-12));
    assert!(peak_location(Dim::One, 1.0, 0.0).is_err());
}

#[test]
fn unimodality_on_sampled_profiles() {
    for dim in Dim::ALL {
        for mu in [0.0, 0.3, 0.5, 1.0, 2.0] {
            for nu in [0.01, 0.1, 0.5] {
                let step = 1e-3 * f64::sqrt(nu);
                let n = ((mu + 10.0 * nu.sqrt()) / step) as usize;
                let values: Vec<f64> = (0..n)
                    .map(|i| omega(dim, i as f64 * step, mu, nu))
                    .collect();
                let signs: Vec<bool> = values
                    .windows(2)
                    .filter(|w| w[1] != w[0])
                    .map(|w| w[1] > w[0])
                    .collect();
                let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
                assert!(
                    changes <= 1,
                    "N={dim} mu={mu} nu={nu}: {changes} sign changes"
                );
                let report = peak_location(dim, mu, nu).unwrap();
                match report.kind {
                    PeakKind::MonotoneDecreasing => assert!(signs.iter().all(|&up| !up)),
                    PeakKind::InteriorPeak => {
                        let argmax = values
                            .iter()
                            .enumerate()
                            .max_by(|a, b| a.1.total_cmp(b.1))
                            .unwrap()
                            .0;
                        assert!(
                            (argmax as f64 * step - report.x_peak.unwrap()).abs() <= 2.0 * step
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn property7_decreasing_at_mu() {
    for dim in Dim::ALL {
        for mu in [0.1, 0.5, 2.0, 10.0] {
            for nu in [0.001, 0.01, 0.1, 1.0, 10.0] {
                let g = omega_gradient(dim, mu, mu, nu).unwrap().d_x;
                // For N = 1 the slope at x = μ is of order e^{−2μ²/ν}, below f64 range past t ≈ 350.
                if dim == Dim::One && mu * mu / nu > 350.0 {
                    assert!(g <= 0.0);
                    continue;
                }
                let h = 1e-7 * mu;
                assert!(
                    omega(dim, mu + h, mu, nu) < omega(dim, mu, mu, nu),
                    "N={dim} {mu} {nu}"
                );
                assert!(g < 0.0, "N={dim} {mu} {nu} {g}");
            }
        }
    }
}

#[test]
fn chi_limits() {
    for dim in Dim::ALL {
        assert_eq!(chi(dim, 0.0), 1.0 / dim.nf());
        assert!((chi(dim, 1e-6) - 1.0 / dim.nf()).abs() < 1e-9);
        let t = 500.0;
        assert!((chi(dim, t) * t - 1.0).abs() < 0.01);
        let mut prev = chi(dim, 0.0);
        for i in 1..200 {
            let c = chi(dim, i as f64 * 0.1);
            assert!(c < prev);
            prev = c;
        }
    }
}

fn two_term_model(dim: Dim) -> ShellModel {
    ShellModel::new(
        dim,
        vec![
            ShellTerm::new(1.5, 0.0, 0.2).unwrap(),
            ShellTerm::new(-0.7, 1.2, 0.05).unwrap(),
        ],
        4.0,
        "test",
    )
    .unwrap()
}

#[test]
fn shell_model_invariants() {
    assert!(ShellModel::new(Dim::One, vec![], 1.0, "").is_err());
    assert!(ShellTerm::new(1.0, -0.1, 1.0).is_err());
    assert!(ShellTerm::new(f64::NAN, 0.1, 1.0).is_err());
    assert!(ShellTerm::new(1.0, 0.1, 0.0).is_err());
    let m = two_term_model(Dim::Three);
    assert!(ShellModel::new(Dim::One, m.terms().to_vec(), 0.0, "").is_err());
    assert!(m.eval(1.0, Some(0)).is_err());
    assert!(m.eval(1.0, Some(3)).is_err());
    let single = ShellModel::new(
        Dim::Two,
        vec![ShellTerm::new(1.0, 0.8, 0.1).unwrap()],
        3.0,
        "",
    )
    .unwrap();
    for x in [0.0, 0.5, 0.8, 2.0] {
        assert_eq!(
            single.eval(x, None).unwrap(),
            omega_radial(Dim::Two, x, 0.8, 0.1).unwrap()
        );
    }
    assert_eq!(
        m.eval(0.6, Some(1)).unwrap(),
        1.5 * omega(Dim::Three, 0.6, 0.0, 0.2)
    );
}

#[test]
fn convolution_shifts_widths_only() {
    let m = two_term_model(Dim::Two);
    assert_eq!(m.convolve_with_gaussian(0.0).unwrap(), m);
    let c = m.convolve_with_gaussian(0.03).unwrap();
    for (a, b) in m.terms().iter().zip(c.terms()) {
        assert_eq!(a.kappa, b.kappa);
        assert_eq!(a.mu, b.mu);
        assert_eq!(b.nu, a.nu + 0.03);
    }
    assert!(matches!(
        m.convolve_with_gaussian(-1e-3),
        Err(Error::Domain { .. })
    ));
    // Fourier-space factorization
    for dim in Dim::ALL {
        for s in [0.0, 0.3, 1.1, 2.5] {
            let lhs = omega_fourier_radial(dim, s, 2.0, 0.05 + 0.03).unwrap();
            let rhs =
                omega_fourier_radial(dim, s, 2.0, 0.05).unwrap() * gaussian_transform(s, 0.03);
            assert!((lhs - rhs).abs() <= 1e-14 * lhs.abs());
        }
    }
}

#[test]
fn fourier_examples() {
    for dim in Dim::ALL {
        assert_eq!(omega_fourier_radial(dim, 0.0, 1.7, 0.2).unwrap(), 1.0);
    }
    let (s, mu) = (0.3, 2.0);
    let limit = omega_fourier_radial(Dim::Three, s, mu, 1e-300).unwrap();
    assert!((limit - raw::sinc(2.0 * PI * mu * s)).abs() < 1e-15);
}

#[test]
fn rescale_identity() {
    for dim in Dim::ALL {
        let m = two_term_model(dim);
        assert_eq!(m.rescale(1.0).unwrap(), m);
        for alpha in [0.5, 2.0, 3.7] {
            let r = m.rescale(alpha).unwrap();
            assert_eq!(r.x_max(), alpha * m.x_max());
            for x in [0.0, 0.5, 3.0, 10.0] {
                let lhs = r.eval(x, None).unwrap() * alpha.powi(dim.n() as i32);
                let rhs = m.eval(x / alpha, None).unwrap();
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-200),
                    "{lhs} {rhs}"
                );
            }
        }
    }
    assert!(two_term_model(Dim::One).rescale(0.0).is_err());
}

#[test]
fn evaluation_is_order_independent() {
    let m = two_term_model(Dim::Three);
    let mut rev = m.terms().to_vec();
    rev.reverse();
    let r = ShellModel::new(Dim::Three, rev, 4.0, "").unwrap();
    for x in [0.0, 0.4, 1.2, 3.3] {
        assert!((m.eval(x, None).unwrap() - r.eval(x, None).unwrap()).abs() < 1e-15);
    }
}

#[test]
fn dim_serializes_as_integer() {
    assert_eq!(serde_json::to_string(&Dim::Two).unwrap(), "2");
    assert_eq!(serde_json::from_str::<Dim>("3").unwrap(), Dim::Three);
    assert!(serde_json::from_str::<Dim>("4").is_err());
}
