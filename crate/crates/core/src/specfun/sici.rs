use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::AccuracySpec;

/// Si(x): Taylor series up to x = 4, complex continued fraction for the
/// auxiliary functions f and g above.
pub fn sine_integral(x: f64) -> f64 {
    if x < 0.0 {
        return -sine_integral(-x);
    }
    if x == 0.0 {
        0.0
    } else if x <= 4.0 {
        si_series(x)
    } else {
        let (f, g) = auxiliary_fg(x);
        FRAC_PI_2 - f * x.cos() - g * x.sin()
    }
}

// Σ (−1)^k x^{2k+1} / ((2k+1)·(2k+1)!)
fn si_series(x: f64) -> f64 {
    let acc = AccuracySpec::DOUBLE;
    let x2 = x * x;
    let mut power = x; // (−1)^k x^{2k+1}/(2k+1)!
    let mut sum = x;
    for k in 1..acc.max_terms {
        let n = (2 * k) as f64;
        power *= -x2 / (n * (n + 1.0));
        let term = power / (n + 1.0);
        sum += term;
        if acc.converged(term, sum) {
            break;
        }
    }
    sum
}

/// Auxiliary functions with Si(x) = π/2 − f(x) cos x − g(x) sin x.
///
/// The continued fraction h = 1/(1+ix − 1²/(3+ix − 2²/(5+ix − ...))) equals
/// e^{ix}·E₁(ix) = g(x) − i·f(x); it converges quickly for x above about 2.
pub fn auxiliary_fg(x: f64) -> (f64, f64) {
    const TINY: f64 = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 2..1000 {
        let a = -((i - 1) * (i - 1)) as f64;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < 1e-16 {
            break;
        }
    }
    (-h.im, h.re)
}
