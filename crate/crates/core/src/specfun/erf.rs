use std::f64::consts::PI;

use super::AccuracySpec;

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Below this the positive-term series is used, above it the continued fraction for erfc.
const SWITCH: f64 = 2.5;

pub fn erf(x: f64) -> f64 {
    if x < 0.0 {
        return -erf(-x);
    }
    if x < SWITCH {
        erf_series(x)
    } else if x > 6.0 {
        1.0
    } else {
        1.0 - erfc_cf(x)
    }
}

pub fn erfc(x: f64) -> f64 {
    if x < SWITCH {
        1.0 - erf(x)
    } else if x > 27.3 {
        0.0
    } else {
        erfc_cf(x)
    }
}

// erf(x) = 2x/√π · e^{−x²} · Σ (2x²)^n / (1·3·5···(2n+1)); every term is positive.
fn erf_series(x: f64) -> f64 {
    let acc = AccuracySpec::DOUBLE;
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..acc.max_terms {
        term *= 2.0 * x2 / (2 * n + 1) as f64;
        sum += term;
        if acc.converged(term, sum) {
            break;
        }
    }
    FRAC_2_SQRT_PI * x * (-x2).exp() * sum
}

// erfc(x) = e^{−x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), modified Lentz.
fn erfc_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}
