//! Test-only reference quadrature: composite Gauss–Legendre with nodes found
//! by Newton iteration on the Legendre recurrence. Shares no code with the
//! adaptive Gauss–Kronrod integrator it is used to check.

use std::f64::consts::PI;

pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, 0.0);
                for j in 0..n {
                    let p2 = p1;
                    p1 = p0;
                    p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
                }
                dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
                let dz = p0 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// ∫_a^b f over `panels` equal panels.
    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let mid = lo + 0.5 * h;
            let s: f64 = self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(&z, &w)| w * f(mid + 0.5 * h * z))
                .sum();
            total += 0.5 * h * s;
        }
        total
    }

    /// ∫ over consecutive breakpoints, each interval split into `panels`.
    pub fn integrate_breaks(&self, f: impl Fn(f64) -> f64, breaks: &[f64], panels: usize) -> f64 {
        breaks
            .windows(2)
            .map(|w| self.integrate(&f, w[0], w[1], panels))
            .sum()
    }
}

/// Geometric sequence from `lo` to `hi` with `n` points, inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Bisection on a sign change of `f` in [lo, hi].
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn gauss_legendre_integrates_polynomials_exactly() {
    let gl = GaussLegendre::new(16);
    let v = gl.integrate(|x| x.powi(31) + 3.0 * x * x, -1.0, 2.0, 1);
    let exact = (2f64.powi(32) - 1.0) / 32.0 + 9.0;
    assert!((v - exact).abs() < 1e-9 * exact);
}
