//! Decomposition of oscillating radial profiles into weighted shell sums:
//! ripple detection, per-ripple initialization and L-BFGS refinement.

pub mod lbfgs;
mod tables;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rfourier::RadialProfile;
use crate::shells::{omega, omega_with_gradient, Dim, ShellModel, ShellTerm};
use lbfgs::{minimize, LbfgsOptions, Termination};

pub use tables::{bundled_table, published_max_error, TABLE_NAMES};

/// Smallest initial width ν.
pub const NU_FLOOR: f64 = 1e-6;

// Terms are ignored where (x − μ)²/2ν exceeds this; every Ω̄_N is bounded by
// its Gaussian envelope, so the neglected part is below e^{−40} of the peak.
const WINDOW_EXPONENT: f64 = 40.0;

// Ridge on the normal equations for the weights while the shapes move, and
// for the final solve, relative to the largest diagonal entry.
const RIDGE: f64 = 1e-9;
const FINAL_RIDGE: f64 = 1e-14;

// Samples smaller than this fraction of the largest one count as zeros.
const ZERO_FLOOR: f64 = 1e-12;

/// One same-sign lobe of a radial profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ripple {
    pub x_lo: f64,
    pub x_hi: f64,
    pub x_ext: f64,
    pub value_ext: f64,
    pub sign: i8,
    /// Full width of the lobe at half its extremal value.
    pub fwhm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    Uniform,
    /// Weight x^{N−1}, proportional to the shell volume at radius x.
    Radial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualStrategy {
    OneTermPerRipple,
    AddUntilAccuracy { target: f64, max_terms: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub grid_step: f64,
    pub weight_mode: WeightMode,
    pub max_iterations: usize,
    pub gradient_tol: f64,
    /// Relative stall test, measured against the objective of the empty
    /// model. Set to 0 to run exact-recovery fits to a stationary point.
    pub objective_tol: f64,
    pub residual_strategy: ResidualStrategy,
}

impl FitConfig {
    /// Defaults for a target on [0, x_max]: grid step x_max/4000.
    pub fn for_range(x_max: f64) -> Self {
        FitConfig {
            grid_step: x_max / 4000.0,
            weight_mode: WeightMode::Uniform,
            max_iterations: 4000,
            gradient_tol: 1e-13,
            objective_tol: 1e-12,
            residual_strategy: ResidualStrategy::OneTermPerRipple,
        }
    }

    pub fn validate(&self, x_max: f64) -> Result<()> {
        if !(self.grid_step > 0.0 && self.grid_step <= x_max / 100.0 * (1.0 + 1e-12)) {
            return Err(Error::Argument(format!(
                "grid_step {} must be positive and at most x_max/100 = {}",
                self.grid_step,
                x_max / 100.0
            )));
        }
        if !(self.gradient_tol > 0.0) {
            return Err(Error::Argument("gradient_tol must be positive".into()));
        }
        if !(self.objective_tol >= 0.0) {
            return Err(Error::Argument("objective_tol must be non-negative".into()));
        }
        if let ResidualStrategy::AddUntilAccuracy { target, max_terms } = self.residual_strategy {
            if !(target > 0.0) || max_terms == 0 {
                return Err(Error::Argument(
                    "accuracy target and term budget must be positive".into(),
                ));
            }
        }
        Ok(())
    }

    /// Samples `f` on [0, x_max] with the configured step, adjusted to land
    /// on x_max exactly.
    pub fn sample_target(
        &self,
        dim: Dim,
        x_max: f64,
        f: impl Fn(f64) -> f64,
    ) -> Result<RadialProfile> {
        self.validate(x_max)?;
        let intervals = (x_max / self.grid_step).round().max(1.0) as usize;
        let step = x_max / intervals as f64;
        crate::rfourier::sample_profile(f, 0.0, step, intervals + 1, dim)
    }
}

/// Largest residual inside one ripple bracket of the target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RippleError {
    pub x_lo: f64,
    pub x_hi: f64,
    pub max_abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub max_abs_error: f64,
    /// Weighted root-mean-square residual.
    pub rms_error: f64,
    pub iterations: usize,
    pub converged: bool,
    pub termination: Termination,
    pub objective: f64,
    /// Objective at the start and after every accepted step of the last refinement.
    pub objective_history: Vec<f64>,
    pub per_ripple_errors: Vec<RippleError>,
}

/// Splits a profile into same-sign lobes.
///
/// Lobes are separated by sign changes; the extremum of each lobe is the grid
/// argmax of |f| refined by a parabola through its neighbours. When the
/// profile crosses zero at least once and is still oscillating at the end of
/// the grid, with the last lobe past its extremum, one more lobe just beyond
/// the grid is extrapolated from the last two; its tail reaches back into
/// the range.
pub fn detect_ripples(target: &RadialProfile) -> Vec<Ripple> {
    let v = &target.values;
    let n = v.len();
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if peak == 0.0 {
        return Vec::new();
    }
    let floor = ZERO_FLOOR * peak;
    let sgn = |x: f64| -> i8 {
        if x > floor {
            1
        } else if x < -floor {
            -1
        } else {
            0
        }
    };

    // Runs as (first index, last index, sign, x_lo, x_hi).
    let mut runs: Vec<(usize, usize, i8, f64, f64)> = Vec::new();
    let mut start = 0;
    let mut sign = 0i8;
    let mut last_nonzero = 0;
    let mut x_lo = target.x0;
    for i in 0..n {
        let s = sgn(v[i]);
        if s == 0 {
            continue;
        }
        if sign == 0 {
            sign = s;
        } else if s != sign {
            let (xa, xb) = (target.x(last_nonzero), target.x(i));
            let (fa, fb) = (v[last_nonzero].abs(), v[i].abs());
            let crossing = xa + (xb - xa) * fa / (fa + fb);
            runs.push((start, last_nonzero, sign, x_lo, crossing));
            start = i;
            sign = s;
            x_lo = crossing;
        }
        last_nonzero = i;
    }
    runs.push((start, n - 1, sign, x_lo, target.x_end()));

    let mut ripples: Vec<Ripple> = runs
        .iter()
        .map(|&(a, b, sign, x_lo, x_hi)| {
            let mut k = a;
            for i in a..=b {
                if v[i].abs() > v[k].abs() {
                    k = i;
                }
            }
            let (x_ext, value_ext) = refine_extremum(target, k);
            let fwhm = half_max_width(target, a, b, k, x_lo, x_hi);
            Ripple {
                x_lo,
                x_hi,
                x_ext: x_ext.clamp(x_lo, x_hi),
                value_ext,
                sign,
                fwhm,
            }
        })
        .collect();

    let last_run = runs[runs.len() - 1];
    if runs.len() >= 2 {
        let last = ripples[ripples.len() - 1];
        let prev = ripples[ripples.len() - 2];
        let spacing = last.x_lo - prev.x_lo;
        let slope = (v[n - 1] - v[n - 2]) / target.step;
        let ext = last.value_ext.abs();
        let decaying = v[n - 1].abs() < 0.9 * ext && last_run.1 == n - 1;
        let oscillating =
            v[n - 1].abs() + slope.abs() * spacing / std::f64::consts::PI >= 0.05 * ext;
        if decaying && oscillating {
            let x_lo = last.x_lo + spacing;
            let ratio = (last.value_ext / prev.value_ext).abs().min(1.0);
            ripples.push(Ripple {
                x_lo,
                x_hi: x_lo + spacing,
                x_ext: x_lo + 0.5 * spacing,
                value_ext: -last.value_ext * ratio,
                sign: -last.sign,
                fwhm: last.fwhm,
            });
        }
    }
    ripples
}

fn refine_extremum(p: &RadialProfile, k: usize) -> (f64, f64) {
    let v = &p.values;
    let n = v.len();
    if k == 0 && p.x0 == 0.0 {
        // Even extension: the origin is a stationary point.
        return (0.0, v[0]);
    }
    if k == 0 || k == n - 1 {
        return (p.x(k), v[k]);
    }
    let (a, b, c) = (v[k - 1], v[k], v[k + 1]);
    let curv = a - 2.0 * b + c;
    if curv == 0.0 {
        return (p.x(k), b);
    }
    let delta = (0.5 * (a - c) / curv).clamp(-0.5, 0.5);
    (p.x(k) + delta * p.step, b - 0.25 * (a - c) * delta)
}

// Width of the lobe at half its grid extremum, mirrored where the lobe meets
// the origin and falling back to the bracket width where no half-level is found.
fn half_max_width(p: &RadialProfile, a: usize, b: usize, k: usize, x_lo: f64, x_hi: f64) -> f64 {
    let v = &p.values;
    let half = 0.5 * v[k].abs();
    let cross = |i: usize, j: usize| -> f64 {
        let (fi, fj) = (v[i].abs(), v[j].abs());
        p.x(i) + (p.x(j) - p.x(i)) * (fi - half) / (fi - fj)
    };
    let left = (a..k)
        .rev()
        .find(|&i| v[i].abs() < half)
        .map(|i| p.x(k) - cross(i + 1, i));
    let right = (k + 1..=b)
        .find(|&i| v[i].abs() < half)
        .map(|i| cross(i - 1, i) - p.x(k));
    match (left, right) {
        (Some(l), Some(r)) => l + r,
        (None, Some(r)) => 2.0 * r,
        (Some(l), None) => 2.0 * l,
        (None, None) if k == 0 && p.x0 == 0.0 => 2.0 * (x_hi - x_lo),
        (None, None) => x_hi - x_lo,
    }
}

/// Gaussian width ν whose full width at half maximum is `fwhm`.
fn nu_from_fwhm(fwhm: f64) -> f64 {
    let sigma = fwhm / (8.0 * std::f64::consts::LN_2).sqrt();
    (sigma * sigma).max(NU_FLOOR)
}

fn term_for_ripple(dim: Dim, r: &Ripple) -> ShellTerm {
    let mu = r.x_ext.max(0.0);
    let nu = nu_from_fwhm(r.fwhm);
    let shape = omega(dim, mu, mu, nu);
    ShellTerm {
        kappa: r.value_ext / shape,
        mu,
        nu,
    }
}

/// One term per ripple: μ at the extremum, ν matching the lobe's half-maximum
/// width and κ reproducing the extremal value.
pub fn init_terms(dim: Dim, ripples: &[Ripple]) -> Result<ShellModel> {
    if ripples.is_empty() {
        return Err(Error::Argument("no ripples to initialize from".into()));
    }
    let terms = ripples.iter().map(|r| term_for_ripple(dim, r)).collect();
    let x_max = ripples.iter().map(|r| r.x_hi).fold(0.0, f64::max);
    ShellModel::new(dim, terms, x_max, "initial")
}

struct Objective<'a> {
    dim: Dim,
    target: &'a RadialProfile,
    weights: Vec<f64>,
}

struct TermWindow {
    start: usize,
    values: Vec<(f64, f64, f64)>,
}

impl<'a> Objective<'a> {
    fn new(dim: Dim, target: &'a RadialProfile, mode: WeightMode) -> Self {
        let raw: Vec<f64> = match mode {
            WeightMode::Uniform => vec![1.0; target.len()],
            WeightMode::Radial => (0..target.len())
                .map(|i| target.x(i).abs().powi(dim.n() as i32 - 1))
                .collect(),
        };
        let total: f64 = raw.iter().sum();
        Objective {
            dim,
            target,
            weights: raw.into_iter().map(|w| w / total).collect(),
        }
    }

    /// Objective of the empty model, the natural scale of the problem.
    fn zero_level(&self) -> f64 {
        0.5 * self
            .target
            .values
            .iter()
            .zip(&self.weights)
            .map(|(y, w)| w * y * y)
            .sum::<f64>()
    }

    fn window(&self, mu: f64, nu: f64) -> (usize, usize) {
        let p = self.target;
        let half = (2.0 * WINDOW_EXPONENT * nu).sqrt();
        let lo = ((mu - half - p.x0) / p.step).ceil().max(0.0);
        let hi = ((mu + half - p.x0) / p.step)
            .floor()
            .min((p.len() - 1) as f64);
        if hi < lo {
            return (1, 0);
        }
        (lo as usize, hi as usize)
    }

    fn unpack(p: &[f64]) -> impl Iterator<Item = ShellTerm> + '_ {
        p.chunks_exact(3).map(|c| ShellTerm {
            kappa: c[0],
            mu: c[1].abs(),
            nu: c[2].exp(),
        })
    }

    fn pack(model: &ShellModel) -> Vec<f64> {
        model
            .terms()
            .iter()
            .flat_map(|t| [t.kappa, t.mu, t.nu.ln()])
            .collect()
    }

    fn model_values(
        &self,
        terms: &[ShellTerm],
        with_gradient: bool,
    ) -> (Vec<f64>, Vec<TermWindow>) {
        let windows: Vec<TermWindow> = terms
            .par_iter()
            .map(|t| {
                let (lo, hi) = self.window(t.mu, t.nu);
                let values = (lo..=hi)
                    .map(|i| {
                        let x = self.target.x(i);
                        if with_gradient {
                            let (v, g) = omega_with_gradient(self.dim, x, t.mu, t.nu);
                            (v, g.d_mu, g.d_nu)
                        } else {
                            (omega(self.dim, x, t.mu, t.nu), 0.0, 0.0)
                        }
                    })
                    .collect();
                TermWindow { start: lo, values }
            })
            .collect();
        let mut model = vec![0.0; self.target.len()];
        for (t, w) in terms.iter().zip(&windows) {
            for (j, v) in w.values.iter().enumerate() {
                model[w.start + j] += t.kappa * v.0;
            }
        }
        (model, windows)
    }

    fn residuals(&self, terms: &[ShellTerm]) -> Vec<f64> {
        let (model, _) = self.model_values(terms, false);
        model
            .iter()
            .zip(&self.target.values)
            .map(|(m, y)| m - y)
            .collect()
    }

    fn value_and_gradient(&self, p: &[f64], grad: &mut [f64]) -> f64 {
        let terms: Vec<ShellTerm> = Self::unpack(p).collect();
        let (model, windows) = self.model_values(&terms, true);
        let mut f = 0.0;
        let wr: Vec<f64> = model
            .iter()
            .zip(&self.target.values)
            .zip(&self.weights)
            .map(|((m, y), w)| {
                let r = m - y;
                f += 0.5 * w * r * r;
                w * r
            })
            .collect();
        for (m, (t, win)) in terms.iter().zip(&windows).enumerate() {
            let (mut gk, mut gm, mut gn) = (0.0, 0.0, 0.0);
            for (j, &(v, dmu, dnu)) in win.values.iter().enumerate() {
                let r = wr[win.start + j];
                gk += r * v;
                gm += r * dmu;
                gn += r * dnu;
            }
            grad[3 * m] = gk;
            grad[3 * m + 1] = t.kappa * gm * if p[3 * m + 1] < 0.0 { -1.0 } else { 1.0 };
            grad[3 * m + 2] = t.kappa * t.nu * gn;
        }
        f
    }

    /// Objective minimized over the weights κ for fixed (μ, ln ν) per term,
    /// with its gradient in those variables and the optimal weights.
    ///
    /// The weights solve the normal equations (ΦᵀWΦ + λI)κ = ΦᵀWy, with λ
    /// the given fraction of the largest diagonal entry. The ridge term is
    /// part of the objective, so its gradient needs no derivative of κ.
    fn projected(&self, theta: &[f64], ridge: f64, grad: &mut [f64]) -> (f64, Vec<f64>) {
        let m = theta.len() / 2;
        let mut terms: Vec<ShellTerm> = theta
            .chunks_exact(2)
            .map(|c| ShellTerm {
                kappa: 0.0,
                mu: c[0].abs(),
                nu: c[1].exp(),
            })
            .collect();
        let (_, windows) = self.model_values(&terms, true);
        let y = &self.target.values;

        let mut gram = vec![0.0; m * m];
        let mut rhs = vec![0.0; m];
        for a in 0..m {
            let wa = &windows[a];
            let end_a = wa.start + wa.values.len();
            rhs[a] = wa
                .values
                .iter()
                .enumerate()
                .map(|(j, v)| self.weights[wa.start + j] * v.0 * y[wa.start + j])
                .sum();
            for b in a..m {
                let wb = &windows[b];
                let lo = wa.start.max(wb.start);
                let hi = end_a.min(wb.start + wb.values.len());
                let mut acc = 0.0;
                for i in lo..hi {
                    acc += self.weights[i] * wa.values[i - wa.start].0 * wb.values[i - wb.start].0;
                }
                gram[a * m + b] = acc;
                gram[b * m + a] = acc;
            }
        }
        let ridge = ridge
            * (0..m)
                .map(|a| gram[a * m + a])
                .fold(0.0, f64::max)
                .max(f64::MIN_POSITIVE);
        for a in 0..m {
            gram[a * m + a] += ridge;
        }
        let kappa = match cholesky_solve(&mut gram, &rhs, m) {
            Some(k) => k,
            None => {
                grad.iter_mut().for_each(|g| *g = f64::NAN);
                return (f64::NAN, vec![0.0; m]);
            }
        };
        for (t, k) in terms.iter_mut().zip(&kappa) {
            t.kappa = *k;
        }

        let mut model = vec![0.0; y.len()];
        for (t, w) in terms.iter().zip(&windows) {
            for (j, v) in w.values.iter().enumerate() {
                model[w.start + j] += t.kappa * v.0;
            }
        }
        let mut f = 0.5 * ridge * kappa.iter().map(|k| k * k).sum::<f64>();
        let wr: Vec<f64> = model
            .iter()
            .zip(y)
            .zip(&self.weights)
            .map(|((mv, yv), w)| {
                let r = mv - yv;
                f += 0.5 * w * r * r;
                w * r
            })
            .collect();
        for (a, (t, win)) in terms.iter().zip(&windows).enumerate() {
            let (mut gm, mut gn) = (0.0, 0.0);
            for (j, &(_, dmu, dnu)) in win.values.iter().enumerate() {
                let r = wr[win.start + j];
                gm += r * dmu;
                gn += r * dnu;
            }
            grad[2 * a] = t.kappa * gm * if theta[2 * a] < 0.0 { -1.0 } else { 1.0 };
            grad[2 * a + 1] = t.kappa * t.nu * gn;
        }
        (f, kappa)
    }

    fn report(&self, terms: &[ShellTerm], ripples: &[Ripple]) -> (f64, f64, f64, Vec<RippleError>) {
        let res = self.residuals(terms);
        let max = res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        let ms: f64 = res.iter().zip(&self.weights).map(|(r, w)| w * r * r).sum();
        let per = ripples
            .iter()
            .filter(|r| r.x_lo <= self.target.x_end())
            .map(|r| {
                let err = res
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| {
                        let x = self.target.x(i);
                        x >= r.x_lo && x <= r.x_hi
                    })
                    .fold(0.0f64, |m, (_, e)| m.max(e.abs()));
                RippleError {
                    x_lo: r.x_lo,
                    x_hi: r.x_hi,
                    max_abs_error: err,
                }
            })
            .collect();
        (max, ms.sqrt(), 0.5 * ms, per)
    }
}

// Solves A x = b in place for symmetric positive definite A (row-major n×n).
fn cholesky_solve(a: &mut [f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = v / d;
        }
    }
    let mut x = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            x[i] -= a[i * n + k] * x[k];
        }
        x[i] /= a[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            x[i] -= a[k * n + i] * x[k];
        }
        x[i] /= a[i * n + i];
    }
    Some(x)
}

/// Analytic gradient of the fitting objective with respect to the packed
/// parameters (κ, μ, ln ν) of each term, with the objective value.
pub fn objective_gradient(
    model: &ShellModel,
    target: &RadialProfile,
    mode: WeightMode,
) -> (f64, Vec<f64>) {
    let obj = Objective::new(model.dim(), target, mode);
    let p = Objective::pack(model);
    let mut g = vec![0.0; p.len()];
    let f = obj.value_and_gradient(&p, &mut g);
    (f, g)
}

/// Objective ½Σw(model − target)²/Σw at the packed parameters (κ, μ, ln ν).
pub fn objective_at(dim: Dim, params: &[f64], target: &RadialProfile, mode: WeightMode) -> f64 {
    let obj = Objective::new(dim, target, mode);
    let terms: Vec<ShellTerm> = Objective::unpack(params).collect();
    let res = obj.residuals(&terms);
    res.iter()
        .zip(&obj.weights)
        .map(|(r, w)| 0.5 * w * r * r)
        .sum()
}

/// Packs a model as the optimizer sees it: (κ, μ, ln ν) per term.
pub fn pack_parameters(model: &ShellModel) -> Vec<f64> {
    Objective::pack(model)
}

fn check_target(model: &ShellModel, target: &RadialProfile, config: &FitConfig) -> Result<()> {
    if model.dim() != target.dim {
        return Err(Error::Argument(format!(
            "model dimension {} does not match target dimension {}",
            model.dim(),
            target.dim
        )));
    }
    target.validate()?;
    if !(config.gradient_tol > 0.0) {
        return Err(Error::Argument("gradient_tol must be positive".into()));
    }
    Ok(())
}

/// Least-squares refinement of every (κ, μ, ν) against the target samples.
///
/// Fails with [`Error::Divergence`], carrying the best model seen, if the
/// objective rises across ten accepted steps or stops being finite.
pub fn refine(
    model: &ShellModel,
    target: &RadialProfile,
    config: &FitConfig,
) -> Result<(ShellModel, FitReport)> {
    check_target(model, target, config)?;
    let obj = Objective::new(model.dim(), target, config.weight_mode);
    let opts = LbfgsOptions {
        max_iterations: config.max_iterations,
        gradient_tol: config.gradient_tol,
        objective_tol: config.objective_tol,
        objective_scale: obj.zero_level(),
        ..LbfgsOptions::default()
    };
    let p0 = Objective::pack(model);
    let theta0: Vec<f64> = p0.chunks_exact(3).flat_map(|c| [c[1], c[2]]).collect();
    let mut out = minimize(|th, g| obj.projected(th, RIDGE, g).0, theta0, &opts);
    if out.iterations > 0 && out.termination != Termination::Divergence {
        // Polish with the weights nearly unregularized.
        let second = minimize(
            |th, g| obj.projected(th, FINAL_RIDGE, g).0,
            out.x.clone(),
            &opts,
        );
        out.history.extend_from_slice(&second.history[1..]);
        out.iterations += second.iterations;
        out.x = second.x;
        out.f = second.f;
        out.termination = second.termination;
    }

    let x_max = target.x_end();
    let fitted = if out.iterations == 0 {
        model.clone()
    } else {
        let mut g = vec![0.0; out.x.len()];
        let (_, kappa) = obj.projected(&out.x, FINAL_RIDGE, &mut g);
        let terms = out
            .x
            .chunks_exact(2)
            .zip(kappa)
            .map(|(c, kappa)| ShellTerm {
                kappa,
                mu: c[0].abs(),
                nu: c[1].exp(),
            })
            .collect();
        ShellModel::new(model.dim(), terms, x_max, model.label())?
    };
    let ripples = detect_ripples(target);
    let (max, rms, objective, per) = obj.report(fitted.terms(), &ripples);
    let report = FitReport {
        max_abs_error: max,
        rms_error: rms,
        iterations: out.iterations,
        converged: matches!(
            out.termination,
            Termination::GradientTolerance | Termination::ObjectiveTolerance
        ),
        termination: out.termination,
        objective,
        objective_history: out.history,
        per_ripple_errors: per,
    };
    if out.termination == Termination::Divergence {
        return Err(Error::Divergence {
            message: format!("objective rose to {} after {} steps", out.f, out.iterations),
            best: Box::new((fitted, report)),
        });
    }
    Ok((fitted, report))
}

/// Full pipeline: detect ripples, initialize one term per ripple, refine, and
/// optionally keep adding terms at the largest residual lobe.
pub fn decompose(
    dim: Dim,
    target: &RadialProfile,
    config: &FitConfig,
) -> Result<(ShellModel, FitReport)> {
    if target.dim != dim {
        return Err(Error::Argument(format!(
            "target dimension {} does not match requested dimension {dim}",
            target.dim
        )));
    }
    let ripples = detect_ripples(target);
    if ripples.is_empty() {
        return Err(Error::Argument("target is identically zero".into()));
    }
    let init = init_terms(dim, &ripples)?.with_label("decomposition");
    let (mut model, mut report) = refine(&init, target, config)?;

    if let ResidualStrategy::AddUntilAccuracy {
        target: eps,
        max_terms,
    } = config.residual_strategy
    {
        while report.max_abs_error > eps && model.len() < max_terms {
            let residual: Vec<f64> = target
                .points()
                .map(|(x, y)| y - model.eval_unchecked(x))
                .collect();
            let residual = RadialProfile::new(target.x0, target.step, residual, dim)?;
            let best = detect_ripples(&residual)
                .into_iter()
                .filter(|r| r.x_ext <= target.x_end())
                .fold(None::<Ripple>, |best, r| match best {
                    Some(b) if b.value_ext.abs() >= r.value_ext.abs() => Some(b),
                    _ => Some(r),
                });
            let Some(r) = best else { break };
            let mut terms = model.terms().to_vec();
            terms.push(term_for_ripple(dim, &r));
            let grown = ShellModel::new(dim, terms, model.x_max(), model.label())?;
            let (m, rep) = refine(&grown, target, config)?;
            model = m;
            report = rep;
        }
        report.converged = report.max_abs_error <= eps;
    }
    Ok((model, report))
}
