//! Limited-memory BFGS with a strong-Wolfe line search.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsOptions {
    pub memory: usize,
    pub max_iterations: usize,
    pub gradient_tol: f64,
    /// Stop once ten accepted steps together lower the objective by less
    /// than objective_tol·max(|f|, objective_scale); 0 disables the test.
    pub objective_tol: f64,
    pub objective_scale: f64,
    pub c1: f64,
    pub c2: f64,
    pub max_line_search: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        LbfgsOptions {
            memory: 10,
            max_iterations: 1000,
            gradient_tol: 1e-10,
            objective_tol: 0.0,
            objective_scale: 0.0,
            c1: 1e-4,
            c2: 0.9,
            max_line_search: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    GradientTolerance,
    ObjectiveTolerance,
    MaxIterations,
    /// No step along the search direction lowers the objective any further.
    Stagnation,
    /// The objective rose across a window of accepted steps or became non-finite.
    Divergence,
}

#[derive(Debug, Clone)]
pub struct LbfgsOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub termination: Termination,
    /// Objective at the start and after every accepted step.
    pub history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

struct Trial {
    alpha: f64,
    f: f64,
    dphi: f64,
    x: Vec<f64>,
    g: Vec<f64>,
}

struct LineSearch<'a, F> {
    fun: &'a mut F,
    x: &'a [f64],
    d: &'a [f64],
    f0: f64,
    dphi0: f64,
    c1: f64,
    c2: f64,
    evaluations: usize,
    max_evaluations: usize,
}

impl<F: FnMut(&[f64], &mut [f64]) -> f64> LineSearch<'_, F> {
    fn eval(&mut self, alpha: f64) -> Trial {
        self.evaluations += 1;
        let x: Vec<f64> = self
            .x
            .iter()
            .zip(self.d)
            .map(|(xi, di)| xi + alpha * di)
            .collect();
        let mut g = vec![0.0; x.len()];
        let f = (self.fun)(&x, &mut g);
        let dphi = dot(&g, self.d);
        Trial {
            alpha,
            f,
            dphi,
            x,
            g,
        }
    }

    fn armijo(&self, t: &Trial) -> bool {
        t.f <= self.f0 + self.c1 * t.alpha * self.dphi0
    }

    fn curvature(&self, t: &Trial) -> bool {
        t.dphi.abs() <= -self.c2 * self.dphi0
    }

    fn search(&mut self, alpha0: f64) -> Option<Trial> {
        let mut prev = Trial {
            alpha: 0.0,
            f: self.f0,
            dphi: self.dphi0,
            x: self.x.to_vec(),
            g: Vec::new(),
        };
        let mut alpha = alpha0;
        let mut first = true;
        while self.evaluations < self.max_evaluations {
            let t = self.eval(alpha);
            if !t.f.is_finite() {
                // Step into a non-finite region: shrink towards the last good point.
                alpha = 0.5 * (prev.alpha + alpha);
                continue;
            }
            if !self.armijo(&t) || (!first && t.f >= prev.f) {
                return self.zoom(prev, t);
            }
            if self.curvature(&t) {
                return Some(t);
            }
            if t.dphi >= 0.0 {
                return self.zoom(t, prev);
            }
            first = false;
            alpha = 2.0 * t.alpha;
            prev = t;
        }
        None
    }

    // Bracket [lo, hi] with lo satisfying sufficient decrease.
    fn zoom(&mut self, mut lo: Trial, mut hi: Trial) -> Option<Trial> {
        while self.evaluations < self.max_evaluations {
            let alpha = cubic_min(&lo, &hi);
            if (hi.alpha - lo.alpha).abs() <= 1e-16 * lo.alpha.abs().max(1.0) {
                break;
            }
            let t = self.eval(alpha);
            if !t.f.is_finite() || !self.armijo(&t) || t.f >= lo.f {
                hi = t;
            } else {
                if self.curvature(&t) {
                    return Some(t);
                }
                if t.dphi * (hi.alpha - lo.alpha) >= 0.0 {
                    hi = lo;
                }
                lo = t;
            }
        }
        // Accept a sufficient-decrease point even without the curvature condition.
        (lo.alpha > 0.0 && lo.f < self.f0).then_some(lo)
    }
}

// Minimizer of the cubic interpolating both ends, safeguarded into the
// interior of the bracket.
fn cubic_min(a: &Trial, b: &Trial) -> f64 {
    let (lo, hi) = if a.alpha < b.alpha { (a, b) } else { (b, a) };
    let width = hi.alpha - lo.alpha;
    let fallback = lo.alpha + 0.5 * width;
    if !(hi.f.is_finite() && hi.dphi.is_finite()) {
        return fallback;
    }
    let d1 = lo.dphi + hi.dphi - 3.0 * (lo.f - hi.f) / (lo.alpha - hi.alpha);
    let disc = d1 * d1 - lo.dphi * hi.dphi;
    if disc < 0.0 {
        return fallback;
    }
    let d2 = disc.sqrt();
    let t = hi.alpha - width * (hi.dphi + d2 - d1) / (hi.dphi - lo.dphi + 2.0 * d2);
    let margin = 0.1 * width;
    if t.is_finite() && t > lo.alpha + margin && t < hi.alpha - margin {
        t
    } else {
        fallback
    }
}

/// Minimizes `fun`, which returns the objective and writes the gradient into
/// its second argument.
pub fn minimize<F>(mut fun: F, x0: Vec<f64>, opts: &LbfgsOptions) -> LbfgsOutcome
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0;
    let mut g = vec![0.0; n];
    let mut f = fun(&x, &mut g);
    let mut history = vec![f];
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut iterations = 0;
    let mut restarted = false;

    let termination = loop {
        if !f.is_finite() {
            break Termination::Divergence;
        }
        if norm(&g) <= opts.gradient_tol {
            break Termination::GradientTolerance;
        }
        if iterations >= opts.max_iterations {
            break Termination::MaxIterations;
        }

        // Two-loop recursion for d = −H g.
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(pairs.len());
        for (s, y, rho) in pairs.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        let gamma = match pairs.back() {
            Some((s, y, _)) => dot(s, y) / dot(y, y),
            None => 1.0 / norm(&g).max(1e-300),
        };
        q.iter_mut().for_each(|qi| *qi *= gamma);
        for ((s, y, rho), a) in pairs.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut d: Vec<f64> = q.into_iter().map(|v| -v).collect();
        let mut dphi0 = dot(&g, &d);
        if !(dphi0 < 0.0) {
            pairs.clear();
            let scale = 1.0 / norm(&g);
            d = g.iter().map(|gi| -gi * scale).collect();
            dphi0 = dot(&g, &d);
        }

        let mut ls = LineSearch {
            fun: &mut fun,
            x: &x,
            d: &d,
            f0: f,
            dphi0,
            c1: opts.c1,
            c2: opts.c2,
            evaluations: 0,
            max_evaluations: opts.max_line_search,
        };
        let Some(t) = ls.search(1.0) else {
            if restarted || pairs.is_empty() {
                break Termination::Stagnation;
            }
            pairs.clear();
            restarted = true;
            continue;
        };
        restarted = false;

        let s: Vec<f64> = t.x.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = t.g.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            if pairs.len() == opts.memory {
                pairs.pop_front();
            }
            pairs.push_back((s, y, 1.0 / sy));
        }
        x = t.x;
        g = t.g;
        f = t.f;
        iterations += 1;
        history.push(f);
        if history.len() > 10 {
            let before = history[history.len() - 11];
            if f > before {
                break Termination::Divergence;
            }
            if before - f <= opts.objective_tol * f.abs().max(opts.objective_scale) {
                break Termination::ObjectiveTolerance;
            }
        }
    };

    LbfgsOutcome {
        grad_norm: norm(&g),
        x,
        f,
        iterations,
        termination,
        history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64], g: &mut [f64]) -> f64 {
        let mut f = 0.0;
        g.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..x.len() - 1 {
            let a = x[i + 1] - x[i] * x[i];
            let b = 1.0 - x[i];
            f += 100.0 * a * a + b * b;
            g[i] += -400.0 * x[i] * a - 2.0 * b;
            g[i + 1] += 200.0 * a;
        }
        f
    }

    #[test]
    fn minimizes_rosenbrock() {
        let out = minimize(
            rosenbrock,
            vec![-1.2, 1.0, -0.5, 0.8],
            &LbfgsOptions::default(),
        );
        assert_eq!(out.termination, Termination::GradientTolerance);
        assert!(out.x.iter().all(|v| (v - 1.0).abs() < 1e-8), "{:?}", out.x);
        assert!(out.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn quadratic_converges_quickly() {
        let diag = [1.0, 10.0, 100.0, 1000.0];
        let out = minimize(
            |x, g| {
                let mut f = 0.0;
                for i in 0..4 {
                    g[i] = diag[i] * (x[i] - i as f64);
                    f += 0.5 * diag[i] * (x[i] - i as f64).powi(2);
                }
                f
            },
            vec![5.0; 4],
            &LbfgsOptions::default(),
        );
        assert_eq!(out.termination, Termination::GradientTolerance);
        assert!(out.iterations < 30, "{}", out.iterations);
    }

    #[test]
    fn stalled_objective_stops_against_its_scale() {
        let opts = LbfgsOptions {
            objective_tol: 1e-3,
            objective_scale: 1e3,
            ..Default::default()
        };
        let out = minimize(rosenbrock, vec![-1.2, 1.0, -0.5, 0.8], &opts);
        assert_eq!(out.termination, Termination::ObjectiveTolerance);
        let n = out.history.len();
        assert!(n > 10 && out.history[n - 11] - out.history[n - 1] <= 1.0);
    }

    #[test]
    fn zero_budget_returns_start() {
        let opts = LbfgsOptions {
            max_iterations: 0,
            ..Default::default()
        };
        let out = minimize(rosenbrock, vec![-1.2, 1.0], &opts);
        assert_eq!(out.termination, Termination::MaxIterations);
        assert_eq!(out.x, vec![-1.2, 1.0]);
        assert_eq!(out.iterations, 0);
    }
}
