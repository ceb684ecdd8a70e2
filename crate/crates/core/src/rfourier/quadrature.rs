//! Globally adaptive 15-point Gauss–Kronrod quadrature over a set of initial
//! panels.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// 7-point Gauss weights on XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

impl std::ops::Add for Integral {
    type Output = Integral;
    fn add(self, rhs: Integral) -> Integral {
        Integral {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
        }
    }
}

/// One 15-point Kronrod rule on [a, b] with the QUADPACK error estimate.
pub fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Integral {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let result = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Integral {
        value: result,
        error: err,
    }
}

struct Panel {
    a: f64,
    b: f64,
    est: Integral,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Tolerances and subdivision budget for one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

/// Adaptive integration over consecutive breakpoints. Panels with the largest
/// error estimate are bisected until the summed estimate meets the tolerance.
pub fn integrate(f: impl Fn(f64) -> f64, breaks: &[f64], tol: Tolerance) -> Result<Integral> {
    let mut heap = BinaryHeap::with_capacity(breaks.len() + 16);
    let mut total = Integral {
        value: 0.0,
        error: 0.0,
    };
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let est = gk15(&f, w[0], w[1]);
            total = total + est;
            heap.push(Panel {
                a: w[0],
                b: w[1],
                est,
            });
        }
    }
    let mut done = Integral {
        value: 0.0,
        error: 0.0,
    };
    let mut subdivisions = 0;
    loop {
        let target = tol.abs_tol.max(tol.rel_tol * total.value.abs());
        if total.error <= target {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        // Panels that can no longer be split in floating point are final.
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) < 1e-15 * worst.a.abs().max(worst.b.abs())
        {
            done = done + worst.est;
            continue;
        }
        if subdivisions >= tol.max_subdivisions {
            heap.push(worst);
            return Err(Error::Quadrature {
                value: total.value,
                error_estimate: total.error,
                subdivisions,
            });
        }
        subdivisions += 1;
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        total.value += left.value + right.value - worst.est.value;
        total.error += left.error + right.error - worst.est.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            est: left,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            est: right,
        });
    }
    // Re-sum to shed accumulated cancellation in the running totals.
    let sum = heap.into_iter().fold(done, |acc, p| acc + p.est);
    Ok(sum)
}

/// Breakpoints covering [lo, hi] with panels no wider than `width`.
pub fn uniform_breaks(lo: f64, hi: f64, width: f64) -> Vec<f64> {
    let n = (((hi - lo) / width).ceil() as usize).clamp(1, 1 << 20);
    let h = (hi - lo) / n as f64;
    let mut v: Vec<f64> = (0..n).map(|i| lo + i as f64 * h).collect();
    v.push(hi);
    v
}

/// Breakpoints in [lo, hi] refined geometrically towards `center`: spacing
/// grows from `fine` by factors of two until it reaches `coarse`.
pub fn graded_breaks(center: f64, lo: f64, hi: f64, fine: f64, coarse: f64) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    if center > lo && center < hi {
        pts.push(center);
    }
    for dir in [-1.0, 1.0] {
        let mut pos = center;
        let mut step = fine;
        loop {
            pos += dir * step;
            if pos <= lo || pos >= hi {
                break;
            }
            pts.push(pos);
            if step < coarse {
                step = (2.0 * step).min(coarse);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Union of several breakpoint sets.
pub fn merge_breaks(sets: &[Vec<f64>]) -> Vec<f64> {
    let mut pts: Vec<f64> = sets.iter().flatten().copied().collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * a.abs().max(1.0));
    pts
}
