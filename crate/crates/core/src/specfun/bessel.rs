//! Bessel functions J₀, J₁ and exponentially scaled I₀, I₁.
//!
//! J₀ uses the Cephes rational approximations (zeros factored out on
//! [0, 5], Hankel asymptotic form with 6/6 and 7/7 rationals above).
//! J₁ uses the FreeBSD msun (Sun fdlibm) approximations:
//!
//! ```text
//! Copyright (C) 1993 by Sun Microsystems, Inc. All rights reserved.
//! Developed at SunSoft, a Sun Microsystems, Inc. business.
//! Permission to use, copy, modify, and distribute this
//! software is freely granted, provided that this notice
//! is preserved.
//! ```

use std::f64::consts::{FRAC_PI_4, PI};

use super::AccuracySpec;

const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

#[inline]
fn polevl(x: f64, coef: &[f64]) -> f64 {
    coef.iter().fold(0.0, |acc, &c| acc * x + c)
}

// Same as polevl with an implied leading coefficient of one.
#[inline]
fn p1evl(x: f64, coef: &[f64]) -> f64 {
    coef.iter().fold(1.0, |acc, &c| acc * x + c)
}

// Squares of the first two zeros of J₀.
const DR1: f64 = 5.783_185_962_946_784;
const DR2: f64 = 30.471_262_343_662_087;

const RP: [f64; 4] = [
    -4.794432209782018e9,
    1.9561749194655657e12,
    -2.4924834436096772e14,
    9.708622510473064e15,
];
const RQ: [f64; 8] = [
    4.99563147152651e2,
    1.737854016763747e5,
    4.844096583399621e7,
    1.1185553704535683e10,
    2.112775201154892e12,
    3.1051822985742256e14,
    3.1812195594320496e16,
    1.7108629408104315e18,
];
const PP: [f64; 7] = [
    7.969367292973471e-4,
    8.283523921074408e-2,
    1.239533716464143,
    5.447250030587687,
    8.74716500199817,
    5.303240382353949,
    1.0,
];
const PQ: [f64; 7] = [
    9.244088105588637e-4,
    8.562884743544745e-2,
    1.2535274390105895,
    5.470977403304171,
    8.761908832370695,
    5.306052882353947,
    1.0,
];
const QP: [f64; 8] = [
    -1.1366383889846916e-2,
    -1.2825271867050931,
    -1.9553954425773597e1,
    -9.320601521237683e1,
    -1.7768116798048806e2,
    -1.4707750515495118e2,
    -5.141053267665993e1,
    -6.050143506007285,
];
const QQ: [f64; 7] = [
    6.43178256118178e1,
    8.564300259769806e2,
    3.8824018360540163e3,
    7.240467741956525e3,
    5.930727011873169e3,
    2.0620933166032783e3,
    2.420057402402914e2,
];

pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 5.0 {
        let z = x * x;
        if x < 1e-5 {
            return 1.0 - z / 4.0;
        }
        let p = (z - DR1) * (z - DR2);
        return p * polevl(z, &RP) / p1evl(z, &RQ);
    }
    let w = 5.0 / x;
    let q = 25.0 / (x * x);
    let p = polevl(q, &PP) / polevl(q, &PQ);
    let q = polevl(q, &QP) / p1evl(q, &QQ);
    let xn = x - FRAC_PI_4;
    (p * xn.cos() - w * q * xn.sin()) * SQRT_2_OVER_PI / x.sqrt()
}

// R0/S0 on [0, 2]
const R00: f64 = -6.250_000_000_000_000_000_00e-02;
const R01: f64 = 1.407_056_669_551_897_060_48e-03;
const R02: f64 = -1.599_556_310_840_355_975_20e-05;
const R03: f64 = 4.967_279_996_095_844_484_12e-08;
const S01: f64 = 1.915_375_995_383_634_608_05e-02;
const S02: f64 = 1.859_467_855_886_309_155_60e-04;
const S03: f64 = 1.177_184_640_426_236_832_63e-06;
const S04: f64 = 5.046_362_570_762_170_427_15e-09;
const S05: f64 = 1.235_422_744_261_379_139_08e-11;

pub fn bessel_j1(x: f64) -> f64 {
    let sign = x < 0.0;
    let ax = x.abs();
    if ax >= 2.0 {
        let v = j1_asymptotic(ax);
        return if sign { -v } else { v };
    }
    let z = x * x;
    let r = z * (R00 + z * (R01 + z * (R02 + z * R03)));
    let s = 1.0 + z * (S01 + z * (S02 + z * (S03 + z * (S04 + z * S05))));
    (0.5 + r / s) * x
}

// j1(x) = sqrt(2/(πx))·(p1(x)·cos(x − 3π/4) − q1(x)·sin(x − 3π/4)), with
// cos(x − 3π/4) = (sin x − cos x)/√2 and sin(x − 3π/4) = −(sin x + cos x)/√2.
// The cancelling combination is recovered from −cos 2x / (the other one).
fn j1_asymptotic(x: f64) -> f64 {
    let s = x.sin();
    let c = x.cos();
    let mut cc = s - c;
    let mut ss = -s - c;
    if x < 1e300 {
        let z = (2.0 * x).cos();
        if s * c > 0.0 {
            cc = z / ss;
        } else {
            ss = z / cc;
        }
        if x < 2f64.powi(129) {
            cc = pone(x) * cc - qone(x) * ss;
        }
    }
    (1.0 / PI.sqrt()) * cc / x.sqrt()
}

const PR8: [f64; 6] = [
    0.00000000000000000000e+00,
    1.17187499999988647970e-01,
    1.32394806593073575129e+01,
    4.12051854307378562225e+02,
    3.87474538913960532227e+03,
    7.91447954031891731574e+03,
];
const PS8: [f64; 5] = [
    1.14207370375678408436e+02,
    3.65093083420853463394e+03,
    3.69562060269033463555e+04,
    9.76027935934950801311e+04,
    3.08042720627888811578e+04,
];
const PR5: [f64; 6] = [
    1.31990519556243522749e-11,
    1.17187493190614097638e-01,
    6.80275127868432871736e+00,
    1.08308182990189109773e+02,
    5.17636139533199752805e+02,
    5.28715201363337541807e+02,
];
const PS5: [f64; 5] = [
    5.92805987221131331921e+01,
    9.91401418733614377743e+02,
    5.35326695291487976647e+03,
    7.84469031749551231769e+03,
    1.50404688810361062679e+03,
];
const PR3: [f64; 6] = [
    3.02503916137373618024e-09,
    1.17186865567253592491e-01,
    3.93297750033315640650e+00,
    3.51194035591636932736e+01,
    9.10550110750781271918e+01,
    4.85590685197364919645e+01,
];
const PS3: [f64; 5] = [
    3.47913095001251519989e+01,
    3.36762458747825746741e+02,
    1.04687139975775130551e+03,
    8.90811346398256432622e+02,
    1.03787932439639277504e+02,
];
const PR2: [f64; 6] = [
    1.07710830106873743082e-07,
    1.17176219462683348094e-01,
    2.36851496667608785174e+00,
    1.22426109148261232917e+01,
    1.76939711271687727390e+01,
    5.07352312588818499250e+00,
];
const PS2: [f64; 5] = [
    2.14364859363821409488e+01,
    1.25290227168402751090e+02,
    2.32276469057162813669e+02,
    1.17679373287147100768e+02,
    8.36463893371618283368e+00,
];

const QR8: [f64; 6] = [
    0.00000000000000000000e+00,
    -1.02539062499992714161e-01,
    -1.62717534544589987888e+01,
    -7.59601722513950107896e+02,
    -1.18498066702429587167e+04,
    -4.84385124285750353010e+04,
];
const QS8: [f64; 6] = [
    1.61395369700722909556e+02,
    7.82538599923348465381e+03,
    1.33875336287249578163e+05,
    7.19657723683240939863e+05,
    6.66601232617776375264e+05,
    -2.94490264303834643215e+05,
];
const QR5: [f64; 6] = [
    -2.08979931141764104297e-11,
    -1.02539050241375426231e-01,
    -8.05644828123936029840e+00,
    -1.83669607474888380239e+02,
    -1.37319376065508163265e+03,
    -2.61244440453215656817e+03,
];
const QS5: [f64; 6] = [
    8.12765501384335777857e+01,
    1.99179873460485964642e+03,
    1.74684851924908907677e+04,
    4.98514270910352279316e+04,
    2.79480751638918118260e+04,
    -4.71918354795128470869e+03,
];
const QR3: [f64; 6] = [
    -5.07831226461766561369e-09,
    -1.02537829820837089745e-01,
    -4.61011581139473403113e+00,
    -5.78472216562783643212e+01,
    -2.28244540737631695038e+02,
    -2.19210128478909325622e+02,
];
const QS3: [f64; 6] = [
    4.76651550323729509273e+01,
    6.73865112676699709482e+02,
    3.38015286679526343505e+03,
    5.54772909720722782367e+03,
    1.90311919338810798763e+03,
    -1.35201191444307340817e+02,
];
const QR2: [f64; 6] = [
    -1.78381727510958865572e-07,
    -1.02517042607985553460e-01,
    -2.75220568278187460720e+00,
    -1.96636162643703720221e+01,
    -4.23253133372830490089e+01,
    -2.13719211703704061733e+01,
];
const QS2: [f64; 6] = [
    2.95333629060523854548e+01,
    2.52981549982190529136e+02,
    7.57502834868645436472e+02,
    7.39393205320467245656e+02,
    1.55949003336666123687e+02,
    -4.95949898822628210127e+00,
];

// Interval boundaries of the msun tables, taken from their high words.
fn band(x: f64) -> usize {
    let b_8 = 8.0;
    let b_5 = f64::from_bits(0x4012_2E8B_0000_0000);
    let b_3 = f64::from_bits(0x4006_DB6D_0000_0000);
    if x >= b_8 {
        0
    } else if x >= b_5 {
        1
    } else if x >= b_3 {
        2
    } else {
        3
    }
}

fn pone(x: f64) -> f64 {
    let (p, q) = match band(x) {
        0 => (&PR8, &PS8),
        1 => (&PR5, &PS5),
        2 => (&PR3, &PS3),
        _ => (&PR2, &PS2),
    };
    let z = 1.0 / (x * x);
    let r = p[0] + z * (p[1] + z * (p[2] + z * (p[3] + z * (p[4] + z * p[5]))));
    let s = 1.0 + z * (q[0] + z * (q[1] + z * (q[2] + z * (q[3] + z * q[4]))));
    1.0 + r / s
}

fn qone(x: f64) -> f64 {
    let (p, q) = match band(x) {
        0 => (&QR8, &QS8),
        1 => (&QR5, &QS5),
        2 => (&QR3, &QS3),
        _ => (&QR2, &QS2),
    };
    let z = 1.0 / (x * x);
    let r = p[0] + z * (p[1] + z * (p[2] + z * (p[3] + z * (p[4] + z * p[5]))));
    let s = 1.0 + z * (q[0] + z * (q[1] + z * (q[2] + z * (q[3] + z * (q[4] + z * q[5])))));
    (0.375 + r / s) / x
}

/// Power series and large-argument expansion meet here.
const I_SWITCH: f64 = 30.0;

pub fn bessel_i0_scaled(x: f64) -> f64 {
    if x <= I_SWITCH {
        modified_series(0, x) * (-x).exp()
    } else {
        modified_asymptotic(0, x)
    }
}

pub fn bessel_i1_scaled(x: f64) -> f64 {
    if x <= I_SWITCH {
        modified_series(1, x) * (-x).exp()
    } else {
        modified_asymptotic(1, x)
    }
}

// I_n(x) = Σ_k (x/2)^{2k+n} / (k!(k+n)!), all terms positive.
fn modified_series(order: u32, x: f64) -> f64 {
    let acc = AccuracySpec::DOUBLE;
    let q = 0.25 * x * x;
    let mut term = if order == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    for k in 1..acc.max_terms {
        let kf = k as f64;
        term *= q / (kf * (kf + order as f64));
        sum += term;
        if acc.converged(term, sum) {
            break;
        }
    }
    sum
}

// I_n(x)e^{−x} ~ (2πx)^{−1/2} Σ_k (−1)^k Π_{j≤k}(4n² − (2j−1)²) / (k! (8x)^k)
fn modified_asymptotic(order: u32, x: f64) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let mut term = 1.0_f64;
    let mut sum = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (8.0 * k as f64 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}
