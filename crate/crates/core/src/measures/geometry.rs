//! Volumes and radii of Euclidean balls.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the Gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    for (k, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (x + k as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Gamma function for `x > 0`.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    (half * PI.ln() - ln_gamma(half + 1.0)).exp()
}

/// `Vol_n(r) = pi^{n/2} r^n / Gamma(n/2 + 1)`.
pub fn vol_ball(n: usize, r: f64) -> f64 {
    assert!(n >= 1, "ball dimension must be positive");
    unit_ball_volume(n) * r.powi(n as i32)
}

/// Radius of the `n`-ball of volume `v`; inverse of [`vol_ball`] in `r`.
pub fn rad_ball(n: usize, v: f64) -> f64 {
    assert!(n >= 1, "ball dimension must be positive");
    if v == 0.0 {
        return 0.0;
    }
    (v / unit_ball_volume(n)).powf(1.0 / n as f64)
}
