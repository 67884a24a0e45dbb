//! The two-ball construction in which the projection fails to be
//! `W_p`-nonexpansive for `p` close to one.
//!
//! `mu` puts mass 1/2 on the origin and on `2R e_1` (`R` = radius of the ball of
//! volume 1/2), `nu` is the Dirac at the origin. Their projections are two
//! tangent balls of radius `R` and one ball of volume 1. The optimal cost between
//! `mu` and `nu` is forced, while the projections are strictly farther apart in
//! `W_1`; by continuity the same holds for `p` slightly above one.

mod axisym;
mod gap;

pub use axisym::axisymmetric_profile;
pub use gap::{find_p_threshold, gap_curve, Discretization, GapEvaluator, GapRecord, Threshold};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::measures::{rad_ball, sample_in_ball, vol_ball, BallUnionMeasure, DiscreteMeasure};
use crate::ot::CostExponent;
use crate::projnd::project_atoms_analytic;

/// The annular slab `E = { a^{1/d} R <= |y'| <= b^{1/d} R, |y_1| <= sqrt(c^{2/d} - b^{2/d}) R }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EBand {
    pub inner: f64,
    pub outer: f64,
    pub cap: f64,
}

impl Default for EBand {
    fn default() -> Self {
        Self {
            inner: 1.1,
            outer: 1.9,
            cap: 2.0,
        }
    }
}

impl EBand {
    /// `(inner radius, outer radius, half height)` in dimension `d` for ball radius `r`.
    pub fn extents(&self, d: usize, r: f64) -> (f64, f64, f64) {
        let df = d as f64;
        let half = (self.cap.powf(2.0 / df) - self.outer.powf(2.0 / df)).max(0.0).sqrt() * r;
        (self.inner.powf(1.0 / df) * r, self.outer.powf(1.0 / df) * r, half)
    }

    pub fn contains(&self, y: &[f64], r: f64) -> bool {
        let (lo, hi, half) = self.extents(y.len(), r);
        let radial = y[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
        y[0].abs() <= half && radial >= lo && radial <= hi
    }
}

/// `mu`, `nu`, their projections and the band `E` in dimension `d`.
#[derive(Debug, Clone)]
pub struct CounterexampleInstance {
    pub d: usize,
    pub r: f64,
    pub mu: DiscreteMeasure,
    pub nu: DiscreteMeasure,
    pub rho: BallUnionMeasure,
    pub sigma: BallUnionMeasure,
    pub band: EBand,
}

pub fn build_counterexample(d: usize) -> Result<CounterexampleInstance> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let r = rad_ball(d, 0.5);
    let origin = vec![0.0; d];
    let mut far = vec![0.0; d];
    far[0] = 2.0 * r;
    let mu = DiscreteMeasure::uniform(vec![origin.clone(), far])?;
    let nu = DiscreteMeasure::dirac(origin)?;
    let rho = project_atoms_analytic(&mu, 1.0)?;
    let sigma = project_atoms_analytic(&nu, 1.0)?;
    Ok(CounterexampleInstance {
        d,
        r,
        mu,
        nu,
        rho,
        sigma,
        band: EBand::default(),
    })
}

/// `W_p(mu, nu) = (2R) / 2^{1/p}`: the only plan moves mass 1/2 across `2R`.
pub fn wp_mu_nu_exact(inst: &CounterexampleInstance, p: CostExponent) -> f64 {
    p.root(0.5 * p.pow(2.0 * inst.r))
}

/// Volume of the band `E` (which equals its `sigma`-mass, `sigma` having unit density).
pub fn sigma_e_analytic_band(d: usize, band: &EBand) -> f64 {
    let r = rad_ball(d, 0.5);
    let (lo, hi, half) = band.extents(d, r);
    2.0 * half * (vol_ball(d - 1, hi) - vol_ball(d - 1, lo))
}

pub fn sigma_e_analytic(d: usize) -> f64 {
    sigma_e_analytic_band(d, &EBand::default())
}

pub const MIN_MONTE_CARLO_SAMPLES: usize = 10_000;

/// Fraction of `n` uniform points of `sigma` inside the band, with its standard error.
pub fn sigma_e_montecarlo_band(d: usize, band: &EBand, n: usize, seed: u64) -> Result<(f64, f64)> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    if n < MIN_MONTE_CARLO_SAMPLES {
        return Err(Error::InvalidSpec(format!(
            "need at least {MIN_MONTE_CARLO_SAMPLES} samples, got {n}"
        )));
    }
    let r = rad_ball(d, 0.5);
    let outer = rad_ball(d, 1.0);
    let center = vec![0.0; d];
    let mut y = vec![0.0; d];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..n {
        sample_in_ball(&mut rng, &center, outer, &mut y);
        if band.contains(&y, r) {
            hits += 1;
        }
    }
    let f = hits as f64 / n as f64;
    Ok((f, (f * (1.0 - f) / n as f64).sqrt()))
}

pub fn sigma_e_montecarlo(d: usize, n: usize, seed: u64) -> Result<(f64, f64)> {
    sigma_e_montecarlo_band(d, &EBand::default(), n, seed)
}

/// Smallest `|x' - y'|` over sampled `y` in `E` and `x` in the support of `rho`,
/// against the lower bound `(1.1^{1/d} - 1) R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSeparation {
    pub min_separation: f64,
    pub bound: f64,
    pub band_points: usize,
    pub pass: bool,
}

pub fn e_band_separation(inst: &CounterexampleInstance, n: usize, seed: u64) -> Result<BandSeparation> {
    let d = inst.d;
    let r = inst.r;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outer = inst.sigma.radii()[0];
    let mut y = vec![0.0; d];
    let mut band_pts = Vec::new();
    for _ in 0..n {
        sample_in_ball(&mut rng, &inst.sigma.centers()[0], outer, &mut y);
        if inst.band.contains(&y, r) {
            band_pts.push(y.clone());
        }
    }
    let rho_pts = crate::measures::sample_ball_union(&inst.rho, n, seed ^ 0x9e37_79b9)?;
    let radial = |v: &[f64]| v[1..].iter().map(|a| a * a).sum::<f64>().sqrt();
    // |x' - y'| >= |y'| - |x'|, and the bound concerns exactly that radial gap
    let max_rho_radial = rho_pts.points().map(radial).fold(0.0, f64::max);
    let mut min_sep = f64::INFINITY;
    for yb in &band_pts {
        for x in rho_pts.points() {
            let sep = x[1..]
                .iter()
                .zip(&yb[1..])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            min_sep = min_sep.min(sep);
        }
    }
    let bound = (inst.band.inner.powf(1.0 / d as f64) - 1.0) * r;
    debug_assert!(max_rho_radial <= r + 1e-12);
    Ok(BandSeparation {
        min_separation: min_sep,
        bound,
        band_points: band_pts.len(),
        pass: band_pts.is_empty() || min_sep >= bound - 1e-12,
    })
}

/// Largest `t - t^p` over the grid, against the bound `p - 1`.
pub fn t_minus_tp_bound_check(p: f64, t_grid: &[f64]) -> (bool, f64) {
    let worst = t_grid
        .iter()
        .map(|&t| t - t.powf(p))
        .fold(f64::NEG_INFINITY, f64::max);
    (worst <= p - 1.0 + 1e-12, worst)
}
