//! Estimates of `W_p(rho, sigma) - W_p(mu, nu)` and the sign change in `p`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{axisymmetric_profile, build_counterexample, wp_mu_nu_exact, CounterexampleInstance};
use crate::error::{Error, Result};
use crate::measures::{discretize_ball_union, sample_ball_union_stratified, BallUnionMeasure, DiscreteMeasure, GridSpec};
use crate::ot::{wasserstein, CostExponent};

/// How the continuous measures `rho` and `sigma` are turned into atoms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Discretization {
    /// `n` uniform points per side, split over the balls in proportion to mass.
    Sample { n: usize },
    /// Cubic grid in `R^d` with `subsamples^d` midpoints per cell.
    Grid { spacing: f64, subsamples: usize },
    /// Planar profile lattice of the rotationally symmetric measures. The seed
    /// draws the axial offset of the lattice.
    Axisym { spacing: f64, subsamples: usize },
}

impl Discretization {
    pub fn mode(&self) -> &'static str {
        match self {
            Self::Sample { .. } => "sample",
            Self::Grid { .. } => "grid",
            Self::Axisym { .. } => "axisym",
        }
    }

    /// Sample count, or the spacing for lattice modes.
    pub fn resolution(&self) -> f64 {
        match *self {
            Self::Sample { n } => n as f64,
            Self::Grid { spacing, .. } | Self::Axisym { spacing, .. } => spacing,
        }
    }

    /// The same mode at twice the resolution: twice the samples, or half the
    /// cell volume.
    pub fn doubled(&self, d: usize) -> Self {
        match *self {
            Self::Sample { n } => Self::Sample { n: 2 * n },
            Self::Grid { spacing, subsamples } => Self::Grid {
                spacing: spacing * 0.5f64.powf(1.0 / d as f64),
                subsamples,
            },
            Self::Axisym { spacing, subsamples } => Self::Axisym {
                spacing: spacing * 0.5f64.sqrt(),
                subsamples,
            },
        }
    }

    /// Discretize one ball union. `stream` separates the sampling streams of
    /// the two measures under one seed.
    fn apply(&self, b: &BallUnionMeasure, seed: u64, stream: u64) -> Result<DiscreteMeasure> {
        match *self {
            Self::Sample { n } => sample_ball_union_stratified(b, n, seed.wrapping_mul(2).wrapping_add(stream)),
            Self::Grid { spacing, subsamples } => {
                let (lo, hi) = b.bounding_box();
                let grid = GridSpec::covering(&lo, &hi, spacing)?;
                let disc = discretize_ball_union(b, &grid, subsamples)?;
                Ok(disc.measure.to_discrete().0)
            }
            Self::Axisym { spacing, subsamples } => {
                let shift = spacing * ChaCha8Rng::seed_from_u64(seed).random::<f64>();
                axisymmetric_profile(b, spacing, subsamples, shift)
            }
        }
    }
}

/// One point of a gap curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRecord {
    pub d: usize,
    pub p: f64,
    pub wp_mu_nu: f64,
    pub wp_rho_sigma: f64,
    pub gap: f64,
    pub discretization: Discretization,
    pub seed: u64,
}

/// Discretizes `rho` and `sigma` once and evaluates the gap at any `p`.
#[derive(Debug, Clone)]
pub struct GapEvaluator {
    instance: CounterexampleInstance,
    discretization: Discretization,
    seed: u64,
    rho: DiscreteMeasure,
    sigma: DiscreteMeasure,
}

impl GapEvaluator {
    pub fn new(d: usize, discretization: Discretization, seed: u64) -> Result<Self> {
        let instance = build_counterexample(d)?;
        let rho = discretization.apply(&instance.rho, seed, 0)?;
        let sigma = discretization.apply(&instance.sigma, seed, 1)?;
        Ok(Self {
            instance,
            discretization,
            seed,
            rho,
            sigma,
        })
    }

    pub fn instance(&self) -> &CounterexampleInstance {
        &self.instance
    }

    pub fn discretization(&self) -> Discretization {
        self.discretization
    }

    /// Atom counts of the discretized `rho` and `sigma`.
    pub fn sizes(&self) -> (usize, usize) {
        (self.rho.len(), self.sigma.len())
    }

    pub fn gap(&self, p: f64) -> Result<GapRecord> {
        let cp = CostExponent::new(p)?;
        let wp_mu_nu = wp_mu_nu_exact(&self.instance, cp);
        let wp_rho_sigma = wasserstein(&self.rho, &self.sigma, cp)?;
        Ok(GapRecord {
            d: self.instance.d,
            p,
            wp_mu_nu,
            wp_rho_sigma,
            gap: wp_rho_sigma - wp_mu_nu,
            discretization: self.discretization,
            seed: self.seed,
        })
    }
}

pub fn gap_curve(d: usize, p_list: &[f64], discretization: Discretization, seed: u64) -> Result<Vec<GapRecord>> {
    let eval = GapEvaluator::new(d, discretization, seed)?;
    p_list.iter().map(|&p| eval.gap(p)).collect()
}

/// Result of the bisection for the sign change of the gap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Threshold {
    pub d: usize,
    pub p_hat: f64,
    pub lo: f64,
    pub hi: f64,
    pub tol_p: f64,
    pub gap_at_one: f64,
    pub gap_at_two: f64,
    pub discretization: Discretization,
    pub seed: u64,
}

/// Bisection on `[1, 2]` for the last `p` with a positive gap, to width `tol_p`.
pub fn find_p_threshold(d: usize, tol_p: f64, discretization: Discretization, seed: u64) -> Result<Threshold> {
    if !(tol_p.is_finite() && tol_p > 0.0) {
        return Err(Error::InvalidSpec(format!("tol_p must be positive, got {tol_p}")));
    }
    let eval = GapEvaluator::new(d, discretization, seed)?;
    let gap_lo = eval.gap(1.0)?.gap;
    let gap_hi = eval.gap(2.0)?.gap;
    if !(gap_lo > 0.0 && gap_hi <= 0.0) {
        return Err(Error::NoSignChange {
            lo: 1.0,
            hi: 2.0,
            gap_lo,
            gap_hi,
        });
    }
    let (mut lo, mut hi) = (1.0, 2.0);
    while hi - lo > tol_p {
        let mid = 0.5 * (lo + hi);
        if eval.gap(mid)?.gap > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Threshold {
        d,
        p_hat: 0.5 * (lo + hi),
        lo,
        hi,
        tol_p,
        gap_at_one: gap_lo,
        gap_at_two: gap_hi,
        discretization,
        seed,
    })
}
