//! Executable versions of the structural properties of the projection, each
//! reported with its slack.
//!
//! One-dimensional inputs go through the exact quantile pipeline of [`crate::proj1d`];
//! higher dimensions use grid projections from [`crate::projnd`] and exact
//! discrete transport between the atomized grid measures.

mod instances;
mod report;
mod suite;

pub use instances::{random_discrete, random_discrete_1d, random_unit_density_1d};
pub use report::CheckReport;
pub use suite::{run_suite, SUITE_ATOMS_1D, SUITE_ATOMS_ND};

use crate::error::{Error, Result};
use crate::measures::{rad_ball, DiscreteMeasure, GridSpec};
use crate::ot::{
    glue, monotone_plan, plan_cost, solve_exact, wasserstein_1d, CostExponent, QuantileFn,
    TransportPlan,
};
use crate::proj1d::{projection_1d, Projection1D, ProjectionSpec1D};
use crate::projnd::{project_capacitated, CapacitatedInstance, CapacitatedProjection};

/// Tolerance of checks run through the exact one-dimensional pipeline.
pub const EXACT_TOL: f64 = 1e-6;

/// Tolerance of barycenter preservation in one dimension.
pub const EXACT_BARYCENTER_TOL: f64 = 1e-9;

/// Resolution shared by all checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckConfig {
    pub lambda: f64,
    /// Grid spacing for `d >= 2`.
    pub spacing: f64,
    /// Number of level cells for `d = 1`.
    pub cells_1d: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            spacing: 0.05,
            cells_1d: crate::proj1d::DEFAULT_CELLS,
        }
    }
}

impl CheckConfig {
    fn spec_1d(&self, p: CostExponent) -> Result<ProjectionSpec1D> {
        ProjectionSpec1D::new(p.value(), self.lambda, self.cells_1d)
    }

    /// Lattice-aligned grid around `mu` large enough to hold its projection.
    pub fn grid_for(&self, mu: &DiscreteMeasure) -> Result<GridSpec> {
        let (lo, hi) = mu.bounding_box();
        let pad = rad_ball(mu.dim(), 1.0 / self.lambda) + 2.0 * self.spacing;
        let lo: Vec<f64> = lo.iter().map(|v| v - pad).collect();
        let hi: Vec<f64> = hi.iter().map(|v| v + pad).collect();
        GridSpec::covering(&lo, &hi, self.spacing)
    }

    /// `4 * diam * spacing`, the first-order allowance of grid pipelines.
    pub fn grid_tolerance(&self, diam: f64) -> f64 {
        4.0 * diam * self.spacing
    }
}

fn grid_projection(
    mu: &DiscreteMeasure,
    grid: GridSpec,
    p: CostExponent,
    cfg: &CheckConfig,
) -> Result<(CapacitatedProjection, DiscreteMeasure)> {
    let inst = CapacitatedInstance::new(mu.clone(), grid, cfg.lambda, p)?;
    let proj = project_capacitated(&inst)?;
    let atoms = proj.measure.to_discrete().0;
    Ok((proj, atoms))
}

/// Diameter of the bounding box of all supports.
fn instance_diameter(parts: &[&DiscreteMeasure]) -> f64 {
    let d = parts[0].dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for m in parts {
        let (a, b) = m.bounding_box();
        for k in 0..d {
            lo[k] = lo[k].min(a[k]);
            hi[k] = hi[k].max(b[k]);
        }
    }
    lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
}

fn dims_agree(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<usize> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimMismatch {
            expected: mu.dim(),
            got: nu.dim(),
        });
    }
    Ok(mu.dim())
}

fn w2sq(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    Ok(plan_cost(&solve_exact(mu, nu, CostExponent::TWO)?, CostExponent::TWO))
}

fn exact_pair(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: CostExponent,
    cfg: &CheckConfig,
) -> Result<(Projection1D, Projection1D)> {
    let spec = cfg.spec_1d(p)?;
    Ok((projection_1d(mu, &spec)?, projection_1d(nu, &spec)?))
}

/// `W_2^2(P[mu], P[nu]) <= int |x - y|^2 d gamma` for the glued plan
/// `gamma = (T, U)_# eta`, where `eta` is optimal between the projections and
/// `T`, `U` are optimal plans back to `mu`, `nu`.
///
/// On the line all three plans are monotone, so `gamma` is the monotone coupling
/// of `mu` and `nu` and the right side is computed from it directly.
pub fn check_weak_nonexpansiveness(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let d = dims_agree(mu, nu)?;
    let two = CostExponent::TWO;
    if d == 1 {
        let (pm, pn) = exact_pair(mu, nu, two, cfg)?;
        let lhs = pm.quantile.lp_distance_pow(&pn.quantile, two);
        let gamma = monotone_plan(mu, nu)?;
        let rhs = plan_cost(&gamma, two);
        return Ok(CheckReport::new("weak_nonexpansive", 1, 2.0, lhs, rhs, EXACT_TOL)
            .with_metadata(format!("exact n={}", cfg.cells_1d)));
    }
    let (_, rho) = grid_projection(mu, cfg.grid_for(mu)?, two, cfg)?;
    let (_, sigma) = grid_projection(nu, cfg.grid_for(nu)?, two, cfg)?;
    let eta = solve_exact(&rho, &sigma, two)?;
    let a = solve_exact(&rho, mu, two)?;
    let b = solve_exact(&sigma, nu, two)?;
    let gamma = glue(&eta, &a, &b)?;
    let lhs = plan_cost(&eta, two);
    let rhs = plan_cost(&gamma, two);
    let tol = cfg.grid_tolerance(instance_diameter(&[mu, nu, &rho, &sigma]));
    Ok(CheckReport::new("weak_nonexpansive", d, 2.0, lhs, rhs, tol)
        .with_metadata(format!("grid h={}", cfg.spacing)))
}

/// On the line, the glued plan of [`check_weak_nonexpansiveness`] is optimal:
/// its cost equals `W_2^2(mu, nu)` computed by the network simplex.
pub fn check_glued_plan_optimal_1d(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<CheckReport> {
    let two = CostExponent::TWO;
    let gamma = plan_cost(&monotone_plan(mu, nu)?, two);
    let exact = w2sq(mu, nu)?;
    Ok(CheckReport::equality("glued_plan_optimal", 1, 2.0, gamma, exact, EXACT_TOL))
}

/// `W_p(P[mu], P[nu]) <= W_p(mu, nu)`.
///
/// Asserted for `p = 2` on the line and for a Dirac `nu` at `p = 2`; reported
/// only otherwise.
pub fn check_nonexpansive(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: CostExponent,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let d = dims_agree(mu, nu)?;
    let is_two = p.value() == 2.0;
    let report = if d == 1 {
        let (pm, pn) = exact_pair(mu, nu, p, cfg)?;
        let lhs = pm.quantile.lp_distance(&pn.quantile, p);
        let rhs = wasserstein_1d(mu, nu, p)?;
        CheckReport::new("nonexpansive", 1, p.value(), lhs, rhs, EXACT_TOL)
            .with_metadata(format!("exact n={}", cfg.cells_1d))
    } else {
        let (_, rho) = grid_projection(mu, cfg.grid_for(mu)?, p, cfg)?;
        let (_, sigma) = grid_projection(nu, cfg.grid_for(nu)?, p, cfg)?;
        let lhs = p.root(plan_cost(&solve_exact(&rho, &sigma, p)?, p));
        let rhs = p.root(plan_cost(&solve_exact(mu, nu, p)?, p));
        let tol = cfg.grid_tolerance(instance_diameter(&[mu, nu, &rho, &sigma]));
        CheckReport::new("nonexpansive", d, p.value(), lhs, rhs, tol)
            .with_metadata(format!("grid h={}", cfg.spacing))
    };
    let asserted = is_two && (d == 1 || nu.len() == 1 || mu.len() == 1);
    Ok(if asserted { report } else { report.informative() })
}

/// `|barycenter(P[mu]) - barycenter(mu)|` within `1e-9` on the line and
/// `2 * spacing` on grids (`p = 2`).
pub fn check_barycenter_preservation(mu: &DiscreteMeasure, cfg: &CheckConfig) -> Result<CheckReport> {
    let d = mu.dim();
    let two = CostExponent::TWO;
    let want = mu.barycenter();
    if d == 1 {
        let proj = projection_1d(mu, &cfg.spec_1d(two)?)?;
        return Ok(
            CheckReport::equality("barycenter", 1, 2.0, proj.mean(), want[0], EXACT_BARYCENTER_TOL)
                .with_metadata(format!("exact n={}", cfg.cells_1d)),
        );
    }
    let (proj, _) = grid_projection(mu, cfg.grid_for(mu)?, two, cfg)?;
    let got = proj.measure.barycenter();
    let err = got
        .iter()
        .zip(&want)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(CheckReport::new("barycenter", d, 2.0, err, 2.0 * cfg.spacing, 0.0)
        .with_metadata(format!("grid h={}", cfg.spacing)))
}

/// `W_2^2(mu, nu) - W_2^2(P mu, P nu) = W_2^2(mu, nu') - W_2^2(P mu, P nu')` for
/// `nu' = nu + h`. On grids `h` must be a multiple of the spacing in every axis
/// and `nu'` is projected on the translated grid.
pub fn check_translation_invariance(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    h: &[f64],
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let d = dims_agree(mu, nu)?;
    if h.len() != d {
        return Err(Error::DimMismatch {
            expected: d,
            got: h.len(),
        });
    }
    let two = CostExponent::TWO;
    let nu_h = nu.translate(h);
    if d == 1 {
        let spec = cfg.spec_1d(two)?;
        let pm = projection_1d(mu, &spec)?;
        let pn = projection_1d(nu, &spec)?;
        let pnh = projection_1d(&nu_h, &spec)?;
        let left = wasserstein_1d(mu, nu, two)?.powi(2) - pm.quantile.lp_distance_pow(&pn.quantile, two);
        let right = wasserstein_1d(mu, &nu_h, two)?.powi(2) - pm.quantile.lp_distance_pow(&pnh.quantile, two);
        return Ok(CheckReport::equality("translation_invariance", 1, 2.0, left, right, EXACT_TOL)
            .with_metadata(format!("exact n={} h={:?}", cfg.cells_1d, h)));
    }
    for &hk in h {
        let steps = hk / cfg.spacing;
        if (steps - steps.round()).abs() > 1e-9 * steps.abs().max(1.0) {
            return Err(Error::InvalidSpec(format!(
                "translation {hk} is not a multiple of the spacing {}",
                cfg.spacing
            )));
        }
    }
    let grid_nu = cfg.grid_for(nu)?;
    let (_, rho) = grid_projection(mu, cfg.grid_for(mu)?, two, cfg)?;
    let (_, sigma) = grid_projection(nu, grid_nu.clone(), two, cfg)?;
    let (_, sigma_h) = grid_projection(&nu_h, grid_nu.translate(h), two, cfg)?;
    let left = w2sq(mu, nu)? - w2sq(&rho, &sigma)?;
    let right = w2sq(mu, &nu_h)? - w2sq(&rho, &sigma_h)?;
    let tol = cfg.grid_tolerance(instance_diameter(&[mu, nu, &nu_h, &rho, &sigma, &sigma_h]));
    Ok(CheckReport::equality("translation_invariance", d, 2.0, left, right, tol)
        .with_metadata(format!("grid h={} shift={:?}", cfg.spacing, h)))
}

/// Density of the displacement interpolant `(1 - t) Q0 + t Q1` stays below
/// `lambda` when both endpoints do.
pub fn check_geodesic_density_bound_1d(
    q0: &QuantileFn,
    q1: &QuantileFn,
    t_list: &[f64],
    lambda: f64,
) -> Result<CheckReport> {
    let floor = 1.0 / lambda;
    for (name, q) in [("first", q0), ("second", q1)] {
        if q.min_slope() < floor * (1.0 - 1e-9) {
            return Err(Error::InfeasibleInput(format!(
                "{name} endpoint has density {} above {lambda}",
                1.0 / q.min_slope()
            )));
        }
    }
    let mut worst = 0.0f64;
    for &t in t_list {
        let qt = q0.interpolate(q1, t);
        worst = worst.max(1.0 / qt.min_slope());
    }
    Ok(CheckReport::new("geodesic_density_bound", 1, 2.0, worst, lambda, 1e-9)
        .with_metadata(format!("t={t_list:?}")))
}

/// Optimal plans between `mu = (delta_(r,0) + delta_(-r,0)) / 2` and
/// `nu_t = (delta_(t,1) + delta_(-t,-1)) / 2` swap partners as `t` changes sign,
/// while the glued plan keeps the same support at `t = +-eps` and moves little.
///
/// Reports `lhs` = total variation between the glued plans at `+-eps` and
/// `rhs` = total variation between the optimal plans at `+-t_far`; passes when
/// the optimal matchings differ, the glued supports agree and `lhs < rhs`.
pub fn check_plan_discontinuity(r: f64, t_far: f64, eps: f64, cfg: &CheckConfig) -> Result<CheckReport> {
    let two = CostExponent::TWO;
    let mu = DiscreteMeasure::uniform(vec![vec![r, 0.0], vec![-r, 0.0]])?;
    let nu = |t: f64| DiscreteMeasure::uniform(vec![vec![t, 1.0], vec![-t, -1.0]]);
    let dense = |plan: &TransportPlan| {
        let mut m = [[0.0; 2]; 2];
        for &(i, j, f) in plan.entries() {
            m[i][j] += f;
        }
        m
    };
    let tv = |a: [[f64; 2]; 2], b: [[f64; 2]; 2]| {
        0.5 * (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| (a[i][j] - b[i][j]).abs())
            .sum::<f64>()
    };
    let opt_plus = dense(&solve_exact(&mu, &nu(t_far)?, two)?);
    let opt_minus = dense(&solve_exact(&mu, &nu(-t_far)?, two)?);
    let flipped = opt_plus[0][0] > 0.25 && opt_minus[0][1] > 0.25;

    let (_, rho) = grid_projection(&mu, cfg.grid_for(&mu)?, two, cfg)?;
    let a = solve_exact(&rho, &mu, two)?;
    let glued = |t: f64| -> Result<[[f64; 2]; 2]> {
        let nu_t = nu(t)?;
        let (_, sigma) = grid_projection(&nu_t, cfg.grid_for(&nu_t)?, two, cfg)?;
        let eta = solve_exact(&rho, &sigma, two)?;
        let b = solve_exact(&sigma, &nu_t, two)?;
        Ok(dense(&glue(&eta, &a, &b)?))
    };
    let g_plus = glued(eps)?;
    let g_minus = glued(-eps)?;
    let support = |m: [[f64; 2]; 2]| m.map(|row| row.map(|v| v > 1e-9));
    let same_support = support(g_plus) == support(g_minus);
    let lhs = tv(g_plus, g_minus);
    let rhs = tv(opt_plus, opt_minus);
    let mut report = CheckReport::new("plan_discontinuity", 2, 2.0, lhs, rhs, 0.0).with_metadata(format!(
        "r={r} t={t_far} eps={eps} flipped={flipped} same_support={same_support}"
    ));
    report.pass = report.pass && report.slack > 0.0 && flipped && same_support;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dm(points: Vec<Vec<f64>>, w: Vec<f64>) -> DiscreteMeasure {
        DiscreteMeasure::new(points, w).unwrap()
    }

    fn cfg1() -> CheckConfig {
        CheckConfig {
            cells_1d: 512,
            ..CheckConfig::default()
        }
    }

    #[test]
    fn equal_inputs_have_zero_lhs() {
        let mu = dm(vec![vec![0.0], vec![0.2]], vec![1.0, 1.0]);
        let r = check_weak_nonexpansiveness(&mu, &mu, &cfg1()).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn one_dimensional_suite() {
        let mu = dm(vec![vec![0.0], vec![0.3], vec![1.5]], vec![1.0, 2.0, 1.0]);
        let nu = dm(vec![vec![-1.0], vec![0.1]], vec![3.0, 1.0]);
        let cfg = cfg1();
        assert!(check_weak_nonexpansiveness(&mu, &nu, &cfg).unwrap().pass);
        assert!(check_glued_plan_optimal_1d(&mu, &nu).unwrap().pass);
        let r = check_nonexpansive(&mu, &nu, CostExponent::TWO, &cfg).unwrap();
        assert!(r.pass && r.asserted);
        assert!(check_barycenter_preservation(&mu, &cfg).unwrap().pass);
        let r = check_translation_invariance(&mu, &nu, &[0.37], &cfg).unwrap();
        assert!(r.pass, "{r:?}");
        let r = check_translation_invariance(&mu, &nu, &[0.0], &cfg).unwrap();
        assert!(r.lhs < 1e-12);
    }

    #[test]
    fn geodesic_between_translates() {
        let a = QuantileFn::uniform(-0.5, 0.5).unwrap();
        let b = QuantileFn::uniform(9.5, 10.5).unwrap();
        let r = check_geodesic_density_bound_1d(&a, &b, &[0.5], 1.0).unwrap();
        assert!(r.pass);
        assert!((r.lhs - 1.0).abs() < 1e-12);
        let dense = QuantileFn::uniform(0.0, 0.5).unwrap();
        assert!(matches!(
            check_geodesic_density_bound_1d(&dense, &b, &[0.5], 1.0),
            Err(Error::InfeasibleInput(_))
        ));
    }

    #[test]
    fn grid_translation_needs_lattice_shift() {
        let mu = DiscreteMeasure::dirac(vec![0.0, 0.0]).unwrap();
        let cfg = CheckConfig::default();
        assert!(check_translation_invariance(&mu, &mu, &[0.013, 0.0], &cfg).is_err());
    }

    #[test]
    fn dirac_target_in_two_dimensions() {
        let r = rad_ball(2, 0.5);
        let mu = DiscreteMeasure::uniform(vec![vec![0.0, 0.0], vec![2.0 * r, 0.0]]).unwrap();
        let nu = DiscreteMeasure::dirac(vec![0.0, 0.0]).unwrap();
        let cfg = CheckConfig {
            spacing: 0.05,
            ..CheckConfig::default()
        };
        let rep = check_nonexpansive(&mu, &nu, CostExponent::TWO, &cfg).unwrap();
        assert!(rep.asserted && rep.pass, "{rep:?}");
        let rep = check_weak_nonexpansiveness(&mu, &nu, &cfg).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn plan_discontinuity() {
        let cfg = CheckConfig {
            spacing: 0.05,
            ..CheckConfig::default()
        };
        let r = check_plan_discontinuity(2.0, 0.1, 0.05, &cfg).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
