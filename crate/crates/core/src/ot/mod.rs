//! Exact discrete optimal transport.

mod cost;
mod cyclical;
mod one_d;
mod plan;
mod quantile;
pub mod simplex;

pub use cost::CostExponent;
pub use cyclical::{check_cyclical_monotonicity, CyclicalReport, CYCLICAL_TOL};
pub use one_d::{monotone_plan, wasserstein_1d};
pub use plan::{glue, plan_cost, translate_plan, TransportPlan, MARGINAL_TOL};
pub use quantile::QuantileFn;

use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;

/// Largest `n * m` accepted by [`solve_exact`].
pub const MAX_PROBLEM_SIZE: usize = 10_000_000;

/// Optimal plan for the cost `|x - y|^p` by network simplex.
pub fn solve_exact(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: CostExponent) -> Result<TransportPlan> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimMismatch {
            expected: mu.dim(),
            got: nu.dim(),
        });
    }
    let (n, m) = (mu.len(), nu.len());
    let size = n.saturating_mul(m);
    if size > MAX_PROBLEM_SIZE {
        return Err(Error::SizeLimit {
            size,
            limit: MAX_PROBLEM_SIZE,
        });
    }
    let mut cost = Vec::with_capacity(size);
    for x in mu.points() {
        for y in nu.points() {
            cost.push(p.cost(x, y));
        }
    }
    let sol = simplex::solve_transport(mu.weights(), nu.weights(), &cost)?;
    TransportPlan::new(mu.clone(), nu.clone(), sol.flows)
}

/// `W_p(mu, nu)` from an exact plan.
pub fn wasserstein(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: CostExponent) -> Result<f64> {
    let plan = solve_exact(mu, nu, p)?;
    Ok(p.root(plan_cost(&plan, p)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        let mu = DiscreteMeasure::uniform(vec![vec![0.0, 1.0], vec![3.0, -1.0]]).unwrap();
        let plan = solve_exact(&mu, &mu, CostExponent::TWO).unwrap();
        assert_eq!(plan_cost(&plan, CostExponent::TWO), 0.0);

        let d = DiscreteMeasure::dirac(vec![0.0, 0.0]).unwrap();
        let nu = DiscreteMeasure::uniform(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let plan = solve_exact(&d, &nu, CostExponent::TWO).unwrap();
        assert!((plan_cost(&plan, CostExponent::TWO) - 1.0).abs() < 1e-15);

        let mu = DiscreteMeasure::uniform(vec![vec![2.0, 0.0], vec![-2.0, 0.0]]).unwrap();
        let nu = DiscreteMeasure::uniform(vec![vec![0.5, 1.0], vec![-0.5, -1.0]]).unwrap();
        let plan = solve_exact(&mu, &nu, CostExponent::TWO).unwrap();
        assert!((plan_cost(&plan, CostExponent::TWO) - 3.25).abs() < 1e-12);
        assert_eq!(plan.entries(), &[(0, 0, 0.5), (1, 1, 0.5)]);
    }

    #[test]
    fn size_and_dim_checks() {
        let a = DiscreteMeasure::dirac(vec![0.0]).unwrap();
        let b = DiscreteMeasure::dirac(vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            solve_exact(&a, &b, CostExponent::TWO),
            Err(Error::DimMismatch { .. })
        ));
    }
}
