use proptest::prelude::*;

use wproj::measures::DiscreteMeasure;
use wproj::ot::{monotone_plan, plan_cost, solve_exact, wasserstein, wasserstein_1d, CostExponent, QuantileFn};
use wproj::proj1d::{projection_1d, projection_from_quantile, ProjectionSpec1D};

fn measure(d: usize, max_atoms: usize) -> impl Strategy<Value = DiscreteMeasure> {
    prop::collection::vec((prop::collection::vec(-2.0..2.0f64, d), 0.05..1.0f64), 1..=max_atoms).prop_map(move |atoms| {
        let (points, weights): (Vec<_>, Vec<_>) = atoms.into_iter().unzip();
        DiscreteMeasure::new(points, weights).unwrap()
    })
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(2.0), 1.0..3.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn plans_have_the_right_marginals(mu in measure(2, 8), nu in measure(2, 8), p in exponent()) {
        let plan = solve_exact(&mu, &nu, CostExponent::new(p).unwrap()).unwrap();
        for (a, b) in plan.row_sums().iter().zip(mu.weights()) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
        for (a, b) in plan.col_sums().iter().zip(nu.weights()) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn wasserstein_is_a_metric(a in measure(2, 6), b in measure(2, 6), c in measure(2, 6), p in exponent()) {
        let p = CostExponent::new(p).unwrap();
        let ab = wasserstein(&a, &b, p).unwrap();
        let ba = wasserstein(&b, &a, p).unwrap();
        let bc = wasserstein(&b, &c, p).unwrap();
        let ac = wasserstein(&a, &c, p).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-9 * (1.0 + ab));
        prop_assert!(ac <= ab + bc + 1e-9);
        prop_assert!(wasserstein(&a, &a, p).unwrap() <= 1e-9);
    }

    #[test]
    fn simplex_agrees_with_quantiles_on_the_line(mu in measure(1, 10), nu in measure(1, 10), p in exponent()) {
        let p = CostExponent::new(p).unwrap();
        let simplex = plan_cost(&solve_exact(&mu, &nu, p).unwrap(), p);
        let closed = wasserstein_1d(&mu, &nu, p).unwrap().powf(p.value());
        prop_assert!((simplex - closed).abs() <= 1e-9 * (1.0 + closed));
        // the monotone plan is optimal for every convex cost
        let monotone = plan_cost(&monotone_plan(&mu, &nu).unwrap(), p);
        prop_assert!((monotone - closed).abs() <= 1e-9 * (1.0 + closed));
    }

    #[test]
    fn projection_is_idempotent(mu in measure(1, 12), p in prop_oneof![Just(2.0), 1.2..3.0f64]) {
        let spec = ProjectionSpec1D::new(p, 1.0, 256).unwrap();
        let once = projection_1d(&mu, &spec).unwrap();
        let twice = projection_from_quantile(&once.quantile, &spec).unwrap();
        for (a, b) in once.cells.iter().zip(&twice.cells) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn projection_is_nonexpansive_at_p_two(mu in measure(1, 12), nu in measure(1, 12)) {
        let spec = ProjectionSpec1D::new(2.0, 1.0, 512).unwrap();
        let two = CostExponent::TWO;
        let pm = projection_1d(&mu, &spec).unwrap();
        let pn = projection_1d(&nu, &spec).unwrap();
        let lhs = pm.quantile.lp_distance(&pn.quantile, two);
        prop_assert!(lhs <= wasserstein_1d(&mu, &nu, two).unwrap() + 1e-9);
    }

    #[test]
    fn projection_commutes_with_translation(mu in measure(1, 12), h in -5.0..5.0f64, p in prop_oneof![Just(2.0), 1.2..3.0f64]) {
        let spec = ProjectionSpec1D::new(p, 1.0, 256).unwrap();
        let a = projection_1d(&mu, &spec).unwrap();
        let b = projection_1d(&mu.translate(&[h]), &spec).unwrap();
        for (x, y) in a.cells.iter().zip(&b.cells) {
            prop_assert!((x + h - y).abs() <= 1e-9 * (1.0 + h.abs() + x.abs()));
        }
    }

    #[test]
    fn projection_respects_the_density_cap(mu in measure(1, 12), lambda in 0.5..4.0f64) {
        let spec = ProjectionSpec1D::new(2.0, lambda, 256).unwrap();
        let proj = projection_1d(&mu, &spec).unwrap();
        prop_assert!(proj.quantile.min_slope() >= (1.0 / lambda) * (1.0 - 1e-9));
        let q = QuantileFn::from_discrete(&mu).unwrap();
        prop_assert!((proj.mean() - q.mean()).abs() <= 1e-9 * (1.0 + q.mean().abs()));
    }
}
