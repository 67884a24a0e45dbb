//! The full property suite on seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    check_barycenter_preservation, check_geodesic_density_bound_1d, check_glued_plan_optimal_1d,
    check_nonexpansive, check_translation_invariance, check_weak_nonexpansiveness, random_discrete,
    random_discrete_1d, random_unit_density_1d, CheckConfig, CheckReport,
};
use crate::error::Result;
use crate::measures::DiscreteMeasure;
use crate::ot::CostExponent;

/// Atoms per measure in one dimension.
pub const SUITE_ATOMS_1D: usize = 20;
/// Atoms per measure in higher dimensions, where every check runs grid projections.
pub const SUITE_ATOMS_ND: usize = 3;

fn instance(rng: &mut ChaCha8Rng, d: usize) -> Result<DiscreteMeasure> {
    if d == 1 {
        random_discrete_1d(rng, SUITE_ATOMS_1D)
    } else {
        let atoms = rng.random_range(1..=SUITE_ATOMS_ND);
        random_discrete(rng, d, atoms, 0.5)
    }
}

/// Every check on one random pair drawn from `seed`. Nonexpansiveness runs at
/// `p`; the other checks are statements about `p = 2`.
pub fn run_suite(d: usize, p: CostExponent, seed: u64, cfg: &CheckConfig) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = instance(&mut rng, d)?;
    let nu = instance(&mut rng, d)?;
    let h: Vec<f64> = if d == 1 {
        vec![rng.random_range(-2.0..=2.0)]
    } else {
        (0..d).map(|_| rng.random_range(-10i32..=10) as f64 * cfg.spacing).collect()
    };
    let mut out = vec![
        check_nonexpansive(&mu, &nu, p, cfg)?,
        check_weak_nonexpansiveness(&mu, &nu, cfg)?,
        check_barycenter_preservation(&mu, cfg)?,
        check_translation_invariance(&mu, &nu, &h, cfg)?,
    ];
    if d == 1 {
        out.push(check_glued_plan_optimal_1d(&mu, &nu)?);
        let q0 = random_unit_density_1d(&mut rng, 3)?;
        let q1 = random_unit_density_1d(&mut rng, 3)?;
        let ts: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        out.push(check_geodesic_density_bound_1d(&q0, &q1, &ts, 1.0)?);
    }
    for r in &mut out {
        let meta = if r.metadata.is_empty() {
            format!("seed={seed}")
        } else {
            format!("seed={seed} {}", r.metadata)
        };
        r.metadata = meta;
    }
    Ok(out)
}
