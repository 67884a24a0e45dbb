use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ot::{CostExponent, TransportPlan};

/// Outcome of a randomized cyclical-monotonicity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CyclicalReport {
    pub pass: bool,
    /// Largest `sum c(x_i, y_i) - sum c(x_i, y_sigma(i))` seen; positive means the
    /// support can be rearranged more cheaply.
    pub worst_violation: f64,
    pub tuples_checked: usize,
}

/// Allowed violation relative to the cost scale of the tested tuple.
pub const CYCLICAL_TOL: f64 = 1e-9;

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Samples `trials` k-tuples of support pairs and compares the plan's pairing
/// with rearrangements: every permutation for `k <= 4`, cyclic shifts otherwise.
pub fn check_cyclical_monotonicity(
    plan: &TransportPlan,
    p: CostExponent,
    k: usize,
    trials: usize,
    seed: u64,
) -> CyclicalReport {
    assert!(k >= 2, "cycle length must be at least 2");
    let support = plan.entries();
    let k = k.min(support.len());
    if k < 2 {
        return CyclicalReport {
            pass: true,
            worst_violation: 0.0,
            tuples_checked: 0,
        };
    }
    let sigmas: Vec<Vec<usize>> = if k <= 4 {
        permutations(k)
    } else {
        (1..k).map(|s| (0..k).map(|i| (i + s) % k).collect()).collect()
    };
    let src = plan.source();
    let tgt = plan.target();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    let mut pass = true;
    for _ in 0..trials {
        let pick = sample(&mut rng, support.len(), k).into_vec();
        let pairs: Vec<(usize, usize)> = pick.iter().map(|&e| (support[e].0, support[e].1)).collect();
        let base: f64 = pairs.iter().map(|&(i, j)| p.cost(src.point(i), tgt.point(j))).sum();
        for sigma in &sigmas {
            let alt: f64 = (0..k)
                .map(|a| p.cost(src.point(pairs[a].0), tgt.point(pairs[sigma[a]].1)))
                .sum();
            let v = base - alt;
            worst = worst.max(v);
            if v > CYCLICAL_TOL * (1.0 + base.abs()) {
                pass = false;
            }
        }
    }
    CyclicalReport {
        pass,
        worst_violation: worst.max(0.0),
        tuples_checked: trials,
    }
}
