use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;
use crate::ot::{CostExponent, QuantileFn, TransportPlan};

/// `W_p` between one-dimensional discrete measures through their quantiles.
pub fn wasserstein_1d(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: CostExponent) -> Result<f64> {
    let qa = QuantileFn::from_discrete(mu)?;
    let qb = QuantileFn::from_discrete(nu)?;
    Ok(qa.lp_distance(&qb, p))
}

fn sorted_order(m: &DiscreteMeasure) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..m.len()).collect();
    idx.sort_by(|&a, &b| m.coords()[a].total_cmp(&m.coords()[b]));
    idx
}

/// The comonotone coupling of two one-dimensional measures (sorted north-west
/// corner rule); optimal for every convex cost of `x - y`.
pub fn monotone_plan(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<TransportPlan> {
    for m in [mu, nu] {
        if m.dim() != 1 {
            return Err(Error::DimMismatch {
                expected: 1,
                got: m.dim(),
            });
        }
    }
    let a = sorted_order(mu);
    let b = sorted_order(nu);
    let mut entries = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut ra = mu.weight(a[0]);
    let mut rb = nu.weight(b[0]);
    while i < a.len() && j < b.len() {
        let last_i = i + 1 == a.len();
        let last_j = j + 1 == b.len();
        // the final row or column absorbs rounding leftovers
        let f = if last_i { rb } else if last_j { ra } else { ra.min(rb) };
        if f > 0.0 {
            entries.push((a[i], b[j], f));
        }
        ra -= f;
        rb -= f;
        if last_i && last_j {
            break;
        }
        if (ra <= rb && !last_i) || last_j {
            i += 1;
            ra = mu.weight(a[i]);
        } else {
            j += 1;
            rb = nu.weight(b[j]);
        }
    }
    TransportPlan::new(mu.clone(), nu.clone(), entries)
}
