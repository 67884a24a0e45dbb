use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;
use crate::ot::CostExponent;

/// Tolerance on plan marginals.
pub const MARGINAL_TOL: f64 = 1e-9;

/// Sparse coupling between two discrete measures.
///
/// Entries `(i, j, mass)` move `mass` from source atom `i` to target atom `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    source: DiscreteMeasure,
    target: DiscreteMeasure,
    entries: Vec<(usize, usize, f64)>,
}

#[derive(Serialize, Deserialize)]
struct PlanFile {
    entries: Vec<(usize, usize, f64)>,
}

impl TransportPlan {
    /// Validates indices and both marginals; nonpositive entries are dropped.
    pub fn new(
        source: DiscreteMeasure,
        target: DiscreteMeasure,
        entries: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        if source.dim() != target.dim() {
            return Err(Error::DimMismatch {
                expected: source.dim(),
                got: target.dim(),
            });
        }
        for &(i, j, m) in &entries {
            if i >= source.len() || j >= target.len() || !m.is_finite() {
                return Err(Error::MarginalMismatch(format!("bad entry ({i}, {j}, {m})")));
            }
        }
        let plan = Self {
            source,
            target,
            entries: entries.into_iter().filter(|e| e.2 > 0.0).collect(),
        };
        let err = plan.marginal_error();
        if err > MARGINAL_TOL {
            return Err(Error::MarginalMismatch(format!(
                "marginals off by {err:e}"
            )));
        }
        Ok(plan)
    }

    /// Plan moving each atom of `mu` onto itself.
    pub fn identity(mu: &DiscreteMeasure) -> Self {
        let entries = mu.weights().iter().enumerate().map(|(i, &w)| (i, i, w)).collect();
        Self {
            source: mu.clone(),
            target: mu.clone(),
            entries,
        }
    }

    pub fn source(&self) -> &DiscreteMeasure {
        &self.source
    }

    pub fn target(&self) -> &DiscreteMeasure {
        &self.target
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut r = vec![0.0; self.source.len()];
        for &(i, _, m) in &self.entries {
            r[i] += m;
        }
        r
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.target.len()];
        for &(_, j, m) in &self.entries {
            c[j] += m;
        }
        c
    }

    /// Largest absolute deviation of either marginal from its measure.
    pub fn marginal_error(&self) -> f64 {
        let rows = self.row_sums();
        let cols = self.col_sums();
        let r = rows
            .iter()
            .zip(self.source.weights())
            .map(|(a, b)| (a - b).abs());
        let c = cols
            .iter()
            .zip(self.target.weights())
            .map(|(a, b)| (a - b).abs());
        r.chain(c).fold(0.0, f64::max)
    }

    /// `sum mass * (x_i - y_j)`, the mean displacement.
    pub fn mean_displacement(&self) -> Vec<f64> {
        let d = self.source.dim();
        let mut out = vec![0.0; d];
        for &(i, j, m) in &self.entries {
            let x = self.source.point(i);
            let y = self.target.point(j);
            for k in 0..d {
                out[k] += m * (x[k] - y[k]);
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&PlanFile {
            entries: self.entries.clone(),
        })?)
    }

    /// Reads entries written by [`TransportPlan::to_json`] for the given marginals.
    pub fn from_json(text: &str, source: DiscreteMeasure, target: DiscreteMeasure) -> Result<Self> {
        let file: PlanFile = serde_json::from_str(text)?;
        Self::new(source, target, file.entries)
    }
}

/// `sum mass * |x_i - y_j|^p`.
pub fn plan_cost(plan: &TransportPlan, p: CostExponent) -> f64 {
    plan.entries
        .iter()
        .map(|&(i, j, m)| m * p.cost(plan.source.point(i), plan.target.point(j)))
        .sum()
}

/// Same entries with every target atom shifted by `h`.
pub fn translate_plan(plan: &TransportPlan, h: &[f64]) -> TransportPlan {
    TransportPlan {
        source: plan.source.clone(),
        target: plan.target.translate(h),
        entries: plan.entries.clone(),
    }
}

fn same_measure(a: &DiscreteMeasure, b: &DiscreteMeasure) -> bool {
    a.len() == b.len()
        && a.dim() == b.dim()
        && a.coords().iter().zip(b.coords()).all(|(x, y)| (x - y).abs() <= 1e-12)
        && a.weights()
            .iter()
            .zip(b.weights())
            .all(|(x, y)| (x - y).abs() <= MARGINAL_TOL)
}

/// Composes `eta: rho -> sigma` with `a: rho -> mu` and `b: sigma -> nu` into a
/// coupling of `mu` and `nu`:
/// `gamma(x, y) = sum_ij eta(i, j) a(i -> x) / rho_i * b(j -> y) / sigma_j`.
///
/// Conditional laws are normalized by the actual row sums of `a` and `b`, so the
/// output marginals match `a` and `b` to rounding.
pub fn glue(eta: &TransportPlan, a: &TransportPlan, b: &TransportPlan) -> Result<TransportPlan> {
    if !same_measure(a.source(), eta.source()) {
        return Err(Error::MarginalMismatch(
            "first leg does not start from the source of eta".into(),
        ));
    }
    if !same_measure(b.source(), eta.target()) {
        return Err(Error::MarginalMismatch(
            "second leg does not start from the target of eta".into(),
        ));
    }
    let conditional = |plan: &TransportPlan| -> Vec<Vec<(usize, f64)>> {
        let rows = plan.row_sums();
        let mut out = vec![Vec::new(); plan.source.len()];
        for &(i, x, m) in &plan.entries {
            out[i].push((x, m / rows[i]));
        }
        out
    };
    let ca = conditional(a);
    let cb = conditional(b);
    let mut acc: HashMap<(usize, usize), f64> = HashMap::new();
    for &(i, j, m) in &eta.entries {
        for &(x, fa) in &ca[i] {
            for &(y, fb) in &cb[j] {
                *acc.entry((x, y)).or_insert(0.0) += m * fa * fb;
            }
        }
    }
    let mut entries: Vec<(usize, usize, f64)> = acc.into_iter().map(|((x, y), m)| (x, y, m)).collect();
    entries.sort_unstable_by_key(|e| (e.0, e.1));
    TransportPlan::new(a.target().clone(), b.target().clone(), entries)
}
