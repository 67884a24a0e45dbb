use crate::error::{Error, Result};
use crate::measures::{DiscreteMeasure, GridMeasure, GridSpec};
use crate::ot::simplex::solve_transport;
use crate::ot::{CostExponent, TransportPlan, MAX_PROBLEM_SIZE};

/// Projection of a discrete measure onto densities `<= lambda` that are constant
/// on the cells of a grid.
#[derive(Debug, Clone)]
pub struct CapacitatedInstance {
    pub source: DiscreteMeasure,
    pub grid: GridSpec,
    pub lambda: f64,
    pub p: CostExponent,
}

impl CapacitatedInstance {
    pub fn new(source: DiscreteMeasure, grid: GridSpec, lambda: f64, p: CostExponent) -> Result<Self> {
        let inst = Self {
            source,
            grid,
            lambda,
            p,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.source.dim() != self.grid.dim() {
            return Err(Error::DimMismatch {
                expected: self.grid.dim(),
                got: self.source.dim(),
            });
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidSpec(format!("lambda must be positive, got {}", self.lambda)));
        }
        let capacity = self.capacity();
        if capacity < 1.0 - 1e-12 {
            return Err(Error::InfeasibleCapacity { capacity });
        }
        let hi = self.grid.upper();
        for (i, x) in self.source.points().enumerate() {
            let inside = x
                .iter()
                .zip(self.grid.origin())
                .zip(&hi)
                .all(|((v, lo), hi)| *v >= *lo && *v <= *hi);
            if !inside {
                return Err(Error::AtomOutsideGrid { index: i });
            }
        }
        Ok(())
    }

    /// `lambda` times the grid volume.
    pub fn capacity(&self) -> f64 {
        self.lambda * self.grid.cell_volume() * self.grid.n_cells() as f64
    }

    /// Same problem moved by `h`.
    pub fn translate(&self, h: &[f64]) -> Self {
        Self {
            source: self.source.translate(h),
            grid: self.grid.translate(h),
            lambda: self.lambda,
            p: self.p,
        }
    }
}

/// Output of [`project_capacitated`].
#[derive(Debug, Clone)]
pub struct CapacitatedProjection {
    pub measure: GridMeasure,
    /// Plan from the source atoms to the atomized grid measure (cell centres).
    pub plan: TransportPlan,
    /// `sum f_ij c_ij` with `c_ij` the mean of `|x_i - y|^p` over cell `j`.
    pub cost: f64,
    pub p: CostExponent,
}

impl CapacitatedProjection {
    /// `W_p(mu, P[mu])` for the piecewise-constant projection.
    pub fn distance(&self) -> f64 {
        self.p.root(self.cost)
    }
}

/// Tensor Gauss-Legendre rule on `[-1/2, 1/2]^d`: offsets (flattened) and weights.
fn cell_rule(d: usize) -> (Vec<f64>, Vec<f64>) {
    let (nodes, weights): (&[f64], &[f64]) = match d {
        1 | 2 => (
            &[-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6],
            &[0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9],
        ),
        3 => (
            &[-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4],
            &[5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0],
        ),
        _ => (&[-0.577_350_269_189_625_8, 0.577_350_269_189_625_8], &[1.0, 1.0]),
    };
    let q = nodes.len();
    let total = q.pow(d as u32);
    let mut offsets = Vec::with_capacity(total * d);
    let mut w = Vec::with_capacity(total);
    for t in 0..total {
        let mut r = t;
        let mut wt = 1.0;
        let start = offsets.len();
        offsets.resize(start + d, 0.0);
        for k in (0..d).rev() {
            let i = r % q;
            r /= q;
            offsets[start + k] = 0.5 * nodes[i];
            wt *= 0.5 * weights[i];
        }
        w.push(wt);
    }
    (offsets, w)
}

/// Row-major matrix of cell-averaged costs `mean_{y in cell j} |x_i - y|^p`.
///
/// `p = 2` is exact (`|x - g_j|^2` plus the cell's second moment); other exponents
/// use a tensor Gauss-Legendre rule.
fn cell_cost_matrix(inst: &CapacitatedInstance) -> Vec<f64> {
    let d = inst.grid.dim();
    let n = inst.source.len();
    let cells = inst.grid.n_cells();
    let h = inst.grid.spacing();
    let mut cost = Vec::with_capacity(n * cells);
    let mut center = vec![0.0; d];
    let mut y = vec![0.0; d];
    if inst.p.value() == 2.0 {
        let second_moment: f64 = h.iter().map(|s| s * s / 12.0).sum();
        for x in inst.source.points() {
            for j in 0..cells {
                inst.grid.cell_center_into(j, &mut center);
                cost.push(CostExponent::TWO.cost(x, &center) + second_moment);
            }
        }
        return cost;
    }
    let (offsets, weights) = cell_rule(d);
    for x in inst.source.points() {
        for j in 0..cells {
            inst.grid.cell_center_into(j, &mut center);
            let mut c = 0.0;
            for (off, &w) in offsets.chunks_exact(d).zip(&weights) {
                for k in 0..d {
                    y[k] = center[k] + off[k] * h[k];
                }
                c += w * inst.p.cost(x, &y);
            }
            cost.push(c);
        }
    }
    cost
}

/// Solves `min sum f_ij c_ij` over `f >= 0` with row sums `w_i` and column sums at
/// most `lambda * cellvol`.
///
/// Unused capacity is absorbed by a slack source of supply `capacity - 1` with
/// zero-cost arcs to every cell, which turns the inequality constraints into an
/// ordinary balanced transportation problem.
pub fn project_capacitated(inst: &CapacitatedInstance) -> Result<CapacitatedProjection> {
    inst.validate()?;
    let n = inst.source.len();
    let cells = inst.grid.n_cells();
    let size = (n + 1).saturating_mul(cells);
    if size > MAX_PROBLEM_SIZE {
        return Err(Error::SizeLimit {
            size,
            limit: MAX_PROBLEM_SIZE,
        });
    }
    let cap = inst.lambda * inst.grid.cell_volume();
    let mut cost = cell_cost_matrix(inst);
    cost.extend(std::iter::repeat_n(0.0, cells));
    let mut supply = inst.source.weights().to_vec();
    let demand = vec![cap; cells];
    let total_cap: f64 = demand.iter().sum();
    supply.push((total_cap - 1.0).max(0.0));
    // rounding in the capacity total must not unbalance the problem
    let supply_total: f64 = supply.iter().sum();
    let mut demand = demand;
    let fix = supply_total / total_cap;
    demand.iter_mut().for_each(|c| *c *= fix);

    let sol = solve_transport(&supply, &demand, &cost)?;
    let mut mass = vec![0.0; cells];
    let mut total = 0.0;
    for &(i, j, f) in &sol.flows {
        if i < n {
            mass[j] += f;
            total += f * cost[i * cells + j];
        }
    }
    for m in mass.iter_mut() {
        *m = m.min(cap);
    }
    let measure = GridMeasure::new(inst.grid.clone(), mass, inst.lambda)?;
    let (atoms, atom_cells) = measure.to_discrete();
    let mut atom_of_cell = vec![usize::MAX; cells];
    for (a, &c) in atom_cells.iter().enumerate() {
        atom_of_cell[c] = a;
    }
    let entries = sol
        .flows
        .iter()
        .filter(|&&(i, j, _)| i < n && atom_of_cell[j] != usize::MAX)
        .map(|&(i, j, f)| (i, atom_of_cell[j], f))
        .collect();
    let plan = TransportPlan::new(inst.source.clone(), atoms, entries)?;
    Ok(CapacitatedProjection {
        measure,
        plan,
        cost: total,
        p: inst.p,
    })
}

/// `W_p(mu, P[mu])` on the instance grid.
pub fn projection_distance(inst: &CapacitatedInstance) -> Result<f64> {
    Ok(project_capacitated(inst)?.distance())
}
