//! Exact projection onto `K_lambda` on the line.
//!
//! In one dimension a measure is its quantile function `Q`, `W_p` is the `L^p`
//! distance between quantiles, and density at most `lambda` means `Q' >= 1/lambda`.
//! The projection is therefore an `L^p` projection onto a cone, solved on `n`
//! level cells: `q_i` is the average of `Q` over `[i/n, (i+1)/n)`, the increments
//! of the answer are constrained to `>= 1/(lambda n)`, and the shear
//! `y_i = x_i - i/(lambda n)` turns this into isotonic regression.
//!
//! Cell `i` of the answer is spread uniformly over an interval of length
//! `1/(lambda n)` centred at `x_i`, so the reconstructed measure has density
//! exactly `lambda` on its support and, at `p = 2`, the same mean as the input.

mod oracle;
mod pava;

pub use oracle::{brute_force_projection_oracle, ORACLE_MAX_N};
pub use pava::{isotonic, p_mean, project_increments, POOL_TOL};

use crate::error::{Error, Result};
use crate::measures::{DiscreteMeasure, GridMeasure, GridSpec};
use crate::ot::{CostExponent, QuantileFn};

/// Default number of level cells.
pub const DEFAULT_CELLS: usize = 4096;

/// Parameters of a one-dimensional projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionSpec1D {
    pub p: CostExponent,
    pub lambda: f64,
    pub n: usize,
}

impl ProjectionSpec1D {
    pub fn new(p: f64, lambda: f64, n: usize) -> Result<Self> {
        let spec = Self {
            p: CostExponent::for_projection(p)?,
            lambda,
            n,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p.value() <= 1.0 {
            return Err(Error::InvalidSpec("projection needs p > 1".into()));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidSpec(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.n < 2 {
            return Err(Error::InvalidSpec("need at least 2 level cells".into()));
        }
        Ok(())
    }

    /// Width `1 / (lambda n)` of each reconstructed cell.
    pub fn step(&self) -> f64 {
        1.0 / (self.lambda * self.n as f64)
    }
}

impl Default for ProjectionSpec1D {
    fn default() -> Self {
        Self {
            p: CostExponent::TWO,
            lambda: 1.0,
            n: DEFAULT_CELLS,
        }
    }
}

/// Result of a one-dimensional projection.
#[derive(Debug, Clone)]
pub struct Projection1D {
    pub spec: ProjectionSpec1D,
    /// Level-cell averages of the input quantile.
    pub input_cells: Vec<f64>,
    /// Projected cell centres, increments `>= 1/(lambda n)`.
    pub cells: Vec<f64>,
    /// Quantile of the projected measure.
    pub quantile: QuantileFn,
}

impl Projection1D {
    pub fn mean(&self) -> f64 {
        self.quantile.mean()
    }

    /// Projected measure on the grid of spacing `1/(lambda n)` starting at its
    /// leftmost point.
    pub fn to_grid_measure(&self) -> Result<GridMeasure> {
        let step = self.spec.step();
        let lo = self.cells[0] - 0.5 * step;
        let hi = self.cells[self.cells.len() - 1] + 0.5 * step;
        let count = (((hi - lo) / step - 1e-9).ceil() as usize).max(1);
        let grid = GridSpec::new(vec![lo], vec![step], vec![count])?;
        self.to_grid_measure_on(&grid)
    }

    pub fn to_grid_measure_on(&self, grid: &GridSpec) -> Result<GridMeasure> {
        let mass = self.quantile.grid_masses(grid)?;
        GridMeasure::new(grid.clone(), mass, self.spec.lambda)
    }

    /// `(sum_i |x_i - q_i|^p / n)^{1/p}`: distance between the discretized input
    /// and the projection.
    pub fn cell_distance(&self) -> f64 {
        let p = self.spec.p;
        let s: f64 = self
            .cells
            .iter()
            .zip(&self.input_cells)
            .map(|(x, q)| p.pow((x - q).abs()))
            .sum();
        p.root(s / self.cells.len() as f64)
    }
}

/// Quantile of the projection, built from `n` projected cells.
pub fn project_quantile(q: &QuantileFn, spec: &ProjectionSpec1D) -> Result<QuantileFn> {
    Ok(projection_from_quantile(q, spec)?.quantile)
}

/// Full projection record for a quantile input.
pub fn projection_from_quantile(q: &QuantileFn, spec: &ProjectionSpec1D) -> Result<Projection1D> {
    spec.validate()?;
    let input_cells = q.cell_averages(spec.n);
    let step = spec.step();
    let cells = project_increments(&input_cells, spec.p.value(), step);
    let quantile = cells_to_quantile(&cells, step)?;
    Ok(Projection1D {
        spec: *spec,
        input_cells,
        cells,
        quantile,
    })
}

/// Full projection record for a one-dimensional discrete measure.
pub fn projection_1d(mu: &DiscreteMeasure, spec: &ProjectionSpec1D) -> Result<Projection1D> {
    projection_from_quantile(&QuantileFn::from_discrete(mu)?, spec)
}

/// `P[mu]` as a grid measure of spacing `1/(lambda n)`.
pub fn project_measure_1d(mu: &DiscreteMeasure, spec: &ProjectionSpec1D) -> Result<GridMeasure> {
    projection_1d(mu, spec)?.to_grid_measure()
}

fn cells_to_quantile(cells: &[f64], step: f64) -> Result<QuantileFn> {
    let n = cells.len();
    let breaks: Vec<f64> = (0..=n).map(|i| if i == n { 1.0 } else { i as f64 / n as f64 }).collect();
    let start = cells.iter().map(|x| x - 0.5 * step).collect();
    let end = cells.iter().map(|x| x + 0.5 * step).collect();
    QuantileFn::from_segments(breaks, start, end)
}
