use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;

/// Regular axis-aligned grid of half-open cells `[o + k s, o + (k + 1) s)`.
///
/// Cells are numbered row-major with the last axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    origin: Vec<f64>,
    spacing: Vec<f64>,
    shape: Vec<usize>,
}

impl GridSpec {
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        let dim = origin.len();
        if dim == 0 || spacing.len() != dim || shape.len() != dim {
            return Err(Error::InvalidSpec(format!(
                "grid axes disagree: origin {}, spacing {}, shape {}",
                origin.len(),
                spacing.len(),
                shape.len()
            )));
        }
        if spacing.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidSpec("grid spacing must be positive".into()));
        }
        if shape.contains(&0) {
            return Err(Error::InvalidSpec("grid shape must be positive".into()));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidSpec("grid origin must be finite".into()));
        }
        Ok(Self {
            origin,
            spacing,
            shape,
        })
    }

    /// Grid over `[lo_k, hi_k]` split into `n_k` cells per axis.
    pub fn from_bounds(lo: &[f64], hi: &[f64], cells: &[usize]) -> Result<Self> {
        if lo.len() != hi.len() || lo.len() != cells.len() {
            return Err(Error::InvalidSpec("grid bounds have mismatched axes".into()));
        }
        let mut spacing = Vec::with_capacity(lo.len());
        for k in 0..lo.len() {
            if !(hi[k] > lo[k]) || cells[k] == 0 {
                return Err(Error::InvalidSpec(format!("empty grid axis {k}")));
            }
            spacing.push((hi[k] - lo[k]) / cells[k] as f64);
        }
        Self::new(lo.to_vec(), spacing, cells.to_vec())
    }

    /// Cubic-cell grid covering `[lo, hi]` whose nodes sit on the lattice `spacing * Z^d`.
    ///
    /// Grids built this way with equal spacing are commensurate.
    pub fn covering(lo: &[f64], hi: &[f64], spacing: f64) -> Result<Self> {
        let mut origin = Vec::with_capacity(lo.len());
        let mut shape = Vec::with_capacity(lo.len());
        for k in 0..lo.len() {
            let o = (lo[k] / spacing).floor();
            let e = (hi[k] / spacing).ceil().max(o + 1.0);
            origin.push(o * spacing);
            shape.push((e - o) as usize);
        }
        Self::new(origin, vec![spacing; lo.len()], shape)
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn n_cells(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Largest per-axis spacing.
    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().cloned().fold(0.0, f64::max)
    }

    pub fn upper(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|k| self.origin[k] + self.spacing[k] * self.shape[k] as f64)
            .collect()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for k in (0..self.dim()).rev() {
            idx[k] = flat % self.shape[k];
            flat /= self.shape[k];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Lower corner of cell `flat`, written into `out`.
    pub fn cell_corner_into(&self, flat: usize, out: &mut [f64]) {
        let mut f = flat;
        for k in (0..self.dim()).rev() {
            let i = f % self.shape[k];
            f /= self.shape[k];
            out[k] = self.origin[k] + i as f64 * self.spacing[k];
        }
    }

    pub fn cell_center_into(&self, flat: usize, out: &mut [f64]) {
        self.cell_corner_into(flat, out);
        for k in 0..self.dim() {
            out[k] += 0.5 * self.spacing[k];
        }
    }

    pub fn cell_center(&self, flat: usize) -> Vec<f64> {
        let mut c = vec![0.0; self.dim()];
        self.cell_center_into(flat, &mut c);
        c
    }

    /// Index of the half-open cell containing `x`; the far boundary is closed.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let mut flat = 0;
        for k in 0..self.dim() {
            let t = (x[k] - self.origin[k]) / self.spacing[k];
            if !(t >= 0.0) {
                return None;
            }
            let mut i = t.floor() as usize;
            if i >= self.shape[k] {
                if t <= self.shape[k] as f64 {
                    i = self.shape[k] - 1;
                } else {
                    return None;
                }
            }
            flat = flat * self.shape[k] + i;
        }
        Some(flat)
    }

    pub fn translate(&self, h: &[f64]) -> Self {
        Self {
            origin: self.origin.iter().zip(h).map(|(o, d)| o + d).collect(),
            spacing: self.spacing.clone(),
            shape: self.shape.clone(),
        }
    }

    /// Diameter of the grid box.
    pub fn diameter(&self) -> f64 {
        self.spacing
            .iter()
            .zip(&self.shape)
            .map(|(s, &n)| (s * n as f64).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Per-cell masses on a [`GridSpec`], together with the density cap they are
/// meant to respect.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeasure {
    grid: GridSpec,
    cell_mass: Vec<f64>,
    lambda: f64,
}

impl GridMeasure {
    pub fn new(grid: GridSpec, cell_mass: Vec<f64>, lambda: f64) -> Result<Self> {
        if cell_mass.len() != grid.n_cells() {
            return Err(Error::InvalidSpec(format!(
                "{} cell masses for {} cells",
                cell_mass.len(),
                grid.n_cells()
            )));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidSpec(format!("density cap {lambda} must be positive")));
        }
        if cell_mass.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::InvalidSpec("cell masses must be nonnegative".into()));
        }
        let total: f64 = cell_mass.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSpec(format!("cell masses sum to {total}, not 1")));
        }
        Ok(Self {
            grid,
            cell_mass,
            lambda,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn cell_mass(&self) -> &[f64] {
        &self.cell_mass
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn total_mass(&self) -> f64 {
        self.cell_mass.iter().sum()
    }

    /// Largest cell density `mass / volume`.
    pub fn max_density(&self) -> f64 {
        let vol = self.grid.cell_volume();
        self.cell_mass.iter().cloned().fold(0.0, f64::max) / vol
    }

    /// Whether every cell respects `mass <= lambda * vol + tol`.
    pub fn respects_cap(&self, tol: f64) -> bool {
        let cap = self.lambda * self.grid.cell_volume();
        self.cell_mass.iter().all(|&m| m <= cap + tol)
    }

    /// Mass-weighted mean of cell centers.
    pub fn barycenter(&self) -> Vec<f64> {
        let d = self.dim();
        let mut b = vec![0.0; d];
        let mut c = vec![0.0; d];
        for (j, &m) in self.cell_mass.iter().enumerate() {
            if m > 0.0 {
                self.grid.cell_center_into(j, &mut c);
                for k in 0..d {
                    b[k] += m * c[k];
                }
            }
        }
        b
    }

    pub fn translate(&self, h: &[f64]) -> Self {
        Self {
            grid: self.grid.translate(h),
            cell_mass: self.cell_mass.clone(),
            lambda: self.lambda,
        }
    }

    /// Atoms at the centers of the cells carrying mass, and the cell index of each atom.
    pub fn to_discrete(&self) -> (DiscreteMeasure, Vec<usize>) {
        let d = self.dim();
        let mut coords = Vec::new();
        let mut weights = Vec::new();
        let mut cells = Vec::new();
        let mut c = vec![0.0; d];
        for (j, &m) in self.cell_mass.iter().enumerate() {
            if m > 0.0 {
                self.grid.cell_center_into(j, &mut c);
                coords.extend_from_slice(&c);
                weights.push(m);
                cells.push(j);
            }
        }
        let measure = DiscreteMeasure::from_flat(d, coords, weights)
            .expect("grid measure has unit mass");
        (measure, cells)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(grid: GridSpec) -> GridMeasure {
        let n = grid.n_cells();
        GridMeasure::new(grid, vec![1.0 / n as f64; n], 1.0).unwrap()
    }

    #[test]
    fn indexing_round_trips() {
        let g = GridSpec::new(vec![0.0, 0.0, 0.0], vec![1.0, 0.5, 0.25], vec![3, 4, 5]).unwrap();
        for flat in 0..g.n_cells() {
            assert_eq!(g.flat_index(&g.multi_index(flat)), flat);
            let c = g.cell_center(flat);
            assert_eq!(g.locate(&c), Some(flat));
        }
        assert_eq!(g.cell_volume(), 0.125);
        assert_eq!(g.locate(&[3.0, 2.0, 1.25]), Some(g.n_cells() - 1));
        assert_eq!(g.locate(&[-0.1, 0.0, 0.0]), None);
        assert_eq!(g.locate(&[3.5, 0.0, 0.0]), None);
    }

    #[test]
    fn symmetric_grid_has_centered_barycenter() {
        let g = GridSpec::from_bounds(&[-1.0, -1.0], &[1.0, 1.0], &[10, 10]).unwrap();
        let m = uniform(g);
        for b in m.barycenter() {
            assert!(b.abs() < 1e-15);
        }
    }

    #[test]
    fn translate_shifts_barycenter() {
        let g = GridSpec::from_bounds(&[0.0], &[1.0], &[4]).unwrap();
        let m = GridMeasure::new(g, vec![0.1, 0.2, 0.3, 0.4], 2.0).unwrap();
        let t = m.translate(&[0.5]);
        assert!((t.barycenter()[0] - m.barycenter()[0] - 0.5).abs() < 1e-15);
        assert_eq!(t.total_mass(), m.total_mass());
    }

    #[test]
    fn cap_membership() {
        let g = GridSpec::from_bounds(&[0.0], &[1.0], &[4]).unwrap();
        let m = GridMeasure::new(g.clone(), vec![0.25; 4], 1.0).unwrap();
        assert!(m.respects_cap(1e-12));
        assert!((m.max_density() - 1.0).abs() < 1e-15);
        let heavy = GridMeasure::new(g, vec![0.5, 0.5, 0.0, 0.0], 1.0).unwrap();
        assert!(!heavy.respects_cap(1e-12));
    }

    #[test]
    fn covering_grids_are_commensurate() {
        let a = GridSpec::covering(&[-0.33], &[0.71], 0.125).unwrap();
        let b = GridSpec::covering(&[0.12], &[2.0], 0.125).unwrap();
        let offset = (a.origin()[0] - b.origin()[0]) / 0.125;
        assert!((offset - offset.round()).abs() < 1e-12);
        assert!(a.origin()[0] <= -0.33 && a.upper()[0] >= 0.71);
    }

    #[test]
    fn rejects_bad_masses() {
        let g = GridSpec::from_bounds(&[0.0], &[1.0], &[2]).unwrap();
        assert!(GridMeasure::new(g.clone(), vec![0.5, 0.4], 1.0).is_err());
        assert!(GridMeasure::new(g.clone(), vec![1.5, -0.5], 1.0).is_err());
        assert!(GridMeasure::new(g, vec![1.0], 1.0).is_err());
    }
}
