use crate::error::{Error, Result};

/// Finite weighted point cloud in `R^d` with weights summing to one.
///
/// Coordinates are stored row-major: atom `i` occupies
/// `coords[i * dim..(i + 1) * dim]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Builds a probability measure from points and unnormalized weights.
    ///
    /// Zero-weight atoms are dropped and the rest renormalized to total mass 1.
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::InvalidSpec(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        let dim = points.first().map(|p| p.len()).ok_or(Error::EmptySupport)?;
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords, weights)
    }

    /// Same as [`DiscreteMeasure::new`] with coordinates already flattened.
    pub fn from_flat(dim: usize, coords: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        if coords.len() != dim * weights.len() {
            return Err(Error::InvalidSpec(format!(
                "{} coordinates do not describe {} points of dimension {dim}",
                coords.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidSpec(format!("invalid weight {w}")));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSpec("non-finite coordinate".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::EmptySupport);
        }
        let mut kept_coords = Vec::with_capacity(coords.len());
        let mut kept_weights = Vec::with_capacity(weights.len());
        for (i, &w) in weights.iter().enumerate() {
            if w > 0.0 {
                kept_coords.extend_from_slice(&coords[i * dim..(i + 1) * dim]);
                kept_weights.push(w / total);
            }
        }
        Ok(Self {
            dim,
            coords: kept_coords,
            weights: kept_weights,
        })
    }

    /// Uniform weights over the given points.
    pub fn uniform(points: Vec<Vec<f64>>) -> Result<Self> {
        let w = vec![1.0; points.len()];
        Self::new(points, w)
    }

    /// Dirac mass at `x`.
    pub fn dirac(x: Vec<f64>) -> Result<Self> {
        Self::new(vec![x], vec![1.0])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// `sum_i w_i x_i`.
    pub fn barycenter(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.dim];
        for (p, &w) in self.points().zip(&self.weights) {
            for (bk, &pk) in b.iter_mut().zip(p) {
                *bk += w * pk;
            }
        }
        b
    }

    /// Shifts every atom by `h`.
    pub fn translate(&self, h: &[f64]) -> Self {
        assert_eq!(h.len(), self.dim, "translation has wrong dimension");
        let coords = self
            .coords
            .chunks_exact(self.dim)
            .flat_map(|p| p.iter().zip(h).map(|(a, b)| a + b))
            .collect();
        Self {
            dim: self.dim,
            coords,
            weights: self.weights.clone(),
        }
    }

    /// Largest pairwise distance between atoms.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                best = best.max(euclidean(self.point(i), self.point(j)));
            }
        }
        best
    }

    /// Axis-aligned bounding box `(lo, hi)` of the support.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.points() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
