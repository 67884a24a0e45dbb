use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::measures::discrete::euclidean;
use crate::measures::geometry::vol_ball;
use crate::measures::{DiscreteMeasure, GridMeasure, GridSpec};

/// Lebesgue measure at density `lambda` restricted to a union of disjoint balls.
#[derive(Debug, Clone, PartialEq)]
pub struct BallUnionMeasure {
    dim: usize,
    centers: Vec<Vec<f64>>,
    radii: Vec<f64>,
    lambda: f64,
}

impl BallUnionMeasure {
    pub fn new(centers: Vec<Vec<f64>>, radii: Vec<f64>, lambda: f64) -> Result<Self> {
        if centers.is_empty() || centers.len() != radii.len() {
            return Err(Error::InvalidSpec(format!(
                "{} centers and {} radii",
                centers.len(),
                radii.len()
            )));
        }
        let dim = centers[0].len();
        if dim == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        if let Some(c) = centers.iter().find(|c| c.len() != dim) {
            return Err(Error::DimMismatch {
                expected: dim,
                got: c.len(),
            });
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidSpec("radii must be positive".into()));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidSpec(format!("density {lambda} must be positive")));
        }
        let mass: f64 = lambda * radii.iter().map(|&r| vol_ball(dim, r)).sum::<f64>();
        if (mass - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSpec(format!("ball union carries mass {mass}, not 1")));
        }
        for i in 0..centers.len() {
            for j in (i + 1)..centers.len() {
                let dist = euclidean(&centers[i], &centers[j]);
                let required = radii[i] + radii[j];
                if dist < required - 1e-12 {
                    return Err(Error::OverlapError {
                        i,
                        j,
                        distance: dist,
                        required,
                    });
                }
            }
        }
        Ok(Self {
            dim,
            centers,
            radii,
            lambda,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Mass carried by ball `i`.
    pub fn ball_mass(&self, i: usize) -> f64 {
        self.lambda * vol_ball(self.dim, self.radii[i])
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.centers.iter().zip(&self.radii).any(|(c, &r)| {
            let d2: f64 = c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            d2 <= r * r
        })
    }

    pub fn barycenter(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.dim];
        for (i, c) in self.centers.iter().enumerate() {
            let m = self.ball_mass(i);
            for k in 0..self.dim {
                b[k] += m * c[k];
            }
        }
        b
    }

    pub fn translate(&self, h: &[f64]) -> Self {
        Self {
            dim: self.dim,
            centers: self
                .centers
                .iter()
                .map(|c| c.iter().zip(h).map(|(a, b)| a + b).collect())
                .collect(),
            radii: self.radii.clone(),
            lambda: self.lambda,
        }
    }

    /// Axis-aligned bounding box of the support.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for (c, &r) in self.centers.iter().zip(&self.radii) {
            for k in 0..self.dim {
                lo[k] = lo[k].min(c[k] - r);
                hi[k] = hi[k].max(c[k] + r);
            }
        }
        (lo, hi)
    }
}

/// Grid approximation of a ball union plus the mass it captured before
/// renormalization.
#[derive(Debug, Clone)]
pub struct BallDiscretization {
    pub measure: GridMeasure,
    pub raw_mass: f64,
}

/// Cell masses `lambda * |cell ∩ union|` by a midpoint rule with `subsamples^dim`
/// points per cell, renormalized to total mass one.
pub fn discretize_ball_union(
    b: &BallUnionMeasure,
    grid: &GridSpec,
    subsamples: usize,
) -> Result<BallDiscretization> {
    if grid.dim() != b.dim() {
        return Err(Error::DimMismatch {
            expected: b.dim(),
            got: grid.dim(),
        });
    }
    if subsamples == 0 {
        return Err(Error::InvalidSpec("need at least one subsample".into()));
    }
    let spacing = grid.max_spacing();
    for &r in b.radii() {
        if 2.0 * r < 2.0 * spacing {
            return Err(Error::GridTooCoarse {
                diameter: 2.0 * r,
                spacing,
            });
        }
    }
    let (lo, hi) = b.bounding_box();
    let upper = grid.upper();
    for k in 0..b.dim() {
        if lo[k] < grid.origin()[k] - 1e-12 || hi[k] > upper[k] + 1e-12 {
            return Err(Error::InvalidSpec(format!(
                "grid does not cover the ball union along axis {k}"
            )));
        }
    }

    let d = b.dim();
    let n_cells = grid.n_cells();
    let mut candidate = vec![false; n_cells];
    let mut cells = Vec::new();
    for (c, &r) in b.centers().iter().zip(b.radii()) {
        let mut first = vec![0usize; d];
        let mut last = vec![0usize; d];
        for k in 0..d {
            let s = grid.spacing()[k];
            let o = grid.origin()[k];
            let n = grid.shape()[k];
            first[k] = (((c[k] - r - o) / s).floor().max(0.0) as usize).min(n - 1);
            last[k] = (((c[k] + r - o) / s).floor().max(0.0) as usize).min(n - 1);
        }
        let mut idx = first.clone();
        'cells: loop {
            let flat = grid.flat_index(&idx);
            if !candidate[flat] {
                candidate[flat] = true;
                cells.push(flat);
            }
            // odometer over the index box
            for k in (0..d).rev() {
                if idx[k] < last[k] {
                    idx[k] += 1;
                    continue 'cells;
                }
                idx[k] = first[k];
            }
            break;
        }
    }
    cells.sort_unstable();

    let per_cell = subsamples.pow(d as u32);
    let cell_mass_full = b.lambda() * grid.cell_volume();
    let mut mass = vec![0.0; n_cells];
    let mut corner = vec![0.0; d];
    let mut x = vec![0.0; d];
    let mut sub = vec![0usize; d];
    let mut raw = 0.0;
    for &flat in &cells {
        grid.cell_corner_into(flat, &mut corner);
        let mut hits = 0usize;
        for q in 0..per_cell {
            let mut rest = q;
            for k in (0..d).rev() {
                sub[k] = rest % subsamples;
                rest /= subsamples;
            }
            for k in 0..d {
                x[k] = corner[k] + (sub[k] as f64 + 0.5) / subsamples as f64 * grid.spacing()[k];
            }
            if b.contains(&x) {
                hits += 1;
            }
        }
        let m = cell_mass_full * hits as f64 / per_cell as f64;
        mass[flat] = m;
        raw += m;
    }
    if raw <= 0.0 {
        return Err(Error::GridTooCoarse {
            diameter: 2.0 * b.radii().iter().cloned().fold(0.0, f64::max),
            spacing,
        });
    }
    for m in &mut mass {
        *m /= raw;
    }
    let measure = GridMeasure::new(grid.clone(), mass, b.lambda())?;
    Ok(BallDiscretization {
        measure,
        raw_mass: raw,
    })
}

/// Uniform point in the ball `B(center, r)` by rejection from its bounding cube.
pub fn sample_in_ball<R: Rng + ?Sized>(rng: &mut R, center: &[f64], r: f64, out: &mut [f64]) {
    loop {
        let mut n2 = 0.0;
        for x in out.iter_mut() {
            let u: f64 = rng.random::<f64>() * 2.0 - 1.0;
            *x = u;
            n2 += u * u;
        }
        if n2 <= 1.0 {
            break;
        }
    }
    for (x, c) in out.iter_mut().zip(center) {
        *x = c + r * *x;
    }
}

/// `n` i.i.d. uniform points of the union with equal weights; each draw picks a
/// ball with probability proportional to its volume.
pub fn sample_ball_union(b: &BallUnionMeasure, n: usize, seed: u64) -> Result<DiscreteMeasure> {
    if n == 0 {
        return Err(Error::InvalidSpec("need at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let masses: Vec<f64> = (0..b.centers().len()).map(|i| b.ball_mass(i)).collect();
    let total: f64 = masses.iter().sum();
    let d = b.dim();
    let mut coords = vec![0.0; n * d];
    for chunk in coords.chunks_exact_mut(d) {
        let u: f64 = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = masses.len() - 1;
        for (i, m) in masses.iter().enumerate() {
            acc += m;
            if u < acc {
                pick = i;
                break;
            }
        }
        sample_in_ball(&mut rng, &b.centers()[pick], b.radii()[pick], chunk);
    }
    DiscreteMeasure::from_flat(d, coords, vec![1.0; n])
}

/// `n` uniform points of the union with the count in each ball fixed in
/// proportion to its mass (largest remainder), i.i.d. within each ball.
pub fn sample_ball_union_stratified(b: &BallUnionMeasure, n: usize, seed: u64) -> Result<DiscreteMeasure> {
    if n < b.centers().len() {
        return Err(Error::InvalidSpec(format!(
            "need at least one sample per ball, got {n} for {} balls",
            b.centers().len()
        )));
    }
    let masses: Vec<f64> = (0..b.centers().len()).map(|i| b.ball_mass(i)).collect();
    let total: f64 = masses.iter().sum();
    let quotas: Vec<f64> = masses.iter().map(|m| m / total * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&i, &j| (quotas[j] - quotas[j].floor()).total_cmp(&(quotas[i] - quotas[i].floor())));
    let short = n - counts.iter().sum::<usize>();
    for &i in order.iter().take(short) {
        counts[i] += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = b.dim();
    let mut coords = vec![0.0; n * d];
    let mut chunks = coords.chunks_exact_mut(d);
    for (i, &count) in counts.iter().enumerate() {
        for chunk in chunks.by_ref().take(count) {
            sample_in_ball(&mut rng, &b.centers()[i], b.radii()[i], chunk);
        }
    }
    DiscreteMeasure::from_flat(d, coords, vec![1.0; n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::geometry::rad_ball;

    fn single_ball(d: usize) -> BallUnionMeasure {
        BallUnionMeasure::new(vec![vec![0.0; d]], vec![rad_ball(d, 1.0)], 1.0).unwrap()
    }

    #[test]
    fn validates_mass_and_overlap() {
        assert!(BallUnionMeasure::new(vec![vec![0.0]], vec![0.4], 1.0).is_err());
        let r = rad_ball(2, 0.5);
        assert!(BallUnionMeasure::new(
            vec![vec![0.0, 0.0], vec![2.0 * r, 0.0]],
            vec![r, r],
            1.0
        )
        .is_ok());
        assert!(matches!(
            BallUnionMeasure::new(vec![vec![0.0, 0.0], vec![r, 0.0]], vec![r, r], 1.0),
            Err(Error::OverlapError { .. })
        ));
    }

    #[test]
    fn interval_discretizes_uniformly() {
        let b = single_ball(1);
        assert!((b.radii()[0] - 0.5).abs() < 1e-15);
        let g = GridSpec::from_bounds(&[-0.5], &[0.5], &[100]).unwrap();
        let disc = discretize_ball_union(&b, &g, 3).unwrap();
        assert!((disc.raw_mass - 1.0).abs() < 1e-9);
        for &m in disc.measure.cell_mass() {
            assert!((m - 0.01).abs() < 1e-9);
        }
        assert!((disc.measure.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ball_inside_one_cell_is_too_coarse() {
        let r = rad_ball(2, 0.25);
        let b = BallUnionMeasure::new(vec![vec![0.5, 0.5]], vec![r], 4.0).unwrap();
        let g = GridSpec::from_bounds(&[0.0, 0.0], &[1.0, 1.0], &[1, 1]).unwrap();
        assert!(matches!(
            discretize_ball_union(&b, &g, 50),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn ball_centered_on_a_vertex_splits_evenly() {
        let r = rad_ball(2, 0.25);
        let b = BallUnionMeasure::new(vec![vec![0.5, 0.5]], vec![r], 4.0).unwrap();
        let g = GridSpec::from_bounds(&[0.5 - r, 0.5 - r], &[0.5 + r, 0.5 + r], &[2, 2]).unwrap();
        let disc = discretize_ball_union(&b, &g, 64).unwrap();
        for &m in disc.measure.cell_mass() {
            assert!((m - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn refinement_reduces_volume_error() {
        for d in 1..=3 {
            let b = single_ball(d);
            let r = b.radii()[0];
            let lo = vec![-r - 0.01; d];
            let hi = vec![r + 0.01; d];
            let coarse = GridSpec::covering(&lo, &hi, r / 4.0).unwrap();
            let fine = GridSpec::covering(&lo, &hi, r / 8.0).unwrap();
            let e1 = (discretize_ball_union(&b, &coarse, 3).unwrap().raw_mass - 1.0).abs();
            let e2 = (discretize_ball_union(&b, &fine, 3).unwrap().raw_mass - 1.0).abs();
            assert!(e2 <= 0.5 * e1 + 1e-12, "d={d}: {e1} -> {e2}");
        }
    }

    #[test]
    fn sampling_is_deterministic_and_inside() {
        let r = rad_ball(2, 0.5);
        let b = BallUnionMeasure::new(
            vec![vec![0.0, 0.0], vec![2.0 * r, 0.0]],
            vec![r, r],
            1.0,
        )
        .unwrap();
        let a = sample_ball_union(&b, 500, 7).unwrap();
        let c = sample_ball_union(&b, 500, 7).unwrap();
        assert_eq!(a, c);
        for p in a.points() {
            assert!(b.contains(p));
        }
        let one = sample_ball_union(&b, 1, 3).unwrap();
        assert!(b.contains(one.point(0)));
    }

    #[test]
    fn stratified_counts_follow_masses() {
        let b = BallUnionMeasure::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![0.4, 0.2], 1.0 / 0.6283185307179586).unwrap();
        let m = sample_ball_union_stratified(&b, 101, 3).unwrap();
        let near_first = m.points().filter(|x| x[0] < 0.5).count();
        // masses 0.8 and 0.2 of 101 points: quotas 80.8 and 20.2
        assert_eq!(near_first, 81);
        assert_eq!(m, sample_ball_union_stratified(&b, 101, 3).unwrap());
        assert!(sample_ball_union_stratified(&b, 1, 3).is_err());
    }

    #[test]
    fn sampled_barycenter_concentrates() {
        let b = single_ball(3).translate(&[1.0, -2.0, 0.5]);
        let s = sample_ball_union(&b, 100_000, 11).unwrap();
        let bc = s.barycenter();
        let r = b.radii()[0];
        for (x, c) in bc.iter().zip(&b.centers()[0]) {
            assert!((x - c).abs() < 0.01 * r);
        }
    }
}
