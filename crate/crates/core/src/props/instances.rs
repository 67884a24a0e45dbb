//! Random test instances.

use rand::Rng;

use crate::error::Result;
use crate::measures::DiscreteMeasure;
use crate::ot::QuantileFn;

/// Up to `max_atoms` atoms uniform in `[-1, 1]` with weights uniform in `[0.05, 1]`.
pub fn random_discrete_1d<R: Rng + ?Sized>(rng: &mut R, max_atoms: usize) -> Result<DiscreteMeasure> {
    let atoms = rng.random_range(1..=max_atoms.max(1));
    random_discrete(rng, 1, atoms, 1.0)
}

/// `atoms` atoms uniform in `[-half_width, half_width]^d`.
pub fn random_discrete<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    atoms: usize,
    half_width: f64,
) -> Result<DiscreteMeasure> {
    let coords = (0..atoms * d)
        .map(|_| rng.random_range(-half_width..=half_width))
        .collect();
    let weights = (0..atoms).map(|_| rng.random_range(0.05..=1.0)).collect();
    DiscreteMeasure::from_flat(d, coords, weights)
}

/// Density one on a union of `pieces` disjoint intervals placed in `[-5, 5]`.
pub fn random_unit_density_1d<R: Rng + ?Sized>(rng: &mut R, pieces: usize) -> Result<QuantileFn> {
    let pieces = pieces.max(1);
    let lengths: Vec<f64> = (0..pieces).map(|_| rng.random_range(0.1..=1.0)).collect();
    let total: f64 = lengths.iter().sum();
    let gaps: Vec<f64> = (0..pieces).map(|_| rng.random_range(0.0..=1.0)).collect();
    let mut breaks = vec![0.0];
    let mut start = Vec::with_capacity(pieces);
    let mut end = Vec::with_capacity(pieces);
    let mut x = -5.0;
    let mut t = 0.0;
    for (len, gap) in lengths.iter().zip(&gaps) {
        let w = len / total;
        x += gap;
        start.push(x);
        x += w;
        end.push(x);
        t += w;
        breaks.push(t);
    }
    *breaks.last_mut().unwrap() = 1.0;
    QuantileFn::from_segments(breaks, start, end)
}
