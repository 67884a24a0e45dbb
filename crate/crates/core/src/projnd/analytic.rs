use crate::error::{Error, Result};
use crate::measures::{euclidean, rad_ball, BallUnionMeasure, DiscreteMeasure, GridMeasure};

/// Projection of well-separated atoms: a ball of volume `w_i / lambda` around
/// each atom at density `lambda`. Tangent balls are allowed.
pub fn project_atoms_analytic(mu: &DiscreteMeasure, lambda: f64) -> Result<BallUnionMeasure> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidSpec(format!("lambda must be positive, got {lambda}")));
    }
    let d = mu.dim();
    let radii: Vec<f64> = mu.weights().iter().map(|&w| rad_ball(d, w / lambda)).collect();
    for i in 0..mu.len() {
        for j in (i + 1)..mu.len() {
            let dist = euclidean(mu.point(i), mu.point(j));
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
    let centers = mu.points().map(|p| p.to_vec()).collect();
    BallUnionMeasure::new(centers, radii, lambda)
}

/// `int |f - lambda 1_B|` between the piecewise-constant density of `g` and the
/// ball union `b`, with `s^d` midpoint subsamples per cell. Mass of `b` outside
/// the grid is counted in full.
pub fn symmetric_difference_mass(g: &GridMeasure, b: &BallUnionMeasure, s: usize) -> Result<f64> {
    if g.dim() != b.dim() {
        return Err(Error::DimMismatch {
            expected: g.dim(),
            got: b.dim(),
        });
    }
    let s = s.max(1);
    let d = g.dim();
    let grid = g.grid();
    let vol = grid.cell_volume();
    let subs = s.pow(d as u32);
    let sub_vol = vol / subs as f64;
    let lambda = b.lambda();
    let mut corner = vec![0.0; d];
    let mut y = vec![0.0; d];
    let mut diff = 0.0;
    let mut ball_inside = 0.0;
    for (j, &m) in g.cell_mass().iter().enumerate() {
        let f = m / vol;
        grid.cell_corner_into(j, &mut corner);
        for t in 0..subs {
            let mut r = t;
            for k in (0..d).rev() {
                let i = r % s;
                r /= s;
                y[k] = corner[k] + (i as f64 + 0.5) * grid.spacing()[k] / s as f64;
            }
            if b.contains(&y) {
                diff += (f - lambda).abs() * sub_vol;
                ball_inside += lambda * sub_vol;
            } else {
                diff += f * sub_vol;
            }
        }
    }
    Ok(diff + (1.0 - ball_inside).max(0.0))
}
