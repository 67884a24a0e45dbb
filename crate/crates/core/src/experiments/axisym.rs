//! Profile reduction for measures symmetric about the first axis.
//!
//! A measure on `R^d` invariant under rotations fixing `e_1` is determined by the
//! law of `(x_1, |x'|)` on the half-plane `r >= 0`. For two such measures `W_p`
//! in `R^d` equals `W_p` between the profiles with Euclidean cost: pushing a plan
//! down to profiles can only shorten `|x' - y'|` to `||x'| - |y'||`, and a
//! profile plan lifts back at equal cost by sending both points along a common
//! direction of `x'`. Ball unions centred on the axis therefore reduce to planar
//! problems whose size does not grow with `d`.

use crate::error::{Error, Result};
use crate::measures::{geometry::unit_ball_volume, BallUnionMeasure, DiscreteMeasure};

/// Profile of `b` on the half-plane lattice of spacing `h` whose axial nodes sit
/// at `shift + h Z`, one atom per cell placed at the cell's mass centroid, using
/// `s x s` midpoint subsamples with weight `r^{d-2}`.
pub fn axisymmetric_profile(b: &BallUnionMeasure, h: f64, s: usize, shift: f64) -> Result<DiscreteMeasure> {
    let d = b.dim();
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    if !(h.is_finite() && h > 0.0) || s == 0 || !shift.is_finite() {
        return Err(Error::InvalidSpec("profile spacing and subsamples must be positive".into()));
    }
    if b.centers().iter().any(|c| c[1..].iter().any(|&v| v != 0.0)) {
        return Err(Error::InvalidSpec("ball centres must lie on the first axis".into()));
    }
    // surface area of the unit sphere in R^{d-1}
    let shell = (d - 1) as f64 * unit_ball_volume(d - 1);
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    for (c, &radius) in b.centers().iter().zip(b.radii()) {
        let a0 = ((c[0] - radius - shift) / h).floor() as i64;
        let a1 = ((c[0] + radius - shift) / h).ceil() as i64;
        let r1 = (radius / h).ceil() as i64;
        for ia in a0..a1 {
            for ir in 0..r1 {
                let mut mass = 0.0;
                let mut ca = 0.0;
                let mut cr = 0.0;
                for ka in 0..s {
                    let a = shift + (ia as f64 + (ka as f64 + 0.5) / s as f64) * h;
                    for kr in 0..s {
                        let r = (ir as f64 + (kr as f64 + 0.5) / s as f64) * h;
                        let da = a - c[0];
                        if da * da + r * r > radius * radius {
                            continue;
                        }
                        let w = r.powi(d as i32 - 2);
                        mass += w;
                        ca += w * a;
                        cr += w * r;
                    }
                }
                if mass > 0.0 {
                    coords.push(ca / mass);
                    coords.push(cr / mass);
                    weights.push(mass * shell * b.lambda() * (h / s as f64).powi(2));
                }
            }
        }
    }
    DiscreteMeasure::from_flat(2, coords, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::rad_ball;
    use crate::ot::{solve_exact, plan_cost, CostExponent};

    #[test]
    fn raw_mass_is_close_to_one() {
        for d in 2..=6 {
            let r = rad_ball(d, 1.0);
            let b = BallUnionMeasure::new(vec![vec![0.0; d]], vec![r], 1.0).unwrap();
            let h = 0.02;
            let s = 4;
            // undo the normalization by recomputing with the raw weights
            let shell = (d - 1) as f64 * unit_ball_volume(d - 1);
            let mut raw = 0.0;
            let n = (r / h).ceil() as i64;
            for ia in -n..n {
                for ir in 0..n {
                    for ka in 0..s {
                        for kr in 0..s {
                            let a = (ia as f64 + (ka as f64 + 0.5) / s as f64) * h;
                            let rr = (ir as f64 + (kr as f64 + 0.5) / s as f64) * h;
                            if a * a + rr * rr <= r * r {
                                raw += rr.powi(d as i32 - 2) * shell * (h / s as f64).powi(2);
                            }
                        }
                    }
                }
            }
            assert!((raw - 1.0).abs() < 0.01, "d={d}: {raw}");
            assert!(axisymmetric_profile(&b, h, s, 0.0).is_ok());
        }
    }

    #[test]
    fn translation_distance_is_exact_in_profile() {
        // translating a ball along the axis by t costs exactly t in every W_p
        let d = 4;
        let r = rad_ball(d, 1.0);
        let b = BallUnionMeasure::new(vec![vec![0.0; d]], vec![r], 1.0).unwrap();
        let mut shifted = vec![0.0; d];
        shifted[0] = 0.3;
        let c = b.translate(&shifted);
        let pa = axisymmetric_profile(&b, 0.05, 3, 0.0).unwrap();
        let pb = axisymmetric_profile(&c, 0.05, 3, 0.0).unwrap();
        let w = plan_cost(&solve_exact(&pa, &pb, CostExponent::ONE).unwrap(), CostExponent::ONE);
        assert!((w - 0.3).abs() < 0.01, "{w}");
    }

    #[test]
    fn shift_moves_atoms_not_mass() {
        let r = rad_ball(3, 1.0);
        let b = BallUnionMeasure::new(vec![vec![0.0; 3]], vec![r], 1.0).unwrap();
        let a = axisymmetric_profile(&b, 0.05, 3, 0.0).unwrap();
        let c = axisymmetric_profile(&b, 0.05, 3, 0.021).unwrap();
        assert!(a.coords() != c.coords());
        let w = plan_cost(&solve_exact(&a, &c, CostExponent::ONE).unwrap(), CostExponent::ONE);
        assert!(w < 0.05, "{w}");
    }

    #[test]
    fn rejects_off_axis_centres() {
        let b = BallUnionMeasure::new(vec![vec![0.0, 1.0]], vec![rad_ball(2, 1.0)], 1.0).unwrap();
        assert!(axisymmetric_profile(&b, 0.05, 2, 0.0).is_err());
    }
}
