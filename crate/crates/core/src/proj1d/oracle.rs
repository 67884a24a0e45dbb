//! Brute-force reference for the increment-constrained projection.
//!
//! Enumerates every contiguous block of the sheared sequence, keeps the blocks
//! whose optimality conditions hold, and chains them. Cubic in `n`; used only to
//! cross-check the pool-adjacent-violators solver.

use crate::error::{Error, Result};

/// Largest input accepted by [`brute_force_projection_oracle`].
pub const ORACLE_MAX_N: usize = 25;

fn dphi(v: f64, z: f64, p: f64) -> f64 {
    let d = v - z;
    p * d.signum() * d.abs().powf(p - 1.0)
}

/// Root of the increasing function `sum dphi(v, z_i)` by Illinois false position.
fn block_minimizer(z: &[f64], p: f64) -> f64 {
    let f = |v: f64| z.iter().map(|&zi| dphi(v, zi, p)).sum::<f64>();
    let mut a = z.iter().copied().fold(f64::INFINITY, f64::min);
    let mut b = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if b - a == 0.0 {
        return a;
    }
    let mut fa = f(a);
    let mut fb = f(b);
    let mut side = 0;
    for _ in 0..500 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c);
        if fc == 0.0 || (b - a).abs() <= 1e-15 * (1.0 + c.abs()) {
            return c;
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    (a * fb - b * fa) / (fb - fa)
}

/// Solves `min sum |x_i - q_i|^p` subject to `x_{i+1} - x_i >= 1 / (lambda n)` by
/// checking the optimality conditions of every block decomposition.
pub fn brute_force_projection_oracle(q: &[f64], p: f64, lambda: f64) -> Result<Vec<f64>> {
    let n = q.len();
    if n > ORACLE_MAX_N {
        return Err(Error::SizeLimit {
            size: n,
            limit: ORACLE_MAX_N,
        });
    }
    if n == 0 {
        return Err(Error::EmptySupport);
    }
    if !(p > 1.0 && lambda > 0.0) {
        return Err(Error::InvalidSpec("oracle needs p > 1 and lambda > 0".into()));
    }
    let step = 1.0 / (lambda * n as f64);
    let z: Vec<f64> = q.iter().enumerate().map(|(i, &v)| v - i as f64 * step).collect();
    let spread = z.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - z.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * p * spread.max(1e-12).powf(p - 1.0) * n as f64;

    // value[a][b]: optimal level of block a..=b if its prefix conditions hold
    let mut value = vec![vec![None; n]; n];
    for a in 0..n {
        for b in a..n {
            let v = block_minimizer(&z[a..=b], p);
            let mut prefix = 0.0;
            let ok = (a..b).all(|i| {
                prefix += dphi(v, z[i], p);
                prefix <= tol
            });
            if ok {
                value[a][b] = Some(v);
            }
        }
    }
    // best[e]: smallest last-block level over valid chains covering 0..e
    let mut best: Vec<Option<(f64, usize)>> = vec![None; n + 1];
    best[0] = Some((f64::NEG_INFINITY, 0));
    for e in 1..=n {
        for a in 0..e {
            let (Some((last, _)), Some(v)) = (best[a], value[a][e - 1]) else {
                continue;
            };
            if v + 1e-9 * (1.0 + v.abs()) >= last && best[e].is_none_or(|(bv, _)| v < bv) {
                best[e] = Some((v, a));
            }
        }
    }
    if best[n].is_none() {
        return Err(Error::Solver("no block decomposition satisfies the optimality conditions".into()));
    }
    let mut x = vec![0.0; n];
    let mut e = n;
    while e > 0 {
        let (v, a) = best[e].unwrap();
        for i in a..e {
            x[i] = v + i as f64 * step;
        }
        e = a;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feasible_input_is_fixed() {
        let q = [0.0, 0.5, 1.0, 2.0];
        let x = brute_force_projection_oracle(&q, 2.0, 1.0).unwrap();
        for (a, b) in x.iter().zip(q) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dirac_example() {
        let x = brute_force_projection_oracle(&[0.0; 4], 2.0, 1.0).unwrap();
        let want = [-0.375, -0.125, 0.125, 0.375];
        for (a, b) in x.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn size_limit() {
        assert!(matches!(
            brute_force_projection_oracle(&[0.0; 26], 2.0, 1.0),
            Err(Error::SizeLimit { size: 26, limit: 25 })
        ));
    }
}
