/// Tolerance of the bisection for `p`-mean pool values, relative to the bracket scale.
pub const POOL_TOL: f64 = 1e-12;

/// Minimizer of `sum_i |v - z_i|^p` over `v` in `[lo, hi]` (which must bracket it).
///
/// `p = 2` uses the mean directly; other exponents bisect on the derivative.
pub fn p_mean(z: &[f64], p: f64, mut lo: f64, mut hi: f64) -> f64 {
    if p == 2.0 {
        return z.iter().sum::<f64>() / z.len() as f64;
    }
    let deriv = |v: f64| -> f64 {
        z.iter()
            .map(|&zi| {
                let d = v - zi;
                d.signum() * d.abs().powf(p - 1.0)
            })
            .sum()
    };
    let scale = lo.abs().max(hi.abs()).max(1.0);
    for _ in 0..200 {
        if hi - lo <= POOL_TOL * scale {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if deriv(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy)]
struct Pool {
    start: usize,
    len: usize,
    sum: f64,
    value: f64,
}

/// Nondecreasing sequence minimizing `sum |y_i - z_i|^p` (pool adjacent violators).
pub fn isotonic(z: &[f64], p: f64) -> Vec<f64> {
    let mut pools: Vec<Pool> = Vec::with_capacity(z.len());
    for (i, &zi) in z.iter().enumerate() {
        let mut cur = Pool {
            start: i,
            len: 1,
            sum: zi,
            value: zi,
        };
        while let Some(prev) = pools.last() {
            if prev.value <= cur.value {
                break;
            }
            let prev = pools.pop().unwrap();
            let start = prev.start;
            let len = prev.len + cur.len;
            let sum = prev.sum + cur.sum;
            // the merged minimizer lies between the two pool minimizers
            let value = if p == 2.0 {
                sum / len as f64
            } else {
                p_mean(&z[start..start + len], p, cur.value, prev.value)
            };
            cur = Pool {
                start,
                len,
                sum,
                value,
            };
        }
        pools.push(cur);
    }
    let mut y = Vec::with_capacity(z.len());
    for pool in &pools {
        y.extend(std::iter::repeat_n(pool.value, pool.len));
    }
    y
}

/// Projects `q` onto `{x : x_{i+1} - x_i >= step}` in the `l^p` sense via the
/// shear `z_i = q_i - i * step`.
pub fn project_increments(q: &[f64], p: f64, step: f64) -> Vec<f64> {
    let z: Vec<f64> = q.iter().enumerate().map(|(i, &v)| v - i as f64 * step).collect();
    isotonic(&z, p)
        .into_iter()
        .enumerate()
        .map(|(i, y)| y + i as f64 * step)
        .collect()
}
