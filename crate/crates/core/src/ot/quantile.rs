use crate::error::{Error, Result};
use crate::measures::{DiscreteMeasure, GridMeasure, GridSpec};
use crate::ot::CostExponent;

/// Generalized inverse CDF of a probability measure on the line.
///
/// Stored as a partition `0 = t_0 < ... < t_m = 1` with a linear piece on each
/// `[t_k, t_{k+1})` running from `start[k]` to `end[k]`. Step functions (atoms)
/// have `start == end`; jumps between pieces are gaps in the support.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileFn {
    breaks: Vec<f64>,
    start: Vec<f64>,
    end: Vec<f64>,
}

/// One piece of a merged partition: level interval and the values of both
/// functions at its ends.
#[derive(Debug, Clone, Copy)]
struct Piece {
    t0: f64,
    t1: f64,
    a0: f64,
    a1: f64,
    b0: f64,
    b1: f64,
}

impl QuantileFn {
    /// Validates a piecewise-linear description; values must be nondecreasing.
    pub fn from_segments(breaks: Vec<f64>, start: Vec<f64>, end: Vec<f64>) -> Result<Self> {
        let m = start.len();
        if m == 0 || end.len() != m || breaks.len() != m + 1 {
            return Err(Error::InvalidSpec("malformed quantile segments".into()));
        }
        if breaks[0] != 0.0 || breaks[m] != 1.0 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSpec(
                "quantile breakpoints must increase from 0 to 1".into(),
            ));
        }
        if start.iter().chain(&end).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("non-finite quantile value".into()));
        }
        let scale = start.iter().chain(&end).fold(1.0f64, |a, v| a.max(v.abs()));
        let tol = 1e-12 * scale;
        for k in 0..m {
            let rising = end[k] >= start[k] - tol;
            let ordered = k + 1 == m || start[k + 1] >= end[k] - tol;
            if !(rising && ordered) {
                return Err(Error::InvalidSpec("quantile function must be nondecreasing".into()));
            }
        }
        Ok(Self { breaks, start, end })
    }

    /// Right-continuous step function taking `values[k]` on `[breaks[k], breaks[k+1])`.
    pub fn step(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::from_segments(breaks, values.clone(), values)
    }

    /// Quantile of the uniform law on `[a, b]`.
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::from_segments(vec![0.0, 1.0], vec![a], vec![b])
    }

    /// Quantile of a one-dimensional discrete measure.
    pub fn from_discrete(mu: &DiscreteMeasure) -> Result<Self> {
        if mu.dim() != 1 {
            return Err(Error::DimMismatch {
                expected: 1,
                got: mu.dim(),
            });
        }
        let mut atoms: Vec<(f64, f64)> = mu.coords().iter().copied().zip(mu.weights().iter().copied()).collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut breaks = vec![0.0];
        let mut values = Vec::new();
        let mut cum = 0.0;
        for (k, &(x, w)) in atoms.iter().enumerate() {
            cum += w;
            let merge = values.last() == Some(&x);
            let t = if k + 1 == atoms.len() { 1.0 } else { cum.min(1.0) };
            if merge {
                *breaks.last_mut().unwrap() = t;
            } else if t > *breaks.last().unwrap() {
                breaks.push(t);
                values.push(x);
            }
        }
        *breaks.last_mut().unwrap() = 1.0;
        Self::step(breaks, values)
    }

    /// Quantile of a one-dimensional grid density (uniform within each cell).
    pub fn from_grid(g: &GridMeasure) -> Result<Self> {
        if g.dim() != 1 {
            return Err(Error::DimMismatch {
                expected: 1,
                got: g.dim(),
            });
        }
        let o = g.grid().origin()[0];
        let h = g.grid().spacing()[0];
        let mut breaks = vec![0.0];
        let mut start = Vec::new();
        let mut end = Vec::new();
        let mut cum = 0.0;
        for (k, &m) in g.cell_mass().iter().enumerate() {
            if m <= 0.0 {
                continue;
            }
            cum += m;
            breaks.push(cum.min(1.0));
            start.push(o + k as f64 * h);
            end.push(o + (k + 1) as f64 * h);
        }
        *breaks.last_mut().ok_or(Error::EmptySupport)? = 1.0;
        // drop pieces squeezed to zero length by rounding
        let mut kb = vec![0.0];
        let mut ks = Vec::new();
        let mut ke = Vec::new();
        for k in 0..start.len() {
            if breaks[k + 1] > *kb.last().unwrap() {
                kb.push(breaks[k + 1]);
                ks.push(start[k]);
                ke.push(end[k]);
            }
        }
        *kb.last_mut().unwrap() = 1.0;
        Self::from_segments(kb, ks, ke)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn n_segments(&self) -> usize {
        self.start.len()
    }

    /// `(t0, t1, start, end)` of piece `k`.
    pub fn segment(&self, k: usize) -> (f64, f64, f64, f64) {
        (self.breaks[k], self.breaks[k + 1], self.start[k], self.end[k])
    }

    #[inline]
    fn lin(&self, k: usize, t: f64) -> f64 {
        let (t0, t1) = (self.breaks[k], self.breaks[k + 1]);
        let s = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        self.start[k] + (self.end[k] - self.start[k]) * s
    }

    /// Right-continuous evaluation at level `t` in `[0, 1]`.
    pub fn eval(&self, t: f64) -> f64 {
        let k = self.breaks.partition_point(|&b| b <= t).saturating_sub(1);
        let k = k.min(self.n_segments() - 1);
        self.lin(k, t)
    }

    pub fn mean(&self) -> f64 {
        (0..self.n_segments())
            .map(|k| (self.breaks[k + 1] - self.breaks[k]) * 0.5 * (self.start[k] + self.end[k]))
            .sum()
    }

    /// Smallest slope over the linear pieces; the density of the measure is
    /// bounded by its reciprocal. Infinite slopes never occur; atoms give 0.
    pub fn min_slope(&self) -> f64 {
        (0..self.n_segments())
            .map(|k| (self.end[k] - self.start[k]) / (self.breaks[k + 1] - self.breaks[k]))
            .fold(f64::INFINITY, f64::min)
    }

    fn merged(&self, other: &QuantileFn) -> Vec<Piece> {
        let mut out = Vec::with_capacity(self.n_segments() + other.n_segments());
        let (mut i, mut j) = (0, 0);
        let mut t0 = 0.0;
        while i < self.n_segments() && j < other.n_segments() {
            let ai = self.breaks[i + 1];
            let bj = other.breaks[j + 1];
            let t1 = ai.min(bj);
            if t1 > t0 {
                out.push(Piece {
                    t0,
                    t1,
                    a0: self.lin(i, t0),
                    a1: self.lin(i, t1),
                    b0: other.lin(j, t0),
                    b1: other.lin(j, t1),
                });
                t0 = t1;
            }
            if ai <= t1 {
                i += 1;
            }
            if bj <= t1 {
                j += 1;
            }
        }
        out
    }

    /// `int_0^1 |Q_a - Q_b|^p dt`, exact for piecewise-linear quantiles.
    pub fn lp_distance_pow(&self, other: &QuantileFn, p: CostExponent) -> f64 {
        self.merged(other)
            .iter()
            .map(|pc| (pc.t1 - pc.t0) * mean_pow_linear(pc.a0 - pc.b0, pc.a1 - pc.b1, p.value()))
            .sum()
    }

    /// `(int_0^1 |Q_a - Q_b|^p dt)^{1/p}`: the Wasserstein distance of the two laws.
    pub fn lp_distance(&self, other: &QuantileFn, p: CostExponent) -> f64 {
        p.root(self.lp_distance_pow(other, p))
    }

    /// `q_i = n int_{i/n}^{(i+1)/n} Q(t) dt` for `i = 0..n`.
    pub fn cell_averages(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        let nf = n as f64;
        let mut k = 0;
        for (i, o) in out.iter_mut().enumerate() {
            let lo = i as f64 / nf;
            let hi = if i + 1 == n { 1.0 } else { (i + 1) as f64 / nf };
            while k + 1 < self.n_segments() && self.breaks[k + 1] <= lo {
                k += 1;
            }
            let mut acc = 0.0;
            let mut t0 = lo;
            let mut kk = k;
            while t0 < hi {
                let t1 = self.breaks[kk + 1].min(hi);
                acc += (t1 - t0) * 0.5 * (self.lin(kk, t0) + self.lin(kk, t1));
                t0 = t1;
                if kk + 1 == self.n_segments() {
                    break;
                }
                kk += 1;
            }
            *o = acc * nf;
        }
        out
    }

    /// `(1 - s) Q_a + s Q_b`, the quantile of the displacement interpolant.
    pub fn interpolate(&self, other: &QuantileFn, s: f64) -> QuantileFn {
        let pieces = self.merged(other);
        let mut breaks = vec![0.0];
        let mut start = Vec::with_capacity(pieces.len());
        let mut end = Vec::with_capacity(pieces.len());
        for pc in &pieces {
            breaks.push(pc.t1);
            start.push((1.0 - s) * pc.a0 + s * pc.b0);
            end.push((1.0 - s) * pc.a1 + s * pc.b1);
        }
        *breaks.last_mut().unwrap() = 1.0;
        QuantileFn { breaks, start, end }
    }

    /// Masses the law puts in each cell of a one-dimensional grid.
    pub fn grid_masses(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        if grid.dim() != 1 {
            return Err(Error::DimMismatch {
                expected: 1,
                got: grid.dim(),
            });
        }
        let o = grid.origin()[0];
        let h = grid.spacing()[0];
        let cells = grid.shape()[0];
        let upper = o + cells as f64 * h;
        let slack = 1e-9 * h;
        let mut mass = vec![0.0; cells];
        for k in 0..self.n_segments() {
            let (t0, t1, s, e) = self.segment(k);
            let w = t1 - t0;
            if s < o - slack || e > upper + slack {
                return Err(Error::InvalidSpec(format!(
                    "support [{s}, {e}] leaves the grid [{o}, {upper}]"
                )));
            }
            if e - s <= 1e-15 * (1.0 + s.abs()) {
                let c = (((s - o) / h).floor().max(0.0) as usize).min(cells - 1);
                mass[c] += w;
                continue;
            }
            let density = w / (e - s);
            let c0 = (((s - o) / h).floor().max(0.0) as usize).min(cells - 1);
            let c1 = (((e - o) / h).floor().max(0.0) as usize).min(cells - 1);
            for (c, m) in mass.iter_mut().enumerate().take(c1 + 1).skip(c0) {
                let lo = (o + c as f64 * h).max(s);
                let hi = (o + (c + 1) as f64 * h).min(e);
                if hi > lo {
                    *m += density * (hi - lo);
                }
            }
        }
        Ok(mass)
    }
}

/// Mean of `|D(s)|^p` over `s in [0, 1]` for `D` linear from `d0` to `d1`.
fn mean_pow_linear(d0: f64, d1: f64, p: f64) -> f64 {
    let (a0, a1) = (d0.abs(), d1.abs());
    let q = p + 1.0;
    if d0 * d1 < 0.0 {
        return (a0.powf(q) + a1.powf(q)) / (q * (a0 + a1));
    }
    let (lo, hi) = if a0 <= a1 { (a0, a1) } else { (a1, a0) };
    if hi == 0.0 {
        return 0.0;
    }
    // hi^p (1 - r^q) / (q (1 - r)) with r = lo / hi, evaluated without cancellation
    let lr = ((lo - hi) / hi).ln_1p();
    if lr == 0.0 {
        return hi.powf(p);
    }
    hi.powf(p) * (q * lr).exp_m1() / (q * lr.exp_m1())
}
