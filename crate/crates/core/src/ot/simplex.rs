//! Primal network simplex for dense transportation problems.
//!
//! Follows the spanning-tree bookkeeping of LEMON's `NetworkSimplex` (thread
//! lists, successor counts, block-search pivoting) specialised to the complete
//! bipartite graph `sources x sinks` with uncapacitated arcs. The start basis is
//! the north-west-corner tree rooted at source 0; ties that exhaust a row and a
//! column together are resolved by stepping right, which keeps every zero-flow
//! tree arc pointing away from the root (a strongly feasible tree).

use crate::error::{Error, Result};

const NONE: usize = usize::MAX;
const UP: f64 = 1.0;
const DOWN: f64 = -1.0;

/// Relative tolerance on reduced costs for an arc to enter the basis.
pub const PIVOT_TOL: f64 = 1e-12;

/// Optimal flows `(source, sink, mass)` with positive mass and their total cost.
#[derive(Debug, Clone)]
pub struct TransportSolution {
    pub flows: Vec<(usize, usize, f64)>,
    pub cost: f64,
    pub pivots: usize,
}

/// Minimises `sum f_ij c_ij` subject to row sums `supply` and column sums `demand`.
///
/// `cost` is row-major `supply.len() x demand.len()`. Supplies and demands must be
/// nonnegative with (numerically) equal totals.
pub fn solve_transport(supply: &[f64], demand: &[f64], cost: &[f64]) -> Result<TransportSolution> {
    let n = supply.len();
    let m = demand.len();
    if n == 0 || m == 0 {
        return Err(Error::InvalidSpec("empty transport problem".into()));
    }
    if cost.len() != n * m {
        return Err(Error::InvalidSpec(format!(
            "cost has {} entries for a {n}x{m} problem",
            cost.len()
        )));
    }
    if supply.iter().chain(demand).any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidSpec("supplies and demands must be nonnegative".into()));
    }
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidSpec("non-finite transport cost".into()));
    }
    let total_s: f64 = supply.iter().sum();
    let total_d: f64 = demand.iter().sum();
    if (total_s - total_d).abs() > 1e-9 * total_s.max(total_d).max(1.0) {
        return Err(Error::MarginalMismatch(format!(
            "supply {total_s} differs from demand {total_d}"
        )));
    }
    let mut ns = NetworkSimplex::new(supply, demand, cost);
    ns.run()?;
    ns.solution()
}

struct NetworkSimplex<'a> {
    n: usize,
    m: usize,
    supply: &'a [f64],
    demand: &'a [f64],
    cost: &'a [f64],
    eps: f64,
    block_size: usize,
    next_arc: usize,
    in_tree: Vec<bool>,

    parent: Vec<usize>,
    pred: Vec<usize>,
    pred_dir: Vec<f64>,
    pred_flow: Vec<f64>,
    thread: Vec<usize>,
    rev_thread: Vec<usize>,
    succ_num: Vec<usize>,
    last_succ: Vec<usize>,
    pi: Vec<f64>,
    dirty_revs: Vec<usize>,

    // pivot state
    in_arc: usize,
    join: usize,
    u_in: usize,
    v_in: usize,
    u_out: usize,
    delta: f64,
    pivots: usize,
}

impl<'a> NetworkSimplex<'a> {
    fn new(supply: &'a [f64], demand: &'a [f64], cost: &'a [f64]) -> Self {
        let n = supply.len();
        let m = demand.len();
        let nodes = n + m;
        let arcs = n * m;
        let max_cost = cost.iter().fold(0.0f64, |a, &c| a.max(c.abs()));
        let block_size = ((arcs as f64).sqrt() as usize).max(10);
        let mut ns = Self {
            n,
            m,
            supply,
            demand,
            cost,
            eps: PIVOT_TOL * max_cost.max(f64::MIN_POSITIVE),
            block_size,
            next_arc: 0,
            in_tree: vec![false; arcs],
            parent: vec![NONE; nodes],
            pred: vec![NONE; nodes],
            pred_dir: vec![0.0; nodes],
            pred_flow: vec![0.0; nodes],
            thread: vec![0; nodes],
            rev_thread: vec![0; nodes],
            succ_num: vec![1; nodes],
            last_succ: vec![0; nodes],
            pi: vec![0.0; nodes],
            dirty_revs: Vec::new(),
            in_arc: 0,
            join: 0,
            u_in: 0,
            v_in: 0,
            u_out: 0,
            delta: 0.0,
            pivots: 0,
        };
        ns.init_north_west();
        ns
    }

    #[inline]
    fn src(&self, e: usize) -> usize {
        e / self.m
    }

    #[inline]
    fn tgt(&self, e: usize) -> usize {
        self.n + e % self.m
    }

    fn init_north_west(&mut self) {
        let (n, m) = (self.n, self.m);
        let scale = self.supply.iter().sum::<f64>().max(f64::MIN_POSITIVE);
        let tiny = 1e-14 * scale;
        let mut rem_s = self.supply.to_vec();
        let mut rem_d = self.demand.to_vec();
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n + m];
        let (mut i, mut j) = (0, 0);
        // cell (0, 0) hangs sink 0 below the root
        let f = rem_s[0].min(rem_d[0]);
        self.attach(n, 0, 0, DOWN, f, &mut children);
        rem_s[0] -= f;
        rem_d[0] -= f;
        while !(i == n - 1 && j == m - 1) {
            let step_down = j == m - 1 || (i < n - 1 && rem_s[i] <= tiny && rem_d[j] > tiny);
            if step_down {
                i += 1;
            } else {
                j += 1;
            }
            let f = rem_s[i].min(rem_d[j]).max(0.0);
            if step_down {
                self.attach(i, n + j, i * m + j, UP, f, &mut children);
            } else {
                self.attach(n + j, i, i * m + j, DOWN, f, &mut children);
            }
            rem_s[i] -= f;
            rem_d[j] -= f;
        }
        self.build_threads(&children);
    }

    fn attach(&mut self, child: usize, parent: usize, arc: usize, dir: f64, flow: f64, children: &mut [Vec<usize>]) {
        self.in_tree[arc] = true;
        self.parent[child] = parent;
        self.pred[child] = arc;
        self.pred_dir[child] = dir;
        self.pred_flow[child] = flow;
        children[parent].push(child);
    }

    fn build_threads(&mut self, children: &[Vec<usize>]) {
        let nodes = self.n + self.m;
        let root = 0;
        let mut order = Vec::with_capacity(nodes);
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            order.push(u);
            for &c in children[u].iter().rev() {
                stack.push(c);
            }
        }
        debug_assert_eq!(order.len(), nodes);
        for k in 0..nodes {
            let u = order[k];
            let v = order[(k + 1) % nodes];
            self.thread[u] = v;
            self.rev_thread[v] = u;
        }
        for &u in order.iter().rev() {
            self.succ_num[u] = 1 + children[u].iter().map(|&c| self.succ_num[c]).sum::<usize>();
            self.last_succ[u] = children[u].last().map_or(u, |&c| self.last_succ[c]);
        }
        self.pi[root] = 0.0;
        for &u in order.iter().skip(1) {
            let p = self.parent[u];
            let c = self.cost[self.pred[u]];
            // tree arcs have zero reduced cost: c + pi[src] - pi[tgt] = 0
            self.pi[u] = if self.pred_dir[u] == DOWN {
                self.pi[p] + c
            } else {
                self.pi[p] - c
            };
        }
    }

    fn find_entering(&mut self) -> bool {
        let arcs = self.n * self.m;
        let (n, m) = (self.n, self.m);
        let mut min = -self.eps;
        let mut found = NONE;
        let mut cnt = self.block_size;
        let mut e = self.next_arc;
        let mut i = e / m;
        let mut j = e % m;
        for _ in 0..arcs {
            if !self.in_tree[e] {
                let c = self.cost[e] + self.pi[i] - self.pi[n + j];
                if c < min {
                    min = c;
                    found = e;
                }
            }
            e += 1;
            j += 1;
            if j == m {
                j = 0;
                i += 1;
                if i == n {
                    i = 0;
                    e = 0;
                }
            }
            cnt -= 1;
            if cnt == 0 {
                if found != NONE {
                    break;
                }
                cnt = self.block_size;
            }
        }
        if found == NONE {
            return false;
        }
        self.in_arc = found;
        self.next_arc = e;
        true
    }

    fn find_join(&mut self) {
        let mut u = self.src(self.in_arc);
        let mut v = self.tgt(self.in_arc);
        while u != v {
            if self.succ_num[u] < self.succ_num[v] {
                u = self.parent[u];
            } else {
                v = self.parent[v];
            }
        }
        self.join = u;
    }

    fn find_leaving(&mut self) -> bool {
        let first = self.src(self.in_arc);
        let second = self.tgt(self.in_arc);
        let mut delta = f64::INFINITY;
        let mut result = 0;
        let mut u = first;
        while u != self.join {
            if self.pred_dir[u] == UP {
                let d = self.pred_flow[u].max(0.0);
                if d < delta {
                    delta = d;
                    self.u_out = u;
                    result = 1;
                }
            }
            u = self.parent[u];
        }
        u = second;
        while u != self.join {
            if self.pred_dir[u] == DOWN {
                let d = self.pred_flow[u].max(0.0);
                if d <= delta {
                    delta = d;
                    self.u_out = u;
                    result = 2;
                }
            }
            u = self.parent[u];
        }
        if result == 0 {
            return false;
        }
        if result == 1 {
            self.u_in = first;
            self.v_in = second;
        } else {
            self.u_in = second;
            self.v_in = first;
        }
        self.delta = delta;
        true
    }

    fn change_flow(&mut self) {
        let delta = self.delta;
        if delta > 0.0 {
            let mut u = self.src(self.in_arc);
            while u != self.join {
                self.pred_flow[u] -= self.pred_dir[u] * delta;
                u = self.parent[u];
            }
            u = self.tgt(self.in_arc);
            while u != self.join {
                self.pred_flow[u] += self.pred_dir[u] * delta;
                u = self.parent[u];
            }
        }
        let leaving = self.pred[self.u_out];
        self.in_tree[self.in_arc] = true;
        self.in_tree[leaving] = false;
    }

    fn update_tree(&mut self) {
        let u_in = self.u_in;
        let v_in = self.v_in;
        let u_out = self.u_out;
        let join = self.join;
        let in_arc = self.in_arc;
        let in_flow = self.delta;
        let in_dir = if u_in == self.src(in_arc) { UP } else { DOWN };

        let old_rev_thread = self.rev_thread[u_out];
        let old_succ_num = self.succ_num[u_out];
        let old_last_succ = self.last_succ[u_out];
        let v_out = self.parent[u_out];

        if u_in == u_out {
            self.parent[u_in] = v_in;
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = in_dir;
            self.pred_flow[u_in] = in_flow;

            if self.thread[v_in] != u_out {
                let mut after = self.thread[old_last_succ];
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
                after = self.thread[v_in];
                self.thread[v_in] = u_out;
                self.rev_thread[u_out] = v_in;
                self.thread[old_last_succ] = after;
                self.rev_thread[after] = old_last_succ;
            }
        } else {
            let thread_continue = if old_rev_thread == v_in {
                self.thread[old_last_succ]
            } else {
                self.thread[v_in]
            };

            // re-hang the stem between u_in and u_out
            let mut stem = u_in;
            let mut par_stem = v_in;
            let mut last = self.last_succ[u_in];
            let mut after = self.thread[last];
            self.thread[v_in] = u_in;
            self.dirty_revs.clear();
            self.dirty_revs.push(v_in);
            while stem != u_out {
                let next_stem = self.parent[stem];
                self.thread[last] = next_stem;
                self.dirty_revs.push(last);

                let before = self.rev_thread[stem];
                self.thread[before] = after;
                self.rev_thread[after] = before;

                self.parent[stem] = par_stem;
                par_stem = stem;
                stem = next_stem;

                last = if self.last_succ[stem] == self.last_succ[par_stem] {
                    self.rev_thread[par_stem]
                } else {
                    self.last_succ[stem]
                };
                after = self.thread[last];
            }
            self.parent[u_out] = par_stem;
            self.thread[last] = thread_continue;
            self.rev_thread[thread_continue] = last;
            self.last_succ[u_out] = last;

            if old_rev_thread != v_in {
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
            }

            for k in 0..self.dirty_revs.len() {
                let u = self.dirty_revs[k];
                let t = self.thread[u];
                self.rev_thread[t] = u;
            }

            let mut tmp_sc = 0usize;
            let tmp_ls = self.last_succ[u_out];
            let mut u = u_out;
            let mut p = self.parent[u];
            while u != u_in {
                self.pred[u] = self.pred[p];
                self.pred_dir[u] = -self.pred_dir[p];
                self.pred_flow[u] = self.pred_flow[p];
                // succ_num[u] - succ_num[p] is negative; keep the running total signed
                tmp_sc = tmp_sc
                    .wrapping_add(self.succ_num[u])
                    .wrapping_sub(self.succ_num[p]);
                self.succ_num[u] = tmp_sc;
                self.last_succ[p] = tmp_ls;
                u = p;
                p = self.parent[u];
            }
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = in_dir;
            self.pred_flow[u_in] = in_flow;
            self.succ_num[u_in] = old_succ_num;
        }

        let up_limit_out = if self.last_succ[join] == v_in { join } else { NONE };
        let last_succ_out = self.last_succ[u_out];
        let mut u = v_in;
        while u != NONE && self.last_succ[u] == v_in {
            self.last_succ[u] = last_succ_out;
            u = self.parent[u];
        }

        if join != old_rev_thread && v_in != old_rev_thread {
            let mut u = v_out;
            while u != up_limit_out && u != NONE && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = old_rev_thread;
                u = self.parent[u];
            }
        } else if last_succ_out != old_last_succ {
            let mut u = v_out;
            while u != up_limit_out && u != NONE && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = last_succ_out;
                u = self.parent[u];
            }
        }

        let mut u = v_in;
        while u != join {
            self.succ_num[u] += old_succ_num;
            u = self.parent[u];
        }
        let mut u = v_out;
        while u != join {
            self.succ_num[u] -= old_succ_num;
            u = self.parent[u];
        }
    }

    fn update_potential(&mut self) {
        let u_in = self.u_in;
        let sigma = self.pi[self.v_in] - self.pi[u_in] - self.pred_dir[u_in] * self.cost[self.in_arc];
        let end = self.thread[self.last_succ[u_in]];
        let mut u = u_in;
        while u != end {
            self.pi[u] += sigma;
            u = self.thread[u];
        }
    }

    fn run(&mut self) -> Result<()> {
        let arcs = self.n * self.m;
        let max_pivots = 100 * (arcs + self.n + self.m) + 1000;
        while self.find_entering() {
            self.find_join();
            if !self.find_leaving() {
                return Err(Error::Solver("transport problem is unbounded".into()));
            }
            self.change_flow();
            self.update_tree();
            self.update_potential();
            self.pivots += 1;
            if self.pivots > max_pivots {
                return Err(Error::Solver(format!("no convergence after {max_pivots} pivots")));
            }
        }
        Ok(())
    }

    /// Tree flows recomputed from the basis so that marginals hold to rounding.
    fn solution(&self) -> Result<TransportSolution> {
        let nodes = self.n + self.m;
        let mut net: Vec<f64> = self
            .supply
            .iter()
            .copied()
            .chain(self.demand.iter().map(|d| -d))
            .collect();
        // reverse preorder visits children before parents
        let mut order = Vec::with_capacity(nodes);
        let mut u = 0;
        for _ in 0..nodes {
            order.push(u);
            u = self.thread[u];
        }
        let scale = self.supply.iter().sum::<f64>().max(f64::MIN_POSITIVE);
        let mut flows = Vec::with_capacity(nodes);
        let mut total = 0.0;
        for &u in order.iter().rev() {
            let p = self.parent[u];
            if p == NONE {
                continue;
            }
            let e = self.pred[u];
            let f = if self.pred_dir[u] == UP { net[u] } else { -net[u] };
            net[p] += net[u];
            if f < -1e-9 * scale {
                return Err(Error::Solver(format!("negative basic flow {f}")));
            }
            if f > 0.0 {
                flows.push((self.src(e), self.tgt(e) - self.n, f));
                total += f * self.cost[e];
            }
        }
        flows.sort_unstable_by_key(|f| (f.0, f.1));
        Ok(TransportSolution {
            flows,
            cost: total,
            pivots: self.pivots,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // exhaustive search over permutation matrices for uniform assignment
    fn brute_assignment(cost: &[f64], n: usize) -> f64 {
        fn rec(k: usize, n: usize, used: &mut Vec<bool>, acc: f64, cost: &[f64], best: &mut f64) {
            if k == n {
                *best = best.min(acc);
                return;
            }
            for j in 0..n {
                if !used[j] {
                    used[j] = true;
                    rec(k + 1, n, used, acc + cost[k * n + j], cost, best);
                    used[j] = false;
                }
            }
        }
        let mut best = f64::INFINITY;
        rec(0, n, &mut vec![false; n], 0.0, cost, &mut best);
        best / n as f64
    }

    fn lcg(state: &mut u64) -> f64 {
        *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (*state >> 11) as f64 / (1u64 << 53) as f64
    }

    #[test]
    fn forced_plan() {
        let sol = solve_transport(&[1.0], &[0.5, 0.5], &[1.0, 1.0]).unwrap();
        assert!((sol.cost - 1.0).abs() < 1e-15);
        assert_eq!(sol.flows.len(), 2);
    }

    #[test]
    fn assignment_matches_enumeration() {
        let mut s = 42u64;
        for n in 2..=7 {
            for _ in 0..20 {
                let cost: Vec<f64> = (0..n * n).map(|_| lcg(&mut s)).collect();
                let w = vec![1.0 / n as f64; n];
                let sol = solve_transport(&w, &w, &cost).unwrap();
                let brute = brute_assignment(&cost, n);
                assert!((sol.cost - brute).abs() < 1e-12, "n={n}: {} vs {brute}", sol.cost);
            }
        }
    }

    #[test]
    fn marginals_hold_for_random_weights() {
        let mut s = 7u64;
        for _ in 0..50 {
            let n = 1 + (lcg(&mut s) * 30.0) as usize;
            let m = 1 + (lcg(&mut s) * 30.0) as usize;
            let mut a: Vec<f64> = (0..n).map(|_| lcg(&mut s) + 0.01).collect();
            let mut b: Vec<f64> = (0..m).map(|_| lcg(&mut s) + 0.01).collect();
            let sa: f64 = a.iter().sum();
            let sb: f64 = b.iter().sum();
            a.iter_mut().for_each(|x| *x /= sa);
            b.iter_mut().for_each(|x| *x /= sb);
            let cost: Vec<f64> = (0..n * m).map(|_| lcg(&mut s) * 5.0).collect();
            let sol = solve_transport(&a, &b, &cost).unwrap();
            let mut rows = vec![0.0; n];
            let mut cols = vec![0.0; m];
            for &(i, j, f) in &sol.flows {
                rows[i] += f;
                cols[j] += f;
            }
            for i in 0..n {
                assert!((rows[i] - a[i]).abs() < 1e-12);
            }
            for j in 0..m {
                assert!((cols[j] - b[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_unbalanced() {
        assert!(solve_transport(&[1.0], &[0.5], &[0.0]).is_err());
    }
}
