//! Transportation simplex for small dense discrete OT problems.
//!
//! North-west-corner start, potentials from the basis tree, Bland's rule
//! for both the entering and the leaving cell. The basis always holds
//! exactly `m + n - 1` cells (degenerate zeros included) so it stays a
//! spanning tree of the bipartite row/column graph.

use std::collections::VecDeque;

use super::{inner, Support};

/// Optimal plan with a dual certificate.
#[derive(Debug, Clone)]
pub struct ExactPlan {
    pub value: f64,
    /// `p.len() x q.len()` row-major.
    pub plan: Vec<f64>,
    /// Row potentials `u`, with `u_i + v_j <= c_ij` everywhere.
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub pivots: usize,
}

impl ExactPlan {
    /// `sum p_i u_i + sum q_j v_j`.
    pub fn dual_value(&self, p: &[f64], q: &[f64]) -> f64 {
        p.iter().zip(&self.u).map(|(a, b)| a * b).sum::<f64>()
            + q.iter().zip(&self.v).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Largest violation of `u_i + v_j <= c_ij`.
    pub fn dual_violation(&self, cost: &[f64]) -> f64 {
        let n = self.v.len();
        let mut worst: f64 = 0.0;
        for (i, ui) in self.u.iter().enumerate() {
            for (j, vj) in self.v.iter().enumerate() {
                worst = worst.max(ui + vj - cost[i * n + j]);
            }
        }
        worst
    }
}

/// Exact minimum of `<plan, cost>` over couplings of `p` and `q`.
pub fn exact_ot_pair(cost: &[f64], p: &[f64], q: &[f64]) -> ExactPlan {
    let (m, n) = (p.len(), q.len());
    assert_eq!(cost.len(), m * n, "cost shape does not match marginals");
    let sup = Support::of(p, q);
    let sp: Vec<f64> = sup.rows.iter().map(|&i| p[i]).collect();
    let sq: Vec<f64> = sup.cols.iter().map(|&j| q[j]).collect();
    let sc = sup.gather(cost, n);
    let sol = Tableau::new(&sc, &sp, &sq).solve();
    let plan = sup.scatter(&sol.flow, m, n);

    // Lift potentials to the full index set keeping dual feasibility.
    let mut v = vec![0.0; n];
    for (b, &j) in sup.cols.iter().enumerate() {
        v[j] = sol.v[b];
    }
    let mut u = vec![0.0; m];
    for (a, &i) in sup.rows.iter().enumerate() {
        u[i] = sol.u[a];
    }
    let in_cols: Vec<bool> = (0..n).map(|j| q[j] > 0.0).collect();
    for j in (0..n).filter(|&j| !in_cols[j]) {
        v[j] = sup.rows.iter().map(|&i| cost[i * n + j] - u[i]).fold(f64::INFINITY, f64::min);
        if !v[j].is_finite() {
            v[j] = 0.0;
        }
    }
    for i in (0..m).filter(|&i| p[i] <= 0.0) {
        u[i] = (0..n).map(|j| cost[i * n + j] - v[j]).fold(f64::INFINITY, f64::min);
        if !u[i].is_finite() {
            u[i] = 0.0;
        }
    }
    ExactPlan { value: inner(&plan, cost), plan, u, v, pivots: sol.pivots }
}

struct Solution {
    flow: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
    pivots: usize,
}

struct Tableau<'a> {
    cost: &'a [f64],
    m: usize,
    n: usize,
    flow: Vec<f64>,
    basic: Vec<bool>,
    /// Basic cells, kept sorted only for determinism of traversal.
    basis: Vec<usize>,
}

impl<'a> Tableau<'a> {
    fn new(cost: &'a [f64], p: &[f64], q: &[f64]) -> Self {
        let (m, n) = (p.len(), q.len());
        let mut flow = vec![0.0; m * n];
        let mut basic = vec![false; m * n];
        let mut basis = Vec::with_capacity(m + n);
        if m > 0 && n > 0 {
            let mut supply = p.to_vec();
            let mut demand = q.to_vec();
            let (mut i, mut j) = (0, 0);
            loop {
                let t = supply[i].min(demand[j]).max(0.0);
                flow[i * n + j] = t;
                basic[i * n + j] = true;
                basis.push(i * n + j);
                supply[i] -= t;
                demand[j] -= t;
                if i == m - 1 && j == n - 1 {
                    break;
                }
                if j == n - 1 || (i < m - 1 && supply[i] <= demand[j]) {
                    i += 1;
                } else {
                    j += 1;
                }
            }
            // Residual imbalance from rounding lands in the last cell.
            flow[m * n - 1] += supply[m - 1].max(0.0).min(demand[n - 1].max(0.0));
        }
        Self { cost, m, n, flow, basic, basis }
    }

    fn potentials(&self) -> (Vec<f64>, Vec<f64>) {
        let (m, n) = (self.m, self.n);
        let mut row_adj = vec![Vec::new(); m];
        let mut col_adj = vec![Vec::new(); n];
        for &cell in &self.basis {
            let (i, j) = (cell / n, cell % n);
            row_adj[i].push(j);
            col_adj[j].push(i);
        }
        let mut u = vec![f64::NAN; m];
        let mut v = vec![f64::NAN; n];
        let mut queue = VecDeque::new();
        u[0] = 0.0;
        queue.push_back((true, 0));
        while let Some((is_row, k)) = queue.pop_front() {
            if is_row {
                for &j in &row_adj[k] {
                    if v[j].is_nan() {
                        v[j] = self.cost[k * n + j] - u[k];
                        queue.push_back((false, j));
                    }
                }
            } else {
                for &i in &col_adj[k] {
                    if u[i].is_nan() {
                        u[i] = self.cost[i * n + k] - v[k];
                        queue.push_back((true, i));
                    }
                }
            }
        }
        (u, v)
    }

    /// Basic cells on the tree path from row `r` to column `c`, in order.
    fn tree_path(&self, r: usize, c: usize) -> Vec<usize> {
        let (m, n) = (self.m, self.n);
        // Nodes: rows 0..m, columns m..m+n.
        let mut adj = vec![Vec::new(); m + n];
        for &cell in &self.basis {
            let (i, j) = (cell / n, cell % n);
            adj[i].push((m + j, cell));
            adj[m + j].push((i, cell));
        }
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; m + n];
        let mut seen = vec![false; m + n];
        let mut queue = VecDeque::new();
        seen[r] = true;
        queue.push_back(r);
        let target = m + c;
        while let Some(a) = queue.pop_front() {
            if a == target {
                break;
            }
            for &(b, cell) in &adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    prev[b] = Some((a, cell));
                    queue.push_back(b);
                }
            }
        }
        let mut path = Vec::new();
        let mut at = target;
        while let Some((a, cell)) = prev[at] {
            path.push(cell);
            at = a;
        }
        path.reverse();
        path
    }

    fn solve(mut self) -> Solution {
        let (m, n) = (self.m, self.n);
        if m == 0 || n == 0 {
            return Solution { flow: self.flow, u: vec![0.0; m], v: vec![0.0; n], pivots: 0 };
        }
        let scale = self.cost.iter().fold(1.0f64, |a, &c| a.max(c.abs()));
        let eps = 1e-12 * scale;
        let cap = 50 * (m * n).max(16) * (m + n);
        let mut pivots = 0;
        loop {
            let (u, v) = self.potentials();
            let entering = (0..m * n).find(|&cell| {
                !self.basic[cell] && self.cost[cell] - u[cell / n] - v[cell % n] < -eps
            });
            let Some(enter) = entering else {
                return Solution { flow: self.flow, u, v, pivots };
            };
            if pivots >= cap {
                // Unreachable under Bland's rule; kept as a hard stop.
                return Solution { flow: self.flow, u, v, pivots };
            }
            let path = self.tree_path(enter / n, enter % n);
            // Path from the entering row to the entering column: odd
            // positions (0, 2, ...) lose flow, the others gain.
            let minus: Vec<usize> = path.iter().step_by(2).copied().collect();
            let theta = minus.iter().map(|&c| self.flow[c]).fold(f64::INFINITY, f64::min);
            let leave = *minus
                .iter()
                .filter(|&&c| self.flow[c] <= theta)
                .min()
                .expect("cycle has a decreasing cell");
            for (k, &cell) in path.iter().enumerate() {
                if k % 2 == 0 {
                    self.flow[cell] = (self.flow[cell] - theta).max(0.0);
                } else {
                    self.flow[cell] += theta;
                }
            }
            self.flow[enter] += theta;
            self.flow[leave] = 0.0;
            self.basic[leave] = false;
            self.basic[enter] = true;
            let pos = self.basis.iter().position(|&c| c == leave).expect("leaving cell is basic");
            self.basis[pos] = enter;
            pivots += 1;
        }
    }
}
