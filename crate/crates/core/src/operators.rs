//! Dynamic-programming operators on state pairs.
//!
//! The Bellman–Sinkhorn operator for axis X acts on tables
//! `V_X(xy, x')` and is the entropy-smoothed analogue of policy evaluation
//! restricted to couplings with the X-marginal fixed:
//!
//! ```text
//! (T V)(xy, x') = -1/eta log sum_{y'} pi(x'y'|xy) / P_X(x'|x)
//!                   * exp(-eta (c(xy) + gamma sum_{x''} P_X(x''|x') V(x'y', x'')))
//! ```
//!
//! Axis Y is the mirror image. Cells with `P_X(x'|x) = 0` are stored as 0
//! and never read. Each sweep is a Jacobi update: every output row reads
//! only the previous table, so rows are computed in parallel.

use crate::chain::{DiscountedProblem, MarkovChain};
use crate::coupling::TransitionCoupling;
use crate::error::{Error, Result};
use crate::linalg;
use crate::par;
use crate::transport::exact_ot_pair;

/// Which marginal a projection step enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn other(self) -> Self {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }
}

/// Index bookkeeping for one axis: the "own" chain is the one whose
/// marginal the step fixes.
#[derive(Clone, Copy)]
struct Frame<'a> {
    axis: Axis,
    own: &'a MarkovChain,
    other: &'a MarkovChain,
    ny: usize,
}

impl<'a> Frame<'a> {
    fn new(axis: Axis, problem: &'a DiscountedProblem) -> Self {
        let (own, other) = match axis {
            Axis::X => (problem.chain_x(), problem.chain_y()),
            Axis::Y => (problem.chain_y(), problem.chain_x()),
        };
        Self { axis, own, other, ny: problem.ny() }
    }

    #[inline]
    fn pair(&self, own: usize, other: usize) -> usize {
        match self.axis {
            Axis::X => own * self.ny + other,
            Axis::Y => other * self.ny + own,
        }
    }

    #[inline]
    fn split(&self, pair: usize) -> (usize, usize) {
        let (x, y) = (pair / self.ny, pair % self.ny);
        match self.axis {
            Axis::X => (x, y),
            Axis::Y => (y, x),
        }
    }
}

/// `V_X` (shape `|XY| x |X|`) or `V_Y` (shape `|XY| x |Y|`).
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTableAxis {
    axis: Axis,
    width: usize,
    values: Vec<f64>,
}

impl ValueTableAxis {
    pub fn zeros(axis: Axis, problem: &DiscountedProblem) -> Self {
        let width = match axis {
            Axis::X => problem.nx(),
            Axis::Y => problem.ny(),
        };
        Self { axis, width, values: vec![0.0; problem.n_pairs() * width] }
    }

    /// Wraps raw values; cells outside the kernel support are zeroed.
    pub fn from_values(axis: Axis, problem: &DiscountedProblem, values: Vec<f64>) -> Result<Self> {
        let mut t = Self::zeros(axis, problem);
        if values.len() != t.values.len() {
            return Err(Error::DimensionMismatch {
                expected: t.values.len().to_string(),
                got: values.len().to_string(),
            });
        }
        let frame = Frame::new(axis, problem);
        for pair in 0..problem.n_pairs() {
            let (a, _) = frame.split(pair);
            for &an in frame.own.support(a) {
                t.values[pair * t.width + an] = values[pair * t.width + an];
            }
        }
        Ok(t)
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, pair: usize, next: usize) -> f64 {
        self.values[pair * self.width + next]
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        sup_diff(&self.values, &other.values)
    }

    /// Shifts every reachable cell by `delta`.
    pub fn shifted(&self, problem: &DiscountedProblem, delta: f64) -> Self {
        let mut out = self.clone();
        let frame = Frame::new(self.axis, problem);
        for pair in 0..problem.n_pairs() {
            let (a, _) = frame.split(pair);
            for &an in frame.own.support(a) {
                out.values[pair * self.width + an] += delta;
            }
        }
        out
    }
}

/// A function on state pairs: `V^pi`, `V*` and friends.
#[derive(Debug, Clone, PartialEq)]
pub struct PairValue(pub Vec<f64>);

impl PairValue {
    pub fn zeros(problem: &DiscountedProblem) -> Self {
        Self(vec![0.0; problem.n_pairs()])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub fn get(&self, pair: usize) -> f64 {
        self.0[pair]
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        sup_diff(&self.0, &other.0)
    }

    /// `sum_xy nu_0(xy) V(xy)`.
    pub fn at_initial(&self, problem: &DiscountedProblem) -> f64 {
        problem.initial().iter().zip(&self.0).map(|(w, v)| w * v).sum()
    }
}

/// A function on transitions `(xy, x'y')`, dense `|XY| x |XY|`.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    n: usize,
    values: Vec<f64>,
}

impl QTable {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64 + Sync) -> Self {
        let mut values = vec![0.0; n * n];
        par::for_each_row(&mut values, n, |i, row| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(i, j);
            }
        });
        Self { n, values }
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.values[from * self.n + to]
    }

    #[inline]
    pub fn row(&self, from: usize) -> &[f64] {
        &self.values[from * self.n..(from + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `W(x'y') = sum_{x''} P_X(x''|x') V_X(x'y', x'')` (or the Y analogue).
fn continuation(v: &ValueTableAxis, problem: &DiscountedProblem) -> Vec<f64> {
    let frame = Frame::new(v.axis, problem);
    par::map_indexed(problem.n_pairs(), |pair| {
        let (a, _) = frame.split(pair);
        frame.own.support(a).iter().map(|&an| frame.own.p(a, an) * v.get(pair, an)).sum()
    })
}

/// One application of the Bellman–Sinkhorn operator along `axis`.
///
/// If a block `pi(x'. | xy)` has no mass although `P_X(x'|x) > 0`, the
/// weights fall back to `P_Y(.|y)`, matching the fallback of
/// [`multiplicative_update`].
pub fn apply_bellman_sinkhorn(
    axis: Axis,
    pi: &TransitionCoupling,
    v: &ValueTableAxis,
    problem: &DiscountedProblem,
    eta: f64,
) -> ValueTableAxis {
    assert!(eta > 0.0, "eta must be positive");
    assert_eq!(v.axis, axis, "value table axis mismatch");
    BlockWeights::new(axis, pi, problem).apply(v, problem, eta)
}

/// The ratios `pi(x'y'|xy) / P_X(x'|x)` grouped by `(xy, x')` block, with
/// zero entries dropped. They stay fixed while an inner solve sweeps, so
/// they are gathered once.
struct BlockWeights {
    axis: Axis,
    width: usize,
    /// Per row: `(x', start, end)` ranges into `terms`.
    blocks: Vec<Vec<(usize, usize, usize)>>,
    /// Per row: `(x'y', weight)`.
    terms: Vec<Vec<(usize, f64)>>,
}

impl BlockWeights {
    fn new(axis: Axis, pi: &TransitionCoupling, problem: &DiscountedProblem) -> Self {
        let frame = Frame::new(axis, problem);
        let width = frame.own.len();
        let n_other = frame.other.len();
        let rows = par::map_indexed(problem.n_pairs(), |pair| {
            let (a, b) = frame.split(pair);
            let row = pi.row(pair);
            let mut blocks = Vec::with_capacity(frame.own.support(a).len());
            let mut terms = Vec::new();
            for &an in frame.own.support(a) {
                let p = frame.own.p(a, an);
                let start = terms.len();
                for bn in 0..n_other {
                    let j = frame.pair(an, bn);
                    if row[j] > 0.0 {
                        terms.push((j, row[j] / p));
                    }
                }
                if terms.len() == start {
                    terms.extend(
                        frame.other.support(b).iter().map(|&bn| (frame.pair(an, bn), frame.other.p(b, bn))),
                    );
                }
                blocks.push((an, start, terms.len()));
            }
            (blocks, terms)
        });
        let (blocks, terms) = rows.into_iter().unzip();
        Self { axis, width, blocks, terms }
    }

    fn apply(&self, v: &ValueTableAxis, problem: &DiscountedProblem, eta: f64) -> ValueTableAxis {
        let w = continuation(v, problem);
        let g = problem.gamma();
        let mut values = vec![0.0; problem.n_pairs() * self.width];
        // softmin_eta(c + g w) = c + g softmin_{eta g}(w).
        par::for_each_row(&mut values, self.width, |pair, out| {
            let c = problem.c(pair);
            let terms = &self.terms[pair];
            for &(an, start, end) in &self.blocks[pair] {
                out[an] = c + g * soft_min(&terms[start..end], &w, eta * g);
            }
        });
        ValueTableAxis { axis: self.axis, width: self.width, values }
    }
}

/// `-1/eta log sum_k w_k exp(-eta z_k)` with `z_k = w[j_k]`, evaluated
/// with a min-shift.
#[inline]
fn soft_min(terms: &[(usize, f64)], z: &[f64], eta: f64) -> f64 {
    let zmin = terms.iter().map(|&(j, _)| z[j]).fold(f64::INFINITY, f64::min);
    let s: f64 = terms.iter().map(|&(j, wt)| wt * (-eta * (z[j] - zmin)).exp()).sum();
    zmin - s.ln() / eta
}

/// How many operator applications an inner solve performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerSteps {
    /// Exactly `m` applications.
    Fixed(usize),
    /// Iterate until the sup-norm change drops below the tolerance.
    Converge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointReport {
    pub sweeps: usize,
    /// Sup-norm change of the last sweep.
    pub residual: f64,
}

/// Default sweep cap for [`InnerSteps::Converge`].
pub const DEFAULT_SWEEP_CAP: usize = 100_000;

/// Repeated application of [`apply_bellman_sinkhorn`] from `v_init`.
///
/// With [`InnerSteps::Converge`] the returned table `V` satisfies
/// `|T V - V|_inf <= tol`; exceeding `cap` sweeps is an error.
#[allow(clippy::too_many_arguments)]
pub fn solve_bs_fixed_point(
    axis: Axis,
    pi: &TransitionCoupling,
    v_init: &ValueTableAxis,
    problem: &DiscountedProblem,
    eta: f64,
    steps: InnerSteps,
    tol: f64,
    cap: usize,
) -> Result<(ValueTableAxis, FixedPointReport)> {
    assert!(eta > 0.0, "eta must be positive");
    assert_eq!(v_init.axis, axis, "value table axis mismatch");
    let weights = BlockWeights::new(axis, pi, problem);
    let mut v = v_init.clone();
    let mut residual = f64::INFINITY;
    let mut sweeps = 0;
    loop {
        match steps {
            InnerSteps::Fixed(m) if sweeps >= m => break,
            InnerSteps::Converge if residual <= tol => break,
            InnerSteps::Converge if sweeps >= cap => {
                return Err(Error::IterationCap { cap, residual });
            }
            _ => {}
        }
        let next = weights.apply(&v, problem, eta);
        residual = next.sup_distance(&v);
        v = next;
        sweeps += 1;
    }
    Ok((v, FixedPointReport { sweeps, residual }))
}

/// Multiplicative (mirror) update of `pi` along `axis`:
///
/// ```text
/// pi'(x'y'|xy) = pi(x'y'|xy) e^{-eta Q(xy,x'y')} / sum_{y''} pi(x'y''|xy) e^{-eta Q(xy,x'y'')} * P_X(x'|x)
/// ```
///
/// The X-marginal of every output row equals `P_X(.|x)` and zeros of `pi`
/// stay zero. A block with no mass where `P_X(x'|x) > 0` is filled with
/// the product coupling.
pub fn multiplicative_update(
    axis: Axis,
    pi: &TransitionCoupling,
    q: &QTable,
    problem: &DiscountedProblem,
    eta: f64,
) -> TransitionCoupling {
    assert!(eta >= 0.0, "eta must be nonnegative");
    let frame = Frame::new(axis, problem);
    let n = problem.n_pairs();
    let n_own = frame.own.len();
    let n_other = frame.other.len();
    let mut out = pi.clone();
    par::for_each_row(out.table_mut(), n, |pair, row| {
        let (a, b) = frame.split(pair);
        let qrow = q.row(pair);
        for an in 0..n_own {
            let p = frame.own.p(a, an);
            if p <= 0.0 {
                for bn in 0..n_other {
                    row[frame.pair(an, bn)] = 0.0;
                }
                continue;
            }
            let qmin = (0..n_other)
                .map(|bn| frame.pair(an, bn))
                .filter(|&j| row[j] > 0.0)
                .map(|j| qrow[j])
                .fold(f64::INFINITY, f64::min);
            let mut s = 0.0;
            for bn in 0..n_other {
                let j = frame.pair(an, bn);
                if row[j] > 0.0 {
                    row[j] *= (-eta * (qrow[j] - qmin)).exp();
                    s += row[j];
                }
            }
            if s > 0.0 && s.is_finite() {
                let scale = p / s;
                for bn in 0..n_other {
                    row[frame.pair(an, bn)] *= scale;
                }
            } else {
                for bn in 0..n_other {
                    row[frame.pair(an, bn)] = p * frame.other.p(b, bn);
                }
            }
        }
    });
    out
}

/// `V^pi = (I - gamma pi)^{-1} c`, by dense LU.
pub fn policy_evaluation(pi: &TransitionCoupling, problem: &DiscountedProblem) -> Result<PairValue> {
    let n = problem.n_pairs();
    let (v, residual) =
        linalg::solve_discounted(pi.table(), n, problem.gamma(), false, problem.cost().values());
    let scale = 1.0f64.max(problem.cost().sup_norm() / (1.0 - problem.gamma()));
    linalg::check_residual(residual, 1e-10 * scale)?;
    Ok(PairValue(v))
}

/// `m` applications of `V <- c + gamma pi V` starting from `v`.
pub fn evaluate_steps(
    pi: &TransitionCoupling,
    v: &PairValue,
    problem: &DiscountedProblem,
    m: usize,
) -> PairValue {
    let g = problem.gamma();
    let mut cur = v.clone();
    for _ in 0..m {
        let next = par::map_indexed(problem.n_pairs(), |i| {
            let ev: f64 = pi.row(i).iter().zip(&cur.0).map(|(p, v)| p * v).sum();
            problem.c(i) + g * ev
        });
        cur = PairValue(next);
    }
    cur
}

/// `Q(xy, x'y') = c(xy) + gamma V(x'y')`.
pub fn q_from_value(v: &PairValue, problem: &DiscountedProblem) -> QTable {
    let g = problem.gamma();
    QTable::from_fn(problem.n_pairs(), |i, j| problem.c(i) + g * v.get(j))
}

/// `Q(xy, x'y') = c(xy) + gamma sum_{x''} P_X(x''|x') V_X(x'y', x'')` (or the
/// Y analogue), the cost fed to [`multiplicative_update`] by SVI.
pub fn q_from_axis_table(v: &ValueTableAxis, problem: &DiscountedProblem) -> QTable {
    let w = continuation(v, problem);
    let g = problem.gamma();
    QTable::from_fn(problem.n_pairs(), |i, j| problem.c(i) + g * w[j])
}

/// Result of one exact Bellman optimality step.
#[derive(Debug, Clone)]
pub struct BellmanStep {
    pub value: PairValue,
    /// Optimal inner plans, one per state pair.
    pub greedy: TransitionCoupling,
}

/// `V'(xy) = c(xy) + gamma min_{p in Pi_xy} <p, V>`, with the inner problem
/// solved exactly over the product of the two kernel supports.
pub fn exact_bellman_operator(v: &PairValue, problem: &DiscountedProblem) -> BellmanStep {
    let (nx, ny) = (problem.nx(), problem.ny());
    let n = nx * ny;
    let g = problem.gamma();
    let (cx, cy) = (problem.chain_x(), problem.chain_y());
    let rows = par::map_indexed(n, |i| {
        let (x, y) = (i / ny, i % ny);
        let (sx, sy) = (cx.support(x), cy.support(y));
        let p: Vec<f64> = sx.iter().map(|&a| cx.p(x, a)).collect();
        let q: Vec<f64> = sy.iter().map(|&b| cy.p(y, b)).collect();
        let cost: Vec<f64> =
            sx.iter().flat_map(|&a| sy.iter().map(move |&b| v.get(a * ny + b))).collect();
        let sol = exact_ot_pair(&cost, &p, &q);
        let mut row = vec![0.0; n];
        for (ia, &a) in sx.iter().enumerate() {
            for (ib, &b) in sy.iter().enumerate() {
                row[a * ny + b] = sol.plan[ia * sy.len() + ib];
            }
        }
        (problem.c(i) + g * sol.value, row)
    });
    let mut value = Vec::with_capacity(n);
    let mut table = Vec::with_capacity(n * n);
    for (v, row) in rows {
        value.push(v);
        table.extend_from_slice(&row);
    }
    BellmanStep { value: PairValue(value), greedy: TransitionCoupling::from_raw(nx, ny, table) }
}
