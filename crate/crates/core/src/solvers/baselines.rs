//! Value- and policy-iteration baselines with a per-pair Sinkhorn inner
//! solve.

use crate::chain::{product_coupling, DiscountedProblem};
use crate::coupling::TransitionCoupling;
use crate::error::{Error, Result};
use crate::operators::{evaluate_steps, PairValue};
use crate::par;
use crate::transport::sinkhorn_pair_warm;

use super::{finish, Algorithm, Recorder, SolveResult, SolverConfig};

/// Settings of the per-pair Sinkhorn solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkhornInner {
    pub eta: f64,
    pub iters: usize,
    /// Start each solve from the previous column potential of the same
    /// state pair instead of from zero.
    pub warm_start: bool,
}

impl Default for SinkhornInner {
    fn default() -> Self {
        Self { eta: 50.0, iters: 100, warm_start: false }
    }
}

impl SinkhornInner {
    fn check(&self) -> Result<()> {
        if !(self.eta.is_finite() && self.eta > 0.0) || self.iters == 0 {
            return Err(Error::InvalidArgument("inner eta and iterations must be positive".into()));
        }
        Ok(())
    }
}

/// Greedy rounded Sinkhorn plans against `v`, and the backed-up values
/// `c(xy) + gamma <plan, V>`.
struct Greedy {
    backup: PairValue,
    pi: TransitionCoupling,
}

fn sinkhorn_greedy(
    v: &PairValue,
    problem: &DiscountedProblem,
    inner: &SinkhornInner,
    potentials: &mut Option<Vec<Vec<f64>>>,
) -> Greedy {
    let (nx, ny) = (problem.nx(), problem.ny());
    let n = nx * ny;
    let g = problem.gamma();
    let (cx, cy) = (problem.chain_x(), problem.chain_y());
    let prev = potentials.take();
    let solved = par::map_indexed(n, |i| {
        let (x, y) = (i / ny, i % ny);
        let (sx, sy) = (cx.support(x), cy.support(y));
        let p: Vec<f64> = sx.iter().map(|&a| cx.p(x, a)).collect();
        let q: Vec<f64> = sy.iter().map(|&b| cy.p(y, b)).collect();
        let cost: Vec<f64> =
            sx.iter().flat_map(|&a| sy.iter().map(move |&b| v.get(a * ny + b))).collect();
        let g0 = prev.as_ref().map(|all| all[i].as_slice());
        let sol = sinkhorn_pair_warm(&cost, &p, &q, inner.eta, inner.iters, g0);
        let mut row = vec![0.0; n];
        for (ia, &a) in sx.iter().enumerate() {
            for (ib, &b) in sy.iter().enumerate() {
                row[a * ny + b] = sol.plan[ia * sy.len() + ib];
            }
        }
        (problem.c(i) + g * sol.value, row, sol.g)
    });
    let mut backup = Vec::with_capacity(n);
    let mut table = Vec::with_capacity(n * n);
    let mut next_potentials = Vec::with_capacity(n);
    for (b, row, gpot) in solved {
        backup.push(b);
        table.extend_from_slice(&row);
        next_potentials.push(gpot);
    }
    if inner.warm_start {
        *potentials = Some(next_potentials);
    }
    Greedy { backup: PairValue(backup), pi: TransitionCoupling::from_raw(nx, ny, table) }
}

/// Approximate value iteration: each sweep replaces the exact inner OT of
/// the optimality equations by a rounded Sinkhorn plan. Runs
/// `config.iterations` sweeps, or fewer if `config.early_stop` is set and
/// the sup-norm change of `V` falls below it. The final greedy coupling is
/// evaluated exactly.
pub fn baseline_vi_sinkhorn(
    problem: &DiscountedProblem,
    config: &SolverConfig,
    inner: SinkhornInner,
) -> Result<SolveResult> {
    config.validate()?;
    inner.check()?;
    let mut recorder = Recorder::new(&SolverConfig { early_stop: None, ..config.clone() });
    let mut potentials = None;
    let mut v = PairValue::zeros(problem);
    let mut pi = product_coupling(problem);
    let mut k = 0;
    while k < config.iterations {
        let step = sinkhorn_greedy(&v, problem, &inner, &mut potentials);
        k += 1;
        let change = step.backup.sup_distance(&v);
        v = step.backup;
        pi = step.pi;
        recorder.observe(k, &pi, None, inner.eta, problem)?;
        if config.early_stop.is_some_and(|tol| change <= tol) {
            break;
        }
    }
    finish(pi, problem, recorder.into_records(config.diagnostics), k, Algorithm::Dwl)
}

/// Approximate policy iteration: `eval_steps` applications of the
/// evaluation operator of the current coupling, then greedy improvement by
/// rounded Sinkhorn plans. Starts from the product coupling and runs
/// `config.iterations` rounds.
pub fn baseline_pi_sinkhorn(
    problem: &DiscountedProblem,
    config: &SolverConfig,
    inner: SinkhornInner,
    eval_steps: usize,
) -> Result<SolveResult> {
    config.validate()?;
    inner.check()?;
    if eval_steps == 0 {
        return Err(Error::InvalidArgument("eval_steps must be at least 1".into()));
    }
    let mut recorder = Recorder::new(&SolverConfig { early_stop: None, ..config.clone() });
    let mut potentials = None;
    let mut v = PairValue::zeros(problem);
    let mut pi = product_coupling(problem);
    for k in 1..=config.iterations {
        v = evaluate_steps(&pi, &v, problem, eval_steps);
        pi = sinkhorn_greedy(&v, problem, &inner, &mut potentials).pi;
        recorder.observe(k, &pi, None, inner.eta, problem)?;
    }
    finish(pi, problem, recorder.into_records(config.diagnostics), config.iterations, Algorithm::Eotc)
}
