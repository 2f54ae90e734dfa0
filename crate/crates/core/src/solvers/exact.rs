use crate::chain::DiscountedProblem;
use crate::error::{Error, Result};
use crate::operators::{exact_bellman_operator, PairValue};

use super::{finish, Algorithm, SolveResult};

/// Hard limit on value-iteration sweeps; far above what any valid
/// tolerance needs at `gamma <= 1 - 1e-6`.
const MAX_SWEEPS: usize = 50_000_000;

/// Reference solver: value iteration on the optimality equations with an
/// exact transportation-simplex inner solve.
///
/// Iterates from `V = 0` until `|V_{t+1} - V_t|_inf <= tol (1 - gamma) / (2 gamma)`,
/// which puts the greedy coupling within `tol` of the optimum. The greedy
/// coupling is then evaluated exactly, so the reported distance is an
/// upper bound on the optimum.
pub fn exact_dp(problem: &DiscountedProblem, tol: f64) -> Result<SolveResult> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let g = problem.gamma();
    let stop = tol * (1.0 - g) / (2.0 * g);
    let mut v = PairValue::zeros(problem);
    let mut sweeps = 0;
    loop {
        let step = exact_bellman_operator(&v, problem);
        sweeps += 1;
        let change = step.value.sup_distance(&v);
        v = step.value;
        if change <= stop || sweeps >= MAX_SWEEPS {
            // Greedy with respect to the last iterate.
            let greedy = exact_bellman_operator(&v, problem).greedy;
            return finish(greedy, problem, Vec::new(), sweeps, Algorithm::Exact);
        }
    }
}
