use crate::chain::{product_coupling, DiscountedProblem};
use crate::coupling::{coupling_of, occupancy_of, OccupancyAverage, TransitionCoupling};
use crate::error::Result;
use crate::operators::{
    multiplicative_update, q_from_axis_table, solve_bs_fixed_point, Axis, FixedPointReport,
    ValueTableAxis,
};
use crate::transport::round_transition_coupling;

use super::{finish, Algorithm, Averaging, Recorder, SolveResult, SolverConfig};

/// Sinkhorn Value Iteration.
///
/// Starting from the product coupling, iteration `k` projects onto the
/// X-marginal constraints when `k` is odd and onto the Y-marginal
/// constraints when it is even. Each projection runs `m` Bellman–Sinkhorn
/// sweeps on that axis's value table and applies the multiplicative
/// update. The run produces iterates `pi_1, ..., pi_K`.
pub fn svi(problem: &DiscountedProblem, config: &SolverConfig) -> Result<SolveResult> {
    let mut run = Svi::new(problem, config.clone())?;
    while !run.is_done() {
        run.step()?;
    }
    run.finish()
}

/// Step-by-step SVI state, for callers that inspect iterates.
pub struct Svi<'a> {
    problem: &'a DiscountedProblem,
    config: SolverConfig,
    k: usize,
    pi: TransitionCoupling,
    vx: ValueTableAxis,
    vy: ValueTableAxis,
    average: Option<OccupancyAverage>,
    recorder: Recorder,
    last_inner: Option<FixedPointReport>,
}

impl<'a> Svi<'a> {
    pub fn new(problem: &'a DiscountedProblem, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let pi = product_coupling(problem);
        let mut average = match config.averaging {
            Averaging::FullAverage => Some(OccupancyAverage::new(problem.nx(), problem.ny())),
            Averaging::LastIterate => None,
        };
        let mu = match average.as_mut() {
            Some(avg) => {
                let mu = occupancy_of(&pi, problem)?;
                avg.push(&mu);
                Some(mu)
            }
            None => None,
        };
        let mut recorder = Recorder::new(&config);
        recorder.observe(1, &pi, mu.as_ref(), 0.0, problem)?;
        Ok(Self {
            problem,
            vx: ValueTableAxis::zeros(Axis::X, problem),
            vy: ValueTableAxis::zeros(Axis::Y, problem),
            config,
            k: 1,
            pi,
            average,
            recorder,
            last_inner: None,
        })
    }

    /// Index of the current iterate.
    pub fn k(&self) -> usize {
        self.k
    }

    /// The current iterate `pi_k` (not rounded).
    pub fn iterate(&self) -> &TransitionCoupling {
        &self.pi
    }

    pub fn value_table(&self, axis: Axis) -> &ValueTableAxis {
        match axis {
            Axis::X => &self.vx,
            Axis::Y => &self.vy,
        }
    }

    /// Axis the next step projects onto.
    pub fn next_axis(&self) -> Axis {
        if self.k % 2 == 1 {
            Axis::X
        } else {
            Axis::Y
        }
    }

    /// Step size the next step uses.
    pub fn next_eta(&self) -> f64 {
        self.config.step_size.eta(self.k, self.problem, self.config.iterations)
    }

    /// Report of the most recent inner fixed-point solve.
    pub fn last_inner(&self) -> Option<FixedPointReport> {
        self.last_inner
    }

    pub fn is_done(&self) -> bool {
        self.k >= self.config.iterations || self.recorder.should_stop()
    }

    /// Computes `pi_{k+1}` from `pi_k`.
    pub fn step(&mut self) -> Result<()> {
        let axis = self.next_axis();
        let eta = self.next_eta();
        let table = match axis {
            Axis::X => &mut self.vx,
            Axis::Y => &mut self.vy,
        };
        let (v, report) = solve_bs_fixed_point(
            axis,
            &self.pi,
            table,
            self.problem,
            eta,
            self.config.inner,
            self.config.inner_tol,
            self.config.inner_cap,
        )?;
        let q = q_from_axis_table(&v, self.problem);
        *table = v;
        self.pi = multiplicative_update(axis, &self.pi, &q, self.problem, eta);
        self.k += 1;
        self.last_inner = Some(report);

        let mu = match self.average.as_mut() {
            Some(avg) => {
                let mu = occupancy_of(&self.pi, self.problem)?;
                avg.push(&mu);
                Some(mu)
            }
            None => None,
        };
        self.recorder.observe(self.k, &self.pi, mu.as_ref(), eta, self.problem)
    }

    /// Rounds the output coupling and evaluates it exactly.
    pub fn finish(self) -> Result<SolveResult> {
        let pi_out = match &self.average {
            Some(avg) => {
                let pi_bar = coupling_of(&avg.mean(), self.problem);
                round_transition_coupling(&pi_bar, self.problem)
            }
            None => round_transition_coupling(&self.pi, self.problem),
        };
        let records = self.recorder.into_records(self.config.diagnostics);
        finish(pi_out, self.problem, records, self.k, Algorithm::Svi)
    }
}
