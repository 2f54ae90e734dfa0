use crate::chain::{product_coupling, DiscountedProblem};
use crate::coupling::{coupling_of, occupancy_of, OccupancyAverage, TransitionCoupling};
use crate::error::Result;
use crate::operators::{
    evaluate_steps, multiplicative_update, policy_evaluation, q_from_value, Axis, InnerSteps,
    PairValue, QTable,
};
use crate::transport::round_transition_coupling;

use super::{finish, Algorithm, Averaging, Recorder, SolveResult, SolverConfig};

/// Sinkhorn Policy Iteration.
///
/// Each iteration rounds `pi_k` to a valid coupling, evaluates it (exactly
/// with [`InnerSteps::Converge`], otherwise with `m` evaluation sweeps on a
/// warm value vector) and feeds `Q = c + gamma V` to the multiplicative
/// update on alternating axes.
pub fn spi(problem: &DiscountedProblem, config: &SolverConfig) -> Result<SolveResult> {
    let mut run = Spi::new(problem, config.clone())?;
    while !run.is_done() {
        run.step()?;
    }
    run.finish()
}

/// Step-by-step SPI state.
pub struct Spi<'a> {
    problem: &'a DiscountedProblem,
    config: SolverConfig,
    k: usize,
    /// Unrounded iterate `pi_k`.
    pi: TransitionCoupling,
    /// `round(pi_k)`.
    rounded: TransitionCoupling,
    /// Value estimate of `rounded`.
    value: PairValue,
    average: Option<OccupancyAverage>,
    recorder: Recorder,
}

impl<'a> Spi<'a> {
    pub fn new(problem: &'a DiscountedProblem, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let pi = product_coupling(problem);
        let mut run = Self {
            problem,
            rounded: pi.clone(),
            pi,
            value: PairValue::zeros(problem),
            average: match config.averaging {
                Averaging::FullAverage => Some(OccupancyAverage::new(problem.nx(), problem.ny())),
                Averaging::LastIterate => None,
            },
            recorder: Recorder::new(&config),
            config,
            k: 1,
        };
        run.evaluate(0.0)?;
        Ok(run)
    }

    /// Rounds and evaluates the current iterate.
    fn evaluate(&mut self, eta: f64) -> Result<()> {
        self.rounded = round_transition_coupling(&self.pi, self.problem);
        self.value = match self.config.inner {
            InnerSteps::Converge => policy_evaluation(&self.rounded, self.problem)?,
            InnerSteps::Fixed(m) => evaluate_steps(&self.rounded, &self.value, self.problem, m),
        };
        let mu = match self.average.as_mut() {
            Some(avg) => {
                let mu = occupancy_of(&self.rounded, self.problem)?;
                avg.push(&mu);
                Some(mu)
            }
            None => None,
        };
        self.recorder.observe(self.k, &self.rounded, mu.as_ref(), eta, self.problem)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn iterate(&self) -> &TransitionCoupling {
        &self.pi
    }

    /// `round(pi_k)`, the coupling that is evaluated.
    pub fn rounded(&self) -> &TransitionCoupling {
        &self.rounded
    }

    /// Value estimate of [`Spi::rounded`].
    pub fn value(&self) -> &PairValue {
        &self.value
    }

    /// `Q_k(xy, x'y') = c(xy) + gamma V_k(x'y')`.
    pub fn q_table(&self) -> QTable {
        q_from_value(&self.value, self.problem)
    }

    pub fn next_axis(&self) -> Axis {
        if self.k % 2 == 1 {
            Axis::X
        } else {
            Axis::Y
        }
    }

    pub fn next_eta(&self) -> f64 {
        self.config.step_size.eta(self.k, self.problem, self.config.iterations)
    }

    pub fn is_done(&self) -> bool {
        self.k >= self.config.iterations || self.recorder.should_stop()
    }

    /// Updates `pi_k` to `pi_{k+1}`, then rounds and evaluates it.
    pub fn step(&mut self) -> Result<()> {
        let axis = self.next_axis();
        let eta = self.next_eta();
        let q = self.q_table();
        self.pi = multiplicative_update(axis, &self.pi, &q, self.problem, eta);
        self.k += 1;
        self.evaluate(eta)
    }

    pub fn finish(self) -> Result<SolveResult> {
        let pi_out = match &self.average {
            // The averaged occupancy is already feasible; rounding only
            // removes floating-point drift.
            Some(avg) => round_transition_coupling(&coupling_of(&avg.mean(), self.problem), self.problem),
            None => self.rounded,
        };
        let records = self.recorder.into_records(self.config.diagnostics);
        finish(pi_out, self.problem, records, self.k, Algorithm::Spi)
    }
}
