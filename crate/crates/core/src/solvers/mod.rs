//! Top-level drivers and their shared configuration and result types.

mod baselines;
mod exact;
mod lp;
mod spi;
mod svi;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::chain::DiscountedProblem;
use crate::coupling::{constraint_residuals, occupancy_of, OccupancyCoupling, TransitionCoupling};
use crate::error::{Error, Result};
use crate::operators::{policy_evaluation, InnerSteps, PairValue, DEFAULT_SWEEP_CAP};

pub use baselines::{baseline_pi_sinkhorn, baseline_vi_sinkhorn, SinkhornInner};
pub use exact::exact_dp;
pub use lp::{export_lp, lp_text, LpSummary};
pub use spi::{spi, Spi};
pub use svi::{svi, Svi};

/// Step size `eta_k` of the multiplicative update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepSize {
    Constant(f64),
    /// `c0 / sqrt(k)`.
    InvSqrt(f64),
    /// `(1 / (4 |c|)) sqrt((1 - gamma)^3 log(|X||Y|) / K)`, constant in `k`.
    TheorySvi,
    /// `((1 - gamma) / (3 |c|)) sqrt(8 log(|X||Y|) / K)`, constant in `k`.
    TheorySpi,
}

impl StepSize {
    /// `eta_k` for outer iteration `k >= 1` of a run with `iterations` steps.
    pub fn eta(&self, k: usize, problem: &DiscountedProblem, iterations: usize) -> f64 {
        let g = problem.gamma();
        // log 1 = 0 would give a zero step on 1x1 problems.
        let log_n = (problem.n_pairs().max(2) as f64).ln();
        let k_total = iterations.max(1) as f64;
        let cnorm = problem.cost().sup_norm();
        let cnorm = if cnorm > 0.0 { cnorm } else { 1.0 };
        match *self {
            StepSize::Constant(eta) => eta,
            StepSize::InvSqrt(c0) => c0 / (k.max(1) as f64).sqrt(),
            StepSize::TheorySvi => ((1.0 - g).powi(3) * log_n / k_total).sqrt() / (4.0 * cnorm),
            StepSize::TheorySpi => (1.0 - g) / (3.0 * cnorm) * (8.0 * log_n / k_total).sqrt(),
        }
    }

    fn check(&self) -> Result<()> {
        match *self {
            StepSize::Constant(v) | StepSize::InvSqrt(v) if !(v.is_finite() && v > 0.0) => {
                Err(Error::InvalidArgument(format!("step size parameter {v} must be positive")))
            }
            _ => Ok(()),
        }
    }
}

/// How the output coupling is formed from the iterates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Round the final iterate.
    #[default]
    LastIterate,
    /// Average the occupancies of all iterates, extract the coupling and
    /// round it.
    FullAverage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub step_size: StepSize,
    /// Outer iterations `K >= 1`.
    pub iterations: usize,
    /// Inner steps `m` per outer iteration.
    pub inner: InnerSteps,
    /// Sup-norm change that ends an inner solve with [`InnerSteps::Converge`].
    pub inner_tol: f64,
    pub inner_cap: usize,
    pub averaging: Averaging,
    /// Recorded with results; the solvers themselves are deterministic.
    pub seed: u64,
    /// Record an [`IterationRecord`] every iteration. Each record costs one dense linear solve.
    pub diagnostics: bool,
    /// Stop once `delta < tol` and the objective moves less than `tol` for
    /// ten consecutive iterations. Ignored with full averaging.
    pub early_stop: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            step_size: StepSize::InvSqrt(1.0),
            iterations: 1000,
            inner: InnerSteps::Converge,
            inner_tol: 1e-10,
            inner_cap: DEFAULT_SWEEP_CAP,
            averaging: Averaging::LastIterate,
            seed: 0,
            diagnostics: false,
            early_stop: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidArgument("iterations must be at least 1".into()));
        }
        if self.inner == InnerSteps::Fixed(0) {
            return Err(Error::InvalidArgument("inner steps must be at least 1".into()));
        }
        if !(self.inner_tol.is_finite() && self.inner_tol > 0.0) {
            return Err(Error::InvalidArgument("inner tolerance must be positive".into()));
        }
        self.step_size.check()
    }

    /// Early stopping applies only to last-iterate runs.
    fn stop_tolerance(&self) -> Option<f64> {
        match self.averaging {
            Averaging::LastIterate => self.early_stop,
            Averaging::FullAverage => None,
        }
    }

    fn records_needed(&self) -> bool {
        self.diagnostics || self.stop_tolerance().is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Svi,
    Spi,
    Exact,
    Dwl,
    Eotc,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Svi => "svi",
            Algorithm::Spi => "spi",
            Algorithm::Exact => "exact",
            Algorithm::Dwl => "dwl",
            Algorithm::Eotc => "eotc",
        }
    }
}

/// Diagnostics for the iterate `pi_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    /// `<mu_k, c>`, the normalized expected cost of the iterate.
    pub objective: f64,
    pub delta_x: f64,
    pub delta_y: f64,
    pub delta: f64,
    /// `|mu_k - mu_{k-1}|_1`; absent for the first iterate.
    pub l1_step: Option<f64>,
    pub eta: f64,
    /// Milliseconds since the solver started. Not reproducible across runs.
    pub wall_ms: f64,
}

impl IterationRecord {
    pub const CSV_HEADER: &'static str = "k,objective,delta_x,delta_y,delta,l1_step,eta,wall_ms";

    pub fn csv_row(&self) -> String {
        let step = self.l1_step.map_or(String::new(), |v| v.to_string());
        format!(
            "{},{},{},{},{},{},{},{}",
            self.k, self.objective, self.delta_x, self.delta_y, self.delta, step, self.eta, self.wall_ms
        )
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Valid transition coupling the distance is computed from.
    pub pi_out: TransitionCoupling,
    /// `V^{pi_out}`.
    pub value: PairValue,
    /// `V^{pi_out}` at the initial pair (or averaged over the initial
    /// distribution).
    pub distance: f64,
    pub diagnostics: Vec<IterationRecord>,
    /// Outer iterations actually performed.
    pub iterations: usize,
    pub algorithm: Algorithm,
}

impl SolveResult {
    pub fn diagnostics_csv(&self) -> String {
        let mut out = String::from(IterationRecord::CSV_HEADER);
        out.push('\n');
        for r in &self.diagnostics {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }
}

/// Evaluates `pi_out` exactly and packages the result.
fn finish(
    pi_out: TransitionCoupling,
    problem: &DiscountedProblem,
    diagnostics: Vec<IterationRecord>,
    iterations: usize,
    algorithm: Algorithm,
) -> Result<SolveResult> {
    let value = policy_evaluation(&pi_out, problem)?;
    let distance = value.at_initial(problem);
    Ok(SolveResult { pi_out, value, distance, diagnostics, iterations, algorithm })
}

/// Builds diagnostics records and tracks the early-stopping streak.
struct Recorder {
    start: Instant,
    prev: Option<OccupancyCoupling>,
    records: Vec<IterationRecord>,
    keep: bool,
    stop_tol: Option<f64>,
    streak: usize,
}

/// Consecutive quiet iterations required before an early stop.
const STOP_STREAK: usize = 10;

impl Recorder {
    fn new(config: &SolverConfig) -> Self {
        Self {
            start: Instant::now(),
            prev: None,
            records: Vec::new(),
            keep: config.records_needed(),
            stop_tol: config.stop_tolerance(),
            streak: 0,
        }
    }

    /// Records iterate `k`, reusing its occupancy when the caller already
    /// has it.
    fn observe(
        &mut self,
        k: usize,
        pi: &TransitionCoupling,
        mu: Option<&OccupancyCoupling>,
        eta: f64,
        problem: &DiscountedProblem,
    ) -> Result<()> {
        if !self.keep {
            return Ok(());
        }
        let mu = match mu {
            Some(mu) => mu.clone(),
            None => occupancy_of(pi, problem)?,
        };
        let res = constraint_residuals(&mu, problem);
        let objective = mu.expected_cost(problem);
        let l1_step = self.prev.as_ref().map(|p| mu.l1_distance(p));
        if let (Some(tol), Some(last)) = (self.stop_tol, self.records.last()) {
            if res.delta < tol && (objective - last.objective).abs() < tol {
                self.streak += 1;
            } else {
                self.streak = 0;
            }
        }
        self.records.push(IterationRecord {
            k,
            objective,
            delta_x: res.delta_x,
            delta_y: res.delta_y,
            delta: res.delta,
            l1_step,
            eta,
            wall_ms: self.start.elapsed().as_secs_f64() * 1e3,
        });
        self.prev = Some(mu);
        Ok(())
    }

    fn should_stop(&self) -> bool {
        self.stop_tol.is_some() && self.streak >= STOP_STREAK
    }

    fn into_records(self, diagnostics: bool) -> Vec<IterationRecord> {
        if diagnostics {
            self.records
        } else {
            Vec::new()
        }
    }
}
