//! Discounted optimal-transport distances between finite Markov chains.
//!
//! The distance between two chains is the minimal expected discounted
//! ground cost over transition couplings of their kernels. With a cost of
//! `(1 - gamma) |r(x) - r(y)|` built from state labels it coincides with
//! the bisimulation metric.
//!
//! Solvers:
//!
//! * [`svi`]: Sinkhorn Value Iteration, mirror descent on occupancy
//!   couplings with alternating marginal projections computed by
//!   Bellman–Sinkhorn fixed points.
//! * [`spi`]: Sinkhorn Policy Iteration, the same multiplicative update
//!   driven by exact evaluation of the rounded iterate.
//! * [`exact_dp`]: value iteration with an exact transportation-simplex
//!   inner solve, used as the reference answer.
//! * [`baseline_vi_sinkhorn`] and [`baseline_pi_sinkhorn`]: value and
//!   policy iteration with a per-pair Sinkhorn inner solve.
//!
//! State pairs are flattened as `xy = x * |Y| + y`; transition couplings
//! and occupancy couplings are dense `|XY| x |XY|` row-major tables.
//!
//! With the default `parallel` feature, per-pair work inside an iteration
//! runs on rayon; without it the same code runs sequentially. Every
//! parallel loop writes disjoint output rows, so results are identical
//! either way.

pub mod chain;
pub mod coupling;
pub mod envs;
pub mod error;
pub mod files;
mod linalg;
pub mod operators;
mod par;
pub mod solvers;
pub mod transport;

pub use chain::{
    cost_from_labels, product_coupling, validate_chain, CostProvenance, DiscountedProblem,
    GroundCost, LabelScale, MarkovChain, Violation,
};
pub use coupling::{
    average_occupancies, constraint_residuals, coupling_of, divergences, occupancy_of,
    rounding_error, ConstraintResiduals, CouplingFile, Divergences, MarginalResiduals,
    OccupancyCoupling, TransitionCoupling,
};
pub use error::{Error, Result};
pub use operators::{
    apply_bellman_sinkhorn, evaluate_steps, exact_bellman_operator, multiplicative_update,
    policy_evaluation, q_from_axis_table, q_from_value, solve_bs_fixed_point, Axis, InnerSteps,
    PairValue, QTable, ValueTableAxis,
};
pub use par::is_parallel;
pub use solvers::{
    baseline_pi_sinkhorn, baseline_vi_sinkhorn, exact_dp, export_lp, lp_text, spi, svi,
    Algorithm, Averaging, IterationRecord, LpSummary, SinkhornInner, SolveResult, SolverConfig,
    Spi, StepSize, Svi,
};
pub use transport::{
    exact_ot_pair, round_pair, round_transition_coupling, sinkhorn_pair, sinkhorn_pair_warm,
    ExactPlan, SinkhornPlan,
};
