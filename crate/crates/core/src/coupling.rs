//! Transition and occupancy couplings, and the algebra linking them.
//!
//! A transition coupling `pi(x'y' | xy)` is stored as a dense
//! `|XY| x |XY|` row-major table; row `xy` read as an `|X| x |Y|` matrix is
//! the joint distribution over the next pair. An occupancy coupling `mu`
//! has the same shape and holds the normalized discounted visitation mass
//! of each transition `(xy, x'y')`.

use serde::{Deserialize, Serialize};

use crate::chain::{product_coupling, DiscountedProblem};
use crate::error::{Error, Result};
use crate::linalg;
use crate::par;
use crate::transport::round_transition_coupling;

/// Row-sum tolerance for transition couplings.
pub const ROW_TOL: f64 = 1e-12;
/// State pairs with occupancy at or below this are treated as unvisited.
pub const MASS_EPS: f64 = 1e-14;
/// Largest acceptable residual of the occupancy linear solve.
pub const SOLVE_RESIDUAL_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionCoupling {
    nx: usize,
    ny: usize,
    table: Vec<f64>,
}

/// Summed ℓ1 violations of the two marginal constraints over all rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalResiduals {
    pub x_l1: f64,
    pub y_l1: f64,
    /// Largest single-row violation (either axis).
    pub max_row: f64,
}

impl TransitionCoupling {
    pub(crate) fn from_raw(nx: usize, ny: usize, table: Vec<f64>) -> Self {
        debug_assert_eq!(table.len(), (nx * ny) * (nx * ny));
        Self { nx, ny, table }
    }

    /// Checked constructor: entries finite and nonnegative, rows summing to
    /// one within [`ROW_TOL`].
    pub fn new(nx: usize, ny: usize, table: Vec<f64>) -> Result<Self> {
        let n = nx * ny;
        if table.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", n * n),
                got: table.len().to_string(),
            });
        }
        for (i, row) in table.chunks(n).enumerate() {
            if let Some(j) = row.iter().position(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "coupling entry ({i}, {j}) = {}",
                    row[j]
                )));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_TOL {
                return Err(Error::InvalidArgument(format!("coupling row {i} sums to {s}")));
            }
        }
        Ok(Self { nx, ny, table })
    }

    pub fn from_rows(nx: usize, ny: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = nx * ny;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: format!("{n}x{n} table"),
                got: format!("{} rows", rows.len()),
            });
        }
        Self::new(nx, ny, rows.concat())
    }

    /// `(|X|, |Y|)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn n_pairs(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn row(&self, pair: usize) -> &[f64] {
        let n = self.n_pairs();
        &self.table[pair * n..(pair + 1) * n]
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.table[from * self.n_pairs() + to]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub(crate) fn table_mut(&mut self) -> &mut [f64] {
        &mut self.table
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.table.chunks(self.n_pairs().max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn marginal_residuals(&self, problem: &DiscountedProblem) -> MarginalResiduals {
        let (nx, ny) = (self.nx, self.ny);
        let per_row = par::map_indexed(self.n_pairs(), |i| {
            let (x, y) = (i / ny, i % ny);
            let row = self.row(i);
            let mut rx = 0.0;
            for xn in 0..nx {
                let s: f64 = row[xn * ny..(xn + 1) * ny].iter().sum();
                rx += (s - problem.chain_x().p(x, xn)).abs();
            }
            let mut ry = 0.0;
            for yn in 0..ny {
                let s: f64 = (0..nx).map(|xn| row[xn * ny + yn]).sum();
                ry += (s - problem.chain_y().p(y, yn)).abs();
            }
            (rx, ry)
        });
        per_row.iter().fold(
            MarginalResiduals { x_l1: 0.0, y_l1: 0.0, max_row: 0.0 },
            |acc, &(rx, ry)| MarginalResiduals {
                x_l1: acc.x_l1 + rx,
                y_l1: acc.y_l1 + ry,
                max_row: acc.max_row.max(rx).max(ry),
            },
        )
    }

    /// Both marginal constraints hold in every row within `tol`.
    pub fn is_valid(&self, problem: &DiscountedProblem, tol: f64) -> bool {
        self.marginal_residuals(problem).max_row <= tol
    }

    /// Largest deviation of a row sum from one.
    pub fn row_sum_error(&self) -> f64 {
        self.table
            .chunks(self.n_pairs().max(1))
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Normalized discounted visitation distribution over transitions.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyCoupling {
    nx: usize,
    ny: usize,
    table: Vec<f64>,
}

impl OccupancyCoupling {
    /// Checked constructor: nonnegative entries summing to one within 1e-12.
    pub fn new(nx: usize, ny: usize, table: Vec<f64>) -> Result<Self> {
        let n = nx * ny;
        if table.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", n * n),
                got: table.len().to_string(),
            });
        }
        if table.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument("occupancy entries must be >= 0".into()));
        }
        let s: f64 = table.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("occupancy sums to {s}")));
        }
        Ok(Self { nx, ny, table })
    }

    /// Normalizes nonnegative weights into an occupancy-shaped distribution.
    pub fn from_weights(nx: usize, ny: usize, mut weights: Vec<f64>) -> Result<Self> {
        let s: f64 = weights.iter().sum();
        if !(s.is_finite() && s > 0.0) || weights.iter().any(|v| *v < 0.0) {
            return Err(Error::InvalidArgument("weights must be >= 0 with positive sum".into()));
        }
        weights.iter_mut().for_each(|v| *v /= s);
        Self::new(nx, ny, weights)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn n_pairs(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn row(&self, pair: usize) -> &[f64] {
        let n = self.n_pairs();
        &self.table[pair * n..(pair + 1) * n]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.table.chunks(self.n_pairs().max(1)).map(<[f64]>::to_vec).collect()
    }

    /// Outgoing mass per pair, `nu_mu(xy) = sum_{x'y'} mu(xy, x'y')`.
    pub fn state_occupancy(&self) -> Vec<f64> {
        self.table.chunks(self.n_pairs()).map(|r| r.iter().sum()).collect()
    }

    /// Incoming mass per pair, `sum_{x''y''} mu(x''y'', xy)`.
    pub fn inflow(&self) -> Vec<f64> {
        let n = self.n_pairs();
        let mut out = vec![0.0; n];
        for row in self.table.chunks(n) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out
    }

    /// `<mu, c>` with `c` extended to transitions through the source pair.
    pub fn expected_cost(&self, problem: &DiscountedProblem) -> f64 {
        self.state_occupancy().iter().enumerate().map(|(i, nu)| nu * problem.c(i)).sum()
    }

    pub fn l1_distance(&self, other: &Self) -> f64 {
        self.table.iter().zip(&other.table).map(|(a, b)| (a - b).abs()).sum()
    }
}

/// Occupancy of the chain on pairs driven by `pi` from the problem's
/// initial distribution: solve `(I - gamma Z^T) nu = (1 - gamma) nu_0` and
/// set `mu(xy, x'y') = nu(xy) pi(x'y'|xy)`.
pub fn occupancy_of(pi: &TransitionCoupling, problem: &DiscountedProblem) -> Result<OccupancyCoupling> {
    let n = pi.n_pairs();
    let g = problem.gamma();
    let b: Vec<f64> = problem.initial().iter().map(|v| (1.0 - g) * v).collect();
    let (nu, residual) = linalg::solve_discounted(pi.table(), n, g, true, &b);
    linalg::check_residual(residual, SOLVE_RESIDUAL_LIMIT)?;
    let mut table = vec![0.0; n * n];
    par::for_each_row(&mut table, n, |i, row| {
        let w = nu[i].max(0.0);
        for (o, p) in row.iter_mut().zip(pi.row(i)) {
            *o = w * p;
        }
    });
    let (nx, ny) = pi.shape();
    Ok(OccupancyCoupling { nx, ny, table })
}

/// Conditional of `mu` given the source pair, with the product coupling on
/// pairs whose outgoing mass is at most [`MASS_EPS`].
pub fn coupling_of(mu: &OccupancyCoupling, problem: &DiscountedProblem) -> TransitionCoupling {
    let n = mu.n_pairs();
    let nu = mu.state_occupancy();
    let product = product_coupling(problem);
    let mut table = vec![0.0; n * n];
    par::for_each_row(&mut table, n, |i, row| {
        if nu[i] > MASS_EPS {
            for (o, m) in row.iter_mut().zip(mu.row(i)) {
                *o = m / nu[i];
            }
        } else {
            row.copy_from_slice(product.row(i));
        }
    });
    TransitionCoupling { nx: mu.nx, ny: mu.ny, table }
}

/// ℓ1 residuals of the flow constraint and of the two transition-coherence
/// constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintResiduals {
    pub flow_l1: f64,
    pub delta_x: f64,
    pub delta_y: f64,
    /// `delta_x + delta_y`.
    pub delta: f64,
}

pub fn constraint_residuals(mu: &OccupancyCoupling, problem: &DiscountedProblem) -> ConstraintResiduals {
    let (nx, ny) = mu.shape();
    let g = problem.gamma();
    let nu = mu.state_occupancy();
    let inflow = mu.inflow();
    let flow_l1 = (0..mu.n_pairs())
        .map(|i| (nu[i] - g * inflow[i] - (1.0 - g) * problem.initial()[i]).abs())
        .sum();
    let per_row = par::map_indexed(mu.n_pairs(), |i| {
        let (x, y) = (i / ny, i % ny);
        let row = mu.row(i);
        let dx: f64 = (0..nx)
            .map(|xn| {
                let s: f64 = row[xn * ny..(xn + 1) * ny].iter().sum();
                (nu[i] * problem.chain_x().p(x, xn) - s).abs()
            })
            .sum();
        let dy: f64 = (0..ny)
            .map(|yn| {
                let s: f64 = (0..nx).map(|xn| row[xn * ny + yn]).sum();
                (nu[i] * problem.chain_y().p(y, yn) - s).abs()
            })
            .sum();
        (dx, dy)
    });
    let delta_x: f64 = per_row.iter().map(|r| r.0).sum();
    let delta_y: f64 = per_row.iter().map(|r| r.1).sum();
    ConstraintResiduals { flow_l1, delta_x, delta_y, delta: delta_x + delta_y }
}

/// Mass-weighted ℓ1 distance between the conditional of `mu` and its
/// rounded version: `sum_xy nu_mu(xy) |rho(pi_mu)(.|xy) - pi_mu(.|xy)|_1`.
pub fn rounding_error(mu: &OccupancyCoupling, problem: &DiscountedProblem) -> f64 {
    let pi = coupling_of(mu, problem);
    let rounded = round_transition_coupling(&pi, problem);
    let nu = mu.state_occupancy();
    let per_row = par::map_indexed(mu.n_pairs(), |i| {
        let d: f64 = pi.row(i).iter().zip(rounded.row(i)).map(|(a, b)| (a - b).abs()).sum();
        nu[i] * d
    });
    per_row.iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Divergences {
    /// `|mu - mu'|_1`.
    pub l1: f64,
    /// Relative entropy `D(mu || mu')`.
    pub kl: f64,
    /// Conditional relative entropy `H(mu || mu')`.
    pub conditional_kl: f64,
    /// Set when `mu` puts mass where `mu'` has none, making `kl` infinite.
    pub kl_infinite: bool,
    /// Set when some conditional of `mu` is not absolutely continuous with
    /// respect to the matching conditional of `mu'`.
    pub conditional_infinite: bool,
}

pub fn divergences(mu: &OccupancyCoupling, mu_prev: &OccupancyCoupling) -> Divergences {
    let l1 = mu.l1_distance(mu_prev);
    let nu = mu.state_occupancy();
    let nu_prev = mu_prev.state_occupancy();
    let n = mu.n_pairs();
    let mut kl = 0.0;
    let mut ckl = 0.0;
    let mut kl_infinite = false;
    let mut conditional_infinite = false;
    for i in 0..n {
        for (p, q) in mu.row(i).iter().zip(mu_prev.row(i)) {
            if *p <= 0.0 {
                continue;
            }
            if *q <= 0.0 {
                kl_infinite = true;
                conditional_infinite = true;
                continue;
            }
            kl += p * (p / q).ln();
            ckl += p * ((p / nu[i]) / (q / nu_prev[i])).ln();
        }
    }
    if kl_infinite {
        kl = f64::INFINITY;
    }
    if conditional_infinite {
        ckl = f64::INFINITY;
    }
    Divergences { l1, kl, conditional_kl: ckl, kl_infinite, conditional_infinite }
}

/// Entrywise mean of a nonempty list of same-shaped occupancies.
pub fn average_occupancies(list: &[OccupancyCoupling]) -> Result<OccupancyCoupling> {
    let first = list
        .first()
        .ok_or_else(|| Error::InvalidArgument("cannot average an empty list".into()))?;
    if let Some(bad) = list.iter().find(|m| m.shape() != first.shape()) {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", first.shape()),
            got: format!("{:?}", bad.shape()),
        });
    }
    let k = list.len() as f64;
    let mut table = vec![0.0; first.table.len()];
    for m in list {
        for (o, v) in table.iter_mut().zip(&m.table) {
            *o += v;
        }
    }
    table.iter_mut().for_each(|v| *v /= k);
    Ok(OccupancyCoupling { nx: first.nx, ny: first.ny, table })
}

/// Running entrywise mean, for averaging iterates without storing them.
#[derive(Debug, Clone)]
pub(crate) struct OccupancyAverage {
    sum: Vec<f64>,
    count: usize,
    shape: (usize, usize),
}

impl OccupancyAverage {
    pub(crate) fn new(nx: usize, ny: usize) -> Self {
        let n = nx * ny;
        Self { sum: vec![0.0; n * n], count: 0, shape: (nx, ny) }
    }

    pub(crate) fn push(&mut self, mu: &OccupancyCoupling) {
        for (o, v) in self.sum.iter_mut().zip(&mu.table) {
            *o += v;
        }
        self.count += 1;
    }

    pub(crate) fn mean(&self) -> OccupancyCoupling {
        let k = self.count.max(1) as f64;
        OccupancyCoupling {
            nx: self.shape.0,
            ny: self.shape.1,
            table: self.sum.iter().map(|v| v / k).collect(),
        }
    }
}

/// Wire format for couplings: `{"nx": .., "ny": .., "table": [[..], ..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CouplingFile {
    pub nx: usize,
    pub ny: usize,
    pub table: Vec<Vec<f64>>,
}

impl From<&TransitionCoupling> for CouplingFile {
    fn from(pi: &TransitionCoupling) -> Self {
        Self { nx: pi.nx, ny: pi.ny, table: pi.rows() }
    }
}

impl From<&OccupancyCoupling> for CouplingFile {
    fn from(mu: &OccupancyCoupling) -> Self {
        Self { nx: mu.nx, ny: mu.ny, table: mu.rows() }
    }
}

impl TryFrom<CouplingFile> for TransitionCoupling {
    type Error = Error;
    fn try_from(f: CouplingFile) -> Result<Self> {
        Self::from_rows(f.nx, f.ny, f.table)
    }
}

impl TryFrom<CouplingFile> for OccupancyCoupling {
    type Error = Error;
    fn try_from(f: CouplingFile) -> Result<Self> {
        let n = f.nx * f.ny;
        if f.table.len() != n || f.table.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: format!("{n}x{n} table"),
                got: format!("{} rows", f.table.len()),
            });
        }
        Self::new(f.nx, f.ny, f.table.concat())
    }
}
