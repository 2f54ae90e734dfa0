//! Per-state-pair matrix routines.
//!
//! Every routine here works on a single `p.len() x q.len()` row-major
//! matrix. Callers map them across state pairs.

mod round;
mod simplex;
mod sinkhorn;

pub use round::{round_pair, round_transition_coupling};
pub use simplex::{exact_ot_pair, ExactPlan};
pub use sinkhorn::{sinkhorn_pair, sinkhorn_pair_warm, SinkhornPlan};

/// Restriction of a pair of marginals to their supports.
pub(crate) struct Support {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Support {
    pub(crate) fn of(p: &[f64], q: &[f64]) -> Self {
        Self {
            rows: (0..p.len()).filter(|&i| p[i] > 0.0).collect(),
            cols: (0..q.len()).filter(|&j| q[j] > 0.0).collect(),
        }
    }

    pub(crate) fn gather(&self, m: &[f64], ncols: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows.len() * self.cols.len());
        for &i in &self.rows {
            for &j in &self.cols {
                out.push(m[i * ncols + j]);
            }
        }
        out
    }

    pub(crate) fn scatter(&self, sub: &[f64], nrows: usize, ncols: usize) -> Vec<f64> {
        let mut out = vec![0.0; nrows * ncols];
        let k = self.cols.len();
        for (a, &i) in self.rows.iter().enumerate() {
            for (b, &j) in self.cols.iter().enumerate() {
                out[i * ncols + j] = sub[a * k + b];
            }
        }
        out
    }
}

/// `<plan, cost>`.
pub(crate) fn inner(plan: &[f64], cost: &[f64]) -> f64 {
    plan.iter().zip(cost).map(|(a, b)| a * b).sum()
}
