//! Occupancy-coupling linear program in CPLEX LP text format.
//!
//! Variables `m_i_j >= 0` hold `mu(xy, x'y')` for `i = xy`, `j = x'y'`.
//! Constraints:
//!
//! * flow, one per pair `j`:
//!   `sum_k mu(j, k) - gamma sum_i mu(i, j) = (1 - gamma) nu0(j)`
//! * X-coherence, one per `(xy, x')`:
//!   `sum_{y'} mu(xy, x'y') - P_X(x'|x) sum_k mu(xy, k) = 0`
//! * Y-coherence, one per `(xy, y')`, symmetric
//! * normalization `sum mu = 1` (implied by the flow rows, kept explicit)

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::chain::DiscountedProblem;
use crate::error::Result;

/// Sizes of an emitted program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LpSummary {
    pub variables: usize,
    pub flow: usize,
    pub coherence_x: usize,
    pub coherence_y: usize,
    pub normalization: usize,
}

impl LpSummary {
    /// All equality constraints.
    pub fn constraints(&self) -> usize {
        self.flow + self.coherence_x + self.coherence_y + self.normalization
    }
}

/// Renders the program. Its optimal value is `(1 - gamma)` times the
/// distance.
pub fn lp_text(problem: &DiscountedProblem) -> (String, LpSummary) {
    let (nx, ny) = (problem.nx(), problem.ny());
    let n = nx * ny;
    let g = problem.gamma();
    let var = |i: usize, j: usize| format!("m_{i}_{j}");
    let mut out = String::new();
    let mut summary = LpSummary { variables: n * n, flow: 0, coherence_x: 0, coherence_y: 0, normalization: 0 };

    let _ = writeln!(out, "\\ Occupancy-coupling program for a {nx} x {ny} chain pair, gamma = {g}");
    let _ = writeln!(out, "\\ m_i_j = mu(i, j) with pair index x * {ny} + y");
    let _ = writeln!(out, "\\ Optimal objective = (1 - gamma) * distance; divide by {} to recover it", 1.0 - g);
    out.push_str("Minimize\n obj:");
    let mut any = false;
    for i in 0..n {
        let c = problem.c(i);
        if c != 0.0 {
            for j in 0..n {
                push_term(&mut out, c, &var(i, j), &mut any);
            }
        }
    }
    if !any {
        // An objective needs at least one term.
        let _ = write!(out, " 0 {}", var(0, 0));
    }
    out.push_str("\nSubject To\n");

    for j in 0..n {
        let _ = write!(out, " flow_{j}:");
        let mut any = false;
        for i in 0..n {
            let coef = if i == j { 1.0 - g } else { -g };
            push_term(&mut out, coef, &var(i, j), &mut any);
        }
        for k in (0..n).filter(|&k| k != j) {
            push_term(&mut out, 1.0, &var(j, k), &mut any);
        }
        let _ = writeln!(out, " = {}", (1.0 - g) * problem.initial()[j]);
        summary.flow += 1;
    }

    let (cx, cy) = (problem.chain_x(), problem.chain_y());
    for i in 0..n {
        let (x, y) = (i / ny, i % ny);
        for xn in 0..nx {
            let p = cx.p(x, xn);
            let _ = write!(out, " cx_{i}_{xn}:");
            let mut any = false;
            for j in 0..n {
                let coef = f64::from(u8::from(j / ny == xn)) - p;
                push_term(&mut out, coef, &var(i, j), &mut any);
            }
            finish_row(&mut out, any, &var(i, 0));
            summary.coherence_x += 1;
        }
        for yn in 0..ny {
            let p = cy.p(y, yn);
            let _ = write!(out, " cy_{i}_{yn}:");
            let mut any = false;
            for j in 0..n {
                let coef = f64::from(u8::from(j % ny == yn)) - p;
                push_term(&mut out, coef, &var(i, j), &mut any);
            }
            finish_row(&mut out, any, &var(i, 0));
            summary.coherence_y += 1;
        }
    }

    out.push_str(" norm:");
    let mut any = false;
    for i in 0..n {
        for j in 0..n {
            push_term(&mut out, 1.0, &var(i, j), &mut any);
        }
    }
    out.push_str(" = 1\n");
    summary.normalization = 1;

    // Variables are nonnegative by default in this format.
    out.push_str("End\n");
    (out, summary)
}

fn push_term(out: &mut String, coef: f64, name: &str, any: &mut bool) {
    if coef == 0.0 {
        return;
    }
    let sign = if coef < 0.0 { '-' } else { '+' };
    if *any || coef < 0.0 {
        let _ = write!(out, " {sign} {} {name}", coef.abs());
    } else {
        let _ = write!(out, " {} {name}", coef.abs());
    }
    *any = true;
}

fn finish_row(out: &mut String, any: bool, fallback: &str) {
    if !any {
        let _ = write!(out, " 0 {fallback}");
    }
    out.push_str(" = 0\n");
}

/// Writes [`lp_text`] to `path`.
pub fn export_lp(problem: &DiscountedProblem, path: &Path) -> Result<LpSummary> {
    let (text, summary) = lp_text(problem);
    std::fs::write(path, text)?;
    Ok(summary)
}
