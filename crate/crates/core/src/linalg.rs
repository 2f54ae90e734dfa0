//! Dense linear solves for occupancy and policy evaluation.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Solves `(I - gamma * M) x = b` where `M` is the row-major `n x n`
/// matrix `m`, optionally transposed. The system is nonsingular whenever
/// `M` (or its transpose) is row-stochastic and `gamma < 1`.
///
/// One step of iterative refinement is applied; the returned residual is
/// the sup norm of `b - (I - gamma M) x` after refinement.
pub(crate) fn solve_discounted(
    m: &[f64],
    n: usize,
    gamma: f64,
    transpose: bool,
    b: &[f64],
) -> (Vec<f64>, f64) {
    let a = DMatrix::from_fn(n, n, |i, j| {
        let v = if transpose { m[j * n + i] } else { m[i * n + j] };
        f64::from(u8::from(i == j)) - gamma * v
    });
    let rhs = DVector::from_column_slice(b);
    let lu = a.clone().lu();
    let mut x = match lu.solve(&rhs) {
        Some(x) => x,
        None => return (vec![f64::NAN; n], f64::INFINITY),
    };
    let r = &rhs - &a * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let residual = (&rhs - &a * &x).amax();
    (x.as_slice().to_vec(), residual)
}

pub(crate) fn check_residual(residual: f64, limit: f64) -> Result<()> {
    if residual.is_finite() && residual <= limit {
        Ok(())
    } else {
        Err(Error::LinearSolve { residual, limit })
    }
}
