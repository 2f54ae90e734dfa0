use crate::chain::DiscountedProblem;
use crate::coupling::TransitionCoupling;
use crate::par;

/// Projects a nonnegative `p.len() x q.len()` matrix onto the couplings of
/// `p` and `q`: scale rows down to at most `p`, then columns down to at
/// most `q`, then add the rank-one correction `err_p err_q^T / |err_p|_1`.
///
/// The output differs from `f` by at most
/// `2 (|f 1 - p|_1 + |f^T 1 - q|_1)` in ℓ1. Rows or columns with zero
/// mass keep scale 1.
pub fn round_pair(f: &[f64], p: &[f64], q: &[f64]) -> Vec<f64> {
    let (m, n) = (p.len(), q.len());
    assert_eq!(f.len(), m * n, "matrix shape does not match marginals");
    let mut g = f.to_vec();
    for i in 0..m {
        let row = &mut g[i * n..(i + 1) * n];
        let s: f64 = row.iter().sum();
        if s > p[i] + slack(p[i]) {
            let scale = p[i] / s;
            row.iter_mut().for_each(|v| *v *= scale);
        }
    }
    for j in 0..n {
        let s: f64 = (0..m).map(|i| g[i * n + j]).sum();
        if s > q[j] + slack(q[j]) {
            let scale = q[j] / s;
            (0..m).for_each(|i| g[i * n + j] *= scale);
        }
    }
    let err_p: Vec<f64> =
        (0..m).map(|i| deficit(p[i], g[i * n..(i + 1) * n].iter().sum::<f64>())).collect();
    let err_q: Vec<f64> =
        (0..n).map(|j| deficit(q[j], (0..m).map(|i| g[i * n + j]).sum::<f64>())).collect();
    let norm: f64 = err_p.iter().sum();
    if norm > 0.0 {
        for i in 0..m {
            if err_p[i] == 0.0 {
                continue;
            }
            let a = err_p[i] / norm;
            for j in 0..n {
                g[i * n + j] += a * err_q[j];
            }
        }
    }
    g
}

/// Summation noise tolerated before a row or column counts as violated.
/// It keeps feasible input bit-identical instead of rescaling it by
/// `1 - 1e-16`.
#[inline]
fn slack(target: f64) -> f64 {
    4.0 * f64::EPSILON * target.max(f64::MIN_POSITIVE)
}

#[inline]
fn deficit(target: f64, sum: f64) -> f64 {
    let d = target - sum;
    if d > slack(target) {
        d
    } else {
        0.0
    }
}

/// Applies [`round_pair`] to every row `pi(.|xy)` with marginals
/// `P_X(.|x)` and `P_Y(.|y)`.
pub fn round_transition_coupling(
    pi: &TransitionCoupling,
    problem: &DiscountedProblem,
) -> TransitionCoupling {
    let (nx, ny) = pi.shape();
    let n = nx * ny;
    let mut out = pi.clone();
    par::for_each_row(out.table_mut(), n, |i, row| {
        let (x, y) = (i / ny, i % ny);
        let g = round_pair(pi.row(i), problem.chain_x().row(x), problem.chain_y().row(y));
        row.copy_from_slice(&g);
    });
    out
}
