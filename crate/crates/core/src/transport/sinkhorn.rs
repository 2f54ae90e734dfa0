use super::{inner, round_pair, Support};

/// Rounded entropic plan from a fixed number of Sinkhorn sweeps.
#[derive(Debug, Clone)]
pub struct SinkhornPlan {
    /// Exact coupling of `p` and `q` (after rounding).
    pub plan: Vec<f64>,
    /// `<plan, cost>`.
    pub value: f64,
    /// Log-domain column potential on the full column index set (`-inf`
    /// off the support); pass it back for a warm start.
    pub g: Vec<f64>,
}

/// `iters` alternating row/column scalings of `exp(-eta * cost)` in the
/// log domain, then [`round_pair`].
pub fn sinkhorn_pair(cost: &[f64], p: &[f64], q: &[f64], eta: f64, iters: usize) -> SinkhornPlan {
    sinkhorn_pair_warm(cost, p, q, eta, iters, None)
}

/// [`sinkhorn_pair`] starting from a previous column potential.
pub fn sinkhorn_pair_warm(
    cost: &[f64],
    p: &[f64],
    q: &[f64],
    eta: f64,
    iters: usize,
    g0: Option<&[f64]>,
) -> SinkhornPlan {
    assert!(eta > 0.0, "eta must be positive");
    let (m, n) = (p.len(), q.len());
    assert_eq!(cost.len(), m * n, "cost shape does not match marginals");
    let sup = Support::of(p, q);
    let (a, b) = (sup.rows.len(), sup.cols.len());
    let logk: Vec<f64> = sup.gather(cost, n).iter().map(|c| -eta * c).collect();
    let logp: Vec<f64> = sup.rows.iter().map(|&i| p[i].ln()).collect();
    let logq: Vec<f64> = sup.cols.iter().map(|&j| q[j].ln()).collect();
    let mut f = vec![0.0; a];
    let mut g: Vec<f64> = match g0 {
        Some(g0) => sup.cols.iter().map(|&j| g0[j]).map(|v| if v.is_finite() { v } else { 0.0 }).collect(),
        None => vec![0.0; b],
    };
    let mut buf = vec![0.0; a.max(b)];
    for _ in 0..iters.max(1) {
        for i in 0..a {
            for j in 0..b {
                buf[j] = g[j] + logk[i * b + j];
            }
            f[i] = logp[i] - log_sum_exp(&buf[..b]);
        }
        for j in 0..b {
            for i in 0..a {
                buf[i] = f[i] + logk[i * b + j];
            }
            g[j] = logq[j] - log_sum_exp(&buf[..a]);
        }
    }
    let sub: Vec<f64> = (0..a * b).map(|k| (f[k / b] + g[k % b] + logk[k]).exp()).collect();
    let raw = sup.scatter(&sub, m, n);
    let plan = round_pair(&raw, p, q);
    let mut g_full = vec![f64::NEG_INFINITY; n];
    for (k, &j) in sup.cols.iter().enumerate() {
        g_full[j] = g[k];
    }
    SinkhornPlan { value: inner(&plan, cost), plan, g: g_full }
}

/// `log sum exp(z)` with max-shift; `-inf` for an empty slice.
pub(crate) fn log_sum_exp(z: &[f64]) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}
