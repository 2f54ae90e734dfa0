#![allow(dead_code)]

use markov_ot::envs::random_chain;
use markov_ot::{
    round_pair, Axis, DiscountedProblem, GroundCost, LabelScale, MarkovChain, TransitionCoupling,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random chains with label-derived cost `|r(x) - r(y)|`.
pub fn label_problem(nx: usize, ny: usize, gamma: f64, seed: u64) -> DiscountedProblem {
    let x = random_chain(nx, seed).unwrap();
    let y = random_chain(ny, seed.wrapping_mul(31).wrapping_add(7)).unwrap();
    DiscountedProblem::from_labels(x, y, LabelScale::None, gamma).unwrap()
}

/// Random chains, some transitions removed, with a uniform random cost.
pub fn sparse_problem(nx: usize, ny: usize, gamma: f64, seed: u64) -> DiscountedProblem {
    let mut r = rng(seed);
    let x = sparse_chain(nx, &mut r);
    let y = sparse_chain(ny, &mut r);
    let cost = (0..nx).map(|_| (0..ny).map(|_| r.random::<f64>()).collect()).collect();
    DiscountedProblem::new(x, y, GroundCost::explicit(cost).unwrap(), gamma).unwrap()
}

pub fn sparse_chain(n: usize, r: &mut ChaCha8Rng) -> MarkovChain {
    let rows = (0..n)
        .map(|i| {
            let mut row: Vec<f64> =
                (0..n).map(|j| if j == i || r.random::<f64>() < 0.6 { r.random::<f64>() + 0.05 } else { 0.0 }).collect();
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
            row
        })
        .collect();
    MarkovChain::from_rows(rows, 0, None).unwrap()
}

/// Random valid transition coupling: rounded random plans on the product
/// of the kernel supports, with some entries zeroed first.
pub fn random_coupling(problem: &DiscountedProblem, r: &mut ChaCha8Rng) -> TransitionCoupling {
    let (nx, ny) = (problem.nx(), problem.ny());
    let n = nx * ny;
    let rows = (0..n)
        .map(|i| {
            let (x, y) = (i / ny, i % ny);
            let p = problem.chain_x().row(x);
            let q = problem.chain_y().row(y);
            let f: Vec<f64> = (0..n)
                .map(|j| {
                    let (a, b) = (j / ny, j % ny);
                    if p[a] > 0.0 && q[b] > 0.0 && r.random::<f64>() < 0.8 {
                        r.random::<f64>()
                    } else {
                        0.0
                    }
                })
                .collect();
            let s: f64 = f.iter().sum::<f64>().max(1e-300);
            let f: Vec<f64> = f.iter().map(|v| v / s).collect();
            round_pair(&f, p, q)
        })
        .collect();
    TransitionCoupling::from_rows(nx, ny, rows).unwrap()
}

/// Random row-stochastic table, with no marginal structure.
pub fn random_stochastic(problem: &DiscountedProblem, r: &mut ChaCha8Rng) -> TransitionCoupling {
    let n = problem.n_pairs();
    let rows = (0..n)
        .map(|_| {
            let row: Vec<f64> = (0..n).map(|_| r.random::<f64>().powi(3)).collect();
            let s: f64 = row.iter().sum();
            row.iter().map(|v| v / s).collect()
        })
        .collect();
    TransitionCoupling::from_rows(problem.nx(), problem.ny(), rows).unwrap()
}

/// Random coupling with the `axis` marginals exact and the other marginal
/// free, supported inside `support`.
pub fn random_axis_coupling(
    problem: &DiscountedProblem,
    axis: Axis,
    support: &TransitionCoupling,
    r: &mut ChaCha8Rng,
) -> TransitionCoupling {
    let (nx, ny) = (problem.nx(), problem.ny());
    let n = nx * ny;
    let rows = (0..n)
        .map(|i| {
            let (x, y) = (i / ny, i % ny);
            let mut row = vec![0.0; n];
            let (own_len, own_p): (usize, &[f64]) = match axis {
                Axis::X => (nx, problem.chain_x().row(x)),
                Axis::Y => (ny, problem.chain_y().row(y)),
            };
            let other_len = if axis == Axis::X { ny } else { nx };
            for a in 0..own_len {
                if own_p[a] == 0.0 {
                    continue;
                }
                let idx: Vec<usize> = (0..other_len)
                    .map(|b| if axis == Axis::X { a * ny + b } else { b * ny + a })
                    .filter(|&j| support.get(i, j) > 0.0)
                    .collect();
                let w: Vec<f64> = idx.iter().map(|_| r.random::<f64>().powi(2) + 1e-3).collect();
                let s: f64 = w.iter().sum();
                for (&j, wj) in idx.iter().zip(&w) {
                    row[j] = own_p[a] * wj / s;
                }
            }
            row
        })
        .collect();
    TransitionCoupling::from_rows(nx, ny, rows).unwrap()
}

/// Random table shaped like a value table on `axis`.
pub fn random_values(len: usize, scale: f64, r: &mut ChaCha8Rng) -> Vec<f64> {
    (0..len).map(|_| scale * (2.0 * r.random::<f64>() - 1.0)).collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
