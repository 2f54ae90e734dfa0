//! Per-iteration cost of the entropic solvers grows like `n^4` in the
//! number of states per chain. Timing runs on a single-thread pool so the
//! slope reflects work rather than core count.

mod common;

use std::time::Instant;

use common::loglog_slope;
use markov_ot::envs::random_chain;
use markov_ot::*;

const SIZES: [usize; 4] = [4, 8, 16, 24];

fn problem(n: usize) -> DiscountedProblem {
    DiscountedProblem::from_labels(random_chain(n, 1).unwrap(), random_chain(n, 2).unwrap(), LabelScale::None, 0.9)
        .unwrap()
}

/// Seconds per step: steps run in batches of at least 30 ms and the
/// fastest batch mean is kept, so timer granularity and warm-up do not
/// skew the small sizes.
fn seconds_per_step(mut step: impl FnMut()) -> f64 {
    step();
    (0..5)
        .map(|_| {
            let t = Instant::now();
            let mut count = 0u32;
            while count < 3 || t.elapsed().as_secs_f64() < 0.03 {
                step();
                count += 1;
            }
            t.elapsed().as_secs_f64() / f64::from(count)
        })
        .fold(f64::INFINITY, f64::min)
}

fn slope(solver: &str) -> f64 {
    let cfg = SolverConfig { iterations: 1_000_000, inner: InnerSteps::Fixed(1), ..SolverConfig::default() };
    let times: Vec<f64> = SIZES
        .iter()
        .map(|&n| {
            let p = problem(n);
            match solver {
                "svi" => {
                    let mut run = Svi::new(&p, cfg.clone()).unwrap();
                    seconds_per_step(|| run.step().unwrap())
                }
                _ => {
                    let mut run = Spi::new(&p, cfg.clone()).unwrap();
                    seconds_per_step(|| run.step().unwrap())
                }
            }
        })
        .collect();
    let xs: Vec<f64> = SIZES.iter().map(|&n| n as f64).collect();
    let s = loglog_slope(&xs, &times);
    println!("{solver}: step seconds {times:?}, log-log slope {s:.2}");
    s
}

#[test]
fn per_iteration_cost_is_quartic() {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    pool.install(|| {
        for solver in ["svi", "spi"] {
            let s = slope(solver);
            assert!((3.5..=4.5).contains(&s), "{solver} slope {s:.2} outside [3.5, 4.5]");
        }
    });
}
