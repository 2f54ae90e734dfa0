//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.

mod common;

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::Instant;

use common::*;
use markov_ot::envs::{four_rooms, grid_chain, random_chain, Doors};
use markov_ot::*;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// 1. SVI against the exact oracle on 25 random instances.
fn oracle_equivalence() -> Outcome {
    let sizes = [2usize, 3, 4, 5];
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for i in 0..25u64 {
        let nx = sizes[(i % 4) as usize];
        let ny = sizes[((i / 4 + i) % 4) as usize];
        let gamma = if i % 2 == 0 { 0.5 } else { 0.9 };
        let x = random_chain(nx, 100 + 2 * i).unwrap();
        let y = random_chain(ny, 101 + 2 * i).unwrap();
        let p = DiscountedProblem::from_labels(x, y, LabelScale::None, gamma).unwrap();
        let exact = exact_dp(&p, 1e-6).unwrap();
        let cfg = SolverConfig { iterations: 5000, ..SolverConfig::default() };
        let s = svi(&p, &cfg).unwrap();
        let rel = (s.distance - exact.distance).abs() * (1.0 - gamma) / p.cost().sup_norm();
        worst = worst.max(rel);
        if rel > 1e-2 {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("worst |svi - exact| (1 - gamma) / |c| = {worst:.3e} (limit 1e-2), {failures}/25 over"))
}

/// 2. Occupancy identities and bounds on random occupancies.
fn occupancy_identities() -> Outcome {
    let mut r = rng(2);
    let cases = 1000;
    let (mut trip, mut div, mut cost, mut pert) = (0, 0, 0, 0);
    let mut worst1 = f64::NEG_INFINITY;
    let (mut worst2, mut worst3, mut worst4) = (worst1, worst1, worst1);
    for case in 0..cases {
        let nx = r.random_range(2..=4);
        let ny = r.random_range(2..=4);
        let gamma = r.random_range(0.3..0.95);
        let p = if case % 2 == 0 {
            label_problem(nx, ny, gamma, 1000 + case)
        } else {
            sparse_problem(nx, ny, gamma, 1000 + case)
        };

        // Round trip through the transition coupling, zero residuals.
        let pi = random_coupling(&p, &mut r);
        let mu = occupancy_of(&pi, &p).unwrap();
        let back = coupling_of(&mu, &p);
        let nu = mu.state_occupancy();
        let mut err: f64 = 0.0;
        for i in (0..p.n_pairs()).filter(|&i| nu[i] > 1e-14) {
            for j in 0..p.n_pairs() {
                err = err.max((back.get(i, j) - pi.get(i, j)).abs());
            }
        }
        let res = constraint_residuals(&mu, &p);
        let e1 = err.max(res.flow_l1).max(res.delta);
        worst1 = worst1.max(e1);
        if e1 > 1e-9 {
            trip += 1;
        }

        // Divergence chain: 1/2 |mu - mu'|^2 <= D <= H / (1 - gamma).
        let mu2 = occupancy_of(&random_coupling(&p, &mut r), &p).unwrap();
        let mu_full = occupancy_of(&product_coupling(&p), &p).unwrap();
        for (a, b) in [(&mu, &mu_full), (&mu2, &mu_full), (&mu, &mu2)] {
            let d = divergences(a, b);
            if d.kl_infinite || d.conditional_infinite {
                continue;
            }
            let gap_lo = 0.5 * d.l1 * d.l1 - d.kl;
            let gap_hi = d.kl - d.conditional_kl / (1.0 - gamma);
            worst2 = worst2.max(gap_lo).max(gap_hi);
            if gap_lo > 1e-9 || gap_hi > 1e-9 {
                div += 1;
            }
        }

        // Half the rounding perturbation is at most the coherence violation,
        // on an arbitrary normalized nonnegative table.
        let n = p.n_pairs();
        let weights: Vec<f64> =
            (0..n * n).map(|_| if r.random::<f64>() < 0.7 { r.random::<f64>() } else { 0.0 }).collect();
        let arbitrary = OccupancyCoupling::from_weights(nx, ny, weights).unwrap();
        let gap4 = 0.5 * rounding_error(&arbitrary, &p) - constraint_residuals(&arbitrary, &p).delta;
        worst4 = worst4.max(gap4);
        if gap4 > 1e-9 {
            pert += 1;
        }

        // Rounding cost bound on a flow-feasible but incoherent occupancy.
        let invalid = occupancy_of(&random_stochastic(&p, &mut r), &p).unwrap();
        let rounded = round_transition_coupling(&coupling_of(&invalid, &p), &p);
        let rho = occupancy_of(&rounded, &p).unwrap();
        let lhs = rho.expected_cost(&p) - invalid.expected_cost(&p);
        let rhs = p.cost().sup_norm() * rounding_error(&invalid, &p) / (1.0 - gamma);
        worst3 = worst3.max(lhs - rhs);
        if lhs > rhs + 1e-9 {
            cost += 1;
        }
    }
    outcome(
        trip + div + cost + pert == 0,
        format!(
            "{cases} cases; violations round-trip={trip} divergence={div} rounding-cost={cost} perturbation={pert}; worst excess {worst1:.1e} {worst2:.1e} {worst3:.1e} {worst4:.1e}"
        ),
    )
}

/// 3. Both Bellman operators are gamma-contractions.
fn contraction() -> Outcome {
    let mut r = rng(3);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    let pairs = 1000;
    for &gamma in &[0.5, 0.9, 0.99] {
        for t in 0..pairs {
            let p = sparse_problem(r.random_range(2..=3), r.random_range(2..=3), gamma, 30_000 + t);
            let n = p.n_pairs();
            let scale = 10.0 * r.random::<f64>();
            if t % 2 == 0 {
                let axis = if r.random::<bool>() { Axis::X } else { Axis::Y };
                let width = if axis == Axis::X { p.nx() } else { p.ny() };
                let pi = random_coupling(&p, &mut r);
                let eta = 10f64.powf(r.random_range(-1.0..2.0));
                let v1 = ValueTableAxis::from_values(axis, &p, random_values(n * width, scale, &mut r)).unwrap();
                let v2 = ValueTableAxis::from_values(axis, &p, random_values(n * width, scale, &mut r)).unwrap();
                let lhs = apply_bellman_sinkhorn(axis, &pi, &v1, &p, eta)
                    .sup_distance(&apply_bellman_sinkhorn(axis, &pi, &v2, &p, eta));
                let excess = lhs - gamma * v1.sup_distance(&v2);
                worst = worst.max(excess);
                if excess > 1e-10 {
                    violations += 1;
                }
            } else {
                let v1 = PairValue(random_values(n, scale, &mut r));
                let v2 = PairValue(random_values(n, scale, &mut r));
                let lhs = exact_bellman_operator(&v1, &p).value.sup_distance(&exact_bellman_operator(&v2, &p).value);
                let excess = lhs - gamma * v1.sup_distance(&v2);
                worst = worst.max(excess);
                if excess > 1e-10 {
                    violations += 1;
                }
            }
        }
    }
    outcome(violations == 0, format!("{} pairs per gamma; {violations} violations; worst excess {worst:.2e}", pairs))
}

/// 4. Multiplicative updates keep exact marginals on the projected axis and
/// preserve zeros.
fn update_feasibility() -> Outcome {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    let mut zeros_broken = 0;
    let steps = 1000;
    for t in 0..steps {
        let p = sparse_problem(r.random_range(2..=4), r.random_range(2..=4), 0.9, 40_000 + t);
        let n = p.n_pairs();
        let ny = p.ny();
        let pi = random_coupling(&p, &mut r);
        let q_vals = random_values(n * n, 5.0, &mut r);
        let q = QTable::from_fn(n, |i, j| q_vals[i * n + j]);
        let eta = 5.0 * r.random::<f64>();
        let axis = if t % 2 == 0 { Axis::X } else { Axis::Y };
        let next = multiplicative_update(axis, &pi, &q, &p, eta);
        for i in 0..n {
            let (x, y) = (i / ny, i % ny);
            match axis {
                Axis::X => {
                    for xn in 0..p.nx() {
                        let s: f64 = (0..ny).map(|yn| next.get(i, xn * ny + yn)).sum();
                        worst = worst.max((s - p.chain_x().p(x, xn)).abs());
                    }
                }
                Axis::Y => {
                    for yn in 0..ny {
                        let s: f64 = (0..p.nx()).map(|xn| next.get(i, xn * ny + yn)).sum();
                        worst = worst.max((s - p.chain_y().p(y, yn)).abs());
                    }
                }
            }
            for j in 0..n {
                if pi.get(i, j) == 0.0 && next.get(i, j) != 0.0 {
                    zeros_broken += 1;
                }
            }
        }
    }
    outcome(
        worst <= 1e-12 && zeros_broken == 0,
        format!("{steps} updates; worst marginal residual {worst:.2e} (limit 1e-12); {zeros_broken} zeros filled"),
    )
}

/// Regularized mirror-step objective `<mu, c> + H(mu || mu_k) / eta`.
fn regularized(mu: &OccupancyCoupling, mu_k: &OccupancyCoupling, p: &DiscountedProblem, eta: f64) -> f64 {
    mu.expected_cost(p) + divergences(mu, mu_k).conditional_kl / eta
}

/// 5. The update's occupancy minimizes the regularized objective over the
/// projected constraint set, checked against random members.
fn mirror_step_probe() -> Outcome {
    let mut r = rng(5);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut checks = 0;
    for inst in 0..10u64 {
        let p = label_problem(2, 2, 0.8, 500 + inst);
        let cfg = SolverConfig { iterations: 21, inner_tol: 1e-12, ..SolverConfig::default() };
        let mut run = Svi::new(&p, cfg).unwrap();
        for _round in 0..20 {
            let axis = run.next_axis();
            let eta = run.next_eta();
            let pi_k = run.iterate().clone();
            let mu_k = occupancy_of(&pi_k, &p).unwrap();
            run.step().unwrap();
            let mu_next = occupancy_of(run.iterate(), &p).unwrap();
            let best = regularized(&mu_next, &mu_k, &p, eta);
            for c in 0..200 {
                // Half the candidates are small perturbations of the update,
                // which probe optimality locally.
                let far = random_axis_coupling(&p, axis, &pi_k, &mut r);
                let cand = if c % 2 == 0 {
                    far
                } else {
                    let t = 10f64.powi(-(1 + (c as i32 / 2) % 4));
                    let table = run.iterate().table().iter().zip(far.table()).map(|(a, b)| (1.0 - t) * a + t * b).collect();
                    TransitionCoupling::new(p.nx(), p.ny(), table).unwrap()
                };
                let mu_c = occupancy_of(&cand, &p).unwrap();
                let excess = best - regularized(&mu_c, &mu_k, &p, eta);
                worst = worst.max(excess);
                checks += 1;
                if excess > 1e-9 {
                    violations += 1;
                }
            }
        }
    }
    outcome(violations == 0, format!("{checks} comparisons; {violations} beaten by a random member; worst excess {worst:.2e}"))
}

/// 6. Rounding marginals and perturbation bound.
fn rounding() -> Outcome {
    let mut r = rng(6);
    let mut worst_marg: f64 = 0.0;
    let mut bound_fail = 0;
    let cases = 10_000;
    for _ in 0..cases {
        let (m, n) = (r.random_range(1..=6), r.random_range(1..=6));
        let dist = |len: usize, r: &mut rand_chacha::ChaCha8Rng| {
            let v: Vec<f64> = (0..len).map(|_| if r.random::<f64>() < 0.8 { r.random::<f64>() } else { 0.0 }).collect();
            let s: f64 = v.iter().sum();
            if s == 0.0 {
                let mut u = vec![0.0; len];
                u[0] = 1.0;
                u
            } else {
                v.iter().map(|x| x / s).collect()
            }
        };
        let p = dist(m, &mut r);
        let q = dist(n, &mut r);
        let scale = 2.0 * r.random::<f64>();
        let f: Vec<f64> = (0..m * n).map(|_| if r.random::<f64>() < 0.8 { scale * r.random::<f64>() / (m * n) as f64 * 2.0 } else { 0.0 }).collect();
        let g = round_pair(&f, &p, &q);
        let mut viol = 0.0;
        for i in 0..m {
            let s: f64 = g[i * n..(i + 1) * n].iter().sum();
            worst_marg = worst_marg.max((s - p[i]).abs());
            viol += (f[i * n..(i + 1) * n].iter().sum::<f64>() - p[i]).abs();
        }
        for j in 0..n {
            let s: f64 = (0..m).map(|i| g[i * n + j]).sum();
            worst_marg = worst_marg.max((s - q[j]).abs());
            viol += ((0..m).map(|i| f[i * n + j]).sum::<f64>() - q[j]).abs();
        }
        let moved: f64 = f.iter().zip(&g).map(|(a, b)| (a - b).abs()).sum();
        if moved > 2.0 * viol + 1e-12 {
            bound_fail += 1;
        }
    }
    outcome(
        worst_marg <= 1e-12 && bound_fail == 0,
        format!("{cases} matrices; worst marginal error {worst_marg:.2e}; {bound_fail} bound violations"),
    )
}

/// 7. Zero self-distance and the rotational symmetry of the 4-rooms layout.
fn bisimulation() -> Outcome {
    let gamma = 0.9;
    let mut worst: f64 = 0.0;
    let mut details = Vec::new();
    for seed in 0..3u64 {
        let x = random_chain(4, 700 + seed).unwrap();
        let p = DiscountedProblem::from_labels(x.clone(), x, LabelScale::OneMinusGamma, gamma).unwrap();
        let eta = 50.0 / p.cost().sup_norm();
        let cfg = SolverConfig { iterations: 200, step_size: StepSize::Constant(eta), ..SolverConfig::default() };
        let d_svi = svi(&p, &cfg).unwrap().distance;
        let d_spi = spi(&p, &cfg).unwrap().distance;
        let d_ex = exact_dp(&p, 1e-9).unwrap().distance;
        worst = worst.max(d_svi).max(d_spi).max(d_ex);
        details.push(format!("svi {d_svi:.1e} spi {d_spi:.1e} exact {d_ex:.1e}"));
    }

    // Small grid with its reward in the lower-left corner against 4-rooms
    // whose rooms are rotated copies of it.
    let x = grid_chain(3, 3, &Default::default(), (0, 0), &BTreeMap::from([((2, 0), 1.0)])).unwrap();
    let rs = 3;
    let side = 2 * rs;
    let rot = |(i, j): (usize, usize)| (j, side - i);
    let mut rewards = BTreeMap::new();
    let mut cell = (2, 0);
    for _ in 0..4 {
        rewards.insert(cell, 1.0);
        cell = rot(cell);
    }
    let y = four_rooms(rs, Doors::centered(rs), (0, 0), &rewards).unwrap();
    let p = DiscountedProblem::from_labels(x, y.clone(), LabelScale::None, gamma).unwrap();
    let ex = exact_dp(&p, 1e-9).unwrap();
    let x0 = p.chain_x().init();
    let mut sym_gap: f64 = 0.0;
    for s in 0..y.len() {
        let id = &y.states()[s];
        let (i, j) = parse_cell(id);
        let t = y.index_of(&cell_id(rot((i, j)))).unwrap();
        sym_gap = sym_gap.max((ex.value.get(p.pair(x0, s)) - ex.value.get(p.pair(x0, t))).abs());
    }
    outcome(
        worst <= 1e-6 && sym_gap <= 1e-6,
        format!("max self-distance {worst:.2e} ({}); max rotation gap {sym_gap:.2e}", details.join("; ")),
    )
}

fn parse_cell(id: &str) -> (usize, usize) {
    let (r, c) = id[1..].split_once('c').unwrap();
    (r.parse().unwrap(), c.parse().unwrap())
}

fn cell_id((r, c): (usize, usize)) -> String {
    format!("r{r}c{c}")
}

/// 8. SVI distances on the 4-rooms pair barely depend on m.
fn m_robustness() -> Outcome {
    let rs = 2;
    let side = 2 * rs;
    let x = four_rooms(rs, Doors::centered(rs), (0, 0), &BTreeMap::from([((0, 0), 1.0)])).unwrap();
    let y = four_rooms(rs, Doors::centered(rs), (0, 0), &BTreeMap::from([((side, side), 1.0)])).unwrap();
    let gamma = 0.95;
    let p = DiscountedProblem::from_labels(x, y, LabelScale::None, gamma).unwrap();
    let exact = exact_dp(&p, 1e-6).unwrap().distance;
    let scale = p.cost().sup_norm() / (1.0 - gamma);
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for m in [Some(1), Some(2), Some(5), None] {
        let inner = m.map_or(InnerSteps::Converge, InnerSteps::Fixed);
        let cfg = SolverConfig { iterations: 2000, inner, ..SolverConfig::default() };
        let d = svi(&p, &cfg).unwrap().distance;
        let rel = (d - exact).abs() / scale;
        worst = worst.max(rel);
        parts.push(format!("m={}: {d:.5}", m.map_or("inf".into(), |v: usize| v.to_string())));
    }
    outcome(worst <= 5e-2, format!("exact {exact:.5}; {}; worst relative gap {worst:.2e} (limit 5e-2)", parts.join(", ")))
}

/// 9. Performance-difference identity along SPI iterates.
fn performance_difference() -> Outcome {
    let mut worst: f64 = 0.0;
    for inst in 0..10u64 {
        let p = if inst % 2 == 0 { label_problem(2, 3, 0.7, 900 + inst) } else { sparse_problem(3, 3, 0.85, 900 + inst) };
        let star = exact_dp(&p, 1e-10).unwrap();
        let mu_star = occupancy_of(&star.pi_out, &p).unwrap();
        let cfg = SolverConfig { iterations: 20, ..SolverConfig::default() };
        let mut run = Spi::new(&p, cfg).unwrap();
        loop {
            let mu_k = occupancy_of(run.rounded(), &p).unwrap();
            let q = run.q_table();
            let v = run.value();
            let n = p.n_pairs();
            let mut rhs = 0.0;
            for i in 0..n {
                for j in 0..n {
                    rhs += mu_star.row(i)[j] * (v.get(i) - q.get(i, j));
                }
            }
            let lhs = mu_k.expected_cost(&p) - mu_star.expected_cost(&p);
            worst = worst.max((lhs - rhs).abs());
            if run.is_done() {
                break;
            }
            run.step().unwrap();
        }
    }
    outcome(worst <= 1e-8, format!("10 instances x 20 iterations; worst identity gap {worst:.2e} (limit 1e-8)"))
}

/// 10. Mean coherence violation under the theory step size decays like a
/// power of K between -0.8 and -0.2.
fn coherence_trend() -> Outcome {
    let ks = [250usize, 1000, 4000];
    let mut slopes = Vec::new();
    for inst in 0..5u64 {
        let p = label_problem(3, 3, 0.5, 1100 + inst);
        let means: Vec<f64> = ks
            .iter()
            .map(|&k| {
                let cfg = SolverConfig {
                    iterations: k,
                    step_size: StepSize::TheorySvi,
                    diagnostics: true,
                    ..SolverConfig::default()
                };
                let res = svi(&p, &cfg).unwrap();
                res.diagnostics.iter().map(|d| d.delta).sum::<f64>() / res.diagnostics.len() as f64
            })
            .collect();
        let xs: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
        slopes.push(loglog_slope(&xs, &means));
    }
    let ok = slopes.iter().all(|s| (-0.8..=-0.2).contains(s));
    let list: Vec<String> = slopes.iter().map(|s| format!("{s:.3}")).collect();
    outcome(ok, format!("slopes [{}] (range [-0.8, -0.2])", list.join(", ")))
}

/// Reads a CPLEX LP file and solves it with HiGHS through scipy.
const LP_SOLVER: &str = r#"
import re, sys
import numpy as np
from scipy.optimize import linprog
text = open(sys.argv[1]).read()
lines = [l.strip() for l in text.splitlines() if l.strip() and not l.strip().startswith('\\')]
section, obj, rows, cur = None, [], [], ''
for l in lines:
    low = l.lower()
    if low in ('minimize', 'subject to', 'end', 'bounds'):
        section = low
        continue
    if section == 'minimize':
        obj.append(l)
    elif section == 'subject to':
        cur += ' ' + l
        if '=' in l:
            rows.append(cur)
            cur = ''
def terms(expr):
    expr = expr.split(':', 1)[1] if ':' in expr else expr
    out = []
    for sign, coef, name in re.findall(r'([+-]?)\s*([0-9.eE+-]+)\s+([A-Za-z_][A-Za-z0-9_]*)', expr):
        c = float(coef) * (-1 if sign == '-' else 1)
        out.append((name, c))
    return out
names = {}
def idx(n):
    if n not in names:
        names[n] = len(names)
    return names[n]
cterms = terms(' '.join(obj))
parsed = []
for r in rows:
    lhs, rhs = r.rsplit('=', 1)
    parsed.append((terms(lhs), float(rhs)))
for t, _ in parsed:
    for n, _ in t:
        idx(n)
for n, _ in cterms:
    idx(n)
c = np.zeros(len(names))
for n, v in cterms:
    c[names[n]] += v
A = np.zeros((len(parsed), len(names)))
b = np.zeros(len(parsed))
for k, (t, rhs) in enumerate(parsed):
    for n, v in t:
        A[k, names[n]] += v
    b[k] = rhs
res = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method='highs')
assert res.status == 0, res.message
print(repr(res.fun))
"#;

/// 11. The exported program, solved externally, reproduces the oracle.
fn lp_cross_check() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for inst in 0..3u64 {
        let gamma = [0.5, 0.8, 0.9][inst as usize];
        let p = if inst == 1 { sparse_problem(2, 2, gamma, 1200) } else { label_problem(2, 2, gamma, 1200 + inst) };
        let path = dir.path().join(format!("pair{inst}.lp"));
        let summary = export_lp(&p, &path).unwrap();
        assert_eq!(summary.variables, 16);
        let exact = exact_dp(&p, 1e-10).unwrap().distance * (1.0 - gamma);
        let out = Command::new("python3").arg("-c").arg(LP_SOLVER).arg(&path).output();
        match out {
            Ok(o) if o.status.success() => {
                let value: f64 = String::from_utf8_lossy(&o.stdout).trim().parse().unwrap_or(f64::NAN);
                let gap = (value - exact).abs();
                worst = worst.max(if gap.is_nan() { f64::INFINITY } else { gap });
            }
            Ok(o) => errors.push(String::from_utf8_lossy(&o.stderr).lines().last().unwrap_or("").to_string()),
            Err(e) => errors.push(e.to_string()),
        }
    }
    if !errors.is_empty() {
        return outcome(false, format!("external solver unavailable: {}", errors.join(" | ")));
    }
    outcome(worst <= 1e-6, format!("3 instances; worst |LP - exact (1 - gamma)| = {worst:.2e} (limit 1e-6)"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("oracle equivalence", oracle_equivalence),
        ("occupancy identities", occupancy_identities),
        ("contraction", contraction),
        ("update feasibility", update_feasibility),
        ("mirror-step optimality probe", mirror_step_probe),
        ("rounding", rounding),
        ("zero self-distance and symmetry", bisimulation),
        ("m-robustness on 4-rooms", m_robustness),
        ("performance-difference identity", performance_difference),
        ("coherence decay trend", coherence_trend),
        ("LP cross-check", lp_cross_check),
    ];
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {verdict} {name} [{:.1}s]: {}", start.elapsed().as_secs_f64(), o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
