//! Subcommand implementations.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use markov_ot::envs::{four_rooms, grid_chain, random_chain, Doors};
use markov_ot::files::ChainFile;
use markov_ot::{
    baseline_pi_sinkhorn, baseline_vi_sinkhorn, exact_dp, export_lp, spi, svi, Averaging, CouplingFile,
    DiscountedProblem, InnerSteps, LabelScale, MarkovChain, SinkhornInner, SolveResult, SolverConfig, StepSize,
    TransitionCoupling,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::*;
use crate::{load_chain, load_problem, CliError, CliResult};

pub(crate) fn run(command: Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Dist(a) => dist(a, out),
        Command::Matrix(a) => matrix(a, out),
        Command::Bench(a) => bench(a, out),
        Command::Validate(a) => validate(a, out),
        Command::ExportLp(a) => lp(a, out),
        Command::Gen(g) => generate(g, out),
    }
}

/// Writes `text` to `path` when given, to `out` otherwise.
fn emit(path: Option<&Path>, out: &mut dyn Write, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Failure(format!("{}: {e}", p.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn solver_config(a: &SolverArgs) -> CliResult<SolverConfig> {
    let step_size = match (a.eta_schedule, a.algo) {
        (ScheduleArg::Const, _) => StepSize::Constant(a.eta),
        (ScheduleArg::Invsqrt, _) => StepSize::InvSqrt(a.eta),
        (ScheduleArg::Theory, AlgoArg::Spi) => StepSize::TheorySpi,
        (ScheduleArg::Theory, _) => StepSize::TheorySvi,
    };
    let config = SolverConfig {
        step_size,
        iterations: a.iters,
        inner: match a.inner_m {
            InnerM::Steps(m) => InnerSteps::Fixed(m),
            InnerM::Converge => InnerSteps::Converge,
        },
        inner_tol: a.inner_tol,
        averaging: match a.averaging {
            AveragingArg::Last => Averaging::LastIterate,
            AveragingArg::Full => Averaging::FullAverage,
        },
        seed: a.seed,
        early_stop: a.early_stop,
        ..SolverConfig::default()
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if !(a.tol.is_finite() && a.tol > 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    if !(a.inner_eta.is_finite() && a.inner_eta > 0.0) || a.inner_iters == 0 || a.eval_steps == 0 {
        return Err(CliError::Usage("--inner-eta, --inner-iters and --eval-steps must be positive".into()));
    }
    Ok(config)
}

fn solve(problem: &DiscountedProblem, a: &SolverArgs, config: &SolverConfig) -> CliResult<SolveResult> {
    let inner = SinkhornInner { eta: a.inner_eta, iters: a.inner_iters, warm_start: a.warm_start };
    let res = match a.algo {
        AlgoArg::Svi => svi(problem, config),
        AlgoArg::Spi => spi(problem, config),
        AlgoArg::Exact => exact_dp(problem, a.tol),
        AlgoArg::Dwl => baseline_vi_sinkhorn(problem, config, inner),
        AlgoArg::Eotc => baseline_pi_sinkhorn(problem, config, inner, a.eval_steps),
    };
    Ok(res?)
}

#[derive(Debug, Serialize)]
struct DistResult {
    distance: f64,
    gamma: f64,
    algo: &'static str,
    iterations: usize,
    diagnostics_csv: Option<String>,
}

fn dist(a: DistArgs, out: &mut dyn Write) -> CliResult<()> {
    let mut config = solver_config(&a.solver)?;
    config.diagnostics = a.diagnostics.is_some();
    let problem = load_problem(&a.problem.x, &a.problem.y, a.problem.cost.as_deref(), a.solver.gamma)?;
    let res = solve(&problem, &a.solver, &config)?;
    if let Some(path) = &a.diagnostics {
        emit(Some(path), out, &res.diagnostics_csv())?;
    }
    let result = DistResult {
        distance: res.distance,
        gamma: problem.gamma(),
        algo: res.algorithm.name(),
        iterations: res.iterations,
        diagnostics_csv: a.diagnostics.as_ref().map(|p| p.display().to_string()),
    };
    let text = match a.format {
        FormatArg::Json => serde_json::to_string_pretty(&result)? + "\n",
        FormatArg::Csv => to_csv(std::iter::once(&result))?,
    };
    emit(a.out.as_deref(), out, &text)
}

fn to_csv<'a, T: Serialize + 'a>(rows: impl IntoIterator<Item = &'a T>) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Failure(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Failure(e.to_string()))
}

/// Chain files in `dir`, sorted by file name.
fn chain_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::Failure(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(CliError::Failure(format!("{}: no chain files (*.json)", dir.display())));
    }
    Ok(files)
}

#[derive(Debug, Serialize)]
struct MatrixJson {
    ids: Vec<String>,
    distances: Vec<Vec<f64>>,
}

fn matrix(a: MatrixArgs, out: &mut dyn Write) -> CliResult<()> {
    let config = solver_config(&a.solver)?;
    let files = chain_files(&a.dir)?;
    let ids: Vec<String> =
        files.iter().map(|p| p.file_stem().map_or(String::new(), |s| s.to_string_lossy().into_owned())).collect();
    let chains = files.iter().map(|p| load_chain(p)).collect::<CliResult<Vec<MarkovChain>>>()?;
    let scale = match a.cost_scale {
        ScaleArg::None => LabelScale::None,
        ScaleArg::OneMinusGamma => LabelScale::OneMinusGamma,
    };
    let n = chains.len();
    // Pairs are independent; collecting in index order keeps the output
    // deterministic.
    let cells = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let problem =
                DiscountedProblem::from_labels(chains[i].clone(), chains[j].clone(), scale, a.solver.gamma)
                    .map_err(|e| CliError::Failure(format!("{} vs {}: {e}", ids[i], ids[j])))?;
            Ok(solve(&problem, &a.solver, &config)?.distance)
        })
        .collect::<CliResult<Vec<f64>>>()?;
    let distances: Vec<Vec<f64>> = cells.chunks(n).map(<[f64]>::to_vec).collect();
    let text = match a.format {
        FormatArg::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(std::iter::once("id").chain(ids.iter().map(String::as_str)))?;
            for (id, row) in ids.iter().zip(&distances) {
                w.write_record(std::iter::once(id.clone()).chain(row.iter().map(f64::to_string)))?;
            }
            String::from_utf8(w.into_inner().map_err(|e| CliError::Failure(e.to_string()))?)
                .map_err(|e| CliError::Failure(e.to_string()))?
        }
        FormatArg::Json => serde_json::to_string_pretty(&MatrixJson { ids, distances })? + "\n",
    };
    emit(a.out.as_deref(), out, &text)
}

/// One row of the benchmark table.
#[derive(Debug, Serialize)]
struct BenchRow {
    instance: String,
    n: usize,
    algo: &'static str,
    distance: f64,
    iterations: usize,
    wall_ms: f64,
}

fn bench(a: BenchArgs, out: &mut dyn Write) -> CliResult<()> {
    solver_config(&a.solver)?;
    if a.sizes.contains(&0) {
        return Err(CliError::Usage("--sizes must be positive".into()));
    }
    let mut rows = Vec::new();
    for &n in &a.sizes {
        for inst in 0..a.instances {
            let base = a.solver.seed.wrapping_add(2 * (1000 * n + inst) as u64);
            let problem = DiscountedProblem::from_labels(
                random_chain(n, base)?,
                random_chain(n, base + 1)?,
                LabelScale::None,
                a.solver.gamma,
            )?;
            for &algo in &a.algos {
                let args = SolverArgs { algo, ..a.solver.clone() };
                let config = solver_config(&args)?;
                let start = Instant::now();
                let res = solve(&problem, &args, &config)?;
                rows.push(BenchRow {
                    instance: format!("n{n}-i{inst}"),
                    n,
                    algo: res.algorithm.name(),
                    distance: res.distance,
                    iterations: res.iterations,
                    wall_ms: start.elapsed().as_secs_f64() * 1e3,
                });
            }
        }
    }
    let text = match a.format {
        FormatArg::Csv => to_csv(&rows)?,
        FormatArg::Json => serde_json::to_string_pretty(&rows)? + "\n",
    };
    emit(a.out.as_deref(), out, &text)
}

fn validate(a: ValidateArgs, out: &mut dyn Write) -> CliResult<()> {
    if a.chains.is_empty() && a.coupling.is_none() {
        return Err(CliError::Usage("nothing to validate: pass --chain or --coupling".into()));
    }
    let mut failures = Vec::new();
    for path in &a.chains {
        match load_chain(path) {
            Ok(c) => writeln!(out, "{}: ok ({} states)", path.display(), c.len())?,
            Err(e) => failures.push(e.to_string()),
        }
    }
    if let (Some(path), Some(x), Some(y)) = (&a.coupling, &a.x, &a.y) {
        match check_coupling(path, x, y, a.tol) {
            Ok(msg) => writeln!(out, "{}: {msg}", path.display())?,
            Err(e) => failures.push(format!("{}: {e}", path.display())),
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failure(failures.join("\n")))
    }
}

fn check_coupling(path: &Path, x: &Path, y: &Path, tol: f64) -> CliResult<String> {
    // The cost plays no part in coupling validity.
    let (cx, cy) = (load_chain(x)?, load_chain(y)?);
    let text = std::fs::read_to_string(path)?;
    let file: CouplingFile = serde_json::from_str(&text)?;
    if (file.nx, file.ny) != (cx.len(), cy.len()) {
        return Err(CliError::Failure(format!(
            "coupling is for {}x{} chains, got {}x{}",
            file.nx,
            file.ny,
            cx.len(),
            cy.len()
        )));
    }
    let cost = markov_ot::GroundCost::constant(cx.len(), cy.len(), 0.0)?;
    let problem = DiscountedProblem::new(cx, cy, cost, 0.5)?;
    let pi = TransitionCoupling::try_from(file)?;
    let r = pi.marginal_residuals(&problem);
    let summary =
        format!("x residual {:.3e}, y residual {:.3e}, worst row {:.3e}", r.x_l1, r.y_l1, r.max_row);
    if pi.is_valid(&problem, tol) {
        Ok(format!("ok ({summary})"))
    } else {
        Err(CliError::Failure(format!("not a transition coupling within {tol:e}: {summary}")))
    }
}

fn lp(a: ExportLpArgs, out: &mut dyn Write) -> CliResult<()> {
    let problem = load_problem(&a.problem.x, &a.problem.y, a.problem.cost.as_deref(), a.gamma)?;
    let summary = export_lp(&problem, &a.out)?;
    #[derive(Serialize)]
    struct Report {
        path: String,
        constraints: usize,
        #[serde(flatten)]
        summary: markov_ot::LpSummary,
    }
    let report = Report { path: a.out.display().to_string(), constraints: summary.constraints(), summary };
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(())
}

fn rewards(list: &[RewardArg]) -> BTreeMap<(usize, usize), f64> {
    list.iter().map(|RewardArg(CellArg(r, c), v)| ((*r, *c), *v)).collect()
}

fn generate(g: GenCommand, out: &mut dyn Write) -> CliResult<()> {
    let usage = |e: markov_ot::Error| CliError::Usage(e.to_string());
    let (chain, path) = match g {
        GenCommand::Grid { width, height, walls, init, rewards: r, out } => {
            let walls: BTreeSet<_> = walls.iter().map(|CellArg(a, b)| (*a, *b)).collect();
            (grid_chain(width, height, &walls, (init.0, init.1), &rewards(&r)).map_err(usage)?, out)
        }
        GenCommand::FourRooms { room_size, no_doors, init, rewards: r, out } => {
            let doors = if no_doors { Doors::none() } else { Doors::centered(room_size) };
            (four_rooms(room_size, doors, (init.0, init.1), &rewards(&r)).map_err(usage)?, out)
        }
        GenCommand::Random { states, seed, out } => (random_chain(states, seed).map_err(usage)?, out),
    };
    let text = serde_json::to_string_pretty(&ChainFile::from(&chain))? + "\n";
    emit(path.as_deref(), out, &text)
}
