//! Finite Markov chains and the discounted transport problem between two of them.

use std::fmt;

use crate::coupling::TransitionCoupling;
use crate::error::{Error, Result};

/// Tolerance on kernel row sums.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Admissible discount factors are `GAMMA_MARGIN <= gamma <= 1 - GAMMA_MARGIN`.
pub const GAMMA_MARGIN: f64 = 1e-6;

/// A finite, time-homogeneous Markov chain with a fixed initial state.
///
/// The kernel is stored dense and row-major. Supports (indices of next
/// states with positive probability) are cached per row since every
/// operator in the crate iterates over them.
#[derive(Debug, Clone)]
pub struct MarkovChain {
    states: Vec<String>,
    kernel: Vec<f64>,
    init: usize,
    labels: Option<Vec<f64>>,
    support: Vec<Vec<usize>>,
    ragged: Vec<(usize, usize)>,
}

/// A single failed invariant of a [`MarkovChain`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Empty,
    RowCount { rows: usize, expected: usize },
    RaggedRow { row: usize, len: usize, expected: usize },
    NonFinite { row: usize, col: usize },
    Negative { row: usize, col: usize, value: f64 },
    RowSum { row: usize, sum: f64, residual: f64 },
    InitOutOfRange { init: usize, states: usize },
    LabelCount { labels: usize, states: usize },
    NonFiniteLabel { index: usize },
    DuplicateState { id: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "chain has no states"),
            Violation::RowCount { rows, expected } => {
                write!(f, "kernel has {rows} rows, expected {expected}")
            }
            Violation::RaggedRow { row, len, expected } => {
                write!(f, "row {row} has {len} entries, expected {expected}")
            }
            Violation::NonFinite { row, col } => write!(f, "entry ({row}, {col}) is not finite"),
            Violation::Negative { row, col, value } => {
                write!(f, "entry ({row}, {col}) is negative: {value}")
            }
            Violation::RowSum { row, sum, residual } => {
                write!(f, "row {row} sums to {sum} (residual {residual:.3e})")
            }
            Violation::InitOutOfRange { init, states } => {
                write!(f, "initial state index {init} out of range for {states} states")
            }
            Violation::LabelCount { labels, states } => {
                write!(f, "{labels} labels for {states} states")
            }
            Violation::NonFiniteLabel { index } => write!(f, "label {index} is not finite"),
            Violation::DuplicateState { id } => write!(f, "duplicate state id `{id}`"),
        }
    }
}

impl MarkovChain {
    /// Builds a chain and rejects it if any invariant fails.
    pub fn new(
        states: Vec<String>,
        rows: Vec<Vec<f64>>,
        init: usize,
        labels: Option<Vec<f64>>,
    ) -> Result<Self> {
        let chain = Self::from_parts(states, rows, init, labels);
        let violations = validate_chain(&chain);
        if violations.is_empty() {
            Ok(chain)
        } else {
            let msg: Vec<String> = violations.iter().map(ToString::to_string).collect();
            Err(Error::InvalidChain(msg.join("; ")))
        }
    }

    /// Builds a chain without checking invariants; use [`validate_chain`]
    /// to inspect it. Ragged rows are zero-padded or truncated to the
    /// number of states, and the raggedness is reported by validation.
    pub fn from_parts(
        states: Vec<String>,
        rows: Vec<Vec<f64>>,
        init: usize,
        labels: Option<Vec<f64>>,
    ) -> Self {
        let n = states.len();
        let mut kernel = vec![0.0; n * n];
        let mut ragged = Vec::new();
        for i in 0..n {
            let row = rows.get(i).map(Vec::as_slice).unwrap_or(&[]);
            if row.len() != n {
                ragged.push((i, row.len()));
            }
            for (j, &v) in row.iter().enumerate().take(n) {
                kernel[i * n + j] = v;
            }
        }
        if rows.len() > n {
            // Surplus rows are keyed past the last state.
            ragged.push((n, rows.len()));
        }
        let support = (0..n)
            .map(|i| (0..n).filter(|&j| kernel[i * n + j] > 0.0).collect())
            .collect();
        Self { states, kernel, init, labels, support, ragged }
    }

    /// Convenience constructor with generated ids `s0, s1, ...`.
    pub fn from_rows(rows: Vec<Vec<f64>>, init: usize, labels: Option<Vec<f64>>) -> Result<Self> {
        let states = (0..rows.len()).map(|i| format!("s{i}")).collect();
        Self::new(states, rows, init, labels)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn labels(&self) -> Option<&[f64]> {
        self.labels.as_deref()
    }

    /// Transition probability `P(to | from)`.
    #[inline]
    pub fn p(&self, from: usize, to: usize) -> f64 {
        self.kernel[from * self.len() + to]
    }

    /// Row `P(. | from)`.
    #[inline]
    pub fn row(&self, from: usize) -> &[f64] {
        let n = self.len();
        &self.kernel[from * n..(from + 1) * n]
    }

    /// Next states reachable from `from` with positive probability.
    #[inline]
    pub fn support(&self, from: usize) -> &[usize] {
        &self.support[from]
    }

    pub fn kernel_rows(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.states.iter().position(|s| s == id)
    }

    /// Same chain started from a different state.
    pub fn with_init(&self, init: usize) -> Result<Self> {
        if init >= self.len() {
            return Err(Error::InvalidChain(
                Violation::InitOutOfRange { init, states: self.len() }.to_string(),
            ));
        }
        Ok(Self { init, ..self.clone() })
    }
}

/// Checks every chain invariant and reports each violation found.
pub fn validate_chain(chain: &MarkovChain) -> Vec<Violation> {
    let n = chain.len();
    let mut out = Vec::new();
    if n == 0 {
        out.push(Violation::Empty);
        return out;
    }
    if let Some(&(_, rows)) = chain.ragged.iter().find(|(r, _)| *r >= n) {
        out.push(Violation::RowCount { rows, expected: n });
    }
    let mut seen = std::collections::HashSet::new();
    for id in &chain.states {
        if !seen.insert(id.as_str()) {
            out.push(Violation::DuplicateState { id: id.clone() });
        }
    }
    for i in 0..n {
        if let Some(&(_, len)) = chain.ragged.iter().find(|(r, _)| *r == i) {
            out.push(Violation::RaggedRow { row: i, len, expected: n });
            continue;
        }
        let row = chain.row(i);
        let mut finite = true;
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                out.push(Violation::NonFinite { row: i, col: j });
                finite = false;
            } else if v < 0.0 {
                out.push(Violation::Negative { row: i, col: j, value: v });
            }
        }
        if finite {
            let sum: f64 = row.iter().sum();
            let residual = (sum - 1.0).abs();
            if residual > ROW_SUM_TOL {
                out.push(Violation::RowSum { row: i, sum, residual });
            }
        }
    }
    if chain.init >= n {
        out.push(Violation::InitOutOfRange { init: chain.init, states: n });
    }
    if let Some(labels) = &chain.labels {
        if labels.len() != n {
            out.push(Violation::LabelCount { labels: labels.len(), states: n });
        }
        for (i, l) in labels.iter().enumerate() {
            if !l.is_finite() {
                out.push(Violation::NonFiniteLabel { index: i });
            }
        }
    }
    out
}

/// How a label-derived cost is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelScale {
    None,
    /// `(1 - gamma)`: the scaling under which the transport distance is the
    /// bisimulation metric.
    OneMinusGamma,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostProvenance {
    Explicit,
    LabelsAbsDiff { scale: LabelScale },
}

/// Nonnegative per-step cost `c(x, y)`, stored `|X| x |Y|` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundCost {
    nx: usize,
    ny: usize,
    values: Vec<f64>,
    provenance: CostProvenance,
}

impl GroundCost {
    pub fn explicit(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nx = rows.len();
        let ny = rows.first().map_or(0, Vec::len);
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidCost("empty cost matrix".into()));
        }
        let mut values = Vec::with_capacity(nx * ny);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ny {
                return Err(Error::DimensionMismatch {
                    expected: format!("{ny} columns"),
                    got: format!("{} in cost row {i}", row.len()),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidCost(format!("entry ({i}, {j}) = {v}")));
                }
            }
            values.extend_from_slice(row);
        }
        Ok(Self { nx, ny, values, provenance: CostProvenance::Explicit })
    }

    /// The cost `kappa` everywhere.
    pub fn constant(nx: usize, ny: usize, kappa: f64) -> Result<Self> {
        Self::explicit(vec![vec![kappa; ny]; nx])
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[x * self.ny + y]
    }

    /// Row-major values, indexed by state pair.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> CostProvenance {
        self.provenance
    }

    /// `max |c|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.ny).map(<[f64]>::to_vec).collect()
    }

    pub fn transposed(&self) -> Self {
        let mut values = vec![0.0; self.values.len()];
        for x in 0..self.nx {
            for y in 0..self.ny {
                values[y * self.nx + x] = self.get(x, y);
            }
        }
        Self { nx: self.ny, ny: self.nx, values, provenance: self.provenance }
    }
}

/// `c(x, y) = s * |r_X(x) - r_Y(y)|` with `s = 1 - gamma` or `s = 1`.
pub fn cost_from_labels(
    chain_x: &MarkovChain,
    chain_y: &MarkovChain,
    scale: LabelScale,
    gamma: f64,
) -> Result<GroundCost> {
    let rx = chain_x.labels().ok_or(Error::MissingLabels("X"))?;
    let ry = chain_y.labels().ok_or(Error::MissingLabels("Y"))?;
    let s = match scale {
        LabelScale::None => 1.0,
        LabelScale::OneMinusGamma => 1.0 - gamma,
    };
    let values = rx.iter().flat_map(|a| ry.iter().map(move |b| s * (a - b).abs())).collect();
    Ok(GroundCost {
        nx: rx.len(),
        ny: ry.len(),
        values,
        provenance: CostProvenance::LabelsAbsDiff { scale },
    })
}

/// A chain pair together with its ground cost and discount factor.
///
/// State pairs `(x, y)` are flattened to `x * |Y| + y` everywhere in the
/// crate. The initial distribution over pairs defaults to a point mass at
/// the two chains' initial states.
#[derive(Debug, Clone)]
pub struct DiscountedProblem {
    chain_x: MarkovChain,
    chain_y: MarkovChain,
    cost: GroundCost,
    gamma: f64,
    initial: Vec<f64>,
}

impl DiscountedProblem {
    pub fn new(
        chain_x: MarkovChain,
        chain_y: MarkovChain,
        cost: GroundCost,
        gamma: f64,
    ) -> Result<Self> {
        for (name, chain) in [("X", &chain_x), ("Y", &chain_y)] {
            let v = validate_chain(chain);
            if !v.is_empty() {
                let msg: Vec<String> = v.iter().map(ToString::to_string).collect();
                return Err(Error::InvalidChain(format!("chain {name}: {}", msg.join("; "))));
            }
        }
        if cost.shape() != (chain_x.len(), chain_y.len()) {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{} cost", chain_x.len(), chain_y.len()),
                got: format!("{}x{}", cost.nx, cost.ny),
            });
        }
        if !(GAMMA_MARGIN..=1.0 - GAMMA_MARGIN).contains(&gamma) {
            return Err(Error::InvalidGamma(gamma));
        }
        let mut initial = vec![0.0; chain_x.len() * chain_y.len()];
        initial[chain_x.init() * chain_y.len() + chain_y.init()] = 1.0;
        Ok(Self { chain_x, chain_y, cost, gamma, initial })
    }

    /// Problem whose cost is derived from the chains' labels.
    pub fn from_labels(
        chain_x: MarkovChain,
        chain_y: MarkovChain,
        scale: LabelScale,
        gamma: f64,
    ) -> Result<Self> {
        let cost = cost_from_labels(&chain_x, &chain_y, scale, gamma)?;
        Self::new(chain_x, chain_y, cost, gamma)
    }

    /// Replaces the point-mass start with a general distribution over pairs.
    pub fn with_initial_distribution(mut self, initial: Vec<f64>) -> Result<Self> {
        if initial.len() != self.n_pairs() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} pair weights", self.n_pairs()),
                got: initial.len().to_string(),
            });
        }
        let sum: f64 = initial.iter().sum();
        if initial.iter().any(|&v| !v.is_finite() || v < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("initial distribution must be a distribution".into()));
        }
        self.initial = initial;
        Ok(self)
    }

    pub fn chain_x(&self) -> &MarkovChain {
        &self.chain_x
    }

    pub fn chain_y(&self) -> &MarkovChain {
        &self.chain_y
    }

    pub fn cost(&self) -> &GroundCost {
        &self.cost
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn nx(&self) -> usize {
        self.chain_x.len()
    }

    pub fn ny(&self) -> usize {
        self.chain_y.len()
    }

    /// `|X| * |Y|`.
    pub fn n_pairs(&self) -> usize {
        self.nx() * self.ny()
    }

    #[inline]
    pub fn pair(&self, x: usize, y: usize) -> usize {
        x * self.ny() + y
    }

    #[inline]
    pub fn split(&self, pair: usize) -> (usize, usize) {
        (pair / self.ny(), pair % self.ny())
    }

    /// Cost of a flattened state pair.
    #[inline]
    pub fn c(&self, pair: usize) -> f64 {
        self.cost.values[pair]
    }

    /// Index of the initial pair when the start is a point mass.
    pub fn init_pair(&self) -> usize {
        self.pair(self.chain_x.init(), self.chain_y.init())
    }

    /// Same problem with the roles of X and Y exchanged.
    pub fn swapped(&self) -> Self {
        let mut initial = vec![0.0; self.n_pairs()];
        for x in 0..self.nx() {
            for y in 0..self.ny() {
                initial[y * self.nx() + x] = self.initial[self.pair(x, y)];
            }
        }
        Self {
            chain_x: self.chain_y.clone(),
            chain_y: self.chain_x.clone(),
            cost: self.cost.transposed(),
            gamma: self.gamma,
            initial,
        }
    }
}

/// The independent coupling `pi(x'y' | xy) = P_X(x'|x) P_Y(y'|y)`.
pub fn product_coupling(problem: &DiscountedProblem) -> TransitionCoupling {
    let (nx, ny) = (problem.nx(), problem.ny());
    let n = nx * ny;
    let mut table = vec![0.0; n * n];
    crate::par::for_each_row(&mut table, n, |i, row| {
        let (x, y) = (i / ny, i % ny);
        for &xn in problem.chain_x().support(x) {
            let px = problem.chain_x().p(x, xn);
            for &yn in problem.chain_y().support(y) {
                row[xn * ny + yn] = px * problem.chain_y().p(y, yn);
            }
        }
    });
    TransitionCoupling::from_raw(nx, ny, table)
}
