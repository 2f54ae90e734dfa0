//! Chain generators: gridworlds (the 4-rooms layout among them) and random chains.
//!
//! Grid cells are `(row, col)`. A grid state moves to each of its four
//! principal neighbors with probability 1/4; a move into a wall or off the
//! grid leaves the state in place. State ids are `r{row}c{col}` and labels
//! come from the rewards map (0 elsewhere).

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, Uniform};

use crate::chain::MarkovChain;
use crate::error::{Error, Result};

pub type Cell = (usize, usize);

/// Random walk on the non-wall cells of a `width x height` grid.
pub fn grid_chain(
    width: usize,
    height: usize,
    walls: &BTreeSet<Cell>,
    init: Cell,
    rewards: &BTreeMap<Cell, f64>,
) -> Result<MarkovChain> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidArgument("grid dimensions must be at least 1".into()));
    }
    if init.0 >= height || init.1 >= width {
        return Err(Error::InvalidArgument(format!("initial cell {init:?} is off the grid")));
    }
    if walls.contains(&init) {
        return Err(Error::InvalidArgument(format!("initial cell {init:?} is a wall")));
    }
    let open = |(r, c): Cell| r < height && c < width && !walls.contains(&(r, c));
    let cells: Vec<Cell> =
        (0..height).flat_map(|r| (0..width).map(move |c| (r, c))).filter(|&c| open(c)).collect();
    let index: BTreeMap<Cell, usize> = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let n = cells.len();
    let mut rows = vec![vec![0.0; n]; n];
    for (i, &(r, c)) in cells.iter().enumerate() {
        let moves = [
            r.checked_sub(1).map(|r| (r, c)),
            Some((r + 1, c)),
            c.checked_sub(1).map(|c| (r, c)),
            Some((r, c + 1)),
        ];
        for target in moves {
            let j = match target {
                Some(t) if open(t) => index[&t],
                _ => i,
            };
            rows[i][j] += 0.25;
        }
    }
    let states = cells.iter().map(|(r, c)| format!("r{r}c{c}")).collect();
    let labels = cells.iter().map(|c| rewards.get(c).copied().unwrap_or(0.0)).collect();
    MarkovChain::new(states, rows, index[&init], Some(labels))
}

/// Door offsets along the four wall segments that separate the rooms.
///
/// With room size `r` the grid is `(2r + 1) x (2r + 1)` with walls on row
/// `r` and column `r`. `top` is the offset along column `r` above the
/// center, `bottom` below it, `left` along row `r` left of the center and
/// `right` right of it. Each offset must be `< r`; `None` keeps that
/// segment closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Doors {
    pub top: Option<usize>,
    pub bottom: Option<usize>,
    pub left: Option<usize>,
    pub right: Option<usize>,
}

impl Doors {
    /// One door in the middle of each segment.
    pub fn centered(room_size: usize) -> Self {
        let mid = Some(room_size / 2);
        Self { top: mid, bottom: mid, left: mid, right: mid }
    }

    pub fn none() -> Self {
        Self { top: None, bottom: None, left: None, right: None }
    }

    fn cells(&self, r: usize) -> Result<Vec<Cell>> {
        type Place = fn(usize, usize) -> Cell;
        let segments: [(Option<usize>, Place); 4] = [
            (self.top, |o, r| (o, r)),
            (self.bottom, |o, r| (r + 1 + o, r)),
            (self.left, |o, r| (r, o)),
            (self.right, |o, r| (r, r + 1 + o)),
        ];
        let mut out = Vec::new();
        for (offset, place) in segments {
            if let Some(o) = offset {
                if o >= r {
                    return Err(Error::InvalidArgument(format!(
                        "door offset {o} does not fit a wall segment of length {r}"
                    )));
                }
                out.push(place(o, r));
            }
        }
        Ok(out)
    }
}

/// The 4-rooms layout: four `room_size x room_size` rooms separated by a
/// wall cross and joined by door cells on the walls. With four doors it
/// has `4 room_size^2 + 4` states.
pub fn four_rooms(
    room_size: usize,
    doors: Doors,
    init: Cell,
    rewards: &BTreeMap<Cell, f64>,
) -> Result<MarkovChain> {
    if room_size == 0 {
        return Err(Error::InvalidArgument("room size must be at least 1".into()));
    }
    let r = room_size;
    let side = 2 * r + 1;
    let open: BTreeSet<Cell> = doors.cells(r)?.into_iter().collect();
    let walls = (0..side)
        .flat_map(|i| [(i, r), (r, i)])
        .filter(|c| !open.contains(c))
        .collect();
    grid_chain(side, side, &walls, init, rewards)
}

/// Random chain with Dirichlet(1, ..., 1) rows and uniform `[0, 1)` labels,
/// started in state 0. Equal seeds give equal chains.
pub fn random_chain(n_states: usize, seed: u64) -> Result<MarkovChain> {
    if n_states == 0 {
        return Err(Error::InvalidArgument("a chain needs at least one state".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n_states)
        .map(|_| {
            // Normalized unit exponentials are Dirichlet(1) distributed.
            let draws: Vec<f64> = (0..n_states).map(|_| rng.sample::<f64, _>(Exp1)).collect();
            let sum: f64 = draws.iter().sum();
            draws.into_iter().map(|v| v / sum).collect()
        })
        .collect();
    let unit = Uniform::new(0.0, 1.0).expect("valid range");
    let labels = (0..n_states).map(|_| rng.sample(unit)).collect();
    MarkovChain::from_rows(rows, 0, Some(labels))
}
