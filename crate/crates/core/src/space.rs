//! Metric spaces, trajectories and epsilon grids.
//!
//! States are opaque to the numeric code: everything goes through
//! [`MetricSpace::distance`]. Two spaces expose extra structure that the
//! accelerated pair counters can exploit: the real line with `|x - y|` and the
//! one-sided shift space with `2^-k` (states are positions in a shared symbol
//! buffer, so applying the shift is just `i -> i + 1`).

use std::sync::Arc;

use crate::error::{invalid, Error, Result};

/// A metric on some state type.
pub trait MetricSpace: Send + Sync {
    type State: Clone + Send + Sync;

    fn distance(&self, a: &Self::State, b: &Self::State) -> f64;

    /// Known upper bound on the diameter of the space, if any.
    fn diameter_hint(&self) -> Option<f64> {
        None
    }

    /// `false` for states that cannot belong to the space (NaN, infinity, ...).
    fn is_valid(&self, _state: &Self::State) -> bool {
        true
    }

    /// Structure usable by the accelerated counting paths.
    fn structure<'a>(&'a self, _states: &'a [Self::State]) -> Structure<'a> {
        Structure::General
    }
}

/// What an accelerated correlation counter may assume about a trajectory.
pub enum Structure<'a> {
    General,
    /// States are reals compared by absolute difference.
    RealLine(&'a [f64]),
    /// States are positions into the symbol buffer of a shift space.
    Shift {
        space: &'a ShiftSpace,
        positions: &'a [usize],
    },
}

/// The real line (or an interval of it) with `|x - y|`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RealLine {
    pub diameter: Option<f64>,
}

impl RealLine {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Self {
            diameter: Some(hi - lo),
        }
    }
}

impl MetricSpace for RealLine {
    type State = f64;

    fn distance(&self, a: &f64, b: &f64) -> f64 {
        (a - b).abs()
    }

    fn diameter_hint(&self) -> Option<f64> {
        self.diameter
    }

    fn is_valid(&self, state: &f64) -> bool {
        state.is_finite()
    }

    fn structure<'a>(&'a self, states: &'a [f64]) -> Structure<'a> {
        Structure::RealLine(states)
    }
}

/// One-sided shift space over `{0, .., p-1}` restricted to the suffixes of a
/// single materialized symbol buffer.
///
/// A state is a position `i`; it stands for the sequence `symbols[i..]`.
/// Distances are `2^-k` with `k` the first disagreement, compared up to
/// `horizon` symbols (and the end of the buffer); agreement up to that point
/// counts as distance 0.
#[derive(Debug, Clone)]
pub struct ShiftSpace {
    symbols: Arc<[u8]>,
    alphabet: usize,
    horizon: usize,
}

impl ShiftSpace {
    pub fn new(symbols: Arc<[u8]>, alphabet: usize, horizon: usize) -> Result<Self> {
        if alphabet < 2 {
            return Err(invalid("alphabet size must be at least 2"));
        }
        if horizon == 0 {
            return Err(invalid("shift metric horizon must be at least 1"));
        }
        if let Some(bad) = symbols.iter().find(|&&s| s as usize >= alphabet) {
            return Err(invalid(format!(
                "symbol {bad} outside alphabet of size {alphabet}"
            )));
        }
        Ok(Self {
            symbols,
            alphabet,
            horizon,
        })
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Index of the first disagreement between positions `a` and `b`, if it
    /// is visible within the horizon and the buffer.
    pub fn first_disagreement(&self, a: usize, b: usize) -> Option<usize> {
        if a == b {
            return None;
        }
        let len = self.symbols.len();
        let visible = self
            .horizon
            .min(len.saturating_sub(a))
            .min(len.saturating_sub(b));
        (0..visible).find(|&d| self.symbols[a + d] != self.symbols[b + d])
    }
}

impl MetricSpace for ShiftSpace {
    type State = usize;

    fn distance(&self, a: &usize, b: &usize) -> f64 {
        match self.first_disagreement(*a, *b) {
            Some(k) => 0.5f64.powi(k as i32),
            None => 0.0,
        }
    }

    fn diameter_hint(&self) -> Option<f64> {
        Some(1.0)
    }

    fn is_valid(&self, state: &usize) -> bool {
        *state < self.symbols.len()
    }

    fn structure<'a>(&'a self, states: &'a [usize]) -> Structure<'a> {
        Structure::Shift {
            space: self,
            positions: states,
        }
    }
}

/// A finite segment of an orbit together with the metric of its space.
#[derive(Debug)]
pub struct Trajectory<M: MetricSpace> {
    states: Vec<M::State>,
    space: Arc<M>,
    label: String,
}

impl<M: MetricSpace> Clone for Trajectory<M> {
    fn clone(&self) -> Self {
        Self {
            states: self.states.clone(),
            space: Arc::clone(&self.space),
            label: self.label.clone(),
        }
    }
}

impl<M: MetricSpace> Trajectory<M> {
    pub fn new(states: Vec<M::State>, space: Arc<M>, label: impl Into<String>) -> Self {
        Self {
            states,
            space,
            label: label.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[M::State] {
        &self.states
    }

    pub fn space(&self) -> &M {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<M> {
        &self.space
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn get(&self, i: usize) -> Result<&M::State> {
        self.states.get(i).ok_or(Error::WindowExceedsTrajectory {
            needed: i,
            len: self.states.len(),
        })
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.space.distance(&self.states[i], &self.states[j])
    }

    /// The orbit of `f^offset(x)` under `f^step`: states `offset, offset + step, ...`.
    pub fn subsample(&self, step: usize, offset: usize) -> Result<Self> {
        if step == 0 {
            return Err(invalid("subsample step must be at least 1"));
        }
        if offset >= self.states.len() {
            return Err(Error::WindowExceedsTrajectory {
                needed: offset,
                len: self.states.len(),
            });
        }
        let states = self.states[offset..]
            .iter()
            .step_by(step)
            .cloned()
            .collect();
        Ok(Self {
            states,
            space: Arc::clone(&self.space),
            label: format!("{}[{offset}::{step}]", self.label),
        })
    }

    /// Drops the first `h` states: the trajectory of `f^h(x)`.
    pub fn advance(&self, h: usize) -> Result<Self> {
        self.subsample(1, h)
    }

    /// Max pairwise distance over the stored states; a lower bound on the
    /// diameter of the space.
    pub fn diameter_estimate(&self) -> f64 {
        diameter_estimate(self)
    }
}

/// Builds `(x0, f(x0), ..., f^{n-1}(x0))`.
pub fn orbit_segment<M, F>(
    map: F,
    x0: M::State,
    n: usize,
    space: Arc<M>,
    label: impl Into<String>,
) -> Result<Trajectory<M>>
where
    M: MetricSpace,
    F: Fn(&M::State) -> M::State,
{
    if n == 0 {
        return Err(invalid("orbit length must be at least 1"));
    }
    if !space.is_valid(&x0) {
        return Err(Error::OrbitEscaped { index: 0 });
    }
    let mut states = Vec::with_capacity(n);
    states.push(x0);
    for i in 1..n {
        let next = map(&states[i - 1]);
        if !space.is_valid(&next) {
            return Err(Error::OrbitEscaped { index: i });
        }
        states.push(next);
    }
    Ok(Trajectory::new(states, space, label))
}

pub fn diameter_estimate<M: MetricSpace>(traj: &Trajectory<M>) -> f64 {
    match traj.space.structure(&traj.states) {
        Structure::RealLine(xs) => {
            let (lo, hi) = xs
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                    (lo.min(x), hi.max(x))
                });
            if xs.is_empty() {
                0.0
            } else {
                hi - lo
            }
        }
        _ => {
            let n = traj.states.len();
            let mut best = 0.0f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    best = best.max(traj.distance(i, j));
                }
            }
            best
        }
    }
}

/// Strictly decreasing list of positive radii.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonGrid {
    values: Vec<f64>,
}

impl EpsilonGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("epsilon grid is empty"));
        }
        if values.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(invalid("epsilon grid values must be positive and finite"));
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("epsilon grid must be strictly decreasing"));
        }
        Ok(Self { values })
    }

    /// `2^-from, 2^-(from+1), ..., 2^-to`.
    pub fn dyadic(from: u32, to: u32) -> Result<Self> {
        if to < from {
            return Err(invalid("dyadic grid needs from <= to"));
        }
        Self::new((from..=to).map(|k| 0.5f64.powi(k as i32)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
