//! Interval maps, Bowen spanning and separated counts, and topological
//! entropy estimates on a grid of initial points.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::Zero;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::correlation::{
    least_squares, local_correlation_entropy, plateau_select, EntropyConfig, EntropyEstimate,
};
use crate::error::{invalid, Error, Result};
use crate::space::{orbit_segment, EpsilonGrid, RealLine, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapKind {
    /// `x -> 2 min(x, 1 - x)` on `[0, 1]`.
    Tent,
    /// `x -> 1 - alpha x^2` on `[-1, 1]`.
    Logistic {
        alpha: f64,
    },
    /// Constant-slope zigzag on `[0, 1]` fixing both endpoints.
    Zigzag {
        slope: f64,
    },
    /// `f(0) = 0` and a rescaled zigzag of slope `s_n` on each
    /// `I_n = [1/(n+1), 1/n]`, `n <= pieces`; identity below `1/(pieces+1)`.
    CountablePiece {
        /// `None` for an infinite target.
        lambda: Option<f64>,
        pieces: usize,
        slopes: Vec<f64>,
    },
    Identity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalMapSpec {
    pub kind: MapKind,
    pub domain: (f64, f64),
}

const DOMAIN_TOL: f64 = 1e-12;

impl IntervalMapSpec {
    pub fn tent() -> Self {
        Self {
            kind: MapKind::Tent,
            domain: (0.0, 1.0),
        }
    }

    pub fn logistic(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(invalid(format!(
                "logistic parameter must lie in (0, 2], got {alpha}"
            )));
        }
        Ok(Self {
            kind: MapKind::Logistic { alpha },
            domain: (-1.0, 1.0),
        })
    }

    pub fn zigzag(slope: f64) -> Result<Self> {
        if !(slope >= 1.0 && slope.is_finite()) {
            return Err(invalid(format!(
                "zigzag slope must be finite and >= 1, got {slope}"
            )));
        }
        Ok(Self {
            kind: MapKind::Zigzag { slope },
            domain: (0.0, 1.0),
        })
    }

    pub fn identity(lo: f64, hi: f64) -> Result<Self> {
        if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
            return Err(invalid("empty domain"));
        }
        Ok(Self {
            kind: MapKind::Identity,
            domain: (lo, hi),
        })
    }

    pub fn apply(&self, x: f64) -> f64 {
        match &self.kind {
            MapKind::Tent => 2.0 * x.min(1.0 - x),
            MapKind::Logistic { alpha } => 1.0 - alpha * x * x,
            MapKind::Zigzag { slope } => zigzag(*slope, x),
            MapKind::CountablePiece { pieces, slopes, .. } => countable_piece(slopes, *pieces, x),
            MapKind::Identity => x,
        }
    }

    /// Checks that a uniform sample of the domain is mapped into the domain.
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.domain;
        let samples = 10_001;
        for i in 0..samples {
            let x = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
            let y = self.apply(x);
            if !(y >= lo - DOMAIN_TOL && y <= hi + DOMAIN_TOL) {
                return Err(invalid(format!(
                    "map sends {x} to {y}, outside [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    pub fn orbit(&self, x0: f64, len: usize) -> Result<Trajectory<RealLine>> {
        let (lo, hi) = self.domain;
        if !(x0 >= lo && x0 <= hi) {
            return Err(invalid(format!("initial point {x0} outside [{lo}, {hi}]")));
        }
        orbit_segment(
            |x: &f64| self.apply(*x),
            x0,
            len,
            Arc::new(RealLine::interval(lo, hi)),
            format!("{self}({x0})"),
        )
    }

    /// The `n`-th piece of a countable-piece map, rescaled to `[0, 1]`.
    pub fn piece(&self, n: usize) -> Result<IntervalMapSpec> {
        match &self.kind {
            MapKind::CountablePiece { slopes, .. } if n >= 1 && n <= slopes.len() => {
                IntervalMapSpec::zigzag(slopes[n - 1])
            }
            _ => Err(invalid(format!("no piece {n}"))),
        }
    }

    /// `log` of the slope for constant-slope maps; `None` otherwise.
    pub fn entropy_formula(&self) -> Option<f64> {
        match &self.kind {
            MapKind::Tent => Some(std::f64::consts::LN_2),
            MapKind::Zigzag { slope } => Some(slope.ln()),
            MapKind::Identity => Some(0.0),
            MapKind::CountablePiece { slopes, .. } => slopes
                .iter()
                .copied()
                .fold(None, |m: Option<f64>, s| Some(m.map_or(s, |m| m.max(s))))
                .map(f64::ln),
            MapKind::Logistic { .. } => None,
        }
    }
}

impl fmt::Display for IntervalMapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MapKind::Tent => write!(f, "tent"),
            MapKind::Logistic { alpha } => write!(f, "logistic:{alpha}"),
            MapKind::Zigzag { slope } => write!(f, "zigzag:{slope}"),
            MapKind::CountablePiece { lambda, pieces, .. } => match lambda {
                Some(l) => write!(f, "countable_piece:{l}:{pieces}"),
                None => write!(f, "countable_piece:inf:{pieces}"),
            },
            MapKind::Identity => write!(f, "identity"),
        }
    }
}

/// `tent`, `logistic` (period-3 parameter), `logistic:A`, `zigzag:S`,
/// `countable_piece:L:N` (`L` may be `inf`) or `identity`.
impl FromStr for IntervalMapSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| invalid(format!("cannot parse number {v:?} in map spec {s:?}")))
        };
        match parts.as_slice() {
            ["tent"] => Ok(Self::tent()),
            ["logistic"] => Self::logistic(logistic_period3_alpha()),
            ["logistic", a] => Self::logistic(num(a)?),
            ["zigzag", v] => Self::zigzag(num(v)?),
            ["identity"] => Self::identity(0.0, 1.0),
            ["countable_piece", l, n] => {
                let lambda = if *l == "inf" { f64::INFINITY } else { num(l)? };
                let pieces = n
                    .parse()
                    .map_err(|_| invalid(format!("cannot parse piece count {n:?}")))?;
                countable_piece_map(lambda, pieces)
            }
            _ => Err(invalid(format!("unknown map spec {s:?}"))),
        }
    }
}

/// Constant-slope zigzag: a full rising lap `0 -> 1`, then alternating laps
/// between `1` and `c` ending at `1`, with `L` (odd) laps in total.
fn zigzag(slope: f64, t: f64) -> f64 {
    if slope <= 1.0 {
        return t;
    }
    let mut laps = slope.ceil() as usize;
    if laps.is_multiple_of(2) {
        laps += 1;
    }
    let h = (slope - 1.0) / (laps - 1) as f64;
    let first = 1.0 / slope;
    if t <= first {
        return slope * t;
    }
    let width = h / slope;
    let u = t - first;
    let k = ((u / width).floor() as usize).min(laps - 2);
    let r = u - k as f64 * width;
    let y = if k.is_multiple_of(2) {
        1.0 - slope * r
    } else {
        1.0 - h + slope * r
    };
    y.clamp(0.0, 1.0)
}

fn countable_piece(slopes: &[f64], pieces: usize, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let n = ((1.0 / x).floor() as usize).max(1);
    if n > pieces {
        return x;
    }
    let (a, b) = (1.0 / (n + 1) as f64, 1.0 / n as f64);
    let t = ((x - a) / (b - a)).clamp(0.0, 1.0);
    (a + (b - a) * zigzag(slopes[n - 1], t)).clamp(a, b)
}

/// Root of `alpha^3 - 2 alpha^2 + alpha - 1` in `(1, 2)`, i.e. of
/// `1 - alpha (1 - alpha)^2`, where `0` is 3-periodic for `1 - alpha x^2`.
pub fn logistic_period3_alpha() -> f64 {
    let g = |a: f64| ((a - 2.0) * a + 1.0) * a - 1.0;
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Slopes `s_n = exp(lambda (1 - 1/(n+1)))`, or `s_n = n + 1` for an infinite
/// target.
pub fn countable_piece_map(lambda_target: f64, piece_count: usize) -> Result<IntervalMapSpec> {
    if lambda_target.is_nan() || lambda_target <= 0.0 {
        return Err(invalid(format!(
            "lambda target must be positive, got {lambda_target}"
        )));
    }
    if piece_count == 0 {
        return Err(invalid("piece count must be at least 1"));
    }
    let finite = lambda_target.is_finite();
    let slopes = (1..=piece_count)
        .map(|n| {
            if finite {
                (lambda_target * (1.0 - 1.0 / (n + 1) as f64)).exp()
            } else {
                (n + 1) as f64
            }
        })
        .collect();
    Ok(IntervalMapSpec {
        kind: MapKind::CountablePiece {
            lambda: finite.then_some(lambda_target),
            pieces: piece_count,
            slopes,
        },
        domain: (0.0, 1.0),
    })
}

/// A tent-map orbit read off a random binary expansion.
///
/// With `b_0 = 0` and `b_1 b_2 ..` the bits of `x_0`, the `t`-th iterate is
/// `x_t = sum_i (b_{t+i} xor b_t) 2^-i`, so every state is exact up to the
/// 53-bit truncation and floating point never collapses the orbit onto `0`.
pub fn tent_orbit_from_bits(seed: u64, len: usize) -> Result<Trajectory<RealLine>> {
    if len == 0 {
        return Err(invalid("orbit length must be at least 1"));
    }
    const BITS: u32 = 53;
    let mask = (1u64 << BITS) - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut word = 0u64;
    let mut left = 0;
    let mut next_bit = move || {
        if left == 0 {
            word = rng.next_u64();
            left = 64;
        }
        left -= 1;
        (word >> left) & 1
    };
    let mut window = 0u64;
    for _ in 0..BITS {
        window = window << 1 | next_bit();
    }
    let scale = 2f64.powi(-(BITS as i32));
    let mut prev = 0u64;
    let mut states = Vec::with_capacity(len);
    for _ in 0..len {
        let flip = if prev == 1 { mask } else { 0 };
        states.push((window ^ flip) as f64 * scale);
        prev = window >> (BITS - 1);
        window = (window << 1 & mask) | next_bit();
    }
    Ok(Trajectory::new(
        states,
        Arc::new(RealLine::interval(0.0, 1.0)),
        format!("tent(bits, seed={seed})"),
    ))
}

/// Greedy `eps`-net over `points` in the given order: a point becomes a new
/// center unless an existing center lies within the closed `eps`-ball. The
/// count bounds the minimal spanning number from above.
pub fn spanning_number<T, D>(points: &[T], eps: D, dist: impl Fn(&T, &T) -> D) -> Result<usize>
where
    D: PartialOrd + Zero,
{
    check_points(points.len(), &eps)?;
    let mut centers: Vec<&T> = Vec::new();
    for p in points {
        if !centers.iter().any(|c| dist(c, p) <= eps) {
            centers.push(p);
        }
    }
    Ok(centers.len())
}

/// Greedy maximal `eps`-separated subset (pairwise distances `> eps`) in the
/// given order; a lower bound on the maximal separated number.
pub fn separated_number<T, D>(points: &[T], eps: D, dist: impl Fn(&T, &T) -> D) -> Result<usize>
where
    D: PartialOrd + Zero,
{
    check_points(points.len(), &eps)?;
    let mut chosen: Vec<&T> = Vec::new();
    for p in points {
        if chosen.iter().all(|c| dist(c, p) > eps) {
            chosen.push(p);
        }
    }
    Ok(chosen.len())
}

fn check_points<D: PartialOrd + Zero>(len: usize, eps: &D) -> Result<()> {
    if len == 0 {
        return Err(invalid("point list is empty"));
    }
    if eps.partial_cmp(&D::zero()) != Some(std::cmp::Ordering::Greater) {
        return Err(invalid("radius must be positive"));
    }
    Ok(())
}

/// Greedy separated count of Bowen windows listed in increasing order of
/// their first coordinate; same result as [`separated_number`] with the
/// Bowen distance, skipping chosen windows already `eps`-apart at time 0.
fn separated_windows(windows: &[Vec<f64>], eps: f64) -> usize {
    let mut chosen: Vec<&[f64]> = Vec::new();
    'points: for w in windows {
        for c in chosen.iter().rev() {
            if w[0] - c[0] > eps {
                break;
            }
            if w.iter().zip(c.iter()).all(|(a, b)| (a - b).abs() <= eps) {
                continue 'points;
            }
        }
        chosen.push(w);
    }
    chosen.len()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatedCount {
    pub eps: f64,
    pub m: usize,
    pub count: usize,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopologicalEntropyEstimate {
    pub map: String,
    pub value: f64,
    pub per_eps_slopes: Vec<(f64, f64)>,
    pub chosen_eps: f64,
    pub plateau: bool,
    pub grid_size: usize,
    pub counts: Vec<SeparatedCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopologicalConfig {
    pub grid_size: usize,
    pub m_list: Vec<usize>,
    pub eps_list: Vec<f64>,
    /// Counts above this fraction of the grid are excluded from the fits.
    pub saturation: f64,
    pub rel_tol: f64,
}

impl Default for TopologicalConfig {
    fn default() -> Self {
        Self {
            grid_size: 4000,
            m_list: (1..=12).collect(),
            eps_list: vec![0.25, 0.125, 0.0625],
            saturation: 0.25,
            rel_tol: 0.05,
        }
    }
}

/// Slope in `m` of `log s_m(eps)`, the greedy `(m, eps)`-separated count of
/// the grid `lo + (i + 1/2)(hi - lo)/G`, per radius, with the plateau rule
/// across radii. Counts in saturation (too close to `G`) are dropped.
pub fn topological_entropy_estimate(
    spec: &IntervalMapSpec,
    cfg: &TopologicalConfig,
) -> Result<TopologicalEntropyEstimate> {
    if cfg.grid_size < 1000 {
        return Err(invalid("grid size must be at least 1000"));
    }
    let m_max = *cfg
        .m_list
        .iter()
        .max()
        .ok_or_else(|| invalid("m list is empty"))?;
    if cfg.m_list.contains(&0) {
        return Err(invalid("m values must be positive"));
    }
    let mut eps_list = cfg.eps_list.clone();
    EpsilonGrid::new(eps_list.clone())?;
    eps_list.sort_by(|a, b| b.total_cmp(a));
    let (lo, hi) = spec.domain;
    let g = cfg.grid_size;
    let orbits: Vec<Vec<f64>> = (0..g)
        .into_par_iter()
        .map(|i| {
            let mut x = lo + (i as f64 + 0.5) * (hi - lo) / g as f64;
            let mut w = Vec::with_capacity(m_max);
            for _ in 0..m_max {
                w.push(x);
                x = spec.apply(x);
            }
            w
        })
        .collect();
    let cells: Vec<(f64, usize)> = eps_list
        .iter()
        .flat_map(|&e| cfg.m_list.iter().map(move |&m| (e, m)))
        .collect();
    let counts: Vec<SeparatedCount> = cells
        .par_iter()
        .map(|&(eps, m)| {
            let windows: Vec<Vec<f64>> = orbits.iter().map(|o| o[..m].to_vec()).collect();
            let count = separated_windows(&windows, eps);
            SeparatedCount {
                eps,
                m,
                count,
                saturated: count as f64 > cfg.saturation * g as f64,
            }
        })
        .collect();
    let mut per_eps_slopes = Vec::new();
    for &eps in &eps_list {
        let used: Vec<&SeparatedCount> = counts
            .iter()
            .filter(|c| c.eps == eps && !c.saturated)
            .collect();
        if used.len() < 3 {
            continue;
        }
        let x: Vec<f64> = used.iter().map(|c| c.m as f64).collect();
        let y: Vec<f64> = used.iter().map(|c| (c.count as f64).ln()).collect();
        per_eps_slopes.push((eps, least_squares(&x, &y)?.0));
    }
    let (k, plateau) = plateau_select(&per_eps_slopes, cfg.rel_tol).ok_or_else(|| {
        Error::DegenerateFit("no radius has three unsaturated counts; enlarge the grid".into())
    })?;
    Ok(TopologicalEntropyEstimate {
        map: spec.to_string(),
        value: per_eps_slopes[k].1.max(0.0),
        chosen_eps: per_eps_slopes[k].0,
        plateau,
        per_eps_slopes,
        grid_size: g,
        counts,
    })
}

/// Estimator settings for the local entropy of real orbits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalConfig {
    pub n: usize,
    pub eps_from: u32,
    pub eps_to: u32,
    pub m_list: Vec<usize>,
    pub estimator: EntropyConfig,
}

impl Default for LocalConfig {
    fn default() -> Self {
        Self {
            n: 10_000,
            eps_from: 3,
            eps_to: 7,
            m_list: (1..=10).collect(),
            estimator: EntropyConfig::default(),
        }
    }
}

impl LocalConfig {
    fn estimate(&self, traj: &Trajectory<RealLine>, scale: f64) -> Result<EntropyEstimate> {
        let grid = EpsilonGrid::new(
            (self.eps_from..=self.eps_to)
                .map(|k| scale * 2f64.powi(-(k as i32)))
                .collect(),
        )?;
        Ok(local_correlation_entropy(traj, &grid, &self.m_list, self.n, &self.estimator)?.0)
    }

    fn orbit_len(&self) -> usize {
        self.n + self.m_list.iter().copied().max().unwrap_or(1) - 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointEstimate {
    pub label: String,
    pub x0: f64,
    pub estimate: f64,
    pub chosen_eps: f64,
    pub plateau: bool,
}

fn point_estimate(
    traj: &Trajectory<RealLine>,
    cfg: &LocalConfig,
    scale: f64,
) -> Result<PointEstimate> {
    let est = cfg.estimate(traj, scale)?;
    Ok(PointEstimate {
        label: traj.label().to_string(),
        x0: traj.states()[0],
        estimate: est.value,
        chosen_eps: est.diagnostics.chosen_eps,
        plateau: est.diagnostics.plateau,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremBConfig {
    pub points: usize,
    pub seed: u64,
    pub local: LocalConfig,
    pub topological: TopologicalConfig,
    pub top_band: (f64, f64),
    pub local_band: (f64, f64),
    pub min_fraction: f64,
    /// Allowed excess of a local estimate over the topological estimate.
    pub slack: f64,
}

impl Default for TheoremBConfig {
    fn default() -> Self {
        Self {
            points: 20,
            seed: 2024,
            local: LocalConfig::default(),
            topological: TopologicalConfig::default(),
            top_band: (0.6, 0.8),
            local_band: (0.55, 0.80),
            min_fraction: 0.9,
            slack: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremBReport {
    pub top: TopologicalEntropyEstimate,
    pub top_in_band: bool,
    pub points: Vec<PointEstimate>,
    /// Fraction of points whose estimate lies in `local_band`.
    pub fraction_in_band: f64,
    pub fraction_above: f64,
    /// Every local estimate is at most the topological estimate plus slack.
    pub upper_bound_holds: bool,
    pub passed: bool,
}

/// Tent map: topological entropy estimate and local estimates at `points`
/// random initial points (drawn from per-point seeds `seed + i`).
pub fn theorem_b_report(cfg: &TheoremBConfig) -> Result<TheoremBReport> {
    if cfg.points == 0 {
        return Err(invalid("need at least one sample point"));
    }
    let spec = IntervalMapSpec::tent();
    let top = topological_entropy_estimate(&spec, &cfg.topological)?;
    let points: Vec<PointEstimate> = (0..cfg.points as u64)
        .into_par_iter()
        .map(|i| {
            let traj = tent_orbit_from_bits(cfg.seed.wrapping_add(i), cfg.local.orbit_len())?;
            point_estimate(&traj, &cfg.local, 1.0)
        })
        .collect::<Result<_>>()?;
    let count = points.len() as f64;
    let (blo, bhi) = cfg.local_band;
    let fraction_in_band = points
        .iter()
        .filter(|p| p.estimate >= blo && p.estimate <= bhi)
        .count() as f64
        / count;
    let fraction_above = points.iter().filter(|p| p.estimate > blo).count() as f64 / count;
    let upper_bound_holds = points.iter().all(|p| p.estimate <= top.value + cfg.slack);
    let top_in_band = top.value >= cfg.top_band.0 && top.value <= cfg.top_band.1;
    Ok(TheoremBReport {
        passed: top_in_band && fraction_above >= cfg.min_fraction && upper_bound_holds,
        top,
        top_in_band,
        points,
        fraction_in_band,
        fraction_above,
        upper_bound_holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogisticConfig {
    pub points: usize,
    pub seed: u64,
    pub local: LocalConfig,
    pub topological: TopologicalConfig,
    pub ceiling: f64,
    pub slack: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            points: 5,
            seed: 2024,
            local: LocalConfig::default(),
            topological: TopologicalConfig::default(),
            ceiling: 0.05,
            slack: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttractedPoint {
    pub estimate: PointEstimate,
    /// Distance of the last state to the orbit of `0`.
    pub cycle_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogisticReport {
    pub alpha: f64,
    /// `|1 - alpha (1 - alpha)^2|`.
    pub residual: f64,
    /// `|f^3(0)|`.
    pub cycle_error: f64,
    pub top: TopologicalEntropyEstimate,
    pub points: Vec<AttractedPoint>,
    pub upper_bound_holds: bool,
    pub passed: bool,
}

/// `1 - alpha x^2` at the period-3 parameter: random points are attracted by
/// the orbit of `0` and have zero local entropy, while the grid estimate of
/// the topological entropy is positive.
pub fn logistic_report(cfg: &LogisticConfig) -> Result<LogisticReport> {
    let alpha = logistic_period3_alpha();
    let spec = IntervalMapSpec::logistic(alpha)?;
    let residual = (1.0 - alpha * (1.0 - alpha).powi(2)).abs();
    let cycle = [0.0, spec.apply(0.0), spec.apply(spec.apply(0.0))];
    let cycle_error = spec.apply(cycle[2]).abs();
    let top = topological_entropy_estimate(&spec, &cfg.topological)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let starts: Vec<f64> = (0..cfg.points).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let points: Vec<AttractedPoint> = starts
        .par_iter()
        .map(|&x0| {
            let traj = spec.orbit(x0, cfg.local.orbit_len())?;
            let last = *traj.states().last().unwrap();
            let cycle_distance = cycle
                .iter()
                .map(|c| (c - last).abs())
                .fold(f64::INFINITY, f64::min);
            Ok(AttractedPoint {
                estimate: point_estimate(&traj, &cfg.local, 2.0)?,
                cycle_distance,
            })
        })
        .collect::<Result<_>>()?;
    let upper_bound_holds = points
        .iter()
        .all(|p| p.estimate.estimate <= top.value + cfg.slack);
    let passed = residual < 1e-10
        && cycle_error < 1e-8
        && top.value > 0.0
        && upper_bound_holds
        && points.iter().all(|p| p.estimate.estimate < cfg.ceiling);
    Ok(LogisticReport {
        alpha,
        residual,
        cycle_error,
        top,
        points,
        upper_bound_holds,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PieceRow {
    pub n: usize,
    /// `log s_n`, the entropy of the `n`-th piece.
    pub piece_entropy: f64,
    pub piece_estimate: f64,
    pub local: PointEstimate,
    pub below_target: bool,
    pub below_piece: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountablePieceReport {
    pub lambda: Option<f64>,
    pub pieces: Vec<PieceRow>,
    /// `max_{n <= N} piece_estimate` for `N = 1, 2, ..`.
    pub running_max: Vec<f64>,
    pub trend_nondecreasing: bool,
    pub passed: bool,
}

/// Local estimates at a random point of each piece `I_n` (radii scaled to
/// the piece width) against the piece entropy `log s_n` and the target.
pub fn countable_piece_report(
    lambda: f64,
    pieces: usize,
    seed: u64,
    local: &LocalConfig,
    topological: &TopologicalConfig,
    slack: f64,
) -> Result<CountablePieceReport> {
    let spec = countable_piece_map(lambda, pieces)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<f64> = (0..pieces).map(|_| rng.gen::<f64>()).collect();
    let rows: Vec<PieceRow> = (1..=pieces)
        .into_par_iter()
        .map(|n| {
            let piece = spec.piece(n)?;
            let piece_entropy = piece.entropy_formula().unwrap();
            let piece_estimate = topological_entropy_estimate(&piece, topological)?.value;
            let (a, b) = (1.0 / (n + 1) as f64, 1.0 / n as f64);
            let x0 = a + (b - a) * (0.1 + 0.8 * starts[n - 1]);
            let traj = spec.orbit(x0, local.orbit_len())?;
            let est = point_estimate(&traj, local, b - a)?;
            Ok(PieceRow {
                n,
                piece_entropy,
                piece_estimate,
                below_target: est.estimate < lambda,
                below_piece: est.estimate <= piece_entropy + slack,
                local: est,
            })
        })
        .collect::<Result<_>>()?;
    let running_max: Vec<f64> = rows
        .iter()
        .scan(f64::NEG_INFINITY, |m, r| {
            *m = m.max(r.piece_estimate);
            Some(*m)
        })
        .collect();
    let trend_nondecreasing = running_max.windows(2).all(|w| w[1] >= w[0]);
    Ok(CountablePieceReport {
        lambda: lambda.is_finite().then_some(lambda),
        passed: trend_nondecreasing && rows.iter().all(|r| r.below_target && r.below_piece),
        pieces: rows,
        running_max,
        trend_nondecreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use num_traits::Signed;

    #[test]
    fn alpha_root() {
        let a = logistic_period3_alpha();
        assert!(a > 1.0 && a < 2.0);
        assert!((1.0 - a * (1.0 - a).powi(2)).abs() < 1e-10);
        assert!((a - 1.754_877_666).abs() < 1e-9);
        // sign change of the cubic around the root
        let g = |a: f64| a * a * a - 2.0 * a * a + a - 1.0;
        assert!(g(1.7) < 0.0 && g(1.8) > 0.0);
        let f = IntervalMapSpec::logistic(a).unwrap();
        let x3 = f.apply(f.apply(f.apply(0.0)));
        assert!(x3.abs() < 1e-8);
        assert_eq!(f.apply(0.0), 1.0);
    }

    #[test]
    fn zigzag_shape() {
        for s in [1.3, 2.0, 2.5, 3.0, 4.2, 6.0] {
            assert_eq!(zigzag(s, 0.0), 0.0);
            assert!((zigzag(s, 1.0) - 1.0).abs() < 1e-12, "{s}");
            // constant slope away from the turning points
            let mut max_jump: f64 = 0.0;
            let k = 100_000;
            for i in 0..k {
                let (a, b) = (i as f64 / k as f64, (i + 1) as f64 / k as f64);
                max_jump = max_jump.max((zigzag(s, b) - zigzag(s, a)).abs() * k as f64);
            }
            assert!((max_jump - s).abs() < 1e-6, "{s}: {max_jump}");
        }
        let two = IntervalMapSpec::zigzag(2.0).unwrap();
        assert_eq!(two.apply(0.5), 1.0);
        assert_eq!(two.apply(0.75), 0.5);
    }

    /// Laps of `g^k`, counted as monotone runs on a fine grid.
    fn laps(spec: &IntervalMapSpec, k: usize, grid: usize) -> usize {
        let vals: Vec<f64> = (0..=grid)
            .map(|i| {
                let mut x = i as f64 / grid as f64;
                for _ in 0..k {
                    x = spec.apply(x);
                }
                x
            })
            .collect();
        let mut laps = 1;
        let mut dir = 0i8;
        for w in vals.windows(2) {
            let d = if w[1] > w[0] {
                1
            } else if w[1] < w[0] {
                -1
            } else {
                0
            };
            if d != 0 && dir != 0 && d != dir {
                laps += 1;
            }
            if d != 0 {
                dir = d;
            }
        }
        laps
    }

    #[test]
    fn lap_growth_matches_log_slope() {
        // lap-number growth rate equals the topological entropy
        for s in [2.0, 2.5] {
            let spec = IntervalMapSpec::zigzag(s).unwrap();
            let (a, b) = (laps(&spec, 9, 1 << 21), laps(&spec, 10, 1 << 21));
            let rate = (b as f64 / a as f64).ln();
            assert!((rate - s.ln()).abs() < 0.05, "{s}: {a} {b} {rate}");
        }
        let tent = IntervalMapSpec::tent();
        assert_eq!(laps(&tent, 10, 1 << 20), 1024);
    }

    #[test]
    fn countable_piece_basics() {
        let f = countable_piece_map(1.0, 6).unwrap();
        assert_eq!(f.apply(0.0), 0.0);
        for n in 1..=6 {
            let e = 1.0 / n as f64;
            assert!((f.apply(e) - e).abs() < 1e-12, "{n}");
        }
        f.validate().unwrap();
        let MapKind::CountablePiece { slopes, .. } = &f.kind else {
            panic!()
        };
        assert!((slopes[0] - 0.5f64.exp()).abs() < 1e-15);
        assert!(slopes.windows(2).all(|w| w[1] > w[0]));
        assert!(slopes.iter().all(|s| s.ln() < 1.0));
        assert!(countable_piece_map(0.0, 3).is_err());
        assert!(countable_piece_map(-1.0, 3).is_err());
        assert!(countable_piece_map(1.0, 0).is_err());
        let inf = countable_piece_map(f64::INFINITY, 4).unwrap();
        assert_eq!(inf.to_string(), "countable_piece:inf:4");
        inf.validate().unwrap();
        // stays inside its piece
        let traj = f.orbit(0.4, 2000).unwrap();
        assert!(traj
            .states()
            .iter()
            .all(|&x| (1.0 / 3.0 - 1e-12..=0.5 + 1e-12).contains(&x)));
    }

    #[test]
    fn spec_parsing() {
        for s in [
            "tent",
            "logistic:1.5",
            "zigzag:2.5",
            "identity",
            "countable_piece:1:5",
        ] {
            let spec: IntervalMapSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
            spec.validate().unwrap();
        }
        let l: IntervalMapSpec = "logistic".parse().unwrap();
        assert!(matches!(l.kind, MapKind::Logistic { alpha } if alpha == logistic_period3_alpha()));
        assert!("tent:2".parse::<IntervalMapSpec>().is_err());
        assert!("countable_piece:x:5".parse::<IntervalMapSpec>().is_err());
    }

    #[test]
    fn tent_bits_orbit_is_an_orbit() {
        let traj = tent_orbit_from_bits(5, 10_000).unwrap();
        let tent = IntervalMapSpec::tent();
        let xs = traj.states();
        for w in xs.windows(2) {
            assert!((tent.apply(w[0]) - w[1]).abs() <= 2f64.powi(-52));
        }
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 0.5).abs() < 0.02);
        assert_eq!(
            traj.states(),
            tent_orbit_from_bits(5, 10_000).unwrap().states()
        );
    }

    #[test]
    fn spanning_and_separated_examples() {
        let d = |a: &f64, b: &f64| (a - b).abs();
        assert_eq!(spanning_number(&[0.0, 0.1, 0.2], 0.25, d).unwrap(), 1);
        assert_eq!(spanning_number(&[0.0, 1.0], 0.4, d).unwrap(), 2);
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let r = spanning_number(&grid, 0.05, d).unwrap();
        assert!((6..=11).contains(&r));
        assert_eq!(separated_number(&[0.5], 0.1, d).unwrap(), 1);
        assert_eq!(separated_number(&[0.0, 1.0], 0.5, d).unwrap(), 2);
        assert!(spanning_number::<f64, f64>(&[], 0.1, d).is_err());
        assert!(separated_number(&[0.0], 0.0, d).is_err());
    }

    #[test]
    fn separated_strict_inequality_in_exact_arithmetic() {
        let pts: Vec<Ratio<i64>> = [0, 3, 6, 9].iter().map(|&v| Ratio::new(v, 10)).collect();
        let d = |a: &Ratio<i64>, b: &Ratio<i64>| (a - b).abs();
        assert_eq!(separated_number(&pts, Ratio::new(3, 10), d).unwrap(), 2);
        // 0.9 - 0.6 rounds above 0.3 in binary floating point
        let fl = [0.0, 0.3, 0.6, 0.9];
        assert_eq!(
            separated_number(&fl, 0.3, |a: &f64, b: &f64| (a - b).abs()).unwrap(),
            3
        );
    }

    #[test]
    fn window_count_matches_generic() {
        let tent = IntervalMapSpec::tent();
        let windows: Vec<Vec<f64>> = (0..1500)
            .map(|i| {
                let mut x = (i as f64 + 0.5) / 1500.0;
                (0..6)
                    .map(|_| {
                        let v = x;
                        x = tent.apply(x);
                        v
                    })
                    .collect()
            })
            .collect();
        let bowen = |a: &Vec<f64>, b: &Vec<f64>| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
        };
        for eps in [0.3, 0.1, 0.02] {
            assert_eq!(
                separated_windows(&windows, eps),
                separated_number(&windows, eps, bowen).unwrap()
            );
        }
    }

    #[test]
    fn topological_estimates() {
        let cfg = TopologicalConfig::default();
        let tent = topological_entropy_estimate(&IntervalMapSpec::tent(), &cfg).unwrap();
        assert!((0.6..=0.8).contains(&tent.value), "{tent:?}");
        let id = topological_entropy_estimate(&IntervalMapSpec::identity(0.0, 1.0).unwrap(), &cfg)
            .unwrap();
        assert_eq!(id.value, 0.0);
        let lg = IntervalMapSpec::logistic(logistic_period3_alpha()).unwrap();
        let lg = topological_entropy_estimate(&lg, &cfg).unwrap();
        assert!(lg.value > 0.0, "{lg:?}");
        let z = topological_entropy_estimate(&IntervalMapSpec::zigzag(2.5).unwrap(), &cfg).unwrap();
        assert!((z.value - 2.5f64.ln()).abs() < 0.15, "{z:?}");
        let small = TopologicalConfig {
            grid_size: 10,
            ..cfg
        };
        assert!(topological_entropy_estimate(&IntervalMapSpec::tent(), &small).is_err());
    }

    #[test]
    fn tent_points_near_log_two() {
        let cfg = TheoremBConfig {
            points: 4,
            ..TheoremBConfig::default()
        };
        let rep = theorem_b_report(&cfg).unwrap();
        assert!(rep.passed, "{rep:?}");
        for p in &rep.points {
            assert!((p.estimate - std::f64::consts::LN_2).abs() < 0.05, "{p:?}");
        }
    }

    #[test]
    fn logistic_points_attracted() {
        let cfg = LogisticConfig {
            points: 3,
            ..LogisticConfig::default()
        };
        let rep = logistic_report(&cfg).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.points.iter().all(|p| p.cycle_distance < 1e-8));
        // golden-mean entropy of the superstable 3-cycle map
        assert!((rep.top.value - 0.4812).abs() < 0.05);
    }

    #[test]
    fn countable_pieces_below_target() {
        let rep = countable_piece_report(
            1.0,
            3,
            7,
            &LocalConfig::default(),
            &TopologicalConfig::default(),
            0.1,
        )
        .unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.running_max.windows(2).all(|w| w[1] >= w[0]));
    }
}
