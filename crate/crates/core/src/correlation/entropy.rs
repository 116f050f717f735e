//! Local correlation entropy and dimension estimators.
//!
//! The double limit `eps -> 0`, `m -> inf` is replaced by a least-squares
//! slope over a finite `m` list for each radius, followed by a plateau rule
//! over the radius grid. Limits over `n` are max/min over the tail of a fixed
//! `n` schedule.

use rayon::prelude::*;
use serde::Serialize;

use super::fast::{pair_profile, CountingPath, PairProfile};
use super::{check_window, tail_start};
use crate::error::{invalid, Error, Result};
use crate::space::{EpsilonGrid, MetricSpace, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyConfig {
    /// Relative agreement between successive per-radius slopes.
    pub rel_tol: f64,
    /// Fraction of the `n` schedule treated as its tail.
    pub tail_fraction: f64,
    /// Number of schedule points; the schedule spans `[n/2, n]`.
    pub schedule_points: usize,
    /// A cell enters a fit only if every tail point has at least this many
    /// close pairs per window (`pairs / n`, the diagonal included). Below that
    /// the sum is dominated by the `1/n` diagonal floor.
    pub min_neighbors: f64,
    /// Entropies below this are too small to form ratios.
    pub noise_floor: f64,
    /// Use the accelerated counting paths when available.
    pub fast: bool,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        Self {
            rel_tol: 0.05,
            tail_fraction: 0.5,
            schedule_points: 5,
            min_neighbors: 10.0,
            noise_floor: 0.05,
            fast: true,
        }
    }
}

/// `schedule_points` values evenly spaced in `(n/2, n]`, ending at `n`.
pub fn default_schedule(n: usize, points: usize) -> Vec<usize> {
    let points = points.max(1);
    let mut out: Vec<usize> = (1..=points)
        .map(|s| n * (points + s) / (2 * points))
        .filter(|&v| v > 0)
        .collect();
    out.dedup();
    out
}

/// Unweighted least squares `y = slope * x + intercept`.
pub fn least_squares(x: &[f64], y: &[f64]) -> Result<(f64, f64, Vec<f64>)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "need at least two points, got {}",
            x.len().min(y.len())
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = x
        .iter()
        .zip(y)
        .map(|(a, b)| b - (slope * a + intercept))
        .collect();
    Ok((slope, intercept, residuals))
}

/// Plateau rule over slopes listed from the largest radius to the smallest.
///
/// Returns the index of the smallest radius whose slope is within `rel_tol`
/// (relative) of the preceding one, and whether such a radius exists; without
/// one the last index is returned.
pub fn plateau_select(slopes: &[(f64, f64)], rel_tol: f64) -> Option<(usize, bool)> {
    if slopes.is_empty() {
        return None;
    }
    let agreeing = (1..slopes.len())
        .rev()
        .find(|&k| (slopes[k].1 - slopes[k - 1].1).abs() <= rel_tol * slopes[k - 1].1.abs());
    Some(match agreeing {
        Some(k) => (k, true),
        None => (slopes.len() - 1, false),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub eps: f64,
    pub slope: f64,
    pub intercept: f64,
    pub abscissae: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// Tail limits of one `(eps, m)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellDiagnostics {
    pub eps: f64,
    pub m: usize,
    pub lower_c: f64,
    pub upper_c: f64,
    /// Smallest `pairs / n` over the tail.
    pub neighbors: f64,
    pub resolved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyDiagnostics {
    pub fits: Vec<SlopeFit>,
    /// Radii with fewer than three resolved `m` values.
    pub skipped_eps: Vec<f64>,
    pub chosen_eps: f64,
    pub plateau: bool,
    pub rel_tol: f64,
    pub schedule: Vec<usize>,
    pub path: CountingPath,
    pub cells: Vec<CellDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub per_eps_slopes: Vec<(f64, f64)>,
    pub m_range: (usize, usize),
    pub diagnostics: EntropyDiagnostics,
}

impl EntropyEstimate {
    /// Re-runs the plateau rule on `per_eps_slopes`; equals `value`.
    pub fn extrapolate(&self) -> f64 {
        plateau_select(&self.per_eps_slopes, self.diagnostics.rel_tol)
            .map_or(0.0, |(k, _)| self.per_eps_slopes[k].1.max(0.0))
    }
}

struct Cells {
    schedule: Vec<usize>,
    path: CountingPath,
    cells: Vec<CellDiagnostics>,
}

fn collect_cells<M: MetricSpace>(
    traj: &Trajectory<M>,
    eps_values: &[f64],
    m_list: &[usize],
    n: usize,
    cfg: &EntropyConfig,
) -> Result<Cells> {
    if !(cfg.tail_fraction > 0.0 && cfg.tail_fraction <= 1.0) {
        return Err(invalid("tail fraction must lie in (0, 1]"));
    }
    let m_max = *m_list
        .iter()
        .max()
        .ok_or_else(|| invalid("m list is empty"))?;
    check_window(traj, m_max, n)?;
    let schedule = default_schedule(n, cfg.schedule_points);
    let profiles: Vec<PairProfile> = eps_values
        .par_iter()
        .map(|&eps| pair_profile(traj, eps, m_max, &schedule, cfg.fast))
        .collect::<Result<_>>()?;
    let start = tail_start(schedule.len(), cfg.tail_fraction);
    let mut cells = Vec::new();
    for profile in &profiles {
        for &m in m_list {
            let sums: Vec<_> = (start..schedule.len()).map(|s| profile.sum(m, s)).collect();
            let values: Vec<f64> = sums.iter().map(|c| c.value()).collect();
            let neighbors = sums
                .iter()
                .map(|c| c.pairs as f64 / c.n as f64)
                .fold(f64::INFINITY, f64::min);
            cells.push(CellDiagnostics {
                eps: profile.eps,
                m,
                lower_c: values.iter().copied().fold(f64::INFINITY, f64::min),
                upper_c: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                neighbors,
                resolved: neighbors >= cfg.min_neighbors,
            });
        }
    }
    let path = profiles
        .iter()
        .map(|p| p.path)
        .find(|&p| p == CountingPath::NaiveFallback)
        .unwrap_or(profiles[0].path);
    Ok(Cells {
        schedule,
        path,
        cells,
    })
}

fn normalized_m_list(m_list: &[usize]) -> Result<Vec<usize>> {
    let mut ms = m_list.to_vec();
    ms.sort_unstable();
    ms.dedup();
    if ms.first() == Some(&0) {
        return Err(invalid("m values must be positive"));
    }
    if ms.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "entropy fit needs at least three distinct m values, got {}",
            ms.len()
        )));
    }
    Ok(ms)
}

/// Upper and lower local correlation entropy estimates at the orbit stored in
/// `traj`, using windows `i < n`.
pub fn local_correlation_entropy<M: MetricSpace>(
    traj: &Trajectory<M>,
    grid: &EpsilonGrid,
    m_list: &[usize],
    n: usize,
    cfg: &EntropyConfig,
) -> Result<(EntropyEstimate, EntropyEstimate)> {
    let ms = normalized_m_list(m_list)?;
    let cells = collect_cells(traj, grid.values(), &ms, n, cfg)?;
    let upper = entropy_from_cells(&cells, grid.values(), &ms, cfg, |c| c.lower_c)?;
    let lower = entropy_from_cells(&cells, grid.values(), &ms, cfg, |c| c.upper_c)?;
    Ok((upper, lower))
}

fn entropy_from_cells(
    cells: &Cells,
    eps_values: &[f64],
    ms: &[usize],
    cfg: &EntropyConfig,
    pick: impl Fn(&CellDiagnostics) -> f64,
) -> Result<EntropyEstimate> {
    let mut fits = Vec::new();
    let mut skipped = Vec::new();
    for (e, &eps) in eps_values.iter().enumerate() {
        let row = &cells.cells[e * ms.len()..(e + 1) * ms.len()];
        let used: Vec<&CellDiagnostics> = row.iter().filter(|c| c.resolved).collect();
        if used.len() < 3 {
            skipped.push(eps);
            continue;
        }
        let x: Vec<f64> = used.iter().map(|c| c.m as f64).collect();
        let y: Vec<f64> = used.iter().map(|c| -pick(c).ln()).collect();
        let (slope, intercept, residuals) = least_squares(&x, &y)?;
        fits.push(SlopeFit {
            eps,
            slope,
            intercept,
            abscissae: x,
            residuals,
        });
    }
    let per_eps_slopes: Vec<(f64, f64)> = fits.iter().map(|f| (f.eps, f.slope)).collect();
    let (k, plateau) = plateau_select(&per_eps_slopes, cfg.rel_tol).ok_or_else(|| {
        Error::DegenerateFit(
            "no radius has three m values with enough close pairs; increase n or the radii".into(),
        )
    })?;
    Ok(EntropyEstimate {
        value: per_eps_slopes[k].1.max(0.0),
        m_range: (ms[0], ms[ms.len() - 1]),
        diagnostics: EntropyDiagnostics {
            chosen_eps: per_eps_slopes[k].0,
            plateau,
            fits,
            skipped_eps: skipped,
            rel_tol: cfg.rel_tol,
            schedule: cells.schedule.clone(),
            path: cells.path,
            cells: cells.cells.clone(),
        },
        per_eps_slopes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub upper: f64,
    pub lower: f64,
    pub upper_fit: SlopeFit,
    pub lower_fit: SlopeFit,
    pub cells: Vec<CellDiagnostics>,
}

/// Slopes of `log c_1` against `log eps` over the resolved part of the grid.
pub fn local_correlation_dimension<M: MetricSpace>(
    traj: &Trajectory<M>,
    grid: &EpsilonGrid,
    n: usize,
    cfg: &EntropyConfig,
) -> Result<DimensionEstimate> {
    let v = grid.values();
    if v.len() < 3 || v[0] / v[v.len() - 1] < 4.0 {
        return Err(invalid(
            "dimension grid needs at least three radii spanning two octaves",
        ));
    }
    let cells = collect_cells(traj, v, &[1], n, cfg)?;
    let used: Vec<&CellDiagnostics> = cells.cells.iter().filter(|c| c.resolved).collect();
    if used.len() < 2 {
        return Err(Error::DegenerateFit(
            "fewer than two radii with enough close pairs".into(),
        ));
    }
    let x: Vec<f64> = used.iter().map(|c| c.eps.ln()).collect();
    let fit = |pick: fn(&CellDiagnostics) -> f64| -> Result<SlopeFit> {
        let y: Vec<f64> = used.iter().map(|c| pick(c).ln()).collect();
        let (slope, intercept, residuals) = least_squares(&x, &y)?;
        Ok(SlopeFit {
            eps: used[used.len() - 1].eps,
            slope,
            intercept,
            abscissae: x.clone(),
            residuals,
        })
    };
    let upper_fit = fit(|c| c.lower_c)?;
    let lower_fit = fit(|c| c.upper_c)?;
    Ok(DimensionEstimate {
        upper: upper_fit.slope.max(0.0),
        lower: lower_fit.slope.max(0.0),
        upper_fit,
        lower_fit,
        cells: cells.cells,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub k: usize,
    pub h_f: f64,
    pub h_fk: f64,
    pub ratio: Option<f64>,
    /// `false` when `h_f` is below the noise floor.
    pub reliable: bool,
    pub f_estimate: EntropyEstimate,
    pub fk_estimate: EntropyEstimate,
}

/// Upper entropy along the orbit under `f` and under `f^k` (every `k`-th
/// state of the same trajectory).
pub fn iterate_scaling_check<M: MetricSpace>(
    traj: &Trajectory<M>,
    k: usize,
    grid: &EpsilonGrid,
    m_list: &[usize],
    n: usize,
    cfg: &EntropyConfig,
) -> Result<ScalingReport> {
    if k == 0 {
        return Err(invalid("iterate k must be at least 1"));
    }
    let m_max = m_list.iter().copied().max().unwrap_or(0);
    let needed = k * (n + m_max);
    if traj.len() < needed {
        return Err(Error::WindowExceedsTrajectory {
            needed: needed - 1,
            len: traj.len(),
        });
    }
    let (f_estimate, _) = local_correlation_entropy(traj, grid, m_list, n, cfg)?;
    let sub = traj.subsample(k, 0)?;
    let (fk_estimate, _) = local_correlation_entropy(&sub, grid, m_list, n, cfg)?;
    let h_f = f_estimate.value;
    let h_fk = fk_estimate.value;
    Ok(ScalingReport {
        k,
        h_f,
        h_fk,
        ratio: (h_f > 0.0).then(|| h_fk / h_f),
        reliable: h_f >= cfg.noise_floor,
        f_estimate,
        fk_estimate,
    })
}
