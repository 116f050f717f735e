//! Bowen metrics and correlation sums.
//!
//! `C_m(x, n, eps)` is the fraction of ordered pairs `(i, j)`, `0 <= i, j < n`,
//! whose `m`-step Bowen distance is at most `eps` (closed balls, diagonal
//! included). Counts are kept as integers so that different counting paths can
//! be compared exactly.

mod entropy;
mod fast;

use std::collections::BTreeMap;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::space::{MetricSpace, Trajectory};

pub use entropy::{
    default_schedule, iterate_scaling_check, least_squares, local_correlation_dimension,
    local_correlation_entropy, plateau_select, CellDiagnostics, DimensionEstimate, EntropyConfig,
    EntropyDiagnostics, EntropyEstimate, ScalingReport, SlopeFit,
};
pub use fast::{correlation_sum_fast, pair_profile, CountingPath, PairProfile};

/// An exact correlation sum: `pairs / n^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CorrelationSum {
    pub pairs: u64,
    pub n: u64,
}

impl CorrelationSum {
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.pairs, self.n * self.n)
    }

    pub fn value(&self) -> f64 {
        self.pairs as f64 / (self.n as f64 * self.n as f64)
    }
}

/// `max_{0 <= h < m} rho(x_{i+h}, x_{j+h})`.
pub fn bowen_distance<M: MetricSpace>(
    traj: &Trajectory<M>,
    i: usize,
    j: usize,
    m: usize,
) -> Result<f64> {
    if m == 0 {
        return Err(invalid("Bowen window length m must be at least 1"));
    }
    let last = i.max(j) + m - 1;
    if last >= traj.len() {
        return Err(Error::WindowExceedsTrajectory {
            needed: last,
            len: traj.len(),
        });
    }
    Ok((0..m).fold(0.0f64, |acc, h| acc.max(traj.distance(i + h, j + h))))
}

pub(crate) fn check_window<M: MetricSpace>(traj: &Trajectory<M>, m: usize, n: usize) -> Result<()> {
    if m == 0 {
        return Err(invalid("m must be at least 1"));
    }
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let needed = n + m - 1;
    if needed > traj.len() {
        return Err(Error::WindowExceedsTrajectory {
            needed: needed - 1,
            len: traj.len(),
        });
    }
    Ok(())
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps.is_nan() || eps < 0.0 {
        return Err(invalid(format!("radius must be nonnegative, got {eps}")));
    }
    Ok(())
}

/// Reference implementation by direct pair enumeration.
pub fn correlation_sum<M: MetricSpace>(
    traj: &Trajectory<M>,
    m: usize,
    n: usize,
    eps: f64,
) -> Result<CorrelationSum> {
    check_window(traj, m, n)?;
    check_eps(eps)?;
    let close = |i: usize, j: usize| (0..m).all(|h| traj.distance(i + h, j + h) <= eps);
    let off_diagonal: u64 = (0..n)
        .into_par_iter()
        .map(|i| ((i + 1)..n).filter(|&j| close(i, j)).count() as u64)
        .sum();
    Ok(CorrelationSum {
        pairs: n as u64 + 2 * off_diagonal,
        n: n as u64,
    })
}

/// Lower and upper limits of `C_m(x, n, eps)` over the tail of an `n` schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitEstimate {
    pub lower: f64,
    pub upper: f64,
    pub schedule: Vec<usize>,
}

pub(crate) fn validate_schedule(schedule: &[usize]) -> Result<()> {
    if schedule.is_empty() {
        return Err(invalid("n schedule is empty"));
    }
    if schedule[0] == 0 {
        return Err(invalid("n schedule entries must be positive"));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("n schedule must be strictly increasing"));
    }
    if schedule.windows(2).any(|w| w[1] > 2 * w[0]) {
        return Err(invalid(
            "consecutive n schedule entries may grow by a factor of at most 2",
        ));
    }
    Ok(())
}

/// Index of the first schedule entry in the tail.
pub(crate) fn tail_start(len: usize, tail_fraction: f64) -> usize {
    let keep = ((len as f64) * tail_fraction).ceil() as usize;
    len - keep.clamp(1, len)
}

pub fn limit_estimate<M: MetricSpace>(
    traj: &Trajectory<M>,
    m: usize,
    eps: f64,
    schedule: &[usize],
) -> Result<LimitEstimate> {
    limit_estimate_with_tail(traj, m, eps, schedule, 0.5)
}

pub fn limit_estimate_with_tail<M: MetricSpace>(
    traj: &Trajectory<M>,
    m: usize,
    eps: f64,
    schedule: &[usize],
    tail_fraction: f64,
) -> Result<LimitEstimate> {
    validate_schedule(schedule)?;
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(invalid("tail fraction must lie in (0, 1]"));
    }
    check_window(traj, m, *schedule.last().unwrap())?;
    let profile = pair_profile(traj, eps, m, schedule, true)?;
    let start = tail_start(schedule.len(), tail_fraction);
    let values: Vec<f64> = (start..schedule.len())
        .map(|s| profile.sum(m, s).value())
        .collect();
    Ok(LimitEstimate {
        lower: values.iter().copied().fold(f64::INFINITY, f64::min),
        upper: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        schedule: schedule.to_vec(),
    })
}

/// One `(eps, m, n)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationEntry {
    pub eps: f64,
    pub m: usize,
    pub n: usize,
    pub pairs: u64,
}

impl CorrelationEntry {
    pub fn sum(&self) -> CorrelationSum {
        CorrelationSum {
            pairs: self.pairs,
            n: self.n as u64,
        }
    }

    pub fn value(&self) -> f64 {
        self.sum().value()
    }
}

/// Correlation sums over a grid of radii, embedding lengths and window counts.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationTable {
    pub label: String,
    entries: Vec<CorrelationEntry>,
    #[serde(skip)]
    index: BTreeMap<(u64, usize, usize), usize>,
    pub path: CountingPath,
}

impl CorrelationTable {
    pub fn compute<M: MetricSpace>(
        traj: &Trajectory<M>,
        eps_list: &[f64],
        m_list: &[usize],
        n_list: &[usize],
    ) -> Result<Self> {
        let mut ms = m_list.to_vec();
        ms.sort_unstable();
        ms.dedup();
        let mut ns = n_list.to_vec();
        ns.sort_unstable();
        ns.dedup();
        let (&m_max, &n_max) = match (ms.last(), ns.last()) {
            (Some(m), Some(n)) => (m, n),
            _ => return Err(invalid("m and n lists must be nonempty")),
        };
        if ms[0] == 0 || ns[0] == 0 {
            return Err(invalid("m and n values must be positive"));
        }
        check_window(traj, m_max, n_max)?;
        for &eps in eps_list {
            check_eps(eps)?;
        }
        let profiles: Vec<PairProfile> = eps_list
            .par_iter()
            .map(|&eps| pair_profile(traj, eps, m_max, &ns, true))
            .collect::<Result<_>>()?;
        let path = profiles
            .iter()
            .map(|p| p.path)
            .find(|p| *p == CountingPath::NaiveFallback)
            .unwrap_or_else(|| profiles.first().map_or(CountingPath::Naive, |p| p.path));
        let mut entries = Vec::new();
        for (&eps, profile) in eps_list.iter().zip(&profiles) {
            for &m in &ms {
                for (s, &n) in ns.iter().enumerate() {
                    entries.push(CorrelationEntry {
                        eps,
                        m,
                        n,
                        pairs: profile.sum(m, s).pairs,
                    });
                }
            }
        }
        let index = entries
            .iter()
            .enumerate()
            .map(|(k, e)| ((e.eps.to_bits(), e.m, e.n), k))
            .collect();
        Ok(Self {
            label: traj.label().to_string(),
            entries,
            index,
            path,
        })
    }

    pub fn entries(&self) -> &[CorrelationEntry] {
        &self.entries
    }

    pub fn get(&self, eps: f64, m: usize, n: usize) -> Option<&CorrelationEntry> {
        self.index
            .get(&(eps.to_bits(), m, n))
            .map(|&k| &self.entries[k])
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::space::{RealLine, ShiftSpace};

    fn shift_traj(symbols: Vec<u8>, p: usize, states: usize) -> Trajectory<ShiftSpace> {
        let horizon = symbols.len();
        let space = Arc::new(ShiftSpace::new(symbols.into(), p, horizon).unwrap());
        Trajectory::new((0..states).collect(), space, "shift")
    }

    fn alternating(len: usize) -> Vec<u8> {
        (0..len).map(|i| (i % 2) as u8).collect()
    }

    #[test]
    fn bowen_reduces_to_metric_for_m1() {
        let t = Trajectory::new(vec![0.1, 0.7, 0.3], Arc::new(RealLine::default()), "r");
        assert_eq!(bowen_distance(&t, 0, 1, 1).unwrap(), t.distance(0, 1));
        assert_eq!(bowen_distance(&t, 1, 1, 2).unwrap(), 0.0);
        assert!(matches!(
            bowen_distance(&t, 0, 1, 3),
            Err(Error::WindowExceedsTrajectory { .. })
        ));
    }

    #[test]
    fn constant_trajectory_has_zero_bowen_distance() {
        let t = Trajectory::new(vec![0.5; 8], Arc::new(RealLine::default()), "c");
        assert_eq!(bowen_distance(&t, 0, 5, 3).unwrap(), 0.0);
    }

    #[test]
    fn fixed_point_sum_is_one() {
        let t = Trajectory::new(vec![0.25; 20], Arc::new(RealLine::default()), "c");
        for m in 1..4 {
            let c = correlation_sum(&t, m, 10, 1e-3).unwrap();
            assert_eq!(c.ratio(), Ratio::from_integer(1));
        }
    }

    #[test]
    fn sum_is_one_above_diameter() {
        let f = |x: &f64| 3.8 * x * (1.0 - x);
        let t =
            crate::space::orbit_segment(f, 0.31, 60, Arc::new(RealLine::default()), "l").unwrap();
        let d = t.diameter_estimate();
        let c = correlation_sum(&t, 1, 60, d).unwrap();
        assert_eq!(c.ratio(), Ratio::from_integer(1));
    }

    #[test]
    fn alternating_sequence_m1() {
        // (01)^inf: pairs with equal leading symbol are the same-parity pairs
        let t = shift_traj(alternating(40), 2, 10);
        let c = correlation_sum(&t, 1, 4, 0.5).unwrap();
        assert_eq!(c.pairs, 8);
        assert_eq!(c.ratio(), Ratio::new(1, 2));
    }

    #[test]
    fn alternating_sequence_m2_matches_radius_quarter() {
        let t = shift_traj(alternating(40), 2, 10);
        let c2 = correlation_sum(&t, 2, 4, 0.5).unwrap();
        let c1 = correlation_sum(&t, 1, 4, 0.25).unwrap();
        assert_eq!(c2.ratio(), Ratio::new(1, 2));
        assert_eq!(c2, c1);
    }

    #[test]
    fn precondition_violations_are_errors() {
        let t = Trajectory::new(vec![0.0; 5], Arc::new(RealLine::default()), "c");
        assert!(correlation_sum(&t, 2, 5, 0.1).is_err());
        assert!(correlation_sum(&t, 1, 0, 0.1).is_err());
        assert!(correlation_sum(&t, 1, 5, f64::NAN).is_err());
    }

    #[test]
    fn limit_of_fixed_point_is_one() {
        let t = Trajectory::new(vec![0.0; 100], Arc::new(RealLine::default()), "c");
        let est = limit_estimate(&t, 2, 0.01, &[20, 30, 40, 60, 80]).unwrap();
        assert_eq!((est.lower, est.upper), (1.0, 1.0));
    }

    #[test]
    fn limit_of_alternating_sequence_even_n() {
        let t = shift_traj(alternating(200), 2, 150);
        let est = limit_estimate(&t, 1, 0.5, &[20, 30, 40, 60, 80, 100]).unwrap();
        assert_eq!((est.lower, est.upper), (0.5, 0.5));
    }

    #[test]
    fn schedule_validation() {
        let t = Trajectory::new(vec![0.0; 100], Arc::new(RealLine::default()), "c");
        assert!(limit_estimate(&t, 1, 0.1, &[10, 30]).is_err()); // ratio 3
        assert!(limit_estimate(&t, 1, 0.1, &[10, 10]).is_err());
        assert!(limit_estimate(&t, 1, 0.1, &[60, 101]).is_err());
        assert!(limit_estimate(&t, 1, 0.1, &[]).is_err());
    }

    #[test]
    fn tail_fraction_keeps_at_least_one() {
        assert_eq!(tail_start(5, 0.5), 2);
        assert_eq!(tail_start(4, 0.5), 2);
        assert_eq!(tail_start(1, 0.5), 0);
        assert_eq!(tail_start(6, 0.01), 5);
    }

    #[test]
    fn table_lookup_and_monotonicity() {
        let f = |x: &f64| 3.9 * x * (1.0 - x);
        let t =
            crate::space::orbit_segment(f, 0.2, 300, Arc::new(RealLine::default()), "l").unwrap();
        let eps = [0.2, 0.1, 0.05];
        let table = CorrelationTable::compute(&t, &eps, &[1, 2, 3], &[100, 200]).unwrap();
        assert_eq!(table.entries().len(), 18);
        for &n in &[100, 200] {
            for m in 1..=3 {
                let a = table.get(0.2, m, n).unwrap().pairs;
                let b = table.get(0.1, m, n).unwrap().pairs;
                assert!(a >= b);
                let naive = correlation_sum(&t, m, n, 0.1).unwrap();
                assert_eq!(naive.pairs, b);
            }
            for &e in &eps {
                let m1 = table.get(e, 1, n).unwrap().pairs;
                let m3 = table.get(e, 3, n).unwrap().pairs;
                assert!(m1 >= m3);
            }
        }
    }
}
