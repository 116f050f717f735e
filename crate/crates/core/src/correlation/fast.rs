//! Pair-count profiles: every `(m, n)` cell for one radius in a single pass.
//!
//! Three counting paths produce identical integers:
//! - symbolic: with `eps` in `[2^-K, 2^-(K-1))`, two shift positions are
//!   `m`-close iff the `K`-words at all `m` offsets agree, so windows are
//!   grouped into classes by refinement and each schedule point reads
//!   `sum_w c_w^2` off a running tally;
//! - real line: indices sorted by value, a two-pointer sweep enumerates only
//!   the pairs within `eps` at `h = 0`, then extends each pair along the orbit;
//! - naive: all pairs `i < j`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{check_eps, check_window, CorrelationSum};
use crate::error::{invalid, Result};
use crate::space::{MetricSpace, ShiftSpace, Structure, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountingPath {
    Symbolic,
    RealLine,
    /// Naive counting was requested.
    Naive,
    /// An accelerated path was requested but the metric does not support it.
    NaiveFallback,
}

/// Ordered pair counts `P(m, n_s)` for `1 <= m <= m_max` and each schedule
/// entry `n_s`.
#[derive(Debug, Clone, Serialize)]
pub struct PairProfile {
    pub eps: f64,
    pub m_max: usize,
    pub schedule: Vec<usize>,
    counts: Vec<u64>,
    pub path: CountingPath,
}

impl PairProfile {
    pub fn pairs(&self, m: usize, s: usize) -> u64 {
        assert!((1..=self.m_max).contains(&m) && s < self.schedule.len());
        self.counts[(m - 1) * self.schedule.len() + s]
    }

    pub fn sum(&self, m: usize, s: usize) -> CorrelationSum {
        CorrelationSum {
            pairs: self.pairs(m, s),
            n: self.schedule[s] as u64,
        }
    }
}

/// Counts pairs for all `m <= m_max` at every `n` in `schedule` (strictly
/// increasing). With `fast = false` the naive path is forced.
pub fn pair_profile<M: MetricSpace>(
    traj: &Trajectory<M>,
    eps: f64,
    m_max: usize,
    schedule: &[usize],
    fast: bool,
) -> Result<PairProfile> {
    if schedule.is_empty() || schedule[0] == 0 || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("n values must be positive and strictly increasing"));
    }
    check_window(traj, m_max, *schedule.last().unwrap())?;
    check_eps(eps)?;
    let (counts, path) = if fast {
        match traj.space().structure(traj.states()) {
            Structure::RealLine(xs) => (
                real_counts(xs, eps, m_max, schedule),
                CountingPath::RealLine,
            ),
            Structure::Shift { space, positions } => {
                match symbolic_counts(space, positions, eps, m_max, schedule) {
                    Some(c) => (c, CountingPath::Symbolic),
                    None => (
                        naive_counts(traj, eps, m_max, schedule),
                        CountingPath::NaiveFallback,
                    ),
                }
            }
            Structure::General => (
                naive_counts(traj, eps, m_max, schedule),
                CountingPath::NaiveFallback,
            ),
        }
    } else {
        (
            naive_counts(traj, eps, m_max, schedule),
            CountingPath::Naive,
        )
    };
    Ok(PairProfile {
        eps,
        m_max,
        schedule: schedule.to_vec(),
        counts,
        path,
    })
}

/// Same value as [`super::correlation_sum`], through the accelerated path
/// when the metric allows it.
pub fn correlation_sum_fast<M: MetricSpace>(
    traj: &Trajectory<M>,
    m: usize,
    n: usize,
    eps: f64,
) -> Result<(CorrelationSum, CountingPath)> {
    let profile = pair_profile(traj, eps, m, &[n], true)?;
    Ok((profile.sum(m, 0), profile.path))
}

/// Turns a histogram of off-diagonal pairs by (run length, schedule bucket)
/// into cumulative counts.
fn accumulate(hist: &[u64], m_max: usize, schedule: &[usize]) -> Vec<u64> {
    let s_len = schedule.len();
    let mut counts = vec![0u64; m_max * s_len];
    // at_least[s] = pairs with run >= m whose larger index falls in bucket s
    let mut at_least = vec![0u64; s_len];
    for m in (1..=m_max).rev() {
        for s in 0..s_len {
            at_least[s] += hist[m * s_len + s];
        }
        let mut running = 0u64;
        for s in 0..s_len {
            running += at_least[s];
            counts[(m - 1) * s_len + s] = schedule[s] as u64 + 2 * running;
        }
    }
    counts
}

fn bucket(schedule: &[usize], j: usize) -> usize {
    schedule.partition_point(|&n| n <= j)
}

fn naive_counts<M: MetricSpace>(
    traj: &Trajectory<M>,
    eps: f64,
    m_max: usize,
    schedule: &[usize],
) -> Vec<u64> {
    let n_max = *schedule.last().unwrap();
    let s_len = schedule.len();
    let width = (m_max + 1) * s_len;
    let hist = (0..n_max)
        .into_par_iter()
        .fold(
            || vec![0u64; width],
            |mut hist, i| {
                for j in (i + 1)..n_max {
                    let run = (0..m_max)
                        .take_while(|&h| traj.distance(i + h, j + h) <= eps)
                        .count();
                    hist[run * s_len + bucket(schedule, j)] += 1;
                }
                hist
            },
        )
        .reduce(|| vec![0u64; width], add_vecs);
    accumulate(&hist, m_max, schedule)
}

fn real_counts(xs: &[f64], eps: f64, m_max: usize, schedule: &[usize]) -> Vec<u64> {
    let n_max = *schedule.last().unwrap();
    let s_len = schedule.len();
    let width = (m_max + 1) * s_len;
    let mut order: Vec<usize> = (0..n_max).collect();
    order.sort_unstable_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let hist = (0..n_max)
        .into_par_iter()
        .fold(
            || vec![0u64; width],
            |mut hist, a| {
                let i = order[a];
                for &j in &order[a + 1..] {
                    if xs[j] - xs[i] > eps {
                        break;
                    }
                    let run = 1
                        + (1..m_max)
                            .take_while(|&h| (xs[i + h] - xs[j + h]).abs() <= eps)
                            .count();
                    hist[run * s_len + bucket(schedule, i.max(j))] += 1;
                }
                hist
            },
        )
        .reduce(|| vec![0u64; width], add_vecs);
    accumulate(&hist, m_max, schedule)
}

fn add_vecs(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    a
}

/// Number of leading symbols two positions must share to be within `eps`,
/// already capped at the horizon.
fn agreement_length(space: &ShiftSpace, eps: f64) -> usize {
    let mut k = 0usize;
    while k < space.horizon() && 0.5f64.powi(k as i32) > eps {
        k += 1;
    }
    k
}

fn symbolic_counts(
    space: &ShiftSpace,
    positions: &[usize],
    eps: f64,
    m_max: usize,
    schedule: &[usize],
) -> Option<Vec<u64>> {
    let n_max = *schedule.last().unwrap();
    let t_len = n_max + m_max - 1;
    let k = agreement_length(space, eps);
    let symbols = space.symbols();
    // near the end of the buffer the truncated metric is not a word comparison
    if positions[..t_len].iter().any(|&q| q + k > symbols.len()) {
        return None;
    }
    let mut word_ids: HashMap<&[u8], u32> = HashMap::new();
    let word_class: Vec<u32> = positions[..t_len]
        .iter()
        .map(|&q| {
            let next = word_ids.len() as u32;
            *word_ids.entry(&symbols[q..q + k]).or_insert(next)
        })
        .collect();

    let s_len = schedule.len();
    let mut counts = vec![0u64; m_max * s_len];
    let mut ids: Vec<u32> = word_class[..n_max].to_vec();
    let mut classes = word_ids.len();
    let mut tally: Vec<u64> = Vec::new();
    for m in 1..=m_max {
        tally.clear();
        tally.resize(classes, 0);
        let mut total = 0u64;
        let mut s = 0;
        for (i, &id) in ids.iter().enumerate() {
            let c = &mut tally[id as usize];
            total += 2 * *c + 1;
            *c += 1;
            if i + 1 == schedule[s] {
                counts[(m - 1) * s_len + s] = total;
                s += 1;
            }
        }
        if m < m_max {
            let mut refine: HashMap<u64, u32> = HashMap::with_capacity(classes);
            for (i, id) in ids.iter_mut().enumerate() {
                let key = (u64::from(*id) << 32) | u64::from(word_class[i + m]);
                let next = refine.len() as u32;
                *id = *refine.entry(key).or_insert(next);
            }
            classes = refine.len();
        }
    }
    Some(counts)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::correlation::correlation_sum;
    use crate::space::RealLine;

    fn random_shift(len: usize, p: u8, horizon: usize, seed: u64) -> Trajectory<ShiftSpace> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let symbols: Vec<u8> = (0..len).map(|_| rng.gen_range(0..p)).collect();
        let space = Arc::new(ShiftSpace::new(symbols.into(), p as usize, horizon).unwrap());
        Trajectory::new((0..len).collect(), space, "random")
    }

    #[test]
    fn symbolic_matches_naive_bernoulli_half() {
        let t = random_shift(1100, 2, 64, 7);
        let naive = correlation_sum(&t, 3, 1000, 0.5).unwrap();
        let (fast, path) = correlation_sum_fast(&t, 3, 1000, 0.5).unwrap();
        assert_eq!(path, CountingPath::Symbolic);
        assert_eq!(naive, fast);
    }

    #[test]
    fn symbolic_profile_matches_naive_profile() {
        let t = random_shift(400, 3, 12, 11);
        let schedule = [50, 90, 150, 300];
        for &eps in &[1.0, 0.6, 0.5, 0.3, 0.25, 0.01, 0.0] {
            let a = pair_profile(&t, eps, 6, &schedule, true).unwrap();
            let b = pair_profile(&t, eps, 6, &schedule, false).unwrap();
            assert_eq!(a.path, CountingPath::Symbolic);
            for m in 1..=6 {
                for s in 0..schedule.len() {
                    assert_eq!(a.pairs(m, s), b.pairs(m, s), "eps {eps} m {m} s {s}");
                }
            }
        }
    }

    #[test]
    fn subsampled_shift_uses_symbolic_path() {
        let t = random_shift(900, 2, 20, 3).subsample(3, 1).unwrap();
        let a = pair_profile(&t, 0.2, 4, &[100, 200], true).unwrap();
        let b = pair_profile(&t, 0.2, 4, &[100, 200], false).unwrap();
        assert_eq!(a.path, CountingPath::Symbolic);
        assert_eq!(a.counts, b.counts);
    }

    #[test]
    fn buffer_end_falls_back() {
        let t = random_shift(30, 2, 30, 5);
        let (fast, path) = correlation_sum_fast(&t, 2, 29, 1e-6).unwrap();
        assert_eq!(path, CountingPath::NaiveFallback);
        assert_eq!(fast, correlation_sum(&t, 2, 29, 1e-6).unwrap());
    }

    #[test]
    fn real_path_matches_naive_with_ties() {
        // dyadic values make exact ties at distance eps
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<f64> = (0..600)
            .map(|_| f64::from(rng.gen_range(0..16u8)) / 16.0)
            .collect();
        let t = Trajectory::new(xs, Arc::new(RealLine::default()), "grid");
        for &eps in &[0.0, 0.0625, 0.125, 0.3] {
            let a = pair_profile(&t, eps, 5, &[100, 250, 500], true).unwrap();
            let b = pair_profile(&t, eps, 5, &[100, 250, 500], false).unwrap();
            assert_eq!(a.path, CountingPath::RealLine);
            assert_eq!(a.counts, b.counts, "eps {eps}");
        }
    }

    #[test]
    fn alternating_m2_is_half() {
        let symbols: Vec<u8> = (0..40).map(|i| (i % 2) as u8).collect();
        let space = Arc::new(ShiftSpace::new(symbols.into(), 2, 40).unwrap());
        let t = Trajectory::new((0..10).collect(), space, "alt");
        let (c, path) = correlation_sum_fast(&t, 2, 4, 0.5).unwrap();
        assert_eq!(path, CountingPath::Symbolic);
        assert_eq!(c.ratio(), num_rational::Ratio::new(1, 2));
    }

    #[test]
    fn profile_counts_are_monotone() {
        let t = random_shift(700, 2, 30, 9);
        let p = pair_profile(&t, 0.125, 5, &[100, 200, 400, 600], true).unwrap();
        for s in 0..4 {
            for m in 1..5 {
                assert!(p.pairs(m, s) >= p.pairs(m + 1, s));
            }
        }
    }
}
