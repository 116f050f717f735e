//! Randomized checks of the exact properties of correlation sums.
//!
//! Every inequality is checked on integer pair counts `P = n^2 C`, so no
//! tolerance is involved.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::correlation::{bowen_distance, correlation_sum, correlation_sum_fast};
use crate::error::{invalid, Result};
use crate::interval::{spanning_number, tent_orbit_from_bits};
use crate::space::{MetricSpace, ShiftSpace, Trajectory};
use crate::symbolic::{BernoulliSpec, SymbolSequence, Word};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub evaluated: usize,
    pub violations: usize,
    /// Parameters of the first violation.
    pub example: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub cases: usize,
    pub seed: u64,
    pub checks: Vec<InvariantCheck>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.violations == 0)
    }

    pub fn check(&self, name: &str) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Default)]
struct Tally(BTreeMap<&'static str, InvariantCheck>);

impl Tally {
    fn record(&mut self, name: &'static str, ok: bool, context: impl FnOnce() -> String) {
        let entry = self.0.entry(name).or_insert_with(|| InvariantCheck {
            name: name.to_string(),
            evaluated: 0,
            violations: 0,
            example: None,
        });
        entry.evaluated += 1;
        if !ok {
            entry.violations += 1;
            if entry.example.is_none() {
                entry.example = Some(context());
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Params {
    m: usize,
    n: usize,
    eps: f64,
    h: usize,
}

fn pairs<M: MetricSpace>(traj: &Trajectory<M>, m: usize, n: usize, eps: f64) -> u64 {
    correlation_sum(traj, m, n, eps).expect("window fits").pairs
}

fn common_checks<M: MetricSpace>(
    traj: &Trajectory<M>,
    p: Params,
    diameter: f64,
    tally: &mut Tally,
    ctx: &str,
) {
    let Params { m, n, eps, h } = p;
    let c = |name: &str| format!("{name}: {ctx}, m={m}, n={n}, eps={eps}, h={h}");
    let base = pairs(traj, m, n, eps);
    let n2 = (n * n) as u64;

    tally.record("bounds", base >= n as u64 && base <= n2, || c("bounds"));
    let wider = pairs(traj, m, n, 2.0 * eps);
    let narrower = pairs(traj, m, n, 0.5 * eps);
    tally.record("monotone_eps", narrower <= base && base <= wider, || {
        c("monotone_eps")
    });
    let longer = pairs(traj, m + 1, n, eps);
    tally.record("monotone_m", longer <= base, || c("monotone_m"));
    tally.record(
        "full_at_diameter",
        pairs(traj, m, n, diameter) == n2,
        || c("full_at_diameter"),
    );

    // P r^m >= n^2 with r a greedy eps/2-net of the visited states
    let states: Vec<usize> = (0..n + m - 1).collect();
    let r = spanning_number(&states, eps / 2.0, |&a, &b| traj.distance(a, b)).unwrap();
    let lhs = BigUint::from(base) * BigUint::from(r).pow(m as u32);
    tally.record("eta_power_bound", lhs >= BigUint::from(n2), || {
        c("eta_power_bound")
    });

    // P r_m >= n^2 with r_m a greedy (m, eps/2)-net of the windows
    let windows: Vec<usize> = (0..n).collect();
    let rm = spanning_number(&windows, eps / 2.0, |&a, &b| {
        bowen_distance(traj, a, b, m).unwrap()
    })
    .unwrap();
    tally.record(
        "bowen_net_bound",
        base as u128 * rm as u128 >= n2 as u128,
        || c("bowen_net_bound"),
    );

    // P_{n+h}(x) - (2hn + h^2) <= P_n(f^h x) <= P_{n+h}(x)
    let ahead = pairs(traj, m, n + h, eps);
    let shifted = pairs(&traj.advance(h).unwrap(), m, n, eps);
    let slack = (2 * h * n + h * h) as u64;
    tally.record(
        "shift_invariance",
        ahead.saturating_sub(slack) <= shifted && shifted <= ahead,
        || c("shift_invariance"),
    );

    let naive = correlation_sum(traj, m, n, eps).unwrap();
    let (fast, _) = correlation_sum_fast(traj, m, n, eps).unwrap();
    tally.record("fast_equals_naive", naive.ratio() == fast.ratio(), || {
        c("fast_equals_naive")
    });
}

/// `P(km, kn, eps) <= (k - 2) k n + 2 sum_h P^{f^k}(f^h x; m, n, 2 eps)`.
fn fk_check(traj: &Trajectory<ShiftSpace>, k: usize, p: Params, tally: &mut Tally, ctx: &str) {
    let Params { m, n, eps, .. } = p;
    let lhs = pairs(traj, k * m, k * n, eps) as i128;
    let sum: u64 = (0..k)
        .map(|h| pairs(&traj.subsample(k, h).unwrap(), m, n, 2.0 * eps))
        .sum();
    let rhs = ((k - 2) * k * n) as i128 + 2 * sum as i128;
    let name = match k {
        2 => "fk_corollary_k2",
        3 => "fk_corollary_k3",
        _ => "fk_corollary_k4",
    };
    tally.record(name, lhs <= rhs, || {
        format!("{name}: {ctx}, k={k}, m={m}, n={n}, eps={eps}: {lhs} > {rhs}")
    });
}

fn random_eps(rng: &mut ChaCha8Rng, horizon: usize) -> f64 {
    if rng.gen_bool(0.5) {
        2f64.powi(-(rng.gen_range(0..=horizon as i32)))
    } else {
        rng.gen_range(0.001..1.0)
    }
}

/// Runs `cases` random cases: three quarters symbolic (Bernoulli with random
/// weights, or periodic), one quarter tent-map orbits.
pub fn run_invariant_suite(cases: usize, seed: u64) -> Result<InvariantReport> {
    if cases == 0 {
        return Err(invalid("need at least one case"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::default();
    for case in 0..cases {
        let m = rng.gen_range(1..=5);
        let n = rng.gen_range(4..=60);
        let h = rng.gen_range(1..=6);
        let k = rng.gen_range(2..=4);
        let len = k * (n + m + 1) + h + 8;
        let case_seed: u64 = rng.gen();
        if case % 4 == 3 {
            let traj = tent_orbit_from_bits(case_seed, len)?;
            let eps = rng.gen_range(0.001..0.5);
            let ctx = format!("case {case} tent seed {case_seed}");
            common_checks(&traj, Params { m, n, eps, h }, 1.0, &mut tally, &ctx);
            continue;
        }
        let p = rng.gen_range(2..=4);
        let horizon = rng.gen_range(3..=16);
        let seq = if rng.gen_bool(0.8) {
            let pi: Vec<f64> = (0..p).map(|_| rng.gen_range(0.05..1.0)).collect();
            let total: f64 = pi.iter().sum();
            let pi = pi.iter().map(|v| v / total).collect();
            SymbolSequence::bernoulli(&BernoulliSpec::new(pi, case_seed)?)
        } else {
            let period = rng.gen_range(1..=6);
            let word: Vec<u8> = (0..period).map(|_| rng.gen_range(0..p as u8)).collect();
            SymbolSequence::periodic(&Word::new(word, p)?)?
        };
        let traj = seq.shift_trajectory(len, horizon)?;
        let eps = random_eps(&mut rng, horizon);
        let ctx = format!("case {case} {} horizon {horizon}", seq.label());
        let params = Params { m, n, eps, h };
        common_checks(&traj, params, traj.diameter_estimate(), &mut tally, &ctx);
        fk_check(&traj, k, params, &mut tally, &ctx);
    }
    Ok(InvariantReport {
        cases,
        seed,
        checks: tally.0.into_values().collect(),
    })
}
