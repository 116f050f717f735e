//! A strictly ergodic subshift with positive topological entropy and zero
//! correlation entropy.
//!
//! Level 1 is `M_1 = {0 < 1 < .. < p-1}` with `r_1 = 0`. Level `j + 1`
//! consists of the words `w_1^{r_j} w_{pi(1)} .. w_{pi(m_j)}` over all
//! permutations `pi` of `M_j` (identity first, then lexicographic order), and
//! `r_{j+1} = ceil(m_{j+1} / l_{j+1})`. The point `x` is the common extension
//! of the first words `w-bar_j`.
//!
//! Sizes explode quickly (`m_4 = 720!` for `p = 3`), so every quantity is an
//! exact integer while that is cheap and an interval for its logarithm (or
//! doubly iterated logarithm) afterwards.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::correlation::{local_correlation_entropy, EntropyConfig, EntropyEstimate};
use crate::error::{invalid, Error, Result};
use crate::space::EpsilonGrid;
use crate::symbolic::{cesaro_density_check, SymbolSequence, Word};

/// Closed interval of reals with outward-rounded endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    /// `[v, v]` widened by a relative error `rel` (and a few ulps).
    fn around(v: f64, rel: f64) -> Self {
        let pad = v.abs() * rel;
        Self {
            lo: (v - pad).next_down(),
            hi: (v + pad).next_up(),
        }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    fn add(self, other: Self) -> Self {
        Self::new(
            (self.lo + other.lo).next_down(),
            (self.hi + other.hi).next_up(),
        )
    }

    /// Product of two intervals of nonnegative numbers.
    fn mul_nonneg(self, other: Self) -> Self {
        Self::new(
            (self.lo * other.lo).next_down(),
            (self.hi * other.hi).next_up(),
        )
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// An exact integer, or bounds on `ln` or `ln ln` of one.
#[derive(Debug, Clone, PartialEq)]
pub enum Magnitude {
    Exact(BigUint),
    Ln(Interval),
    LnLn(Interval),
}

impl Magnitude {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            Magnitude::Exact(v) => Some(v),
            _ => None,
        }
    }

    /// Bounds on the natural logarithm, when they fit in an `f64`.
    pub fn ln(&self) -> Option<Interval> {
        match self {
            Magnitude::Exact(v) => Some(ln_big(v)),
            Magnitude::Ln(i) => Some(*i),
            Magnitude::LnLn(_) => None,
        }
    }
}

/// Exact integers in full; otherwise `exp(..)` or `exp(exp(..))` of the
/// interval midpoint.
impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Magnitude::Exact(v) => write!(f, "{v}"),
            Magnitude::Ln(i) => write!(f, "exp({:.12e})", i.mid()),
            Magnitude::LnLn(i) => write!(f, "exp(exp({:.12e}))", i.mid()),
        }
    }
}

impl Serialize for Magnitude {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

const REL: f64 = 1e-13;
/// `n!` is formed exactly for `n` up to this bound.
const EXACT_FACTORIAL_MAX: u64 = 5000;
/// `ln n!` is summed term by term up to this bound, then bounded by Stirling.
const SUMMED_FACTORIAL_MAX: u64 = 1_000_000;

fn ln_big_point(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        n.to_f64().expect("fits in f64").ln()
    } else {
        let shift = bits - 64;
        let top = (n >> shift).to_f64().expect("64-bit value");
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

fn ln_big(n: &BigUint) -> Interval {
    Interval::around(ln_big_point(n), REL)
}

fn big_to_f64(n: &BigUint) -> Option<f64> {
    (n.bits() <= 1000).then(|| n.to_f64().expect("fits in f64"))
}

/// `a / b` for `0 < a <= b`, bracketed through 64 fractional bits.
fn ratio_interval(a: &BigUint, b: &BigUint) -> Interval {
    let q = (a << 64u32) / b;
    let scale = 2f64.powi(-64);
    let lo = q.to_f64().expect("at most 65 bits") * scale;
    let hi = (q + 1u32).to_f64().expect("at most 65 bits") * scale;
    Interval::new(lo.next_down(), hi.next_up())
}

fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, i| acc * i)
}

enum LnFactorial {
    Ln(Interval),
    LnLn(Interval),
}

fn ln_factorial(n: &BigUint) -> LnFactorial {
    if let Some(small) = n.to_u64().filter(|&v| v <= SUMMED_FACTORIAL_MAX) {
        let sum: f64 = (2..=small).map(|i| (i as f64).ln()).sum();
        return LnFactorial::Ln(Interval::around(sum, REL));
    }
    let ln_n = ln_big(n);
    match big_to_f64(n) {
        Some(nf) => {
            // n (ln n - 1) + ln(2 pi n) / 2 + delta, 1/(12n+1) < delta < 1/(12n)
            let base_lo = nf * (ln_n.lo - 1.0) + 0.5 * (2.0 * std::f64::consts::PI * nf).ln();
            let base_hi = nf * (ln_n.hi - 1.0) + 0.5 * (2.0 * std::f64::consts::PI * nf).ln();
            let lo = Interval::around(base_lo + 1.0 / (12.0 * nf + 1.0), REL).lo;
            let hi = Interval::around(base_hi + 1.0 / (12.0 * nf), REL).hi;
            LnFactorial::Ln(Interval::new(lo, hi))
        }
        None => {
            // n (ln n - 1) < ln n! < n ln n
            let lo = ln_n.lo + (ln_n.lo - 1.0).ln();
            let hi = ln_n.hi + ln_n.hi.ln();
            LnFactorial::LnLn(Interval::new(
                Interval::around(lo, REL).lo,
                Interval::around(hi, REL).hi,
            ))
        }
    }
}

/// One level `j` of the construction.
#[derive(Debug, Clone, Serialize)]
pub struct ConstructionLevel {
    pub p: usize,
    pub j: usize,
    pub l: Magnitude,
    pub m: Magnitude,
    pub r: Magnitude,
    /// `ln(m_j) / l_j`.
    pub lambda: Interval,
    #[serde(skip)]
    words: Option<Arc<Vec<Vec<u8>>>>,
    #[serde(skip)]
    w_bar: Option<Arc<Vec<u8>>>,
}

impl ConstructionLevel {
    /// The ordered word set `M_j`, when it was enumerated.
    pub fn words(&self) -> Option<&[Vec<u8>]> {
        self.words.as_deref().map(Vec::as_slice)
    }

    pub fn is_explicit(&self) -> bool {
        self.words.is_some()
    }

    /// The first word of `M_j`, when it was materialized.
    pub fn w_bar(&self) -> Option<&[u8]> {
        self.w_bar.as_deref().map(Vec::as_slice)
    }

    pub fn l_exact(&self) -> Option<&BigUint> {
        self.l.exact()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    /// Largest `m_j` for which `M_j` is enumerated.
    pub explicit_cap: u64,
    /// Allow `p = 2` (the zero-entropy case).
    pub allow_binary: bool,
    /// Never build beyond this level.
    pub max_level: usize,
    /// Largest `w-bar_j` that is materialized.
    pub max_prefix: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            explicit_cap: 10_000,
            allow_binary: false,
            max_level: 8,
            max_prefix: 10_000_000,
        }
    }
}

pub fn build_levels(p: usize, explicit_cap: u64) -> Result<Vec<ConstructionLevel>> {
    build_levels_with(
        p,
        &BuildOptions {
            explicit_cap,
            ..BuildOptions::default()
        },
    )
}

/// Builds levels `1, 2, ..` while the previous level's `l`, `m` and `r` are
/// exact integers (and up to `max_level`).
pub fn build_levels_with(p: usize, opts: &BuildOptions) -> Result<Vec<ConstructionLevel>> {
    if p < 2 || (p == 2 && !opts.allow_binary) {
        return Err(invalid(format!(
            "alphabet size must be at least 3 (2 only with the binary flag), got {p}"
        )));
    }
    if p > 10 {
        return Err(invalid("alphabet sizes above 10 are not supported"));
    }
    if opts.max_level == 0 {
        return Err(invalid("max_level must be at least 1"));
    }
    let first = ConstructionLevel {
        p,
        j: 1,
        l: Magnitude::Exact(BigUint::one()),
        m: Magnitude::Exact(BigUint::from(p)),
        r: Magnitude::Exact(BigUint::zero()),
        lambda: ln_big(&BigUint::from(p)),
        words: Some(Arc::new((0..p as u8).map(|s| vec![s]).collect())),
        w_bar: Some(Arc::new(vec![0])),
    };
    let mut levels = vec![first];
    while levels.len() < opts.max_level {
        let prev = levels.last().unwrap();
        let (Some(l), Some(m), Some(r)) = (prev.l.exact(), prev.m.exact(), prev.r.exact()) else {
            break;
        };
        levels.push(next_level(prev, l, m, r, opts));
    }
    Ok(levels)
}

fn next_level(
    prev: &ConstructionLevel,
    l: &BigUint,
    m: &BigUint,
    r: &BigUint,
    opts: &BuildOptions,
) -> ConstructionLevel {
    let l_next = (m + r) * l;
    let m_small = m.to_u64().filter(|&v| v <= EXACT_FACTORIAL_MAX);
    let (m_next, r_next) = match m_small {
        Some(ms) => {
            let m_next = factorial(ms);
            let r_next = Integer::div_ceil(&m_next, &l_next);
            (Magnitude::Exact(m_next), Magnitude::Exact(r_next))
        }
        None => {
            let ln_l = ln_big(&l_next);
            match ln_factorial(m) {
                LnFactorial::Ln(ln_m) => {
                    // ceil adds at most 1 to an astronomically large quotient
                    let ln_r = Interval::new(
                        (ln_m.lo - ln_l.hi).next_down(),
                        (ln_m.hi - ln_l.lo).next_up().next_up(),
                    );
                    (Magnitude::Ln(ln_m), Magnitude::Ln(ln_r))
                }
                LnFactorial::LnLn(lnln_m) => {
                    // ln ln r >= ln ln m + ln(1 - ln l / ln m)
                    let t = (ln_l.hi.ln() - lnln_m.lo).exp();
                    let lnln_r =
                        Interval::new((lnln_m.lo - 2.0 * t).next_down(), lnln_m.hi.next_up());
                    (Magnitude::LnLn(lnln_m), Magnitude::LnLn(lnln_r))
                }
            }
        }
    };
    let lambda = next_lambda(l, m, r, &l_next);

    let explicit = matches!(&m_next, Magnitude::Exact(v) if v.to_u64().is_some_and(|c| c <= opts.explicit_cap));
    let words = match (&prev.words, explicit) {
        (Some(ws), true) => Some(Arc::new(permutation_words(
            ws,
            r.to_usize().expect("small r"),
        ))),
        _ => None,
    };
    let w_bar = match (&prev.words, &prev.w_bar) {
        (Some(ws), Some(wb)) if l_next.to_u64().is_some_and(|v| v <= opts.max_prefix) => {
            let reps = r.to_usize().expect("bounded by max_prefix");
            let mut out = Vec::with_capacity(l_next.to_usize().unwrap());
            for _ in 0..reps {
                out.extend_from_slice(wb);
            }
            for w in ws.iter() {
                out.extend_from_slice(w);
            }
            Some(Arc::new(out))
        }
        _ => None,
    };
    ConstructionLevel {
        p: prev.p,
        j: prev.j + 1,
        l: Magnitude::Exact(l_next),
        m: m_next,
        r: r_next,
        lambda,
        words,
        w_bar,
    }
}

/// `ln(m!) / ((m + r) l)`.
fn next_lambda(l: &BigUint, m: &BigUint, r: &BigUint, l_next: &BigUint) -> Interval {
    if let LnFactorial::Ln(ln_fact) = ln_factorial(m) {
        if let Some(d) = big_to_f64(l_next) {
            let inv = Interval::around(1.0 / d, REL);
            return ln_fact.mul_nonneg(inv);
        }
    }
    // [m / (m + r)] (ln m - 1) / l + [ln(2 pi m) / 2 + delta] / ((m + r) l)
    let a = ratio_interval(m, &(m + r));
    let ln_m = ln_big(m);
    let inv_l = match big_to_f64(l) {
        Some(lf) => Interval::around(1.0 / lf, REL),
        None => Interval::new(0.0, f64::MIN_POSITIVE),
    };
    let main = a
        .mul_nonneg(Interval::new(
            (ln_m.lo - 1.0).next_down(),
            (ln_m.hi - 1.0).next_up(),
        ))
        .mul_nonneg(inv_l);
    let rest = match (big_to_f64(m), big_to_f64(l_next)) {
        (Some(mf), Some(d)) => {
            let c = 0.5 * (2.0 * std::f64::consts::PI * mf).ln();
            Interval::new(
                ((c + 1.0 / (12.0 * mf + 1.0)) / d).next_down().max(0.0),
                Interval::around((c + 1.0 / (12.0 * mf)) / d, REL).hi,
            )
        }
        // numerator below ln(m) + 1, denominator above m
        _ => Interval::new(0.0, f64::MIN_POSITIVE),
    };
    main.add(rest)
}

/// `w_1^r pi(w_1, .., w_n)` for all permutations in lexicographic order.
fn permutation_words(words: &[Vec<u8>], r: usize) -> Vec<Vec<u8>> {
    let n = words.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        let mut w = Vec::with_capacity((n + r) * words[0].len());
        for _ in 0..r {
            w.extend_from_slice(&words[0]);
        }
        for &i in &perm {
            w.extend_from_slice(&words[i]);
        }
        out.push(w);
        if !next_permutation(&mut perm) {
            return out;
        }
    }
}

fn next_permutation(a: &mut [usize]) -> bool {
    let Some(i) = (1..a.len()).rev().find(|&i| a[i - 1] < a[i]) else {
        return false;
    };
    let j = (i..a.len()).rev().find(|&j| a[j] > a[i - 1]).unwrap();
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

fn big_rational(n: &BigUint) -> Ratio<BigInt> {
    Ratio::from_integer(BigInt::from(n.clone()))
}

/// Rounds an exact positive rational up to an `f64`.
fn rational_upper(q: &Ratio<BigInt>) -> f64 {
    q.to_f64().unwrap_or(f64::MAX).max(0.0).next_up().next_up()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub property: String,
    pub level: usize,
    pub statement: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelPropsReport {
    pub p: usize,
    pub checks: Vec<PropertyCheck>,
}

impl LevelPropsReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Checks the structural properties of the levels wherever the quantities
/// involved are known: (a) `m_j / l_j` is an even integer equal to `r_j` for
/// `j >= 2`; (b) `r_j > p` for `j >= 3`; (d) `l_{j+1} > p l_j^2` for `j >= 3`;
/// (e) `l_3 = (p+1)!` and `sum_{4 <= j} 1/l_j < 1/(p l_3^2 - 1)` on the known
/// terms; plus `lambda_{j+1} < lambda_j` and
/// `lambda_{j+1} > lambda_j - (1 + lambda_j)/l_j`.
pub fn verify_level_props(levels: &[ConstructionLevel]) -> Result<LevelPropsReport> {
    let p = levels.first().ok_or_else(|| invalid("no levels"))?.p;
    let pb = BigUint::from(p);
    let mut checks = Vec::new();
    let mut push = |property: &str, level: usize, statement: String, passed: bool| {
        checks.push(PropertyCheck {
            property: property.to_string(),
            level,
            statement,
            passed,
        })
    };
    for lv in levels {
        let j = lv.j;
        if j >= 2 {
            if let (Some(m), Some(l)) = (lv.m.exact(), lv.l.exact()) {
                let (q, rem) = m.div_rem(l);
                let even = rem.is_zero() && q.is_even();
                let r_ok = lv.r.exact().is_none_or(|r| *r == q);
                push(
                    "a",
                    j,
                    format!(
                        "m_{j}/l_{j} = {} is an even integer equal to r_{j}",
                        short(&q)
                    ),
                    even && r_ok,
                );
            }
        }
        if j >= 3 {
            let (passed, shown) = match &lv.r {
                Magnitude::Exact(r) => (*r > pb, short(r)),
                Magnitude::Ln(i) => (i.lo > (p as f64).ln(), lv.r.to_string()),
                Magnitude::LnLn(i) => (i.lo > (p as f64).ln().ln(), lv.r.to_string()),
            };
            push("b", j, format!("r_{j} = {shown} > p = {p}"), passed);
        }
    }
    for pair in levels.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.j >= 3 {
            if let (Some(la), Some(lb)) = (a.l.exact(), b.l.exact()) {
                push(
                    "d",
                    a.j,
                    format!("l_{} > p l_{}^2", b.j, a.j),
                    *lb > &pb * la * la,
                );
            }
        }
        push(
            "lambda-decreasing",
            a.j,
            format!("lambda_{} < lambda_{}", b.j, a.j),
            b.lambda.hi < a.lambda.lo,
        );
        if let Some(lf) = a.l.exact().and_then(big_to_f64) {
            let rhs = (a.lambda.hi * (1.0 - 1.0 / lf) - 1.0 / lf).next_up();
            push(
                "lambda-step",
                a.j,
                format!(
                    "lambda_{} > lambda_{} - (1 + lambda_{})/l_{}",
                    b.j, a.j, a.j, a.j
                ),
                b.lambda.lo > rhs,
            );
        }
    }
    if let Some(l3) = levels.get(2).and_then(|lv| lv.l.exact()) {
        push(
            "e",
            3,
            format!("l_3 = {l3} = (p+1)!"),
            *l3 == factorial(p as u64 + 1),
        );
        let bound = Ratio::new(BigInt::one(), BigInt::from(&pb * l3 * l3) - 1);
        let partial = levels[3..]
            .iter()
            .map_while(|lv| lv.l.exact())
            .fold(Ratio::from_integer(BigInt::zero()), |acc, l| {
                acc + big_rational(l).recip()
            });
        push(
            "e",
            3,
            "sum_{j>=4} 1/l_j < 1/(p l_3^2 - 1) on the exact terms".to_string(),
            partial < bound,
        );
    }
    Ok(LevelPropsReport { p, checks })
}

fn short(n: &BigUint) -> String {
    let s = n.to_string();
    if s.len() <= 24 {
        s
    } else {
        format!("{}..({} digits)", &s[..12], s.len())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaSequence {
    pub p: usize,
    pub values: Vec<(usize, Interval)>,
    /// Fewer than `j_max` levels could be evaluated.
    pub truncated: bool,
}

pub fn lambda_sequence(p: usize, j_max: usize) -> Result<LambdaSequence> {
    if j_max == 0 {
        return Err(invalid("j_max must be at least 1"));
    }
    let levels = build_levels_with(
        p,
        &BuildOptions {
            max_level: j_max,
            ..BuildOptions::default()
        },
    )?;
    Ok(LambdaSequence {
        p,
        values: levels.iter().map(|lv| (lv.j, lv.lambda)).collect(),
        truncated: levels.len() < j_max,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyBound {
    pub p: usize,
    /// Rigorous lower bound on the topological entropy.
    pub value: f64,
    /// Level `j` at which the bound was attained.
    pub level: usize,
    pub lambda: Interval,
    /// Upper bound on `S_j = sum_{k >= j} 1/l_k`.
    pub s_upper: f64,
    /// `lambda_j - (lambda_j + 1) S_j` bound for every usable level.
    pub per_level: Vec<(usize, f64, f64)>,
}

/// `max_j lambda_j - (lambda_j + 1) * S_j`, with `S_j` bounded by the exact
/// terms `1/l_k`, `j <= k <= J`, plus `1/(p l_J^2 - 1)` for the rest (valid
/// for `J >= 3`, where `l_{k+1} > p l_k^2`).
pub fn entropy_lower_bound(p: usize) -> Result<EntropyBound> {
    if p < 3 {
        return Err(invalid("the entropy bound needs p >= 3"));
    }
    let levels = build_levels(p, BuildOptions::default().explicit_cap)?;
    let exact_l: Vec<&BigUint> = levels.iter().map_while(|lv| lv.l.exact()).collect();
    let last = exact_l.len();
    if last < 3 {
        return Err(invalid("fewer than three levels available"));
    }
    let l_last = exact_l[last - 1];
    let tail = Ratio::new(
        BigInt::one(),
        BigInt::from(BigUint::from(p) * l_last * l_last) - 1,
    );
    let mut per_level = Vec::new();
    let mut best: Option<(f64, usize, f64)> = None;
    let mut s = tail;
    for idx in (0..last).rev() {
        s += big_rational(exact_l[idx]).recip();
        let s_up = rational_upper(&s);
        let lam = levels[idx].lambda;
        let value = (lam.lo - ((lam.hi + 1.0) * s_up).next_up()).next_down();
        per_level.push((levels[idx].j, value, s_up));
        if best.is_none_or(|(v, _, _)| value > v) {
            best = Some((value, idx, s_up));
        }
    }
    per_level.reverse();
    let (value, idx, s_upper) = best.unwrap();
    Ok(EntropyBound {
        p,
        value,
        level: levels[idx].j,
        lambda: levels[idx].lambda,
        s_upper,
        per_level,
    })
}

/// `(r_j - k + 1) / (2 m_j l_j)`.
pub fn mu_cylinder_lower_bound(
    levels: &[ConstructionLevel],
    j: usize,
    k: u64,
) -> Result<Ratio<BigUint>> {
    let lv = levels
        .iter()
        .find(|lv| lv.j == j)
        .ok_or_else(|| invalid(format!("level {j} not built")))?;
    let (Some(r), Some(m), Some(l)) = (lv.r.exact(), lv.m.exact(), lv.l.exact()) else {
        return Err(Error::NotExplicit { level: j });
    };
    let k = BigUint::from(k);
    if k.is_zero() || &k > r {
        return Err(invalid(format!("k must lie in 1..=r_{j} = {r}")));
    }
    Ok(Ratio::new(r - k + 1u32, BigUint::from(2u32) * m * l))
}

/// Why the materialized prefix is periodic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Periodicity {
    /// `x[0, (r_J + 1) l_J)` is `w-bar_J` repeated.
    pub level: usize,
    pub period: usize,
    pub ln_r: Option<Interval>,
    /// Bounds on `ln((r_J + 1) l_J)`, the length of the justified prefix.
    pub ln_valid_length: Option<Interval>,
    pub statement: String,
}

/// The point `x`, served from the deepest materialized first word.
#[derive(Debug, Clone)]
pub struct GrillenbergerStream {
    p: usize,
    levels: Vec<ConstructionLevel>,
    period: Arc<Vec<u8>>,
    period_level: usize,
    /// Prefix length up to which `x` is `w-bar_J`-periodic; `None` when it
    /// exceeds every `u64`.
    valid_length: Option<u64>,
}

impl GrillenbergerStream {
    pub fn new(p: usize) -> Result<Self> {
        Self::with_options(p, &BuildOptions::default())
    }

    pub fn with_options(p: usize, opts: &BuildOptions) -> Result<Self> {
        let levels = build_levels_with(p, opts)?;
        let top = levels
            .iter()
            .rev()
            .find(|lv| lv.w_bar.is_some())
            .expect("w-bar_1 is always materialized");
        let period = Arc::clone(top.w_bar.as_ref().unwrap());
        let period_level = top.j;
        let valid_length = match &top.r {
            Magnitude::Exact(r) => ((r + 1u32) * period.len()).to_u64(),
            Magnitude::Ln(i) if i.lo < 44.0 => {
                Some((i.lo.exp() as u64).saturating_mul(period.len() as u64))
            }
            _ => None,
        };
        Ok(Self {
            p,
            levels,
            period,
            period_level,
            valid_length,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn levels(&self) -> &[ConstructionLevel] {
        &self.levels
    }

    /// `w-bar_J` for the deepest materialized level `J`.
    pub fn period(&self) -> &[u8] {
        &self.period
    }

    pub fn periodicity(&self) -> Periodicity {
        let top = &self.levels[self.period_level - 1];
        let ln_r = top.r.ln();
        let ln_valid_length = ln_r.map(|lr| {
            let ll = ln_big(&BigUint::from(self.period.len()));
            // ln((r+1) l) <= ln r + ln l + 1/r
            Interval::new(
                (lr.lo + ll.lo).next_down(),
                (lr.hi + ll.hi + (-lr.lo).exp()).next_up(),
            )
        });
        let statement = format!(
            "x[0, l_{j1}) = w-bar_{j1} begins with r_{j} + 1 copies of w-bar_{j}, so x is \
             w-bar_{j}-periodic on its first (r_{j} + 1) l_{j} symbols; {r}",
            j = self.period_level,
            j1 = self.period_level + 1,
            r = match (&top.r, ln_r) {
                (Magnitude::Exact(v), _) if v.bits() <= 64 =>
                    format!("r_{} = {v}", self.period_level),
                (_, Some(lr)) => format!("ln r_{} in {lr}", self.period_level),
                _ => format!("r_{} = {}", self.period_level, top.r),
            },
        );
        Periodicity {
            level: self.period_level,
            period: self.period.len(),
            ln_r,
            ln_valid_length,
            statement,
        }
    }

    /// `x[0, length)`.
    pub fn x_prefix(&self, length: usize) -> Result<Word> {
        if let Some(limit) = self.valid_length {
            if length as u64 > limit {
                return Err(Error::InsufficientPrefix {
                    needed: length,
                    available: limit as usize,
                });
            }
        }
        let symbols = self.period.iter().copied().cycle().take(length).collect();
        Word::new(symbols, self.p)
    }

    /// `x` as a lazily read sequence.
    pub fn sequence(&self) -> SymbolSequence {
        let period = Arc::clone(&self.period);
        let limit = self
            .valid_length
            .map_or(usize::MAX, |v| v.min(usize::MAX as u64) as usize);
        let source = (0..period.len())
            .cycle()
            .map(move |i| period[i])
            .take(limit);
        SymbolSequence::from_source(self.p, format!("construction(p={})", self.p), source)
            .expect("alphabet validated")
    }
}

pub fn x_prefix(stream: &GrillenbergerStream, length: usize) -> Result<Word> {
    stream.x_prefix(length)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremCConfig {
    pub p: usize,
    /// Word lengths for the `sum_w freq(w)^2` surrogate.
    pub n_list: Vec<usize>,
    /// The surrogate scans this many periods of `x`.
    pub scan_periods: usize,
    /// Windows for the local entropy estimate.
    pub entropy_n: usize,
    /// Radii `2^-eps_from ..= 2^-eps_to`.
    pub eps_from: u32,
    pub eps_to: u32,
    pub m_list: Vec<usize>,
    /// Longer embedding lengths reported as a supplementary diagnostic.
    pub extended_m_list: Vec<usize>,
    pub ceiling: f64,
    pub cesaro_offsets: usize,
    pub horizon: usize,
    pub estimator: EntropyConfig,
}

impl Default for TheoremCConfig {
    fn default() -> Self {
        Self {
            p: 3,
            n_list: vec![3, 24, 100, 500],
            scan_periods: 2,
            entropy_n: 100_000,
            eps_from: 1,
            eps_to: 6,
            m_list: (1..=12).collect(),
            extended_m_list: (20..=32).collect(),
            ceiling: 0.05,
            cesaro_offsets: 8,
            horizon: 64,
            estimator: EntropyConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TildeRow {
    pub n: usize,
    /// `sum_w freq(w)^2` over `n`-words of the scanned prefix.
    pub c_hat: f64,
    /// `-(1/n) log c_hat`.
    pub rate: f64,
    /// Level `j` with `l_j <= n < l_{j+1}`.
    pub level: Option<usize>,
    pub regime: String,
    pub bound: Option<f64>,
    pub slack: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyCheck {
    pub n: usize,
    pub m_range: (usize, usize),
    pub upper: f64,
    pub lower: f64,
    pub ceiling: f64,
    pub passed: bool,
    pub estimate: EntropyEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CesaroRow {
    pub level: usize,
    pub stride: usize,
    pub word: Word,
    pub expected: String,
    pub window: usize,
    pub counts: Vec<u64>,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalityCheck {
    /// Every word occurring in `w-bar_j` occurs in every word of `M_{j+1}`,
    /// for each `j` with `M_{j+1}` enumerated.
    pub levels_checked: Vec<usize>,
    pub subwords_in_every_word: bool,
    /// Every `l_2`-window of `x[0, 2 l_J)` occurs inside each of the first
    /// blocks `x[k l_J, (k+1) l_J + l_2 - 1)`.
    pub windows_in_every_block: bool,
    /// Largest distance between consecutive occurrences of an `l_2`-window.
    pub max_gap: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremCReport {
    pub p: usize,
    pub periodicity: Periodicity,
    pub tilde: Vec<TildeRow>,
    pub tilde_decreasing: bool,
    pub entropy: EntropyCheck,
    /// Supplementary, not part of the verdict.
    pub extended_entropy: Option<EntropyCheck>,
    pub cesaro: Vec<CesaroRow>,
    pub minimality: MinimalityCheck,
    pub entropy_bound: EntropyBound,
}

impl TheoremCReport {
    pub fn tilde_passed(&self) -> bool {
        self.tilde.iter().all(|r| r.passed) && self.tilde_decreasing
    }

    pub fn cesaro_passed(&self) -> bool {
        self.cesaro.iter().all(|r| r.exact)
    }

    pub fn passed(&self) -> bool {
        self.tilde_passed()
            && self.entropy.passed
            && self.cesaro_passed()
            && self.minimality.passed
            && self.entropy_bound.value > 0.0
    }
}

fn collision_sum(text: &[u8], n: usize, scan: usize) -> f64 {
    let mut counts: std::collections::HashMap<&[u8], u64> = std::collections::HashMap::new();
    for i in 0..scan {
        *counts.entry(&text[i..i + n]).or_insert(0) += 1;
    }
    let total: u128 = counts
        .values()
        .map(|&c| u128::from(c) * u128::from(c))
        .sum();
    total as f64 / (scan as f64 * scan as f64)
}

fn tilde_bound(levels: &[ConstructionLevel], n: usize) -> (Option<usize>, String, Option<f64>) {
    let exact = |lv: &ConstructionLevel| -> Option<(f64, f64)> {
        Some((lv.l.exact()?.to_f64()?, lv.r.exact()?.to_f64()?))
    };
    let Some(idx) = (1..levels.len()).find(|&i| {
        let lo = levels[i].l.exact().and_then(|v| v.to_u64());
        let hi = levels
            .get(i + 1)
            .and_then(|lv| lv.l.exact())
            .and_then(|v| v.to_u64());
        lo.is_some_and(|lo| lo <= n as u64) && hi.is_none_or(|hi| (n as u64) < hi)
    }) else {
        return (None, "n < l_2".into(), None);
    };
    let lv = &levels[idx];
    let Some((l, r)) = exact(lv) else {
        return (Some(lv.j), "level not exact".into(), None);
    };
    let ln2 = std::f64::consts::LN_2;
    if (n as f64) < r / 2.0 * l {
        (
            Some(lv.j),
            "n < (r_j/2) l_j".into(),
            Some((4.0 * l.ln() + 4.0 * ln2) / l),
        )
    } else {
        (
            Some(lv.j),
            "n >= (r_j/2) l_j".into(),
            Some(8.0 * lv.lambda.hi / r + (8.0 * l.ln() + 12.0 * ln2) / (r * l)),
        )
    }
}

fn entropy_check(
    x: &SymbolSequence,
    cfg: &TheoremCConfig,
    m_list: &[usize],
) -> Result<EntropyCheck> {
    let m_max = m_list.iter().copied().max().unwrap_or(1);
    let traj = x.shift_trajectory(cfg.entropy_n + m_max - 1, cfg.horizon)?;
    let grid = EpsilonGrid::dyadic(cfg.eps_from, cfg.eps_to)?;
    let (upper, lower) =
        local_correlation_entropy(&traj, &grid, m_list, cfg.entropy_n, &cfg.estimator)?;
    Ok(EntropyCheck {
        n: cfg.entropy_n,
        m_range: upper.m_range,
        upper: upper.value,
        lower: lower.value,
        ceiling: cfg.ceiling,
        passed: upper.value < cfg.ceiling,
        estimate: upper,
    })
}

fn minimality(stream: &GrillenbergerStream) -> Result<MinimalityCheck> {
    let levels = stream.levels();
    let mut levels_checked = Vec::new();
    let mut subwords_in_every_word = true;
    for pair in levels.windows(2) {
        let (Some(wb), Some(next)) = (pair[0].w_bar(), pair[1].words()) else {
            continue;
        };
        levels_checked.push(pair[0].j);
        for len in 1..=wb.len() {
            let subwords: HashSet<&[u8]> = wb.windows(len).collect();
            for w in next {
                let present: HashSet<&[u8]> = w.windows(len).collect();
                if !subwords.is_subset(&present) {
                    subwords_in_every_word = false;
                }
            }
        }
    }
    let period = stream.period().len();
    let l2 = levels
        .get(1)
        .and_then(|lv| lv.l.exact())
        .and_then(|v| v.to_usize())
        .unwrap_or(1);
    let text = stream.x_prefix(4 * period + l2)?;
    let text = text.symbols();
    let windows: HashSet<&[u8]> = text[..2 * period].windows(l2).collect();
    let mut windows_in_every_block = true;
    for k in 0..3 {
        let block: HashSet<&[u8]> = text[k * period..(k + 1) * period + l2 - 1]
            .windows(l2)
            .collect();
        windows_in_every_block &= windows.is_subset(&block);
    }
    let mut last_seen: std::collections::HashMap<&[u8], usize> = std::collections::HashMap::new();
    let mut max_gap = 0;
    for i in 0..=text.len() - l2 {
        let w = &text[i..i + l2];
        let prev = last_seen.insert(w, i);
        max_gap = max_gap.max(i - prev.unwrap_or(0));
    }
    let passed = subwords_in_every_word && windows_in_every_block && max_gap <= 2 * period;
    Ok(MinimalityCheck {
        levels_checked,
        subwords_in_every_word,
        windows_in_every_block,
        max_gap,
        passed,
    })
}

/// Empirical checks of the zero correlation entropy of `x` against the
/// positive entropy bound.
pub fn theorem_c_report(cfg: &TheoremCConfig) -> Result<TheoremCReport> {
    let stream = GrillenbergerStream::new(cfg.p)?;
    let levels = stream.levels();
    let x = stream.sequence();
    let period = stream.period().len();

    let n_max = cfg.n_list.iter().copied().max().unwrap_or(1);
    let scan = cfg.scan_periods.max(1) * period;
    let text = x.prefix(scan + n_max)?;
    let mut tilde = Vec::new();
    for &n in &cfg.n_list {
        if n == 0 {
            return Err(invalid("word lengths must be positive"));
        }
        let c_hat = collision_sum(&text, n, scan);
        let rate = -c_hat.ln() / n as f64;
        let (level, regime, bound) = tilde_bound(levels, n);
        let slack = std::f64::consts::LN_2 / n as f64;
        tilde.push(TildeRow {
            n,
            c_hat,
            rate,
            level,
            regime,
            bound,
            slack,
            passed: bound.is_none_or(|b| rate <= b + slack),
        });
    }
    let tilde_decreasing = tilde.windows(2).all(|w| w[1].rate < w[0].rate);

    let entropy = entropy_check(&x, cfg, &cfg.m_list)?;
    let extended_entropy = if cfg.extended_m_list.len() >= 3 {
        Some(entropy_check(&x, cfg, &cfg.extended_m_list)?)
    } else {
        None
    };

    let mut cesaro = Vec::new();
    for idx in 0..levels.len().saturating_sub(1) {
        let lv = &levels[idx];
        let (Some(words), Some(l), Some(r), Some(l_next)) = (
            lv.words(),
            lv.l.exact().and_then(|v| v.to_usize()),
            lv.r.exact().and_then(|v| v.to_u64()),
            levels[idx + 1].l.exact().and_then(|v| v.to_u64()),
        ) else {
            continue;
        };
        if l_next as usize > period || period % l != 0 {
            continue;
        }
        let window = period / l;
        for (k, w) in words.iter().enumerate() {
            let u = Word::new(w.clone(), cfg.p)?;
            let report = cesaro_density_check(&x, &u, l, window, cfg.cesaro_offsets)?;
            let expected = Ratio::new(if k == 0 { r + 1 } else { 1 }, l_next);
            cesaro.push(CesaroRow {
                level: lv.j,
                stride: l,
                exact: report.is_exactly(expected),
                expected: expected.to_string(),
                word: u,
                window,
                counts: report.counts,
            });
        }
    }

    Ok(TheoremCReport {
        p: cfg.p,
        periodicity: stream.periodicity(),
        tilde,
        tilde_decreasing,
        entropy,
        extended_entropy,
        cesaro,
        minimality: minimality(&stream)?,
        entropy_bound: entropy_lower_bound(cfg.p)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn row(lv: &ConstructionLevel) -> (usize, BigUint, BigUint, BigUint) {
        (
            lv.j,
            lv.l.exact().unwrap().clone(),
            lv.m.exact().unwrap().clone(),
            lv.r.exact().unwrap().clone(),
        )
    }

    #[test]
    fn p3_table() {
        let levels = build_levels(3, 10_000).unwrap();
        assert_eq!(row(&levels[0]), (1, big(1), big(3), big(0)));
        assert_eq!(row(&levels[1]), (2, big(3), big(6), big(2)));
        assert_eq!(row(&levels[2]), (3, big(24), big(720), big(30)));
        assert_eq!(levels[3].l.exact(), Some(&big(18000)));
        assert_eq!(levels[3].m.exact(), Some(&factorial(720)));
        assert_eq!(levels.len(), 5);
        assert!(matches!(levels[4].m, Magnitude::LnLn(_)));
        assert!(levels[2].is_explicit() && !levels[3].is_explicit());
    }

    #[test]
    fn p4_and_p5_tables() {
        let levels = build_levels(4, 10_000).unwrap();
        assert_eq!(levels[2].l.exact(), Some(&big(120)));
        assert_eq!(levels[2].m.exact(), Some(&factorial(24)));
        assert!(matches!(levels[3].m, Magnitude::Ln(_)));
        let levels = build_levels(5, 10_000).unwrap();
        assert_eq!(levels[2].l.exact(), Some(&big(720)));
    }

    #[test]
    fn binary_case_needs_flag() {
        assert!(build_levels(2, 10_000).is_err());
        let opts = BuildOptions {
            allow_binary: true,
            max_level: 6,
            ..BuildOptions::default()
        };
        let levels = build_levels_with(2, &opts).unwrap();
        for lv in &levels[1..] {
            // l_j = 2 * 3^(j-2), m_j = 2, r_j = 1
            assert_eq!(lv.l.exact(), Some(&big(2 * 3u64.pow(lv.j as u32 - 2))));
            assert_eq!(lv.m.exact(), Some(&big(2)));
            assert_eq!(lv.r.exact(), Some(&big(1)));
        }
        assert!(build_levels(1, 10_000).is_err());
    }

    #[test]
    fn explicit_words_distinct_and_sized() {
        let levels = build_levels(3, 10_000).unwrap();
        for lv in levels.iter().filter(|lv| lv.is_explicit()) {
            let words = lv.words().unwrap();
            let l = lv.l.exact().unwrap().to_usize().unwrap();
            assert_eq!(words.len(), lv.m.exact().unwrap().to_usize().unwrap());
            assert!(words.iter().all(|w| w.len() == l));
            let set: HashSet<&Vec<u8>> = words.iter().collect();
            assert_eq!(set.len(), words.len());
        }
    }

    #[test]
    fn w_bar_starts_with_repeated_predecessor() {
        let levels = build_levels(3, 10_000).unwrap();
        for pair in levels.windows(2) {
            let (Some(a), Some(b)) = (pair[0].w_bar(), pair[1].w_bar()) else {
                continue;
            };
            let r = pair[0].r.exact().unwrap().to_usize().unwrap();
            for c in 0..=r {
                assert_eq!(&b[c * a.len()..(c + 1) * a.len()], a);
            }
        }
    }

    #[test]
    fn prefix_golden_values() {
        let s = GrillenbergerStream::new(3).unwrap();
        assert_eq!(s.x_prefix(1).unwrap().to_string(), "0");
        assert_eq!(s.x_prefix(3).unwrap().to_string(), "012");
        assert_eq!(
            s.x_prefix(24).unwrap().to_string(),
            "012012012021102120201210"
        );
        assert_eq!(s.period().len(), 18000);
        let levels = s.levels();
        for lv in levels {
            if let Some(wb) = lv.w_bar() {
                assert_eq!(s.x_prefix(wb.len()).unwrap().symbols(), wb);
            }
        }
        let a = s.x_prefix(500).unwrap();
        let b = s.x_prefix(40_000).unwrap();
        assert_eq!(&b.symbols()[..500], a.symbols());
    }

    #[test]
    fn w_bar_4_is_w_bar_3_power_then_m3() {
        let levels = build_levels(3, 10_000).unwrap();
        let w4 = levels[3].w_bar().unwrap();
        let w3 = levels[2].w_bar().unwrap();
        for c in 0..30 {
            assert_eq!(&w4[c * 24..(c + 1) * 24], w3);
        }
        let tail: Vec<u8> = levels[2].words().unwrap().concat();
        assert_eq!(&w4[720..], &tail[..]);
    }

    #[test]
    fn level_properties_hold() {
        for p in [3, 4, 5] {
            let levels = build_levels(p, 10_000).unwrap();
            let report = verify_level_props(&levels).unwrap();
            let failures: Vec<_> = report.failures().collect();
            assert!(failures.is_empty(), "p = {p}: {failures:?}");
            for prop in ["a", "b", "d", "e"] {
                assert!(
                    report.checks.iter().any(|c| c.property == prop),
                    "p {p} {prop}"
                );
            }
        }
        let levels = build_levels(3, 10_000).unwrap();
        let report = verify_level_props(&levels).unwrap();
        let a3 = report
            .checks
            .iter()
            .find(|c| c.property == "a" && c.level == 3)
            .unwrap();
        assert!(a3.statement.contains("= 30 "));
    }

    #[test]
    fn lambda_values() {
        let seq = lambda_sequence(3, 6).unwrap();
        assert!(seq.truncated);
        assert_eq!(seq.values.len(), 5);
        let lam = |j: usize| seq.values[j - 1].1;
        assert!(lam(1).contains(1.098_612_288_668_109_7));
        assert!(lam(2).contains(0.597_253_156_409_351_7));
        assert!(lam(3).contains(0.274_135_467_167_087_5));
        assert!(lam(3).lo > 0.25 && lam(3).hi < 0.28);
        // sum_{i <= 720} ln i / 18000 evaluated in 50-digit arithmetic
        assert!(lam(4).contains(0.223_403_864_029_289_76));
        for w in seq.values.windows(2) {
            assert!(w[1].1.hi < w[0].1.lo);
        }
        assert!(lam(4).hi - lam(4).lo < 1e-12);
        assert!(lam(5).hi - lam(5).lo < 1e-12);
        assert!(!lambda_sequence(3, 4).unwrap().truncated);
    }

    #[test]
    fn lambda_five_ratio_form() {
        // ln(m!) / ((m + r) l) with m = 720!, r = m / 18000, l = 18000:
        // (ln m - 1) / (l + 1) up to terms below 1e-1700
        let ln_m = ln_big_point(&factorial(720));
        let approx = (ln_m - 1.0) / 18001.0;
        let seq = lambda_sequence(3, 5).unwrap();
        let lam5 = seq.values[4].1;
        assert!((lam5.mid() - approx).abs() < 1e-12, "{lam5} vs {approx}");
    }

    #[test]
    fn entropy_bound_positive() {
        let b3 = entropy_lower_bound(3).unwrap();
        assert!(b3.value > 0.16, "{b3:?}");
        assert!(b3.value < 0.2234);
        let j3 = b3.per_level.iter().find(|(j, _, _)| *j == 3).unwrap();
        assert!(j3.2 < 1.0 / 12.0);
        assert!(j3.1 >= 0.1678);
        for p in [4, 5] {
            assert!(entropy_lower_bound(p).unwrap().value > 0.0);
        }
        assert!(entropy_lower_bound(2).is_err());
    }

    #[test]
    fn cylinder_bounds() {
        let levels = build_levels(3, 10_000).unwrap();
        let q = |j, k| mu_cylinder_lower_bound(&levels, j, k).unwrap();
        assert_eq!(q(2, 1), Ratio::new(big(1), big(18)));
        assert_eq!(q(3, 30), Ratio::new(big(1), big(34560)));
        assert_eq!(q(3, 1), Ratio::new(big(1), big(1152)));
        assert!(mu_cylinder_lower_bound(&levels, 3, 31).is_err());
        assert!(mu_cylinder_lower_bound(&levels, 3, 0).is_err());
        assert!(matches!(
            mu_cylinder_lower_bound(&levels, 5, 1),
            Err(Error::NotExplicit { level: 5 })
        ));
    }

    #[test]
    fn periodicity_justification() {
        let s = GrillenbergerStream::new(3).unwrap();
        let per = s.periodicity();
        assert_eq!(per.level, 4);
        // ln r_4 = ln(720!) - ln(18000)
        let expected = 0.223_403_864_029_289_76 * 18000.0 - 18000f64.ln();
        assert!((per.ln_r.unwrap().mid() - expected).abs() < 1e-8);
        assert!(per.statement.contains("r_4"));
    }

    #[test]
    fn stride_24_counts_in_one_block() {
        let s = GrillenbergerStream::new(3).unwrap();
        let x = s.sequence();
        let levels = s.levels();
        let words = levels[2].words().unwrap();
        let first = Word::new(words[0].clone(), 3).unwrap();
        let r = cesaro_density_check(&x, &first, 24, 750, 1).unwrap();
        assert_eq!(r.counts, vec![31]);
        let other = Word::new(words[17].clone(), 3).unwrap();
        let r = cesaro_density_check(&x, &other, 24, 750, 1).unwrap();
        assert_eq!(r.counts, vec![1]);
        let w2 = Word::from_digits("012", 3).unwrap();
        let r = cesaro_density_check(&x, &w2, 3, 6000, 5).unwrap();
        assert!(r.is_exactly(Ratio::new(1, 8)));
        let w2 = Word::from_digits("210", 3).unwrap();
        let r = cesaro_density_check(&x, &w2, 3, 6000, 5).unwrap();
        assert!(r.is_exactly(Ratio::new(1, 24)));
    }

    #[test]
    fn report_tilde_and_cesaro_parts() {
        let cfg = TheoremCConfig {
            entropy_n: 20_000,
            extended_m_list: vec![],
            ..TheoremCConfig::default()
        };
        let rep = theorem_c_report(&cfg).unwrap();
        assert!(rep.tilde_passed(), "{:?}", rep.tilde);
        assert!(rep.cesaro_passed());
        assert_eq!(rep.cesaro.len(), 3 + 6 + 720);
        assert!(rep.minimality.passed, "{:?}", rep.minimality);
        assert!(rep.entropy_bound.value > 0.16);
        let rates: Vec<f64> = rep.tilde.iter().map(|t| t.rate).collect();
        assert!((rates[0] - 0.878).abs() < 0.05, "{rates:?}");
    }
}
