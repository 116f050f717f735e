//! Words, lazily generated symbol sequences, Bernoulli measures and word
//! statistics on one-sided shifts.

use std::collections::HashSet;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_rational::Ratio;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::space::{ShiftSpace, Trajectory};

/// A finite word over `{0, .., p-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    symbols: Vec<u8>,
    p: usize,
}

impl Word {
    pub fn new(symbols: Vec<u8>, p: usize) -> Result<Self> {
        if !(2..=256).contains(&p) {
            return Err(invalid(format!(
                "alphabet size must be in 2..=256, got {p}"
            )));
        }
        if let Some(bad) = symbols.iter().find(|&&s| s as usize >= p) {
            return Err(invalid(format!(
                "symbol {bad} outside alphabet of size {p}"
            )));
        }
        Ok(Self { symbols, p })
    }

    /// Parses a digit string such as `"0120"`.
    pub fn from_digits(digits: &str, p: usize) -> Result<Self> {
        let symbols = digits
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| invalid(format!("not a digit: {c:?}")))
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(symbols, p)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn alphabet(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Digits for alphabets up to 10, otherwise dot-separated symbols.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_symbols(f, &self.symbols, self.p)
    }
}

pub(crate) fn write_symbols(out: &mut impl fmt::Write, symbols: &[u8], p: usize) -> fmt::Result {
    if p <= 10 {
        for &s in symbols {
            out.write_char(char::from(b'0' + s))?;
        }
        Ok(())
    } else {
        for (i, s) in symbols.iter().enumerate() {
            if i > 0 {
                out.write_char('.')?;
            }
            write!(out, "{s}")?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

type Source = Box<dyn Iterator<Item = u8> + Send>;

struct SequenceState {
    cache: Vec<u8>,
    source: Source,
    exhausted: bool,
}

/// An infinite (or finite) sequence over `{0, .., p-1}` produced on demand.
///
/// Reads extend a cached prefix, so `prefix(n)` is a stable function of `n`.
pub struct SymbolSequence {
    p: usize,
    label: String,
    state: Mutex<SequenceState>,
}

impl fmt::Debug for SymbolSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolSequence")
            .field("p", &self.p)
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

impl SymbolSequence {
    /// Wraps a symbol producer. Symbols outside the alphabet are reported as
    /// errors when read.
    pub fn from_source(
        p: usize,
        label: impl Into<String>,
        source: impl Iterator<Item = u8> + Send + 'static,
    ) -> Result<Self> {
        if p < 2 {
            return Err(invalid("alphabet size must be at least 2"));
        }
        Ok(Self {
            p,
            label: label.into(),
            state: Mutex::new(SequenceState {
                cache: Vec::new(),
                source: Box::new(source),
                exhausted: false,
            }),
        })
    }

    pub fn bernoulli(spec: &BernoulliSpec) -> Self {
        let dist = WeightedIndex::new(spec.pi()).expect("validated probability vector");
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed());
        let source = std::iter::repeat_with(move || dist.sample(&mut rng) as u8);
        Self::from_source(
            spec.alphabet(),
            format!("bernoulli(seed={})", spec.seed()),
            source,
        )
        .expect("alphabet checked by spec")
    }

    /// `w w w ...`
    pub fn periodic(word: &Word) -> Result<Self> {
        if word.is_empty() {
            return Err(invalid("period word must be nonempty"));
        }
        let symbols = word.symbols().to_vec();
        Self::from_source(
            word.alphabet(),
            format!("({word})^inf"),
            symbols.into_iter().cycle(),
        )
    }

    pub fn constant(symbol: u8, p: usize) -> Result<Self> {
        Self::periodic(&Word::new(vec![symbol], p)?)
    }

    /// A finite sequence; reading past its end is an error.
    pub fn finite(word: &Word) -> Self {
        Self::from_source(
            word.alphabet(),
            "finite",
            word.symbols().to_vec().into_iter(),
        )
        .expect("word alphabet is valid")
    }

    pub fn alphabet(&self) -> usize {
        self.p
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The first `n` symbols.
    pub fn prefix(&self, n: usize) -> Result<Vec<u8>> {
        let mut state = self.state.lock().expect("sequence lock poisoned");
        while state.cache.len() < n && !state.exhausted {
            let missing = n - state.cache.len();
            let SequenceState { cache, source, .. } = &mut *state;
            let before = cache.len();
            cache.extend(source.by_ref().take(missing));
            if let Some(bad) = cache[before..].iter().find(|&&s| s as usize >= self.p) {
                let bad = *bad;
                cache.truncate(before);
                return Err(invalid(format!(
                    "source produced symbol {bad} outside alphabet of size {}",
                    self.p
                )));
            }
            if cache.len() - before < missing {
                state.exhausted = true;
            }
        }
        if state.cache.len() < n {
            return Err(Error::InsufficientPrefix {
                needed: n,
                available: state.cache.len(),
            });
        }
        Ok(state.cache[..n].to_vec())
    }

    pub fn prefix_word(&self, n: usize) -> Result<Word> {
        Word::new(self.prefix(n)?, self.p)
    }

    /// Trajectory of `x` under the shift: positions `0..len` with the shift
    /// metric compared over `horizon` symbols.
    pub fn shift_trajectory(&self, len: usize, horizon: usize) -> Result<Trajectory<ShiftSpace>> {
        let symbols = self.prefix(len + horizon)?;
        let space = ShiftSpace::new(Arc::from(symbols), self.p, horizon)?;
        Ok(Trajectory::new(
            (0..len).collect(),
            Arc::new(space),
            self.label.clone(),
        ))
    }
}

/// `2^-k` for the first disagreement `k < horizon`, else 0.
pub fn shift_metric(x: &SymbolSequence, y: &SymbolSequence, horizon: usize) -> Result<f64> {
    if horizon == 0 {
        return Err(invalid("horizon must be at least 1"));
    }
    let a = x.prefix(horizon)?;
    let b = y.prefix(horizon)?;
    Ok(shift_metric_words(&a, &b, horizon))
}

/// Shift metric between two finite words, truncated at `horizon` and at the
/// shorter word.
pub fn shift_metric_words(a: &[u8], b: &[u8], horizon: usize) -> f64 {
    a.iter()
        .zip(b)
        .take(horizon)
        .position(|(s, t)| s != t)
        .map_or(0.0, |k| 0.5f64.powi(k as i32))
}

/// Probability vector with a seed for sampling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BernoulliSpec {
    pi: Vec<f64>,
    seed: u64,
}

impl BernoulliSpec {
    /// Entries must be nonnegative and sum to 1 within `1e-12`; they are then
    /// divided by their sum.
    pub fn new(pi: Vec<f64>, seed: u64) -> Result<Self> {
        if pi.len() < 2 {
            return Err(invalid("probability vector needs at least two entries"));
        }
        if pi.len() > 256 {
            return Err(invalid("at most 256 symbols are supported"));
        }
        if pi.iter().any(|&v| !(v.is_finite() && v >= 0.0)) {
            return Err(invalid("probabilities must be finite and nonnegative"));
        }
        let total: f64 = pi.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self {
            pi: pi.iter().map(|v| v / total).collect(),
            seed,
        })
    }

    pub fn uniform(p: usize, seed: u64) -> Result<Self> {
        Self::new(vec![1.0 / p as f64; p], seed)
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn alphabet(&self) -> usize {
        self.pi.len()
    }

    fn collision(&self) -> f64 {
        self.pi.iter().map(|v| v * v).sum()
    }
}

/// `sum over k-words of mu([w])^2 = (sum_i pi_i^2)^k`.
pub fn tilde_mu_bernoulli(spec: &BernoulliSpec, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(invalid("word length k must be at least 1"));
    }
    Ok(spec.collision().powi(k as i32))
}

/// The same sum by enumerating all `p^k` words.
pub fn tilde_mu_enumerated(spec: &BernoulliSpec, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(invalid("word length k must be at least 1"));
    }
    let p = spec.alphabet();
    let count = p
        .checked_pow(k as u32)
        .filter(|&c| c <= 1 << 24)
        .ok_or_else(|| invalid("too many words to enumerate"))?;
    let mut total = 0.0;
    for code in 0..count {
        let mut rest = code;
        let mut mass = 1.0;
        for _ in 0..k {
            mass *= spec.pi[rest % p];
            rest /= p;
        }
        total += mass * mass;
    }
    Ok(total)
}

/// `-log sum_i pi_i^2`.
pub fn bernoulli_correlation_entropy(spec: &BernoulliSpec) -> f64 {
    (-spec.collision().ln()).max(0.0)
}

/// Max and min of `-(1/m) log tilde(m)` over the tail half of the list.
pub fn measure_entropy_from_tilde(tilde: &[(usize, f64)]) -> Result<(f64, f64)> {
    if tilde.is_empty() {
        return Err(invalid("tilde list is empty"));
    }
    let mut rates = Vec::with_capacity(tilde.len());
    for &(m, v) in tilde {
        if m == 0 {
            return Err(invalid("m must be at least 1"));
        }
        if !(v > 0.0 && v <= 1.0) {
            return Err(invalid(format!(
                "tilde value {v} at m = {m} is outside (0, 1]"
            )));
        }
        rates.push((-v.ln() / m as f64).max(0.0));
    }
    let tail = &rates[crate::correlation::tail_start(rates.len(), 0.5)..];
    Ok((
        tail.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        tail.iter().copied().fold(f64::INFINITY, f64::min),
    ))
}

/// Occurrences of `u` in `v` at positions `i*l`, fully contained in `v`.
pub fn occurrences_at_stride(v: &[u8], u: &[u8], l: usize) -> usize {
    if u.len() > v.len() {
        return 0;
    }
    (0..=v.len() - u.len())
        .step_by(l)
        .filter(|&q| &v[q..q + u.len()] == u)
        .count()
}

/// `tau_v^(l)(u)`: stride-`l` occurrences of `u` in `v` over `floor(|v|/l)`.
pub fn word_frequency(v: &Word, u: &Word, l: usize) -> Result<Ratio<u64>> {
    if l == 0 {
        return Err(invalid("stride must be at least 1"));
    }
    if u.len() > v.len() {
        return Err(Error::WordTooLong {
            word: u.len(),
            text: v.len(),
        });
    }
    let slots = (v.len() / l) as u64;
    if slots == 0 {
        return Err(invalid("stride exceeds the text length"));
    }
    let count = occurrences_at_stride(v.symbols(), u.symbols(), l) as u64;
    Ok(Ratio::new(count, slots))
}

/// Stride-`l` occurrence density of a word over sliding windows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CesaroReport {
    pub word: Word,
    pub stride: usize,
    /// Window length in stride steps (covers `window * stride` positions).
    pub window: usize,
    pub offsets_tested: usize,
    /// Occurrence count in each window.
    pub counts: Vec<u64>,
    /// Mean over windows of `count / (window * stride)`.
    pub density: f64,
    pub max_window_deviation: f64,
}

impl CesaroReport {
    /// Whether every window has exactly `num / den` density.
    pub fn is_exactly(&self, density: Ratio<u64>) -> bool {
        let positions = (self.window * self.stride) as u64;
        self.counts
            .iter()
            .all(|&c| Ratio::new(c, positions) == density)
    }
}

/// For each offset `j < offsets`, counts stride-`l` occurrences of `u` at
/// positions `i*l`, `j <= i < j + window`. Densities are per position, so a
/// word occurring in every stride slot has density `1/l`.
pub fn cesaro_density_check(
    x: &SymbolSequence,
    u: &Word,
    l: usize,
    window: usize,
    offsets: usize,
) -> Result<CesaroReport> {
    if l == 0 || window == 0 || offsets == 0 {
        return Err(invalid("stride, window and offsets must be positive"));
    }
    if u.alphabet() != x.alphabet() {
        return Err(invalid("word and sequence alphabets differ"));
    }
    let needed = l * (offsets + window) + u.len();
    let text = x.prefix(needed)?;
    let hits: Vec<u64> = (0..offsets + window)
        .map(|i| u64::from(&text[i * l..i * l + u.len()] == u.symbols()))
        .collect();
    let mut counts = Vec::with_capacity(offsets);
    let mut running: u64 = hits[..window].iter().sum();
    counts.push(running);
    for j in 1..offsets {
        running = running + hits[j + window - 1] - hits[j - 1];
        counts.push(running);
    }
    let positions = (window * l) as f64;
    let freqs: Vec<f64> = counts.iter().map(|&c| c as f64 / positions).collect();
    let density = counts.iter().sum::<u64>() as f64 / (positions * offsets as f64);
    let max_window_deviation = freqs
        .iter()
        .map(|f| (f - density).abs())
        .fold(0.0, f64::max);
    Ok(CesaroReport {
        word: u.clone(),
        stride: l,
        window,
        offsets_tested: offsets,
        counts,
        density,
        max_window_deviation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WordCount {
    pub n: usize,
    pub theta: u64,
    pub rate: f64,
}

/// Number of distinct `n`-windows starting in `[0, scan)`.
pub fn word_count_entropy(
    x: &SymbolSequence,
    n_list: &[usize],
    scan: usize,
) -> Result<Vec<WordCount>> {
    let n_max = n_list.iter().copied().max().unwrap_or(0);
    if n_list.contains(&0) {
        return Err(invalid("word lengths must be positive"));
    }
    if scan == 0 {
        return Err(invalid("scan length must be positive"));
    }
    let text = x.prefix(scan + n_max)?;
    Ok(n_list
        .iter()
        .map(|&n| {
            let words: HashSet<&[u8]> = (0..scan).map(|i| &text[i..i + n]).collect();
            let theta = words.len() as u64;
            WordCount {
                n,
                theta,
                rate: (theta as f64).ln() / n as f64,
            }
        })
        .collect())
}

/// A seeded Bernoulli sequence with its first `length` symbols materialized.
pub fn bernoulli_sample(spec: &BernoulliSpec, length: usize) -> Result<SymbolSequence> {
    if length == 0 {
        return Err(invalid("sample length must be at least 1"));
    }
    let x = SymbolSequence::bernoulli(spec);
    x.prefix(length)?;
    Ok(x)
}
