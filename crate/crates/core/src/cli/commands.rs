//! The experiment commands and their parameter tables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::config::{usage, Params, UsageError};
use super::output::{Artifacts, Table};
use super::CliError;
use crate::correlation::{
    iterate_scaling_check, local_correlation_dimension, local_correlation_entropy,
    CorrelationTable, EntropyConfig, EntropyEstimate,
};
use crate::graphs::verify_kappa;
use crate::grillenberger::{
    build_levels_with, entropy_lower_bound, theorem_c_report, verify_level_props, BuildOptions,
    GrillenbergerStream, TheoremCConfig,
};
use crate::interval::{
    countable_piece_report, logistic_report, tent_orbit_from_bits, theorem_b_report,
    IntervalMapSpec, LocalConfig, LogisticConfig, TheoremBConfig, TopologicalConfig,
};
use crate::invariants::run_invariant_suite;
use crate::space::{RealLine, ShiftSpace, Trajectory};
use crate::symbolic::{bernoulli_correlation_entropy, BernoulliSpec, SymbolSequence, Word};

/// One documented parameter.
#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub default: Option<&'static str>,
    pub help: &'static str,
    /// Boolean switch without a value.
    pub flag: bool,
    /// Also accepted as the first positional argument.
    pub positional: bool,
}

const fn key(name: &'static str, default: &'static str, help: &'static str) -> Key {
    Key {
        name,
        default: Some(default),
        help,
        flag: false,
        positional: false,
    }
}

const fn optional(name: &'static str, help: &'static str) -> Key {
    Key {
        name,
        default: None,
        help,
        flag: false,
        positional: false,
    }
}

const fn flag(name: &'static str, help: &'static str) -> Key {
    Key {
        name,
        default: None,
        help,
        flag: true,
        positional: false,
    }
}

const fn action(default: &'static str, help: &'static str) -> Key {
    Key {
        name: "action",
        default: Some(default),
        help,
        flag: false,
        positional: true,
    }
}

pub struct Ctx {
    pub params: Params,
    pub seed: Option<u64>,
}

impl Ctx {
    fn seed(&self) -> Result<u64, UsageError> {
        self.seed.ok_or_else(|| usage("--seed is required"))
    }
}

pub struct Command {
    pub name: &'static str,
    pub about: &'static str,
    pub keys: Vec<Key>,
    pub stochastic: fn(&Params) -> bool,
    pub run: fn(&Ctx) -> Result<Artifacts, CliError>,
}

fn source_keys(source: &'static str, p: &'static str) -> Vec<Key> {
    vec![
        key(
            "source",
            source,
            "bernoulli, periodic, construction, tent-bits or map",
        ),
        key("p", p, "alphabet size"),
        optional(
            "pi",
            "Bernoulli weights, e.g. 1/2,1/4,1/4 (default uniform)",
        ),
        optional("word", "period word for source = periodic"),
        key("horizon", "64", "symbols compared by the shift metric"),
        key("map", "tent", "interval map for source = map"),
        optional(
            "x0",
            "initial point for source = map (default drawn from the seed)",
        ),
        optional("length", "trajectory length (default: just long enough)"),
    ]
}

fn estimator_keys() -> Vec<Key> {
    vec![
        key(
            "rel-tol",
            "0.05",
            "plateau tolerance between successive radii",
        ),
        key(
            "tail-fraction",
            "0.5",
            "fraction of the n schedule used for limits",
        ),
        key("schedule-points", "5", "points of the n schedule"),
        key(
            "min-neighbors",
            "10",
            "close pairs per window needed to use a cell",
        ),
        key(
            "noise-floor",
            "0.05",
            "entropies below this are not used in ratios",
        ),
        key("fast", "true", "use the accelerated counting paths"),
    ]
}

fn estimator(p: &Params) -> Result<EntropyConfig, UsageError> {
    Ok(EntropyConfig {
        rel_tol: p.f64("rel-tol")?,
        tail_fraction: p.f64("tail-fraction")?,
        schedule_points: p.usize("schedule-points")?,
        min_neighbors: p.f64("min-neighbors")?,
        noise_floor: p.f64("noise-floor")?,
        fast: p.bool("fast")?,
    })
}

fn source_is_stochastic(p: &Params) -> bool {
    match p.raw("source") {
        Some("bernoulli" | "tent-bits") => true,
        Some("map") => !p.contains("x0"),
        _ => false,
    }
}

enum Source {
    Shift(Trajectory<ShiftSpace>),
    Real(Trajectory<RealLine>),
}

/// Runs `$body` with `$t` bound to the trajectory, whatever its space.
macro_rules! with_traj {
    ($src:expr, $t:ident => $body:expr) => {
        match $src {
            Source::Shift($t) => $body,
            Source::Real($t) => $body,
        }
    };
}

fn symbol_sequence(ctx: &Ctx, source: &str) -> Result<SymbolSequence, CliError> {
    let p = &ctx.params;
    let alphabet = p.usize("p")?;
    Ok(match source {
        "bernoulli" => {
            let spec = match p.contains("pi") {
                true => BernoulliSpec::new(p.f64_list("pi")?, ctx.seed()?)?,
                false => BernoulliSpec::uniform(alphabet, ctx.seed()?)?,
            };
            SymbolSequence::bernoulli(&spec)
        }
        "periodic" => SymbolSequence::periodic(&Word::from_digits(p.str("word")?, alphabet)?)?,
        "construction" => GrillenbergerStream::new(alphabet)?.sequence(),
        other => return Err(usage(format!("unknown source {other:?}")).into()),
    })
}

fn build_source(ctx: &Ctx, needed: usize) -> Result<Source, CliError> {
    let p = &ctx.params;
    let len = match p.contains("length") {
        true => p.usize("length")?,
        false => needed,
    };
    let source = p.str("source")?;
    Ok(match source {
        "tent-bits" => Source::Real(tent_orbit_from_bits(ctx.seed()?, len)?),
        "map" => {
            let spec: IntervalMapSpec = p.str("map")?.parse()?;
            let x0 = match p.opt_f64("x0")? {
                Some(x) => x,
                None => {
                    let (lo, hi) = spec.domain;
                    ChaCha8Rng::seed_from_u64(ctx.seed()?).gen_range(lo..=hi)
                }
            };
            Source::Real(spec.orbit(x0, len)?)
        }
        _ => {
            Source::Shift(symbol_sequence(ctx, source)?.shift_trajectory(len, p.usize("horizon")?)?)
        }
    })
}

fn max_of(v: &[usize], key: &str) -> Result<usize, UsageError> {
    v.iter()
        .copied()
        .max()
        .ok_or_else(|| usage(format!("parameter {key} is empty")))
}

fn corrsum(ctx: &Ctx) -> Result<Artifacts, CliError> {
    let p = &ctx.params;
    let eps = p.f64_list("eps")?;
    let ms = p.usize_list("m")?;
    let ns = p.usize_list("n")?;
    let needed = max_of(&ns, "n")? + max_of(&ms, "m")? - 1;
    let src = build_source(ctx, needed)?;
    let table = with_traj!(src, t => CorrelationTable::compute(&t, &eps, &ms, &ns)?);
    let mut out = Table::new(&["eps", "m", "n", "count", "value"]);
    for e in table.entries() {
        out.push(vec![
            e.eps.to_string(),
            e.m.to_string(),
            e.n.to_string(),
            e.pairs.to_string(),
            e.value().to_string(),
        ]);
    }
    let mut art = Artifacts::passing();
    art.notes.push(format!(
        "{}: {} cells, {:?} path",
        table.label,
        out.rows.len(),
        table.path
    ));
    art.table = Some(out);
    Ok(art)
}

fn slope_rows(out: &mut Table, bound: &str, est: &EntropyEstimate) {
    for &(eps, slope) in &est.per_eps_slopes {
        out.push(vec![
            bound.into(),
            eps.to_string(),
            slope.to_string(),
            (eps == est.diagnostics.chosen_eps).to_string(),
        ]);
    }
}

fn entropy(ctx: &Ctx) -> Result<Artifacts, CliError> {
    let p = &ctx.params;
    let grid = p.eps_grid("eps")?;
    let ms = p.usize_list("m")?;
    let n = p.usize("n")?;
    let src = build_source(ctx, n + max_of(&ms, "m")? - 1)?;
    let cfg = estimator(p)?;
    let (upper, lower) = with_traj!(src, t => local_correlation_entropy(&t, &grid, &ms, n, &cfg)?);
    let mut out = Table::new(&["bound", "eps", "slope", "chosen"]);
    slope_rows(&mut out, "upper", &upper);
    slope_rows(&mut out, "lower", &lower);
    let mut art = Artifacts::passing();
    art.notes.push(format!(
        "upper entropy {} (eps {}, plateau {}), lower entropy {}",
        upper.value, upper.diagnostics.chosen_eps, upper.diagnostics.plateau, lower.value
    ));
    art.report(&json!({ "upper": upper, "lower": lower }));
    art.table = Some(out);
    Ok(art)
}

fn dimension(ctx: &Ctx) -> Result<Artifacts, CliError> {
    let p = &ctx.params;
    let grid = p.eps_grid("eps")?;
    let n = p.usize("n")?;
    let src = build_source(ctx, n)?;
    let cfg = estimator(p)?;
    let est = with_traj!(src, t => local_correlation_dimension(&t, &grid, n, &cfg)?);
    let mut out = Table::new(&["eps", "lower_c", "upper_c", "neighbors", "resolved"]);
    for c in &est.cells {
        out.push(vec![
            c.eps.to_string(),
            c.lower_c.to_string(),
            c.upper_c.to_string(),
            c.neighbors.to_string(),
            c.resolved.to_string(),
        ]);
    }
    let mut art = Artifacts::passing();
    art.notes.push(format!(
        "upper dimension {}, lower dimension {}",
        est.upper, est.lower
    ));
    art.report(&est);
    art.table = Some(out);
    Ok(art)
}

fn theorem_a(ctx: &Ctx) -> Result<Artifacts, CliError> {
    let p = &ctx.params;
    let grid = p.eps_grid("eps")?;
    let ms = p.usize_list("m")?;
    let ks = p.usize_list("k")?;
    let n = p.usize("n")?;
    let tol = p.f64("tolerance")?;
    let cfg = estimator(p)?;
    let spec = match p.contains("pi") {
        true => BernoulliSpec::new(p.f64_list("pi")?, ctx.seed()?)?,
        false => BernoulliSpec::uniform(p.usize("p")?, ctx.seed()?)?,
    };
    let len = max_of(&ks, "k")? * (n + max_of(&ms, "m")?);
    let traj = SymbolSequence::bernoulli(&spec).shift_trajectory(len, p.usize("horizon")?)?;
    let target = bernoulli_correlation_entropy(&spec);
    let mut out = Table::new(&["h_f", "h_fk", "k", "ratio"]);
    let mut reports = Vec::new();
    let mut art = Artifacts::passing();
    for &k in &ks {
        let r = iterate_scaling_check(&traj, k, &grid, &ms, n, &cfg)?;
        let ok = r.reliable
            && r.ratio
                .is_some_and(|q| q >= (1.0 - tol) * k as f64 && q <= (1.0 + tol) * k as f64);
        art.passed &= ok;
        art.notes.push(format!(
            "k = {k}: h_f {} (target {target}), h_fk {} (target {}), ratio {:?}: {}",
            r.h_f,
            r.h_fk,
            k as f64 * target,
            r.ratio,
            if ok { "pass" } else { "FAIL" }
        ));
        out.push(vec![
            r.h_f.to_string(),
            r.h_fk.to_string(),
            k.to_string(),
            r.ratio.map_or_else(String::new, |q| q.to_string()),
        ]);
        reports.push(json!({ "passed": ok, "report": r }));
    }
    art.report(&json!({ "target": target, "tolerance": tol, "checks": reports }));
    art.table = Some(out);
    Ok(art)
}

fn theorem_b(ctx: &Ctx) -> Result<Artifacts, CliError> {
    let p = &ctx.params;
    let seed = ctx.seed()?;
    let which = p.str("map")?;
    if !matches!(which, "all" | "tent" | "logistic" | "countable-piece") {
        return Err(usage(format!(
            "parameter map: expected all, tent, logistic or countable-piece, got {which:?}"
        ))
        .into());
    }
    let wants = |m: &str| which == "all" || which == m;
    let local = LocalConfig {
        n: p.usize("n")?,
        ..LocalConfig::default()
    };
    let topological = TopologicalConfig {
        grid_size: p.usize("grid")?,
        ..TopologicalConfig::default()
    };
    let slack = p.f64("slack")?;
    let mut out = Table::new(&["map", "item", "x0", "estimate", "reference"]);
    let mut report = serde_json::Map::new();
    let mut art = Artifacts::passing();
    if wants("tent") {
        let r = theorem_b_report(&TheoremBConfig {
            points: p.usize("points")?,
            seed,
            local: local.clone(),
            topological: topological.clone(),
            slack,
            ..TheoremBConfig::default()
        })?;
        out.push(vec![
            "tent".into(),
            "topological".into(),
            String::new(),
            r.top.value.to_string(),
            String::new(),
        ]);
        for (i, pt) in r.points.iter().enumerate() {
            out.push(vec![
                "tent".into(),
                format!("point {i}"),
                pt.x0.to_string(),
                pt.estimate.to_string(),
                r.top.value.to_string(),
            ]);
        }
        art.notes.push(format!(
            "tent: topological {}, {:.0}% of points above the local threshold: {}",
            r.top.value,
            100.0 * r.fraction_above,
            if r.passed { "pass" } else { "FAIL" }
        ));
        art.passed &= r.passed;
        report.insert("tent".into(), serde_json::to_value(&r).expect("serializes"));
    }
    if wants("logistic") {
        let r = logistic_report(&LogisticConfig {
            points: p.usize("logistic-points")?,
            seed,
            local: local.clone(),
            topological: topological.clone(),
            slack,
            ..LogisticConfig::default()
        })?;
        out.push(vec![
            "logistic".into(),
            "topological".into(),
            String::new(),
            r.top.value.to_string(),
            String::new(),
        ]);
        for (i, pt) in r.points.iter().enumerate() {
            out.push(vec![
                "logistic".into(),
                format!("point {i}"),
                pt.estimate.x0.to_string(),
                pt.estimate.estimate.to_string(),
                r.top.value.to_string(),
            ]);
        }
        art.notes.push(format!(
            "logistic: alpha {}, residual {:e}, topological {}: {}",
            r.alpha,
            r.residual,
            r.top.value,
            if r.passed { "pass" } else { "FAIL" }
        ));
        art.passed &= r.passed;
        report.insert(
            "logistic".into(),
            serde_json::to_value(&r).expect("serializes"),
        );
    }
    if wants("countable-piece") {
        let lambda = p.f64("lambda")?;
        let r = countable_piece_report(
            lambda,
            p.usize("pieces")?,
            seed,
            &local,
            &topological,
            slack,
        )?;
        for row in &r.pieces {
            out.push(vec![
                "countable-piece".into(),
                format!("piece {}", row.n),
                row.local.x0.to_string(),
                row.local.estimate.to_string(),
                row.piece_entropy.to_string(),
            ]);
        }
        art.notes.push(format!(
            "countable piece (lambda {lambda}): running max {:?}: {}",
            r.running_max,
            if r.passed { "pass" } else { "FAIL" }
        ));
        art.passed &= r.passed;
        report.insert(
            "countable_piece".into(),
            serde_json::to_value(&r).expect("serializes"),
        );
    }
    art.report = Some(report.into());
    art.table = Some(out);
    Ok(art)
}

fn theorem_c(ctx: &Ctx) -> Result<Artifacts, CliError> {
    let p = &ctx.params;
    let cfg = TheoremCConfig {
        p: p.usize("p")?,
        n_list: p.usize_list("n-list")?,
        entropy_n: p.usize("n")?,
        eps_from: p.u32("eps-from")?,
        eps_to: p.u32("eps-to")?,
        m_list: p.usize_list("m")?,
        ceiling: p.f64("ceiling")?,
        estimator: estimator(p)?,
        ..TheoremCConfig::default()
    };
    let r = theorem_c_report(&cfg)?;
    let mut out = Table::new(&[
        "n", "c_hat", "rate", "level", "regime", "bound", "slack", "passed",
    ]);
    for t in &r.tilde {
        out.push(vec![
            t.n.to_string(),
            t.c_hat.to_string(),
            t.rate.to_string(),
            t.level.map_or_else(String::new, |v| v.to_string()),
            t.regime.clone(),
            t.bound.map_or_else(String::new, |v| v.to_string()),
            t.slack.to_string(),
            t.passed.to_string(),
        ]);
    }
    let mut art = Artifacts::passing();
    art.notes.push(r.periodicity.statement.clone());
    art.notes.push(format!(
        "local entropy upper {} (ceiling {}), entropy lower bound {}, cesaro exact {}, minimal {}",
        r.entropy.upper,
        r.entropy.ceiling,
        r.entropy_bound.value,
        r.cesaro_passed(),
        r.minimality.passed
    ));
    art.passed = r.passed();
    art.report(&r);
    art.table = Some(out);
    Ok(art)
}

fn grillenberger(ctx: &Ctx) -> Result<Artifacts, CliError> {
    let p = &ctx.params;
    let act = p.str("action")?;
    let (mut levels, mut dump) = (p.bool("levels")?, p.bool("dump")?);
    match act {
        "levels" => levels = true,
        "dump" => dump = true,
        "auto" => {}
        other => return Err(usage(format!("grillenberger: unknown action {other:?}")).into()),
    }
    if !levels && !dump {
        levels = true;
    }
    let opts = BuildOptions {
        explicit_cap: p.usize("explicit-cap")? as u64,
        allow_binary: p.bool("allow-binary")?,
        ..BuildOptions::default()
    };
    let alphabet = p.usize("p")?;
    let mut art = Artifacts::passing();
    if levels {
        let lv = build_levels_with(alphabet, &opts)?;
        let props = verify_level_props(&lv)?;
        let mut out = Table::new(&["j", "l", "m_or_log_m", "r_or_log_r", "lambda"]);
        for l in &lv {
            out.push(vec![
                l.j.to_string(),
                l.l.to_string(),
                l.m.to_string(),
                l.r.to_string(),
                l.lambda.mid().to_string(),
            ]);
        }
        let bound = entropy_lower_bound(alphabet).ok();
        art.passed = props.all_passed();
        art.notes.push(format!(
            "{} levels, properties {}",
            lv.len(),
            if props.all_passed() { "pass" } else { "FAIL" }
        ));
        art.report(&json!({ "levels": lv, "properties": props, "entropy_bound": bound }));
        art.table = Some(out);
    }
    if dump {
        let stream = GrillenbergerStream::with_options(alphabet, &opts)?;
        art.notes.push(stream.periodicity().statement);
        art.text = Some(stream.x_prefix(p.usize("length")?)?.to_string());
    }
    Ok(art)
}

fn graphs(ctx: &Ctx) -> Result<Artifacts, CliError> {
    let p = &ctx.params;
    let act = p.str("action")?;
    if act != "verify" {
        return Err(usage(format!("graphs: unknown action {act:?}")).into());
    }
    let checks = verify_kappa(p.usize("max-n")?, p.usize("max-k")?)?;
    let mut out = Table::new(&[
        "sizes",
        "n",
        "k",
        "formula",
        "brute_force",
        "witness",
        "bound",
        "passed",
    ]);
    let mut art = Artifacts::passing();
    for c in &checks {
        let sizes: Vec<String> = c.sizes.iter().map(ToString::to_string).collect();
        out.push(vec![
            sizes.join(","),
            c.n.to_string(),
            c.k.to_string(),
            c.formula.to_string(),
            c.brute_force.to_string(),
            c.witness.to_string(),
            c.bound.to_string(),
            c.passed.to_string(),
        ]);
        art.passed &= c.passed;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    art.notes.push(format!(
        "{} partitions checked, {failed} failed",
        checks.len()
    ));
    art.table = Some(out);
    Ok(art)
}

fn bernoulli(ctx: &Ctx) -> Result<Artifacts, CliError> {
    let p = &ctx.params;
    let pi = p.f64_list("pi")?;
    let closed = |seed| -> Result<(BernoulliSpec, f64), CliError> {
        let spec = BernoulliSpec::new(pi.clone(), seed)?;
        let h = bernoulli_correlation_entropy(&spec);
        Ok((spec, h))
    };
    let mut art = Artifacts::passing();
    if p.bool("closed-form")? {
        let (_, h) = closed(0)?;
        art.text = Some(h.to_string());
        return Ok(art);
    }
    let (spec, h) = closed(ctx.seed()?)?;
    let grid = p.eps_grid("eps")?;
    let ms = p.usize_list("m")?;
    let n = p.usize("n")?;
    let traj = SymbolSequence::bernoulli(&spec)
        .shift_trajectory(n + max_of(&ms, "m")? - 1, p.usize("horizon")?)?;
    let (upper, lower) = local_correlation_entropy(&traj, &grid, &ms, n, &estimator(p)?)?;
    let tol = p.f64("tolerance")?;
    art.passed = (upper.value - h).abs() <= tol * h;
    let mut out = Table::new(&["pi", "closed_form", "upper", "lower", "chosen_eps"]);
    out.push(vec![
        p.str("pi")?.to_string(),
        h.to_string(),
        upper.value.to_string(),
        lower.value.to_string(),
        upper.diagnostics.chosen_eps.to_string(),
    ]);
    art.notes
        .push(format!("closed form {h}, estimate {}", upper.value));
    art.report(&json!({ "closed_form": h, "upper": upper, "lower": lower }));
    art.table = Some(out);
    Ok(art)
}

fn verify(ctx: &Ctx) -> Result<Artifacts, CliError> {
    let r = run_invariant_suite(ctx.params.usize("cases")?, ctx.seed()?)?;
    let mut out = Table::new(&["name", "evaluated", "violations", "example"]);
    for c in &r.checks {
        out.push(vec![
            c.name.clone(),
            c.evaluated.to_string(),
            c.violations.to_string(),
            c.example.clone().unwrap_or_default(),
        ]);
    }
    let mut art = Artifacts::passing();
    for c in r.checks.iter().filter(|c| c.violations > 0) {
        art.notes.push(format!(
            "{}: {} of {} violated",
            c.name, c.violations, c.evaluated
        ));
    }
    art.passed = r.passed();
    art.report(&r);
    art.table = Some(out);
    Ok(art)
}

fn never(_: &Params) -> bool {
    false
}

fn always(_: &Params) -> bool {
    true
}

fn estimate_keys(
    source: &'static str,
    eps: &'static str,
    m: Option<&'static str>,
    n: &'static str,
) -> Vec<Key> {
    let mut keys = source_keys(source, "3");
    keys.push(key("eps", eps, "radii: comma list or 2^-a..2^-b"));
    if let Some(m) = m {
        keys.push(key("m", m, "embedding lengths: list or range a..b"));
    }
    keys.push(key("n", n, "number of windows"));
    keys.extend(estimator_keys());
    keys
}

pub fn commands() -> Vec<Command> {
    vec![
        Command {
            name: "corrsum",
            about: "Correlation sums over a grid of radii, lengths and window counts",
            keys: {
                let mut k = source_keys("bernoulli", "3");
                k.push(key("eps", "1/2,1/4,1/8", "radii: comma list"));
                k.push(key("m", "1..4", "embedding lengths"));
                k.push(key("n", "1000", "window counts"));
                k
            },
            stochastic: source_is_stochastic,
            run: corrsum,
        },
        Command {
            name: "entropy",
            about: "Upper and lower local correlation entropy estimates",
            keys: estimate_keys("bernoulli", "2^-1..2^-6", Some("1..12"), "100000"),
            stochastic: source_is_stochastic,
            run: entropy,
        },
        Command {
            name: "dimension",
            about: "Upper and lower local correlation dimension estimates",
            keys: estimate_keys("tent-bits", "2^-2..2^-10", None, "10000"),
            stochastic: source_is_stochastic,
            run: dimension,
        },
        Command {
            name: "theorem-a",
            about: "Entropy of f^k against k times the entropy of f on a Bernoulli sample",
            keys: {
                let mut k = vec![
                    key("p", "2", "alphabet size"),
                    optional("pi", "Bernoulli weights (default uniform)"),
                    key("horizon", "64", "symbols compared by the shift metric"),
                    key("k", "2,3", "iterates"),
                    key("eps", "2^-1..2^-6", "radii"),
                    key("m", "1..12", "embedding lengths"),
                    key("n", "100000", "number of windows"),
                    key(
                        "tolerance",
                        "0.1",
                        "allowed relative deviation of the ratio from k",
                    ),
                ];
                k.extend(estimator_keys());
                k
            },
            stochastic: always,
            run: theorem_a,
        },
        Command {
            name: "theorem-b",
            about: "Local entropies against topological entropy for interval maps",
            keys: vec![
                key("map", "all", "all, tent, logistic or countable-piece"),
                key("points", "20", "random tent-map points"),
                key("logistic-points", "5", "random logistic-map points"),
                key(
                    "lambda",
                    "1",
                    "target entropy of the countable-piece map (inf allowed)",
                ),
                key("pieces", "5", "pieces of the countable-piece map"),
                key("n", "10000", "windows per local estimate"),
                key("grid", "4000", "grid points of the topological estimate"),
                key(
                    "slack",
                    "0.1",
                    "allowed excess of local over topological entropy",
                ),
            ],
            stochastic: always,
            run: theorem_b,
        },
        Command {
            name: "theorem-c",
            about: "Strictly ergodic subshift with zero correlation entropy",
            keys: {
                let mut k = vec![
                    key("p", "3", "alphabet size"),
                    key(
                        "n-list",
                        "3,24,100,500",
                        "word lengths for the frequency surrogate",
                    ),
                    key("n", "100000", "windows of the local entropy estimate"),
                    key("eps-from", "1", "largest radius 2^-eps-from"),
                    key("eps-to", "6", "smallest radius 2^-eps-to"),
                    key("m", "1..12", "embedding lengths"),
                    key(
                        "ceiling",
                        "0.05",
                        "upper limit for the local entropy estimate",
                    ),
                ];
                k.extend(estimator_keys());
                k
            },
            stochastic: never,
            run: theorem_c,
        },
        Command {
            name: "grillenberger",
            about: "Construction level table and prefix dump",
            keys: vec![
                action("auto", "levels or dump"),
                key("p", "3", "alphabet size"),
                flag("levels", "emit the level table"),
                flag("dump", "emit a prefix of x as digits"),
                key("length", "18000", "prefix length for the dump"),
                key("explicit-cap", "10000", "largest m_j enumerated explicitly"),
                flag("allow-binary", "permit p = 2"),
            ],
            stochastic: never,
            run: grillenberger,
        },
        Command {
            name: "graphs",
            about: "Exhaustive check of the admissible-graph kappa bound",
            keys: vec![
                action("verify", "verify"),
                key("max-n", "7", "largest vertex count"),
                key("max-k", "4", "largest number of parts"),
            ],
            stochastic: never,
            run: graphs,
        },
        Command {
            name: "bernoulli",
            about: "Correlation entropy of a Bernoulli measure",
            keys: {
                let mut k = vec![
                    key("pi", "1/2,1/2", "weights"),
                    flag("closed-form", "print -log(sum pi^2) only"),
                    key("horizon", "64", "symbols compared by the shift metric"),
                    key("eps", "2^-1..2^-6", "radii"),
                    key("m", "1..12", "embedding lengths"),
                    key("n", "100000", "number of windows"),
                    key("tolerance", "0.1", "allowed relative error of the estimate"),
                ];
                k.extend(estimator_keys());
                k
            },
            stochastic: |p| !matches!(p.raw("closed-form"), Some("true" | "1" | "yes")),
            run: bernoulli,
        },
        Command {
            name: "verify",
            about: "Randomized invariant suite",
            keys: vec![key("cases", "1000", "random cases")],
            stochastic: always,
            run: verify,
        },
    ]
}
