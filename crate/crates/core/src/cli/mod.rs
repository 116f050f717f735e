//! Command-line experiment runner.
//!
//! Parameters come from command defaults, then an optional `key = value`
//! file (`--config`), then command-line flags. Exit status is 0 when every
//! check passes, 1 when a check fails and 2 for usage errors and infeasible
//! parameters.

mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::parser::ValueSource;
use clap::{Arg, ArgAction, ArgMatches};

pub use commands::{commands, Command, Key};
use config::{normalize_key, parse_config, usage, Params, UsageError};

use crate::error::Error;

#[derive(Debug)]
pub enum CliError {
    Usage(UsageError),
    Library(Error),
    Io(std::io::Error),
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        Self::Usage(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Library(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Library(Error::DegenerateFit(_) | Error::OrbitEscaped { .. }) => 1,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(e) => write!(f, "usage error: {e}"),
            Self::Library(e) => write!(f, "error: {e}"),
            Self::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

/// Everything needed to run one command.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: String,
    pub params: Params,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
}

fn cli(cmds: &[Command]) -> clap::Command {
    let mut root = clap::Command::new("corrent")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Correlation entropy experiments")
        .subcommand_required(true)
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("FILE")
                .value_parser(clap::value_parser!(PathBuf))
                .help("key = value parameter file; flags override it"),
        )
        .arg(
            Arg::new("seed")
                .long("seed")
                .global(true)
                .value_name("N")
                .value_parser(clap::value_parser!(u64))
                .help("seed of the random generator"),
        )
        .arg(
            Arg::new("output")
                .long("output")
                .short('o')
                .global(true)
                .value_name("PATH")
                .value_parser(clap::value_parser!(PathBuf))
                .help("primary output file; report and metadata go next to it"),
        );
    for c in cmds {
        let mut sub = clap::Command::new(c.name).about(c.about);
        for k in &c.keys {
            let help = match k.default {
                Some(d) => format!("{} [default: {d}]", k.help),
                None => k.help.to_string(),
            };
            let arg = if k.positional {
                Arg::new(k.name).index(1).value_name("ACTION").help(help)
            } else if k.flag {
                Arg::new(k.name)
                    .long(k.name)
                    .action(ArgAction::SetTrue)
                    .help(help)
            } else {
                Arg::new(k.name).long(k.name).value_name("VALUE").help(help)
            };
            sub = sub.arg(arg);
        }
        root = root.subcommand(sub);
    }
    root
}

fn from_command_line(m: &ArgMatches, id: &str) -> bool {
    m.value_source(id) == Some(ValueSource::CommandLine)
}

/// Defaults, then the config file, then flags.
fn resolve(
    cmd: &Command,
    sub: &ArgMatches,
    file: Option<&str>,
) -> Result<ExperimentConfig, UsageError> {
    let mut params = Params::default();
    for k in &cmd.keys {
        if let Some(d) = k.default {
            params.set(k.name, d);
        }
    }
    let mut seed = None;
    let mut output = None;
    if let Some(text) = file {
        for line in parse_config(text)? {
            let at = |msg: String| usage(format!("config line {}: {msg}", line.line));
            match line.key.as_str() {
                "command" if line.value == cmd.name => {}
                "command" => {
                    return Err(at(format!(
                        "command {:?} does not match {:?}",
                        line.value, cmd.name
                    )))
                }
                "seed" => {
                    seed = Some(
                        line.value
                            .parse()
                            .map_err(|_| at(format!("bad seed {:?}", line.value)))?,
                    )
                }
                "output" => output = Some(PathBuf::from(&line.value)),
                key if cmd.keys.iter().any(|k| k.name == key) => {
                    params.set(key, line.value.clone())
                }
                key => return Err(at(format!("unknown key {key:?} for command {}", cmd.name))),
            }
        }
    }
    for k in &cmd.keys {
        if !from_command_line(sub, k.name) {
            continue;
        }
        if k.flag {
            params.set(k.name, "true");
        } else if let Some(v) = sub.get_one::<String>(k.name) {
            params.set(k.name, v.clone());
        }
    }
    if from_command_line(sub, "seed") {
        seed = sub.get_one::<u64>("seed").copied();
    }
    if from_command_line(sub, "output") {
        output = sub.get_one::<PathBuf>("output").cloned();
    }
    if (cmd.stochastic)(&params) && seed.is_none() {
        return Err(usage(format!(
            "{} with these parameters draws random numbers; --seed is required",
            cmd.name
        )));
    }
    Ok(ExperimentConfig {
        command: cmd.name.to_string(),
        params,
        seed,
        output,
    })
}

/// Runs one resolved experiment and writes its artifacts.
pub fn execute(cfg: &ExperimentConfig) -> Result<bool, CliError> {
    let cmds = commands();
    let cmd = cmds
        .iter()
        .find(|c| c.name == cfg.command)
        .ok_or_else(|| usage(format!("unknown command {:?}", cfg.command)))?;
    if let Some(k) = cfg
        .params
        .values()
        .keys()
        .find(|k| !cmd.keys.iter().any(|key| key.name == normalize_key(k)))
    {
        return Err(usage(format!("unknown key {k:?} for command {}", cmd.name)).into());
    }
    let ctx = commands::Ctx {
        params: cfg.params.clone(),
        seed: cfg.seed,
    };
    let art = (cmd.run)(&ctx)?;
    output::emit(&art, cmd.name, &cfg.params, cfg.seed, cfg.output.as_deref())?;
    Ok(art.passed)
}

/// Parses arguments (program name first) and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cmds = commands();
    let matches = match cli(&cmds).try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let cmd = cmds
        .iter()
        .find(|c| c.name == name)
        .expect("registered command");
    let file = match sub.get_one::<PathBuf>("config") {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("usage error: cannot read config {}: {e}", path.display());
                return 2;
            }
        },
        None => None,
    };
    let result = resolve(cmd, sub, file.as_deref())
        .map_err(CliError::from)
        .and_then(|cfg| execute(&cfg));
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolved(args: &[&str], file: Option<&str>) -> Result<ExperimentConfig, UsageError> {
        let cmds = commands();
        let m = cli(&cmds).try_get_matches_from(args).unwrap();
        let (name, sub) = m.subcommand().unwrap();
        let cmd = cmds.iter().find(|c| c.name == name).unwrap();
        resolve(cmd, sub, file)
    }

    #[test]
    fn flags_override_file_and_defaults() {
        let c = resolved(
            &["corrent", "corrsum", "--n", "50", "--seed", "3"],
            Some("n = 20\nm = 1..2\nseed = 9\n"),
        )
        .unwrap();
        assert_eq!(c.params.raw("n"), Some("50"));
        assert_eq!(c.params.raw("m"), Some("1..2"));
        assert_eq!(c.params.raw("source"), Some("bernoulli"));
        assert_eq!(c.seed, Some(3));
    }

    #[test]
    fn unknown_key_names_its_line() {
        let e = resolved(
            &["corrent", "verify", "--seed", "1"],
            Some("cases = 3\n\nbogus = 1"),
        )
        .unwrap_err();
        assert!(e.0.contains("line 3") && e.0.contains("bogus"), "{e}");
    }

    #[test]
    fn stochastic_commands_need_a_seed() {
        assert!(resolved(&["corrent", "verify"], None)
            .unwrap_err()
            .0
            .contains("--seed"));
        assert!(resolved(
            &["corrent", "corrsum", "--source", "periodic", "--word", "01"],
            None
        )
        .is_ok());
        assert!(resolved(&["corrent", "bernoulli", "--closed-form"], None).is_ok());
        assert!(resolved(&["corrent", "bernoulli"], None).is_err());
    }

    #[test]
    fn positional_action_and_flags() {
        let c = resolved(&["corrent", "graphs", "verify", "--max-n", "4"], None).unwrap();
        assert_eq!(c.params.raw("action"), Some("verify"));
        let c = resolved(&["corrent", "grillenberger", "--levels"], None).unwrap();
        assert_eq!(c.params.raw("levels"), Some("true"));
        assert_eq!(c.params.raw("action"), Some("auto"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["corrent", "nonsense"]), 2);
        assert_eq!(run(["corrent", "verify", "--cases", "x", "--seed", "1"]), 2);
        let e = CliError::Library(Error::WindowExceedsTrajectory { needed: 10, len: 5 });
        assert_eq!(e.exit_code(), 2);
    }
}
