//! Artifact writing: CSV tables, JSON reports and the metadata sidecar.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use super::config::Params;

pub const RNG_NAME: &str = "ChaCha8Rng";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> std::io::Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }
}

/// What a command produced. `passed = false` maps to exit status 1.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    pub table: Option<Table>,
    pub report: Option<Value>,
    /// Plain text primary output (a prefix dump or a single number).
    pub text: Option<String>,
    /// One-line messages for stderr.
    pub notes: Vec<String>,
    pub passed: bool,
}

impl Artifacts {
    pub fn passing() -> Self {
        Self {
            passed: true,
            ..Self::default()
        }
    }

    pub fn report(&mut self, r: &impl Serialize) {
        self.report = Some(serde_json::to_value(r).expect("report serializes"));
    }
}

#[derive(Serialize)]
struct Meta<'a> {
    command: &'a str,
    version: &'a str,
    config_hash: String,
    rng: &'a str,
    seed: Option<u64>,
    params: &'a std::collections::BTreeMap<String, String>,
    files: Vec<String>,
    passed: bool,
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn json_bytes(v: &impl Serialize) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("json serializes");
    out.push(b'\n');
    out
}

/// Writes `output` (table, else text), `output.json` (report),
/// `output.txt` (text when a table also exists) and `output.meta.json`.
/// Without an output path the table or text goes to stdout.
pub fn emit(
    art: &Artifacts,
    command: &str,
    params: &Params,
    seed: Option<u64>,
    output: Option<&Path>,
) -> std::io::Result<()> {
    let mut stderr = std::io::stderr().lock();
    for n in &art.notes {
        writeln!(stderr, "{n}")?;
    }
    let table = art.table.as_ref().map(Table::to_csv).transpose()?;
    let Some(path) = output else {
        let mut stdout = std::io::stdout().lock();
        match (&table, &art.text) {
            (Some(t), _) => stdout.write_all(t)?,
            (None, Some(t)) => writeln!(stdout, "{t}")?,
            (None, None) => {
                if let Some(r) = &art.report {
                    stdout.write_all(&json_bytes(r))?;
                }
            }
        }
        return stdout.flush();
    };
    let mut files = Vec::new();
    let mut write = |p: PathBuf, bytes: &[u8]| -> std::io::Result<()> {
        std::fs::write(&p, bytes)?;
        files.push(
            p.file_name()
                .map_or_else(String::new, |f| f.to_string_lossy().into_owned()),
        );
        Ok(())
    };
    match (&table, &art.text) {
        (Some(t), Some(text)) => {
            write(path.to_path_buf(), t)?;
            write(with_suffix(path, ".txt"), format!("{text}\n").as_bytes())?;
        }
        (Some(t), None) => write(path.to_path_buf(), t)?,
        (None, Some(text)) => write(path.to_path_buf(), format!("{text}\n").as_bytes())?,
        (None, None) => {}
    }
    if let Some(r) = &art.report {
        write(with_suffix(path, ".json"), &json_bytes(r))?;
    }
    let meta = Meta {
        command,
        version: env!("CARGO_PKG_VERSION"),
        config_hash: params.hash(command, seed),
        rng: RNG_NAME,
        seed,
        params: params.values(),
        files,
        passed: art.passed,
    };
    std::fs::write(with_suffix(path, ".meta.json"), json_bytes(&meta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_fields_with_commas() {
        let mut t = Table::new(&["sizes", "passed"]);
        t.push(vec!["1,2,3".into(), "false".into()]);
        let s = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(s, "sizes,passed\r\n\"1,2,3\",false\r\n");
    }

    #[test]
    fn writes_primary_report_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.csv");
        let mut art = Artifacts::passing();
        let mut t = Table::new(&["a"]);
        t.push(vec!["1".into()]);
        art.table = Some(t);
        art.report(&serde_json::json!({"x": 1}));
        let mut params = Params::default();
        params.set("n", "5");
        emit(&art, "corrsum", &params, Some(7), Some(&out)).unwrap();
        assert_eq!(std::fs::read_to_string(&out).unwrap(), "a\r\n1\r\n");
        assert!(dir.path().join("run.csv.json").exists());
        let meta: Value =
            serde_json::from_slice(&std::fs::read(dir.path().join("run.csv.meta.json")).unwrap())
                .unwrap();
        assert_eq!(meta["seed"], 7);
        assert_eq!(meta["params"]["n"], "5");
        assert_eq!(
            meta["files"],
            serde_json::json!(["run.csv", "run.csv.json"])
        );
    }
}
