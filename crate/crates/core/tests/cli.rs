use std::path::Path;
use std::process::{Command, Output};

fn corrent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corrent"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn bernoulli_closed_form() {
    let o = corrent(&["bernoulli", "--pi", "1/2,1/4,1/4", "--closed-form"]);
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    // -log(1/4 + 1/16 + 1/16) = log(8/3)
    assert!((v - (8.0f64 / 3.0).ln()).abs() < 1e-15);
    assert!(stdout(&o).starts_with("0.980829"));
}

#[test]
fn grillenberger_level_table() {
    let o = corrent(&["grillenberger", "--p", "3", "--levels"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<Vec<&str>> = out.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["j", "l", "m_or_log_m", "r_or_log_r", "lambda"]);
    let expected = [
        ("1", "1", "3", "0", 3f64.ln()),
        ("2", "3", "6", "2", 6f64.ln() / 3.0),
        ("3", "24", "720", "30", 720f64.ln() / 24.0),
    ];
    for (row, (j, l, m, r, lambda)) in rows[1..].iter().zip(expected) {
        assert_eq!(&row[..4], [j, l, m, r]);
        assert!((row[4].parse::<f64>().unwrap() - lambda).abs() < 1e-12);
    }
    assert!(rows[1..4].iter().all(|r| r.len() == 5));
    assert!(out.contains("\n4,18000,"));
}

#[test]
fn grillenberger_dump_is_the_construction_prefix() {
    let o = corrent(&["grillenberger", "dump", "--p", "3", "--length", "24"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "012012012021102120201210");
    assert!(stderr(&o).contains("ln r_4"));
}

#[test]
fn corrsum_periodic_orbit() {
    // (01)^inf: windows at equal parity agree forever, others differ at once
    let o = corrent(&[
        "corrsum", "--source", "periodic", "--p", "2", "--word", "01", "--eps", "1/2,1", "--m",
        "1", "--n", "4",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "eps,m,n,count,value\r\n0.5,1,4,8,0.5\r\n1,1,4,16,1\r\n"
    );
}

#[test]
fn infeasible_window_is_a_usage_error() {
    let o = corrent(&["corrsum", "--seed", "1", "--n", "100", "--length", "50"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("window exceeds trajectory"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn stochastic_command_without_seed_is_rejected() {
    let o = corrent(&["verify"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--seed"));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("sums.csv");
    std::fs::write(
        &cfg,
        format!(
            "# correlation sums of a fair coin\ncommand = corrsum\nseed = 5\nsource = bernoulli\np = 2\n\
             eps = 1/2\nm = 1..2\nn = 200\noutput = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let cfg_arg = cfg.to_str().unwrap();
    let o = corrent(&["corrsum", "--config", cfg_arg, "--n", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("eps,m,n,count,value\r\n0.5,1,100,"));
    let meta: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("sums.csv.meta.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(meta["seed"], 5);
    assert_eq!(meta["params"]["n"], "100");
    assert_eq!(meta["rng"], "ChaCha8Rng");
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(meta["config_hash"].as_str().unwrap().len(), 64);

    std::fs::write(&cfg, "seed = 5\n\nbogus_key = 1\n").unwrap();
    let o = corrent(&["corrsum", "--config", cfg_arg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("line 3") && stderr(&o).contains("bogus-key"),
        "{}",
        stderr(&o)
    );

    std::fs::write(&cfg, "command = entropy\n").unwrap();
    assert_eq!(
        corrent(&["corrsum", "--config", cfg_arg]).status.code(),
        Some(2)
    );
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn entropy_outputs_are_reproducible() {
    let run = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("h.csv");
        let o = corrent(&[
            "entropy",
            "--seed",
            seed,
            "--p",
            "2",
            "--n",
            "5000",
            "--m",
            "1..8",
            "-o",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        (files(dir.path()), dir)
    };
    let (a, _da) = run("11");
    let (b, _db) = run("11");
    let (c, _dc) = run("12");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let names: Vec<&str> = a.iter().map(|f| f.0.as_str()).collect();
    assert_eq!(names, ["h.csv", "h.csv.json", "h.csv.meta.json"]);
    assert!(String::from_utf8_lossy(&a[0].1).starts_with("bound,eps,slope,chosen\r\n"));
}

#[test]
fn graphs_verify_reports_failing_partitions() {
    let o = corrent(&["graphs", "verify", "--max-n", "4"]);
    // (2,1,1) admits kappa 4 > 3 = sum of pairwise minima
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("sizes,n,k,formula,brute_force,witness,bound,passed\r\n"));
    assert!(out.contains("\"2,1,1\",4,3,3,4,3,4,false"), "{out}");
    assert!(out.contains("\"2,2\",4,2,2,2,2,2,true"), "{out}");
}

#[test]
fn help_exits_zero() {
    assert_eq!(corrent(&["--help"]).status.code(), Some(0));
    assert_eq!(corrent(&["theorem-b", "--help"]).status.code(), Some(0));
    assert_eq!(corrent(&[]).status.code(), Some(2));
}
