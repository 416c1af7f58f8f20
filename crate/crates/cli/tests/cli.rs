use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tailmean::io::{parse_records, Record};
use tailmean::rng::stream;
use tailmean::{HeavyTailLaw, Method};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tailmean"));
    c.env_remove("TAILMEAN_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write_sample(dir: &Path, name: &str, law: HeavyTailLaw, n: usize, seed: u64) -> PathBuf {
    let xs = law.sample(n, &mut stream(seed)).unwrap();
    let mut text = String::from("value\n");
    for x in xs {
        text.push_str(&format!("{x}\n"));
    }
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn toy(dir: &Path) -> PathBuf {
    let p = dir.join("toy.csv");
    std::fs::write(&p, "x\n0.1\n0.2\n0.5\n1\n2.718281828459045\n").unwrap();
    p
}

#[test]
fn ci_on_toy_sample() {
    let dir = tempfile::tempdir().unwrap();
    let data = toy(dir.path());
    let out = dir.path().join("out");
    let o = run(&[
        "ci", "--data", data.to_str().unwrap(), "--column", "x", "--k", "2", "--methods", "el,normal",
        "--out-dir", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("mu_hat = 0.960000"));
    let records = parse_records(&std::fs::read_to_string(out.join("ci.jsonl")).unwrap()).unwrap();
    assert!(matches!(records[0], Record::Manifest(_)));
    let el: Vec<_> = records
        .iter()
        .filter_map(|r| match r {
            Record::Interval(ci) if ci.method == Method::El => Some(ci.clone()),
            _ => None,
        })
        .collect();
    assert_eq!(el.len(), 2);
    assert!((el[0].diagnostics["mu_hat"] - 0.96).abs() < 1e-12);
    assert!(el[1].lower <= el[0].lower && el[0].upper <= el[1].upper);
}

#[test]
fn ci_usage_and_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let data = toy(dir.path());
    let d = data.to_str().unwrap();
    let out = dir.path().join("o");
    let o = out.to_str().unwrap();

    let two_tail = run(&["ci", "--data", d, "--k", "2", "--m", "2", "--mode", "two-tail", "--out-dir", o]);
    assert_eq!(code(&two_tail), 2, "{}", stderr(&two_tail));

    let big = write_sample(dir.path(), "pos.csv", HeavyTailLaw::frechet(2.0).unwrap(), 100, 1);
    let pos = run(&[
        "ci", "--data", big.to_str().unwrap(), "--k", "10", "--m", "10", "--mode", "two-tail", "--out-dir", o,
    ]);
    assert_eq!(code(&pos), 2);
    assert!(stderr(&pos).contains("X_(m)") || stderr(&pos).contains("left"), "{}", stderr(&pos));

    let missing = run(&["ci", "--data", d, "--column", "loss", "--k", "2", "--out-dir", o]);
    assert_eq!(code(&missing), 3);
    assert!(stderr(&missing).contains("available: x"));

    let bad_k = run(&["ci", "--data", d, "--k", "5", "--out-dir", o]);
    assert_eq!(code(&bad_k), 2);

    let no_file = run(&["ci", "--data", "/nonexistent.csv", "--k", "2", "--out-dir", o]);
    assert_eq!(code(&no_file), 3);

    let unknown = run(&["frobnicate"]);
    assert_eq!(code(&unknown), 2);
}

#[test]
fn simulate_smoke_is_fast_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("smoke.toml");
    let mut payloads = Vec::new();
    for run_dir in ["a", "b"] {
        let out = dir.path().join(run_dir);
        let start = std::time::Instant::now();
        let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        assert!(start.elapsed().as_secs_f64() < 5.0);
        let text = std::fs::read_to_string(out.join("smoke.jsonl")).unwrap();
        let records = parse_records(&text).unwrap();
        assert_eq!(records.len(), 1 + 6);
        for r in &records[1..] {
            let Record::Coverage(c) = r else { panic!("expected coverage") };
            assert!(c.coverage == 0.0 || c.coverage == 1.0);
        }
        let payload: Vec<String> = text.lines().skip(1).map(str::to_string).collect();
        payloads.push(payload);
        assert!(out.join("smoke.txt").exists());
    }
    assert_eq!(payloads[0], payloads[1]);
}

#[test]
fn simulate_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("smoke.toml"))
        .unwrap()
        .replace("levels =", "level =");
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, text).unwrap();
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("level") && err.contains("valid keys") && err.contains("methods"), "{err}");
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("env-out");
    let o = bin()
        .args(["simulate", "--config", configs().join("smoke.toml").to_str().unwrap()])
        .env("TAILMEAN_OUT_DIR", &out)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(out.join("smoke.jsonl").exists());
}

#[test]
fn sweep_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_sample(dir.path(), "f15.csv", HeavyTailLaw::frechet(1.5).unwrap(), 1000, 9);
    let out = dir.path().join("out");
    let o = run(&[
        "sweep", "--data", data.to_str().unwrap(), "--column", "value", "--k-grid", "20:210:10",
        "--resamples", "200", "--out-dir", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# columns:")));
    let rows: Vec<Vec<String>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 20);
    let header: Vec<&str> = text.lines().find(|l| l.starts_with("k,")).unwrap().split(',').collect();
    let nl = header.iter().position(|c| *c == "normal_lower").unwrap();
    assert!(rows.iter().all(|r| r[nl] == rows[0][nl] && r[nl + 1] == rows[0][nl + 1]));

    let empty = run(&["sweep", "--data", data.to_str().unwrap(), "--k-grid", "", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code(&empty), 2);
}

#[test]
fn hill_diag_on_pareto() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_sample(dir.path(), "p2.csv", HeavyTailLaw::pareto(2.0, 1.0).unwrap(), 10_000, 4);
    let out = dir.path().join("out");
    let o = run(&[
        "hill-diag", "--data", data.to_str().unwrap(), "--k-grid", "50:200:10", "--out-dir", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(out.join("hill.csv")).unwrap();
    let alphas: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('k'))
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(alphas.len(), 16);
    assert!(alphas.iter().all(|a| (1.5..=2.5).contains(a)), "{alphas:?}");
}
