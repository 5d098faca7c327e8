use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_localsgd"));
    c.env_remove("LOCALSGD_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn localsgd")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn write_config(dir: &Path, json: &str) -> PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, json).unwrap();
    p
}

const QUAD_RUN: &str = r#"{
  "objective": {"type": "quadratic", "dim": 3, "c1": 1.0, "c2": 1.0},
  "workers": 4, "horizon": 200,
  "steps": {"kind": "inverse_t", "beta": 9.0},
  "strategies": [
    {"name": "sync", "schedule": {"kind": "synchronized"}},
    {"name": "grow", "schedule": {"kind": "growing", "rounds": 5}}
  ],
  "replications": 20, "seed": 3, "trace_stride": 25
}"#;

#[test]
fn bound_examples() {
    let o = run(&[
        "bound", "theorem1", "--mu", "1", "--L", "1", "--sigma2", "1", "--N", "10", "--T",
        "1000", "--R", "10", "--beta", "9", "--xi0", "1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "theorem1: 0.0149310");

    let o = run(&["bound", "osa", "--mu", "1", "--sigma2", "64", "--N", "4", "--T", "1000"]);
    assert_eq!(stdout(&o).trim(), "osa: 0.0213333");
}

#[test]
fn bound_general_flags_violated_condition() {
    // synchronized with beta below 9κ cannot satisfy the step condition
    let o = run(&[
        "bound", "general", "--mu", "1", "--L", "4", "--c", "1", "--sigma2", "1", "--N", "2",
        "--T", "100", "--beta", "1", "--schedule", "synchronized", "--xi0", "1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("general: "), "{out}");
    assert!(out.contains("condition: VIOLATED"), "{out}");

    let o = run(&[
        "bound", "general", "--mu", "1", "--L", "1", "--sigma2", "1", "--N", "10", "--T",
        "1000", "--R", "10", "--xi0", "1",
    ]);
    assert!(stdout(&o).contains("condition: OK"), "{}", stdout(&o));
}

#[test]
fn bound_invalid_args_exit_2() {
    let o = run(&["bound", "theorem1", "--mu", "-1", "--sigma2", "1", "--N", "1", "--T", "10", "--R", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["bound", "theorem1", "--mu", "1", "--sigma2", "1", "--N", "1", "--T", "10", "--R", "50"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["bound", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parse_data_reports_shape() {
    let sample = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/a9a_format_sample.txt");
    let o = run(&["parse-data", sample.to_str().unwrap(), "--dim", "124"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "M=100 d=124");

    let o = run(&["parse-data", fixture("zero_index.txt").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn run_writes_documented_csvs_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), QUAD_RUN);
    let out = |name: &str| {
        let o = run(&["run", "--config", cfg.to_str().unwrap(), "--output", dir.path().join(name).to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        dir.path().join(name)
    };
    let (a, b) = (out("a"), out("b"));
    for f in ["trace_sync.csv", "trace_grow.csv"] {
        let text = fs::read_to_string(a.join(f)).unwrap();
        assert!(text.starts_with("t,mean_error,std_error\n"));
        assert_eq!(text.lines().count(), 1 + 9);
        assert_eq!(text, fs::read_to_string(b.join(f)).unwrap(), "{f}");
    }
    // wall-clock column aside, the summaries match too
    let strip = |p: &Path| -> Vec<String> {
        fs::read_to_string(p.join("summary.csv"))
            .unwrap()
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    let sa = strip(&a);
    assert_eq!(sa[0], "strategy,R_effective,final_mean,final_std");
    assert!(sa[1].starts_with("sync,200,"));
    assert!(sa[2].starts_with("grow,5,"));
    assert_eq!(sa, strip(&b));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), QUAD_RUN);
    let go = |threads: &str, name: &str| {
        let o = bin()
            .args(["run", "--config", cfg.to_str().unwrap(), "--output"])
            .arg(dir.path().join(name))
            .env("LOCALSGD_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        fs::read_to_string(dir.path().join(name).join("trace_grow.csv")).unwrap()
    };
    assert_eq!(go("1", "one"), go("3", "three"));
}

#[test]
fn zero_noise_single_replication_has_zero_spread() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"objective": {"type": "quadratic", "dim": 2, "c1": 0.0, "c2": 0.0},
            "workers": 3, "horizon": 50, "steps": {"kind": "inverse_t", "beta": 2.0},
            "strategies": [{"name": "s", "schedule": {"kind": "synchronized"}}],
            "replications": 1}"#,
    );
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--output", dir.path().join("o").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(dir.path().join("o/trace_s.csv")).unwrap();
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        assert_eq!(rec[2].parse::<f64>().unwrap(), 0.0);
        rows += 1;
    }
    assert_eq!(rows, 51);
}

#[test]
fn missing_dataset_exits_2_naming_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"objective": {"type": "logistic", "data": "absent/a9a.txt", "lambda": 0.05},
            "workers": 2, "horizon": 10, "steps": {"kind": "inverse_t", "beta": 1.0},
            "strategies": [{"name": "s", "schedule": {"kind": "synchronized"}}],
            "replications": 1}"#,
    );
    let o = run(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("absent/a9a.txt"), "{}", stderr(&o));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{ not json");
    assert_eq!(run(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    let o = run(&["run", "--config", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    // R outside [1, sqrt(2T)]
    let cfg = write_config(
        dir.path(),
        &QUAD_RUN.replace(r#""rounds": 5"#, r#""rounds": 500"#),
    );
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--output", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("grow"), "{}", stderr(&o));
}

#[test]
fn divergence_exits_3_naming_strategy_and_replication() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"objective": {"type": "quadratic", "dim": 3, "c1": 0.0, "c2": 0.0},
            "workers": 2, "horizon": 2000, "steps": {"kind": "constant", "eta": 1.5},
            "strategies": [{"name": "blowup", "schedule": {"kind": "one_shot"}}],
            "replications": 2}"#,
    );
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--output", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let err = stderr(&o);
    assert!(err.contains("\"blowup\"") && err.contains("replication 0"), "{err}");
}

#[test]
fn speedup_single_worker_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"objective": {"type": "piecewise", "sigma": 8.0},
            "workers_list": [1], "horizon": 100,
            "steps": {"kind": "capped_inverse_t"},
            "families": ["growing"], "replications": 50, "seed": 7}"#,
    );
    let out = dir.path().join("o");
    let o = run(&["speedup", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(out.join("speedup.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "family,N,R_effective,speedup,speedup_std");
    assert_eq!(lines.len(), 2);
    let f: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&f[..2], &["growing", "1"]);
    assert_eq!(f[3].parse::<f64>().unwrap(), 1.0);
    assert_eq!(f[4].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn speedup_rejects_theorem_beta() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"objective": {"type": "piecewise", "sigma": 1.0},
            "workers_list": [1, 2], "horizon": 100,
            "steps": {"kind": "inverse_t", "beta": "theorem"},
            "families": ["growing"], "replications": 5}"#,
    );
    assert_eq!(run(&["speedup", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn shipped_configs_load() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../experiments");
    for name in ["fig1.json", "fig2a.json", "fig2b.json", "logistic_a9a.json"] {
        let exp = localsgd_cli::Experiment::load(&root.join(name))
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        if exp.config.families.is_empty() {
            exp.strategy_runs().unwrap();
        } else {
            exp.speedup_base().unwrap();
        }
    }
}
