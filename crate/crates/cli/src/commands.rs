use std::fs;
use std::path::{Path, PathBuf};

use localsgd_core::experiment::{
    estimate_expected_error, speedup_point, ExperimentRecord, ScheduleFamily, SpeedupBaseline,
    SpeedupPoint,
};
use localsgd_core::objectives::read_libsvm;

use crate::config::Experiment;
use crate::error::CliError;
use crate::output;

/// Flag values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub replications: Option<u64>,
    pub output: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, exp: &mut Experiment) {
        if let Some(s) = self.seed {
            exp.config.seed = s;
        }
        if let Some(r) = self.replications {
            exp.config.replications = r;
        }
        if let Some(o) = &self.output {
            exp.config.output = Some(o.clone());
        }
    }
}

fn output_dir(exp: &Experiment) -> Result<PathBuf, CliError> {
    let dir = exp
        .config
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(default_name(exp)));
    fs::create_dir_all(&dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn default_name(exp: &Experiment) -> String {
    if exp.config.name.is_empty() {
        "experiment".into()
    } else {
        exp.config.name.clone()
    }
}

/// Runs every strategy and writes `trace_<strategy>.csv`, `summary.csv`
/// and `records.json` into the output directory.
pub fn run(exp: &Experiment) -> Result<Vec<(String, ExperimentRecord)>, CliError> {
    let runs = exp.strategy_runs()?;
    let mut records = Vec::with_capacity(runs.len());
    for (name, cfg) in runs {
        let rec = estimate_expected_error(&cfg).map_err(|e| CliError::from_core(&name, e))?;
        let s = rec.summary(exp.config.metric);
        eprintln!(
            "{name}: R={} mean={:e} std={:e} ({} ms)",
            rec.rounds, s.mean, s.std, rec.wall_ms
        );
        records.push((name, rec));
    }
    let dir = output_dir(exp)?;
    for (name, rec) in &records {
        output::write_trace(&dir.join(format!("trace_{name}.csv")), rec)?;
    }
    output::write_summary(&dir.join("summary.csv"), &records, exp.config.metric)?;
    output::write_json(&dir.join("records.json"), &records)?;
    Ok(records)
}

/// Speed-up of each family over single-worker SGD; writes `speedup.csv`.
pub fn speedup(exp: &Experiment) -> Result<Vec<(ScheduleFamily, SpeedupPoint)>, CliError> {
    let base = exp.speedup_base()?;
    let metric = exp.config.metric;
    let baseline =
        SpeedupBaseline::compute(&base, metric).map_err(|e| CliError::from_core("baseline", e))?;
    eprintln!("baseline (N=1): mean={:e}", baseline.mean());
    let mut rows = Vec::new();
    for &family in &exp.config.families {
        let label = family.to_string();
        for &n in &exp.config.workers_list {
            let p = speedup_point(&base, n, family, &baseline)
                .map_err(|e| CliError::from_core(&format!("{label} N={n}"), e))?;
            eprintln!(
                "{label} N={n}: R={} speedup={}",
                p.rounds,
                p.speedup.map_or("saturated".into(), |s| format!("{s:.4}"))
            );
            rows.push((family, p));
        }
    }
    let dir = output_dir(exp)?;
    output::write_speedup(&dir.join("speedup.csv"), &rows)?;
    Ok(rows)
}

/// Parses a LIBSVM file, returning `(rows, dimension)`.
pub fn parse_data(path: &Path, dim: Option<usize>) -> Result<(usize, usize), CliError> {
    if !path.is_file() {
        return Err(CliError::Config(format!(
            "dataset not found: {}",
            path.display()
        )));
    }
    let ds = read_libsvm(path, dim)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok((ds.len(), ds.dim()))
}
