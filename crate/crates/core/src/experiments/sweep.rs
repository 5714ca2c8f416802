//! Parameter sweeps, matched-seed comparisons and the bundled presets.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::experiments::config::{ConfigError, ScenarioConfig};
use crate::experiments::metrics::{mean_std, summarize, RunSummary};
use crate::experiments::output::write_run;
use crate::experiments::sim::run_scenario;
use crate::Result;

/// Example configurations shipped in `configs/`.
pub const PRESETS: [(&str, &str); 6] = [
    ("formation_circle", include_str!("../../configs/formation_circle.toml")),
    ("formation_rectangle", include_str!("../../configs/formation_rectangle.toml")),
    ("formation_square", include_str!("../../configs/formation_square.toml")),
    ("tracking_single", include_str!("../../configs/tracking_single.toml")),
    ("tracking_multi", include_str!("../../configs/tracking_multi.toml")),
    ("fusion", include_str!("../../configs/fusion.toml")),
];

pub fn preset(name: &str) -> std::result::Result<ScenarioConfig, ConfigError> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| ConfigError::Parse(format!("no preset named `{name}`")))?;
    ScenarioConfig::from_toml_str(text)
}

/// Named value grids used in the experiments.
pub fn named_grid(name: &str) -> Option<Vec<toml::Value>> {
    use toml::Value::{Float, Integer};
    let ints = |r: std::ops::RangeInclusive<i64>, step: usize| r.step_by(step).map(Integer).collect();
    Some(match name {
        // duty-cycle lengths
        "m_fine" => ints(1..=9, 1),
        "m" => ints(3..=24, 3),
        "edge_prob" => (1..=10).map(|i| Float(i as f64 / 10.0)).collect(),
        "alpha" => [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 1.0].into_iter().map(Float).collect(),
        "threshold" => [10.0, 40.0, 70.0, 100.0, 130.0, 160.0, 190.0, 220.0, 240.0].into_iter().map(Float).collect(),
        "degree" => ints(2..=9, 1),
        "edges" => ints(9..=45, 4),
        _ => return None,
    })
}

/// Parses a comma-separated list of TOML scalars; bare words become strings.
pub fn parse_values(list: &str) -> std::result::Result<Vec<toml::Value>, ConfigError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let parsed = format!("v = {s}").parse::<toml::Table>().ok().and_then(|mut t| t.remove("v"));
            match parsed {
                Some(v) => Ok(v),
                None if s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') => Ok(toml::Value::String(s.into())),
                None => Err(ConfigError::Parse(format!("cannot read sweep value `{s}`"))),
            }
        })
        .collect()
}

/// One run of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRun {
    pub value: toml::Value,
    pub repeat: usize,
    pub seed: u64,
    pub summary: RunSummary,
}

#[derive(Serialize)]
struct SweepRow {
    param_value: String,
    repeat: usize,
    seed: u64,
    avg_err: Option<f64>,
    err_slope: Option<f64>,
    tc_mean_ms: Option<f64>,
    tc_std_ms: Option<f64>,
    tf_s: Option<f64>,
    min_pair_m: Option<f64>,
    mean_pair_m: Option<f64>,
}

#[derive(Serialize)]
struct AggregateRow {
    param_value: String,
    metric: &'static str,
    mean: f64,
    std: f64,
    n: usize,
}

fn value_label(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl SweepRun {
    fn metrics(&self) -> [(&'static str, Option<f64>); 6] {
        let s = &self.summary;
        [
            ("avg_err", s.avg_err),
            ("err_slope", s.err_slope),
            ("tc_mean_ms", s.tc.as_ref().map(|t| t.mean_ms)),
            ("tf_s", s.tf_s),
            ("min_pair_m", s.pairwise.map(|p| p.0)),
            ("mean_pair_m", s.pairwise.map(|p| p.1)),
        ]
    }
}

/// Runs `base` with `param` set to each value, `repeats` times. Repeat `r`
/// uses seed `base.seed + r` for every value, so all values see matched
/// seeds. When `out` is given each run is written to
/// `out/<value>/rep<r>/` and the sweep tables to `out/`.
pub fn run_sweep(
    base: &ScenarioConfig,
    param: &str,
    values: &[toml::Value],
    repeats: usize,
    out: Option<&Path>,
) -> Result<Vec<SweepRun>> {
    // validate every point before spending time on any run
    let mut cfgs = Vec::new();
    for v in values {
        for r in 0..repeats {
            let mut cfg = base.with_override(param, v.clone())?;
            cfg.seed = base.seed + r as u64;
            cfg.validate()?;
            cfgs.push((v.clone(), r, cfg));
        }
    }
    let mut runs = Vec::with_capacity(cfgs.len());
    for (value, repeat, cfg) in cfgs {
        let rec = run_scenario(&cfg)?;
        if let Some(dir) = out {
            write_run(&dir.join(value_label(&value)).join(format!("rep{repeat}")), &cfg, &rec)?;
        }
        runs.push(SweepRun { value, repeat, seed: cfg.seed, summary: summarize(&rec, cfg.formation.arrival_tol) });
    }
    if let Some(dir) = out {
        write_sweep_tables(dir, &runs)?;
    }
    Ok(runs)
}

/// `summary.csv` with one row per run and `aggregate.csv` with mean and
/// sample standard deviation per value and metric.
pub fn write_sweep_tables(dir: &Path, runs: &[SweepRun]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    for r in runs {
        let s = &r.summary;
        w.serialize(SweepRow {
            param_value: value_label(&r.value),
            repeat: r.repeat,
            seed: r.seed,
            avg_err: s.avg_err,
            err_slope: s.err_slope,
            tc_mean_ms: s.tc.as_ref().map(|t| t.mean_ms),
            tc_std_ms: s.tc.as_ref().map(|t| t.std_ms),
            tf_s: s.tf_s,
            min_pair_m: s.pairwise.map(|p| p.0),
            mean_pair_m: s.pairwise.map(|p| p.1),
        })?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("aggregate.csv"))?;
    let mut labels: Vec<String> = Vec::new();
    for r in runs {
        let l = value_label(&r.value);
        if !labels.contains(&l) {
            labels.push(l);
        }
    }
    for label in labels {
        let group: Vec<&SweepRun> = runs.iter().filter(|r| value_label(&r.value) == label).collect();
        for (m, metric) in group[0].metrics().iter().enumerate() {
            let xs: Vec<f64> = group.iter().filter_map(|r| r.metrics()[m].1).collect();
            if xs.is_empty() {
                continue;
            }
            let (mean, std) = mean_std(&xs);
            w.serialize(AggregateRow { param_value: label.clone(), metric: metric.0, mean, std, n: xs.len() })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Runs `base` once with each planner on seeds `base.seed .. base.seed + repeats`.
pub fn compare_planners(base: &ScenarioConfig, repeats: usize, out: Option<&Path>) -> Result<Vec<SweepRun>> {
    let planners = ["decentralized", "centralized"].map(|p| toml::Value::String(p.into()));
    run_sweep(base, "swarm.planner", &planners, repeats, out)
}
