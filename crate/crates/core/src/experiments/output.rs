//! CSV output of a run.
//!
//! | file            | one row per                               |
//! |-----------------|-------------------------------------------|
//! | `uavs.csv`      | step and UAV                              |
//! | `estimates.csv` | step, sensor and target                   |
//! | `steps.csv`     | step `1..=sim_steps`                      |
//! | `summary.csv`   | metric (`metric,value`)                   |
//! | `edges.txt`     | network edge (fusion runs only)           |
//! | `config.toml`   | the effective configuration, seed included |

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::experiments::config::ScenarioConfig;
use crate::experiments::metrics::{pairwise_distance, summarize, tracking_error_series};
use crate::experiments::record::RunRecord;
use crate::Result;

#[derive(Serialize)]
struct UavRow {
    step: usize,
    sim_time_s: f64,
    uav_id: usize,
    p: f64,
    q: f64,
    #[serde(rename = "V")]
    v: f64,
    theta: f64,
    f: f64,
    phi: f64,
    plan_ms: Option<f64>,
}

#[derive(Serialize)]
struct EstimateRow {
    step: usize,
    sensor_id: usize,
    target_id: usize,
    est_x: f64,
    est_y: f64,
    est_vx: f64,
    est_vy: f64,
    est_ax: f64,
    est_ay: f64,
    #[serde(rename = "trace_P")]
    trace_p: f64,
    truth_x: f64,
    truth_y: f64,
    truth_vx: f64,
    truth_vy: f64,
    truth_ax: f64,
    truth_ay: f64,
    sq_err: f64,
}

#[derive(Serialize)]
struct StepRow {
    step: usize,
    sim_time_s: f64,
    plan_ms: Option<f64>,
    min_pair_m: Option<f64>,
    mean_pair_m: Option<f64>,
    avg_sq_err: Option<f64>,
}

/// Writes every output file of `rec` into `dir`, creating it if needed.
pub fn write_run(dir: &Path, cfg: &ScenarioConfig, rec: &RunRecord) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.toml"), cfg.to_toml_string())?;

    let mut w = csv::Writer::from_path(dir.join("uavs.csv"))?;
    for (k, states) in rec.uavs.iter().enumerate() {
        let times = &rec.plan_ms[k];
        for (i, s) in states.iter().enumerate() {
            let c = rec.controls[k][i];
            // a centralized step has one planner time, repeated on each row
            let plan_ms = if times.len() == 1 { times.first() } else { times.get(i) };
            w.serialize(UavRow {
                step: k,
                sim_time_s: k as f64 * rec.dt,
                uav_id: i,
                p: s.x,
                q: s.y,
                v: s.speed,
                theta: s.heading,
                f: c.accel,
                phi: c.bank,
                plan_ms: plan_ms.copied(),
            })?;
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("estimates.csv"))?;
    for (k, (xs, per_sensor)) in rec.truth.iter().zip(&rec.estimates).enumerate() {
        for (s, tracks) in per_sensor.iter().enumerate() {
            for (t, (tr, x)) in tracks.iter().zip(xs).enumerate() {
                let m = tr.mean;
                w.serialize(EstimateRow {
                    step: k,
                    sensor_id: s,
                    target_id: t,
                    est_x: m[0],
                    est_y: m[1],
                    est_vx: m[2],
                    est_vy: m[3],
                    est_ax: m[4],
                    est_ay: m[5],
                    trace_p: tr.trace(),
                    truth_x: x[0],
                    truth_y: x[1],
                    truth_vx: x[2],
                    truth_vy: x[3],
                    truth_ax: x[4],
                    truth_ay: x[5],
                    sq_err: (m - x).norm_squared(),
                })?;
            }
        }
    }
    w.flush()?;

    let errs = tracking_error_series(&rec.truth, &rec.estimates);
    let mut w = csv::Writer::from_path(dir.join("steps.csv"))?;
    for k in 1..=rec.steps {
        let pair = rec.uavs.get(k).and_then(|s| pairwise_distance(std::slice::from_ref(s)));
        w.serialize(StepRow {
            step: k,
            sim_time_s: k as f64 * rec.dt,
            plan_ms: rec.plan_ms.get(k - 1).and_then(|r| r.iter().cloned().reduce(f64::max)),
            min_pair_m: pair.map(|p| p.0),
            mean_pair_m: pair.map(|p| p.1),
            avg_sq_err: errs.get(k - 1).copied(),
        })?;
    }
    w.flush()?;

    let sum = summarize(rec, cfg.formation.arrival_tol);
    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    w.write_record(["metric", "value"])?;
    let mut put = |name: &str, v: Option<f64>| -> Result<()> {
        if let Some(v) = v {
            w.write_record([name, &v.to_string()])?;
        }
        Ok(())
    };
    put("seed", Some(rec.seed as f64))?;
    put("steps", Some(rec.steps as f64))?;
    put("tc_mean_ms", sum.tc.as_ref().map(|t| t.mean_ms))?;
    put("tc_std_ms", sum.tc.as_ref().map(|t| t.std_ms))?;
    if let Some(t) = &sum.tc {
        for (i, v) in t.per_uav_ms.iter().enumerate() {
            put(&format!("tc_uav{i}_ms"), Some(*v))?;
        }
    }
    if rec.destinations.is_some() {
        // never arrived: infinity
        put("tf_s", Some(sum.tf_s.unwrap_or(f64::INFINITY)))?;
    }
    put("min_pair_m", sum.pairwise.map(|p| p.0))?;
    put("mean_pair_m", sum.pairwise.map(|p| p.1))?;
    put("avg_sq_err", sum.avg_err)?;
    put("err_slope", sum.err_slope)?;
    put("fallbacks", Some(rec.fallbacks as f64))?;
    w.flush()?;

    if let Some(dests) = &rec.destinations {
        let mut w = csv::Writer::from_path(dir.join("destinations.csv"))?;
        w.write_record(["uav_id", "x", "y"])?;
        for (i, d) in dests.iter().enumerate() {
            w.write_record([i.to_string(), d.x.to_string(), d.y.to_string()])?;
        }
        w.flush()?;
    }
    if let Some(assign) = &rec.assignment {
        let mut w = csv::Writer::from_path(dir.join("assignment.csv"))?;
        w.write_record(["uav_id", "target_id"])?;
        for (i, t) in assign.iter().enumerate() {
            w.write_record([i.to_string(), t.to_string()])?;
        }
        w.flush()?;
    }
    if let Some(net) = &rec.network {
        fs::write(dir.join("edges.txt"), net.to_edge_list())?;
    }
    Ok(())
}
