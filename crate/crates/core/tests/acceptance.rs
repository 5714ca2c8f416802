//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --release --test acceptance`. Select criteria with
//! `SWARM_ACCEPTANCE=1,2,9`. The process exits non-zero on a failure only
//! when `SWARM_ACCEPTANCE_STRICT=1`, so that a documented, known failure does
//! not mask the rest of `cargo test`.

use std::time::Instant;

use nalgebra::{Matrix2, Matrix6, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use swarm_core::control::{
    formation_cost, nbo_rollout, CostWeights, HorizonControls, LocalBelief, Mode, Neighbor, PlanContext,
};
use swarm_core::experiments::config::{AlgoName as FusionAlgoName, GraphKind, ScenarioConfig};
use swarm_core::experiments::metrics::{ls_slope, mean_std, spearman, tracking_error_series};
use swarm_core::experiments::run_scenario;
use swarm_core::experiments::sweep::{named_grid, preset, run_sweep, SweepRun};
use swarm_core::fusion::consensus_step;
use swarm_core::motion::{observation_matrix, step_uav, ControlInput, Measurement, SensorParams, UavLimits, UavNoise, UavState};
use swarm_core::network::{gen_config1, gen_config2, gen_config3, SensorNetwork};
use swarm_core::optimizer::{minimize, BoxBounds, OptimizerOptions};
use swarm_core::tracking::{kf_update, TrackerState};
use swarm_core::Vec2;

const SEEDS: usize = 10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn main() {
    let selected: Option<Vec<usize>> = std::env::var("SWARM_ACCEPTANCE")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let strict = std::env::var("SWARM_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let wanted = |n: usize| selected.as_ref().is_none_or(|s| s.contains(&n));

    // criteria 1 and 2 share their runs
    let formation_runs = (wanted(1) || wanted(2)).then(formation_comparison);

    let mut failures = 0;
    let mut report = |n: usize, title: &str, o: Outcome| {
        println!("{} {n}: {title} -- {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failures += usize::from(!o.pass);
    };
    if let Some(runs) = &formation_runs {
        if wanted(1) {
            report(1, "planner speed ordering", criterion1(runs));
        }
        if wanted(2) {
            report(2, "collision avoidance", criterion2(runs));
        }
    }
    type Check = fn() -> Outcome;
    let rest: [(usize, &str, Check); 7] = [
        (3, "formation convergence", criterion3),
        (4, "neighborhood-threshold trends", criterion4),
        (5, "tracking ordering", criterion5),
        (6, "consensus vs Bayesian fusion", criterion6),
        (7, "monotone network trends", criterion7),
        (8, "alpha endpoint behaviour", criterion8),
        (9, "property suites", criterion9),
    ];
    for (n, title, check) in rest {
        if wanted(n) {
            let clock = Instant::now();
            let o = check();
            report(n, title, Outcome { detail: format!("{} [{:.0} s]", o.detail, clock.elapsed().as_secs_f64()), ..o });
        }
    }
    println!("acceptance: {failures} failing criteria");
    if strict && failures > 0 {
        std::process::exit(1);
    }
}

fn values(runs: &[SweepRun], label: &str, f: impl Fn(&SweepRun) -> Option<f64>) -> Vec<f64> {
    runs.iter().filter(|r| r.value.as_str() == Some(label) || r.value.to_string() == label).filter_map(f).collect()
}

fn fmt(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(" ")
}

// ---------------------------------------------------------------- formation

struct FormationRuns {
    runs: Vec<SweepRun>,
    seconds: f64,
}

fn formation_comparison() -> FormationRuns {
    let clock = Instant::now();
    let base = preset("formation_circle").unwrap();
    let planners = ["decentralized", "centralized"].map(|p| toml::Value::String(p.into()));
    let runs = run_sweep(&base, "swarm.planner", &planners, SEEDS, None).unwrap();
    FormationRuns { runs, seconds: clock.elapsed().as_secs_f64() }
}

fn criterion1(fr: &FormationRuns) -> Outcome {
    let tc = |p: &str| values(&fr.runs, p, |r| r.summary.tc.as_ref().map(|t| t.mean_ms));
    let tf = |p: &str| values(&fr.runs, p, |r| Some(r.summary.tf_s.unwrap_or(f64::INFINITY)));
    let (tc_d, tc_c) = (tc("decentralized"), tc("centralized"));
    let (tf_d, tf_c) = (tf("decentralized"), tf("centralized"));
    let faster = tc_d.iter().zip(&tc_c).filter(|(d, c)| d < c).count();
    let earlier = tf_d.iter().zip(&tf_c).filter(|(d, c)| d <= c).count();
    outcome(
        faster == SEEDS && earlier >= 8,
        format!(
            "Tc dec < cen in {faster}/{SEEDS} seeds (dec ms [{}], cen ms [{}]); Tf dec <= cen in {earlier}/{SEEDS} (dec s [{}], cen s [{}]) [{:.0} s]",
            fmt(&tc_d),
            fmt(&tc_c),
            fmt(&tf_d),
            fmt(&tf_c),
            fr.seconds
        ),
    )
}

fn criterion2(fr: &FormationRuns) -> Outcome {
    let min = |p: &str| values(&fr.runs, p, |r| r.summary.pairwise.map(|p| p.0));
    let (d, c) = (min("decentralized"), min("centralized"));
    let ok = d.iter().chain(&c).filter(|&&m| m >= 10.0).count();
    outcome(
        ok == 2 * SEEDS,
        format!("min pairwise >= 10 m in {ok}/{} runs (dec [{}], cen [{}])", 2 * SEEDS, fmt(&d), fmt(&c)),
    )
}

fn criterion3() -> Outcome {
    let mut parts = Vec::new();
    let mut all = true;
    for shape in ["formation_circle", "formation_rectangle", "formation_square"] {
        let base = preset(shape).unwrap();
        let runs = run_sweep(&base, "swarm.planner", &[toml::Value::String("decentralized".into())], SEEDS, None)
            .unwrap();
        let arrived: Vec<f64> = runs.iter().filter_map(|r| r.summary.tf_s).collect();
        all &= arrived.len() == SEEDS;
        parts.push(format!("{}: {}/{SEEDS} arrived (Tf s [{}])", &shape[10..], arrived.len(), fmt(&arrived)));
    }
    outcome(all, parts.join("; "))
}

fn criterion4() -> Outcome {
    let mut base = preset("formation_circle").unwrap();
    // Wide neighborhoods make every UAV solve the whole-swarm problem; the
    // sweep caps the per-call budget and shortens the run to keep it tractable.
    base.optimizer.max_evals = Some(THRESHOLD_SWEEP_EVALS);
    base.sim_steps = THRESHOLD_SWEEP_STEPS;
    let grid = named_grid("threshold").unwrap();
    let runs = run_sweep(&base, "swarm.neighborhood_threshold", &grid, SEEDS, None).unwrap();
    let mean_of = |v: &toml::Value, f: &dyn Fn(&SweepRun) -> Option<f64>| {
        let xs: Vec<f64> = runs.iter().filter(|r| &r.value == v).filter_map(f).collect();
        mean_std(&xs).0
    };
    let tc: Vec<f64> = grid.iter().map(|v| mean_of(v, &|r| r.summary.tc.as_ref().map(|t| t.mean_ms))).collect();
    let pair: Vec<f64> = grid.iter().map(|v| mean_of(v, &|r| r.summary.pairwise.map(|p| p.1))).collect();
    let th: Vec<f64> = grid.iter().map(|v| v.as_float().unwrap()).collect();
    let last3 = &tc[tc.len() - 3..];
    let (lo, hi) = last3.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    let plateau = (hi - lo) / lo < 0.25;
    let rises = tc[tc.len() - 1] >= tc[0];
    let wide: Vec<f64> = th.iter().zip(&pair).filter(|(t, _)| **t >= 130.0).map(|(_, p)| *p).collect();
    let closer = wide.iter().all(|p| *p < pair[0]);
    outcome(
        rises && plateau && closer,
        format!(
            "thresholds [{}]: Tc ms [{}] (240 >= 10: {rises}, last three spread {:.0}%); mean pairwise m [{}] (all >=130 below 10: {closer})",
            fmt(&th),
            fmt(&tc),
            100.0 * (hi - lo) / lo,
            fmt(&pair)
        ),
    )
}

const THRESHOLD_SWEEP_EVALS: usize = 2000;
const THRESHOLD_SWEEP_STEPS: usize = 60;

// ----------------------------------------------------------------- tracking

fn criterion5() -> Outcome {
    let base = preset("tracking_single").unwrap();
    let planners = ["decentralized", "centralized"].map(|p| toml::Value::String(p.into()));
    let runs = run_sweep(&base, "swarm.planner", &planners, SEEDS, None).unwrap();
    let err = |p: &str| values(&runs, p, |r| r.summary.avg_err);
    let (d, c) = (err("decentralized"), err("centralized"));
    let (md, mc) = (mean_std(&d).0, mean_std(&c).0);

    // multitarget: average the per-step error over seeds, then fit a line
    let multi = preset("tracking_multi").unwrap();
    let mut series: Vec<f64> = Vec::new();
    let mut positive = 0;
    for r in 0..SEEDS {
        let mut cfg = multi.clone();
        cfg.seed = multi.seed + r as u64;
        let rec = run_scenario(&cfg).unwrap();
        let s = tracking_error_series(&rec.truth, &rec.estimates);
        positive += usize::from(ls_slope(&s) > 0.0);
        if series.is_empty() {
            series = vec![0.0; s.len()];
        }
        for (a, b) in series.iter_mut().zip(&s) {
            *a += b / SEEDS as f64;
        }
    }
    let slope = ls_slope(&series);
    outcome(
        mc <= md && slope > 0.0,
        format!(
            "single target mean error cen {mc:.3} vs dec {md:.3}; multitarget dec slope {slope:.4} per step (positive in {positive}/{SEEDS} seeds)"
        ),
    )
}

// ------------------------------------------------------------------- fusion

fn fusion_base() -> ScenarioConfig {
    preset("fusion").unwrap()
}

fn criterion6() -> Outcome {
    let mut failures = Vec::new();
    let mut within_se = 0;
    let mut rows = Vec::new();
    for m in named_grid("m").unwrap() {
        let cfg = fusion_base().with_override("fusion.m", m.clone()).unwrap();
        let algos = ["consensus", "bayes"].map(|a| toml::Value::String(a.into()));
        let runs = run_sweep(&cfg, "fusion.algo", &algos, SEEDS, None).unwrap();
        let (c, b) = (values(&runs, "consensus", |r| r.summary.avg_err), values(&runs, "bayes", |r| r.summary.avg_err));
        let ((mc, sc), (mb, sb)) = (mean_std(&c), mean_std(&b));
        rows.push(format!("M={m}: {mc:.2}/{mb:.2}"));
        if mc > mb {
            failures.push(m.to_string());
            let se = ((sc * sc + sb * sb) / SEEDS as f64).sqrt();
            within_se += usize::from(mc - mb <= se);
        }
    }
    let pass = failures.is_empty() || (failures.len() == 1 && within_se == 1);
    outcome(pass, format!("consensus/bayes mean error [{}]; violations at M = {failures:?}", rows.join(", ")))
}

// fusion runs are cheap, so the trend means use more graphs than the comparisons
const TREND_REPEATS: usize = 20;

fn trend(param: &str, grid: &[toml::Value], repeats: usize, algo: FusionAlgoName) -> (f64, Vec<f64>) {
    let mut cfg = fusion_base();
    cfg.fusion.m = 1;
    cfg.fusion.algo = algo;
    // the sweep overrides the parameter; these only make the base valid
    (cfg.fusion.degree, cfg.fusion.edge_prob, cfg.fusion.edges) = (Some(2), Some(0.5), Some(9));
    cfg.fusion.graph = match param {
        "fusion.degree" => GraphKind::Regular,
        "fusion.edge_prob" => GraphKind::EdgeProbability,
        _ => GraphKind::EdgeCount,
    };
    let runs = run_sweep(&cfg, param, grid, repeats, None).unwrap();
    let means: Vec<f64> = grid
        .iter()
        .map(|v| mean_std(&runs.iter().filter(|r| &r.value == v).filter_map(|r| r.summary.avg_err).collect::<Vec<_>>()).0)
        .collect();
    let xs: Vec<f64> = grid.iter().map(|v| v.as_float().or(v.as_integer().map(|i| i as f64)).unwrap()).collect();
    (spearman(&xs, &means), means)
}

fn criterion7() -> Outcome {
    let mut all = true;
    let mut parts = Vec::new();
    for (param, grid) in [("fusion.degree", "degree"), ("fusion.edge_prob", "edge_prob"), ("fusion.edges", "edges")] {
        let grid = named_grid(grid).unwrap();
        for algo in [FusionAlgoName::Consensus, FusionAlgoName::Bayes] {
            let (rho, means) = trend(param, &grid, TREND_REPEATS, algo);
            all &= rho <= -0.8;
            parts.push(format!("{param} {algo:?}: rho {rho:.2} [{}]", fmt(&means)));
        }
    }
    outcome(all, parts.join("; "))
}

fn criterion8() -> Outcome {
    let alphas = [0.5, 0.95].map(toml::Value::Float);
    let runs = run_sweep(&fusion_base(), "fusion.alpha", &alphas, SEEDS, None).unwrap();
    let lo = mean_std(&values(&runs, "0.5", |r| r.summary.avg_err)).0;
    let hi = mean_std(&values(&runs, "0.95", |r| r.summary.avg_err)).0;
    outcome(hi >= 1.5 * lo, format!("mean error alpha=0.95 {hi:.3} vs alpha=0.5 {lo:.3} (ratio {:.2})", hi / lo))
}

// --------------------------------------------------------------- properties

fn random_spd(rng: &mut ChaCha8Rng, scale: f64) -> Matrix6<f64> {
    let a = Matrix6::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    a * a.transpose() * scale + Matrix6::identity() * 0.1
}

fn joseph_suite(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let h = observation_matrix();
    for case in 0..1000 {
        let t = TrackerState::new(Vector6::from_fn(|_, _| rng.gen_range(-50.0..50.0)), random_spd(rng, 5.0));
        let b = Matrix2::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let r = (b * b.transpose() + Matrix2::identity() * 0.05) * rng.gen_range(0.01..100.0);
        let m = Measurement { z: Vec2::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0)), cov: r };
        let u = kf_update(&t, &m, &h).map_err(|e| e.to_string())?;
        let s = h * t.cov * h.transpose() + r;
        let k = t.cov * h.transpose() * s.try_inverse().unwrap();
        let ikh = Matrix6::identity() - k * h;
        let joseph = ikh * t.cov * ikh.transpose() + k * r * k.transpose();
        let rel = (u.cov - joseph).norm() / joseph.norm();
        if rel > 1e-8 {
            return Err(format!("Joseph case {case}: relative gap {rel:e}"));
        }
    }
    Ok(())
}

fn consensus_suite(rng: &mut ChaCha8Rng) -> Result<(), String> {
    use nalgebra::SVector;
    for case in 0..100 {
        let n = rng.gen_range(4..=16);
        let d = loop {
            let d = rng.gen_range(2..n);
            if n * d % 2 == 0 {
                break d;
            }
        };
        let net = gen_config1(n, d, rng).map_err(|e| e.to_string())?;
        // fixed point
        let same = vec![SVector::<f64, 3>::new(1.5, -2.0, 7.0); n];
        if consensus_step(&same, &net, 0.5).unwrap() != same {
            return Err(format!("case {case}: equal values moved"));
        }
        let mut ys: Vec<SVector<f64, 3>> = (0..n).map(|_| SVector::from_fn(|_, _| rng.gen_range(-100.0..100.0))).collect();
        let mean = ys.iter().sum::<SVector<f64, 3>>() / n as f64;
        for _ in 0..500 {
            ys = consensus_step(&ys, &net, 0.5).unwrap();
        }
        let worst = ys.iter().map(|y| (y - mean).amax()).fold(0.0, f64::max);
        if worst > 1e-6 {
            return Err(format!("case {case}: {d}-regular graph on {n} nodes off the mean by {worst:e}"));
        }
    }
    Ok(())
}

fn rollout_suite(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let limits = UavLimits { noise: UavNoise::default(), ..UavLimits::default() };
    for case in 0..500 {
        let h = rng.gen_range(1..=8);
        let nn = rng.gen_range(0..=3);
        let ctx = PlanContext {
            mode: Mode::Formation,
            horizon: h,
            limits,
            weights: CostWeights { w1: rng.gen_range(0.0..2.0), w2: rng.gen_range(0.0..500.0), d_coll_thresh: 10.0 },
            target_model: None,
            sensor: SensorParams::default(),
        };
        let uav = |rng: &mut ChaCha8Rng| {
            UavState::new(rng.gen_range(-30.0..30.0), rng.gen_range(-30.0..30.0), rng.gen_range(0.0..10.0), rng.gen_range(-3.0..3.0))
        };
        let b = LocalBelief {
            id: 0,
            own: uav(rng),
            neighbors: (0..nn)
                .map(|j| Neighbor {
                    id: j + 1,
                    state: uav(rng),
                    destination: Some(Vec2::new(rng.gen_range(-80.0..80.0), rng.gen_range(-80.0..80.0))),
                })
                .collect(),
            destination: Some(Vec2::new(rng.gen_range(-80.0..80.0), rng.gen_range(-80.0..80.0))),
            tracker: None,
            assignment: None,
        };
        let seq = |rng: &mut ChaCha8Rng| -> Vec<ControlInput> {
            (0..h).map(|_| ControlInput::new(rng.gen_range(-5.0..3.0), rng.gen_range(-0.78..0.78))).collect()
        };
        let hc = HorizonControls { own: seq(rng), neighbors: (0..nn).map(|_| seq(rng)).collect() };
        let got = nbo_rollout(&b, &hc, &ctx).map_err(|e| e.to_string())?;
        // oracle: step with the public kinematics and score each nominal state
        let mut s = b.clone();
        let mut want = 0.0;
        for k in 0..h {
            s.own = step_uav(&s.own, &hc.own[k], &limits, &[0.0; 4]).unwrap();
            for (n, q) in s.neighbors.iter_mut().zip(&hc.neighbors) {
                n.state = step_uav(&n.state, &q[k], &limits, &[0.0; 4]).unwrap();
            }
            want += formation_cost(&s, &ctx.weights);
        }
        if (got - want).abs() > 1e-10 * want.abs().max(1.0) {
            return Err(format!("rollout case {case}: {got} vs {want}"));
        }
    }
    Ok(())
}

fn optimizer_suite() -> Result<(), String> {
    let b1 = BoxBounds::uniform(1, 0.0, 10.0).unwrap();
    let m = minimize(|x| (x[0] - 3.0).powi(2), &[0.0], &b1, &OptimizerOptions::for_dim(1)).unwrap();
    if (m.x[0] - 3.0).abs() > 1e-4 {
        return Err(format!("quadratic minimum at {:?}", m.x));
    }
    let m = minimize(|x| (x[0] + 5.0).powi(2), &[4.0], &b1, &OptimizerOptions::for_dim(1)).unwrap();
    if m.x[0] != 0.0 {
        return Err(format!("active bound at {:?}", m.x));
    }
    let b2 = BoxBounds::uniform(2, -2.0, 2.0).unwrap();
    let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
    let opts = OptimizerOptions { restarts: 3, ..OptimizerOptions::for_dim(2) };
    let m = minimize(rosen, &[0.0, 0.0], &b2, &opts).unwrap();
    if (m.x[0] - 1.0).abs() > 1e-2 || (m.x[1] - 1.0).abs() > 1e-2 {
        return Err(format!("Rosenbrock minimum at {:?}", m.x));
    }
    Ok(())
}

fn generator_suite(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let check = |net: &SensorNetwork, what: &str| -> Result<(), String> {
        if net.is_connected() { Ok(()) } else { Err(format!("{what}: disconnected graph")) }
    };
    for _ in 0..1000 {
        let n = rng.gen_range(3..=20);
        let d = loop {
            let d = rng.gen_range(2..n);
            if n * d % 2 == 0 {
                break d;
            }
        };
        let g = gen_config1(n, d, rng).map_err(|e| e.to_string())?;
        check(&g, "config I")?;
        if (0..n).any(|i| g.degree(i) != d) {
            return Err(format!("config I: degree other than {d} on {n} nodes"));
        }
    }
    for _ in 0..1000 {
        let n = rng.gen_range(2..=20);
        let pe = rng.gen_range(0.1..=1.0);
        check(&gen_config2(n, pe, rng).map_err(|e| e.to_string())?, "config II")?;
    }
    for _ in 0..1000 {
        let n = rng.gen_range(2..=20);
        let ne = rng.gen_range(n - 1..=n * (n - 1) / 2);
        let g = gen_config3(n, ne, rng).map_err(|e| e.to_string())?;
        check(&g, "config III")?;
        if g.edge_count() != ne {
            return Err(format!("config III: {} edges instead of {ne}", g.edge_count()));
        }
    }
    Ok(())
}

fn criterion9() -> Outcome {
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let suites: [(&str, Result<(), String>); 5] = [
        ("Kalman/Joseph", joseph_suite(&mut rng)),
        ("consensus", consensus_suite(&mut rng)),
        ("NBO rollout", rollout_suite(&mut rng)),
        ("optimizer", optimizer_suite()),
        ("generators", generator_suite(&mut rng)),
    ];
    let secs = clock.elapsed().as_secs_f64();
    let failed: Vec<String> = suites.iter().filter_map(|(n, r)| r.as_ref().err().map(|e| format!("{n}: {e}"))).collect();
    outcome(
        failed.is_empty() && secs < 300.0,
        if failed.is_empty() { format!("all five suites pass in {secs:.1} s") } else { failed.join("; ") },
    )
}
