//! Seeded simulation loops for the three scenario modes.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::Vector6;
use rand::Rng;

use crate::control::{
    assign_destinations, assign_targets, plan_centralized, plan_local, select_neighbors, CentralPlan, GlobalBelief,
    LocalBelief, LocalPlan, Neighbor, PlanContext,
};
use crate::experiments::config::{GraphKind, PlannerKind, ScenarioConfig, ScenarioMode};
use crate::experiments::record::RunRecord;
use crate::fusion::{run_duty_cycle, FusionWorld};
use crate::motion::{
    measure, observation_matrix, step_target, step_uav, ControlInput, Measurement, TargetState, UavState,
};
use crate::network::{gen_config1, gen_config2, gen_config3, place_uniform, SensorNetwork};
use crate::rng::{derive_seed, mix, std_normals, stream_rng, Stream};
use crate::tracking::{combine_measurements, kf_predict, kf_update, TrackerState};
use crate::{Result, Vec2};

/// Runs one scenario. Everything random is drawn from streams of
/// `cfg.seed`, so two calls with the same config agree on every field of
/// the record except the timings.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunRecord> {
    cfg.validate()?;
    match cfg.mode {
        ScenarioMode::Fusion => run_fusion(cfg),
        _ => run_swarm(cfg),
    }
}

/// UAVs on a square grid around `start_center`, with jitter and heading
/// drawn from the placement stream.
pub fn initial_uavs(cfg: &ScenarioConfig) -> Vec<UavState> {
    let s = &cfg.swarm;
    let mut rng = stream_rng(cfg.seed, Stream::UavPlacement);
    let side = (s.n_uavs as f64).sqrt().ceil() as usize;
    let off = (side as f64 - 1.0) / 2.0;
    (0..s.n_uavs)
        .map(|i| {
            let (r, c) = ((i / side) as f64, (i % side) as f64);
            let mut jitter = || if s.start_jitter > 0.0 { rng.gen_range(-s.start_jitter..=s.start_jitter) } else { 0.0 };
            let x = s.start_center[0] + (c - off) * s.start_spacing + jitter();
            let y = s.start_center[1] + (r - off) * s.start_spacing + jitter();
            let heading = match s.start_heading_deg {
                Some(h) => h.to_radians(),
                None => rng.gen_range(-PI..PI),
            };
            UavState::new(x, y, s.start_speed, crate::motion::wrap_angle(heading))
        })
        .collect()
}

/// Target `t` starts near `target.start`; with several targets the
/// headings fan out evenly over `heading_span_deg`. The draws come from a
/// child of the target's stream, which itself drives the process noise.
pub fn initial_target(cfg: &ScenarioConfig, t: usize) -> TargetState {
    let tc = &cfg.target;
    let mut rng = stream_rng(derive_seed(cfg.seed, Stream::Target(t)), Stream::Target(0));
    let x = tc.start[0] + if tc.spread > 0.0 { rng.gen_range(-tc.spread..=tc.spread) } else { 0.0 };
    let y = tc.start[1] + if tc.spread > 0.0 { rng.gen_range(-tc.spread..=tc.spread) } else { 0.0 };
    let base = match tc.heading_deg {
        Some(h) => h.to_radians(),
        None => rng.gen_range(-PI..PI),
    };
    let fan = if tc.n_targets > 1 {
        tc.heading_span_deg.to_radians() * (t as f64 / (tc.n_targets - 1) as f64 - 0.5)
    } else {
        0.0
    };
    let (s, c) = (base + fan).sin_cos();
    Vector6::new(x, y, tc.speed * c, tc.speed * s, 0.0, 0.0)
}

/// Optimizer seed for a planning problem at step `k` over the UAVs `ids`.
/// It depends on the set only, so UAVs that plan for each other draw the
/// same restarts.
fn planner_seed(root: u64, k: usize, ids: impl IntoIterator<Item = usize>) -> u64 {
    let mut sorted: Vec<usize> = ids.into_iter().collect();
    sorted.sort_unstable();
    sorted.iter().fold(derive_seed(root, Stream::Planner(k)), |h, &id| mix(h ^ id as u64))
}

fn run_swarm(cfg: &ScenarioConfig) -> Result<RunRecord> {
    let n = cfg.swarm.n_uavs;
    let steps = cfg.sim_steps;
    let limits = cfg.uav_limits();
    let tracking = cfg.mode == ScenarioMode::Tracking;
    let ctx = PlanContext {
        mode: cfg.control_mode(),
        horizon: cfg.swarm.horizon,
        limits,
        weights: cfg.cost_weights(),
        target_model: tracking.then(|| cfg.target_model()),
        sensor: cfg.sensor_params(),
    };
    let hood = cfg.neighborhood();
    let central = cfg.swarm.planner == PlannerKind::Centralized;
    let warm = cfg.optimizer.warm_start;

    let mut states = initial_uavs(cfg);
    let mut uav_rngs: Vec<_> = (0..n).map(|i| stream_rng(cfg.seed, Stream::Uav(i))).collect();

    let destinations = if tracking {
        None
    } else {
        let mut rng = stream_rng(cfg.seed, Stream::Destinations);
        Some(assign_destinations(&cfg.shape(), n, cfg.min_sep(), &mut rng)?)
    };

    // Tracking state. Decentralized UAVs each keep a track of every target
    // built from their own measurements; the centralized planner keeps one
    // track per target fed by every UAV.
    let nt = if tracking { cfg.target.n_targets } else { 0 };
    let model = cfg.target_model();
    let sensor = cfg.sensor_params();
    let prior = cfg.prior_cov();
    let h = observation_matrix();
    let assignment = if tracking { Some(assign_targets(n, nt)?) } else { None };
    let mut targets: Vec<TargetState> = (0..nt).map(|t| initial_target(cfg, t)).collect();
    let mut target_rngs: Vec<_> = (0..nt).map(|t| stream_rng(cfg.seed, Stream::Target(t))).collect();
    let mut sensor_rngs: Vec<Vec<_>> =
        (0..n).map(|i| (0..nt).map(|t| stream_rng(cfg.seed, Stream::Sensor(i, t))).collect()).collect();
    let mut measure_all = |states: &[UavState], targets: &[TargetState]| -> Vec<Vec<Measurement>> {
        states
            .iter()
            .zip(sensor_rngs.iter_mut())
            .map(|(s, rngs)| {
                targets.iter().zip(rngs.iter_mut()).map(|(x, r)| measure(x, &s.pos(), &sensor, std_normals(r))).collect()
            })
            .collect()
    };
    let mut trackers: Vec<Vec<TrackerState>> = Vec::new();
    if tracking {
        let ms = measure_all(&states, &targets);
        trackers = if central {
            vec![(0..nt)
                .map(|t| {
                    let col: Vec<Measurement> = ms.iter().map(|m| m[t]).collect();
                    combine_measurements(&col).map(|m| TrackerState::from_position(&m.z, &prior))
                })
                .collect::<Result<_>>()?]
        } else {
            ms.iter().map(|m| m.iter().map(|m| TrackerState::from_position(&m.z, &prior)).collect()).collect()
        };
    }

    let mut rec = RunRecord {
        mode: cfg.mode,
        planner: cfg.swarm.planner,
        seed: cfg.seed,
        dt: limits.dt,
        steps,
        neighborhood: hood,
        uavs: Vec::with_capacity(steps + 1),
        controls: Vec::with_capacity(steps + 1),
        plan_ms: Vec::with_capacity(steps + 1),
        destinations: destinations.clone(),
        truth: Vec::new(),
        estimates: Vec::new(),
        assignment: assignment.clone(),
        network: None,
        fallbacks: 0,
    };
    if tracking {
        rec.truth.push(targets.clone());
        rec.estimates.push(trackers.clone());
    }

    let mut local_plans: Vec<Option<LocalPlan>> = vec![None; n];
    let mut central_plan: Option<CentralPlan> = None;

    for k in 0..steps {
        rec.uavs.push(states.clone());
        let (controls, times) = if central {
            let g = GlobalBelief {
                states: states.clone(),
                destinations: destinations.clone(),
                trackers: tracking.then(|| trackers[0].clone()),
                assignment: assignment.clone(),
            };
            let dim = 2 * ctx.horizon * n;
            let opts = cfg.optimizer_options(dim, planner_seed(cfg.seed, k, 0..n));
            let clock = Instant::now();
            let plan = plan_centralized(&g, &ctx, &opts, central_plan.as_ref().filter(|_| warm))?;
            let ms = clock.elapsed().as_secs_f64() * 1e3;
            rec.fallbacks += plan.fallback as usize;
            let controls = plan.controls.clone();
            central_plan = Some(plan);
            (controls, vec![ms])
        } else {
            let positions: Vec<Vec2> = states.iter().map(UavState::pos).collect();
            let mut controls = Vec::with_capacity(n);
            let mut times = Vec::with_capacity(n);
            for i in 0..n {
                let ids = select_neighbors(i, &positions, &hood);
                let b = LocalBelief {
                    id: i,
                    own: states[i],
                    neighbors: ids
                        .iter()
                        .map(|&j| Neighbor {
                            id: j,
                            state: states[j],
                            destination: destinations.as_ref().map(|d| d[j]),
                        })
                        .collect(),
                    destination: destinations.as_ref().map(|d| d[i]),
                    tracker: assignment.as_ref().map(|a| trackers[i][a[i]]),
                    assignment: assignment.as_ref().map(|a| a[i]),
                };
                let dim = 2 * ctx.horizon * (1 + ids.len());
                let opts = cfg.optimizer_options(dim, planner_seed(cfg.seed, k, ids.iter().copied().chain([i])));
                let clock = Instant::now();
                let plan = plan_local(&b, &ctx, &opts, local_plans[i].as_ref().filter(|_| warm))?;
                times.push(clock.elapsed().as_secs_f64() * 1e3);
                rec.fallbacks += plan.fallback as usize;
                controls.push(plan.control);
                local_plans[i] = Some(plan);
            }
            (controls, times)
        };

        for ((s, c), rng) in states.iter_mut().zip(&controls).zip(uav_rngs.iter_mut()) {
            *s = step_uav(s, c, &limits, &limits.noise.sample(rng))?;
        }
        rec.controls.push(controls);
        rec.plan_ms.push(times);

        if tracking {
            for (x, rng) in targets.iter_mut().zip(target_rngs.iter_mut()) {
                *x = step_target(x, &model, &model.sample_noise(rng))?;
            }
            let ms = measure_all(&states, &targets);
            if central {
                for (t, tr) in trackers[0].iter_mut().enumerate() {
                    let col: Vec<Measurement> = ms.iter().map(|m| m[t]).collect();
                    *tr = kf_update(&kf_predict(tr, &model), &combine_measurements(&col)?, &h)?;
                }
            } else {
                for (row, m) in trackers.iter_mut().zip(&ms) {
                    for (tr, m) in row.iter_mut().zip(m) {
                        *tr = kf_update(&kf_predict(tr, &model), m, &h)?;
                    }
                }
            }
            rec.truth.push(targets.clone());
            rec.estimates.push(trackers.clone());
        }
    }
    rec.uavs.push(states);
    rec.controls.push(vec![ControlInput::ZERO; n]);
    rec.plan_ms.push(Vec::new());
    Ok(rec)
}

/// Sensor graph for a fusion scenario, drawn from the network stream.
pub fn build_network(cfg: &ScenarioConfig) -> Result<SensorNetwork> {
    let f = &cfg.fusion;
    let mut rng = stream_rng(cfg.seed, Stream::Network);
    let net = match f.graph {
        GraphKind::Regular => gen_config1(f.n_sensors, f.degree.unwrap_or(0), &mut rng),
        GraphKind::EdgeProbability => gen_config2(f.n_sensors, f.edge_prob.unwrap_or(0.0), &mut rng),
        GraphKind::EdgeCount => gen_config3(f.n_sensors, f.edges.unwrap_or(0), &mut rng),
    }?;
    net.with_positions(place_uniform(f.n_sensors, &mut stream_rng(cfg.seed, Stream::SensorPlacement)))
}

fn run_fusion(cfg: &ScenarioConfig) -> Result<RunRecord> {
    let net = build_network(cfg)?;
    let world = FusionWorld {
        model: cfg.target_model(),
        initial_target: initial_target(cfg, 0),
        sensor: cfg.sensor_params(),
        prior_cov: cfg.prior_cov(),
    };
    let hist = run_duty_cycle(&world, &net, &cfg.schedule(), cfg.fusion.algo.into(), cfg.seed)?;
    Ok(RunRecord {
        mode: cfg.mode,
        planner: cfg.swarm.planner,
        seed: cfg.seed,
        dt: cfg.limits.dt,
        steps: cfg.sim_steps,
        neighborhood: cfg.neighborhood(),
        uavs: Vec::new(),
        controls: Vec::new(),
        plan_ms: Vec::new(),
        destinations: None,
        truth: hist.truth.into_iter().map(|x| vec![x]).collect(),
        estimates: hist.estimates.into_iter().map(|row| row.into_iter().map(|t| vec![t]).collect()).collect(),
        assignment: None,
        network: Some(net),
        fallbacks: 0,
    })
}
