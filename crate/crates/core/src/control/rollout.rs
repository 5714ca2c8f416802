use super::cost::{collision_penalty, CostWeights};
use crate::motion::{
    advance, measurement_covariance, observation_matrix, ControlInput, Measurement, SensorParams, TargetModel,
    UavLimits, UavState,
};
use crate::tracking::{combine_measurements, kf_predict, kf_update, TrackerState};
use crate::{Error, Result, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Formation,
    Tracking,
}

/// Everything a planner needs besides the belief itself.
#[derive(Debug, Clone)]
pub struct PlanContext {
    pub mode: Mode,
    pub horizon: usize,
    pub limits: UavLimits,
    pub weights: CostWeights,
    /// Required in tracking mode.
    pub target_model: Option<TargetModel>,
    pub sensor: SensorParams,
}

impl PlanContext {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidInput("horizon must be at least one step".into()));
        }
        self.limits.validate()?;
        if self.mode == Mode::Tracking && self.target_model.is_none() {
            return Err(Error::InvalidInput("tracking mode needs a target model".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub id: usize,
    pub state: UavState,
    pub destination: Option<Vec2>,
}

/// What UAV `id` knows when it plans: its own state, the neighbors it
/// co-optimizes, destinations (formation) or its track (tracking).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalBelief {
    pub id: usize,
    pub own: UavState,
    pub neighbors: Vec<Neighbor>,
    pub destination: Option<Vec2>,
    pub tracker: Option<TrackerState>,
    pub assignment: Option<usize>,
}

impl LocalBelief {
    pub fn agents(&self) -> usize {
        1 + self.neighbors.len()
    }
}

/// Full-information belief used by the centralized planner.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalBelief {
    pub states: Vec<UavState>,
    /// Formation mode: one destination per UAV.
    pub destinations: Option<Vec<Vec2>>,
    /// Tracking mode: one fused track per target.
    pub trackers: Option<Vec<TrackerState>>,
    /// Tracking mode: target index per UAV.
    pub assignment: Option<Vec<usize>>,
}

/// Controls over the horizon for the planning UAV and each neighbor.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonControls {
    pub own: Vec<ControlInput>,
    pub neighbors: Vec<Vec<ControlInput>>,
}

impl HorizonControls {
    pub fn zeros(horizon: usize, neighbors: usize) -> Self {
        Self { own: vec![ControlInput::ZERO; horizon], neighbors: vec![vec![ControlInput::ZERO; horizon]; neighbors] }
    }

    /// Agent-major layout: `[a0k0.accel, a0k0.bank, a0k1.accel, ...]`.
    pub fn flatten(&self) -> Vec<f64> {
        std::iter::once(&self.own)
            .chain(&self.neighbors)
            .flat_map(|seq| seq.iter().flat_map(|c| [c.accel, c.bank]))
            .collect()
    }

    pub fn from_flat(x: &[f64], agents: usize, horizon: usize) -> Self {
        let seq = |a: usize| -> Vec<ControlInput> {
            (0..horizon).map(|k| control_at(x, horizon, a, k)).collect()
        };
        Self { own: seq(0), neighbors: (1..agents).map(seq).collect() }
    }
}

#[inline]
pub(crate) fn control_at(x: &[f64], horizon: usize, agent: usize, k: usize) -> ControlInput {
    let i = 2 * (agent * horizon + k);
    ControlInput { accel: x[i], bank: x[i + 1] }
}

/// Nominal cumulative cost of `hc` from belief `b`: every UAV is propagated
/// with zero noise and, in tracking mode, the track is propagated by a
/// prediction and an update with the noise-free measurement taken from the
/// UAV's nominal position. Returns the sum of the stage costs at the `H`
/// nominal successor states.
pub fn nbo_rollout(b: &LocalBelief, hc: &HorizonControls, ctx: &PlanContext) -> Result<f64> {
    ctx.validate()?;
    let h = ctx.horizon;
    if hc.own.len() != h || hc.neighbors.len() != b.neighbors.len() || hc.neighbors.iter().any(|s| s.len() != h) {
        return Err(Error::InvalidInput(format!(
            "horizon controls do not match horizon {h} with {} neighbors",
            b.neighbors.len()
        )));
    }
    if ctx.mode == Mode::Tracking && b.tracker.is_none() {
        return Err(Error::InvalidInput("tracking rollout needs a tracker".into()));
    }
    let mut scratch = Vec::new();
    Ok(local_rollout(b, ctx, &hc.flatten(), &mut scratch))
}

/// Flat-vector rollout used inside the optimizer.
pub(crate) fn local_rollout(b: &LocalBelief, ctx: &PlanContext, x: &[f64], states: &mut Vec<UavState>) -> f64 {
    let h = ctx.horizon;
    let w = &ctx.weights;
    let lim = &ctx.limits;
    states.clear();
    states.push(b.own);
    states.extend(b.neighbors.iter().map(|n| n.state));
    let mut tracker = b.tracker;
    let hmat = observation_matrix();
    let mut total = 0.0;
    for k in 0..h {
        for (a, s) in states.iter_mut().enumerate() {
            *s = advance(s, &control_at(x, h, a, k), lim, &[0.0; 4]);
        }
        let own = states[0].pos();
        let mut penalty = 0.0;
        for s in &states[1..] {
            penalty += collision_penalty((s.pos() - own).norm(), w.d_coll_thresh);
        }
        let lead = match ctx.mode {
            Mode::Formation => {
                let mut reach = b.destination.map_or(0.0, |d| (own - d).norm());
                for (n, s) in b.neighbors.iter().zip(&states[1..]) {
                    reach += n.destination.map_or(0.0, |d| (s.pos() - d).norm());
                }
                reach
            }
            Mode::Tracking => {
                let model = ctx.target_model.as_ref().expect("validated tracking context");
                let t = tracker.as_ref().expect("validated tracking belief");
                let t = nominal_update(&kf_predict(t, model), std::slice::from_ref(&own), &ctx.sensor, &hmat);
                let tr = t.trace();
                tracker = Some(t);
                tr
            }
        };
        total += w.w1 * lead + w.w2 * penalty;
    }
    total
}

/// Update with the noise-free measurement of the predicted position from
/// every sensor position in `sensors`, fused into one equivalent fix.
pub(crate) fn nominal_update(
    t: &TrackerState,
    sensors: &[Vec2],
    params: &SensorParams,
    h: &nalgebra::Matrix2x6<f64>,
) -> TrackerState {
    let z = t.position();
    let ms: Vec<Measurement> =
        sensors.iter().map(|s| Measurement { z, cov: measurement_covariance(&z, s, params) }).collect();
    // The covariances are positive definite by construction (range floor).
    combine_measurements(&ms).and_then(|m| kf_update(t, &m, h)).unwrap_or(*t)
}

/// Nominal cumulative global cost of joint controls `controls[uav][k]`.
pub fn nbo_rollout_centralized(g: &GlobalBelief, controls: &[Vec<ControlInput>], ctx: &PlanContext) -> Result<f64> {
    ctx.validate()?;
    check_global(g, ctx)?;
    if controls.len() != g.states.len() || controls.iter().any(|s| s.len() != ctx.horizon) {
        return Err(Error::InvalidInput("joint controls do not match swarm size and horizon".into()));
    }
    let x: Vec<f64> = controls.iter().flat_map(|s| s.iter().flat_map(|c| [c.accel, c.bank])).collect();
    let mut scratch = Vec::new();
    Ok(central_rollout(g, ctx, &x, &mut scratch))
}

pub(crate) fn check_global(g: &GlobalBelief, ctx: &PlanContext) -> Result<()> {
    let n = g.states.len();
    match ctx.mode {
        Mode::Formation => match &g.destinations {
            Some(d) if d.len() == n => Ok(()),
            _ => Err(Error::InvalidInput("formation mode needs one destination per UAV".into())),
        },
        Mode::Tracking => match (&g.trackers, &g.assignment) {
            (Some(t), Some(a)) if a.len() == n && a.iter().all(|&i| i < t.len()) => Ok(()),
            _ => Err(Error::InvalidInput("tracking mode needs trackers and a valid assignment".into())),
        },
    }
}

pub(crate) fn central_rollout(g: &GlobalBelief, ctx: &PlanContext, x: &[f64], states: &mut Vec<UavState>) -> f64 {
    let h = ctx.horizon;
    let w = &ctx.weights;
    let lim = &ctx.limits;
    states.clear();
    states.extend_from_slice(&g.states);
    let mut trackers: Vec<TrackerState> = g.trackers.clone().unwrap_or_default();
    let hmat = observation_matrix();
    let mut positions: Vec<Vec2> = Vec::with_capacity(states.len());
    let mut total = 0.0;
    for k in 0..h {
        for (a, s) in states.iter_mut().enumerate() {
            *s = advance(s, &control_at(x, h, a, k), lim, &[0.0; 4]);
        }
        positions.clear();
        positions.extend(states.iter().map(|s| s.pos()));
        let mut penalty = 0.0;
        for i in 0..positions.len() {
            for j in i + 1..positions.len() {
                penalty += collision_penalty((positions[i] - positions[j]).norm(), w.d_coll_thresh);
            }
        }
        let lead = match ctx.mode {
            Mode::Formation => {
                let d = g.destinations.as_ref().expect("checked");
                positions.iter().zip(d).map(|(p, d)| (p - d).norm()).sum::<f64>()
            }
            Mode::Tracking => {
                let model = ctx.target_model.as_ref().expect("validated tracking context");
                for t in trackers.iter_mut() {
                    *t = nominal_update(&kf_predict(t, model), &positions, &ctx.sensor, &hmat);
                }
                let a = g.assignment.as_ref().expect("checked");
                a.iter().map(|&t| trackers[t].trace()).sum::<f64>()
            }
        };
        total += w.w1 * lead + w.w2 * penalty;
    }
    total
}
