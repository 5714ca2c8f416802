use super::rollout::{central_rollout, check_global, control_at, local_rollout};
use super::{GlobalBelief, HorizonControls, LocalBelief, Mode, PlanContext};
use crate::motion::{ControlInput, UavLimits};
use crate::optimizer::{minimize, BoxBounds, OptimizerOptions};
use crate::{Error, Result};

/// Result of one local planning call. Only `control` is ever applied; the
/// rest is kept to warm-start the next call.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPlan {
    pub id: usize,
    pub control: ControlInput,
    pub horizon: HorizonControls,
    pub neighbor_ids: Vec<usize>,
    pub cost: f64,
    pub evals: usize,
    /// The optimizer failed and `control` is the neutral fallback.
    pub fallback: bool,
}

impl LocalPlan {
    fn sequence_for(&self, id: usize) -> Option<&[ControlInput]> {
        if id == self.id {
            return Some(&self.horizon.own);
        }
        self.neighbor_ids.iter().position(|&n| n == id).map(|i| self.horizon.neighbors[i].as_slice())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralPlan {
    /// First-step control for every UAV.
    pub controls: Vec<ControlInput>,
    pub horizon: Vec<Vec<ControlInput>>,
    pub cost: f64,
    pub evals: usize,
    pub fallback: bool,
}

fn agent_bounds(agents: usize, horizon: usize, lim: &UavLimits) -> Result<BoxBounds> {
    let n = 2 * horizon * agents;
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for _ in 0..horizon * agents {
        lo.extend([lim.accel_min, -lim.bank_max]);
        hi.extend([lim.accel_max, lim.bank_max]);
    }
    BoxBounds::new(lo, hi)
}

/// Box over the flattened `2 H (1 + neighbors)` decision vector.
pub fn local_decision_bounds(b: &LocalBelief, ctx: &PlanContext) -> Result<BoxBounds> {
    agent_bounds(b.agents(), ctx.horizon, &ctx.limits)
}

pub fn central_decision_bounds(g: &GlobalBelief, ctx: &PlanContext) -> Result<BoxBounds> {
    agent_bounds(g.states.len(), ctx.horizon, &ctx.limits)
}

/// Previous sequence advanced by one step and padded with the neutral control.
fn shifted(prev: Option<&[ControlInput]>, horizon: usize, lim: &UavLimits) -> Vec<ControlInput> {
    let neutral = lim.neutral_control();
    let mut out: Vec<ControlInput> = prev
        .map(|s| s.iter().skip(1).take(horizon).map(|c| lim.clamp_control(*c)).collect())
        .unwrap_or_default();
    out.resize(horizon, neutral);
    out
}

/// Plans UAV `b.id`'s next control by co-optimizing its own and its
/// neighbors' controls over the horizon against the nominal rollout, then
/// discarding the neighbors' part. `warm` is the same UAV's previous plan.
pub fn plan_local(
    b: &LocalBelief,
    ctx: &PlanContext,
    opts: &OptimizerOptions,
    warm: Option<&LocalPlan>,
) -> Result<LocalPlan> {
    ctx.validate()?;
    if ctx.mode == Mode::Tracking && b.tracker.is_none() {
        return Err(Error::InvalidInput(format!("UAV {} plans in tracking mode without a tracker", b.id)));
    }
    let h = ctx.horizon;
    let bounds = local_decision_bounds(b, ctx)?;
    let ids: Vec<usize> = std::iter::once(b.id).chain(b.neighbors.iter().map(|n| n.id)).collect();
    let start = HorizonControls {
        own: shifted(warm.and_then(|w| w.sequence_for(b.id)), h, &ctx.limits),
        neighbors: ids[1..]
            .iter()
            .map(|&id| shifted(warm.and_then(|w| w.sequence_for(id)), h, &ctx.limits))
            .collect(),
    };
    // The decision vector lists agents by ascending id, so two UAVs that
    // co-optimize each other from the same start solve the same problem and
    // agree on the joint plan.
    let block = 2 * h;
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by_key(|&a| ids[a]);
    let permute = |from: &[f64], to: &mut [f64], canonical_to_local: bool| {
        for (c, &a) in order.iter().enumerate() {
            let (src, dst) = if canonical_to_local { (c, a) } else { (a, c) };
            to[dst * block..(dst + 1) * block].copy_from_slice(&from[src * block..(src + 1) * block]);
        }
    };
    let local0 = start.flatten();
    let mut x0 = vec![0.0; local0.len()];
    permute(&local0, &mut x0, false);
    let mut scratch = Vec::with_capacity(ids.len());
    let mut local = vec![0.0; x0.len()];
    let result = minimize(
        |x| {
            permute(x, &mut local, true);
            local_rollout(b, ctx, &local, &mut scratch)
        },
        &x0,
        &bounds,
        opts,
    )
    .map(|mut m| {
        let mut back = vec![0.0; m.x.len()];
        permute(&m.x, &mut back, true);
        m.x = back;
        m
    });
    let neighbor_ids = ids[1..].to_vec();
    Ok(match result {
        Ok(m) => {
            let horizon = HorizonControls::from_flat(&m.x, ids.len(), h);
            LocalPlan {
                id: b.id,
                control: control_at(&m.x, h, 0, 0),
                horizon,
                neighbor_ids,
                cost: m.f,
                evals: m.evals,
                fallback: false,
            }
        }
        Err(_) => LocalPlan {
            id: b.id,
            control: ctx.limits.neutral_control(),
            horizon: HorizonControls {
                own: vec![ctx.limits.neutral_control(); h],
                neighbors: vec![vec![ctx.limits.neutral_control(); h]; neighbor_ids.len()],
            },
            neighbor_ids,
            cost: f64::NAN,
            evals: 0,
            fallback: true,
        },
    })
}

/// Single joint optimization over all UAVs' controls against the global
/// cost; returns every UAV's first-step control.
pub fn plan_centralized(
    g: &GlobalBelief,
    ctx: &PlanContext,
    opts: &OptimizerOptions,
    warm: Option<&CentralPlan>,
) -> Result<CentralPlan> {
    ctx.validate()?;
    check_global(g, ctx)?;
    let h = ctx.horizon;
    let n = g.states.len();
    let bounds = central_decision_bounds(g, ctx)?;
    let start: Vec<Vec<ControlInput>> = (0..n)
        .map(|i| shifted(warm.and_then(|w| w.horizon.get(i)).map(|s| s.as_slice()), h, &ctx.limits))
        .collect();
    let x0: Vec<f64> = start.iter().flat_map(|s| s.iter().flat_map(|c| [c.accel, c.bank])).collect();
    let mut scratch = Vec::with_capacity(n);
    let result = minimize(|x| central_rollout(g, ctx, x, &mut scratch), &x0, &bounds, opts);
    Ok(match result {
        Ok(m) => {
            let horizon: Vec<Vec<ControlInput>> =
                (0..n).map(|a| (0..h).map(|k| control_at(&m.x, h, a, k)).collect()).collect();
            CentralPlan {
                controls: horizon.iter().map(|s| s[0]).collect(),
                horizon,
                cost: m.f,
                evals: m.evals,
                fallback: false,
            }
        }
        Err(_) => {
            let neutral = ctx.limits.neutral_control();
            CentralPlan {
                controls: vec![neutral; n],
                horizon: vec![vec![neutral; h]; n],
                cost: f64::NAN,
                evals: 0,
                fallback: true,
            }
        }
    })
}
