//! Everything a run produces, kept in memory until written out.

use crate::control::Neighborhood;
use crate::experiments::config::{PlannerKind, ScenarioMode};
use crate::motion::{ControlInput, TargetState, UavState};
use crate::network::SensorNetwork;
use crate::tracking::TrackerState;
use crate::Vec2;

/// One simulation run. Index `k` runs over `0..=steps`; step 0 is the
/// initial condition, so every per-step vector has `steps + 1` entries.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub mode: ScenarioMode,
    pub planner: PlannerKind,
    pub seed: u64,
    pub dt: f64,
    pub steps: usize,
    pub neighborhood: Neighborhood,
    /// `uavs[k][i]`; empty in fusion mode.
    pub uavs: Vec<Vec<UavState>>,
    /// `controls[k][i]` is the control applied from step `k` to `k + 1`;
    /// the last entry is all zero.
    pub controls: Vec<Vec<ControlInput>>,
    /// `plan_ms[k][i]` is UAV `i`'s planner wall-clock at step `k`. The
    /// centralized planner has a single entry per step.
    pub plan_ms: Vec<Vec<f64>>,
    pub destinations: Option<Vec<Vec2>>,
    /// `truth[k][t]`
    pub truth: Vec<Vec<TargetState>>,
    /// `estimates[k][s][t]`: sensor (or UAV, or the central tracker) `s`,
    /// target `t`.
    pub estimates: Vec<Vec<Vec<TrackerState>>>,
    pub assignment: Option<Vec<usize>>,
    pub network: Option<SensorNetwork>,
    /// Planner calls that failed and applied the neutral control.
    pub fallbacks: usize,
}

impl RunRecord {
    pub fn n_uavs(&self) -> usize {
        self.uavs.first().map_or(0, Vec::len)
    }

    /// Equality of everything except wall-clock timings.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.mode == other.mode
            && self.planner == other.planner
            && self.seed == other.seed
            && self.dt == other.dt
            && self.steps == other.steps
            && self.uavs == other.uavs
            && self.controls == other.controls
            && self.destinations == other.destinations
            && self.truth == other.truth
            && self.estimates == other.estimates
            && self.assignment == other.assignment
            && self.network.as_ref().map(SensorNetwork::edges) == other.network.as_ref().map(SensorNetwork::edges)
            && self.fallbacks == other.fallbacks
    }
}
