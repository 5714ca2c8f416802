//! Receding-horizon planning for formation flight and target tracking.
//!
//! Each UAV optimizes its own controls together with those of its neighbors
//! over a short horizon, scoring a nominal (noise-free) rollout, applies its
//! first control and drops the rest. The centralized baseline optimizes all
//! UAVs jointly against the global cost.

mod assign;
mod cost;
mod neighbors;
mod planner;
mod rollout;
mod shape;

pub use assign::{assign_destinations, assign_targets};
pub use cost::{collision_penalty, formation_cost, tracking_cost, CostWeights};
pub use neighbors::{nearest_neighbor, neighbors_within, select_neighbors, Neighborhood};
pub use planner::{
    central_decision_bounds, local_decision_bounds, plan_centralized, plan_local, CentralPlan, LocalPlan,
};
pub use rollout::{
    nbo_rollout, nbo_rollout_centralized, GlobalBelief, HorizonControls, LocalBelief, Mode, Neighbor, PlanContext,
};
pub use shape::{FormationShape, ShapeKind};
