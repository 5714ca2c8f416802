use super::LocalBelief;
use crate::Vec2;

/// Stage-cost weights and the collision-risk distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostWeights {
    pub w1: f64,
    pub w2: f64,
    /// m
    pub d_coll_thresh: f64,
}

impl CostWeights {
    pub fn formation() -> Self {
        Self { w1: 1.0, w2: 100.0, d_coll_thresh: 10.0 }
    }

    pub fn tracking() -> Self {
        Self { w1: 1.0, w2: 1000.0, d_coll_thresh: 10.0 }
    }
}

/// Separations below this are treated as this when inverting, so the
/// penalty stays finite for coincident UAVs.
const MIN_SEPARATION: f64 = 1e-3;

/// `1/dist` strictly inside the threshold, zero otherwise.
#[inline]
pub fn collision_penalty(dist: f64, thresh: f64) -> f64 {
    if dist < thresh {
        1.0 / dist.max(MIN_SEPARATION)
    } else {
        0.0
    }
}

#[inline]
pub(crate) fn penalty_sum<'a>(own: Vec2, others: impl Iterator<Item = &'a Vec2>, thresh: f64) -> f64 {
    others.map(|p| collision_penalty((p - own).norm(), thresh)).sum()
}

/// Distance-to-destination terms for the UAV and every neighbor plus the
/// collision penalty between the UAV and each neighbor. UAVs without a
/// destination contribute no distance term.
pub fn formation_cost(b: &LocalBelief, w: &CostWeights) -> f64 {
    let own = b.own.pos();
    let mut reach = b.destination.map_or(0.0, |d| (own - d).norm());
    let mut penalty = 0.0;
    for n in &b.neighbors {
        let p = n.state.pos();
        reach += n.destination.map_or(0.0, |d| (p - d).norm());
        penalty += collision_penalty((p - own).norm(), w.d_coll_thresh);
    }
    w.w1 * reach + w.w2 * penalty
}

/// Trace of the UAV's own track covariance plus the collision penalty
/// against each neighbor.
pub fn tracking_cost(b: &LocalBelief, w: &CostWeights) -> f64 {
    let own = b.own.pos();
    let trace = b.tracker.as_ref().map_or(0.0, |t| t.trace());
    let pos: Vec<Vec2> = b.neighbors.iter().map(|n| n.state.pos()).collect();
    w.w1 * trace + w.w2 * penalty_sum(own, pos.iter(), w.d_coll_thresh)
}
