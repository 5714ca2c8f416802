//! Run metrics: tracking error, planning time, arrival time, separation.

use crate::experiments::record::RunRecord;
use crate::motion::{TargetState, UavState};
use crate::tracking::TrackerState;

/// `1/Z Σ_k 1/(nT) Σ_i Σ_t |x̂ - x|²` over steps `1..=Z`, full state vector.
/// `truth[k][t]`, `estimates[k][i][t]`; index 0 is skipped. Returns 0 for
/// a run without steps.
pub fn avg_tracking_error(truth: &[Vec<TargetState>], estimates: &[Vec<Vec<TrackerState>>]) -> f64 {
    let series = tracking_error_series(truth, estimates);
    if series.is_empty() {
        0.0
    } else {
        series.iter().sum::<f64>() / series.len() as f64
    }
}

/// Per-step mean squared error for steps `1..=Z`.
pub fn tracking_error_series(truth: &[Vec<TargetState>], estimates: &[Vec<Vec<TrackerState>>]) -> Vec<f64> {
    truth
        .iter()
        .zip(estimates)
        .skip(1)
        .map(|(xs, per_sensor)| {
            let mut sum = 0.0;
            let mut count = 0usize;
            for tracks in per_sensor {
                for (t, x) in tracks.iter().zip(xs) {
                    sum += (t.mean - x).norm_squared();
                    count += 1;
                }
            }
            if count == 0 { 0.0 } else { sum / count as f64 }
        })
        .collect()
}

/// Least-squares slope of `ys` against `0, 1, 2, ...`; 0 for fewer than
/// two points.
pub fn ls_slope(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    if ys.len() < 2 {
        return 0.0;
    }
    let xbar = (n - 1.0) / 2.0;
    let ybar = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = i as f64 - xbar;
        sxy += dx * (y - ybar);
        sxx += dx * dx;
    }
    sxy / sxx
}

/// Mean and sample standard deviation (0 for a single value, NaN for none).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanTiming {
    /// Mean over steps of the per-step planning time (ms). UAVs plan in
    /// parallel, so a decentralized step costs its slowest planner.
    pub mean_ms: f64,
    pub std_ms: f64,
    /// Mean planning time of each UAV (one entry for a centralized run).
    pub per_uav_ms: Vec<f64>,
}

/// Planning-time statistics over steps that planned.
pub fn plan_timing(plan_ms: &[Vec<f64>]) -> PlanTiming {
    let rows: Vec<&Vec<f64>> = plan_ms.iter().filter(|r| !r.is_empty()).collect();
    let per_step: Vec<f64> = rows.iter().map(|r| r.iter().cloned().fold(f64::NEG_INFINITY, f64::max)).collect();
    let (mean_ms, std_ms) = mean_std(&per_step);
    let width = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let per_uav_ms = (0..width)
        .map(|i| mean_std(&rows.iter().filter_map(|r| r.get(i).copied()).collect::<Vec<_>>()).0)
        .collect();
    PlanTiming { mean_ms, std_ms, per_uav_ms }
}

/// First simulated time at which every UAV is within `tol` of its
/// destination; `None` if that never happens.
pub fn arrival_time(uavs: &[Vec<UavState>], destinations: &[crate::Vec2], dt: f64, tol: f64) -> Option<f64> {
    uavs.iter()
        .position(|states| states.iter().zip(destinations).all(|(s, d)| (s.pos() - d).norm() <= tol))
        .map(|k| k as f64 * dt)
}

/// Minimum and mean of all pairwise UAV distances over the given steps.
/// `None` when there are fewer than two UAVs or no steps.
pub fn pairwise_distance(uavs: &[Vec<UavState>]) -> Option<(f64, f64)> {
    let mut min = f64::INFINITY;
    let (mut sum, mut count) = (0.0, 0usize);
    for states in uavs {
        for (a, sa) in states.iter().enumerate() {
            for sb in &states[a + 1..] {
                let d = (sa.pos() - sb.pos()).norm();
                min = min.min(d);
                sum += d;
                count += 1;
            }
        }
    }
    (count > 0).then(|| (min, sum / count as f64))
}

/// Spearman rank correlation with average ranks for ties. NaN when either
/// side is constant or the lengths differ.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    if x.len() != y.len() || x.len() < 2 {
        return f64::NAN;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let (mx, my) = (mean_std(&rx).0, mean_std(&ry).0);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}

/// Headline numbers of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub tc: Option<PlanTiming>,
    pub tf_s: Option<f64>,
    /// Pairwise (min, mean) from step 1 on.
    pub pairwise: Option<(f64, f64)>,
    pub avg_err: Option<f64>,
    pub err_slope: Option<f64>,
}

pub fn summarize(r: &RunRecord, arrival_tol: f64) -> RunSummary {
    let flying = !r.uavs.is_empty();
    let tracked = !r.truth.is_empty();
    RunSummary {
        tc: flying.then(|| plan_timing(&r.plan_ms)),
        tf_s: r.destinations.as_ref().and_then(|d| arrival_time(&r.uavs, d, r.dt, arrival_tol)),
        pairwise: if r.uavs.len() > 1 { pairwise_distance(&r.uavs[1..]) } else { None },
        avg_err: tracked.then(|| avg_tracking_error(&r.truth, &r.estimates)),
        err_slope: tracked.then(|| ls_slope(&tracking_error_series(&r.truth, &r.estimates))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Vec2;
    use nalgebra::{Matrix6, Vector6};
    use proptest::prelude::*;

    fn track(mean: Vector6<f64>) -> TrackerState {
        TrackerState::new(mean, Matrix6::identity())
    }

    fn parked(xs: &[f64]) -> Vec<UavState> {
        xs.iter().map(|&x| UavState::new(x, 0.0, 0.0, 0.0)).collect()
    }

    #[test]
    fn perfect_estimates_have_zero_error() {
        let x = Vector6::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0);
        let truth = vec![vec![x]; 4];
        let est = vec![vec![vec![track(x)]; 3]; 4];
        assert_eq!(avg_tracking_error(&truth, &est), 0.0);
    }

    #[test]
    fn three_four_five_error() {
        let x = Vector6::zeros();
        let e = Vector6::new(3.0, 4.0, 0.0, 0.0, 0.0, 0.0);
        let truth = vec![vec![x]; 3];
        // the initial estimate is far off and must not count
        let est = vec![vec![vec![track(e * 100.0)]], vec![vec![track(e)]], vec![vec![track(e)]]];
        assert_eq!(avg_tracking_error(&truth, &est), 25.0);
    }

    #[test]
    fn constant_planning_time() {
        let t = plan_timing(&[vec![10.0], vec![10.0], vec![10.0], vec![]]);
        assert_eq!((t.mean_ms, t.std_ms, t.per_uav_ms), (10.0, 0.0, vec![10.0]));
    }

    #[test]
    fn decentralized_step_costs_its_slowest_planner() {
        let t = plan_timing(&[vec![1.0, 5.0], vec![3.0, 2.0]]);
        assert_eq!(t.mean_ms, 4.0);
        assert_eq!(t.per_uav_ms, vec![2.0, 3.5]);
    }

    #[test]
    fn arrival_already_there() {
        let d = vec![Vec2::new(0.0, 0.0), Vec2::new(30.0, 0.0)];
        assert_eq!(arrival_time(&[parked(&[0.0, 30.0])], &d, 0.5, 2.0), Some(0.0));
    }

    #[test]
    fn arrival_at_step_forty() {
        // 1 m per step from x = 8 toward x = 50; inside the 2 m ball from step 40 on
        let d = vec![Vec2::new(50.0, 0.0)];
        let traj: Vec<Vec<UavState>> = (0..60).map(|k| parked(&[8.0 + (k as f64).min(42.0)])).collect();
        assert_eq!(arrival_time(&traj, &d, 0.5, 2.0), Some(20.0));
        assert_eq!(arrival_time(&traj[..40], &d, 0.5, 2.0), None);
    }

    #[test]
    fn pairwise_examples() {
        assert_eq!(pairwise_distance(&vec![parked(&[0.0, 50.0]); 3]), Some((50.0, 50.0)));
        assert_eq!(pairwise_distance(&[parked(&[0.0, 10.0, 30.0])]), Some((10.0, 20.0)));
        assert_eq!(pairwise_distance(&[parked(&[0.0])]), None);
    }

    #[test]
    fn slope_and_rank_correlation() {
        assert!((ls_slope(&[1.0, 3.0, 5.0, 7.0]) - 2.0).abs() < 1e-12);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 15.0]), 0.5);
        assert!((spearman(&[1.0, 2.0, 3.0, 4.0], &[9.0, 7.0, 7.0, 1.0]) + 0.9486832980505138).abs() < 1e-12);
        assert!(spearman(&[1.0, 2.0], &[3.0, 3.0]).is_nan());
    }

    proptest! {
        #[test]
        fn error_is_permutation_invariant(
            seed in any::<u64>(), n in 1usize..5, z in 1usize..6, rot in 0usize..5,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut v = || Vector6::from_fn(|_, _| rng.gen_range(-10.0..10.0));
            let truth: Vec<Vec<TargetState>> = (0..=z).map(|_| vec![v()]).collect();
            let est: Vec<Vec<Vec<TrackerState>>> =
                (0..=z).map(|_| (0..n).map(|_| vec![track(v())]).collect()).collect();
            let base = avg_tracking_error(&truth, &est);

            let mut est2 = est.clone();
            for row in est2.iter_mut() {
                row.rotate_left(rot % n);
            }
            prop_assert!((avg_tracking_error(&truth, &est2) - base).abs() <= 1e-9 * base.max(1.0));

            // reorder steps 1..=z together with their truth
            let mut order: Vec<usize> = (1..=z).collect();
            order.rotate_left(rot % z);
            let t3: Vec<_> = std::iter::once(truth[0].clone()).chain(order.iter().map(|&k| truth[k].clone())).collect();
            let e3: Vec<_> = std::iter::once(est[0].clone()).chain(order.iter().map(|&k| est[k].clone())).collect();
            prop_assert!((avg_tracking_error(&t3, &e3) - base).abs() <= 1e-9 * base.max(1.0));
        }
    }
}
