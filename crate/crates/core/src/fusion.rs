//! Decentralized fusion of target tracks over a static sensor network:
//! average consensus on concatenated (mean, covariance) vectors and
//! information-form Bayesian fusion, driven by a sense/fuse duty cycle.

use nalgebra::{Matrix6, SVector, Vector6};

use crate::motion::{measure, observation_matrix, step_target, SensorParams, TargetModel, TargetState};
use crate::network::SensorNetwork;
use crate::rng::{std_normals, stream_rng, Stream};
use crate::tracking::{kf_predict, kf_update, TrackerState};
use crate::{Error, Result};

/// Length of a concatenated track: 6 mean entries then 36 covariance
/// entries in row-major order.
pub const FUSION_DIM: usize = 6 + 36;

pub type FusionVector = SVector<f64, FUSION_DIM>;

pub fn encode(t: &TrackerState) -> FusionVector {
    let mut y = FusionVector::zeros();
    y.fixed_rows_mut::<6>(0).copy_from(&t.mean);
    for r in 0..6 {
        for c in 0..6 {
            y[6 + 6 * r + c] = t.cov[(r, c)];
        }
    }
    y
}

/// Inverse of [`encode`]; the covariance block is symmetrized.
pub fn decode(y: &FusionVector) -> TrackerState {
    let mean = Vector6::from_iterator(y.iter().take(6).copied());
    let cov = Matrix6::from_fn(|r, c| y[6 + 6 * r + c]);
    TrackerState::new(mean, cov)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("consensus weight must be in [0, 1], got {alpha}")))
    }
}

/// One synchronous consensus round:
/// `y_i' = (a y_i + (1 - a) sum_{j in N(i)} y_j) / (a + |N(i)| (1 - a))`.
/// Every update reads the pre-round values. A node whose weights are all
/// zero (isolated with `a = 0`) keeps its value.
pub fn consensus_step<const D: usize>(
    ys: &[SVector<f64, D>],
    net: &SensorNetwork,
    alpha: f64,
) -> Result<Vec<SVector<f64, D>>> {
    check_alpha(alpha)?;
    if ys.len() != net.n() {
        return Err(Error::InvalidInput(format!("{} values for {} sensors", ys.len(), net.n())));
    }
    Ok((0..ys.len())
        .map(|i| {
            let nb = net.neighbors(i);
            let denom = alpha + nb.len() as f64 * (1.0 - alpha);
            if denom == 0.0 {
                return ys[i];
            }
            let mut acc = ys[i] * alpha;
            for &j in nb {
                acc += ys[j] * (1.0 - alpha);
            }
            acc / denom
        })
        .collect())
}

fn information(p: &Matrix6<f64>, who: usize) -> Result<Matrix6<f64>> {
    p.cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| Error::Singular(format!("covariance of sensor {who} is not positive definite")))
}

/// One synchronous information-filter fusion round:
/// `P_i' = (P_i^-1 + sum_j P_j^-1)^-1`,
/// `x_i' = P_i' (P_i^-1 x_i + sum_j P_j^-1 x_j)` over `j in N(i)`.
pub fn bayes_fuse_step(trackers: &[TrackerState], net: &SensorNetwork) -> Result<Vec<TrackerState>> {
    if trackers.len() != net.n() {
        return Err(Error::InvalidInput(format!("{} trackers for {} sensors", trackers.len(), net.n())));
    }
    let info: Vec<Matrix6<f64>> =
        trackers.iter().enumerate().map(|(i, t)| information(&t.cov, i)).collect::<Result<_>>()?;
    let info_mean: Vec<Vector6<f64>> = info.iter().zip(trackers).map(|(y, t)| y * t.mean).collect();
    (0..trackers.len())
        .map(|i| {
            let nb = net.neighbors(i);
            if nb.is_empty() {
                return Ok(trackers[i]);
            }
            let mut big_y = info[i];
            let mut small_y = info_mean[i];
            for &j in nb {
                big_y += info[j];
                small_y += info_mean[j];
            }
            let chol = big_y
                .cholesky()
                .ok_or_else(|| Error::Singular(format!("fused information at sensor {i} is not positive definite")))?;
            Ok(TrackerState::new(chol.solve(&small_y), chol.inverse()))
        })
        .collect()
}

/// Duty-cycle parameters: `m` sensing steps then `m` fusion steps,
/// repeated for `z` steps in total; `alpha` is the consensus self-weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleConfig {
    pub m: usize,
    pub z: usize,
    pub alpha: f64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self { m: 3, z: 300, alpha: 0.5 }
    }
}

impl ScheduleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m > self.z {
            return Err(Error::InvalidInput(format!("duty-cycle length {} outside [1, {}]", self.m, self.z)));
        }
        check_alpha(self.alpha)
    }

    /// Whether step `k` (1-based) falls in a sensing phase.
    pub fn is_sensing(&self, k: usize) -> bool {
        ((k - 1) / self.m).is_multiple_of(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FusionAlgo {
    Consensus,
    Bayes,
    /// No exchange; fusion steps are prediction only.
    None,
}

/// Target and sensing setup shared by every sensor.
#[derive(Debug, Clone)]
pub struct FusionWorld {
    pub model: TargetModel,
    pub initial_target: TargetState,
    pub sensor: SensorParams,
    /// Covariance of the track started from each sensor's first fix.
    pub prior_cov: Matrix6<f64>,
}

/// Truth and every sensor's track, index 0 being the initialization.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionHistory {
    pub truth: Vec<TargetState>,
    /// `estimates[k][i]`
    pub estimates: Vec<Vec<TrackerState>>,
}

/// Runs the sense/fuse cycle for `schedule.z` steps. Step 0 starts each
/// sensor's track from one measurement. Sensing steps predict and update
/// with the sensor's own measurement; fusion steps predict and then run one
/// exchange round of `algo`. Random draws come from per-target and
/// per-sensor streams of `seed`, so runs with different algorithms or
/// schedules see the same truth.
pub fn run_duty_cycle(
    world: &FusionWorld,
    net: &SensorNetwork,
    schedule: &ScheduleConfig,
    algo: FusionAlgo,
    seed: u64,
) -> Result<FusionHistory> {
    schedule.validate()?;
    let n = net.n();
    let h = observation_matrix();
    let mut target_rng = stream_rng(seed, Stream::Target(0));
    let mut sensor_rngs: Vec<_> = (0..n).map(|i| stream_rng(seed, Stream::Sensor(i, 0))).collect();

    let mut x = world.initial_target;
    let mut tracks: Vec<TrackerState> = net
        .positions()
        .iter()
        .zip(sensor_rngs.iter_mut())
        .map(|(p, rng)| TrackerState::from_position(&measure(&x, p, &world.sensor, std_normals(rng)).z, &world.prior_cov))
        .collect();
    let mut truth = Vec::with_capacity(schedule.z + 1);
    let mut estimates = Vec::with_capacity(schedule.z + 1);
    truth.push(x);
    estimates.push(tracks.clone());

    for k in 1..=schedule.z {
        x = step_target(&x, &world.model, &world.model.sample_noise(&mut target_rng))?;
        for t in tracks.iter_mut() {
            *t = kf_predict(t, &world.model);
        }
        if schedule.is_sensing(k) {
            for ((t, p), rng) in tracks.iter_mut().zip(net.positions()).zip(sensor_rngs.iter_mut()) {
                let m = measure(&x, p, &world.sensor, std_normals(rng));
                *t = kf_update(t, &m, &h)?;
            }
        } else {
            tracks = match algo {
                FusionAlgo::Consensus => {
                    let ys: Vec<FusionVector> = tracks.iter().map(encode).collect();
                    consensus_step(&ys, net, schedule.alpha)?.iter().map(decode).collect()
                }
                FusionAlgo::Bayes => bayes_fuse_step(&tracks, net)?,
                FusionAlgo::None => tracks,
            };
        }
        truth.push(x);
        estimates.push(tracks.clone());
    }
    Ok(FusionHistory { truth, estimates })
}
