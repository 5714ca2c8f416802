//! Kalman filter over the six-dimensional target state.

use nalgebra::{Matrix2x6, Matrix6, Vector6};

use crate::motion::{Measurement, TargetModel};
use crate::{Error, Result, Vec2};

/// Gaussian posterior `(mean, cov)` over the target state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerState {
    pub mean: Vector6<f64>,
    pub cov: Matrix6<f64>,
}

/// Initial covariance for a track started from a single position fix.
pub fn default_prior_cov() -> Matrix6<f64> {
    Matrix6::from_diagonal(&Vector6::new(100.0 * 100.0, 100.0 * 100.0, 100.0, 100.0, 1.0, 1.0))
}

impl TrackerState {
    pub fn new(mean: Vector6<f64>, cov: Matrix6<f64>) -> Self {
        Self { mean, cov: symmetrize(&cov) }
    }

    /// Starts a track at a position fix with zero velocity and acceleration.
    pub fn from_position(z: &Vec2, prior_cov: &Matrix6<f64>) -> Self {
        Self::new(Vector6::new(z.x, z.y, 0.0, 0.0, 0.0, 0.0), *prior_cov)
    }

    #[inline]
    pub fn position(&self) -> Vec2 {
        Vec2::new(self.mean[0], self.mean[1])
    }

    #[inline]
    pub fn trace(&self) -> f64 {
        trace_cov(self)
    }
}

#[inline]
pub(crate) fn symmetrize(p: &Matrix6<f64>) -> Matrix6<f64> {
    (p + p.transpose()) * 0.5
}

pub fn kf_predict(t: &TrackerState, model: &TargetModel) -> TrackerState {
    let f = &model.transition;
    TrackerState {
        mean: f * t.mean,
        cov: symmetrize(&(f * t.cov * f.transpose() + model.process_cov)),
    }
}

/// Measurement update; the gain comes from a Cholesky solve against the
/// innovation covariance rather than an explicit inverse.
pub fn kf_update(t: &TrackerState, m: &Measurement, h: &Matrix2x6<f64>) -> Result<TrackerState> {
    let hp = h * t.cov;
    let s = hp * h.transpose() + m.cov;
    let chol = s
        .cholesky()
        .ok_or_else(|| Error::Singular("innovation covariance is not positive definite".into()))?;
    // S K^T = H P, since S and P are symmetric.
    let gain = chol.solve(&hp).transpose();
    let innovation = m.z - h * t.mean;
    let mean = t.mean + gain * innovation;
    let cov = symmetrize(&(t.cov - gain * hp));
    Ok(TrackerState { mean, cov })
}

pub fn trace_cov(t: &TrackerState) -> f64 {
    t.cov.trace()
}

/// Combines independent position measurements of the same target into one
/// equivalent measurement: `R = (sum R_i^-1)^-1`, `z = R sum R_i^-1 z_i`.
/// Updating with the result gives the same posterior as updating with each
/// measurement in turn.
pub fn combine_measurements(ms: &[Measurement]) -> Result<Measurement> {
    if ms.is_empty() {
        return Err(Error::InvalidInput("no measurements to combine".into()));
    }
    if ms.len() == 1 {
        return Ok(ms[0]);
    }
    let mut info = nalgebra::Matrix2::zeros();
    let mut info_z = Vec2::zeros();
    for m in ms {
        let inv = m
            .cov
            .try_inverse()
            .ok_or_else(|| Error::Singular("measurement covariance".into()))?;
        info += inv;
        info_z += inv * m.z;
    }
    let cov = info.try_inverse().ok_or_else(|| Error::Singular("combined information".into()))?;
    let cov = (cov + cov.transpose()) * 0.5;
    Ok(Measurement { z: cov * info_z, cov })
}
