//! UAV kinematics, target motion and the position sensor.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix2x6, Matrix6, SymmetricEigen, Vector6};
use rand::Rng;

use crate::rng::std_normals;
use crate::{Error, Result, Vec2};

/// Target ground truth `(x, y, vx, vy, ax, ay)` in SI units.
pub type TargetState = Vector6<f64>;

/// Planar pose, speed and heading of one UAV.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct UavState {
    pub x: f64,
    pub y: f64,
    /// m/s
    pub speed: f64,
    /// rad, kept in (-pi, pi]
    pub heading: f64,
}

impl UavState {
    pub fn new(x: f64, y: f64, speed: f64, heading: f64) -> Self {
        Self { x, y, speed, heading: wrap_angle(heading) }
    }

    #[inline]
    pub fn pos(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.speed.is_finite() && self.heading.is_finite()
    }
}

/// Forward acceleration (m/s^2) and bank angle (rad).
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct ControlInput {
    pub accel: f64,
    pub bank: f64,
}

impl ControlInput {
    pub const ZERO: ControlInput = ControlInput { accel: 0.0, bank: 0.0 };

    pub fn new(accel: f64, bank: f64) -> Self {
        Self { accel, bank }
    }
}

/// Standard deviations of the additive speed, heading and position noise.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UavNoise {
    pub speed: f64,
    pub heading: f64,
    pub xpos: f64,
    pub ypos: f64,
}

impl UavNoise {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 4] {
        let n = std_normals::<4, R>(rng);
        [n[0] * self.speed, n[1] * self.heading, n[2] * self.xpos, n[3] * self.ypos]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavLimits {
    pub v_min: f64,
    pub v_max: f64,
    pub accel_min: f64,
    pub accel_max: f64,
    pub bank_max: f64,
    pub gravity: f64,
    /// Step length (s).
    pub dt: f64,
    pub noise: UavNoise,
    /// Speed floor used only in the turn-rate denominator.
    pub min_turn_speed: f64,
    /// Re-clamp the speed after the speed noise is added.
    pub reclamp_speed: bool,
}

impl Default for UavLimits {
    fn default() -> Self {
        Self {
            v_min: 0.0,
            v_max: 10.0,
            accel_min: -5.0,
            accel_max: 3.0,
            bank_max: PI / 4.0,
            gravity: 9.8,
            dt: 0.5,
            noise: UavNoise { speed: 0.02, heading: 0.002, xpos: 0.02, ypos: 0.02 },
            min_turn_speed: 0.1,
            reclamp_speed: true,
        }
    }
}

impl UavLimits {
    pub fn validate(&self) -> Result<()> {
        let n = &self.noise;
        let all = [
            self.v_min, self.v_max, self.accel_min, self.accel_max, self.bank_max, self.gravity,
            self.dt, self.min_turn_speed, n.speed, n.heading, n.xpos, n.ypos,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("UAV limits"));
        }
        if self.v_min < 0.0 || self.v_max <= self.v_min {
            return Err(Error::InvalidInput(format!(
                "speed bounds must satisfy 0 <= v_min < v_max, got [{}, {}]",
                self.v_min, self.v_max
            )));
        }
        if self.accel_min > self.accel_max || self.bank_max < 0.0 {
            return Err(Error::InvalidInput("control bounds are empty".into()));
        }
        if self.dt <= 0.0 || self.min_turn_speed <= 0.0 {
            return Err(Error::InvalidInput("dt and min_turn_speed must be positive".into()));
        }
        if n.speed < 0.0 || n.heading < 0.0 || n.xpos < 0.0 || n.ypos < 0.0 {
            return Err(Error::InvalidInput("noise sigmas must be non-negative".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn clamp_speed(&self, v: f64) -> f64 {
        self.v_min.max(self.v_max.min(v))
    }

    #[inline]
    pub fn clamp_control(&self, c: ControlInput) -> ControlInput {
        ControlInput {
            accel: c.accel.clamp(self.accel_min, self.accel_max),
            bank: c.bank.clamp(-self.bank_max, self.bank_max),
        }
    }

    /// Zero control if it lies in the box, otherwise its projection.
    pub fn neutral_control(&self) -> ControlInput {
        self.clamp_control(ControlInput::ZERO)
    }
}

/// Wraps an angle into (-pi, pi].
#[inline]
pub fn wrap_angle(theta: f64) -> f64 {
    let a = theta.rem_euclid(2.0 * PI);
    if a > PI {
        a - 2.0 * PI
    } else {
        a
    }
}

/// One kinematic step. `noise` holds the realised perturbations
/// `[speed, heading, x, y]`, all zero for nominal propagation.
///
/// Position moves with the pre-step speed and heading.
pub fn step_uav(
    state: &UavState,
    control: &ControlInput,
    limits: &UavLimits,
    noise: &[f64; 4],
) -> Result<UavState> {
    if !state.is_finite() || !control.accel.is_finite() || !control.bank.is_finite() {
        return Err(Error::NonFinite("UAV step input"));
    }
    if noise.iter().any(|w| !w.is_finite()) {
        return Err(Error::NonFinite("UAV step noise"));
    }
    Ok(advance(state, control, limits, noise))
}

/// Unchecked kinematic step used in the planners' inner loops.
#[inline]
pub(crate) fn advance(s: &UavState, c: &ControlInput, lim: &UavLimits, noise: &[f64; 4]) -> UavState {
    let c = lim.clamp_control(*c);
    let dt = lim.dt;
    let mut speed = lim.clamp_speed(s.speed + c.accel * dt) + noise[0];
    if lim.reclamp_speed {
        speed = lim.clamp_speed(speed);
    }
    let turn = lim.gravity * dt * c.bank.tan() / s.speed.max(lim.min_turn_speed);
    let heading = wrap_angle(s.heading + turn + noise[1]);
    let (sin, cos) = s.heading.sin_cos();
    UavState {
        x: s.x + s.speed * dt * cos + noise[2],
        y: s.y + s.speed * dt * sin + noise[3],
        speed,
        heading,
    }
}

/// Linear-Gaussian target motion `x' = F x + v`, `v ~ N(0, Q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetModel {
    pub transition: Matrix6<f64>,
    pub process_cov: Matrix6<f64>,
    /// `L` with `L L^T = Q`, for sampling.
    noise_factor: Matrix6<f64>,
}

impl TargetModel {
    pub fn new(transition: Matrix6<f64>, process_cov: Matrix6<f64>) -> Result<Self> {
        if transition.iter().chain(process_cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("target model"));
        }
        let asym = (process_cov - process_cov.transpose()).abs().max();
        if asym > 1e-12 * (1.0 + process_cov.abs().max()) {
            return Err(Error::InvalidInput("process covariance is not symmetric".into()));
        }
        let eig = SymmetricEigen::new(process_cov);
        let tol = 1e-12 * (1.0 + process_cov.abs().max());
        if eig.eigenvalues.iter().any(|&l| l < -tol) {
            return Err(Error::InvalidInput("process covariance is not positive semidefinite".into()));
        }
        let sqrt = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
        let noise_factor = eig.eigenvectors * Matrix6::from_diagonal(&sqrt);
        Ok(Self { transition, process_cov, noise_factor })
    }

    /// Nearly-constant-velocity model driven by a white acceleration `w`
    /// held over each step; the state keeps the acceleration just applied.
    /// Per axis:
    ///
    /// ```text
    /// p' = p + T v + T^2/2 w
    /// v' = v + T w
    /// a' = w,  w ~ N(0, accel_sigma^2)
    /// ```
    ///
    /// The noise enters position, velocity and acceleration together, so
    /// the predicted covariance never drops below the one-step noise on any
    /// of them.
    pub fn constant_velocity(dt: f64, accel_sigma: f64) -> Self {
        let g = [0.5 * dt * dt, dt, 1.0];
        let mut f = Matrix6::zeros();
        let mut q = Matrix6::zeros();
        for axis in 0..2 {
            let (p, v) = (axis, axis + 2);
            f[(p, p)] = 1.0;
            f[(p, v)] = dt;
            f[(v, v)] = 1.0;
            let idx = [axis, axis + 2, axis + 4];
            for r in 0..3 {
                for c in 0..3 {
                    q[(idx[r], idx[c])] = accel_sigma * accel_sigma * g[r] * g[c];
                }
            }
        }
        Self::new(f, q).expect("constant-velocity model is well formed")
    }

    pub fn sample_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector6<f64> {
        self.noise_factor * Vector6::from(std_normals::<6, R>(rng))
    }
}

pub fn step_target(x: &TargetState, model: &TargetModel, noise: &Vector6<f64>) -> Result<TargetState> {
    if x.iter().chain(noise.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("target step input"));
    }
    Ok(model.transition * x + noise)
}

/// Observation matrix picking `(x, y)` out of the target state.
pub fn observation_matrix() -> Matrix2x6<f64> {
    let mut h = Matrix2x6::zeros();
    h[(0, 0)] = 1.0;
    h[(1, 1)] = 1.0;
    h
}

/// Range/bearing uncertainty of the position sensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorParams {
    /// Range standard deviation as a fraction of range.
    pub range_frac: f64,
    /// Bearing standard deviation (rad).
    pub angular_sigma: f64,
    /// Range floor (m) keeping the covariance positive definite.
    pub r_floor: f64,
}

impl Default for SensorParams {
    fn default() -> Self {
        Self { range_frac: 0.1, angular_sigma: 0.01 * PI, r_floor: 1.0 }
    }
}

impl SensorParams {
    /// Rotation by the bearing times the range/cross-range std-devs, so that
    /// `L L^T` is the measurement covariance.
    #[inline]
    fn factor(&self, target: &Vec2, sensor: &Vec2) -> Matrix2<f64> {
        let d = target - sensor;
        let r = d.norm().max(self.r_floor);
        let bearing = d.y.atan2(d.x);
        let (s, c) = bearing.sin_cos();
        let sr = self.range_frac * r;
        let st = self.angular_sigma * r;
        Matrix2::new(c * sr, -s * st, s * sr, c * st)
    }
}

/// Position-measurement covariance for a target seen from `sensor`:
/// `G(b) diag((range_frac r)^2, (angular_sigma r)^2) G(b)^T`.
#[inline]
pub fn measurement_covariance(target: &Vec2, sensor: &Vec2, params: &SensorParams) -> Matrix2<f64> {
    let l = params.factor(target, sensor);
    let r = l * l.transpose();
    // exact symmetry
    Matrix2::new(r[(0, 0)], r[(0, 1)], r[(0, 1)], r[(1, 1)])
}

/// A position measurement with the covariance that generated it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub z: Vec2,
    pub cov: Matrix2<f64>,
}

/// `z = H x + v` with `v = L * draw`, `L L^T = R(x, sensor)`.
pub fn measure(x: &TargetState, sensor: &Vec2, params: &SensorParams, draw: [f64; 2]) -> Measurement {
    let pos = Vec2::new(x[0], x[1]);
    let l = params.factor(&pos, sensor);
    Measurement {
        z: pos + l * Vec2::new(draw[0], draw[1]),
        cov: measurement_covariance(&pos, sensor, params),
    }
}
