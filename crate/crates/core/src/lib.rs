//! Decentralized UAV swarm simulation toolkit.
//!
//! The crate is organised bottom-up:
//!
//! * [`motion`]: UAV kinematics, constant-velocity targets and the
//!   geometry-dependent position sensor.
//! * [`tracking`]: Kalman filter over the six-dimensional target state.
//! * [`optimizer`]: bounded derivative-free local minimizer.
//! * [`control`]: receding-horizon planners built on nominal rollouts, for
//!   formation flight and target tracking, in decentralized and centralized
//!   flavours.
//! * [`network`] and [`fusion`]: static sensor graphs, average consensus,
//!   Bayesian fusion and the sense/fuse duty cycle.
//! * [`experiments`]: scenario configuration, the seeded simulation driver,
//!   metrics, CSV output and sweeps used by the `swarm` binary.

pub mod control;
pub mod error;
pub mod experiments;
pub mod fusion;
pub mod motion;
pub mod network;
pub mod optimizer;
pub mod rng;
pub mod tracking;

pub use error::{Error, Result};

/// Planar vector used for positions and destinations (m).
pub type Vec2 = nalgebra::Vector2<f64>;
