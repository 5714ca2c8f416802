//! Seed splitting.
//!
//! Every run has a single root seed. Each entity that consumes randomness
//! (a UAV, a target, a sensor, the graph generator, ...) gets its own
//! ChaCha8 stream whose seed is
//!
//! ```text
//! seed(root, kind, index) = mix(mix(root ^ (kind_tag * PHI)) ^ (index + 1) * PHI)
//! ```
//!
//! where `mix` is the SplitMix64 finalizer and `PHI = 0x9E37_79B9_7F4A_7C15`.
//! Adding an entity therefore never shifts the draws seen by the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const PHI: u64 = 0x9E37_79B9_7F4A_7C15;

/// Owner of an independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Initial placement of UAVs.
    UavPlacement,
    /// Process noise of one UAV.
    Uav(usize),
    /// Initial state and process noise of one target.
    Target(usize),
    /// Measurement noise of one sensor (or UAV acting as a sensor) on one target.
    Sensor(usize, usize),
    /// Formation destinations.
    Destinations,
    /// Sensor-network topology.
    Network,
    /// Sensor positions, kept apart from the topology draw so that runs
    /// differing only in graph parameters share their geometry.
    SensorPlacement,
    /// Optimizer restarts of the planning calls at one time step.
    Planner(usize),
}

impl Stream {
    fn tag(self) -> (u64, u64) {
        match self {
            Stream::UavPlacement => (1, 0),
            Stream::Uav(i) => (2, i as u64),
            Stream::Target(i) => (3, i as u64),
            Stream::Sensor(i, t) => (4, ((t as u64) << 32) | i as u64),
            Stream::Destinations => (5, 0),
            Stream::Network => (6, 0),
            Stream::Planner(i) => (7, i as u64),
            Stream::SensorPlacement => (8, 0),
        }
    }
}

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(PHI);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for `stream` under `root`.
pub fn derive_seed(root: u64, stream: Stream) -> u64 {
    let (kind, index) = stream.tag();
    mix(mix(root ^ kind.wrapping_mul(PHI)) ^ index.wrapping_add(1).wrapping_mul(PHI))
}

pub fn stream_rng(root: u64, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, stream))
}

/// `N` independent standard normal draws.
pub fn std_normals<const N: usize, R: rand::Rng + ?Sized>(rng: &mut R) -> [f64; N] {
    let mut out = [0.0; N];
    for v in out.iter_mut() {
        *v = StandardNormal.sample(rng);
    }
    out
}
