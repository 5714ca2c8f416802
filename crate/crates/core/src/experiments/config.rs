//! Scenario configuration, read from TOML.
//!
//! ```toml
//! mode = "formation"        # formation | tracking | fusion
//! seed = 7
//! sim_steps = 160
//!
//! [swarm]
//! n_uavs = 9
//! planner = "decentralized" # or "centralized"
//! horizon = 7
//! neighborhood_threshold = 130.0   # omit for nearest-neighbour only; inf allowed
//!
//! [formation]
//! shape = "circle"
//! radius = 60.0
//! ```
//!
//! Every section is optional and falls back to the defaults below. In
//! fusion mode `sim_steps` is the total number of duty-cycle steps.

use std::fmt;
use std::path::Path;

use nalgebra::{Matrix6, Vector6};
use serde::{Deserialize, Serialize};

use crate::control::{CostWeights, FormationShape, Mode, Neighborhood};
use crate::fusion::{FusionAlgo, ScheduleConfig};
use crate::motion::{SensorParams, TargetModel, UavLimits, UavNoise};
use crate::optimizer::OptimizerOptions;
use crate::Vec2;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    /// Dotted path of the offending field, e.g. `formation.radius`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot parse configuration: {0}")]
    Parse(String),
    #[error("invalid configuration:\n{}", list(.0))]
    Invalid(Vec<ConfigIssue>),
    #[error("cannot set `{path}`: {message}")]
    Override { path: String, message: String },
}

fn list(issues: &[ConfigIssue]) -> String {
    issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioMode {
    Formation,
    Tracking,
    Fusion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerKind {
    Decentralized,
    Centralized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeName {
    Circle,
    Rectangle,
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    /// Every sensor has degree `degree`.
    #[serde(alias = "config1")]
    Regular,
    /// Independent edges with probability `edge_prob`, redrawn until connected.
    #[serde(alias = "config2")]
    EdgeProbability,
    /// Random spanning tree plus extra edges up to `edges`.
    #[serde(alias = "config3")]
    EdgeCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgoName {
    Consensus,
    Bayes,
    None,
}

impl From<AlgoName> for FusionAlgo {
    fn from(a: AlgoName) -> Self {
        match a {
            AlgoName::Consensus => FusionAlgo::Consensus,
            AlgoName::Bayes => FusionAlgo::Bayes,
            AlgoName::None => FusionAlgo::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mode: ScenarioMode,
    pub seed: u64,
    pub sim_steps: usize,
    #[serde(default)]
    pub swarm: SwarmConfig,
    #[serde(default)]
    pub limits: LimitsConfig,
    /// Mode default when absent (formation 1/100/10, tracking 1/1000/10).
    #[serde(default)]
    pub weights: Option<WeightsConfig>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub formation: FormationConfig,
    #[serde(default)]
    pub target: TargetConfig,
    #[serde(default)]
    pub sensor: SensorConfig,
    #[serde(default)]
    pub fusion: FusionConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwarmConfig {
    pub n_uavs: usize,
    pub planner: PlannerKind,
    pub horizon: usize,
    /// Co-optimization radius (m); absent means nearest neighbour only.
    pub neighborhood_threshold: Option<f64>,
    /// UAVs start on a square grid around this point.
    pub start_center: [f64; 2],
    pub start_spacing: f64,
    /// Uniform jitter (m) added to each grid position.
    pub start_jitter: f64,
    pub start_speed: f64,
    /// Initial heading (deg); absent means uniformly random per UAV.
    pub start_heading_deg: Option<f64>,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        Self {
            n_uavs: 9,
            planner: PlannerKind::Decentralized,
            horizon: 7,
            neighborhood_threshold: None,
            start_center: [0.0, 0.0],
            start_spacing: 15.0,
            start_jitter: 1.0,
            start_speed: 0.0,
            start_heading_deg: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitsConfig {
    pub v_min: f64,
    pub v_max: f64,
    pub accel_min: f64,
    pub accel_max: f64,
    pub bank_max_deg: f64,
    pub gravity: f64,
    pub dt: f64,
    pub noise_speed: f64,
    pub noise_heading: f64,
    pub noise_x: f64,
    pub noise_y: f64,
    pub min_turn_speed: f64,
    pub reclamp_speed: bool,
}

impl Default for LimitsConfig {
    fn default() -> Self {
        let l = UavLimits::default();
        Self {
            v_min: l.v_min,
            v_max: l.v_max,
            accel_min: l.accel_min,
            accel_max: l.accel_max,
            bank_max_deg: l.bank_max.to_degrees(),
            gravity: l.gravity,
            dt: l.dt,
            noise_speed: l.noise.speed,
            noise_heading: l.noise.heading,
            noise_x: l.noise.xpos,
            noise_y: l.noise.ypos,
            min_turn_speed: l.min_turn_speed,
            reclamp_speed: l.reclamp_speed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    pub w1: f64,
    pub w2: f64,
    pub d_coll_thresh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub evals_per_dim: usize,
    /// Upper bound on evaluations per planning call, whatever the dimension.
    pub max_evals: Option<usize>,
    pub restarts: usize,
    pub x_tol: f64,
    pub f_tol: f64,
    pub initial_step: f64,
    /// Start each planning call from the previous plan shifted by one step.
    pub warm_start: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let o = OptimizerOptions::default();
        Self {
            evals_per_dim: 500,
            max_evals: None,
            restarts: o.restarts,
            x_tol: o.x_tol,
            f_tol: o.f_tol,
            initial_step: o.initial_step,
            warm_start: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FormationConfig {
    pub shape: ShapeName,
    pub center: [f64; 2],
    pub radius: Option<f64>,
    pub width: Option<f64>,
    pub height: Option<f64>,
    pub side: Option<f64>,
    /// Minimum spacing of destinations (m); defaults to the collision threshold.
    pub min_sep: Option<f64>,
    pub arrival_tol: f64,
}

impl Default for FormationConfig {
    fn default() -> Self {
        Self {
            shape: ShapeName::Circle,
            center: [0.0, 0.0],
            radius: Some(60.0),
            width: None,
            height: None,
            side: None,
            min_sep: None,
            arrival_tol: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TargetConfig {
    pub n_targets: usize,
    pub start: [f64; 2],
    /// Uniform jitter (m) on each target's start position.
    pub spread: f64,
    pub speed: f64,
    /// Heading of the first target (deg); absent means random.
    pub heading_deg: Option<f64>,
    /// Headings of several targets are spaced evenly over this fan (deg).
    pub heading_span_deg: f64,
    pub accel_sigma: f64,
    pub prior_pos_sigma: f64,
    pub prior_vel_sigma: f64,
    pub prior_acc_sigma: f64,
}

impl Default for TargetConfig {
    fn default() -> Self {
        Self {
            n_targets: 1,
            start: [0.0, 0.0],
            spread: 5.0,
            speed: 3.0,
            heading_deg: None,
            heading_span_deg: 120.0,
            accel_sigma: 0.1,
            prior_pos_sigma: 100.0,
            prior_vel_sigma: 10.0,
            prior_acc_sigma: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorConfig {
    pub range_frac: f64,
    pub angular_sigma: f64,
    pub r_floor: f64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        let s = SensorParams::default();
        Self { range_frac: s.range_frac, angular_sigma: s.angular_sigma, r_floor: s.r_floor }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FusionConfig {
    pub n_sensors: usize,
    pub graph: GraphKind,
    pub degree: Option<usize>,
    pub edge_prob: Option<f64>,
    pub edges: Option<usize>,
    pub algo: AlgoName,
    pub m: usize,
    pub alpha: f64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            n_sensors: 10,
            graph: GraphKind::EdgeProbability,
            degree: None,
            edge_prob: Some(0.3),
            edges: None,
            algo: AlgoName::Consensus,
            m: 3,
            alpha: 0.5,
        }
    }
}

struct Issues(Vec<ConfigIssue>);

impl Issues {
    fn check(&mut self, ok: bool, path: &str, message: impl Into<String>) {
        if !ok {
            self.0.push(ConfigIssue { path: path.into(), message: message.into() });
        }
    }
    fn finite(&mut self, v: f64, path: &str) -> bool {
        self.check(v.is_finite(), path, "must be finite");
        v.is_finite()
    }
    fn positive(&mut self, v: f64, path: &str) {
        if self.finite(v, path) {
            self.check(v > 0.0, path, "must be positive");
        }
    }
    fn non_negative(&mut self, v: f64, path: &str) {
        if self.finite(v, path) {
            self.check(v >= 0.0, path, "must be non-negative");
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.display().to_string(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario config always serializes")
    }

    /// Returns a copy with the dotted-path field set to `value`, validated.
    pub fn with_override(&self, path: &str, value: toml::Value) -> Result<Self, ConfigError> {
        let err = |message: String| ConfigError::Override { path: path.into(), message };
        let mut doc = toml::Value::try_from(self).map_err(|e| err(e.to_string()))?;
        let mut parts = path.split('.').peekable();
        let mut node = &mut doc;
        while let Some(key) = parts.next() {
            let table = node.as_table_mut().ok_or_else(|| err(format!("`{key}` is not inside a section")))?;
            if parts.peek().is_none() {
                table.insert(key.to_string(), value.clone());
                break;
            }
            node = table.entry(key.to_string()).or_insert_with(|| toml::Value::Table(Default::default()));
        }
        let cfg: Self = doc.try_into().map_err(|e: toml::de::Error| err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every field and reports all problems at once.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut is = Issues(Vec::new());
        is.check(self.sim_steps >= 1, "sim_steps", "must be at least 1");
        // TOML integers are signed
        is.check(self.seed <= i64::MAX as u64, "seed", "must be at most 2^63 - 1");

        let s = &self.swarm;
        if self.mode != ScenarioMode::Fusion {
            is.check(s.n_uavs >= 1, "swarm.n_uavs", "must be at least 1");
            is.check(s.horizon >= 1, "swarm.horizon", "must be at least 1");
            if let Some(r) = s.neighborhood_threshold {
                is.check(r > 0.0, "swarm.neighborhood_threshold", "must be positive");
            }
            is.non_negative(s.start_spacing, "swarm.start_spacing");
            is.non_negative(s.start_jitter, "swarm.start_jitter");
            is.finite(s.start_center[0], "swarm.start_center");
            is.finite(s.start_center[1], "swarm.start_center");
            is.non_negative(s.start_speed, "swarm.start_speed");
            if let Some(h) = s.start_heading_deg {
                is.finite(h, "swarm.start_heading_deg");
            }

            let l = &self.limits;
            for (v, p) in [(l.gravity, "limits.gravity"), (l.dt, "limits.dt"), (l.min_turn_speed, "limits.min_turn_speed")] {
                is.positive(v, p);
            }
            is.non_negative(l.v_min, "limits.v_min");
            if is.finite(l.v_max, "limits.v_max") {
                is.check(l.v_max > l.v_min, "limits.v_max", "must exceed limits.v_min");
            }
            if is.finite(l.accel_min, "limits.accel_min") && is.finite(l.accel_max, "limits.accel_max") {
                is.check(l.accel_min <= l.accel_max, "limits.accel_max", "must be at least limits.accel_min");
            }
            if is.finite(l.bank_max_deg, "limits.bank_max_deg") {
                is.check(
                    (0.0..90.0).contains(&l.bank_max_deg),
                    "limits.bank_max_deg",
                    "must be in [0, 90)",
                );
            }
            for (v, p) in [
                (l.noise_speed, "limits.noise_speed"),
                (l.noise_heading, "limits.noise_heading"),
                (l.noise_x, "limits.noise_x"),
                (l.noise_y, "limits.noise_y"),
            ] {
                is.non_negative(v, p);
            }

            if let Some(w) = &self.weights {
                is.non_negative(w.w1, "weights.w1");
                is.non_negative(w.w2, "weights.w2");
                is.positive(w.d_coll_thresh, "weights.d_coll_thresh");
            }

            let o = &self.optimizer;
            is.check(o.evals_per_dim >= 1, "optimizer.evals_per_dim", "must be at least 1");
            if let Some(m) = o.max_evals {
                is.check(m >= 1, "optimizer.max_evals", "must be at least 1");
            }
            is.positive(o.x_tol, "optimizer.x_tol");
            is.positive(o.f_tol, "optimizer.f_tol");
            if is.finite(o.initial_step, "optimizer.initial_step") {
                is.check(o.initial_step > 0.0 && o.initial_step <= 1.0, "optimizer.initial_step", "must be in (0, 1]");
            }
        }

        if self.mode == ScenarioMode::Formation {
            let f = &self.formation;
            is.finite(f.center[0], "formation.center");
            is.finite(f.center[1], "formation.center");
            let need = |is: &mut Issues, v: Option<f64>, p: &str| match v {
                Some(v) => is.positive(v, p),
                None => is.check(false, p, format!("required for shape {:?}", f.shape).to_lowercase()),
            };
            match f.shape {
                ShapeName::Circle => need(&mut is, f.radius, "formation.radius"),
                ShapeName::Rectangle => {
                    need(&mut is, f.width, "formation.width");
                    need(&mut is, f.height, "formation.height");
                }
                ShapeName::Square => need(&mut is, f.side, "formation.side"),
            }
            if let Some(m) = f.min_sep {
                is.non_negative(m, "formation.min_sep");
            }
            is.positive(f.arrival_tol, "formation.arrival_tol");
        }

        if self.mode != ScenarioMode::Formation {
            let t = &self.target;
            if self.mode == ScenarioMode::Tracking {
                is.check(t.n_targets >= 1, "target.n_targets", "must be at least 1");
                is.check(t.n_targets <= s.n_uavs, "target.n_targets", "must not exceed swarm.n_uavs");
            }
            is.finite(t.start[0], "target.start");
            is.finite(t.start[1], "target.start");
            is.non_negative(t.spread, "target.spread");
            is.non_negative(t.speed, "target.speed");
            if let Some(h) = t.heading_deg {
                is.finite(h, "target.heading_deg");
            }
            is.finite(t.heading_span_deg, "target.heading_span_deg");
            is.non_negative(t.accel_sigma, "target.accel_sigma");
            is.positive(t.prior_pos_sigma, "target.prior_pos_sigma");
            is.positive(t.prior_vel_sigma, "target.prior_vel_sigma");
            is.positive(t.prior_acc_sigma, "target.prior_acc_sigma");
            let se = &self.sensor;
            is.non_negative(se.range_frac, "sensor.range_frac");
            is.non_negative(se.angular_sigma, "sensor.angular_sigma");
            is.positive(se.r_floor, "sensor.r_floor");
            is.check(
                se.range_frac > 0.0 || se.angular_sigma > 0.0,
                "sensor",
                "range_frac and angular_sigma cannot both be zero",
            );
        }

        if self.mode == ScenarioMode::Fusion {
            let f = &self.fusion;
            let n = f.n_sensors;
            is.check(n >= 2, "fusion.n_sensors", "must be at least 2");
            match f.graph {
                GraphKind::Regular => match f.degree {
                    Some(d) => is.check(
                        d >= 1 && d < n && (n * d).is_multiple_of(2) && (d > 1 || n == 2),
                        "fusion.degree",
                        format!("no connected {d}-regular graph on {n} sensors"),
                    ),
                    None => is.check(false, "fusion.degree", "required for graph = \"regular\""),
                },
                GraphKind::EdgeProbability => match f.edge_prob {
                    Some(p) => is.check(p > 0.0 && p <= 1.0, "fusion.edge_prob", "must be in (0, 1]"),
                    None => is.check(false, "fusion.edge_prob", "required for graph = \"edge_probability\""),
                },
                GraphKind::EdgeCount => match f.edges {
                    Some(e) => is.check(
                        n >= 1 && e + 1 >= n && e <= n * n.saturating_sub(1) / 2,
                        "fusion.edges",
                        format!("must be in [{}, {}]", n.saturating_sub(1), n * n.saturating_sub(1) / 2),
                    ),
                    None => is.check(false, "fusion.edges", "required for graph = \"edge_count\""),
                },
            }
            is.check(f.m >= 1 && f.m <= self.sim_steps, "fusion.m", "must be in [1, sim_steps]");
            is.check((0.0..=1.0).contains(&f.alpha), "fusion.alpha", "must be in [0, 1]");
        }

        if is.0.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(is.0))
        }
    }

    pub fn control_mode(&self) -> Mode {
        match self.mode {
            ScenarioMode::Tracking => Mode::Tracking,
            _ => Mode::Formation,
        }
    }

    pub fn uav_limits(&self) -> UavLimits {
        let l = &self.limits;
        UavLimits {
            v_min: l.v_min,
            v_max: l.v_max,
            accel_min: l.accel_min,
            accel_max: l.accel_max,
            bank_max: l.bank_max_deg.to_radians(),
            gravity: l.gravity,
            dt: l.dt,
            noise: UavNoise { speed: l.noise_speed, heading: l.noise_heading, xpos: l.noise_x, ypos: l.noise_y },
            min_turn_speed: l.min_turn_speed,
            reclamp_speed: l.reclamp_speed,
        }
    }

    pub fn cost_weights(&self) -> CostWeights {
        match (&self.weights, self.mode) {
            (Some(w), _) => CostWeights { w1: w.w1, w2: w.w2, d_coll_thresh: w.d_coll_thresh },
            (None, ScenarioMode::Tracking) => CostWeights::tracking(),
            (None, _) => CostWeights::formation(),
        }
    }

    pub fn neighborhood(&self) -> Neighborhood {
        match self.swarm.neighborhood_threshold {
            Some(r) => Neighborhood::Radius(r),
            None => Neighborhood::Nearest,
        }
    }

    /// Optimizer options for a problem of dimension `dim`.
    pub fn optimizer_options(&self, dim: usize, seed: u64) -> OptimizerOptions {
        let o = &self.optimizer;
        let budget = o.evals_per_dim * dim.max(1);
        OptimizerOptions {
            max_evals: o.max_evals.map_or(budget, |cap| budget.min(cap)),
            x_tol: o.x_tol,
            f_tol: o.f_tol,
            restarts: o.restarts,
            seed,
            initial_step: o.initial_step,
        }
    }

    pub fn shape(&self) -> FormationShape {
        let f = &self.formation;
        let c = Vec2::new(f.center[0], f.center[1]);
        match f.shape {
            ShapeName::Circle => FormationShape::circle(c, f.radius.unwrap_or(0.0)),
            ShapeName::Rectangle => FormationShape::rectangle(c, f.width.unwrap_or(0.0), f.height.unwrap_or(0.0)),
            ShapeName::Square => FormationShape::square(c, f.side.unwrap_or(0.0)),
        }
    }

    pub fn min_sep(&self) -> f64 {
        self.formation.min_sep.unwrap_or(self.cost_weights().d_coll_thresh)
    }

    /// Target motion model at the UAV step length.
    pub fn target_model(&self) -> TargetModel {
        TargetModel::constant_velocity(self.limits.dt, self.target.accel_sigma)
    }

    pub fn sensor_params(&self) -> SensorParams {
        SensorParams {
            range_frac: self.sensor.range_frac,
            angular_sigma: self.sensor.angular_sigma,
            r_floor: self.sensor.r_floor,
        }
    }

    pub fn prior_cov(&self) -> Matrix6<f64> {
        let t = &self.target;
        let (p, v, a) = (t.prior_pos_sigma.powi(2), t.prior_vel_sigma.powi(2), t.prior_acc_sigma.powi(2));
        Matrix6::from_diagonal(&Vector6::new(p, p, v, v, a, a))
    }

    pub fn schedule(&self) -> ScheduleConfig {
        ScheduleConfig { m: self.fusion.m, z: self.sim_steps, alpha: self.fusion.alpha }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "mode = \"formation\"\nseed = 3\nsim_steps = 10\n";

    #[test]
    fn minimal_file_uses_defaults() {
        let cfg = ScenarioConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(cfg.swarm.n_uavs, 9);
        assert_eq!(cfg.swarm.horizon, 7);
        assert_eq!(cfg.cost_weights(), CostWeights::formation());
        assert_eq!(cfg.neighborhood(), Neighborhood::Nearest);
        assert_eq!(cfg.uav_limits(), UavLimits::default());
        assert_eq!(cfg.min_sep(), 10.0);
    }

    #[test]
    fn seed_is_mandatory() {
        let err = ScenarioConfig::from_toml_str("mode = \"formation\"\nsim_steps = 10\n").unwrap_err();
        assert!(err.to_string().contains("seed"), "{err}");
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = format!("{MINIMAL}[swarm]\nn_uav = 3\n");
        assert!(matches!(ScenarioConfig::from_toml_str(&text), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn all_issues_listed_with_paths() {
        let text = format!("{MINIMAL}[swarm]\nhorizon = 0\n[limits]\ndt = -1.0\n[formation]\nshape = \"square\"\n");
        let Err(ConfigError::Invalid(issues)) = ScenarioConfig::from_toml_str(&text) else { panic!() };
        let paths: Vec<&str> = issues.iter().map(|i| i.path.as_str()).collect();
        assert_eq!(paths, vec!["swarm.horizon", "limits.dt", "formation.side"]);
    }

    #[test]
    fn infinite_threshold_accepted() {
        let text = format!("{MINIMAL}[swarm]\nneighborhood_threshold = inf\n");
        let cfg = ScenarioConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg.neighborhood(), Neighborhood::Radius(f64::INFINITY));
    }

    #[test]
    fn fusion_graph_parameters_checked() {
        let text = "mode = \"fusion\"\nseed = 1\nsim_steps = 300\n[fusion]\ngraph = \"config1\"\ndegree = 3\nn_sensors = 9\n";
        let Err(ConfigError::Invalid(issues)) = ScenarioConfig::from_toml_str(text) else { panic!() };
        assert_eq!(issues[0].path, "fusion.degree");
        let ok = "mode = \"fusion\"\nseed = 1\nsim_steps = 300\n[fusion]\ngraph = \"regular\"\ndegree = 4\nm = 6\n";
        let cfg = ScenarioConfig::from_toml_str(ok).unwrap();
        assert_eq!(cfg.schedule(), ScheduleConfig { m: 6, z: 300, alpha: 0.5 });
    }

    #[test]
    fn overrides_by_dotted_path() {
        let cfg = ScenarioConfig::from_toml_str(MINIMAL).unwrap();
        let c2 = cfg.with_override("swarm.neighborhood_threshold", toml::Value::Float(130.0)).unwrap();
        assert_eq!(c2.neighborhood(), Neighborhood::Radius(130.0));
        let c3 = cfg.with_override("seed", toml::Value::Integer(9)).unwrap();
        assert_eq!(c3.seed, 9);
        assert!(cfg.with_override("swarm.horizon", toml::Value::Integer(0)).is_err());
        assert!(cfg.with_override("swarm.nope", toml::Value::Integer(1)).is_err());
    }

    #[test]
    fn toml_round_trip() {
        let cfg = ScenarioConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap(), cfg);
    }

    #[test]
    fn evaluation_budget_scales_and_caps() {
        let mut cfg = ScenarioConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(cfg.optimizer_options(28, 0).max_evals, 14_000);
        cfg.optimizer.max_evals = Some(5000);
        assert_eq!(cfg.optimizer_options(28, 0).max_evals, 5000);
        assert_eq!(cfg.optimizer_options(4, 0).max_evals, 2000);
    }
}
