//! JSON scenario configuration. Every section is optional and falls back to
//! the defaults; unknown keys are rejected with their field path.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::control::{ControllerGains, HeadingFusionConfig};
use crate::parking::{
    gap_layout, DistanceModel, InterpolationConfig, ParkingLayout, ParkingVehicle, PlannerConfig,
};
use crate::perception::PerceptionConfig;
use crate::simulator::{scenes, CameraModel, InitialPose, NoiseModel, RoadModel, RoadSpec, RoadStart, ScenarioParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneKind {
    /// frames captured along a closed-loop drive on the configured road
    Drive,
    Straight,
    BasePoints,
    Sharp,
    Moderate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SceneConfig {
    pub kind: SceneKind,
    pub frames: usize,
}

impl Default for SceneConfig {
    fn default() -> Self {
        SceneConfig { kind: SceneKind::Drive, frames: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GhostEchoes {
    /// evenly spread spikes placed inside the first gap wider than 0.3 m
    pub count: usize,
    pub range_mm: f64,
}

impl Default for GhostEchoes {
    fn default() -> Self {
        GhostEchoes { count: 0, range_mm: 400.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParkingConfig {
    pub layout: ParkingLayout,
    pub vehicle: ParkingVehicle,
    pub planner: PlannerConfig,
    pub interpolation: InterpolationConfig,
    pub ghost_echoes: GhostEchoes,
    /// shortest run of deep readings reported as a candidate space, m
    pub min_space_length: f64,
    /// readings at least this deep count as free, mm
    pub min_depth_mm: f64,
    /// sign-height model used to locate the sign at the start of the pass
    pub sign_model: Option<DistanceModel>,
    /// side clearance to the parked row, m; estimated from the scan when absent
    pub lateral_gap: Option<f64>,
}

impl Default for ParkingConfig {
    fn default() -> Self {
        let vehicle = ParkingVehicle::default();
        ParkingConfig {
            layout: gap_layout(0.8, 0.15, &vehicle),
            vehicle,
            planner: PlannerConfig::default(),
            interpolation: InterpolationConfig::default(),
            ghost_echoes: GhostEchoes::default(),
            min_space_length: 0.3,
            min_depth_mm: 500.0,
            sign_model: Some(DistanceModel { a: 60.0, b: 2.0, fitted_range: (0.1, 3.0) }),
            lateral_gap: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub road: RoadSpec,
    pub camera: CameraModel,
    pub noise: NoiseModel,
    pub perception: PerceptionConfig,
    pub gains: ControllerGains,
    pub fusion: HeadingFusionConfig,
    pub dt: f64,
    pub duration: f64,
    pub speed: f64,
    pub wheelbase: f64,
    pub initial: InitialPose,
    /// rad, added to every steering command at the actuator
    pub steering_bias: f64,
    pub dump_frames: bool,
    pub scene: SceneConfig,
    pub parking: Option<ParkingConfig>,
    /// overrides `noise.rng_seed`
    pub rng_seed: Option<u64>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let p = ScenarioParams::default();
        ScenarioConfig {
            road: RoadSpec {
                start: RoadStart::default(),
                segments: scenes::s_curve_segments(),
                lane_width: scenes::LANE_WIDTH,
                line_thickness: scenes::LINE_THICKNESS,
            },
            camera: p.camera,
            noise: p.noise,
            perception: p.perception,
            gains: p.gains,
            fusion: p.fusion,
            dt: p.dt,
            duration: p.duration,
            speed: p.speed,
            wheelbase: p.wheelbase,
            initial: p.initial,
            steering_bias: p.steering_bias,
            dump_frames: false,
            scene: SceneConfig::default(),
            parking: None,
            rng_seed: None,
        }
    }
}

/// A rejected configuration: the offending field path and why.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: &str, message: impl ToString) -> Self {
        ConfigError { path: path.into(), message: message.to_string() }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ConfigError::new(if path.is_empty() { "." } else { &path }, e.inner())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new(&path.display().to_string(), e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is serializable")
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        if seed.is_some() {
            self.rng_seed = seed;
        }
        self
    }

    pub fn seed(&self) -> u64 {
        self.rng_seed.unwrap_or(self.noise.rng_seed)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.road.lane_width > 0.0) {
            return Err(ConfigError::new("road.lane_width", "must be positive"));
        }
        if !(self.road.line_thickness > 0.0) {
            return Err(ConfigError::new("road.line_thickness", "must be positive"));
        }
        self.road_model()?;
        self.scenario_params().validate().map_err(|e| ConfigError::new("scenario", e))?;
        if self.scene.frames == 0 {
            return Err(ConfigError::new("scene.frames", "must be at least 1"));
        }
        if let Some(p) = &self.parking {
            p.layout.validate().map_err(|e| ConfigError::new("parking.layout", e))?;
            p.vehicle.validate().map_err(|e| ConfigError::new("parking.vehicle", e))?;
            if !(p.planner.margin >= 0.0 && p.planner.speed > 0.0 && p.planner.rollout_dt > 0.0) {
                return Err(ConfigError::new("parking.planner", "need margin >= 0, speed > 0, rollout_dt > 0"));
            }
            if !(p.interpolation.spike_threshold > 0.0) {
                return Err(ConfigError::new("parking.interpolation.spike_threshold", "must be positive"));
            }
            if !(p.min_space_length > 0.0) {
                return Err(ConfigError::new("parking.min_space_length", "must be positive"));
            }
            if !(p.min_depth_mm > 0.0 && p.min_depth_mm <= crate::parking::OUT_OF_RANGE_MM) {
                return Err(ConfigError::new("parking.min_depth_mm", "must lie in (0, 2000]"));
            }
            if p.lateral_gap.is_some_and(|g| !(g > 0.0)) {
                return Err(ConfigError::new("parking.lateral_gap", "must be positive"));
            }
            if let Some(m) = &p.sign_model {
                if !(m.a > 0.0 && m.fitted_range.0 > 0.0 && m.fitted_range.0 <= m.fitted_range.1) {
                    return Err(ConfigError::new("parking.sign_model", "need a > 0 and 0 < d_min <= d_max"));
                }
            }
        }
        Ok(())
    }

    pub fn road_model(&self) -> Result<RoadModel, ConfigError> {
        RoadModel::new(self.road.clone()).map_err(|e| ConfigError::new("road", e))
    }

    pub fn scenario_params(&self) -> ScenarioParams {
        ScenarioParams {
            camera: self.camera,
            noise: NoiseModel { rng_seed: self.seed(), ..self.noise },
            perception: self.perception.clone(),
            gains: self.gains,
            fusion: self.fusion,
            wheelbase: self.wheelbase,
            dt: self.dt,
            duration: self.duration,
            speed: self.speed,
            initial: self.initial,
            steering_bias: self.steering_bias,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        assert_eq!(ScenarioConfig::from_json("{}").unwrap(), ScenarioConfig::default());
    }

    #[test]
    fn unknown_key_reports_path() {
        let e = ScenarioConfig::from_json(r#"{"gains": {"k_distanse": 1.0}}"#).unwrap_err();
        assert!(e.path.starts_with("gains"), "{e}");
    }

    #[test]
    fn negative_lane_width() {
        let mut c = ScenarioConfig::default();
        c.road.lane_width = -0.5;
        let e = ScenarioConfig::from_json(&c.to_json()).unwrap_err();
        assert_eq!(e.path, "road.lane_width");
    }

    #[test]
    fn round_trip() {
        let c = ScenarioConfig { parking: Some(ParkingConfig::default()), rng_seed: Some(7), ..Default::default() };
        assert_eq!(ScenarioConfig::from_json(&c.to_json()).unwrap(), c);
    }
}
