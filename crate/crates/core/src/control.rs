//! Three-term lateral controller with multi-rate heading fusion.
//!
//! ```text
//! δ = k_distance·e_d + k_integral·∫e_d dt + k_angle·tan(α_fused)
//! ```
//!
//! `e_d` is the pixel distance error from perception, `α_fused` the heading
//! error blended from low-rate vision and high-rate IMU. Positive δ steers right.

use serde::{Deserialize, Serialize};

use crate::perception::FeedbackSample;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ControlError {
    #[error("neither vision nor IMU heading available")]
    NoHeadingSource,
    #[error("invalid controller config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerGains {
    /// rad per px of distance error
    pub k_distance: f64,
    /// rad per px·s of accumulated distance error
    pub k_integral: f64,
    /// rad per unit tan(α)
    pub k_angle: f64,
    /// steering saturation, rad
    pub delta_max: f64,
    /// accumulator bound, px·s
    pub integral_clamp: f64,
    /// |α| bound applied before the tangent, degrees
    pub alpha_clamp_deg: f64,
}

impl Default for ControllerGains {
    fn default() -> Self {
        ControllerGains {
            k_distance: 0.006,
            k_integral: 0.003,
            k_angle: 1.0,
            delta_max: 0.45,
            integral_clamp: 100.0,
            alpha_clamp_deg: 85.0,
        }
    }
}

impl ControllerGains {
    pub fn zero() -> Self {
        ControllerGains { k_distance: 0.0, k_integral: 0.0, k_angle: 0.0, ..Default::default() }
    }

    /// Proportional distance term only.
    pub fn distance_only(&self) -> Self {
        ControllerGains { k_integral: 0.0, k_angle: 0.0, ..*self }
    }

    pub fn validate(&self) -> Result<(), ControlError> {
        let finite = [self.k_distance, self.k_integral, self.k_angle, self.delta_max, self.integral_clamp]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(ControlError::InvalidConfig("gains must be finite".into()));
        }
        if self.delta_max <= 0.0 {
            return Err(ControlError::InvalidConfig("delta_max must be positive".into()));
        }
        if self.integral_clamp < 0.0 {
            return Err(ControlError::InvalidConfig("integral_clamp must be non-negative".into()));
        }
        if !(self.alpha_clamp_deg > 0.0 && self.alpha_clamp_deg < 90.0) {
            return Err(ControlError::InvalidConfig("alpha_clamp_deg must lie in (0, 90)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeadingFusionConfig {
    /// Weight of the vision angle when a frame arrives, in [0, 1].
    pub vision_weight: f64,
    pub imu_rate: f64,
    pub vision_rate: f64,
}

impl Default for HeadingFusionConfig {
    fn default() -> Self {
        HeadingFusionConfig { vision_weight: 0.8, imu_rate: 100.0, vision_rate: 20.0 }
    }
}

impl HeadingFusionConfig {
    pub fn validate(&self) -> Result<(), ControlError> {
        if !(0.0..=1.0).contains(&self.vision_weight) {
            return Err(ControlError::InvalidConfig("vision_weight must lie in [0, 1]".into()));
        }
        if !(self.vision_rate > 0.0 && self.imu_rate >= self.vision_rate) {
            return Err(ControlError::InvalidConfig("need imu_rate >= vision_rate > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControllerState {
    /// px·s
    pub integral_accum: f64,
    /// degrees
    pub last_fused_heading: f64,
    /// seconds; negative infinity until the first frame
    pub last_vision_time: f64,
    /// last raw IMU reading, degrees
    pub last_imu_heading: Option<f64>,
}

impl ControllerState {
    pub fn new() -> Self {
        reset(&ControllerState::default())
    }
}

pub fn reset(_state: &ControllerState) -> ControllerState {
    ControllerState {
        integral_accum: 0.0,
        last_fused_heading: 0.0,
        last_vision_time: f64::NEG_INFINITY,
        last_imu_heading: None,
    }
}

/// Blends the two heading sources and stores the estimate in `state`.
///
/// A vision frame sets the estimate to `w·α + (1−w)·imu`. Between frames the
/// estimate moves by the IMU increment since the previous reading, so a
/// constant IMU bias cancels out of the propagation.
pub fn fuse_heading(
    state: &mut ControllerState,
    imu_deg: Option<f64>,
    vision_alpha_deg: Option<f64>,
    cfg: &HeadingFusionConfig,
    t: f64,
) -> Result<f64, ControlError> {
    let fused = match (vision_alpha_deg, imu_deg) {
        (Some(alpha), Some(imu)) => cfg.vision_weight * alpha + (1.0 - cfg.vision_weight) * imu,
        (Some(alpha), None) => alpha,
        (None, Some(imu)) => match state.last_imu_heading {
            Some(prev) => state.last_fused_heading + (imu - prev),
            None => imu,
        },
        (None, None) => return Err(ControlError::NoHeadingSource),
    };
    if vision_alpha_deg.is_some() {
        state.last_vision_time = t;
    }
    if imu_deg.is_some() {
        state.last_imu_heading = imu_deg;
    }
    state.last_fused_heading = fused;
    Ok(fused)
}

/// Per-term breakdown of one steering command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteeringTerms {
    pub distance: f64,
    pub integral: f64,
    pub angle: f64,
    /// Sum before saturation.
    pub raw: f64,
}

pub fn steering_command(
    fb: &FeedbackSample,
    fused_alpha_deg: f64,
    state: &ControllerState,
    gains: &ControllerGains,
    dt: f64,
) -> (f64, ControllerState) {
    let (delta, next, _) = steering_command_terms(fb.distance_error, fused_alpha_deg, state, gains, dt);
    (delta, next)
}

pub fn steering_command_terms(
    distance_error: f64,
    fused_alpha_deg: f64,
    state: &ControllerState,
    gains: &ControllerGains,
    dt: f64,
) -> (f64, ControllerState, SteeringTerms) {
    debug_assert!(dt > 0.0);
    let alpha = fused_alpha_deg.clamp(-gains.alpha_clamp_deg, gains.alpha_clamp_deg);
    let integral =
        (state.integral_accum + distance_error * dt).clamp(-gains.integral_clamp, gains.integral_clamp);
    let terms_d = gains.k_distance * distance_error;
    let terms_i = gains.k_integral * integral;
    let terms_a = gains.k_angle * alpha.to_radians().tan();
    let raw = terms_d + terms_i + terms_a;
    let delta = if raw.is_nan() { 0.0 } else { raw.clamp(-gains.delta_max, gains.delta_max) };
    let next = ControllerState { integral_accum: integral, ..*state };
    (delta, next, SteeringTerms { distance: terms_d, integral: terms_i, angle: terms_a, raw })
}

/// Gains, fusion settings and state bundled for a single control loop.
#[derive(Debug, Clone)]
pub struct LateralController {
    pub gains: ControllerGains,
    pub fusion: HeadingFusionConfig,
    pub state: ControllerState,
}

impl LateralController {
    pub fn new(gains: ControllerGains, fusion: HeadingFusionConfig) -> Self {
        LateralController { gains, fusion, state: ControllerState::new() }
    }

    /// One control tick: fuse heading sources, then compute δ.
    pub fn update(
        &mut self,
        distance_error: f64,
        vision_alpha_deg: Option<f64>,
        imu_deg: Option<f64>,
        t: f64,
        dt: f64,
    ) -> Result<f64, ControlError> {
        let fused = fuse_heading(&mut self.state, imu_deg, vision_alpha_deg, &self.fusion, t)?;
        let (delta, next, _) = steering_command_terms(distance_error, fused, &self.state, &self.gains, dt);
        self.state = next;
        Ok(delta)
    }

    pub fn reset(&mut self) {
        self.state = reset(&self.state);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perception::LanesSeen;

    fn fb(e: f64) -> FeedbackSample {
        FeedbackSample { distance_error: e, angle_error_alpha: 0.0, lanes_seen: LanesSeen::Both }
    }

    #[test]
    fn zero_errors_zero_delta() {
        let (d, _) = steering_command(&fb(0.0), 0.0, &ControllerState::new(), &ControllerGains::default(), 0.01);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn single_distance_term() {
        let gains = ControllerGains { k_distance: 0.01, ..ControllerGains::zero() };
        let (d, _) = steering_command(&fb(10.0), 0.0, &ControllerState::new(), &gains, 0.01);
        assert!((d - 0.1).abs() < 1e-15);
    }

    #[test]
    fn tangent_term_at_45_degrees() {
        let gains = ControllerGains { k_angle: 0.5, delta_max: 1.0, ..ControllerGains::zero() };
        let (d, _) = steering_command(&fb(0.0), 45.0, &ControllerState::new(), &gains, 0.01);
        assert!((d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn saturates_at_delta_max() {
        let gains = ControllerGains::default();
        let (d, _) = steering_command(&fb(1e6), 0.0, &ControllerState::new(), &gains, 0.01);
        assert_eq!(d, gains.delta_max);
        let (d, _) = steering_command(&fb(-1e6), 0.0, &ControllerState::new(), &gains, 0.01);
        assert_eq!(d, -gains.delta_max);
    }

    #[test]
    fn integrator_is_clamped() {
        let gains = ControllerGains { integral_clamp: 5.0, ..Default::default() };
        let mut s = ControllerState::new();
        for _ in 0..1000 {
            s = steering_command(&fb(100.0), 0.0, &s, &gains, 0.01).1;
        }
        assert_eq!(s.integral_accum, 5.0);
    }

    #[test]
    fn alpha_clamped_before_tangent() {
        let gains = ControllerGains { k_angle: 1.0, delta_max: 100.0, ..ControllerGains::zero() };
        let (d, _) = steering_command(&fb(0.0), 89.999, &ControllerState::new(), &gains, 0.01);
        assert!((d - 85f64.to_radians().tan()).abs() < 1e-12);
    }

    #[test]
    fn reset_is_idempotent() {
        let s = ControllerState { integral_accum: 3.0, last_fused_heading: 7.0, last_vision_time: 2.0, last_imu_heading: Some(1.0) };
        let once = reset(&s);
        assert_eq!(once.integral_accum, 0.0);
        assert_eq!(reset(&once), once);
        let (d, _) = steering_command(&fb(0.0), 0.0, &once, &ControllerGains::default(), 0.01);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn vision_passthrough_with_full_weight() {
        let cfg = HeadingFusionConfig { vision_weight: 1.0, ..Default::default() };
        let mut s = ControllerState::new();
        assert_eq!(fuse_heading(&mut s, Some(4.0), Some(10.0), &cfg, 0.0).unwrap(), 10.0);
        assert_eq!(s.last_fused_heading, 10.0);
        assert_eq!(s.last_vision_time, 0.0);
    }

    #[test]
    fn agreeing_sources_are_a_fixed_point() {
        for w in [0.0, 0.3, 0.5, 1.0] {
            let cfg = HeadingFusionConfig { vision_weight: w, ..Default::default() };
            let mut s = ControllerState::new();
            assert!((fuse_heading(&mut s, Some(7.0), Some(7.0), &cfg, 0.0).unwrap() - 7.0).abs() < 1e-12);
        }
    }

    #[test]
    fn imu_propagates_between_frames() {
        let cfg = HeadingFusionConfig { vision_weight: 1.0, ..Default::default() };
        let mut s = ControllerState::new();
        fuse_heading(&mut s, Some(3.0), Some(5.0), &cfg, 0.0).unwrap();
        // IMU moves by +1.5 degrees, estimate follows from the vision value
        let f = fuse_heading(&mut s, Some(4.5), None, &cfg, 0.01).unwrap();
        assert!((f - 6.5).abs() < 1e-12);
    }

    #[test]
    fn no_source_is_error() {
        let mut s = ControllerState::new();
        let err = fuse_heading(&mut s, None, None, &HeadingFusionConfig::default(), 0.0).unwrap_err();
        assert_eq!(err, ControlError::NoHeadingSource);
    }

    #[test]
    fn config_validation() {
        assert!(ControllerGains { delta_max: 0.0, ..Default::default() }.validate().is_err());
        assert!(ControllerGains { alpha_clamp_deg: 90.0, ..Default::default() }.validate().is_err());
        assert!(HeadingFusionConfig { imu_rate: 10.0, vision_rate: 20.0, vision_weight: 0.5 }.validate().is_err());
        ControllerGains::default().validate().unwrap();
        HeadingFusionConfig::default().validate().unwrap();
    }
}
