//! Fixed-step closed loop: render → perceive → fuse → steer → integrate.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::camera::{render_camera, CameraModel, NoiseModel, RenderedFrame};
use super::imu::imu_sample;
use super::road::RoadModel;
use super::vehicle::{kinematic_step, VehicleState};
use super::SimError;
use crate::control::{ControlError, ControllerGains, HeadingFusionConfig, LateralController};
use crate::perception::{analyze_frame, LanesSeen, PerceptionConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialPose {
    /// metres along the centerline
    pub arclength: f64,
    /// metres, positive left
    pub offset: f64,
    pub heading_deg: f64,
}

impl Default for InitialPose {
    fn default() -> Self {
        InitialPose { arclength: 0.0, offset: 0.0, heading_deg: 0.0 }
    }
}

/// Everything except the road that a closed-loop run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub camera: CameraModel,
    pub noise: NoiseModel,
    pub perception: PerceptionConfig,
    pub gains: ControllerGains,
    pub fusion: HeadingFusionConfig,
    pub wheelbase: f64,
    pub dt: f64,
    pub duration: f64,
    pub speed: f64,
    pub initial: InitialPose,
    /// Constant offset added to every commanded steering angle, rad.
    pub steering_bias: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            camera: CameraModel::default(),
            noise: NoiseModel::default(),
            perception: PerceptionConfig::default(),
            gains: ControllerGains::default(),
            fusion: HeadingFusionConfig::default(),
            wheelbase: 0.26,
            dt: 0.01,
            duration: 50.0,
            speed: 0.5,
            initial: InitialPose::default(),
            steering_bias: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Completed,
    VehicleLeftRoad { t: f64 },
    RoadEnd { t: f64 },
}

impl Outcome {
    fn footer(&self) -> String {
        match self {
            Outcome::Completed => "# outcome=Completed".into(),
            Outcome::VehicleLeftRoad { t } => format!("# outcome=VehicleLeftRoad t={t:.6}"),
            Outcome::RoadEnd { t } => format!("# outcome=RoadEnd t={t:.6}"),
        }
    }

    fn parse_footer(line: &str) -> Option<Self> {
        let rest = line.strip_prefix("# outcome=")?;
        let mut parts = rest.split_whitespace();
        let kind = parts.next()?;
        let t = parts.next().and_then(|p| p.strip_prefix("t=")).and_then(|v| v.parse().ok());
        match kind {
            "Completed" => Some(Outcome::Completed),
            "VehicleLeftRoad" => Some(Outcome::VehicleLeftRoad { t: t? }),
            "RoadEnd" => Some(Outcome::RoadEnd { t: t? }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub lateral_offset_true: f64,
    pub distance_error_px: f64,
    pub alpha_deg: f64,
    pub delta_rad: f64,
    pub lanes_seen: Option<LanesSeen>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub rows: Vec<TraceRow>,
    pub outcome: Outcome,
}

pub const TRACE_HEADER: &str = "t,offset_m,err_px,alpha_deg,delta_rad,lanes";

fn lanes_str(l: Option<LanesSeen>) -> &'static str {
    l.map_or("none", |l| l.as_str())
}

impl SimTrace {
    pub fn completed(&self) -> bool {
        self.outcome == Outcome::Completed
    }

    /// Rows with `t` in `[t0, t1)`.
    pub fn window(&self, t0: f64, t1: f64) -> impl Iterator<Item = &TraceRow> {
        self.rows.iter().filter(move |r| r.t >= t0 && r.t < t1)
    }

    pub fn peak_abs_offset(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.lateral_offset_true.abs()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * 48 + 64);
        out.push_str(TRACE_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{:.6},{:.6},{:.3},{:.4},{:.6},{}",
                r.t,
                r.lateral_offset_true,
                r.distance_error_px,
                r.alpha_deg,
                r.delta_rad,
                lanes_str(r.lanes_seen)
            )
            .unwrap();
        }
        out.push_str(&self.outcome.footer());
        out.push('\n');
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, SimError> {
        let bad = |m: String| SimError::TraceFormat(m);
        let mut lines = text.lines();
        if lines.next() != Some(TRACE_HEADER) {
            return Err(bad("missing trace header".into()));
        }
        let mut rows = Vec::new();
        let mut outcome = None;
        for (i, line) in lines.enumerate() {
            if line.starts_with('#') {
                outcome = Some(Outcome::parse_footer(line).ok_or_else(|| bad(format!("bad footer {line:?}")))?);
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(bad(format!("row {}: expected 6 fields", i + 1)));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("row {}: bad number {s:?}", i + 1)));
            let lanes = match f[5] {
                "both" => Some(LanesSeen::Both),
                "left" => Some(LanesSeen::LeftOnly),
                "right" => Some(LanesSeen::RightOnly),
                "none" => None,
                other => return Err(bad(format!("row {}: bad lanes {other:?}", i + 1))),
            };
            rows.push(TraceRow {
                t: num(f[0])?,
                lateral_offset_true: num(f[1])?,
                distance_error_px: num(f[2])?,
                alpha_deg: num(f[3])?,
                delta_rad: num(f[4])?,
                lanes_seen: lanes,
            });
        }
        Ok(SimTrace { rows, outcome: outcome.ok_or_else(|| bad("missing outcome footer".into()))? })
    }
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<(), SimError> {
        self.camera.validate()?;
        self.noise.validate()?;
        self.perception.validate().map_err(|e| SimError::InvalidScenario(e.to_string()))?;
        self.gains.validate().map_err(|e| SimError::InvalidScenario(e.to_string()))?;
        self.fusion.validate().map_err(|e| SimError::InvalidScenario(e.to_string()))?;
        if !(1e-4..=0.1).contains(&self.dt) {
            return Err(SimError::InvalidScenario("dt must lie in [1e-4, 0.1]".into()));
        }
        if !(self.duration > 0.0) {
            return Err(SimError::InvalidScenario("duration must be positive".into()));
        }
        if !(self.speed >= 0.0 && self.wheelbase > 0.0) {
            return Err(SimError::InvalidScenario("need speed >= 0 and wheelbase > 0".into()));
        }
        Ok(())
    }

    fn every(&self, rate: f64) -> usize {
        ((1.0 / (rate * self.dt)).round() as usize).max(1)
    }
}

/// Receives `(vision frame index, pose, rendered frame)` at the vision rate.
pub type FrameSink<'a> = &'a mut dyn FnMut(usize, &VehicleState, &RenderedFrame);

/// Runs the closed loop for `duration`, one trace row per control step.
///
/// The controller emits right-positive steering; the plant integrates
/// counter-clockwise-positive wheel angles, hence the sign flip at the
/// actuator. The run stops early when the vehicle's reference point leaves
/// the lane or the road runs out.
pub fn run_scenario(
    road: &RoadModel,
    params: &ScenarioParams,
    mut frame_sink: Option<FrameSink<'_>>,
) -> Result<SimTrace, SimError> {
    params.validate()?;
    for seg in &road.spec().segments {
        if let super::road::Segment::Arc { radius, .. } = *seg {
            if radius <= params.wheelbase {
                return Err(SimError::InvalidRoad(format!("arc radius {radius} m is not above the wheelbase")));
            }
        }
    }
    let init = params.initial;
    let mut state = road.vehicle_at(init.arclength, init.offset, init.heading_deg.to_radians(), params.speed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.noise.rng_seed);
    let mut ctl = LateralController::new(params.gains, params.fusion);

    let vision_every = params.every(params.fusion.vision_rate);
    let imu_every = params.every(params.fusion.imu_rate);
    let steps = (params.duration / params.dt).round() as usize;
    let end_margin = 0.05;
    let half_lane = road.lane_width() / 2.0;

    let mut rows = Vec::with_capacity(steps);
    let mut held_error = 0.0;
    let mut lanes = None;
    let mut delta = 0.0;
    let mut arclength = init.arclength;
    let mut frame_no = 0usize;
    let mut outcome = Outcome::Completed;

    for k in 0..steps {
        let t = k as f64 * params.dt;
        let lat = match road.lateral_state_near(&state, arclength, 0.5) {
            Ok(l) if l.offset.abs() <= half_lane => l,
            _ => {
                outcome = Outcome::VehicleLeftRoad { t };
                break;
            }
        };
        arclength = lat.arclength;
        if arclength >= road.total_length() - end_margin {
            outcome = Outcome::RoadEnd { t };
            break;
        }

        let mut vision_alpha = None;
        if k % vision_every == 0 {
            let frame = render_camera(road, &state, &params.camera, &params.noise, &mut rng);
            frame_no += 1;
            if let Some(sink) = frame_sink.as_mut() {
                sink(frame_no, &state, &frame);
            }
            let analysis =
                analyze_frame(&frame.image, &params.perception).map_err(|e| SimError::InvalidScenario(e.to_string()))?;
            match analysis.feedback {
                Some(fb) => {
                    held_error = fb.distance_error;
                    vision_alpha = Some(fb.angle_error_alpha);
                    lanes = Some(fb.lanes_seen);
                }
                None => lanes = None,
            }
        }
        let imu = (k % imu_every == 0).then(|| imu_sample(lat.heading_rel_road, &params.noise, &mut rng));

        match ctl.update(held_error, vision_alpha, imu, t, params.dt) {
            Ok(d) => delta = d,
            Err(ControlError::NoHeadingSource) => {}
            Err(e) => return Err(SimError::InvalidScenario(e.to_string())),
        }
        rows.push(TraceRow {
            t,
            lateral_offset_true: lat.offset,
            distance_error_px: held_error,
            alpha_deg: ctl.state.last_fused_heading,
            delta_rad: delta,
            lanes_seen: lanes,
        });

        let applied = delta + params.steering_bias;
        state = kinematic_step(&state, -applied, params.dt, params.wheelbase);
    }
    Ok(SimTrace { rows, outcome })
}
