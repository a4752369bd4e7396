//! Closed-loop plant: bicycle kinematics, piecewise road, synthetic camera,
//! IMU and the fixed-step scenario runner.

mod camera;
mod imu;
mod road;
mod scenario;
pub mod scenes;
mod vehicle;

pub use camera::{render_camera, render_lines, CameraModel, NoiseModel, PixelLabel, RenderedFrame};
pub use imu::imu_sample;
pub use road::{quarter_turn, LateralState, RoadModel, RoadPose, RoadSpec, RoadStart, Segment};
pub use scenario::{run_scenario, FrameSink, InitialPose, Outcome, ScenarioParams, SimTrace, TraceRow, TRACE_HEADER};
pub use vehicle::{kinematic_step, turning_radius, wrap_angle, VehicleState};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid road: {0}")]
    InvalidRoad(String),
    #[error("arclength {arclength} outside road of length {total}")]
    OutOfRoad { arclength: f64, total: f64 },
    #[error("vehicle {offset:.3} m from the centerline is off the road")]
    OffRoad { offset: f64 },
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("malformed trace: {0}")]
    TraceFormat(String),
}
