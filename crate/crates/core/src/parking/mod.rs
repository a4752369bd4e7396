//! Parallel parking: sign-range model, side-scan denoising, gap detection
//! and full-lock maneuver planning.

mod distance;
mod geometry;
mod layout;
mod planner;
mod scan;

pub use distance::{estimate_distance, fit_sign_distance_model, DistanceEstimate, DistanceModel, SignHeightSample};
pub use geometry::{check_collision, separation, Footprint, Rect};
pub use layout::{gap_layout, inject_spikes, random_spikes, sense_range, simulate_scan, wall_layout, ParkingLayout};
pub use planner::{
    park_in_geometry, plan_park_in, plan_park_in_with, plan_park_out, plan_park_out_with, rollout, single_arc_clearance,
    space_obstacles, validate_plan, ManeuverPlan, ManeuverSegment, ParkInGeometry, ParkingVehicle, PlannerConfig,
    SpaceLines,
};
pub use scan::{
    detect_space, interpolate_scan, interpolate_scan_with, InterpolationConfig, ParkingSpace, RangeSample, RangeScan,
    OUT_OF_RANGE_MM,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParkingError {
    #[error("need at least 3 samples at 3 distinct distances with a positive 1/d coefficient (got {samples} samples, {distinct} distances)")]
    DegenerateSamples { samples: usize, distinct: usize },
    #[error("sign height {height} px is not above the model asymptote {asymptote} px")]
    HeightBelowAsymptote { height: f64, asymptote: f64 },
    #[error("space {length:.3} m x {depth:.3} m is smaller than the required {required_length:.3} m x {required_depth:.3} m")]
    SpaceTooSmall { length: f64, required_length: f64, depth: f64, required_depth: f64 },
    #[error("no exit found within {segments} segments")]
    NoExitFound { segments: usize },
    #[error("plan failed rollout: {0}")]
    RolloutFailed(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("i/o: {0}")]
    Io(String),
}
