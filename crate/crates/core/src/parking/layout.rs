//! Parking-lot layouts and the simulated side-sensor pass over them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::geometry::Rect;
use super::planner::ParkingVehicle;
use super::scan::{RangeSample, RangeScan, OUT_OF_RANGE_MM};
use super::ParkingError;

/// Obstacles beside a straight pass along `y = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParkingLayout {
    pub obstacles: Vec<Rect>,
    /// pass start and end, rear-axle x
    pub pass_start: f64,
    pub pass_end: f64,
    /// odometry between range samples, m
    #[serde(default = "default_spacing")]
    pub sample_spacing: f64,
    /// x of the parking sign, if one marks the zone
    #[serde(default)]
    pub sign_x: Option<f64>,
}

fn default_spacing() -> f64 {
    0.01
}

impl ParkingLayout {
    pub fn validate(&self) -> Result<(), ParkingError> {
        if let Some(i) = self.obstacles.iter().position(|r| !r.is_valid()) {
            return Err(ParkingError::InvalidInput(format!("obstacle {i}: need min < max on both axes")));
        }
        if !(self.pass_end > self.pass_start) || !(self.sample_spacing > 0.0) {
            return Err(ParkingError::InvalidInput("need pass_end > pass_start and sample_spacing > 0".into()));
        }
        Ok(())
    }
}

/// Range from a right-facing sensor on the vehicle's side at odometry `x`.
pub fn sense_range(layout: &ParkingLayout, vehicle: &ParkingVehicle, x: f64) -> f64 {
    let side = -vehicle.width / 2.0;
    let nearest = layout
        .obstacles
        .iter()
        .filter(|r| r.x_min <= x && x <= r.x_max && r.y_max <= side)
        .map(|r| (side - r.y_max) * 1000.0)
        .fold(f64::INFINITY, f64::min);
    nearest.clamp(1.0, OUT_OF_RANGE_MM)
}

/// Straight pass sampling every `sample_spacing` of odometry.
pub fn simulate_scan(layout: &ParkingLayout, vehicle: &ParkingVehicle) -> Result<RangeScan, ParkingError> {
    layout.validate()?;
    let n = ((layout.pass_end - layout.pass_start) / layout.sample_spacing).floor() as usize;
    let samples = (0..=n)
        .map(|k| {
            let x = layout.pass_start + k as f64 * layout.sample_spacing;
            RangeSample { odometry_s: x, range: sense_range(layout, vehicle, x) }
        })
        .collect();
    RangeScan::new(samples)
}

/// Parked car, gap, parked car, with a far curb out of sensor reach.
///
/// The rear car spans `x ∈ [0, 1]`, the gap `[1, 1 + gap_length]`; both cars
/// keep `lateral_gap` from the passing vehicle's side.
pub fn gap_layout(gap_length: f64, lateral_gap: f64, vehicle: &ParkingVehicle) -> ParkingLayout {
    let edge = -vehicle.width / 2.0 - lateral_gap;
    let car = 0.2;
    let curb = -vehicle.width / 2.0 - 2.5;
    ParkingLayout {
        obstacles: vec![
            Rect::new(0.0, 1.0, edge - car, edge),
            Rect::new(1.0 + gap_length, 2.0 + gap_length, edge - car, edge),
            Rect::new(-1.0, 3.0 + gap_length, curb - 0.1, curb),
        ],
        pass_start: -0.2,
        pass_end: 2.2 + gap_length,
        sample_spacing: 0.01,
        sign_x: Some(0.0),
    }
}

/// A continuous wall: nowhere to park.
pub fn wall_layout(length: f64, lateral_gap: f64, vehicle: &ParkingVehicle) -> ParkingLayout {
    let edge = -vehicle.width / 2.0 - lateral_gap;
    ParkingLayout {
        obstacles: vec![Rect::new(-1.0, length + 1.0, edge - 0.2, edge)],
        pass_start: 0.0,
        pass_end: length,
        sample_spacing: 0.01,
        sign_x: None,
    }
}

/// Overwrites `count` samples inside `[s_lo, s_hi]`, evenly spread, with
/// short-range ghost echoes — the kind of isolated reading that would
/// otherwise split a free gap.
pub fn inject_spikes(scan: &RangeScan, s_lo: f64, s_hi: f64, count: usize, range_mm: f64) -> RangeScan {
    let mut out = scan.clone();
    let idx: Vec<usize> = (0..out.samples.len())
        .filter(|&i| (s_lo..=s_hi).contains(&out.samples[i].odometry_s))
        .collect();
    if idx.is_empty() || count == 0 {
        return out;
    }
    for k in 1..=count {
        let i = idx[k * idx.len() / (count + 1)];
        out.samples[i].range = range_mm;
    }
    out
}

/// Sprinkles single-sample ghost echoes at random positions.
pub fn random_spikes(scan: &RangeScan, probability: f64, seed: u64) -> RangeScan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = scan.clone();
    for s in &mut out.samples {
        if rng.random_bool(probability) {
            s.range = rng.random_range(100.0..1900.0);
        }
    }
    out
}
