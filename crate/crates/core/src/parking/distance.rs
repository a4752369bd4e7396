//! Sign-height range model `h(d) = a/d + b`.

use serde::{Deserialize, Serialize};

use super::ParkingError;
use crate::linalg::least_squares;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignHeightSample {
    /// px
    pub pixel_height: f64,
    /// m
    pub true_distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceModel {
    /// px·m
    pub a: f64,
    /// px
    pub b: f64,
    /// Distances covered by the fitting samples, m.
    pub fitted_range: (f64, f64),
}

impl DistanceModel {
    /// Apparent height at distance `d`.
    pub fn height_at(&self, d: f64) -> f64 {
        self.a / d + self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    pub distance: f64,
    /// Set when the raw inversion fell outside `fitted_range` and was clamped.
    pub range_clamped: bool,
}

/// Least-squares fit, linear in `(1/d, 1)`.
pub fn fit_sign_distance_model(samples: &[SignHeightSample]) -> Result<DistanceModel, ParkingError> {
    if samples.iter().any(|s| !(s.pixel_height > 0.0 && s.true_distance > 0.0) || !s.pixel_height.is_finite() || !s.true_distance.is_finite()) {
        return Err(ParkingError::InvalidInput("sign samples need positive finite height and distance".into()));
    }
    let mut distinct: Vec<f64> = samples.iter().map(|s| s.true_distance).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if samples.len() < 3 || distinct.len() < 3 {
        return Err(ParkingError::DegenerateSamples { samples: samples.len(), distinct: distinct.len() });
    }
    let rows: Vec<Vec<f64>> = samples.iter().map(|s| vec![1.0 / s.true_distance, 1.0]).collect();
    let rhs: Vec<f64> = samples.iter().map(|s| s.pixel_height).collect();
    let x = least_squares(&rows, &rhs, 2)
        .ok_or(ParkingError::DegenerateSamples { samples: samples.len(), distinct: distinct.len() })?;
    if !(x[0] > 0.0) {
        return Err(ParkingError::DegenerateSamples { samples: samples.len(), distinct: distinct.len() });
    }
    Ok(DistanceModel { a: x[0], b: x[1], fitted_range: (distinct[0], distinct[distinct.len() - 1]) })
}

/// Inverts the model: `d = a / (h − b)`, clamped to the fitted range.
pub fn estimate_distance(m: &DistanceModel, pixel_height: f64) -> Result<DistanceEstimate, ParkingError> {
    if !(pixel_height > m.b) {
        return Err(ParkingError::HeightBelowAsymptote { height: pixel_height, asymptote: m.b });
    }
    let raw = m.a / (pixel_height - m.b);
    let (lo, hi) = m.fitted_range;
    let distance = raw.clamp(lo, hi);
    Ok(DistanceEstimate { distance, range_clamped: distance != raw })
}
