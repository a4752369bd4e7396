use serde::{Deserialize, Serialize};

use super::{IdealPath, LanesSeen};

/// Largest |α| ever reported, in degrees.
pub const ALPHA_LIMIT_DEG: f64 = 85.0;

/// The two error signals read off the ideal path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedbackSample {
    /// Pixels; positive when the path's bottom point lies right of frame center.
    pub distance_error: f64,
    /// Degrees; positive when the path bends rightward going up-image.
    pub angle_error_alpha: f64,
    pub lanes_seen: LanesSeen,
}

/// Reads distance and angle error at the bottommost supported row.
///
/// Rows grow downward while "ahead" is up-image, so the heading of the path
/// relative to the image vertical is `atan(−dx/dy)`.
pub fn extract_feedback(ideal: &IdealPath, frame_width: usize) -> FeedbackSample {
    let p = &ideal.polynomial;
    let y_b = p.bottom_y();
    let distance_error = p.eval(y_b) - frame_width as f64 / 2.0;
    let alpha = (-p.slope(y_b)).atan().to_degrees();
    let alpha = if alpha.is_finite() { alpha.clamp(-ALPHA_LIMIT_DEG, ALPHA_LIMIT_DEG) } else { 0.0 };
    FeedbackSample { distance_error, angle_error_alpha: alpha, lanes_seen: ideal.lanes_seen }
}
