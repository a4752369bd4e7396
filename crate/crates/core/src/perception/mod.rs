//! Lane perception: histogram base points, ribbon density tracking, the
//! sliding-window baseline, quadratic fits and the controller's error signals.

mod feedback;
mod histogram;
mod polynomial;
mod ribbon;
mod sliding;

pub use feedback::{extract_feedback, FeedbackSample, ALPHA_LIMIT_DEG};
pub use histogram::{
    box_kernel, column_histogram, convolve_histogram, find_base_points, BasePoints, Histogram, SplitStrategy,
};
pub use polynomial::{fit_polynomial, fit_samples, ideal_path, IdealPath, LanePolynomial, LanesSeen};
pub use ribbon::{
    ribbon_step, ribbon_step_masked, track_lane, track_lane_claimed, ClaimMask, LanePixelCluster, LaneSide,
    RibbonConfig, RibbonStep, TrackResult, TrackStop,
};
pub use sliding::{sliding_window_track, SlidingWindowConfig};

use serde::{Deserialize, Serialize};

use crate::imagecore::BinaryImage;

#[derive(Debug, thiserror::Error)]
pub enum PerceptionError {
    #[error("kernel length must be odd and at least 1, got {0}")]
    EvenKernel(usize),
    #[error("polynomial fit needs 3 points on 3 distinct rows, got {points} points on {distinct_rows} rows")]
    InsufficientPoints { points: usize, distinct_rows: usize },
    #[error("no lane visible")]
    NoLanesVisible,
    #[error("invalid perception config: {0}")]
    InvalidConfig(String),
}

/// Parameters of the full single-frame pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PerceptionConfig {
    /// Fraction of rows, counted from the bottom, entering the histogram.
    pub row_fraction: f64,
    /// Width of the box smoothing kernel (odd).
    pub kernel_width: usize,
    pub split: SplitStrategy,
    pub ribbon: RibbonConfig,
    pub sliding: SlidingWindowConfig,
    /// Nominal lane width used for the single-lane bias, pixels.
    pub lane_width_px: f64,
    /// Clusters smaller than this are treated as a missing lane.
    pub min_cluster_pixels: usize,
}

impl Default for PerceptionConfig {
    fn default() -> Self {
        PerceptionConfig {
            row_fraction: 1.0 / 3.0,
            kernel_width: 15,
            split: SplitStrategy::AtMidpoint,
            ribbon: RibbonConfig::default(),
            sliding: SlidingWindowConfig::default(),
            lane_width_px: 200.0,
            min_cluster_pixels: 40,
        }
    }
}

impl PerceptionConfig {
    pub fn validate(&self) -> Result<(), PerceptionError> {
        if !(self.row_fraction > 0.0 && self.row_fraction <= 1.0) {
            return Err(PerceptionError::InvalidConfig("row_fraction must lie in (0, 1]".into()));
        }
        if self.kernel_width.is_multiple_of(2) {
            return Err(PerceptionError::EvenKernel(self.kernel_width));
        }
        if !(self.lane_width_px > 0.0) {
            return Err(PerceptionError::InvalidConfig("lane_width_px must be positive".into()));
        }
        if self.sliding.n_windows == 0 || self.sliding.window_width == 0 {
            return Err(PerceptionError::InvalidConfig("sliding window needs n_windows >= 1 and width >= 1".into()));
        }
        self.ribbon.validate()
    }
}

/// Everything the pipeline learned from one frame.
#[derive(Debug, Clone)]
pub struct FrameAnalysis {
    pub base: BasePoints,
    pub left: Option<LanePixelCluster>,
    pub right: Option<LanePixelCluster>,
    pub left_fit: Option<LanePolynomial>,
    pub right_fit: Option<LanePolynomial>,
    pub ideal: Option<IdealPath>,
    pub feedback: Option<FeedbackSample>,
}

/// Histogram → base points → ribbon tracking (left, then right, sharing a
/// claim mask) → fits → ideal path → feedback.
pub fn analyze_frame(img: &BinaryImage, cfg: &PerceptionConfig) -> Result<FrameAnalysis, PerceptionError> {
    let hist = column_histogram(img, cfg.row_fraction);
    let smooth = convolve_histogram(&hist, &box_kernel(cfg.kernel_width))?;
    let base = find_base_points(&smooth, cfg.split);

    let mut claims = ClaimMask::for_image(img);
    let mut track = |col: Option<usize>, side| {
        col.map(|b| track_lane_claimed(img, b, side, &cfg.ribbon, &mut claims).cluster)
    };
    let left = track(base.left, LaneSide::Left);
    let right = track(base.right, LaneSide::Right);

    let fit = |c: &Option<LanePixelCluster>| {
        c.as_ref().filter(|c| c.len() >= cfg.min_cluster_pixels).and_then(|c| fit_polynomial(c).ok())
    };
    let left_fit = fit(&left);
    let right_fit = fit(&right);
    let ideal = ideal_path(left_fit.as_ref(), right_fit.as_ref(), cfg.lane_width_px).ok();
    let feedback = ideal.as_ref().map(|p| extract_feedback(p, img.width()));
    Ok(FrameAnalysis { base, left, right, left_fit, right_fit, ideal, feedback })
}
