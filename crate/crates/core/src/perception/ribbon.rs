//! Ribbon density tracker.
//!
//! The agent is a capture square surrounded by a pear-shaped ring. Each step
//! the square claims the lane pixels it covers, and the forward-weighted
//! centroid of the still-unclaimed pixels in the ring places the next square.
//! Because claimed pixels disappear from later rings the agent keeps moving
//! into fresh territory, whichever direction the lane bends.

use serde::{Deserialize, Serialize};

use super::PerceptionError;
use crate::imagecore::BinaryImage;

/// Geometry of the tracking agent. Radii are in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RibbonConfig {
    pub square_half_width: f64,
    /// Semi-axis of the front (up-image) half of the pear.
    pub front_radius: f64,
    /// Semi-axis of the back (down-image) half.
    pub back_radius: f64,
    /// Shared lateral semi-axis of both halves.
    pub lateral_radius: f64,
    pub step_cap: f64,
    pub max_iterations: usize,
    pub min_ribbon_pixels: usize,
    /// Centroid weight of ring pixels ahead of the center.
    pub forward_weight: f64,
}

impl Default for RibbonConfig {
    fn default() -> Self {
        RibbonConfig {
            square_half_width: 6.0,
            front_radius: 20.0,
            back_radius: 10.0,
            lateral_radius: 14.0,
            step_cap: 8.0,
            max_iterations: 200,
            min_ribbon_pixels: 12,
            forward_weight: 2.0,
        }
    }
}

impl RibbonConfig {
    pub fn validate(&self) -> Result<(), PerceptionError> {
        let ok = self.front_radius >= self.lateral_radius
            && self.lateral_radius >= self.back_radius
            && self.back_radius > self.square_half_width
            && self.square_half_width >= 0.0
            && self.step_cap > 0.0
            && self.max_iterations >= 1
            && self.forward_weight >= 1.0
            && [self.front_radius, self.back_radius, self.lateral_radius, self.step_cap, self.forward_weight]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(PerceptionError::InvalidConfig(
                "ribbon requires front >= lateral >= back > square_half_width, step_cap > 0, \
                 max_iterations >= 1, forward_weight >= 1"
                    .into(),
            ))
        }
    }

    #[inline]
    pub(crate) fn in_square(&self, dx: f64, dy: f64) -> bool {
        dx.abs() <= self.square_half_width && dy.abs() <= self.square_half_width
    }

    /// Two half-ellipses sharing the lateral axis.
    #[inline]
    pub(crate) fn in_pear(&self, dx: f64, dy: f64) -> bool {
        let vertical = if dy < 0.0 { self.front_radius } else { self.back_radius };
        let u = dx / self.lateral_radius;
        let v = dy / vertical;
        u * u + v * v <= 1.0
    }
}

/// Pixels already assigned to a lane in the current frame.
#[derive(Debug, Clone)]
pub struct ClaimMask {
    width: usize,
    height: usize,
    claimed: Vec<bool>,
}

impl ClaimMask {
    pub fn new(width: usize, height: usize) -> Self {
        ClaimMask { width, height, claimed: vec![false; width * height] }
    }

    pub fn for_image(img: &BinaryImage) -> Self {
        Self::new(img.width(), img.height())
    }

    #[inline]
    pub fn is_claimed(&self, x: usize, y: usize) -> bool {
        self.claimed[y * self.width + x]
    }

    #[inline]
    pub fn claim(&mut self, x: usize, y: usize) {
        self.claimed[y * self.width + x] = true;
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RibbonStep {
    /// `None` means the ring held fewer than `min_ribbon_pixels` lane pixels.
    pub next_center: Option<(f64, f64)>,
    pub captured: Vec<(usize, usize)>,
    pub ribbon_pixels: usize,
}

/// One agent step on the raw image.
pub fn ribbon_step(img: &BinaryImage, center: (f64, f64), cfg: &RibbonConfig) -> RibbonStep {
    ribbon_step_masked(img, None, center, cfg)
}

/// One agent step treating pixels in `claims` as absent.
pub fn ribbon_step_masked(
    img: &BinaryImage,
    claims: Option<&ClaimMask>,
    center: (f64, f64),
    cfg: &RibbonConfig,
) -> RibbonStep {
    let (cx, cy) = center;
    let w = img.width() as i64;
    let h = img.height() as i64;
    let x_lo = ((cx - cfg.lateral_radius).floor() as i64).max(0);
    let x_hi = ((cx + cfg.lateral_radius).ceil() as i64).min(w - 1);
    let y_lo = ((cy - cfg.front_radius).floor() as i64).max(0);
    let y_hi = ((cy + cfg.back_radius).ceil() as i64).min(h - 1);

    let mut captured = Vec::new();
    let (mut sum_w, mut sum_x, mut sum_y) = (0.0, 0.0, 0.0);
    let mut ribbon_pixels = 0usize;

    for y in y_lo..=y_hi {
        for x in x_lo..=x_hi {
            let (ux, uy) = (x as usize, y as usize);
            if !img.get(ux, uy) || claims.is_some_and(|c| c.is_claimed(ux, uy)) {
                continue;
            }
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            if cfg.in_square(dx, dy) {
                captured.push((ux, uy));
            } else if cfg.in_pear(dx, dy) {
                let wgt = if (y as f64) < cy { cfg.forward_weight } else { 1.0 };
                sum_w += wgt;
                sum_x += wgt * x as f64;
                sum_y += wgt * y as f64;
                ribbon_pixels += 1;
            }
        }
    }

    let next_center = if ribbon_pixels < cfg.min_ribbon_pixels.max(1) {
        None
    } else {
        let (mx, my) = (sum_x / sum_w, sum_y / sum_w);
        let (mut dx, mut dy) = (mx - cx, my - cy);
        let d = dx.hypot(dy);
        if d > cfg.step_cap {
            dx *= cfg.step_cap / d;
            dy *= cfg.step_cap / d;
        }
        Some((cx + dx, cy + dy))
    };
    RibbonStep { next_center, captured, ribbon_pixels }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LaneSide {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanePixelCluster {
    pub side: LaneSide,
    pub points: Vec<(usize, usize)>,
}

impl LanePixelCluster {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Why a tracking run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackStop {
    SparseRibbon,
    LeftImage,
    Revisit,
    IterationCap,
}

#[derive(Debug, Clone)]
pub struct TrackResult {
    pub cluster: LanePixelCluster,
    pub centers: Vec<(f64, f64)>,
    pub stop: TrackStop,
}

/// Tracks one lane from its base column with a fresh claim mask.
pub fn track_lane(img: &BinaryImage, base: usize, side: LaneSide, cfg: &RibbonConfig) -> LanePixelCluster {
    let mut claims = ClaimMask::for_image(img);
    track_lane_claimed(img, base, side, cfg, &mut claims).cluster
}

/// Tracks one lane, skipping and then claiming pixels in the shared mask.
pub fn track_lane_claimed(
    img: &BinaryImage,
    base: usize,
    side: LaneSide,
    cfg: &RibbonConfig,
    claims: &mut ClaimMask,
) -> TrackResult {
    debug_assert_eq!(claims.dims(), (img.width(), img.height()));
    let (w, h) = (img.width() as f64, img.height() as f64);
    let start_y = (h - 1.0 - cfg.square_half_width).max(0.0);
    let mut center = ((base as f64).min(w - 1.0), start_y);
    let mut centers = vec![center];
    let mut points = Vec::new();
    let mut stop = TrackStop::IterationCap;

    for _ in 0..cfg.max_iterations {
        let step = ribbon_step_masked(img, Some(claims), center, cfg);
        for &(x, y) in &step.captured {
            claims.claim(x, y);
            points.push((x, y));
        }
        let Some(next) = step.next_center else {
            stop = TrackStop::SparseRibbon;
            break;
        };
        if next.0 < 0.0 || next.1 < 0.0 || next.0 > w - 1.0 || next.1 > h - 1.0 {
            stop = TrackStop::LeftImage;
            break;
        }
        if centers.iter().any(|c| (c.0 - next.0).hypot(c.1 - next.1) <= 1.0) {
            stop = TrackStop::Revisit;
            break;
        }
        centers.push(next);
        center = next;
    }
    TrackResult { cluster: LanePixelCluster { side, points }, centers, stop }
}
