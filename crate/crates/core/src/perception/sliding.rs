//! Classical stacked sliding-window baseline: fixed horizontal strips, each
//! window recentered on the x-mean of the window below it.

use serde::{Deserialize, Serialize};

use super::{LanePixelCluster, LaneSide};
use crate::imagecore::BinaryImage;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlidingWindowConfig {
    /// Full window width in pixels.
    pub window_width: usize,
    pub n_windows: usize,
}

impl Default for SlidingWindowConfig {
    fn default() -> Self {
        SlidingWindowConfig { window_width: 40, n_windows: 9 }
    }
}

/// Column span `[lo, hi]` of a window centred at `xc`, clipped to the image.
pub(crate) fn window_columns(xc: f64, window_width: usize, img_width: usize) -> Option<(usize, usize)> {
    let half = window_width as f64 / 2.0;
    let lo = (xc - half).round().max(0.0);
    let hi = (xc + half).round().min(img_width as f64 - 1.0);
    (lo <= hi).then_some((lo as usize, hi as usize))
}

pub fn sliding_window_track(
    img: &BinaryImage,
    base: usize,
    side: LaneSide,
    cfg: &SlidingWindowConfig,
) -> LanePixelCluster {
    let h = img.height();
    let n = cfg.n_windows.max(1);
    let strip = h.div_ceil(n);
    let mut xc = base as f64;
    let mut points = Vec::new();

    for k in 0..n {
        let y_hi = h.saturating_sub(k * strip);
        let y_lo = h.saturating_sub((k + 1) * strip);
        if y_hi == 0 {
            break;
        }
        let Some((x_lo, x_hi)) = window_columns(xc, cfg.window_width, img.width()) else {
            continue;
        };
        let (mut sum, mut count) = (0.0, 0usize);
        for y in y_lo..y_hi {
            for x in x_lo..=x_hi {
                if img.get(x, y) {
                    points.push((x, y));
                    sum += x as f64;
                    count += 1;
                }
            }
        }
        if count > 0 {
            xc = sum / count as f64;
        }
    }
    LanePixelCluster { side, points }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertical_line_fully_captured() {
        let mut img = BinaryImage::new(80, 90).unwrap();
        for y in 0..90 {
            for x in 38..=42 {
                img.set(x, y, true);
            }
        }
        let c = sliding_window_track(&img, 40, LaneSide::Left, &SlidingWindowConfig::default());
        assert_eq!(c.len(), img.count_true());
    }

    #[test]
    fn sideways_exit_leaves_upper_windows_empty() {
        // lane runs up to row 50, then turns horizontal to the left edge
        let (w, h) = (200, 120);
        let mut img = BinaryImage::new(w, h).unwrap();
        for y in 50..h {
            img.set(150, y, true);
        }
        for x in 0..=150 {
            img.set(x, 50, true);
        }
        let cfg = SlidingWindowConfig { window_width: 20, n_windows: 6 };
        let c = sliding_window_track(&img, 150, LaneSide::Left, &cfg);
        assert!(c.points.iter().all(|&(_, y)| y >= 40));
        assert!(c.len() < img.count_true() / 2);
    }
}
