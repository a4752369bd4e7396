use serde::{Deserialize, Serialize};

use super::PerceptionError;
use crate::imagecore::BinaryImage;

/// Per-column lane-pixel counts (or their smoothed version after convolution).
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    bins: Vec<f64>,
}

impl Histogram {
    pub fn from_bins(bins: Vec<f64>) -> Self {
        Histogram { bins }
    }

    pub fn bins(&self) -> &[f64] {
        &self.bins
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }
}

/// Counts true pixels per column over the bottom `⌈row_fraction · height⌉` rows.
pub fn column_histogram(img: &BinaryImage, row_fraction: f64) -> Histogram {
    let h = img.height();
    let rows = ((row_fraction * h as f64).ceil().max(0.0) as usize).min(h);
    let mut bins = vec![0.0; img.width()];
    for y in h - rows..h {
        for (x, bin) in bins.iter_mut().enumerate() {
            if img.get(x, y) {
                *bin += 1.0;
            }
        }
    }
    Histogram { bins }
}

/// Same-length, zero-padded: `out[i] = Σ_j h[i + j − k] · kernel[j]` with `k = len/2`.
pub fn convolve_histogram(h: &Histogram, kernel: &[f64]) -> Result<Histogram, PerceptionError> {
    if kernel.is_empty() || kernel.len().is_multiple_of(2) {
        return Err(PerceptionError::EvenKernel(kernel.len()));
    }
    let k = kernel.len() / 2;
    let n = h.bins.len();
    let bins = (0..n)
        .map(|i| {
            let j_lo = k.saturating_sub(i);
            let j_hi = kernel.len().min(n + k - i);
            (j_lo..j_hi).map(|j| h.bins[i + j - k] * kernel[j]).sum()
        })
        .collect();
    Ok(Histogram { bins })
}

/// The "predefined filter": a box of ones.
pub fn box_kernel(width: usize) -> Vec<f64> {
    vec![1.0; width]
}

/// Where the histogram is divided into a left and a right search region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitStrategy {
    /// Split at the highest bin; the peak itself belongs to neither side.
    AtGlobalPeak,
    /// Split at `width / 2`; the middle column belongs to the right side.
    AtMidpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BasePoints {
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub split: usize,
}

/// Lowest index of the maximum over `range`; `None` when the maximum is not positive.
fn region_argmax(bins: &[f64], range: std::ops::Range<usize>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for i in range {
        let v = bins[i];
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.filter(|&(_, v)| v > 0.0).map(|(i, _)| i)
}

pub fn find_base_points(h: &Histogram, split: SplitStrategy) -> BasePoints {
    let n = h.bins.len();
    if n == 0 {
        return BasePoints { left: None, right: None, split: 0 };
    }
    match split {
        SplitStrategy::AtGlobalPeak => {
            let s = region_argmax(&h.bins, 0..n).unwrap_or(0);
            BasePoints {
                left: region_argmax(&h.bins, 0..s),
                right: region_argmax(&h.bins, (s + 1).min(n)..n),
                split: s,
            }
        }
        SplitStrategy::AtMidpoint => {
            let s = n / 2;
            BasePoints { left: region_argmax(&h.bins, 0..s), right: region_argmax(&h.bins, s..n), split: s }
        }
    }
}
