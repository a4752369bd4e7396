//! Side range scans: spike interpolation and free-space detection.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::ParkingError;

/// Reading meaning "no echo within reach", mm.
pub const OUT_OF_RANGE_MM: f64 = 2000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeSample {
    #[serde(rename = "odometry_m")]
    pub odometry_s: f64,
    #[serde(rename = "range_mm")]
    pub range: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RangeScan {
    pub samples: Vec<RangeSample>,
}

impl RangeScan {
    /// Checks ordering and that every range lies in `(0, 2000]`.
    pub fn new(samples: Vec<RangeSample>) -> Result<Self, ParkingError> {
        for (i, s) in samples.iter().enumerate() {
            if !(s.range > 0.0 && s.range <= OUT_OF_RANGE_MM) || !s.odometry_s.is_finite() {
                return Err(ParkingError::InvalidInput(format!("sample {i}: range {} outside (0, 2000]", s.range)));
            }
            if i > 0 && s.odometry_s < samples[i - 1].odometry_s {
                return Err(ParkingError::InvalidInput(format!("sample {i}: odometry decreases")));
            }
        }
        Ok(RangeScan { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn ranges(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.range).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), ParkingError> {
        let mut wr = csv::Writer::from_writer(w);
        for s in &self.samples {
            wr.serialize(s).map_err(|e| ParkingError::Io(e.to_string()))?;
        }
        wr.flush().map_err(|e| ParkingError::Io(e.to_string()))
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, ParkingError> {
        let mut rd = csv::Reader::from_reader(r);
        let samples = rd
            .deserialize()
            .collect::<Result<Vec<RangeSample>, _>>()
            .map_err(|e| ParkingError::InvalidInput(format!("scan csv: {e}")))?;
        RangeScan::new(samples)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InterpolationConfig {
    /// mm
    pub spike_threshold: f64,
    pub max_spike_run: usize,
}

impl Default for InterpolationConfig {
    fn default() -> Self {
        InterpolationConfig { spike_threshold: 300.0, max_spike_run: 2 }
    }
}

/// Plateaus: maximal index ranges whose consecutive ranges differ by at most
/// `threshold`.
fn plateaus(r: &[f64], threshold: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..r.len() {
        if (r[i] - r[i - 1]).abs() > threshold {
            out.push((start, i - 1));
            start = i;
        }
    }
    if !r.is_empty() {
        out.push((start, r.len() - 1));
    }
    out
}

/// First plateau that qualifies as a spike: interior, at most `max_run`
/// long, every sample more than `threshold` away from both flanking
/// samples, and the flanks within `threshold` of each other.
fn first_spike(r: &[f64], cfg: &InterpolationConfig) -> Option<(usize, usize)> {
    plateaus(r, cfg.spike_threshold).into_iter().find(|&(i, j)| {
        if i == 0 || j + 1 >= r.len() || j + 1 - i > cfg.max_spike_run {
            return false;
        }
        let (lf, rf) = (r[i - 1], r[j + 1]);
        (lf - rf).abs() <= cfg.spike_threshold
            && r[i..=j].iter().all(|&v| (v - lf).abs() > cfg.spike_threshold && (v - rf).abs() > cfg.spike_threshold)
    })
}

/// Replaces short excursions by linear interpolation (in odometry) between
/// their flanking samples, one at a time until none remain.
///
/// Each replacement merges the excursion with both neighbouring plateaus,
/// so the loop ends after at most `n / 2` rounds and the result is a fixed
/// point: running it again changes nothing. Runs longer than
/// `max_spike_run` are kept as real obstacles.
pub fn interpolate_scan_with(scan: &RangeScan, cfg: &InterpolationConfig) -> RangeScan {
    let mut r = scan.ranges();
    let s: Vec<f64> = scan.samples.iter().map(|x| x.odometry_s).collect();
    while let Some((i, j)) = first_spike(&r, cfg) {
        let (s0, s1) = (s[i - 1], s[j + 1]);
        let (r0, r1) = (r[i - 1], r[j + 1]);
        for k in i..=j {
            let t = if s1 > s0 { (s[k] - s0) / (s1 - s0) } else { (k - i + 1) as f64 / (j - i + 2) as f64 };
            r[k] = r0 + t * (r1 - r0);
        }
    }
    RangeScan {
        samples: s.iter().zip(&r).map(|(&odometry_s, &range)| RangeSample { odometry_s, range }).collect(),
    }
}

pub fn interpolate_scan(scan: &RangeScan, max_spike_run: usize) -> RangeScan {
    interpolate_scan_with(scan, &InterpolationConfig { max_spike_run, ..Default::default() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParkingSpace {
    /// odometry of the first free sample, m
    pub start_s: f64,
    /// odometry of the last free sample, m
    pub end_s: f64,
    /// smallest range inside the gap, m (at most the sensor reach)
    pub depth: f64,
}

impl ParkingSpace {
    pub fn length(&self) -> f64 {
        self.end_s - self.start_s
    }
}

/// First maximal run of samples at least `min_depth_mm` deep spanning at
/// least `min_length` of odometry.
pub fn detect_space(scan: &RangeScan, min_length: f64, min_depth_mm: f64) -> Option<ParkingSpace> {
    let smp = &scan.samples;
    let mut i = 0;
    while i < smp.len() {
        if smp[i].range < min_depth_mm {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < smp.len() && smp[j + 1].range >= min_depth_mm {
            j += 1;
        }
        let (start_s, end_s) = (smp[i].odometry_s, smp[j].odometry_s);
        if end_s > start_s && end_s - start_s >= min_length {
            let depth = smp[i..=j].iter().map(|x| x.range).fold(OUT_OF_RANGE_MM, f64::min);
            return Some(ParkingSpace { start_s, end_s, depth: depth / 1000.0 });
        }
        i = j + 1;
    }
    None
}
