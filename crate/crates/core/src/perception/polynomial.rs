use serde::{Deserialize, Serialize};

use super::{LanePixelCluster, PerceptionError};
use crate::linalg::least_squares;

/// Quadratic lane curve `x(y) = c2·y² + c1·y + c0` in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LanePolynomial {
    /// `[c0, c1, c2]`
    pub coefficients: [f64; 3],
    /// Rows `(y_min, y_max)` the fit is supported on.
    pub valid_y_range: (f64, f64),
}

impl LanePolynomial {
    pub fn new(coefficients: [f64; 3], valid_y_range: (f64, f64)) -> Self {
        LanePolynomial { coefficients, valid_y_range }
    }

    pub fn constant(x: f64, valid_y_range: (f64, f64)) -> Self {
        Self::new([x, 0.0, 0.0], valid_y_range)
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        let [c0, c1, c2] = self.coefficients;
        (c2 * y + c1) * y + c0
    }

    /// `dx/dy`
    #[inline]
    pub fn slope(&self, y: f64) -> f64 {
        self.coefficients[1] + 2.0 * self.coefficients[2] * y
    }

    /// Bottommost supported row (closest to the vehicle).
    pub fn bottom_y(&self) -> f64 {
        self.valid_y_range.1
    }

    pub fn residual_sum_squares(&self, points: &[(usize, usize)]) -> f64 {
        points.iter().map(|&(x, y)| (x as f64 - self.eval(y as f64)).powi(2)).sum()
    }
}

/// Least-squares fit of `x` as a quadratic in `y`.
///
/// Rows are centred and scaled before a Householder QR solve, then the
/// coefficients are mapped back to raw pixel rows.
pub fn fit_polynomial(cluster: &LanePixelCluster) -> Result<LanePolynomial, PerceptionError> {
    let samples: Vec<(f64, f64)> = cluster.points.iter().map(|&(x, y)| (x as f64, y as f64)).collect();
    fit_samples(&samples)
}

/// Same fit over real-valued `(x, y)` samples.
pub fn fit_samples(points: &[(f64, f64)]) -> Result<LanePolynomial, PerceptionError> {
    let mut distinct_y: Vec<f64> = points.iter().map(|p| p.1).collect();
    distinct_y.sort_unstable_by(f64::total_cmp);
    distinct_y.dedup();
    if points.len() < 3 || distinct_y.len() < 3 {
        return Err(PerceptionError::InsufficientPoints { points: points.len(), distinct_rows: distinct_y.len() });
    }
    let y_min = *distinct_y.first().unwrap();
    let y_max = *distinct_y.last().unwrap();
    let center = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
    let scale = (y_max - center).abs().max((center - y_min).abs()).max(1.0);

    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|&(_, y)| {
            let t = (y - center) / scale;
            vec![1.0, t, t * t]
        })
        .collect();
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let a = least_squares(&rows, &xs, 3)
        .ok_or(PerceptionError::InsufficientPoints { points: points.len(), distinct_rows: distinct_y.len() })?;

    let (s, m) = (scale, center);
    let c2 = a[2] / (s * s);
    let c1 = a[1] / s - 2.0 * a[2] * m / (s * s);
    let c0 = a[0] - a[1] * m / s + a[2] * m * m / (s * s);
    Ok(LanePolynomial::new([c0, c1, c2], (y_min, y_max)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LanesSeen {
    Both,
    LeftOnly,
    RightOnly,
}

impl LanesSeen {
    pub fn as_str(&self) -> &'static str {
        match self {
            LanesSeen::Both => "both",
            LanesSeen::LeftOnly => "left",
            LanesSeen::RightOnly => "right",
        }
    }
}

/// Midline estimate between the two lane curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealPath {
    pub polynomial: LanePolynomial,
    pub lanes_seen: LanesSeen,
}

/// Averages both lanes, or shifts the single visible lane by half a lane width.
pub fn ideal_path(
    left: Option<&LanePolynomial>,
    right: Option<&LanePolynomial>,
    lane_width_px: f64,
) -> Result<IdealPath, PerceptionError> {
    match (left, right) {
        (Some(l), Some(r)) => {
            let mut c = [0.0; 3];
            for (i, v) in c.iter_mut().enumerate() {
                *v = 0.5 * (l.coefficients[i] + r.coefficients[i]);
            }
            let range = (l.valid_y_range.0.min(r.valid_y_range.0), l.valid_y_range.1.max(r.valid_y_range.1));
            Ok(IdealPath { polynomial: LanePolynomial::new(c, range), lanes_seen: LanesSeen::Both })
        }
        (Some(l), None) => {
            let mut p = *l;
            p.coefficients[0] += lane_width_px / 2.0;
            Ok(IdealPath { polynomial: p, lanes_seen: LanesSeen::LeftOnly })
        }
        (None, Some(r)) => {
            let mut p = *r;
            p.coefficients[0] -= lane_width_px / 2.0;
            Ok(IdealPath { polynomial: p, lanes_seen: LanesSeen::RightOnly })
        }
        (None, None) => Err(PerceptionError::NoLanesVisible),
    }
}
