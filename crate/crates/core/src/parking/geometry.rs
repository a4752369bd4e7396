//! Vehicle footprints and axis-aligned obstacles.

use serde::{Deserialize, Serialize};

use crate::simulator::VehicleState;

/// Axis-aligned rectangle in the road frame, metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Rect { x_min, x_max, y_min, y_max }
    }

    pub fn is_valid(&self) -> bool {
        self.x_min < self.x_max && self.y_min < self.y_max && [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite())
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }

    /// Grown by `m` on every side.
    pub fn inflate(&self, m: f64) -> Rect {
        Rect::new(self.x_min - m, self.x_max + m, self.y_min - m, self.y_max + m)
    }

    fn corners(&self) -> [(f64, f64); 4] {
        [(self.x_min, self.y_min), (self.x_max, self.y_min), (self.x_max, self.y_max), (self.x_min, self.y_max)]
    }
}

/// Vehicle outline relative to the rear-axle reference point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Footprint {
    pub length: f64,
    pub width: f64,
    /// distance from the reference point back to the rear bumper
    pub rear_overhang: f64,
}

impl Footprint {
    /// Rectangle centred on the reference point.
    pub fn centered(length: f64, width: f64) -> Self {
        Footprint { length, width, rear_overhang: length / 2.0 }
    }

    /// Corners in the world frame: rear-right, front-right, front-left, rear-left.
    pub fn corners(&self, pose: &VehicleState) -> [(f64, f64); 4] {
        let (c, s) = (pose.heading.cos(), pose.heading.sin());
        let back = -self.rear_overhang;
        let front = self.length - self.rear_overhang;
        let hw = self.width / 2.0;
        [(back, -hw), (front, -hw), (front, hw), (back, hw)].map(|(u, v)| (pose.x + u * c - v * s, pose.y + u * s + v * c))
    }

    /// Whether the world point lies inside (or on) the footprint.
    pub fn contains(&self, pose: &VehicleState, x: f64, y: f64) -> bool {
        let (dx, dy) = (x - pose.x, y - pose.y);
        let (c, s) = (pose.heading.cos(), pose.heading.sin());
        let u = dx * c + dy * s;
        let v = -dx * s + dy * c;
        u >= -self.rear_overhang && u <= self.length - self.rear_overhang && v.abs() <= self.width / 2.0
    }
}

fn project(points: &[(f64, f64)], axis: (f64, f64)) -> (f64, f64) {
    points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let d = p.0 * axis.0 + p.1 * axis.1;
        (lo.min(d), hi.max(d))
    })
}

/// Largest gap between the two shapes' projections over the four
/// separating-axis candidates. Positive means separated by at least that
/// much along some axis; negative is the smallest penetration depth.
pub fn separation(pose: &VehicleState, fp: &Footprint, rect: &Rect) -> f64 {
    let a = fp.corners(pose);
    let b = rect.corners();
    let (c, s) = (pose.heading.cos(), pose.heading.sin());
    [(1.0, 0.0), (0.0, 1.0), (c, s), (-s, c)]
        .into_iter()
        .map(|axis| {
            let (alo, ahi) = project(&a, axis);
            let (blo, bhi) = project(&b, axis);
            (blo - ahi).max(alo - bhi)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Separating-axis overlap test; shapes that merely touch do not collide.
pub fn check_collision(pose: &VehicleState, fp: &Footprint, obstacles: &[Rect]) -> bool {
    obstacles.iter().any(|r| separation(pose, fp, r) < 0.0)
}
