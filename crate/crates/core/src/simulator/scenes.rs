//! Seeded scene generators with geometric ground truth: evaluation corpora
//! for base points and tracker capture, and the reference driving roads.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::camera::{render_camera, CameraModel, NoiseModel, PixelLabel, RenderedFrame};
use super::road::{RoadModel, RoadSpec, RoadStart, Segment};
use super::vehicle::VehicleState;
use crate::imagecore::BinaryImage;
use crate::perception::LanePixelCluster;

pub const LANE_WIDTH: f64 = 0.5;
pub const LINE_THICKNESS: f64 = 0.02;

pub fn straight_road(length: f64) -> RoadModel {
    road(vec![Segment::Straight { length }])
}

fn road(segments: Vec<Segment>) -> RoadModel {
    RoadModel::new(RoadSpec { start: RoadStart::default(), segments, lane_width: LANE_WIDTH, line_thickness: LINE_THICKNESS })
        .expect("built-in road is valid")
}

/// Curve–straight–curve track: lead-in, left quarter turn, long straight,
/// right quarter turn, run-out. Long enough for 50 s at 0.5 m/s.
pub fn s_curve_road() -> RoadModel {
    road(s_curve_segments())
}

pub fn s_curve_segments() -> Vec<Segment> {
    vec![
        Segment::Straight { length: 1.5 },
        Segment::Arc { radius: 2.0, angle: FRAC_PI_2 },
        Segment::Straight { length: 12.0 },
        Segment::Arc { radius: 2.0, angle: -FRAC_PI_2 },
        Segment::Straight { length: 8.0 },
    ]
}

/// Arclength interval of the long straight on [`s_curve_road`].
pub fn s_curve_straight() -> (f64, f64) {
    let s0 = 1.5 + 2.0 * FRAC_PI_2;
    (s0, s0 + 12.0)
}

/// What a perfect perception stack should report for one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameTruth {
    /// Mean column of each clean line's pixels inside the histogram band.
    pub left_base: Option<f64>,
    pub right_base: Option<f64>,
    /// Centerline crossing of the bottom row relative to frame center, px.
    pub distance_error: f64,
    /// Centerline direction at that crossing, degrees (positive bends right).
    pub alpha_deg: f64,
}

/// Geometric truth of a rendered frame.
pub fn frame_truth(road: &RoadModel, s: &VehicleState, cam: &CameraModel, labels: &[PixelLabel], row_fraction: f64) -> FrameTruth {
    let (w, h) = (cam.image_width, cam.image_height);
    let band = ((h as f64 * row_fraction).ceil() as usize).clamp(1, h);
    let base = |label| {
        let (mut sum, mut n) = (0.0, 0usize);
        for y in h - band..h {
            for x in 0..w {
                if labels[y * w + x] == label {
                    sum += x as f64;
                    n += 1;
                }
            }
        }
        (n > 0).then(|| sum / n as f64)
    };
    let (distance_error, alpha_deg) = expected_feedback(road, s, cam);
    FrameTruth { left_base: base(PixelLabel::LeftLine), right_base: base(PixelLabel::RightLine), distance_error, alpha_deg }
}

/// Distance and angle error read straight off the road geometry: the
/// centerline point lying on the vehicle's lateral axis (the image's bottom
/// row) and the tangent direction there.
pub fn expected_feedback(road: &RoadModel, s: &VehicleState, cam: &CameraModel) -> (f64, f64) {
    let (fx, fy) = s.forward();
    let (rx, ry) = s.right();
    let ahead = |arc: f64| {
        let p = road.road_pose_clamped(arc);
        (p.x - s.x) * fx + (p.y - s.y) * fy
    };
    let s0 = road.nearest_arclength(s.x, s.y);
    let (mut lo, mut hi) = ((s0 - 0.5).max(0.0), (s0 + 0.5).min(road.total_length()));
    // `ahead` increases with arclength near the vehicle; bisect for its root
    if ahead(lo) <= 0.0 && ahead(hi) >= 0.0 {
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if ahead(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    } else {
        lo = s0;
    }
    let p = road.road_pose_clamped(lo);
    let right = (p.x - s.x) * rx + (p.y - s.y) * ry;
    let alpha = super::vehicle::wrap_angle(s.heading - p.tangent).to_degrees();
    (right * cam.px_per_m(), alpha)
}

/// A rendered frame together with its geometry.
#[derive(Debug, Clone)]
pub struct Scene {
    pub road: RoadModel,
    pub state: VehicleState,
    pub frame: RenderedFrame,
}

impl Scene {
    pub fn truth(&self, cam: &CameraModel, row_fraction: f64) -> FrameTruth {
        frame_truth(&self.road, &self.state, cam, &self.frame.labels, row_fraction)
    }

    pub fn truth_mask(&self, label: PixelLabel) -> BinaryImage {
        self.frame.truth(label)
    }
}

/// Fraction of a lane's clean pixels present in `cluster`.
pub fn capture_fraction(cluster: &LanePixelCluster, truth: &BinaryImage) -> f64 {
    let total = truth.count_true();
    if total == 0 {
        return 1.0;
    }
    let hit = cluster.points.iter().filter(|&&(x, y)| truth.get(x, y)).count();
    hit as f64 / total as f64
}

/// Capture over both lanes, weighted by pixel count.
pub fn combined_capture(left: &LanePixelCluster, right: &LanePixelCluster, truth_left: &BinaryImage, truth_right: &BinaryImage) -> f64 {
    let total = truth_left.count_true() + truth_right.count_true();
    if total == 0 {
        return 1.0;
    }
    let hits = |c: &LanePixelCluster, t: &BinaryImage| c.points.iter().filter(|&&(x, y)| t.get(x, y)).count();
    (hits(left, truth_left) + hits(right, truth_right)) as f64 / total as f64
}

fn scene_at<R: Rng>(road: RoadModel, arclength: f64, offset: f64, heading: f64, cam: &CameraModel, noise: &NoiseModel, rng: &mut R) -> Scene {
    let state = road.vehicle_at(arclength, offset, heading, 0.5).expect("arclength inside road");
    let frame = render_camera(&road, &state, cam, noise, rng);
    Scene { road, state, frame }
}

/// Two-lane frames on straight roads and gentle arcs with small pose
/// perturbations; `salt_prob` noise.
pub fn base_point_corpus(n: usize, seed: u64, salt_prob: f64) -> Vec<Scene> {
    let cam = CameraModel::default();
    let noise = NoiseModel { salt_prob, rng_seed: seed, ..NoiseModel::noiseless() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let segments = if rng.random_bool(0.5) {
                vec![Segment::Straight { length: 3.0 }]
            } else {
                let radius = rng.random_range(3.0..8.0);
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                vec![Segment::Straight { length: 0.5 }, Segment::Arc { radius, angle: sign * 2.5 / radius }]
            };
            let offset = rng.random_range(-0.06..0.06);
            let heading = rng.random_range(-4f64..4.0).to_radians();
            scene_at(road(segments), 0.6, offset, heading, &cam, &noise, &mut rng)
        })
        .collect()
}

/// Straight-road frames with small pose perturbations and mild salt noise.
pub fn straight_corpus(n: usize, seed: u64) -> Vec<Scene> {
    let cam = CameraModel::default();
    let noise = NoiseModel { salt_prob: 0.001, rng_seed: seed, ..NoiseModel::noiseless() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let offset = rng.random_range(-0.05..0.05);
            let heading = rng.random_range(-5f64..5.0).to_radians();
            scene_at(straight_road(3.0), 1.0, offset, heading, &cam, &noise, &mut rng)
        })
        .collect()
}

fn touches_side(frame: &RenderedFrame, w: usize, h: usize) -> bool {
    (0..h).any(|y| frame.labels[y * w] != PixelLabel::Background || frame.labels[y * w + w - 1] != PixelLabel::Background)
}

/// Sharp arcs entered right at the vehicle, tight enough that at least one
/// lane line leaves the image through a side edge. Mild salt noise.
pub fn sharp_curve_corpus(n: usize, seed: u64) -> Vec<Scene> {
    curve_corpus(n, seed, 0.55..0.9, true)
}

/// Arcs gentle enough that both lines run off the top edge.
pub fn moderate_curve_corpus(n: usize, seed: u64) -> Vec<Scene> {
    curve_corpus(n, seed, 2.0..4.0, false)
}

fn curve_corpus(n: usize, seed: u64, radii: std::ops::Range<f64>, need_side_exit: bool) -> Vec<Scene> {
    let cam = CameraModel::default();
    let noise = NoiseModel { salt_prob: 0.001, rng_seed: seed, ..NoiseModel::noiseless() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let radius = rng.random_range(radii.clone());
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let lead = 0.3;
        let segments = vec![Segment::Straight { length: lead }, Segment::Arc { radius, angle: sign * FRAC_PI_2 }];
        let at = lead + rng.random_range(-0.05..0.1);
        let offset = rng.random_range(-0.03..0.03);
        let heading = rng.random_range(-2f64..2.0).to_radians();
        let scene = scene_at(road(segments), at, offset, heading, &cam, &noise, &mut rng);
        if touches_side(&scene.frame, cam.image_width, cam.image_height) == need_side_exit {
            out.push(scene);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_truth_is_zero() {
        let road = straight_road(3.0);
        let cam = CameraModel::default();
        let s = road.vehicle_at(1.0, 0.0, 0.0, 0.5).unwrap();
        let (e, a) = expected_feedback(&road, &s, &cam);
        assert!(e.abs() < 1e-9 && a.abs() < 1e-9);
    }

    #[test]
    fn offset_truth_scales() {
        let road = straight_road(3.0);
        let cam = CameraModel::default();
        let s = road.vehicle_at(1.0, 0.05, 0.0, 0.5).unwrap();
        let (e, _) = expected_feedback(&road, &s, &cam);
        assert!((e - 20.0).abs() < 1e-6, "{e}");
    }

    #[test]
    fn heading_truth_matches_rotation() {
        let road = straight_road(3.0);
        let cam = CameraModel::default();
        let s = road.vehicle_at(1.0, 0.0, 0.1, 0.5).unwrap();
        let (_, a) = expected_feedback(&road, &s, &cam);
        assert!((a - 0.1f64.to_degrees()).abs() < 1e-6);
    }

    #[test]
    fn sharp_corpus_exits_sideways() {
        let cam = CameraModel::default();
        for sc in sharp_curve_corpus(5, 3) {
            assert!(touches_side(&sc.frame, cam.image_width, cam.image_height));
        }
    }

    #[test]
    fn s_curve_is_long_enough() {
        assert!(s_curve_road().total_length() > 25.0 + 1.0);
    }
}
