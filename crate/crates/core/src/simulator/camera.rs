//! Synthetic bird's-eye camera: rasterizes both lane lines into the vehicle's
//! forward window, then applies seeded salt noise and line dropouts.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::road::RoadModel;
use super::vehicle::VehicleState;
use super::SimError;
use crate::imagecore::BinaryImage;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraModel {
    /// metres covered ahead of the vehicle (image height)
    pub view_length: f64,
    /// metres covered across (image width)
    pub view_width: f64,
    pub image_width: usize,
    pub image_height: usize,
}

impl Default for CameraModel {
    fn default() -> Self {
        CameraModel { view_length: 0.6, view_width: 1.0, image_width: 400, image_height: 240 }
    }
}

impl CameraModel {
    pub fn px_per_m(&self) -> f64 {
        self.image_width as f64 / self.view_width
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.image_width < 16 || self.image_height < 16 {
            return Err(SimError::InvalidCamera("image must be at least 16x16".into()));
        }
        if !(self.view_length > 0.0 && self.view_width > 0.0) {
            return Err(SimError::InvalidCamera("view dimensions must be positive".into()));
        }
        let sx = self.px_per_m();
        let sy = self.image_height as f64 / self.view_length;
        if ((sx - sy) / sx).abs() > 1e-6 {
            return Err(SimError::InvalidCamera(format!(
                "pixels must be square: {sx} px/m across vs {sy} px/m ahead"
            )));
        }
        Ok(())
    }

    /// Vehicle-frame `(forward, right)` metres of the pixel `(px, py)`.
    /// The bottom row passes through the vehicle reference point; column
    /// `width / 2` lies on its axis.
    #[inline]
    pub fn pixel_to_vehicle(&self, px: f64, py: f64) -> (f64, f64) {
        let k = self.px_per_m();
        ((self.image_height as f64 - 1.0 - py) / k, (px - self.image_width as f64 / 2.0) / k)
    }

    #[inline]
    pub fn vehicle_to_pixel(&self, forward: f64, right: f64) -> (f64, f64) {
        let k = self.px_per_m();
        (self.image_width as f64 / 2.0 + right * k, self.image_height as f64 - 1.0 - forward * k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseModel {
    pub salt_prob: f64,
    pub dropout_segments_per_frame: usize,
    /// metres of lane line erased per dropout
    pub dropout_length: f64,
    /// degrees
    pub imu_noise_std: f64,
    /// degrees
    pub imu_bias: f64,
    pub rng_seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            salt_prob: 0.002,
            dropout_segments_per_frame: 0,
            dropout_length: 0.03,
            imu_noise_std: 0.3,
            imu_bias: 0.0,
            rng_seed: 1,
        }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel { salt_prob: 0.0, dropout_segments_per_frame: 0, imu_noise_std: 0.0, imu_bias: 0.0, ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(0.0..=1.0).contains(&self.salt_prob) {
            return Err(SimError::InvalidNoise("salt_prob must lie in [0, 1]".into()));
        }
        if !(self.dropout_length >= 0.0 && self.imu_noise_std >= 0.0 && self.imu_bias.is_finite()) {
            return Err(SimError::InvalidNoise("dropout_length and imu_noise_std must be non-negative".into()));
        }
        Ok(())
    }
}

/// Pixel labels in a rendered frame before noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PixelLabel {
    Background,
    LeftLine,
    RightLine,
}

#[derive(Debug, Clone)]
pub struct RenderedFrame {
    pub image: BinaryImage,
    /// row-major ground-truth labels of the clean lane lines
    pub labels: Vec<PixelLabel>,
}

impl RenderedFrame {
    pub fn truth(&self, label: PixelLabel) -> BinaryImage {
        let data = self.labels.iter().map(|&l| l == label).collect();
        BinaryImage::from_vec(self.image.width(), self.image.height(), data).expect("same dims")
    }

    pub fn truth_count(&self, label: PixelLabel) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}

/// Noise-free rasterization of both lane lines.
///
/// A pixel is on a line when its distance to the centerline is within
/// `line_thickness / 2` of `lane_width / 2`. That criterion is 1-Lipschitz in
/// position, so each row is walked with skips proportional to the margin.
pub fn render_lines(road: &RoadModel, s: &VehicleState, cam: &CameraModel) -> Vec<PixelLabel> {
    let (w, h) = (cam.image_width, cam.image_height);
    let k = cam.px_per_m();
    let half_lane = road.lane_width() / 2.0;
    let half_line = road.line_thickness() / 2.0;
    let (fx, fy) = s.forward();
    let (rx, ry) = s.right();

    let reach = cam.view_length.hypot(cam.view_width / 2.0) + half_lane + road.line_thickness();
    let hint = road.nearest_arclength(s.x, s.y);
    let segs: Vec<usize> = road.segment_range(hint - reach - 0.5, hint + reach + 0.5).collect();

    let mut labels = vec![PixelLabel::Background; w * h];
    for py in 0..h {
        let mut px = 0usize;
        while px < w {
            let (f, r) = cam.pixel_to_vehicle(px as f64, py as f64);
            let qx = s.x + f * fx + r * rx;
            let qy = s.y + f * fy + r * ry;
            let mut best = (f64::INFINITY, 0.0);
            for &i in &segs {
                let pr = road.project_segment(i, qx, qy);
                if pr.distance < best.0 {
                    best = (pr.distance, pr.signed);
                }
            }
            let margin = (best.0 - half_lane).abs() - half_line;
            if margin <= 1e-9 {
                labels[py * w + px] = if best.1 > 0.0 { PixelLabel::LeftLine } else { PixelLabel::RightLine };
                px += 1;
            } else {
                let skip = (margin * k - 1e-6).floor().max(0.0) as usize;
                px += 1 + skip;
            }
        }
    }
    labels
}

pub fn render_camera<R: Rng + ?Sized>(
    road: &RoadModel,
    s: &VehicleState,
    cam: &CameraModel,
    noise: &NoiseModel,
    rng: &mut R,
) -> RenderedFrame {
    let labels = render_lines(road, s, cam);
    let (w, h) = (cam.image_width, cam.image_height);
    let mut data: Vec<bool> = labels.iter().map(|&l| l != PixelLabel::Background).collect();

    if noise.dropout_segments_per_frame > 0 && noise.dropout_length > 0.0 {
        let line_pixels: Vec<usize> = (0..data.len()).filter(|&i| data[i]).collect();
        let radius = noise.dropout_length / 2.0 * cam.px_per_m();
        for _ in 0..noise.dropout_segments_per_frame {
            if line_pixels.is_empty() {
                break;
            }
            let c = line_pixels[rng.random_range(0..line_pixels.len())];
            let (cx, cy) = ((c % w) as f64, (c / w) as f64);
            let r = radius.ceil() as i64;
            for dy in -r..=r {
                for dx in -r..=r {
                    let (x, y) = (cx as i64 + dx, cy as i64 + dy);
                    if x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h && ((dx * dx + dy * dy) as f64) <= radius * radius {
                        data[y as usize * w + x as usize] = false;
                    }
                }
            }
        }
    }
    if noise.salt_prob > 0.0 {
        for px in data.iter_mut() {
            if rng.random::<f64>() < noise.salt_prob {
                *px = true;
            }
        }
    }
    RenderedFrame { image: BinaryImage::from_vec(w, h, data).expect("camera dims validated"), labels }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::road::{RoadSpec, RoadStart, Segment};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn straight() -> RoadModel {
        RoadModel::new(RoadSpec {
            start: RoadStart::default(),
            segments: vec![Segment::Straight { length: 5.0 }],
            lane_width: 0.5,
            line_thickness: 0.02,
        })
        .unwrap()
    }

    #[test]
    fn default_camera_is_square_pixels() {
        let cam = CameraModel::default();
        cam.validate().unwrap();
        assert_eq!(cam.px_per_m(), 400.0);
        assert!(CameraModel { view_length: 0.5, ..cam }.validate().is_err());
    }

    #[test]
    fn centered_straight_lines_are_symmetric() {
        let road = straight();
        let cam = CameraModel::default();
        let s = road.vehicle_at(1.0, 0.0, 0.0, 0.5).unwrap();
        let labels = render_lines(&road, &s, &cam);
        for py in 0..cam.image_height {
            let row = &labels[py * 400..(py + 1) * 400];
            let left: Vec<usize> = (0..400).filter(|&x| row[x] == PixelLabel::LeftLine).collect();
            let right: Vec<usize> = (0..400).filter(|&x| row[x] == PixelLabel::RightLine).collect();
            assert_eq!(left, (96..=104).collect::<Vec<_>>(), "row {py}");
            assert_eq!(right, (296..=304).collect::<Vec<_>>(), "row {py}");
        }
    }

    #[test]
    fn noiseless_render_is_pure() {
        let road = straight();
        let cam = CameraModel::default();
        let s = road.vehicle_at(1.0, 0.03, 0.05, 0.5).unwrap();
        let noise = NoiseModel::noiseless();
        let a = render_camera(&road, &s, &cam, &noise, &mut ChaCha8Rng::seed_from_u64(1));
        let b = render_camera(&road, &s, &cam, &noise, &mut ChaCha8Rng::seed_from_u64(99));
        assert_eq!(a.image, b.image);
    }

    #[test]
    fn dropouts_only_remove_pixels() {
        let road = straight();
        let cam = CameraModel::default();
        let s = road.vehicle_at(1.0, 0.0, 0.0, 0.5).unwrap();
        let noise = NoiseModel { dropout_segments_per_frame: 3, salt_prob: 0.0, ..Default::default() };
        let f = render_camera(&road, &s, &cam, &noise, &mut ChaCha8Rng::seed_from_u64(5));
        let clean = f.labels.iter().filter(|&&l| l != PixelLabel::Background).count();
        assert!(f.image.count_true() < clean);
        for (i, &b) in f.image.data().iter().enumerate() {
            assert!(!b || f.labels[i] != PixelLabel::Background);
        }
    }
}
