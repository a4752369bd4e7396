use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::camera::NoiseModel;

/// Heading relative to the road as an IMU would report it: degrees, plus
/// constant bias and zero-mean Gaussian noise.
pub fn imu_sample<R: Rng + ?Sized>(heading_rel_road: f64, noise: &NoiseModel, rng: &mut R) -> f64 {
    let clean = heading_rel_road.to_degrees() + noise.imu_bias;
    if noise.imu_noise_std > 0.0 {
        let n = Normal::new(0.0, noise.imu_noise_std).expect("std validated non-negative");
        clean + n.sample(rng)
    } else {
        clean
    }
}
