//! Render one bird's-eye frame on a curve, run the full perception stack on
//! it and compare the feedback with ground truth.

use lanekeep::perception::{analyze_frame, PerceptionConfig};
use lanekeep::simulator::{render_camera, scenes, CameraModel, NoiseModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let road = scenes::s_curve_road();
    let cam = CameraModel::default();
    let noise = NoiseModel { salt_prob: 0.005, ..NoiseModel::noiseless() };
    let cfg = PerceptionConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    println!("{:>6} {:>8} {:>8} {:>10} {:>10} {:>9} {:>9}", "s [m]", "left", "right", "e_d [px]", "truth", "α [deg]", "truth");
    for s in [0.5, 2.0, 3.5, 5.0, 8.0, 12.0] {
        let state = road.vehicle_at(s, 0.02, 3f64.to_radians(), 0.5).expect("arclength on road");
        let frame = render_camera(&road, &state, &cam, &noise, &mut rng);
        let truth = scenes::frame_truth(&road, &state, &cam, &frame.labels, cfg.row_fraction);
        let a = analyze_frame(&frame.image, &cfg).expect("default config is valid");
        let fb = a.feedback.expect("both lines are in view");
        let col = |c: Option<usize>| c.map_or("-".to_string(), |c| c.to_string());
        println!(
            "{s:>6.1} {:>8} {:>8} {:>10.1} {:>10.1} {:>9.2} {:>9.2}",
            col(a.base.left),
            col(a.base.right),
            fb.distance_error,
            truth.distance_error,
            fb.angle_error_alpha,
            truth.alpha_deg
        );
    }
}
