//! Kinematic bicycle model: constant steering traces the L/tan δ circle,
//! and the integration error shrinks linearly with the step.

use lanekeep::simulator::{kinematic_step, turning_radius, VehicleState};

fn main() {
    let l = 0.26;
    for delta in [0.1f64, 0.2, 0.3, 0.45] {
        let r = turning_radius(l, delta);
        let mut s = VehicleState::new(0.0, 0.0, 0.0, 0.5);
        let mut worst: f64 = 0.0;
        for _ in 0..(2.0 * std::f64::consts::PI * r / 0.5 / 1e-3).round() as usize {
            s = kinematic_step(&s, delta, 1e-3, l);
            worst = worst.max((s.x.hypot(s.y - r) - r).abs());
        }
        println!("δ = {delta:.2} rad  R = {r:.4} m  max radius error {:.2e} m", worst);
    }

    let steer = |t: f64| 0.3 * (1.3 * t).sin();
    let run = |dt: f64| {
        let mut s = VehicleState::new(0.0, 0.0, 0.0, 0.5);
        for k in 0..(4.0 / dt).round() as usize {
            s = kinematic_step(&s, steer(k as f64 * dt), dt, l);
        }
        s
    };
    let reference = run(1e-5);
    let mut prev = None;
    for dt in [0.04, 0.02, 0.01, 0.005] {
        let s = run(dt);
        let err = (s.x - reference.x).hypot(s.y - reference.y);
        let ratio = prev.map_or(String::new(), |p: f64| format!("  ratio {:.3}", p / err));
        println!("dt = {dt:<6} final-position error {err:.3e} m{ratio}");
        prev = Some(err);
    }
}
