//! Side scan past two parked cars, ghost echoes, denoising, space
//! detection, two-arc park-in and a shuffling park-out.

use lanekeep::parking::*;

fn main() {
    let v = ParkingVehicle::default();
    let gap = 0.15;
    let geo = park_in_geometry(&v, gap, &PlannerConfig::default()).expect("default vehicle is valid");
    println!(
        "R = {:.3} m, arc angle {:.1}°, space needs ≥ {:.3} m long, ≥ {:.3} m deep",
        geo.radius,
        geo.arc_angle.to_degrees(),
        geo.min_length,
        geo.min_depth
    );

    let scan = simulate_scan(&gap_layout(0.85, gap, &v), &v).expect("valid layout");
    let noisy = inject_spikes(&scan, 1.05, 1.8, 3, 350.0);
    println!("raw scan: {:?}", detect_space(&noisy, geo.min_length, 500.0));
    let clean = interpolate_scan(&noisy, 2);
    let space = detect_space(&clean, geo.min_length, 500.0).expect("gap survives interpolation");
    println!("clean scan: {space:?}");

    let plan = plan_park_in(&space, &v, gap).expect("space is large enough");
    for s in &plan.segments {
        println!("  in : v {:+.2} m/s  δ {:+.3} rad  {:.2} s", s.speed, s.delta, s.duration);
    }
    let end = rollout(&plan, v.wheelbase, 1e-3).pop().expect("non-empty rollout");
    println!("  parked at ({:.3}, {:.3}), heading {:.2}°", end.x, end.y, end.heading.to_degrees());

    for clearance in [0.5, 0.05] {
        match plan_park_out(&space, &plan.expected_final_pose, clearance, &v, gap) {
            Ok(out) => println!("  out with {clearance} m ahead: {} segments", out.segments.len()),
            Err(e) => println!("  out with {clearance} m ahead: {e}"),
        }
    }
}
