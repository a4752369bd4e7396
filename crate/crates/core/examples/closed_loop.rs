//! Drive the curve–straight–curve road with the three-term controller and
//! with distance feedback alone.
//!
//! `cargo run --example closed_loop -- trace.csv` also writes the full
//! controller's trace.

use lanekeep::simulator::{run_scenario, scenes, ScenarioParams, SimTrace};

fn summary(name: &str, t: &SimTrace) {
    let (s0, s1) = scenes::s_curve_straight();
    let straight: Vec<f64> = t
        .rows
        .iter()
        .filter(|r| r.t > (s0 + 3.0) / 0.5 && r.t < s1 / 0.5)
        .map(|r| r.lateral_offset_true.abs())
        .collect();
    let mean = straight.iter().sum::<f64>() / straight.len().max(1) as f64;
    println!("{name:<14} {:<22} peak {:.4} m   straight mean {:.5} m", format!("{:?}", t.outcome), t.peak_abs_offset(), mean);
}

fn main() {
    let road = scenes::s_curve_road();
    let params = ScenarioParams::default();
    let full = run_scenario(&road, &params, None).expect("default scenario is valid");
    let dist = run_scenario(&road, &ScenarioParams { gains: params.gains.distance_only(), ..params.clone() }, None)
        .expect("default scenario is valid");
    summary("three-term", &full);
    summary("distance only", &dist);

    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, full.to_csv()).expect("writable trace path");
        println!("wrote {path}");
    }
}
