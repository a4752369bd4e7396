//! A constant steering-actuator bias: the integral term removes the
//! steady-state offset that proportional feedback alone leaves behind.

use lanekeep::control::ControllerGains;
use lanekeep::simulator::{run_scenario, scenes, ScenarioParams};

fn main() {
    let road = scenes::s_curve_road();
    let (s0, s1) = scenes::s_curve_straight();
    println!("{:>10} {:>14} {:>14}", "bias", "with k_i", "without k_i");
    for bias in [0.0, 0.02, 0.05, 0.08] {
        let base = ScenarioParams { steering_bias: bias, ..Default::default() };
        let settle = |gains: ControllerGains| {
            let t = run_scenario(&road, &ScenarioParams { gains, ..base.clone() }, None).expect("valid scenario");
            let v: Vec<f64> = t
                .rows
                .iter()
                .filter(|r| r.t > (s0 + 3.0) / base.speed && r.t < s1 / base.speed)
                .map(|r| r.lateral_offset_true)
                .collect();
            v.iter().sum::<f64>() / v.len().max(1) as f64
        };
        let with = settle(base.gains);
        let without = settle(ControllerGains { k_integral: 0.0, ..base.gains });
        println!("{bias:>8.2} rad {with:>12.5} m {without:>12.5} m");
    }
}
