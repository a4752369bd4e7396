use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Planar pose plus longitudinal speed. `(x, y)` is the rear-axle reference
/// point in the world frame; heading is counter-clockwise from +x.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    /// m/s; negative only while reversing through a parking maneuver
    pub speed: f64,
}

impl VehicleState {
    pub fn new(x: f64, y: f64, heading: f64, speed: f64) -> Self {
        VehicleState { x, y, heading, speed }
    }

    pub fn forward(&self) -> (f64, f64) {
        (self.heading.cos(), self.heading.sin())
    }

    /// Unit vector to the vehicle's right.
    pub fn right(&self) -> (f64, f64) {
        (self.heading.sin(), -self.heading.cos())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.heading.is_finite() && self.speed.is_finite()
    }
}

/// Wraps into `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Kinematic bicycle step with midpoint heading integration.
///
/// `delta` is the front-wheel angle, positive counter-clockwise (left).
pub fn kinematic_step(s: &VehicleState, delta: f64, dt: f64, wheelbase: f64) -> VehicleState {
    debug_assert!(dt > 0.0 && wheelbase > 0.0);
    let yaw_change = s.speed / wheelbase * delta.tan() * dt;
    let mid = s.heading + 0.5 * yaw_change;
    let dist = s.speed * dt;
    VehicleState {
        x: s.x + dist * mid.cos(),
        y: s.y + dist * mid.sin(),
        heading: wrap_angle(s.heading + yaw_change),
        speed: s.speed,
    }
}

/// Turning radius of the rear axle at steering angle `delta`.
pub fn turning_radius(wheelbase: f64, delta: f64) -> f64 {
    wheelbase / delta.tan().abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_motion() {
        let s = VehicleState::new(1.0, 2.0, 0.3, 2.0);
        let n = kinematic_step(&s, 0.0, 0.1, 0.3);
        assert_eq!(n.heading, s.heading);
        assert!((n.x - (1.0 + 0.2 * 0.3f64.cos())).abs() < 1e-15);
        assert!((n.y - (2.0 + 0.2 * 0.3f64.sin())).abs() < 1e-15);
    }

    #[test]
    fn zero_speed_is_stationary() {
        let s = VehicleState::new(1.0, -2.0, 1.0, 0.0);
        assert_eq!(kinematic_step(&s, 0.4, 0.01, 0.3), s);
    }

    #[test]
    fn wrap_stays_in_range() {
        for k in -20..20 {
            let a = wrap_angle(k as f64 * 1.3);
            assert!(a > -PI && a <= PI);
        }
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
    }

    #[test]
    fn speed_preserved() {
        let mut s = VehicleState::new(0.0, 0.0, 0.0, 0.7);
        for _ in 0..100 {
            s = kinematic_step(&s, 0.3, 0.01, 0.26);
        }
        assert_eq!(s.speed, 0.7);
    }
}
