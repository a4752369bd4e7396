use lanekeep::control::*;
use lanekeep::perception::{FeedbackSample, LanesSeen};
use proptest::prelude::*;

fn fb(e: f64) -> FeedbackSample {
    FeedbackSample { distance_error: e, angle_error_alpha: 0.0, lanes_seen: LanesSeen::Both }
}

fn cmd(e: f64, alpha: f64, state: &ControllerState, gains: &ControllerGains) -> (f64, ControllerState) {
    steering_command(&fb(e), alpha, state, gains, 0.01)
}

#[test]
fn zero_errors_give_zero_steer() {
    let (d, s) = cmd(0.0, 0.0, &ControllerState::new(), &ControllerGains::default());
    assert_eq!(d, 0.0);
    assert_eq!(s.integral_accum, 0.0);
}

#[test]
fn proportional_term_alone() {
    let gains = ControllerGains { k_distance: 0.01, ..ControllerGains::zero() };
    let (d, _) = cmd(10.0, 0.0, &ControllerState::new(), &gains);
    assert!((d - 0.1).abs() < 1e-15);
}

#[test]
fn tangent_term_at_45_degrees() {
    // saturation widened so the unclamped term is visible
    let gains = ControllerGains { k_angle: 0.5, delta_max: 1.0, ..ControllerGains::zero() };
    let (d, _) = cmd(0.0, 45.0, &ControllerState::new(), &gains);
    assert!((d - 0.5).abs() < 1e-12);
}

#[test]
fn huge_error_saturates_exactly() {
    let gains = ControllerGains::default();
    assert_eq!(cmd(1e6, 0.0, &ControllerState::new(), &gains).0, gains.delta_max);
    assert_eq!(cmd(-1e6, 0.0, &ControllerState::new(), &gains).0, -gains.delta_max);
}

#[test]
fn alpha_is_clamped_before_tangent() {
    let gains = ControllerGains { k_angle: 0.01, delta_max: 10.0, ..ControllerGains::zero() };
    let (d, _) = cmd(0.0, 89.999, &ControllerState::new(), &gains);
    assert!((d - 0.01 * 85f64.to_radians().tan()).abs() < 1e-12);
}

#[test]
fn integrator_accumulates_rectangle_rule() {
    let gains = ControllerGains { k_integral: 0.5, delta_max: 10.0, ..ControllerGains::zero() };
    let mut s = ControllerState::new();
    for _ in 0..10 {
        s = steering_command(&fb(4.0), 0.0, &s, &gains, 0.1).1;
    }
    assert!((s.integral_accum - 4.0).abs() < 1e-12);
    let (d, _) = steering_command(&fb(0.0), 0.0, &s, &gains, 0.1);
    assert!((d - 2.0).abs() < 1e-12);
}

#[test]
fn reset_zeroes_state_and_is_idempotent() {
    let gains = ControllerGains::default();
    let mut s = ControllerState::new();
    for _ in 0..50 {
        s = cmd(30.0, 5.0, &s, &gains).1;
    }
    s.last_fused_heading = 12.0;
    let r = reset(&s);
    assert_eq!(r.integral_accum, 0.0);
    assert_eq!(r.last_fused_heading, 0.0);
    assert_eq!(reset(&r), r);
    assert_eq!(cmd(0.0, 0.0, &r, &gains).0, 0.0);

    let mut c = LateralController::new(gains, HeadingFusionConfig::default());
    c.update(50.0, Some(3.0), Some(2.0), 0.0, 0.01).unwrap();
    c.reset();
    assert_eq!(c.state, ControllerState::new());
}

#[test]
fn config_validation() {
    assert!(ControllerGains::default().validate().is_ok());
    assert!(ControllerGains { delta_max: 0.0, ..Default::default() }.validate().is_err());
    assert!(ControllerGains { integral_clamp: -1.0, ..Default::default() }.validate().is_err());
    assert!(ControllerGains { alpha_clamp_deg: 90.0, ..Default::default() }.validate().is_err());
    assert!(HeadingFusionConfig { vision_weight: 1.5, ..Default::default() }.validate().is_err());
    assert!(HeadingFusionConfig { imu_rate: 10.0, vision_rate: 20.0, ..Default::default() }.validate().is_err());
}

// ---- fusion ----

#[test]
fn full_vision_weight_passes_alpha_through() {
    let cfg = HeadingFusionConfig { vision_weight: 1.0, ..Default::default() };
    let mut s = ControllerState::new();
    assert_eq!(fuse_heading(&mut s, Some(4.0), Some(10.0), &cfg, 0.0).unwrap(), 10.0);
    assert_eq!(s.last_fused_heading, 10.0);
    assert_eq!(s.last_vision_time, 0.0);
}

#[test]
fn agreeing_sources_are_a_fixed_point() {
    for w in [0.0, 0.2, 0.5, 0.8, 1.0] {
        let cfg = HeadingFusionConfig { vision_weight: w, ..Default::default() };
        let mut s = ControllerState::new();
        assert!((fuse_heading(&mut s, Some(7.0), Some(7.0), &cfg, 0.0).unwrap() - 7.0).abs() < 1e-12);
    }
}

#[test]
fn no_source_is_an_error() {
    let mut s = ControllerState::new();
    assert_eq!(fuse_heading(&mut s, None, None, &HeadingFusionConfig::default(), 0.0), Err(ControlError::NoHeadingSource));
}

/// One vision frame per five IMU samples, IMU drifting; compared with the
/// filter written out by hand.
#[test]
fn multi_rate_sequence_matches_hand_recurrence() {
    let cfg = HeadingFusionConfig::default();
    let w = cfg.vision_weight;
    let mut s = ControllerState::new();
    let (mut est, mut prev_imu): (f64, Option<f64>) = (0.0, None);
    for k in 0..60 {
        let t = k as f64 * 0.01;
        let imu = 2.0 * (t * 3.0).sin() + 0.5 * t; // heading plus drift
        let vision = (k % 5 == 0).then(|| 2.0 * (t * 3.0).sin() + 0.3);
        let got = fuse_heading(&mut s, Some(imu), vision, &cfg, t).unwrap();
        est = match vision {
            Some(a) => w * a + (1.0 - w) * imu,
            None => est + (imu - prev_imu.unwrap()),
        };
        prev_imu = Some(imu);
        assert!((got - est).abs() < 1e-12, "step {k}: {got} vs {est}");
    }
}

#[test]
fn constant_imu_bias_cancels_between_frames() {
    let cfg = HeadingFusionConfig { vision_weight: 1.0, ..Default::default() };
    let mut s = ControllerState::new();
    fuse_heading(&mut s, Some(5.0 + 3.0), Some(5.0), &cfg, 0.0).unwrap();
    let next = fuse_heading(&mut s, Some(6.0 + 3.0), None, &cfg, 0.01).unwrap();
    assert!((next - 6.0).abs() < 1e-12);
}

#[test]
fn imu_only_start_uses_reading() {
    let mut s = ControllerState::new();
    assert_eq!(fuse_heading(&mut s, Some(3.5), None, &HeadingFusionConfig::default(), 0.0).unwrap(), 3.5);
}

// ---- properties ----

fn gains_strategy() -> impl Strategy<Value = ControllerGains> {
    (0.0f64..0.1, 0.0f64..0.1, 0.0f64..2.0, 0.01f64..1.2, 0.0f64..200.0, 1.0f64..89.0).prop_map(
        |(k_distance, k_integral, k_angle, delta_max, integral_clamp, alpha_clamp_deg)| ControllerGains {
            k_distance,
            k_integral,
            k_angle,
            delta_max,
            integral_clamp,
            alpha_clamp_deg,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn steering_is_bounded_and_windup_limited(
        gains in gains_strategy(),
        inputs in prop::collection::vec((-1e4f64..1e4, -180.0f64..180.0, 1e-4f64..0.1), 1..40),
    ) {
        let mut s = ControllerState::new();
        for (e, a, dt) in inputs {
            let (d, next) = steering_command(&fb(e), a, &s, &gains, dt);
            prop_assert!(d.abs() <= gains.delta_max);
            prop_assert!(next.integral_accum.abs() <= gains.integral_clamp);
            s = next;
        }
    }

    #[test]
    fn zero_gains_never_steer(e in -1e6f64..1e6, a in -180.0f64..180.0, acc in -100.0f64..100.0) {
        let s = ControllerState { integral_accum: acc, ..ControllerState::new() };
        prop_assert_eq!(steering_command(&fb(e), a, &s, &ControllerGains::zero(), 0.01).0, 0.0);
    }

    #[test]
    fn monotone_in_distance_error(
        gains in gains_strategy(),
        e in -500.0f64..500.0,
        bump in 0.0f64..100.0,
        a in -60.0f64..60.0,
        acc in -50.0f64..50.0,
    ) {
        let s = ControllerState { integral_accum: acc.clamp(-gains.integral_clamp, gains.integral_clamp), ..ControllerState::new() };
        let lo = steering_command(&fb(e), a, &s, &gains, 0.01).0;
        let hi = steering_command(&fb(e + bump), a, &s, &gains, 0.01).0;
        prop_assert!(hi >= lo - 1e-15);
    }
}
