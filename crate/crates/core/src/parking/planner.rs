//! Maximum-steer parallel parking: closed-form two-arc park-in and an
//! iterative shuffle-then-arc park-out, both checked by rollout.
//!
//! Frame: the scanning pass drives along `y = 0` in `+x` with the parking row
//! on the right (`y < 0`); odometry equals the rear-axle `x`. Steering
//! angles in plans follow the plant convention, positive counter-clockwise.

use serde::{Deserialize, Serialize};

use super::geometry::{check_collision, separation, Footprint, Rect};
use super::scan::ParkingSpace;
use super::ParkingError;
use crate::simulator::{kinematic_step, wrap_angle, VehicleState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParkingVehicle {
    pub wheelbase: f64,
    pub length: f64,
    pub width: f64,
    /// rear axle to rear bumper
    pub rear_overhang: f64,
    /// rad
    pub delta_max: f64,
}

impl Default for ParkingVehicle {
    fn default() -> Self {
        ParkingVehicle { wheelbase: 0.26, length: 0.40, width: 0.19, rear_overhang: 0.07, delta_max: 0.45 }
    }
}

impl ParkingVehicle {
    pub fn validate(&self) -> Result<(), ParkingError> {
        let ok = self.wheelbase > 0.0
            && self.width > 0.0
            && self.rear_overhang >= 0.0
            && self.length > self.wheelbase + self.rear_overhang
            && self.delta_max > 0.0
            && self.delta_max < std::f64::consts::FRAC_PI_2;
        if ok {
            Ok(())
        } else {
            Err(ParkingError::InvalidInput(
                "vehicle needs positive dimensions, length > wheelbase + rear_overhang and 0 < delta_max < pi/2".into(),
            ))
        }
    }

    /// Rear-axle turning radius at full lock.
    pub fn min_turning_radius(&self) -> f64 {
        self.wheelbase / self.delta_max.tan()
    }

    pub fn footprint(&self) -> Footprint {
        Footprint { length: self.length, width: self.width, rear_overhang: self.rear_overhang }
    }

    /// rear axle to front bumper
    pub fn front_reach(&self) -> f64 {
        self.length - self.rear_overhang
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerConfig {
    /// clearance kept to every obstacle, m
    pub margin: f64,
    /// |speed| of every segment, m/s
    pub speed: f64,
    pub segment_cap: usize,
    /// rollout step, s
    pub rollout_dt: f64,
    pub position_tol: f64,
    pub heading_tol_deg: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig { margin: 0.03, speed: 0.2, segment_cap: 12, rollout_dt: 0.002, position_tol: 0.05, heading_tol_deg: 3.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManeuverSegment {
    /// m/s, negative when reversing
    pub speed: f64,
    /// rad, positive counter-clockwise
    pub delta: f64,
    /// s
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManeuverPlan {
    pub start_pose: VehicleState,
    pub segments: Vec<ManeuverSegment>,
    pub expected_final_pose: VehicleState,
}

/// Lateral lines of a space, from the pass geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceLines {
    /// outer boundary of the parked row
    pub y_edge: f64,
    /// far boundary (curb or sensor reach)
    pub y_curb: f64,
}

impl SpaceLines {
    pub fn new(space: &ParkingSpace, vehicle: &ParkingVehicle, lateral_gap: f64) -> Self {
        let side = -vehicle.width / 2.0;
        SpaceLines { y_edge: side - lateral_gap, y_curb: side - space.depth }
    }
}

/// Conservative obstacle set implied by a detected space: blocks behind and
/// ahead of it plus the far boundary.
pub fn space_obstacles(space: &ParkingSpace, vehicle: &ParkingVehicle, lateral_gap: f64) -> Vec<Rect> {
    let l = SpaceLines::new(space, vehicle, lateral_gap);
    bounding_obstacles(space.start_s, space.end_s, l)
}

fn bounding_obstacles(rear_x: f64, front_x: f64, l: SpaceLines) -> Vec<Rect> {
    let reach = 3.0;
    vec![
        Rect::new(rear_x - reach, rear_x, l.y_curb, l.y_edge),
        Rect::new(front_x, front_x + reach, l.y_curb, l.y_edge),
        Rect::new(rear_x - reach, front_x + reach, l.y_curb - 1.0, l.y_curb),
    ]
}

/// Closed-form sizing of the two-arc maneuver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParkInGeometry {
    /// turning radius, m
    pub radius: f64,
    /// angle of each arc, rad
    pub arc_angle: f64,
    /// lateral position of the parked rear axle
    pub y_target: f64,
    pub min_length: f64,
    /// measured from the side sensor, like [`ParkingSpace::depth`]
    pub min_depth: f64,
}

/// Geometry of reversing into a space `lateral_gap` to the right of the
/// vehicle's side.
///
/// The two arcs at full lock have equal angle `φ` with
/// `2R(1 − cos φ)` equal to the lateral shift. During the second arc the
/// vehicle rotates about a centre `R` to the left of its parked pose; the
/// farthest body point, the front-right corner at `ρ = hypot(R + w/2, f)`,
/// must stay `margin` clear of the front obstacle's outer corner. That
/// fixes the shortest space. The lowest point swept (rear-right corner on
/// the second arc) fixes the shallowest one.
pub fn park_in_geometry(vehicle: &ParkingVehicle, lateral_gap: f64, cfg: &PlannerConfig) -> Result<ParkInGeometry, ParkingError> {
    vehicle.validate()?;
    if !(lateral_gap > 0.0) {
        return Err(ParkingError::InvalidInput("lateral_gap must be positive".into()));
    }
    let r = vehicle.min_turning_radius();
    let w = vehicle.width;
    let m = cfg.margin;
    let y_edge = -w / 2.0 - lateral_gap;
    let y_target = y_edge - m - w / 2.0;
    let shift = -y_target;
    if shift > 2.0 * r {
        return Err(ParkingError::InvalidInput(format!(
            "lateral shift {shift:.3} m exceeds 2R = {:.3} m; approach closer",
            2.0 * r
        )));
    }
    let arc_angle = (1.0 - shift / (2.0 * r)).acos();
    let center_above_edge = r - w / 2.0 - m;
    if center_above_edge <= 0.0 {
        return Err(ParkingError::InvalidInput("turning radius too small for the vehicle width".into()));
    }
    let rho = (r + w / 2.0).hypot(vehicle.front_reach());
    let ahead = ((rho + m).powi(2) - center_above_edge.powi(2)).sqrt();
    let min_length = m + vehicle.rear_overhang + ahead;

    let c2y = y_target + r;
    let reach = vehicle.rear_overhang.hypot(r + w / 2.0);
    let psi_low = vehicle.rear_overhang.atan2(r + w / 2.0);
    let y_low = if psi_low <= arc_angle {
        c2y - reach
    } else {
        c2y - vehicle.rear_overhang * arc_angle.sin() - (r + w / 2.0) * arc_angle.cos()
    };
    let min_depth = m - w / 2.0 - y_low;
    Ok(ParkInGeometry { radius: r, arc_angle, y_target, min_length, min_depth })
}

pub fn plan_park_in(space: &ParkingSpace, vehicle: &ParkingVehicle, lateral_gap: f64) -> Result<ManeuverPlan, ParkingError> {
    plan_park_in_with(space, vehicle, lateral_gap, &PlannerConfig::default())
}

/// Reverse right at full lock, reverse left at full lock by the same angle,
/// then creep forward to centre in the space when there is slack.
pub fn plan_park_in_with(
    space: &ParkingSpace,
    vehicle: &ParkingVehicle,
    lateral_gap: f64,
    cfg: &PlannerConfig,
) -> Result<ManeuverPlan, ParkingError> {
    let g = park_in_geometry(vehicle, lateral_gap, cfg)?;
    if space.length() < g.min_length || space.depth < g.min_depth {
        return Err(ParkingError::SpaceTooSmall {
            length: space.length(),
            required_length: g.min_length,
            depth: space.depth,
            required_depth: g.min_depth,
        });
    }
    let m = cfg.margin;
    let x_arcs_end = space.start_s + m + vehicle.rear_overhang;
    let x_start = x_arcs_end + 2.0 * g.radius * g.arc_angle.sin();
    let arc_time = g.radius * g.arc_angle / cfg.speed;
    let mut segments = vec![
        ManeuverSegment { speed: -cfg.speed, delta: -vehicle.delta_max, duration: arc_time },
        ManeuverSegment { speed: -cfg.speed, delta: vehicle.delta_max, duration: arc_time },
    ];
    let slack = space.length() - vehicle.length;
    let creep = slack / 2.0 - m;
    let mut x_final = x_arcs_end;
    if creep > 0.005 {
        segments.push(ManeuverSegment { speed: cfg.speed, delta: 0.0, duration: creep / cfg.speed });
        x_final += creep;
    }
    let plan = ManeuverPlan {
        start_pose: VehicleState::new(x_start, 0.0, 0.0, 0.0),
        segments,
        expected_final_pose: VehicleState::new(x_final, g.y_target, 0.0, 0.0),
    };
    let obstacles = space_obstacles(space, vehicle, lateral_gap);
    validate_plan(&plan, vehicle, &obstacles, cfg)?;
    Ok(plan)
}

/// Every intermediate pose of a plan, sampled at `dt` with an exact final
/// partial step per segment.
pub fn rollout(plan: &ManeuverPlan, wheelbase: f64, dt: f64) -> Vec<VehicleState> {
    let mut pose = plan.start_pose;
    let mut out = vec![pose];
    for seg in &plan.segments {
        pose.speed = seg.speed;
        let full = (seg.duration / dt).floor() as usize;
        let rest = seg.duration - full as f64 * dt;
        for _ in 0..full {
            pose = kinematic_step(&pose, seg.delta, dt, wheelbase);
            out.push(pose);
        }
        if rest > 1e-12 {
            pose = kinematic_step(&pose, seg.delta, rest, wheelbase);
            out.push(pose);
        }
    }
    if let Some(last) = out.last_mut() {
        last.speed = 0.0;
    }
    out
}

/// Rolls the plan out and checks steering limits, collisions and the final
/// pose against `expected_final_pose`.
pub fn validate_plan(plan: &ManeuverPlan, vehicle: &ParkingVehicle, obstacles: &[Rect], cfg: &PlannerConfig) -> Result<VehicleState, ParkingError> {
    for (i, s) in plan.segments.iter().enumerate() {
        if s.delta.abs() > vehicle.delta_max + 1e-12 || !(s.duration > 0.0) {
            return Err(ParkingError::RolloutFailed(format!("segment {i} violates |delta| <= delta_max or duration > 0")));
        }
    }
    let fp = vehicle.footprint();
    let poses = rollout(plan, vehicle.wheelbase, cfg.rollout_dt);
    if let Some((k, p)) = poses.iter().enumerate().find(|(_, p)| check_collision(p, &fp, obstacles)) {
        return Err(ParkingError::RolloutFailed(format!("collision at step {k} ({:.3}, {:.3})", p.x, p.y)));
    }
    let end = *poses.last().expect("rollout includes the start pose");
    let exp = plan.expected_final_pose;
    let pos_err = (end.x - exp.x).hypot(end.y - exp.y);
    let head_err = wrap_angle(end.heading - exp.heading).abs().to_degrees();
    if pos_err > cfg.position_tol || head_err > cfg.heading_tol_deg {
        return Err(ParkingError::RolloutFailed(format!(
            "final pose off by {pos_err:.4} m / {head_err:.2} deg"
        )));
    }
    Ok(end)
}

/// Front clearance a parallel-parked vehicle needs to leave in one forward
/// full-lock arc: its front-right corner sweeps a circle of radius `ρ`
/// about the turning centre, which must clear the front obstacle's outer
/// corner by `margin`.
pub fn single_arc_clearance(current: &VehicleState, vehicle: &ParkingVehicle, lateral_gap: f64, cfg: &PlannerConfig) -> f64 {
    let r = vehicle.min_turning_radius();
    let y_edge = -vehicle.width / 2.0 - lateral_gap;
    let rho = (r + vehicle.width / 2.0).hypot(vehicle.front_reach());
    let above = current.y + r - y_edge;
    let need = (rho + cfg.margin).powi(2) - above.powi(2);
    if need <= 0.0 {
        0.0
    } else {
        (need.sqrt() - vehicle.front_reach()).max(0.0)
    }
}

pub fn plan_park_out(
    space: &ParkingSpace,
    current: &VehicleState,
    front_clearance: f64,
    vehicle: &ParkingVehicle,
    lateral_gap: f64,
) -> Result<ManeuverPlan, ParkingError> {
    plan_park_out_with(space, current, front_clearance, vehicle, lateral_gap, &PlannerConfig::default())
}

const STEP: f64 = 0.002;

/// Exit from inside a space. With enough room ahead a single forward arc at
/// full left lock suffices; otherwise alternate full-lock reverse-right and
/// forward-left moves, each as long as the margins allow, until that arc
/// becomes collision-free. The arc ends once the whole body is clear of the
/// parked row.
pub fn plan_park_out_with(
    space: &ParkingSpace,
    current: &VehicleState,
    front_clearance: f64,
    vehicle: &ParkingVehicle,
    lateral_gap: f64,
    cfg: &PlannerConfig,
) -> Result<ManeuverPlan, ParkingError> {
    vehicle.validate()?;
    if !(front_clearance >= 0.0) {
        return Err(ParkingError::InvalidInput("front_clearance must be non-negative".into()));
    }
    let lines = SpaceLines::new(space, vehicle, lateral_gap);
    let fp = vehicle.footprint();
    let front_x = fp.corners(current).iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max) + front_clearance;
    let obstacles = bounding_obstacles(space.start_s, front_x, lines);
    let clearance = obstacles.iter().map(|o| separation(current, &fp, o)).fold(f64::INFINITY, f64::min);
    if clearance <= 0.0 {
        return Err(ParkingError::InvalidInput("vehicle overlaps an obstacle".into()));
    }
    let margin = cfg.margin.min(0.5 * clearance);
    let inflated: Vec<Rect> = obstacles.iter().map(|o| o.inflate(margin)).collect();
    let out_of_row = |p: &VehicleState| fp.corners(p).iter().all(|c| c.1 >= lines.y_edge + margin);
    let blocked = |p: &VehicleState| check_collision(p, &fp, &inflated);

    let r = vehicle.min_turning_radius();
    let max_travel = 1.5 * std::f64::consts::PI * r;
    let advance = |p: &VehicleState, speed: f64, delta: f64, travel: f64| {
        let mut q = *p;
        q.speed = speed;
        kinematic_step(&q, delta, travel / speed.abs(), vehicle.wheelbase)
    };

    let mut pose = VehicleState { speed: 0.0, ..*current };
    let mut segments: Vec<ManeuverSegment> = Vec::new();
    let ample = current.heading.abs() < 1e-9 && front_clearance >= single_arc_clearance(current, vehicle, lateral_gap, cfg);
    if ample {
        let mut travel = 0.0;
        while !out_of_row(&pose) && travel < max_travel {
            pose = advance(&pose, cfg.speed, vehicle.delta_max, STEP);
            travel += STEP;
        }
        segments.push(ManeuverSegment { speed: cfg.speed, delta: vehicle.delta_max, duration: travel / cfg.speed });
        pose.speed = 0.0;
    }
    if !ample {
        loop {
            // try the exit arc from here
            let mut q = pose;
            let mut travel = 0.0;
            let exit = loop {
                if out_of_row(&q) {
                    break Some(travel);
                }
                if travel >= max_travel {
                    break None;
                }
                q = advance(&q, cfg.speed, vehicle.delta_max, STEP);
                travel += STEP;
                if blocked(&q) {
                    break None;
                }
            };
            if let Some(travel) = exit.filter(|&t| t > 0.0) {
                segments.push(ManeuverSegment { speed: cfg.speed, delta: vehicle.delta_max, duration: travel / cfg.speed });
                pose = VehicleState { speed: 0.0, ..q };
                break;
            }
            if segments.len() + 1 >= cfg.segment_cap {
                return Err(ParkingError::NoExitFound { segments: cfg.segment_cap });
            }
            let reverse = segments.len().is_multiple_of(2);
            let (speed, delta) = if reverse { (-cfg.speed, -vehicle.delta_max) } else { (cfg.speed, vehicle.delta_max) };
            let mut q = pose;
            let mut travel = 0.0;
            while travel < max_travel {
                let next = advance(&q, speed, delta, STEP);
                if blocked(&next) || next.heading.abs() > 1.4 {
                    break;
                }
                q = next;
                travel += STEP;
            }
            if travel < 5.0 * STEP {
                return Err(ParkingError::NoExitFound { segments: segments.len() });
            }
            segments.push(ManeuverSegment { speed, delta, duration: travel / cfg.speed });
            pose = VehicleState { speed: 0.0, ..q };
        }
    }

    let plan = ManeuverPlan { start_pose: VehicleState { speed: 0.0, ..*current }, segments, expected_final_pose: pose };
    let end = validate_plan(&plan, vehicle, &obstacles, cfg)?;
    if !fp.corners(&end).iter().all(|c| c.1 >= lines.y_edge) {
        return Err(ParkingError::RolloutFailed("rollout ends inside the parked row".into()));
    }
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(len: f64) -> ParkingSpace {
        ParkingSpace { start_s: 1.0, end_s: 1.0 + len, depth: 2.0 }
    }

    #[test]
    fn boundary_space_is_feasible() {
        let v = ParkingVehicle::default();
        let g = park_in_geometry(&v, 0.15, &PlannerConfig::default()).unwrap();
        let plan = plan_park_in(&space(g.min_length), &v, 0.15).unwrap();
        assert!(plan.segments[..2].iter().all(|s| s.delta.abs() == v.delta_max));
        assert!(matches!(plan_park_in(&space(g.min_length - 0.01), &v, 0.15), Err(ParkingError::SpaceTooSmall { .. })));
    }

    #[test]
    fn shallow_space_rejected() {
        let v = ParkingVehicle::default();
        let g = park_in_geometry(&v, 0.15, &PlannerConfig::default()).unwrap();
        let sp = ParkingSpace { depth: g.min_depth - 0.01, ..space(1.2) };
        assert!(matches!(plan_park_in(&sp, &v, 0.15), Err(ParkingError::SpaceTooSmall { .. })));
        let sp = ParkingSpace { depth: g.min_depth + 0.001, ..space(1.2) };
        plan_park_in(&sp, &v, 0.15).unwrap();
    }

    #[test]
    fn ample_exit_is_one_arc() {
        let v = ParkingVehicle::default();
        let sp = space(1.2);
        let parked = plan_park_in(&sp, &v, 0.15).unwrap().expected_final_pose;
        let plan = plan_park_out(&sp, &parked, 2.0 * v.length, &v, 0.15).unwrap();
        assert_eq!(plan.segments.len(), 1);
        assert!(single_arc_clearance(&parked, &v, 0.15, &PlannerConfig::default()) < 2.0 * v.length);
    }
}
