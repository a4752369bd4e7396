//! Piecewise straight/arc centerline with closed-form poses.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use super::vehicle::{wrap_angle, VehicleState};
use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Segment {
    Straight { length: f64 },
    /// Positive `angle` turns left (counter-clockwise).
    Arc { radius: f64, angle: f64 },
}

impl Segment {
    pub fn length(&self) -> f64 {
        match *self {
            Segment::Straight { length } => length,
            Segment::Arc { radius, angle } => radius * angle.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoadStart {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Placed {
    seg: Segment,
    s0: f64,
    x0: f64,
    y0: f64,
    heading0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoadPose {
    pub x: f64,
    pub y: f64,
    pub tangent: f64,
}

impl RoadPose {
    /// Unit normal pointing left of the direction of travel.
    pub fn left_normal(&self) -> (f64, f64) {
        (-self.tangent.sin(), self.tangent.cos())
    }
}

/// Serializable description of a road; see [`RoadModel::new`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoadSpec {
    #[serde(default)]
    pub start: RoadStart,
    pub segments: Vec<Segment>,
    pub lane_width: f64,
    pub line_thickness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadModel {
    spec: RoadSpec,
    placed: Vec<Placed>,
    total: f64,
}

/// Nearest point on one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SegmentProjection {
    pub distance: f64,
    /// Positive left of the centerline.
    pub signed: f64,
    pub arclength: f64,
}

impl RoadModel {
    pub fn new(spec: RoadSpec) -> Result<Self, SimError> {
        if spec.segments.is_empty() {
            return Err(SimError::InvalidRoad("road needs at least one segment".into()));
        }
        if !(spec.lane_width > 0.0 && spec.line_thickness > 0.0 && spec.line_thickness < spec.lane_width) {
            return Err(SimError::InvalidRoad("need 0 < line_thickness < lane_width".into()));
        }
        let mut placed = Vec::with_capacity(spec.segments.len());
        let (mut x, mut y, mut h, mut s) = (spec.start.x, spec.start.y, spec.start.heading, 0.0);
        for (i, seg) in spec.segments.iter().enumerate() {
            match *seg {
                Segment::Straight { length } if !(length > 0.0 && length.is_finite()) => {
                    return Err(SimError::InvalidRoad(format!("segment {i}: length must be positive")));
                }
                Segment::Arc { radius, angle }
                    if !(radius > 0.0 && radius.is_finite() && angle != 0.0 && angle.abs() < TAU) =>
                {
                    return Err(SimError::InvalidRoad(format!(
                        "segment {i}: arc needs radius > 0 and 0 < |angle| < 2π"
                    )));
                }
                Segment::Arc { radius, .. } if radius <= spec.lane_width / 2.0 => {
                    return Err(SimError::InvalidRoad(format!(
                        "segment {i}: radius {radius} does not fit half the lane width"
                    )));
                }
                _ => {}
            }
            let p = Placed { seg: *seg, s0: s, x0: x, y0: y, heading0: h };
            let end = p.pose_at(seg.length());
            placed.push(p);
            x = end.x;
            y = end.y;
            h = end.tangent;
            s += seg.length();
        }
        Ok(RoadModel { spec, placed, total: s })
    }

    pub fn spec(&self) -> &RoadSpec {
        &self.spec
    }

    pub fn total_length(&self) -> f64 {
        self.total
    }

    pub fn lane_width(&self) -> f64 {
        self.spec.lane_width
    }

    pub fn line_thickness(&self) -> f64 {
        self.spec.line_thickness
    }

    fn segment_index(&self, s: f64) -> usize {
        match self.placed.binary_search_by(|p| p.s0.total_cmp(&s)) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        }
    }

    /// Centerline point and tangent at arclength `s`.
    pub fn road_pose(&self, s: f64) -> Result<RoadPose, SimError> {
        if !(s >= 0.0 && s <= self.total) {
            return Err(SimError::OutOfRoad { arclength: s, total: self.total });
        }
        let p = &self.placed[self.segment_index(s)];
        Ok(p.pose_at((s - p.s0).min(p.seg.length())))
    }

    /// Like [`road_pose`](Self::road_pose) but clamps `s` into the road.
    pub fn road_pose_clamped(&self, s: f64) -> RoadPose {
        let s = s.clamp(0.0, self.total);
        let p = &self.placed[self.segment_index(s)];
        p.pose_at((s - p.s0).min(p.seg.length()))
    }

    /// Pose of the vehicle displaced `offset` along the left normal at `s`,
    /// rotated `heading_rel` from the tangent.
    pub fn vehicle_at(&self, s: f64, offset: f64, heading_rel: f64, speed: f64) -> Result<VehicleState, SimError> {
        let p = self.road_pose(s)?;
        let (nx, ny) = p.left_normal();
        Ok(VehicleState::new(p.x + offset * nx, p.y + offset * ny, wrap_angle(p.tangent + heading_rel), speed))
    }

    pub(crate) fn segment_range(&self, s_lo: f64, s_hi: f64) -> impl Iterator<Item = usize> + '_ {
        self.placed
            .iter()
            .enumerate()
            .filter(move |(_, p)| !(p.s0 > s_hi || p.s0 + p.seg.length() < s_lo))
            .map(|(i, _)| i)
    }

    pub(crate) fn project_segment(&self, i: usize, qx: f64, qy: f64) -> SegmentProjection {
        self.placed[i].project(qx, qy)
    }

    /// Arclength of the centerline point nearest `(x, y)`: a coarse scan at
    /// 2 cm spacing refined by golden-section search to 1e-4 m.
    pub fn nearest_arclength(&self, x: f64, y: f64) -> f64 {
        self.nearest_in(x, y, 0.0, self.total)
    }

    fn nearest_in(&self, x: f64, y: f64, lo: f64, hi: f64) -> f64 {
        let dist2 = |s: f64| {
            let p = self.road_pose_clamped(s);
            (p.x - x).powi(2) + (p.y - y).powi(2)
        };
        let step = 0.02f64.min((hi - lo).max(1e-6) / 4.0);
        let n = ((hi - lo) / step).ceil().max(1.0) as usize;
        let (mut best_s, mut best_d) = (lo, f64::INFINITY);
        for k in 0..=n {
            let s = (lo + k as f64 * step).min(hi);
            let d = dist2(s);
            if d < best_d {
                best_d = d;
                best_s = s;
            }
        }
        golden_section(dist2, (best_s - step).max(lo), (best_s + step).min(hi), 1e-4)
    }

    /// Lateral offset, relative heading and arclength of `state`.
    pub fn lateral_state(&self, state: &VehicleState) -> Result<LateralState, SimError> {
        let s = self.nearest_arclength(state.x, state.y);
        self.lateral_state_at(state, s)
    }

    /// Same as [`lateral_state`](Self::lateral_state), searching only within
    /// `window` metres of `hint`.
    pub fn lateral_state_near(&self, state: &VehicleState, hint: f64, window: f64) -> Result<LateralState, SimError> {
        let lo = (hint - window).max(0.0);
        let hi = (hint + window).min(self.total);
        let s = self.nearest_in(state.x, state.y, lo, hi);
        self.lateral_state_at(state, s)
    }

    fn lateral_state_at(&self, state: &VehicleState, s: f64) -> Result<LateralState, SimError> {
        let p = self.road_pose_clamped(s);
        let (nx, ny) = p.left_normal();
        let offset = (state.x - p.x) * nx + (state.y - p.y) * ny;
        if offset.abs() > 2.0 * self.spec.lane_width {
            return Err(SimError::OffRoad { offset });
        }
        Ok(LateralState { offset, heading_rel_road: wrap_angle(state.heading - p.tangent), arclength: s })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LateralState {
    /// metres, positive left of the centerline
    pub offset: f64,
    /// radians in (−π, π]
    pub heading_rel_road: f64,
    pub arclength: f64,
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

impl Placed {
    fn pose_at(&self, l: f64) -> RoadPose {
        match self.seg {
            Segment::Straight { .. } => RoadPose {
                x: self.x0 + l * self.heading0.cos(),
                y: self.y0 + l * self.heading0.sin(),
                tangent: self.heading0,
            },
            Segment::Arc { radius, angle } => {
                let sigma = angle.signum();
                let (cx, cy) = self.arc_center(radius, sigma);
                let th = self.heading0 + sigma * l / radius;
                RoadPose { x: cx + sigma * radius * th.sin(), y: cy - sigma * radius * th.cos(), tangent: wrap_angle(th) }
            }
        }
    }

    fn arc_center(&self, radius: f64, sigma: f64) -> (f64, f64) {
        (self.x0 - sigma * radius * self.heading0.sin(), self.y0 + sigma * radius * self.heading0.cos())
    }

    fn project(&self, qx: f64, qy: f64) -> SegmentProjection {
        match self.seg {
            Segment::Straight { length } => {
                let (dx, dy) = (self.heading0.cos(), self.heading0.sin());
                let (vx, vy) = (qx - self.x0, qy - self.y0);
                let t = (vx * dx + vy * dy).clamp(0.0, length);
                let (px, py) = (self.x0 + t * dx, self.y0 + t * dy);
                let signed_lat = vx * -dy + vy * dx;
                let distance = (qx - px).hypot(qy - py);
                SegmentProjection { distance, signed: distance.copysign(signed_lat), arclength: self.s0 + t }
            }
            Segment::Arc { radius, angle } => {
                let sigma = angle.signum();
                let (cx, cy) = self.arc_center(radius, sigma);
                let (vx, vy) = (qx - cx, qy - cy);
                let rho = vx.hypot(vy);
                // polar angle of the start point as seen from the center
                let phi0 = (self.y0 - cy).atan2(self.x0 - cx);
                let sweep = (sigma * (vy.atan2(vx) - phi0)).rem_euclid(TAU);
                let span = angle.abs();
                if sweep <= span {
                    let signed = sigma * (radius - rho);
                    SegmentProjection { distance: signed.abs(), signed, arclength: self.s0 + sweep * radius }
                } else {
                    // beyond the arc: the nearer endpoint wins
                    let to_end = sweep - span;
                    let to_start = TAU - sweep;
                    let l = if to_end < to_start { span * radius } else { 0.0 };
                    let p = self.pose_at(l);
                    let (nx, ny) = (-p.tangent.sin(), p.tangent.cos());
                    let signed_lat = (qx - p.x) * nx + (qy - p.y) * ny;
                    let distance = (qx - p.x).hypot(qy - p.y);
                    SegmentProjection { distance, signed: distance.copysign(signed_lat), arclength: self.s0 + l }
                }
            }
        }
    }
}

/// Convenience for tests and scenes: `PI`-fraction arcs.
pub fn quarter_turn(radius: f64, left: bool) -> Segment {
    Segment::Arc { radius, angle: if left { PI / 2.0 } else { -PI / 2.0 } }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn road(segments: Vec<Segment>) -> RoadModel {
        RoadModel::new(RoadSpec { start: RoadStart::default(), segments, lane_width: 0.5, line_thickness: 0.02 }).unwrap()
    }

    #[test]
    fn straight_pose() {
        let r = road(vec![Segment::Straight { length: 5.0 }]);
        let p = r.road_pose(2.0).unwrap();
        assert_eq!((p.x, p.y, p.tangent), (2.0, 0.0, 0.0));
    }

    #[test]
    fn quarter_arc_endpoint() {
        let r = road(vec![quarter_turn(5.0, true)]);
        let p = r.road_pose(5.0 * PI / 2.0).unwrap();
        assert!((p.x - 5.0).abs() < 1e-12 && (p.y - 5.0).abs() < 1e-12);
        assert!((p.tangent - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn right_arc_goes_down() {
        let r = road(vec![quarter_turn(2.0, false)]);
        let p = r.road_pose(PI).unwrap();
        assert!((p.x - 2.0).abs() < 1e-12 && (p.y + 2.0).abs() < 1e-12);
        assert!((p.tangent + PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_road() {
        let r = road(vec![Segment::Straight { length: 1.0 }]);
        assert!(matches!(r.road_pose(1.5), Err(SimError::OutOfRoad { .. })));
        assert!(matches!(r.road_pose(-0.1), Err(SimError::OutOfRoad { .. })));
    }

    #[test]
    fn rejects_bad_segments() {
        let bad = RoadSpec {
            start: RoadStart::default(),
            segments: vec![Segment::Straight { length: -1.0 }],
            lane_width: 0.5,
            line_thickness: 0.02,
        };
        assert!(RoadModel::new(bad).is_err());
        let tight = RoadSpec {
            start: RoadStart::default(),
            segments: vec![quarter_turn(0.2, true)],
            lane_width: 0.5,
            line_thickness: 0.02,
        };
        assert!(RoadModel::new(tight).is_err());
    }

    #[test]
    fn centered_vehicle_has_zero_state() {
        let r = road(vec![Segment::Straight { length: 2.0 }, quarter_turn(1.5, true)]);
        let v = r.vehicle_at(2.5, 0.0, 0.0, 0.5).unwrap();
        let ls = r.lateral_state(&v).unwrap();
        assert!(ls.offset.abs() < 1e-6);
        assert!(ls.heading_rel_road.abs() < 1e-4);
        assert!((ls.arclength - 2.5).abs() < 2e-4);
    }

    #[test]
    fn left_normal_offset_is_positive() {
        let r = road(vec![Segment::Straight { length: 4.0 }]);
        let v = r.vehicle_at(1.0, 0.1, 0.0, 0.0).unwrap();
        assert!((r.lateral_state(&v).unwrap().offset - 0.1).abs() < 1e-9);
    }

    #[test]
    fn far_vehicle_is_off_road() {
        let r = road(vec![Segment::Straight { length: 4.0 }]);
        let v = VehicleState::new(1.0, 3.0, 0.0, 0.0);
        assert!(matches!(r.lateral_state(&v), Err(SimError::OffRoad { .. })));
    }

    #[test]
    fn segment_projection_signs() {
        let r = road(vec![quarter_turn(1.0, true), quarter_turn(1.0, false)]);
        // inside the first (left) arc is left of the centerline
        let pr = r.project_segment(0, 0.5, 0.3);
        assert!(pr.signed > 0.0);
    }
}
