use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ScenarioConfig, SceneKind};
use super::{io_err, CliError};
use crate::imagecore::{load_pgm, save_pgm, threshold, BinaryImage, PgmFormat};
use crate::parking::{
    check_collision, detect_space, estimate_distance, fit_sign_distance_model, inject_spikes, interpolate_scan_with,
    plan_park_in_with, rollout, simulate_scan, DistanceModel, ManeuverPlan, ParkingError, ParkingSpace, RangeScan,
    SignHeightSample,
};
use crate::perception::{analyze_frame, sliding_window_track, LanePixelCluster, LaneSide};
use crate::simulator::{
    run_scenario, scenes, PixelLabel, RenderedFrame, RoadModel, SimError, SimTrace, VehicleState,
};

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    write_file(path, s)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>, CliError> {
    let f = File::create(path).map_err(|e| io_err(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(f)))
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    for r in rows {
        w.serialize(r).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn save_binary(img: &BinaryImage, path: &Path) -> Result<(), CliError> {
    save_pgm(&img.to_gray(), path, PgmFormat::P5).map_err(|e| io_err(path, e))
}

fn frame_name(k: usize) -> String {
    format!("frame_{k:06}")
}

/// One row of `truth.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRow {
    pub frame: usize,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub offset_m: Option<f64>,
    pub left_base_px: Option<f64>,
    pub right_base_px: Option<f64>,
    pub err_px: f64,
    pub alpha_deg: f64,
}

/// Frames (`frame_NNNNNN.pgm`), per-lane truth masks under `truth/`, and
/// `truth.csv` with pose and expected error signals. Returns the frame count.
pub fn cmd_gen_scene(cfg: &ScenarioConfig, out: &Path) -> Result<usize, CliError> {
    let seed = cfg.seed();
    let n = cfg.scene.frames;
    let scenes_: Vec<(RoadModel, VehicleState, RenderedFrame)> = match cfg.scene.kind {
        SceneKind::Drive => {
            let road = cfg.road_model()?;
            let mut params = cfg.scenario_params();
            params.duration = params.duration.min(n as f64 / params.fusion.vision_rate);
            let mut frames = Vec::new();
            let mut sink = |_: usize, s: &VehicleState, f: &RenderedFrame| frames.push((*s, f.clone()));
            run_scenario(&road, &params, Some(&mut sink)).map_err(|e| CliError::Input(e.to_string()))?;
            frames.into_iter().take(n).map(|(s, f)| (road.clone(), s, f)).collect()
        }
        kind => {
            let corpus = match kind {
                SceneKind::Straight => scenes::straight_corpus(n, seed),
                SceneKind::BasePoints => scenes::base_point_corpus(n, seed, cfg.noise.salt_prob),
                SceneKind::Sharp => scenes::sharp_curve_corpus(n, seed),
                SceneKind::Moderate => scenes::moderate_curve_corpus(n, seed),
                SceneKind::Drive => unreachable!(),
            };
            corpus.into_iter().map(|s| (s.road, s.state, s.frame)).collect()
        }
    };

    let truth_dir = out.join("truth");
    fs::create_dir_all(&truth_dir).map_err(|e| io_err(&truth_dir, e))?;
    let mut rows = Vec::with_capacity(scenes_.len());
    for (i, (road, state, frame)) in scenes_.iter().enumerate() {
        let k = i + 1;
        let name = frame_name(k);
        save_binary(&frame.image, &out.join(format!("{name}.pgm")))?;
        save_binary(&frame.truth(PixelLabel::LeftLine), &truth_dir.join(format!("{name}_left.pgm")))?;
        save_binary(&frame.truth(PixelLabel::RightLine), &truth_dir.join(format!("{name}_right.pgm")))?;
        let t = scenes::frame_truth(road, state, &cfg.camera, &frame.labels, cfg.perception.row_fraction);
        rows.push(TruthRow {
            frame: k,
            x: state.x,
            y: state.y,
            heading: state.heading,
            offset_m: road.lateral_state(state).ok().map(|l| l.offset),
            left_base_px: t.left_base,
            right_base_px: t.right_base,
            err_px: t.distance_error,
            alpha_deg: t.alpha_deg,
        });
    }
    write_csv(&out.join("truth.csv"), &rows)?;
    Ok(rows.len())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaneReport {
    pub base_px: usize,
    pub pixels: usize,
    /// `x(y) = c0 + c1·y + c2·y²`, absent when the cluster was too small to fit
    pub coefficients: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackReport {
    pub image: String,
    pub width: usize,
    pub height: usize,
    pub split_px: usize,
    pub left: Option<LaneReport>,
    pub right: Option<LaneReport>,
    pub distance_error_px: f64,
    pub alpha_deg: f64,
    pub lanes_seen: String,
}

fn load_binary(path: &Path) -> Result<BinaryImage, CliError> {
    let gray = load_pgm(path).map_err(|e| io_err(path, e))?;
    Ok(threshold(&gray, 128))
}

/// Full perception pipeline on one frame; writes `track.json`.
pub fn cmd_track(image: &Path, cfg: &ScenarioConfig, out: &Path) -> Result<TrackReport, CliError> {
    let img = load_binary(image)?;
    let a = analyze_frame(&img, &cfg.perception).map_err(|e| CliError::Input(e.to_string()))?;
    let fb = a.feedback.ok_or_else(|| CliError::Domain(format!("{}: no lanes visible", image.display())))?;
    let lane = |base: Option<usize>, c: &Option<LanePixelCluster>, fit: &Option<crate::perception::LanePolynomial>| {
        base.map(|b| LaneReport {
            base_px: b,
            pixels: c.as_ref().map_or(0, |c| c.len()),
            coefficients: fit.map(|p| p.coefficients),
        })
    };
    let report = TrackReport {
        image: image.display().to_string(),
        width: img.width(),
        height: img.height(),
        split_px: a.base.split,
        left: lane(a.base.left, &a.left, &a.left_fit),
        right: lane(a.base.right, &a.right, &a.right_fit),
        distance_error_px: fb.distance_error,
        alpha_deg: fb.angle_error_alpha,
        lanes_seen: fb.lanes_seen.as_str().to_string(),
    };
    write_json(&out.join("track.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub frame: String,
    pub ribbon_fraction: f64,
    pub sliding_fraction: f64,
}

fn corpus_frames(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let rd = fs::read_dir(dir).map_err(|e| io_err(dir, e))?;
    let mut frames: Vec<PathBuf> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("frame_") && n.ends_with(".pgm"))
        })
        .collect();
    frames.sort();
    if frames.is_empty() {
        return Err(CliError::Input(format!("{}: no frame_*.pgm files", dir.display())));
    }
    Ok(frames)
}

/// Capture fractions of both trackers against the truth masks; writes
/// `compare.csv`.
pub fn cmd_compare(corpus: &Path, cfg: &ScenarioConfig, out: &Path) -> Result<Vec<CompareRow>, CliError> {
    let mut rows = Vec::new();
    for path in corpus_frames(corpus)? {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        let img = load_binary(&path)?;
        let truth_l = load_binary(&corpus.join("truth").join(format!("{stem}_left.pgm")))?;
        let truth_r = load_binary(&corpus.join("truth").join(format!("{stem}_right.pgm")))?;
        if (truth_l.width(), truth_l.height()) != (img.width(), img.height()) || (truth_r.width(), truth_r.height()) != (img.width(), img.height()) {
            return Err(CliError::Input(format!("{stem}: truth mask size differs from frame")));
        }
        let (ribbon, sliding) = tracker_captures(&img, &truth_l, &truth_r, cfg);
        rows.push(CompareRow { frame: stem, ribbon_fraction: ribbon, sliding_fraction: sliding });
    }
    write_csv(&out.join("compare.csv"), &rows)?;
    Ok(rows)
}

/// Combined capture of the ribbon tracker and the sliding-window baseline,
/// both seeded from the same base points.
pub fn tracker_captures(img: &BinaryImage, truth_l: &BinaryImage, truth_r: &BinaryImage, cfg: &ScenarioConfig) -> (f64, f64) {
    let empty = |side| LanePixelCluster { side, points: Vec::new() };
    let a = analyze_frame(img, &cfg.perception).expect("perception config validated");
    let rl = a.left.unwrap_or_else(|| empty(LaneSide::Left));
    let rr = a.right.unwrap_or_else(|| empty(LaneSide::Right));
    let sw = |b: Option<usize>, side| b.map_or_else(|| empty(side), |b| sliding_window_track(img, b, side, &cfg.perception.sliding));
    let sl = sw(a.base.left, LaneSide::Left);
    let sr = sw(a.base.right, LaneSide::Right);
    (scenes::combined_capture(&rl, &rr, truth_l, truth_r), scenes::combined_capture(&sl, &sr, truth_l, truth_r))
}

/// Closed loop; writes `trace.csv` and, when enabled, `frames/`.
pub fn cmd_simulate(cfg: &ScenarioConfig, out: &Path) -> Result<SimTrace, CliError> {
    let road = cfg.road_model()?;
    let params = cfg.scenario_params();
    let frames_dir = out.join("frames");
    let mut dump_err = None;
    let trace = if cfg.dump_frames {
        fs::create_dir_all(&frames_dir).map_err(|e| io_err(&frames_dir, e))?;
        let mut sink = |k: usize, _: &VehicleState, f: &RenderedFrame| {
            if dump_err.is_none() {
                dump_err = save_binary(&f.image, &frames_dir.join(format!("{}.pgm", frame_name(k)))).err();
            }
        };
        run_scenario(&road, &params, Some(&mut sink))
    } else {
        run_scenario(&road, &params, None)
    }
    .map_err(|e: SimError| CliError::Input(e.to_string()))?;
    if let Some(e) = dump_err {
        return Err(e);
    }
    write_file(&out.join("trace.csv"), trace.to_csv())?;
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignReport {
    pub observed_height_px: f64,
    pub estimated_distance_m: f64,
    pub range_clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParkReport {
    /// `planned`, `no_space`, `space_too_small` or `plan_failed`
    pub status: String,
    pub message: Option<String>,
    pub sign: Option<SignReport>,
    pub search_from_m: f64,
    pub lateral_gap_m: f64,
    pub space: Option<ParkingSpace>,
    pub plan: Option<ManeuverPlan>,
    /// reverse travel from the end of the pass to the plan's start pose, m
    pub approach_m: Option<f64>,
    pub final_pose: Option<VehicleState>,
    pub collides_with_layout: Option<bool>,
}

#[derive(Debug, Serialize)]
struct RolloutRow {
    t: f64,
    x: f64,
    y: f64,
    heading: f64,
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    Some(v[v.len() / 2])
}

/// Scan pass, ghost-echo injection, sign ranging, interpolation, space
/// detection, park-in planning and rollout. Writes `scan.csv`,
/// `scan_clean.csv`, `space.json`, `plan.json`, `rollout.csv` and
/// `park.json`. Planning failures are reported, not raised.
pub fn cmd_park(cfg: &ScenarioConfig, out: &Path) -> Result<ParkReport, CliError> {
    let pc = cfg.parking.clone().unwrap_or_default();
    let input = |e: ParkingError| CliError::Input(e.to_string());
    let mut scan = simulate_scan(&pc.layout, &pc.vehicle).map_err(input)?;
    if pc.ghost_echoes.count > 0 {
        if let Some(gap) = detect_space(&scan, 0.3, pc.min_depth_mm) {
            scan = inject_spikes(&scan, gap.start_s + 0.05, gap.end_s - 0.05, pc.ghost_echoes.count, pc.ghost_echoes.range_mm);
        }
    }

    let sign = match (pc.layout.sign_x, &pc.sign_model) {
        (Some(sx), Some(model)) if sx > pc.layout.pass_start => {
            let h = model.height_at(sx - pc.layout.pass_start);
            let est = estimate_distance(model, h).map_err(input)?;
            Some(SignReport { observed_height_px: h, estimated_distance_m: est.distance, range_clamped: est.range_clamped })
        }
        _ => None,
    };
    let search_from = pc.layout.pass_start + sign.as_ref().map_or(0.0, |s| s.estimated_distance_m);

    let clean = interpolate_scan_with(&scan, &pc.interpolation);
    let window = RangeScan { samples: clean.samples.iter().copied().filter(|s| s.odometry_s >= search_from).collect() };
    let lateral_gap = match pc.lateral_gap {
        Some(g) => g,
        None => median(clean.samples.iter().filter(|s| s.range < pc.min_depth_mm).map(|s| s.range / 1000.0).collect())
            .ok_or_else(|| CliError::Input("no obstacle readings to estimate the lateral gap; set parking.lateral_gap".into()))?,
    };

    let mut report = ParkReport {
        status: "no_space".into(),
        message: None,
        sign,
        search_from_m: search_from,
        lateral_gap_m: lateral_gap,
        space: detect_space(&window, pc.min_space_length, pc.min_depth_mm),
        plan: None,
        approach_m: None,
        final_pose: None,
        collides_with_layout: None,
    };
    let mut rollout_rows = Vec::new();
    if let Some(space) = report.space {
        match plan_park_in_with(&space, &pc.vehicle, lateral_gap, &pc.planner) {
            Ok(plan) => {
                let dt = pc.planner.rollout_dt;
                let poses = rollout(&plan, pc.vehicle.wheelbase, dt);
                let fp = pc.vehicle.footprint();
                let hits = poses.iter().any(|p| check_collision(p, &fp, &pc.layout.obstacles));
                rollout_rows = poses
                    .iter()
                    .enumerate()
                    .map(|(k, p)| RolloutRow { t: k as f64 * dt, x: p.x, y: p.y, heading: p.heading })
                    .collect();
                report.status = "planned".into();
                report.approach_m = Some(pc.layout.pass_end - plan.start_pose.x);
                report.final_pose = poses.last().copied();
                report.collides_with_layout = Some(hits);
                report.plan = Some(plan);
            }
            Err(e @ ParkingError::SpaceTooSmall { .. }) => {
                report.status = "space_too_small".into();
                report.message = Some(e.to_string());
            }
            Err(e) => {
                report.status = "plan_failed".into();
                report.message = Some(e.to_string());
            }
        }
    }

    let path = out.join("scan.csv");
    scan.write_csv(File::create(&path).map_err(|e| io_err(&path, e))?).map_err(input)?;
    let path = out.join("scan_clean.csv");
    clean.write_csv(File::create(&path).map_err(|e| io_err(&path, e))?).map_err(input)?;
    write_json(&out.join("space.json"), &serde_json::json!({ "status": report.status, "space": report.space }))?;
    let plan_json = match &report.plan {
        Some(p) => serde_json::to_value(p).expect("plan serializes"),
        None => serde_json::json!({ "segments": [] }),
    };
    write_json(&out.join("plan.json"), &plan_json)?;
    write_csv(&out.join("rollout.csv"), &rollout_rows)?;
    write_json(&out.join("park.json"), &report)?;
    Ok(report)
}

/// Reads `pixel_height,true_distance` rows and writes `model.json`.
pub fn cmd_fit_distance(samples: &Path, out: &Path) -> Result<DistanceModel, CliError> {
    let mut rd = csv::Reader::from_path(samples).map_err(|e| io_err(samples, e))?;
    let rows: Vec<SignHeightSample> = rd.deserialize().collect::<Result<_, _>>().map_err(|e| io_err(samples, e))?;
    let model = fit_sign_distance_model(&rows).map_err(|e| CliError::Input(format!("{}: {e}", samples.display())))?;
    write_json(&out.join("model.json"), &model)?;
    Ok(model)
}
