use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use lanekeep::cli::{ParkingConfig, ScenarioConfig, SceneConfig, SceneKind};
use lanekeep::control::ControllerGains;
use lanekeep::parking::{gap_layout, wall_layout, ParkingVehicle};
use lanekeep::simulator::Segment;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn lanekeep(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_lanekeep")).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_config(dir: &Path, name: &str, cfg: &ScenarioConfig) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, cfg.to_json()).unwrap();
    path
}

fn scene_config(kind: SceneKind, frames: usize) -> ScenarioConfig {
    ScenarioConfig { scene: SceneConfig { kind, frames }, ..Default::default() }
}

/// Every file under `dir`, keyed by relative path.
fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for e in fs::read_dir(dir).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

fn truth_rows(dir: &Path) -> Vec<BTreeMap<String, String>> {
    let mut rd = csv::Reader::from_path(dir.join("truth.csv")).unwrap();
    rd.deserialize().map(|r| r.unwrap()).collect()
}

fn num(row: &BTreeMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap()
}

#[test]
fn help_and_bad_arguments() {
    assert_eq!(lanekeep(&["--help"]).code, 0);
    assert_eq!(lanekeep(&["no-such-command"]).code, 2);
    assert_eq!(lanekeep(&["simulate", "--seed", "minus-one"]).code, 2);
}

#[test]
fn invalid_config_names_the_field() {
    let dir = TempDir::new().unwrap();
    let mut cfg = ScenarioConfig::default();
    cfg.road.lane_width = -0.5;
    let bad = dir.path().join("bad.json");
    fs::write(&bad, cfg.to_json()).unwrap();
    let r = lanekeep(&["simulate", "--config", p(&bad), "--out", p(dir.path())]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("road.lane_width"), "{}", r.stderr);

    let unknown = dir.path().join("unknown.json");
    fs::write(&unknown, r#"{"gains": {"k_distance": 0.01, "k_dist": 1}}"#).unwrap();
    let r = lanekeep(&["simulate", "--config", p(&unknown), "--out", p(dir.path())]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("gains"), "{}", r.stderr);

    let missing = dir.path().join("missing.json");
    assert_eq!(lanekeep(&["park", "--config", p(&missing), "--out", p(dir.path())]).code, 2);
}

#[test]
fn straight_scene_truth_matches_pose() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", &scene_config(SceneKind::Straight, 12));
    let out = dir.path().join("scene");
    assert_eq!(lanekeep(&["gen-scene", "--config", p(&cfg), "--out", p(&out)]).code, 0);
    let rows = truth_rows(&out);
    assert_eq!(rows.len(), 12);
    for (k, r) in rows.iter().enumerate() {
        let name = format!("frame_{:06}", k + 1);
        assert!(out.join(format!("{name}.pgm")).is_file());
        assert!(out.join("truth").join(format!("{name}_left.pgm")).is_file());
        // 400 px per metre, lines shift opposite to the vehicle
        let expected = num(r, "offset_m") * 400.0 / num(r, "heading").cos();
        assert!((num(r, "err_px") - expected).abs() <= 1.0, "{name}: {} vs {expected}", num(r, "err_px"));
    }
}

/// A centred drive down a straight road: truth errors stay at zero and the
/// tracker reproduces them.
#[test]
fn straight_drive_scene_is_centred() {
    let dir = TempDir::new().unwrap();
    let mut cfg = scene_config(SceneKind::Drive, 20);
    cfg.road.segments = vec![Segment::Straight { length: 5.0 }];
    let cfg = write_config(dir.path(), "cfg.json", &cfg);
    let scene = dir.path().join("scene");
    assert_eq!(lanekeep(&["gen-scene", "--config", p(&cfg), "--out", p(&scene)]).code, 0);
    let rows = truth_rows(&scene);
    assert_eq!(rows.len(), 20);
    for (k, r) in rows.iter().enumerate() {
        assert!(num(r, "err_px").abs() <= 1.0, "frame {}: {}", k + 1, num(r, "err_px"));
        let frame = scene.join(format!("frame_{:06}.pgm", k + 1));
        let out = dir.path().join("track");
        let t = lanekeep(&["track", p(&frame), "--out", p(&out)]);
        assert_eq!(t.code, 0, "{}", t.stderr);
        let report: serde_json::Value = serde_json::from_str(&t.stdout).unwrap();
        let got = report["distance_error_px"].as_f64().unwrap();
        assert!((got - num(r, "err_px")).abs() <= 2.0, "frame {}: {got}", k + 1);
    }
}

#[test]
fn track_agrees_with_truth() {
    let dir = TempDir::new().unwrap();
    let scene = dir.path().join("scene");
    assert_eq!(lanekeep(&["gen-scene", "--out", p(&scene)]).code, 0);
    let rows = truth_rows(&scene);
    assert_eq!(rows.len(), 20);
    for k in [1usize, 7, 20] {
        let frame = scene.join(format!("frame_{k:06}.pgm"));
        let out = dir.path().join(format!("track{k}"));
        let r = lanekeep(&["track", p(&frame), "--out", p(&out)]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("track.json")).unwrap()).unwrap();
        let stdout: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
        assert_eq!(report, stdout);
        let got = report["distance_error_px"].as_f64().unwrap();
        let want = num(&rows[k - 1], "err_px");
        assert!((got - want).abs() <= 2.0, "frame {k}: {got} vs {want}");
        assert_eq!(report["lanes_seen"], "both");
    }
}

#[test]
fn track_failures() {
    let dir = TempDir::new().unwrap();
    let blank = dir.path().join("blank.pgm");
    fs::write(&blank, format!("P5\n40 30\n255\n{}", "\0".repeat(1200))).unwrap();
    let r = lanekeep(&["track", p(&blank), "--out", p(dir.path())]);
    assert_eq!(r.code, 3, "{}", r.stderr);

    let corrupt = dir.path().join("corrupt.pgm");
    fs::write(&corrupt, "P5\n40 30\n255\nshort").unwrap();
    assert_eq!(lanekeep(&["track", p(&corrupt), "--out", p(dir.path())]).code, 2);
    assert_eq!(lanekeep(&["track", p(&dir.path().join("absent.pgm")), "--out", p(dir.path())]).code, 2);
}

#[test]
fn compare_on_sharp_corpus() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", &scene_config(SceneKind::Sharp, 8));
    let corpus = dir.path().join("corpus");
    assert_eq!(lanekeep(&["gen-scene", "--config", p(&cfg), "--out", p(&corpus)]).code, 0);
    let out = dir.path().join("cmp");
    assert_eq!(lanekeep(&["compare", p(&corpus), "--out", p(&out)]).code, 0);
    let mut rd = csv::Reader::from_path(out.join("compare.csv")).unwrap();
    let rows: Vec<(String, f64, f64)> = rd.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 8);
    for (frame, ribbon, sliding) in rows {
        assert!(ribbon >= sliding, "{frame}: {ribbon} < {sliding}");
    }

    let cfg = write_config(dir.path(), "straight.json", &scene_config(SceneKind::Straight, 10));
    let corpus = dir.path().join("straight");
    assert_eq!(lanekeep(&["gen-scene", "--config", p(&cfg), "--out", p(&corpus)]).code, 0);
    assert_eq!(lanekeep(&["compare", p(&corpus), "--out", p(&out)]).code, 0);
    let mut rd = csv::Reader::from_path(out.join("compare.csv")).unwrap();
    for row in rd.deserialize::<(String, f64, f64)>() {
        let (frame, ribbon, sliding) = row.unwrap();
        assert!(ribbon >= 0.95 && sliding >= 0.95, "{frame}: {ribbon} / {sliding}");
    }

    // a frame without its truth masks
    fs::remove_file(corpus.join("truth").join("frame_000002_left.pgm")).unwrap();
    assert_eq!(lanekeep(&["compare", p(&corpus), "--out", p(&out)]).code, 2);

    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert_eq!(lanekeep(&["compare", p(&empty), "--out", p(&out)]).code, 2);
}

#[test]
fn zero_gain_simulation_leaves_road() {
    let dir = TempDir::new().unwrap();
    let cfg = ScenarioConfig { gains: ControllerGains::zero(), ..Default::default() };
    let cfg = write_config(dir.path(), "cfg.json", &cfg);
    let r = lanekeep(&["simulate", "--config", p(&cfg), "--out", p(dir.path())]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let footer = trace.lines().last().unwrap();
    assert!(footer.starts_with("# outcome=VehicleLeftRoad"), "{footer}");
}

fn park_status(dir: &Path, name: &str, parking: ParkingConfig) -> serde_json::Value {
    let cfg = ScenarioConfig { parking: Some(parking), ..Default::default() };
    let cfg = write_config(dir, &format!("{name}.json"), &cfg);
    let out = dir.join(name);
    let r = lanekeep(&["park", "--config", p(&cfg), "--out", p(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    serde_json::from_str(&fs::read_to_string(out.join("park.json")).unwrap()).unwrap()
}

#[test]
fn park_statuses() {
    let dir = TempDir::new().unwrap();
    let v = ParkingVehicle::default();

    let planned = park_status(dir.path(), "ok", ParkingConfig::default());
    assert_eq!(planned["status"], "planned");
    assert_eq!(planned["collides_with_layout"], false);
    let segs = planned["plan"]["segments"].as_array().unwrap();
    assert!(segs.len() >= 2);
    assert!((planned["lateral_gap_m"].as_f64().unwrap() - 0.15).abs() < 1e-9);

    let wall = ParkingConfig { layout: wall_layout(3.0, 0.15, &v), lateral_gap: Some(0.15), ..Default::default() };
    assert_eq!(park_status(dir.path(), "wall", wall)["status"], "no_space");

    let small = ParkingConfig { layout: gap_layout(0.5, 0.15, &v), ..Default::default() };
    assert_eq!(park_status(dir.path(), "small", small)["status"], "space_too_small");

    // ghost echoes are removed before detection
    let mut ghosts = ParkingConfig::default();
    ghosts.ghost_echoes.count = 3;
    assert_eq!(park_status(dir.path(), "ghosts", ghosts)["status"], "planned");
}

#[test]
fn fit_distance_recovers_exact_model() {
    let dir = TempDir::new().unwrap();
    let samples = dir.path().join("samples.csv");
    let mut text = String::from("pixel_height,true_distance\n");
    for d in [0.4, 0.8, 1.2, 1.6, 2.0, 2.4] {
        text.push_str(&format!("{},{d}\n", 90.0 / d + 3.0));
    }
    fs::write(&samples, text).unwrap();
    let r = lanekeep(&["fit-distance", p(&samples), "--out", p(dir.path())]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("model.json")).unwrap()).unwrap();
    assert!((m["a"].as_f64().unwrap() - 90.0).abs() < 1e-9);
    assert!((m["b"].as_f64().unwrap() - 3.0).abs() < 1e-9);

    // 2% multiplicative noise on a generated file
    let noisy = dir.path().join("noisy.csv");
    let mut text = String::from("pixel_height,true_distance\n");
    for k in 0..20 {
        let d = 0.3 + 0.1 * k as f64;
        let wobble = 0.02 * ((k * 7919) % 13) as f64 / 6.0 - 0.02;
        text.push_str(&format!("{},{d}\n", 90.0 / d * (1.0 + wobble)));
    }
    fs::write(&noisy, text).unwrap();
    let r = lanekeep(&["fit-distance", p(&noisy), "--out", p(dir.path())]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let m: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert!((m["a"].as_f64().unwrap() - 90.0).abs() / 90.0 < 0.03, "{m}");

    let two = dir.path().join("two.csv");
    fs::write(&two, "pixel_height,true_distance\n100,1\n50,2\n").unwrap();
    assert_eq!(lanekeep(&["fit-distance", p(&two), "--out", p(dir.path())]).code, 2);
}

/// Runs `args` twice into fresh directories and requires identical output
/// trees and stdout.
pub fn assert_deterministic(name: &str, args: &[&str], input_dir: &Path) {
    let runs: Vec<(BTreeMap<PathBuf, Vec<u8>>, String)> = (0..2)
        .map(|k| {
            let out = input_dir.join(format!("{name}_run{k}"));
            let mut full: Vec<&str> = args.to_vec();
            full.extend(["--out", p(&out)]);
            let r = lanekeep(&full);
            assert_eq!(r.code, 0, "{name}: {}", r.stderr);
            (snapshot(&out), r.stdout)
        })
        .collect();
    assert!(!runs[0].0.is_empty(), "{name} wrote nothing");
    assert_eq!(runs[0].0.keys().collect::<Vec<_>>(), runs[1].0.keys().collect::<Vec<_>>(), "{name}");
    for (path, bytes) in &runs[0].0 {
        assert!(bytes == &runs[1].0[path], "{name}: {} differs", path.display());
    }
    assert_eq!(runs[0].1, runs[1].1, "{name}: stdout differs");
}

#[test]
fn every_command_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let noisy = ScenarioConfig {
        dump_frames: true,
        duration: 5.0,
        noise: lanekeep::simulator::NoiseModel { salt_prob: 0.01, imu_noise_std: 0.5, ..Default::default() },
        ..Default::default()
    };
    let cfg = write_config(d, "noisy.json", &noisy);
    let c = p(&cfg);

    assert_deterministic("gen", &["gen-scene", "--config", c, "--seed", "9"], d);
    assert_deterministic("sim", &["simulate", "--config", c, "--seed", "9"], d);
    assert_deterministic("park", &["park", "--seed", "9"], d);

    let frame = d.join("gen_run0").join("frame_000003.pgm");
    assert_deterministic("track", &["track", p(&frame), "--seed", "9"], d);
    let corpus = d.join("gen_run0");
    assert_deterministic("compare", &["compare", p(&corpus), "--seed", "9"], d);

    let samples = d.join("samples.csv");
    fs::write(&samples, "pixel_height,true_distance\n121,1\n59,2\n41.5,3\n").unwrap();
    assert_deterministic("fit", &["fit-distance", p(&samples)], d);

    // a different seed actually changes noisy output
    let other = d.join("gen_other");
    assert_eq!(lanekeep(&["gen-scene", "--config", c, "--seed", "10", "--out", p(&other)]).code, 0);
    assert_ne!(snapshot(&other), snapshot(&d.join("gen_run0")));
}
