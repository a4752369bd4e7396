//! Ribbon tracker versus the sliding-window baseline on sharp curves where a
//! line leaves the image through its side.

use lanekeep::perception::{analyze_frame, sliding_window_track, LanePixelCluster, LaneSide, PerceptionConfig};
use lanekeep::simulator::{scenes, PixelLabel};

fn main() {
    let cfg = PerceptionConfig::default();
    let corpus = scenes::sharp_curve_corpus(12, 42);
    let empty = |side| LanePixelCluster { side, points: Vec::new() };

    println!("{:>5} {:>8} {:>8}", "scene", "ribbon", "sliding");
    let (mut rs, mut ss) = (0.0, 0.0);
    for (k, scene) in corpus.iter().enumerate() {
        let img = &scene.frame.image;
        let a = analyze_frame(img, &cfg).expect("default config is valid");
        let tl = scene.truth_mask(PixelLabel::LeftLine);
        let tr = scene.truth_mask(PixelLabel::RightLine);
        let ribbon = scenes::combined_capture(
            a.left.as_ref().unwrap_or(&empty(LaneSide::Left)),
            a.right.as_ref().unwrap_or(&empty(LaneSide::Right)),
            &tl,
            &tr,
        );
        let sw = |b: Option<usize>, side| b.map_or_else(|| empty(side), |b| sliding_window_track(img, b, side, &cfg.sliding));
        let sliding = scenes::combined_capture(&sw(a.base.left, LaneSide::Left), &sw(a.base.right, LaneSide::Right), &tl, &tr);
        println!("{k:>5} {ribbon:>8.3} {sliding:>8.3}");
        rs += ribbon;
        ss += sliding;
    }
    let n = corpus.len() as f64;
    println!("{:>5} {:>8.3} {:>8.3}", "mean", rs / n, ss / n);
}
