//! Perspective to bird's-eye: draw converging lane lines, find the
//! homography that straightens them, warp, and save both views as PGM.
//!
//! Output goes to the directory given as the first argument, or the system
//! temp directory.

use std::path::PathBuf;

use lanekeep::imagecore::{homography_from_quads, load_pgm, save_pgm, threshold, warp_perspective, BinaryImage, PgmFormat};

fn main() {
    let (w, h) = (200usize, 120usize);
    // lines meet toward the horizon: x = 60..80 on the left, 140..120 on the right
    let mut camera = BinaryImage::new(w, h).expect("non-zero size");
    for y in 0..h {
        let t = y as f64 / (h - 1) as f64;
        for x0 in [80.0 - 50.0 * t, 120.0 + 50.0 * t] {
            for x in (x0 - 2.0) as usize..=(x0 + 2.0) as usize {
                camera.set(x, y, true);
            }
        }
    }
    let road = [(80.0, 0.0), (120.0, 0.0), (170.0, 119.0), (30.0, 119.0)];
    let rect = [(30.0, 0.0), (170.0, 0.0), (170.0, 119.0), (30.0, 119.0)];
    let hmg = homography_from_quads(road, rect).expect("non-degenerate quads");
    let top = warp_perspective(&camera, &hmg).expect("invertible homography");

    for y in [0, 60, 119] {
        let cols: Vec<usize> = (0..w).filter(|&x| top.get(x, y)).collect();
        println!("row {y:>3}: camera {:>3}..{:<3}  bird's-eye {:>3}..{:<3}", first(&camera, y), last(&camera, y), cols[0], cols[cols.len() - 1]);
    }

    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    for (name, img) in [("camera.pgm", &camera), ("birds_eye.pgm", &top)] {
        let path = dir.join(name);
        save_pgm(&img.to_gray(), &path, PgmFormat::P5).expect("writable output dir");
        let back = threshold(&load_pgm(&path).expect("just written"), 128);
        assert_eq!(&back, img);
        println!("wrote {}", path.display());
    }
}

fn first(img: &BinaryImage, y: usize) -> usize {
    (0..img.width()).find(|&x| img.get(x, y)).unwrap_or(0)
}

fn last(img: &BinaryImage, y: usize) -> usize {
    (0..img.width()).rev().find(|&x| img.get(x, y)).unwrap_or(0)
}
