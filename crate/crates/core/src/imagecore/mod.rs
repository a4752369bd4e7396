//! Images, PGM I/O, thresholding and the bird's-eye perspective warp.
//!
//! Coordinates: origin top-left, `x` rightward along columns, `y` downward
//! along rows. The bottom row is nearest the vehicle.

mod homography;
mod image;
mod pgm;

pub use homography::{homography_from_quads, warp_perspective, Homography};
pub use image::{threshold, BinaryImage, GrayImage};
pub use pgm::{decode_pgm, encode_pgm, load_pgm, save_pgm, PgmFormat};

#[derive(Debug, thiserror::Error)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1")]
    EmptyImage,
    #[error("pixel buffer has {got} entries, expected {expected}")]
    DataLength { expected: usize, got: usize },
    #[error("homography is singular")]
    SingularHomography,
    #[error("three of the quad corners are collinear")]
    DegenerateQuad,
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("PGM raster truncated: expected {expected} pixels, got {got}")]
    TruncatedData { expected: usize, got: usize },
    #[error("invalid PGM pixel value {0}")]
    InvalidPixel(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
