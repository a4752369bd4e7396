//! Netpbm graymap reader and writer (P2 plain and P5 raw, maxval ≤ 255).

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{GrayImage, ImageError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    /// ASCII, one image row per line.
    P2,
    /// Binary, one byte per pixel.
    P5,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let c = self.bytes[self.pos];
            if c == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_ws_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn header_number(&mut self, what: &str) -> Result<usize, ImageError> {
        let tok = self.token().ok_or_else(|| ImageError::MalformedHeader(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImageError::MalformedHeader(format!("bad {what}")))
    }
}

/// Parses a PGM from memory.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    let mut cur = Cursor { bytes, pos: 0 };
    let format = match cur.token() {
        Some(b"P2") => PgmFormat::P2,
        Some(b"P5") => PgmFormat::P5,
        _ => return Err(ImageError::MalformedHeader("magic must be P2 or P5".into())),
    };
    let width = cur.header_number("width")?;
    let height = cur.header_number("height")?;
    let maxval = cur.header_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(ImageError::MalformedHeader("zero dimension".into()));
    }
    if maxval == 0 || maxval > 255 {
        return Err(ImageError::MalformedHeader(format!("maxval {maxval} outside 1..=255")));
    }
    let n = width
        .checked_mul(height)
        .ok_or_else(|| ImageError::MalformedHeader("dimensions overflow".into()))?;

    let data = match format {
        PgmFormat::P5 => {
            // exactly one whitespace byte separates maxval from the raster
            let start = cur.pos + 1;
            if start > bytes.len() || bytes.len() - start < n {
                return Err(ImageError::TruncatedData { expected: n, got: bytes.len().saturating_sub(start) });
            }
            bytes[start..start + n].to_vec()
        }
        PgmFormat::P2 => {
            let mut data = Vec::with_capacity(n);
            for i in 0..n {
                let tok = cur.token().ok_or(ImageError::TruncatedData { expected: n, got: i })?;
                let v: usize = std::str::from_utf8(tok)
                    .ok()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| ImageError::InvalidPixel(String::from_utf8_lossy(tok).into_owned()))?;
                data.push(v);
            }
            data.into_iter()
                .map(|v| u8::try_from(v).map_err(|_| ImageError::InvalidPixel(v.to_string())))
                .collect::<Result<Vec<u8>, _>>()?
        }
    };
    if let Some(v) = data.iter().find(|&&v| v as usize > maxval) {
        return Err(ImageError::InvalidPixel(format!("{v} exceeds maxval {maxval}")));
    }
    GrayImage::from_vec(width, height, data)
}

/// Serializes with maxval 255.
pub fn encode_pgm(img: &GrayImage, format: PgmFormat) -> Vec<u8> {
    let (w, h) = (img.width(), img.height());
    let mut out = Vec::with_capacity(w * h * 4 + 32);
    match format {
        PgmFormat::P5 => {
            write!(out, "P5\n{w} {h}\n255\n").unwrap();
            out.extend_from_slice(img.data());
        }
        PgmFormat::P2 => {
            write!(out, "P2\n{w} {h}\n255\n").unwrap();
            for row in img.data().chunks(w) {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
    }
    out
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage, ImageError> {
    let bytes = fs::read(path)?;
    decode_pgm(&bytes)
}

pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>, format: PgmFormat) -> Result<(), ImageError> {
    fs::write(path, encode_pgm(img, format))?;
    Ok(())
}
