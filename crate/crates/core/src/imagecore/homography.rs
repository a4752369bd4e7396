use super::{BinaryImage, ImageError};
use crate::linalg::solve_dense;

const SINGULAR_DET: f64 = 1e-12;

/// Planar projective transform on pixel coordinates, normalized so `m[2][2] == 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography {
    m: [[f64; 3]; 3],
}

impl Homography {
    pub const IDENTITY: Homography =
        Homography { m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] };

    /// Wraps a matrix, rescaling it so the bottom-right entry is 1.
    pub fn from_matrix(m: [[f64; 3]; 3]) -> Result<Self, ImageError> {
        let s = m[2][2];
        if !m.iter().flatten().all(|v| v.is_finite()) || s.abs() <= SINGULAR_DET {
            return Err(ImageError::SingularHomography);
        }
        let mut out = m;
        out.iter_mut().flatten().for_each(|v| *v /= s);
        let h = Homography { m: out };
        if h.det().abs() <= SINGULAR_DET {
            return Err(ImageError::SingularHomography);
        }
        Ok(h)
    }

    pub fn translation(dx: f64, dy: f64) -> Self {
        Homography { m: [[1.0, 0.0, dx], [0.0, 1.0, dy], [0.0, 0.0, 1.0]] }
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn inverse(&self) -> Result<Self, ImageError> {
        let det = self.det();
        if det.abs() <= SINGULAR_DET {
            return Err(ImageError::SingularHomography);
        }
        let m = &self.m;
        let adj = [
            [
                m[1][1] * m[2][2] - m[1][2] * m[2][1],
                m[0][2] * m[2][1] - m[0][1] * m[2][2],
                m[0][1] * m[1][2] - m[0][2] * m[1][1],
            ],
            [
                m[1][2] * m[2][0] - m[1][0] * m[2][2],
                m[0][0] * m[2][2] - m[0][2] * m[2][0],
                m[0][2] * m[1][0] - m[0][0] * m[1][2],
            ],
            [
                m[1][0] * m[2][1] - m[1][1] * m[2][0],
                m[0][1] * m[2][0] - m[0][0] * m[2][1],
                m[0][0] * m[1][1] - m[0][1] * m[1][0],
            ],
        ];
        let mut inv = adj;
        inv.iter_mut().flatten().for_each(|v| *v /= det);
        Self::from_matrix(inv)
    }

    /// Maps a point; `None` when it lands on the line at infinity.
    pub fn apply(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        let m = &self.m;
        let w = m[2][0] * x + m[2][1] * y + m[2][2];
        if w.abs() < 1e-15 {
            return None;
        }
        Some(((m[0][0] * x + m[0][1] * y + m[0][2]) / w, (m[1][0] * x + m[1][1] * y + m[1][2]) / w))
    }
}

fn collinear(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> bool {
    let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
    let scale = [(b.0 - a.0).hypot(b.1 - a.1), (c.0 - a.0).hypot(c.1 - a.1)]
        .iter()
        .fold(0.0f64, |m, v| m.max(*v));
    cross.abs() <= 1e-9 * scale * scale.max(1.0)
}

fn has_collinear_triple(q: &[(f64, f64); 4]) -> bool {
    [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
        .iter()
        .any(|&(i, j, k)| collinear(q[i], q[j], q[k]))
}

/// Direct linear solve for the homography taking each `src[i]` to `dst[i]`.
pub fn homography_from_quads(
    src: [(f64, f64); 4],
    dst: [(f64, f64); 4],
) -> Result<Homography, ImageError> {
    if has_collinear_triple(&src) || has_collinear_triple(&dst) {
        return Err(ImageError::DegenerateQuad);
    }
    let mut a = Vec::with_capacity(64);
    let mut b = Vec::with_capacity(8);
    for (&(x, y), &(u, v)) in src.iter().zip(&dst) {
        a.extend_from_slice(&[x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y]);
        b.push(u);
        a.extend_from_slice(&[0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y]);
        b.push(v);
    }
    let h = solve_dense(a, b).ok_or(ImageError::DegenerateQuad)?;
    Homography::from_matrix([[h[0], h[1], h[2]], [h[3], h[4], h[5]], [h[6], h[7], 1.0]])
}

/// Inverse-maps every output pixel through `h⁻¹` and samples the nearest
/// input pixel. Samples falling outside the input read as `false`.
pub fn warp_perspective(img: &BinaryImage, h: &Homography) -> Result<BinaryImage, ImageError> {
    let inv = h.inverse()?;
    let (w, hgt) = (img.width(), img.height());
    let mut out = BinaryImage::new(w, hgt)?;
    for y in 0..hgt {
        for x in 0..w {
            if let Some((sx, sy)) = inv.apply(x as f64, y as f64) {
                if sx.is_finite() && sy.is_finite() && img.get_signed(sx.round() as i64, sy.round() as i64) {
                    out.set(x, y, true);
                }
            }
        }
    }
    Ok(out)
}
