//! Small dense solvers shared by the homography estimator and the curve fits.

/// Solves `a · x = b` in place by Gaussian elimination with partial pivoting.
///
/// `a` is row-major `n × n`. Returns `None` when a pivot falls below `1e-14`
/// relative to the largest entry of its column.
pub(crate) fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if a[pivot_row * n + col].abs() <= 1e-14 * scale {
            return None;
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }

    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row * n + row];
    }
    Some(x)
}

/// Linear least squares `min ‖A·x − y‖²` via Householder QR.
///
/// `rows` are the rows of `A` (all of length `cols`). Returns `None` when `A`
/// is rank-deficient.
pub(crate) fn least_squares(rows: &[Vec<f64>], y: &[f64], cols: usize) -> Option<Vec<f64>> {
    let m = rows.len();
    if m < cols {
        return None;
    }
    // column-major copy, so each reflection touches contiguous memory
    let mut a: Vec<Vec<f64>> = (0..cols).map(|c| rows.iter().map(|r| r[c]).collect()).collect();
    let mut rhs = y.to_vec();
    let mut col_norms = Vec::with_capacity(cols);

    for k in 0..cols {
        let norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        col_norms.push(norm);
        let orig_norm = a[k].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-12 * orig_norm.max(f64::MIN_POSITIVE) || norm == 0.0 {
            return None;
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for col in a.iter_mut().skip(k) {
            let dot: f64 = v.iter().zip(&col[k..]).map(|(p, q)| p * q).sum();
            let f = 2.0 * dot / vnorm2;
            for (dst, vi) in col[k..].iter_mut().zip(&v) {
                *dst -= f * vi;
            }
        }
        let dot: f64 = v.iter().zip(&rhs[k..]).map(|(p, q)| p * q).sum();
        let f = 2.0 * dot / vnorm2;
        for (dst, vi) in rhs[k..].iter_mut().zip(&v) {
            *dst -= f * vi;
        }
    }

    let mut x = vec![0.0; cols];
    for k in (0..cols).rev() {
        let tail: f64 = (k + 1..cols).map(|j| a[j][k] * x[j]).sum();
        x[k] = (rhs[k] - tail) / a[k][k];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
