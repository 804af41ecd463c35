//! Small dense complex-matrix helpers.
//!
//! Operator pencils act on a finite-dimensional state space, so every matrix
//! here is tiny (n rarely above 8). Plain Gauss-Jordan with partial pivoting
//! and power iteration are accurate and dependency-free at this size.

use ndarray::Array2;
use num_complex::Complex64;

pub type CMat = Array2<Complex64>;

pub fn identity(n: usize) -> CMat {
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        m[(i, i)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Frobenius norm.
pub fn fro_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
/// Returns `None` when a pivot is negligible relative to the matrix scale.
pub fn inverse(m: &CMat) -> Option<CMat> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "inverse of a non-square matrix");
    if n == 1 {
        let z = m[(0, 0)];
        if z.norm() == 0.0 {
            return None;
        }
        let mut out = Array2::zeros((1, 1));
        out[(0, 0)] = z.inv();
        return Some(out);
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    let mut a = m.clone();
    let mut inv = identity(n);
    for col in 0..n {
        let (pivot_row, pivot_mag) = (col..n)
            .map(|r| (r, a[(r, col)].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))?;
        if pivot_mag <= scale * 1e-300 || !pivot_mag.is_finite() {
            return None;
        }
        if pivot_row != col {
            for c in 0..n {
                a.swap((col, c), (pivot_row, c));
                inv.swap((col, c), (pivot_row, c));
            }
        }
        let pivot = a[(col, col)];
        for c in 0..n {
            a[(col, c)] /= pivot;
            inv[(col, c)] /= pivot;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a[(r, col)];
            if factor.norm() == 0.0 {
                continue;
            }
            for c in 0..n {
                let ac = a[(col, c)];
                let ic = inv[(col, c)];
                a[(r, c)] -= factor * ac;
                inv[(r, c)] -= factor * ic;
            }
        }
    }
    if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return None;
    }
    Some(inv)
}

/// Condition estimate `||m||_F * ||m^-1||_F` (an upper bound on the spectral
/// condition number up to a factor n).
pub fn condition_estimate(m: &CMat, inv: &CMat) -> f64 {
    fro_norm(m) * fro_norm(inv)
}

/// Operator 2-norm (largest singular value) by power iteration on `m^H m`.
/// Deterministic start vector; exact for 1x1.
pub fn op_norm_2(m: &CMat) -> f64 {
    let (rows, cols) = (m.nrows(), m.ncols());
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    if rows == 1 && cols == 1 {
        return m[(0, 0)].norm();
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    if !scale.is_finite() {
        return f64::INFINITY;
    }
    // Start spread across all coordinates so no singular direction is missed.
    let mut v: Vec<Complex64> = (0..cols)
        .map(|k| Complex64::new(1.0 + 0.1 * (k as f64 + 1.0), 0.05 * k as f64))
        .collect();
    let mut lambda = 0.0f64;
    for _ in 0..400 {
        // w = m v, u = m^H w
        let mut w = vec![Complex64::default(); rows];
        for r in 0..rows {
            let mut acc = Complex64::default();
            for c in 0..cols {
                acc += m[(r, c)] * v[c];
            }
            w[r] = acc;
        }
        let mut u = vec![Complex64::default(); cols];
        for c in 0..cols {
            let mut acc = Complex64::default();
            for r in 0..rows {
                acc += m[(r, c)].conj() * w[r];
            }
            u[c] = acc;
        }
        let norm_v: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let new_lambda = w.iter().map(|z| z.norm_sqr()).sum::<f64>() / (norm_v * norm_v);
        let norm_u: f64 = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm_u == 0.0 {
            return new_lambda.sqrt();
        }
        for z in u.iter_mut() {
            *z /= norm_u;
        }
        v = u;
        if (new_lambda - lambda).abs() <= 1e-14 * new_lambda.max(1e-300) {
            lambda = new_lambda;
            break;
        }
        lambda = new_lambda;
    }
    lambda.sqrt()
}

/// m * v for a small matrix and a slice.
pub fn mat_vec(m: &CMat, v: &[Complex64]) -> Vec<Complex64> {
    let (rows, cols) = (m.nrows(), m.ncols());
    debug_assert_eq!(cols, v.len());
    let mut out = vec![Complex64::default(); rows];
    for r in 0..rows {
        let mut acc = Complex64::default();
        for c in 0..cols {
            acc += m[(r, c)] * v[c];
        }
        out[r] = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inverse_of_identity_is_identity() {
        let id = identity(3);
        let inv = inverse(&id).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!((inv[(i, j)] - id[(i, j)]).norm(), 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let m = ndarray::arr2(&[
            [c(1.0, 2.0), c(0.5, -1.0), c(0.0, 0.3)],
            [c(-2.0, 0.1), c(3.0, 0.0), c(1.0, 1.0)],
            [c(0.2, 0.2), c(-0.7, 0.4), c(2.5, -0.5)],
        ]);
        let inv = inverse(&m).unwrap();
        let prod = m.dot(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(prod[(i, j)].re, expect, epsilon = 1e-12);
                assert_abs_diff_eq!(prod[(i, j)].im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn singular_matrix_yields_none() {
        let m = ndarray::arr2(&[[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(4.0, 0.0)]]);
        assert!(inverse(&m).is_none());
    }

    #[test]
    fn op_norm_matches_known_values() {
        let m = ndarray::arr2(&[[c(3.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-5.0, 0.0)]]);
        assert_abs_diff_eq!(op_norm_2(&m), 5.0, epsilon = 1e-10);
        let scalar = ndarray::arr2(&[[c(3.0, 4.0)]]);
        assert_abs_diff_eq!(op_norm_2(&scalar), 5.0, epsilon = 1e-15);
    }
}
