//! Dense least squares through the normal equations.

use thiserror::Error;

/// Pivots smaller than this fraction of the largest pivot mark the system singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("singular system: pivot {pivot:e} at column {column} below threshold")]
    Singular { column: usize, pivot: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Solves the square system `a x = b` (row-major `n x n`) by Gaussian
/// elimination with partial pivoting.
pub fn solve(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Result<Vec<f64>, SolveError> {
    if a.len() != n * n || b.len() != n {
        return Err(SolveError::Dimension(format!(
            "matrix has {} entries and rhs {} for n = {n}",
            a.len(),
            b.len()
        )));
    }
    let mut largest = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
            .expect("non-empty pivot range");
        let pivot = a[pivot_row * n + col];
        if pivot.is_nan() || pivot.abs() <= SINGULARITY_THRESHOLD * largest {
            return Err(SolveError::Singular { column: col, pivot });
        }
        largest = largest.max(pivot.abs());
        if pivot_row != col {
            for k in 0..n {
                a.swap(pivot_row * n + k, col * n + k);
            }
            b.swap(pivot_row, col);
        }
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
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * x[k];
        }
        x[row] = acc / a[row * n + row];
    }
    Ok(x)
}

/// Ordinary least squares for `design` (`rows x cols`, row-major) against `y`.
pub fn least_squares(design: &[f64], y: &[f64], cols: usize) -> Result<Vec<f64>, SolveError> {
    if cols == 0 || !design.len().is_multiple_of(cols) || design.len() / cols != y.len() {
        return Err(SolveError::Dimension(format!(
            "design of {} entries with {cols} columns against {} targets",
            design.len(),
            y.len()
        )));
    }
    let mut xtx = vec![0.0; cols * cols];
    let mut xty = vec![0.0; cols];
    for (row, &target) in design.chunks_exact(cols).zip(y) {
        for i in 0..cols {
            xty[i] += row[i] * target;
            for j in i..cols {
                xtx[i * cols + j] += row[i] * row[j];
            }
        }
    }
    for i in 0..cols {
        for j in 0..i {
            xtx[i * cols + j] = xtx[j * cols + i];
        }
    }
    solve(xtx, xty, cols)
}
