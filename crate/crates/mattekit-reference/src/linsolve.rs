//! Dense linear solve by Gaussian elimination with partial pivoting.

/// Solves `a * x = rhs` for square `a` (row-major, n*n). Panics if the
/// matrix is numerically singular; reference problems are built to be
/// well-conditioned.
pub fn solve(a: &[f64], rhs: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    assert_eq!(rhs.len(), n);
    let mut m = a.to_vec();
    let mut x = rhs.to_vec();
    for col in 0..n {
        // Pivot: largest magnitude in this column at or below the diagonal.
        let mut pivot = col;
        for row in col + 1..n {
            if m[row * n + col].abs() > m[pivot * n + col].abs() {
                pivot = row;
            }
        }
        assert!(
            m[pivot * n + col].abs() > 1e-300,
            "singular matrix at column {col}"
        );
        if pivot != col {
            for k in 0..n {
                m.swap(col * n + k, pivot * n + k);
            }
            x.swap(col, pivot);
        }
        let d = m[col * n + col];
        for row in col + 1..n {
            let factor = m[row * n + col] / d;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                m[row * n + k] -= factor * m[col * n + k];
            }
            x[row] -= factor * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for k in col + 1..n {
            acc -= m[col * n + k] * x[k];
        }
        x[col] = acc / m[col * n + col];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::solve;

    #[test]
    fn solves_small_system() {
        // [2 1; 1 3] x = [5; 10] -> x = [1; 3]
        let a = [2.0, 1.0, 1.0, 3.0];
        let x = solve(&a, &[5.0, 10.0], 2);
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn handles_permuted_rows() {
        let a = [0.0, 1.0, 1.0, 0.0];
        let x = solve(&a, &[2.0, 7.0], 2);
        assert!((x[0] - 7.0).abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
    }
}
