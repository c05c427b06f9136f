//! Dense reference for the foreground/background energy minimization.

use crate::linsolve::solve;

/// The blending-plus-smoothness energy evaluated directly:
/// data residual squared per pixel/channel plus `lambda` times squared
/// differences over 4-neighbor pairs of both F and B.
pub fn energy(
    composite: &[f64],
    alpha: &[f64],
    f: &[f64],
    b: &[f64],
    width: usize,
    height: usize,
    lambda: f64,
) -> f64 {
    let mut e = 0.0;
    for y in 0..height {
        for x in 0..width {
            let i = y * width + x;
            let a = alpha[i];
            for c in 0..3 {
                let j = i * 3 + c;
                let r = a * f[j] + (1.0 - a) * b[j] - composite[j];
                e += r * r;
                if x + 1 < width {
                    let k = j + 3;
                    e += lambda * ((f[j] - f[k]) * (f[j] - f[k]) + (b[j] - b[k]) * (b[j] - b[k]));
                }
                if y + 1 < height {
                    let k = j + width * 3;
                    e += lambda * ((f[j] - f[k]) * (f[j] - f[k]) + (b[j] - b[k]) * (b[j] - b[k]));
                }
            }
        }
    }
    e
}

/// Globally minimizes the energy by solving the normal equations densely,
/// one channel at a time: unknowns `[F_0..F_{n-1}, B_0..B_{n-1}]`.
/// Meant for small grids (the system is 2n x 2n).
pub fn solve_dense(
    composite: &[f64],
    alpha: &[f64],
    width: usize,
    height: usize,
    lambda: f64,
) -> (Vec<f64>, Vec<f64>) {
    let n = width * height;
    let mut f = vec![0.0; n * 3];
    let mut b = vec![0.0; n * 3];
    let neighbors = |i: usize| -> Vec<usize> {
        let x = i % width;
        let y = i / width;
        let mut out = Vec::with_capacity(4);
        if x > 0 {
            out.push(i - 1);
        }
        if x + 1 < width {
            out.push(i + 1);
        }
        if y > 0 {
            out.push(i - width);
        }
        if y + 1 < height {
            out.push(i + width);
        }
        out
    };
    for c in 0..3 {
        let dim = 2 * n;
        let mut m = vec![0.0f64; dim * dim];
        let mut rhs = vec![0.0f64; dim];
        for i in 0..n {
            let a = alpha[i];
            let ac = 1.0 - a;
            let nb = neighbors(i);
            // Row for F_i.
            m[i * dim + i] = a * a + lambda * nb.len() as f64;
            m[i * dim + n + i] = a * ac;
            for &j in &nb {
                m[i * dim + j] -= lambda;
            }
            rhs[i] = a * composite[i * 3 + c];
            // Row for B_i.
            let r = n + i;
            m[r * dim + n + i] = ac * ac + lambda * nb.len() as f64;
            m[r * dim + i] = a * ac;
            for &j in &nb {
                m[r * dim + n + j] -= lambda;
            }
            rhs[r] = ac * composite[i * 3 + c];
        }
        let x = solve(&m, &rhs, dim);
        for i in 0..n {
            f[i * 3 + c] = x[i];
            b[i * 3 + c] = x[n + i];
        }
    }
    (f, b)
}
