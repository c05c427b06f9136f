//! Sliding-window least-squares reference for the guided filter.

// Index-heavy on purpose: the reference mirrors the written-out formulas.
#![allow(clippy::needless_range_loop)]

use crate::linsolve::solve;

struct WindowStats {
    mean_g: [f64; 3],
    mean_p: f64,
    cov_gg: [[f64; 3]; 3],
    cov_gp: [f64; 3],
}

fn window_stats(
    guide: &[&[f64]; 3],
    input: &[f64],
    width: usize,
    height: usize,
    cx: usize,
    cy: usize,
    radius: usize,
) -> WindowStats {
    let x1 = cx.saturating_sub(radius);
    let x2 = (cx + radius).min(width - 1);
    let y1 = cy.saturating_sub(radius);
    let y2 = (cy + radius).min(height - 1);
    let count = ((x2 - x1 + 1) * (y2 - y1 + 1)) as f64;
    let mut mean_g = [0.0; 3];
    let mut mean_p = 0.0;
    for y in y1..=y2 {
        for x in x1..=x2 {
            let i = y * width + x;
            for c in 0..3 {
                mean_g[c] += guide[c][i];
            }
            mean_p += input[i];
        }
    }
    for c in 0..3 {
        mean_g[c] /= count;
    }
    mean_p /= count;

    let mut cov_gg = [[0.0; 3]; 3];
    let mut cov_gp = [0.0; 3];
    for y in y1..=y2 {
        for x in x1..=x2 {
            let i = y * width + x;
            for c in 0..3 {
                for d in 0..3 {
                    cov_gg[c][d] += guide[c][i] * guide[d][i];
                }
                cov_gp[c] += guide[c][i] * input[i];
            }
        }
    }
    for c in 0..3 {
        for d in 0..3 {
            cov_gg[c][d] = cov_gg[c][d] / count - mean_g[c] * mean_g[d];
        }
        cov_gp[c] = cov_gp[c] / count - mean_g[c] * mean_p;
    }
    WindowStats {
        mean_g,
        mean_p,
        cov_gg,
        cov_gp,
    }
}

/// Per-pixel linear-model coefficients `(a[3], b)` from a direct window
/// least-squares solve at every pixel.
fn coefficients(
    guide: &[&[f64]; 3],
    input: &[f64],
    width: usize,
    height: usize,
    radius: usize,
    epsilon: f64,
) -> (Vec<[f64; 3]>, Vec<f64>) {
    let mut a = vec![[0.0; 3]; width * height];
    let mut b = vec![0.0; width * height];
    for y in 0..height {
        for x in 0..width {
            let s = window_stats(guide, input, width, height, x, y, radius);
            let mut m = [0.0f64; 9];
            for c in 0..3 {
                for d in 0..3 {
                    m[c * 3 + d] = s.cov_gg[c][d] + if c == d { epsilon } else { 0.0 };
                }
            }
            let ai = solve(&m, &s.cov_gp, 3);
            let i = y * width + x;
            a[i] = [ai[0], ai[1], ai[2]];
            b[i] = s.mean_p - ai[0] * s.mean_g[0] - ai[1] * s.mean_g[1] - ai[2] * s.mean_g[2];
        }
    }
    (a, b)
}

fn window_average_coeffs(
    a: &[[f64; 3]],
    b: &[f64],
    width: usize,
    height: usize,
    radius: usize,
) -> (Vec<[f64; 3]>, Vec<f64>) {
    let mut ma = vec![[0.0; 3]; width * height];
    let mut mb = vec![0.0; width * height];
    for y in 0..height {
        for x in 0..width {
            let x1 = x.saturating_sub(radius);
            let x2 = (x + radius).min(width - 1);
            let y1 = y.saturating_sub(radius);
            let y2 = (y + radius).min(height - 1);
            let count = ((x2 - x1 + 1) * (y2 - y1 + 1)) as f64;
            let mut acc_a = [0.0; 3];
            let mut acc_b = 0.0;
            for yy in y1..=y2 {
                for xx in x1..=x2 {
                    let j = yy * width + xx;
                    for c in 0..3 {
                        acc_a[c] += a[j][c];
                    }
                    acc_b += b[j];
                }
            }
            let i = y * width + x;
            ma[i] = [acc_a[0] / count, acc_a[1] / count, acc_a[2] / count];
            mb[i] = acc_b / count;
        }
    }
    (ma, mb)
}

/// The exact color guided filter, one honest window solve per pixel.
pub fn guided_filter(
    guide: &[&[f64]; 3],
    input: &[f64],
    width: usize,
    height: usize,
    radius: usize,
    epsilon: f64,
) -> Vec<f64> {
    let (a, b) = coefficients(guide, input, width, height, radius, epsilon);
    let (ma, mb) = window_average_coeffs(&a, &b, width, height, radius);
    (0..width * height)
        .map(|i| {
            let v = ma[i][0] * guide[0][i] + ma[i][1] * guide[1][i] + ma[i][2] * guide[2][i] + mb[i];
            v.clamp(0.0, 1.0)
        })
        .collect()
}

/// Plain block means over `factor`-sized tiles (edge tiles may be partial).
pub fn block_downsample(src: &[f64], width: usize, height: usize, factor: usize) -> Vec<f64> {
    let nw = width.div_ceil(factor);
    let nh = height.div_ceil(factor);
    let mut out = vec![0.0; nw * nh];
    for by in 0..nh {
        for bx in 0..nw {
            let mut acc = 0.0;
            let mut cnt = 0.0;
            for y in by * factor..((by + 1) * factor).min(height) {
                for x in bx * factor..((bx + 1) * factor).min(width) {
                    acc += src[y * width + x];
                    cnt += 1.0;
                }
            }
            out[by * nw + bx] = acc / cnt;
        }
    }
    out
}

/// Bilinear upsampling with half-pixel centers and edge clamping.
pub fn bilinear_upsample(
    src: &[f64],
    width: usize,
    height: usize,
    new_width: usize,
    new_height: usize,
) -> Vec<f64> {
    let mut out = vec![0.0; new_width * new_height];
    for y in 0..new_height {
        let sy = ((y as f64 + 0.5) * height as f64 / new_height as f64 - 0.5)
            .clamp(0.0, (height - 1) as f64);
        let y0 = sy.floor() as usize;
        let y1 = (y0 + 1).min(height - 1);
        let fy = sy - y0 as f64;
        for x in 0..new_width {
            let sx = ((x as f64 + 0.5) * width as f64 / new_width as f64 - 0.5)
                .clamp(0.0, (width - 1) as f64);
            let x0 = sx.floor() as usize;
            let x1 = (x0 + 1).min(width - 1);
            let fx = sx - x0 as f64;
            out[y * new_width + x] = (1.0 - fy)
                * ((1.0 - fx) * src[y0 * width + x0] + fx * src[y0 * width + x1])
                + fy * ((1.0 - fx) * src[y1 * width + x0] + fx * src[y1 * width + x1]);
        }
    }
    out
}

/// Staged fast guided filter: block-downsample the guide, run the exact
/// window solves at low resolution, bilinearly upsample the averaged
/// coefficients, and apply them to the full-resolution guide.
#[allow(clippy::too_many_arguments)]
pub fn fast_guided_filter(
    guide_full: &[&[f64]; 3],
    input_low: &[f64],
    width: usize,
    height: usize,
    subsample: usize,
    radius: usize,
    epsilon: f64,
) -> Vec<f64> {
    let lw = width.div_ceil(subsample);
    let lh = height.div_ceil(subsample);
    let low: Vec<Vec<f64>> = guide_full
        .iter()
        .map(|g| block_downsample(g, width, height, subsample))
        .collect();
    let low_refs: [&[f64]; 3] = [&low[0], &low[1], &low[2]];
    let (a, b) = coefficients(&low_refs, input_low, lw, lh, radius, epsilon);
    let (ma, mb) = window_average_coeffs(&a, &b, lw, lh, radius);
    let plane = |c: usize| -> Vec<f64> { ma.iter().map(|v| v[c]).collect() };
    let ma_full: Vec<Vec<f64>> = (0..3)
        .map(|c| bilinear_upsample(&plane(c), lw, lh, width, height))
        .collect();
    let mb_full = bilinear_upsample(&mb, lw, lh, width, height);
    (0..width * height)
        .map(|i| {
            let v = ma_full[0][i] * guide_full[0][i]
                + ma_full[1][i] * guide_full[1][i]
                + ma_full[2][i] * guide_full[2][i]
                + mb_full[i];
            v.clamp(0.0, 1.0)
        })
        .collect()
}
