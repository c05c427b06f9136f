//! Literal transcriptions of the matting metrics.

/// SAD (thousandths), MSE, MAD over all pixels or a binary region mask.
pub fn absolute_diff(pred: &[f64], gt: &[f64], region: Option<&[f64]>) -> (f64, f64, f64) {
    let mut abs = 0.0;
    let mut sq = 0.0;
    let mut count = 0.0;
    for i in 0..pred.len() {
        let keep = region.map_or(1.0, |r| r[i]);
        let d = pred[i] - gt[i];
        abs += keep * d.abs();
        sq += keep * d * d;
        count += keep;
    }
    if count == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    (abs / 1000.0, sq / count, abs / count)
}

fn reflect101(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = i;
    loop {
        if n == 1 {
            return 0;
        }
        if i < 0 {
            i = -i;
        } else if i >= n {
            i = 2 * n - 2 - i;
        } else {
            return i as usize;
        }
    }
}

/// Direct 2-D correlation with reflect-101 borders.
fn correlate2d(src: &[f64], width: usize, height: usize, kernel: &[Vec<f64>]) -> Vec<f64> {
    let radius = (kernel.len() / 2) as isize;
    let mut out = vec![0.0; width * height];
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for (ki, krow) in kernel.iter().enumerate() {
                let sy = reflect101(y as isize + ki as isize - radius, height);
                for (kj, &w) in krow.iter().enumerate() {
                    let sx = reflect101(x as isize + kj as isize - radius, width);
                    acc += w * src[sy * width + sx];
                }
            }
            out[y * width + x] = acc;
        }
    }
    out
}

/// Explicitly sampled derivative-of-Gaussian kernels, each L2-normalized:
/// `(d/dx, d/dy)` where rows index y and columns index x.
pub fn gaussian_derivative_kernels(sigma: f64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let radius = (3.0 * sigma).ceil() as isize;
    let gauss = |t: f64| (-t * t / (2.0 * sigma * sigma)).exp();
    let dgauss = |t: f64| -t * gauss(t) / (sigma * sigma);
    let size = (2 * radius + 1) as usize;
    let mut hx = vec![vec![0.0; size]; size];
    let mut hy = vec![vec![0.0; size]; size];
    for i in 0..size {
        for j in 0..size {
            let y = (i as isize - radius) as f64;
            let x = (j as isize - radius) as f64;
            hx[i][j] = gauss(y) * dgauss(x);
            hy[i][j] = dgauss(y) * gauss(x);
        }
    }
    for k in [&mut hx, &mut hy] {
        let norm = k
            .iter()
            .flat_map(|row| row.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt();
        for row in k.iter_mut() {
            for v in row.iter_mut() {
                *v /= norm;
            }
        }
    }
    (hx, hy)
}

/// Gradient error via direct 2-D convolution with the sampled kernels.
pub fn gradient_error(pred: &[f64], gt: &[f64], width: usize, height: usize, sigma: f64) -> f64 {
    let (hx, hy) = gaussian_derivative_kernels(sigma);
    let magnitude = |m: &[f64]| -> Vec<f64> {
        let gx = correlate2d(m, width, height, &hx);
        let gy = correlate2d(m, width, height, &hy);
        gx.iter()
            .zip(&gy)
            .map(|(&a, &b)| (a * a + b * b).sqrt())
            .collect()
    };
    let qp = magnitude(pred);
    let qg = magnitude(gt);
    qp.iter()
        .zip(&qg)
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum::<f64>()
        / 1000.0
}

/// 4-connected components by iterative flood fill; returns the pixels of
/// the largest region (ties: the region met first in row-major order).
fn largest_region(mask: &[bool], width: usize, height: usize) -> Vec<bool> {
    let mut seen = vec![false; mask.len()];
    let mut best: Vec<usize> = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        let mut queue = std::collections::VecDeque::from([start]);
        seen[start] = true;
        let mut members = Vec::new();
        while let Some(i) = queue.pop_front() {
            members.push(i);
            let x = i % width;
            let y = i / width;
            for (dx, dy) in [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)] {
                let nx = x as isize + dx;
                let ny = y as isize + dy;
                if nx < 0 || ny < 0 || nx >= width as isize || ny >= height as isize {
                    continue;
                }
                let j = ny as usize * width + nx as usize;
                if mask[j] && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        if members.len() > best.len() {
            best = members;
        }
    }
    let mut out = vec![false; mask.len()];
    for i in best {
        out[i] = true;
    }
    out
}

/// Connectivity error by enumerating components at every threshold.
pub fn connectivity_error(
    pred: &[f64],
    gt: &[f64],
    width: usize,
    height: usize,
    step: f64,
    tolerance: f64,
) -> f64 {
    let n = width * height;
    let mut level = vec![0.0f64; n];
    let mut k = 1u32;
    loop {
        let theta = k as f64 * step;
        if theta >= 1.0 - 1e-12 {
            break;
        }
        let mask: Vec<bool> = (0..n).map(|i| pred[i] >= theta && gt[i] >= theta).collect();
        let omega = largest_region(&mask, width, height);
        for i in 0..n {
            if omega[i] {
                level[i] = theta;
            }
        }
        k += 1;
    }
    let phi = |x: f64, l: f64| {
        let d = x - l;
        if d >= tolerance {
            1.0 - d
        } else {
            1.0
        }
    };
    (0..n)
        .map(|i| (phi(pred[i], level[i]) - phi(gt[i], level[i])).abs())
        .sum::<f64>()
        / 1000.0
}

/// The full ten-metric suite against a trimap given as {0, 128, 255} labels.
/// Order: sad, mse, mad, sad_t, mse_t, mad_t, sad_fg, sad_bg, grad, conn.
#[allow(clippy::too_many_arguments)]
pub fn evaluate(
    pred: &[f64],
    gt: &[f64],
    trimap: &[u8],
    width: usize,
    height: usize,
    sigma: f64,
    step: f64,
    tolerance: f64,
) -> [f64; 10] {
    let mask_of = |label: u8| -> Vec<f64> {
        trimap
            .iter()
            .map(|&l| if l == label { 1.0 } else { 0.0 })
            .collect()
    };
    let (sad, mse, mad) = absolute_diff(pred, gt, None);
    let (sad_t, mse_t, mad_t) = absolute_diff(pred, gt, Some(&mask_of(128)));
    let (sad_fg, _, _) = absolute_diff(pred, gt, Some(&mask_of(255)));
    let (sad_bg, _, _) = absolute_diff(pred, gt, Some(&mask_of(0)));
    let grad = gradient_error(pred, gt, width, height, sigma);
    let conn = connectivity_error(pred, gt, width, height, step, tolerance);
    [
        sad, mse, mad, sad_t, mse_t, mad_t, sad_fg, sad_bg, grad, conn,
    ]
}
