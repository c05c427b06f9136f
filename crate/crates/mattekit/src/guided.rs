//! Color-guided filtering and guided alpha upscaling.
//!
//! The exact filter fits, per window, a local linear model from the RGB guide
//! to the input matte: a regularized 3x3 least-squares solve for the per-pixel
//! coefficients, then box-averaged coefficient maps applied to the guide. The
//! fast variant computes coefficients on a block-downsampled guide with the
//! low-resolution input and bilinearly upsamples the coefficient maps before
//! applying them to the full-resolution guide; at subsample 1 it runs the
//! exact path. Box windows are normalized by their true pixel count, so
//! borders see no halo.

use crate::error::{ensure_same_dims, Error, Result};
use crate::exec;
use crate::raster::{AlphaMatte, Image, Plane};
use crate::resample::{resample_matte, resample_plane_bilinear, ResampleMethod};

/// Parameters of [`guided_filter`] / [`fast_guided_filter`].
#[derive(Debug, Clone, Copy)]
pub struct GuidedFilterConfig {
    /// Box window radius, in pixels of the resolution where coefficients are
    /// computed.
    pub radius: usize,
    /// Ridge regularization added to the guide covariance diagonal.
    pub epsilon: f64,
    /// Integer downsampling factor of the fast variant.
    pub subsample: usize,
}

impl Default for GuidedFilterConfig {
    fn default() -> Self {
        GuidedFilterConfig {
            radius: 8,
            epsilon: 1e-4,
            subsample: 4,
        }
    }
}

impl GuidedFilterConfig {
    fn validate(&self) -> Result<()> {
        if self.radius < 1 {
            return Err(Error::InvalidParameter("radius must be >= 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(
                "epsilon must be finite and > 0".into(),
            ));
        }
        if self.subsample < 1 {
            return Err(Error::InvalidParameter("subsample must be >= 1".into()));
        }
        Ok(())
    }
}

/// Box mean with exact window normalization, via a summed-area table.
fn box_mean(src: &[f64], width: usize, height: usize, r: usize) -> Vec<f64> {
    let mut integral = vec![0.0f64; (width + 1) * (height + 1)];
    for y in 0..height {
        let mut row_acc = 0.0;
        for x in 0..width {
            row_acc += src[y * width + x];
            integral[(y + 1) * (width + 1) + (x + 1)] = integral[y * (width + 1) + (x + 1)] + row_acc;
        }
    }
    let mut out = vec![0.0f64; width * height];
    exec::for_each_row(&mut out, width, |y, row| {
        let y1 = y.saturating_sub(r);
        let y2 = (y + r).min(height - 1);
        for (x, slot) in row.iter_mut().enumerate() {
            let x1 = x.saturating_sub(r);
            let x2 = (x + r).min(width - 1);
            let sum = integral[(y2 + 1) * (width + 1) + (x2 + 1)]
                - integral[y1 * (width + 1) + (x2 + 1)]
                - integral[(y2 + 1) * (width + 1) + x1]
                + integral[y1 * (width + 1) + x1];
            let count = ((y2 + 1 - y1) * (x2 + 1 - x1)) as f64;
            *slot = sum / count;
        }
    });
    out
}

/// Block mean downsampling by an integer factor (edge blocks may be partial).
fn block_downsample(src: &[f64], width: usize, height: usize, factor: usize) -> Vec<f64> {
    if factor == 1 {
        return src.to_vec();
    }
    let nw = width.div_ceil(factor);
    let nh = height.div_ceil(factor);
    let mut out = vec![0.0f64; nw * nh];
    exec::for_each_row(&mut out, nw, |by, row| {
        let y0 = by * factor;
        let y1 = (y0 + factor).min(height);
        for (bx, slot) in row.iter_mut().enumerate() {
            let x0 = bx * factor;
            let x1 = (x0 + factor).min(width);
            let mut acc = 0.0;
            for y in y0..y1 {
                for x in x0..x1 {
                    acc += src[y * width + x];
                }
            }
            *slot = acc / ((y1 - y0) * (x1 - x0)) as f64;
        }
    });
    out
}

fn guide_planes(guide: &Image) -> [Vec<f64>; 3] {
    let mut planes = [
        vec![0.0f64; guide.width() * guide.height()],
        vec![0.0f64; guide.width() * guide.height()],
        vec![0.0f64; guide.width() * guide.height()],
    ];
    for (i, px) in guide.data().chunks_exact(3).enumerate() {
        planes[0][i] = px[0] as f64;
        planes[1][i] = px[1] as f64;
        planes[2][i] = px[2] as f64;
    }
    planes
}

/// Solves the 3x3 system `m * a = rhs` by Gaussian elimination with partial
/// pivoting. `m` is the ridge-regularized covariance; with tiny epsilon it
/// gets arbitrarily ill-conditioned, where cofactor expansion would lose all
/// accuracy.
#[inline]
#[allow(clippy::needless_range_loop)]
fn solve3(mut m: [[f64; 3]; 3], mut rhs: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let mut pivot = col;
        for row in col + 1..3 {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        if m[pivot][col] == 0.0 {
            return [0.0; 3];
        }
        if pivot != col {
            m.swap(col, pivot);
            rhs.swap(col, pivot);
        }
        for row in col + 1..3 {
            let factor = m[row][col] / m[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..3 {
                m[row][k] -= factor * m[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut out = [0.0; 3];
    for col in (0..3).rev() {
        let mut acc = rhs[col];
        for k in col + 1..3 {
            acc -= m[col][k] * out[k];
        }
        out[col] = acc / m[col][col];
    }
    out
}

/// Box-averaged linear-model coefficients `(mean_a[3], mean_b)` for the
/// guide/input pair at their common resolution.
fn coefficient_maps(
    guide: &[Vec<f64>; 3],
    input: &[f64],
    width: usize,
    height: usize,
    radius: usize,
    epsilon: f64,
) -> ([Vec<f64>; 3], Vec<f64>) {
    let n = width * height;
    let mean_g: Vec<Vec<f64>> = guide
        .iter()
        .map(|g| box_mean(g, width, height, radius))
        .collect();
    let mean_p = box_mean(input, width, height, radius);

    // Second moments: six unique guide-guide products plus three guide-input.
    let pairs = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
    let corr_gg: Vec<Vec<f64>> = pairs
        .iter()
        .map(|&(a, b)| {
            let prod: Vec<f64> = (0..n).map(|i| guide[a][i] * guide[b][i]).collect();
            box_mean(&prod, width, height, radius)
        })
        .collect();
    let corr_gp: Vec<Vec<f64>> = (0..3)
        .map(|c| {
            let prod: Vec<f64> = (0..n).map(|i| guide[c][i] * input[i]).collect();
            box_mean(&prod, width, height, radius)
        })
        .collect();

    let mut a = [vec![0.0f64; n], vec![0.0f64; n], vec![0.0f64; n]];
    let mut b = vec![0.0f64; n];
    let coeffs: Vec<([f64; 3], f64)> = exec::map_indexed(n, |i| {
        let mg = [mean_g[0][i], mean_g[1][i], mean_g[2][i]];
        let var = |k: usize, (x, y): (usize, usize)| corr_gg[k][i] - mg[x] * mg[y];
        let m = [
            [var(0, (0, 0)) + epsilon, var(1, (0, 1)), var(2, (0, 2))],
            [var(1, (0, 1)), var(3, (1, 1)) + epsilon, var(4, (1, 2))],
            [var(2, (0, 2)), var(4, (1, 2)), var(5, (2, 2)) + epsilon],
        ];
        let rhs = [
            corr_gp[0][i] - mg[0] * mean_p[i],
            corr_gp[1][i] - mg[1] * mean_p[i],
            corr_gp[2][i] - mg[2] * mean_p[i],
        ];
        let ai = solve3(m, rhs);
        let bi = mean_p[i] - ai[0] * mg[0] - ai[1] * mg[1] - ai[2] * mg[2];
        (ai, bi)
    });
    for (i, (ai, bi)) in coeffs.into_iter().enumerate() {
        a[0][i] = ai[0];
        a[1][i] = ai[1];
        a[2][i] = ai[2];
        b[i] = bi;
    }

    let mean_a = [
        box_mean(&a[0], width, height, radius),
        box_mean(&a[1], width, height, radius),
        box_mean(&a[2], width, height, radius),
    ];
    let mean_b = box_mean(&b, width, height, radius);
    (mean_a, mean_b)
}

fn apply_coefficients(
    guide: &[Vec<f64>; 3],
    mean_a: &[Vec<f64>; 3],
    mean_b: &[f64],
    width: usize,
    height: usize,
) -> Result<AlphaMatte> {
    let data = exec::map_indexed(width * height, |i| {
        let v = mean_a[0][i] * guide[0][i]
            + mean_a[1][i] * guide[1][i]
            + mean_a[2][i] * guide[2][i]
            + mean_b[i];
        v.clamp(0.0, 1.0) as f32
    });
    AlphaMatte::from_vec(width, height, data)
}

/// The exact color-guided filter.
pub fn guided_filter(
    guide: &Image,
    input: &AlphaMatte,
    config: &GuidedFilterConfig,
) -> Result<AlphaMatte> {
    config.validate()?;
    let (w, h) = (guide.width(), guide.height());
    ensure_same_dims(w, h, input.width(), input.height())?;
    let planes = guide_planes(guide);
    let p: Vec<f64> = input.data().iter().map(|&v| v as f64).collect();
    let (mean_a, mean_b) = coefficient_maps(&planes, &p, w, h, config.radius, config.epsilon);
    apply_coefficients(&planes, &mean_a, &mean_b, w, h)
}

/// The fast (subsampled) guided filter.
///
/// `input_low` must match the guide block-downsampled by `config.subsample`
/// (ceil-divided dimensions). The radius applies at the low resolution.
pub fn fast_guided_filter(
    guide_full: &Image,
    input_low: &AlphaMatte,
    config: &GuidedFilterConfig,
) -> Result<AlphaMatte> {
    config.validate()?;
    let (w, h) = (guide_full.width(), guide_full.height());
    let s = config.subsample;
    let (lw, lh) = (w.div_ceil(s), h.div_ceil(s));
    ensure_same_dims(lw, lh, input_low.width(), input_low.height())?;

    let planes = guide_planes(guide_full);
    let low_planes = [
        block_downsample(&planes[0], w, h, s),
        block_downsample(&planes[1], w, h, s),
        block_downsample(&planes[2], w, h, s),
    ];
    let p: Vec<f64> = input_low.data().iter().map(|&v| v as f64).collect();
    let (mean_a, mean_b) =
        coefficient_maps(&low_planes, &p, lw, lh, config.radius, config.epsilon);

    let up = |v: Vec<f64>| -> Vec<f64> {
        let plane = Plane::new(lw, lh, v).expect("coefficient map dimensions");
        resample_plane_bilinear(&plane, w, h).data().to_vec()
    };
    let mean_a_full = [
        up(mean_a[0].clone()),
        up(mean_a[1].clone()),
        up(mean_a[2].clone()),
    ];
    let mean_b_full = up(mean_b);
    apply_coefficients(&planes, &mean_a_full, &mean_b_full, w, h)
}

/// How [`upscale_alpha`] fills in resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpscaleMethod {
    /// Plain bilinear resampling; ignores the guide content.
    Bilinear,
    /// Fast guided filter driven by the full-resolution guide.
    FastGuided,
}

/// Upscales a low-resolution matte to the guide's resolution.
pub fn upscale_alpha(
    alpha_low: &AlphaMatte,
    guide_full: &Image,
    method: UpscaleMethod,
    config: &GuidedFilterConfig,
) -> Result<AlphaMatte> {
    if guide_full.width() < alpha_low.width() || guide_full.height() < alpha_low.height() {
        return Err(Error::InvalidParameter(format!(
            "guide ({}x{}) must be at least the matte size ({}x{})",
            guide_full.width(),
            guide_full.height(),
            alpha_low.width(),
            alpha_low.height()
        )));
    }
    match method {
        UpscaleMethod::Bilinear => resample_matte(
            alpha_low,
            guide_full.width(),
            guide_full.height(),
            ResampleMethod::Bilinear,
        ),
        UpscaleMethod::FastGuided => fast_guided_filter(guide_full, alpha_low, config),
    }
}
