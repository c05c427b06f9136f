//! Raster resampling with nearest, bilinear, and box (area-average) kernels.
//!
//! Coordinates use the half-pixel-center convention: destination pixel `x`
//! maps to source coordinate `(x + 0.5) * src / dst - 0.5`. All three methods
//! are exact identities when the target size equals the source size.

use crate::error::{Error, Result};
use crate::exec;
use crate::raster::{AlphaMatte, Image, Plane};

/// Interpolation kernel for [`resample_image`] / [`resample_matte`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResampleMethod {
    Nearest,
    Bilinear,
    /// Area-weighted average over the source footprint of each output pixel.
    Box,
}

fn check_target(new_width: usize, new_height: usize) -> Result<()> {
    if new_width == 0 || new_height == 0 {
        return Err(Error::InvalidParameter(format!(
            "target dimensions must be positive, got {new_width}x{new_height}"
        )));
    }
    Ok(())
}

/// Per-axis box weights: for each output index, the list of
/// `(source index, weight)` pairs covering its footprint. Weights sum to 1.
fn box_axis_weights(src: usize, dst: usize) -> Vec<Vec<(usize, f64)>> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|d| {
            let lo = d as f64 * scale;
            let hi = (d + 1) as f64 * scale;
            let first = lo.floor() as usize;
            let last = (hi.ceil() as usize).min(src);
            let mut taps = Vec::with_capacity(last - first);
            for s in first..last {
                let overlap = hi.min((s + 1) as f64) - lo.max(s as f64);
                if overlap > 0.0 {
                    taps.push((s, overlap / scale));
                }
            }
            taps
        })
        .collect()
}

fn resample_channels(
    src: &[f32],
    width: usize,
    height: usize,
    channels: usize,
    new_width: usize,
    new_height: usize,
    method: ResampleMethod,
) -> Vec<f32> {
    let mut out = vec![0.0f32; new_width * new_height * channels];
    match method {
        ResampleMethod::Nearest => {
            exec::for_each_row(&mut out, new_width * channels, |y, row| {
                let sy = nearest_index(y, height, new_height);
                for x in 0..new_width {
                    let sx = nearest_index(x, width, new_width);
                    let si = (sy * width + sx) * channels;
                    for c in 0..channels {
                        row[x * channels + c] = src[si + c];
                    }
                }
            });
        }
        ResampleMethod::Bilinear => {
            exec::for_each_row(&mut out, new_width * channels, |y, row| {
                let (y0, y1, fy) = linear_taps(y, height, new_height);
                for x in 0..new_width {
                    let (x0, x1, fx) = linear_taps(x, width, new_width);
                    for c in 0..channels {
                        let v00 = src[(y0 * width + x0) * channels + c] as f64;
                        let v01 = src[(y0 * width + x1) * channels + c] as f64;
                        let v10 = src[(y1 * width + x0) * channels + c] as f64;
                        let v11 = src[(y1 * width + x1) * channels + c] as f64;
                        let v = (1.0 - fy) * ((1.0 - fx) * v00 + fx * v01)
                            + fy * ((1.0 - fx) * v10 + fx * v11);
                        row[x * channels + c] = v as f32;
                    }
                }
            });
        }
        ResampleMethod::Box => {
            let wx = box_axis_weights(width, new_width);
            let wy = box_axis_weights(height, new_height);
            // Horizontal pass into an intermediate, then vertical.
            let mut mid = vec![0.0f64; new_width * height * channels];
            exec::for_each_row(&mut mid, new_width * channels, |y, row| {
                for (x, taps) in wx.iter().enumerate() {
                    for c in 0..channels {
                        let mut acc = 0.0;
                        for &(s, w) in taps {
                            acc += w * src[(y * width + s) * channels + c] as f64;
                        }
                        row[x * channels + c] = acc;
                    }
                }
            });
            exec::for_each_row(&mut out, new_width * channels, |y, row| {
                for x in 0..new_width {
                    for c in 0..channels {
                        let mut acc = 0.0;
                        for &(s, w) in &wy[y] {
                            acc += w * mid[(s * new_width + x) * channels + c];
                        }
                        row[x * channels + c] = acc as f32;
                    }
                }
            });
        }
    }
    out
}

#[inline]
fn nearest_index(dst: usize, src_len: usize, dst_len: usize) -> usize {
    let s = ((dst as f64 + 0.5) * src_len as f64 / dst_len as f64).floor();
    (s.max(0.0) as usize).min(src_len - 1)
}

#[inline]
fn linear_taps(dst: usize, src_len: usize, dst_len: usize) -> (usize, usize, f64) {
    let s = (dst as f64 + 0.5) * src_len as f64 / dst_len as f64 - 0.5;
    let s = s.clamp(0.0, (src_len - 1) as f64);
    let i0 = s.floor() as usize;
    let i1 = (i0 + 1).min(src_len - 1);
    (i0, i1, s - i0 as f64)
}

/// Resamples an image to `new_width`×`new_height`.
pub fn resample_image(
    image: &Image,
    new_width: usize,
    new_height: usize,
    method: ResampleMethod,
) -> Result<Image> {
    check_target(new_width, new_height)?;
    let data = resample_channels(
        image.data(),
        image.width(),
        image.height(),
        3,
        new_width,
        new_height,
        method,
    );
    Image::from_vec_clamped(new_width, new_height, data)
}

/// Resamples a matte to `new_width`×`new_height`.
pub fn resample_matte(
    matte: &AlphaMatte,
    new_width: usize,
    new_height: usize,
    method: ResampleMethod,
) -> Result<AlphaMatte> {
    check_target(new_width, new_height)?;
    let data = resample_channels(
        matte.data(),
        matte.width(),
        matte.height(),
        1,
        new_width,
        new_height,
        method,
    );
    AlphaMatte::from_vec_clamped(new_width, new_height, data)
}

/// Bilinear resampling of an unconstrained plane (used for coefficient maps
/// and coarse-to-fine prolongation, where clamping would be wrong).
pub(crate) fn resample_plane_bilinear(plane: &Plane, new_width: usize, new_height: usize) -> Plane {
    let data = resample_f64_channels(
        plane.data(),
        plane.width(),
        plane.height(),
        1,
        new_width,
        new_height,
        false,
    );
    Plane::new(new_width, new_height, data).expect("resampled plane has consistent dimensions")
}

/// Resamples an interleaved f64 buffer: area-average when `area` is set,
/// bilinear otherwise. No clamping.
pub(crate) fn resample_f64_channels(
    src: &[f64],
    width: usize,
    height: usize,
    channels: usize,
    new_width: usize,
    new_height: usize,
    area: bool,
) -> Vec<f64> {
    let mut out = vec![0.0f64; new_width * new_height * channels];
    if area {
        let wx = box_axis_weights(width, new_width);
        let wy = box_axis_weights(height, new_height);
        let mut mid = vec![0.0f64; new_width * height * channels];
        exec::for_each_row(&mut mid, new_width * channels, |y, row| {
            for (x, taps) in wx.iter().enumerate() {
                for c in 0..channels {
                    let mut acc = 0.0;
                    for &(s, w) in taps {
                        acc += w * src[(y * width + s) * channels + c];
                    }
                    row[x * channels + c] = acc;
                }
            }
        });
        exec::for_each_row(&mut out, new_width * channels, |y, row| {
            for x in 0..new_width {
                for c in 0..channels {
                    let mut acc = 0.0;
                    for &(s, w) in &wy[y] {
                        acc += w * mid[(s * new_width + x) * channels + c];
                    }
                    row[x * channels + c] = acc;
                }
            }
        });
    } else {
        exec::for_each_row(&mut out, new_width * channels, |y, row| {
            let (y0, y1, fy) = linear_taps(y, height, new_height);
            for x in 0..new_width {
                let (x0, x1, fx) = linear_taps(x, width, new_width);
                for c in 0..channels {
                    let v00 = src[(y0 * width + x0) * channels + c];
                    let v01 = src[(y0 * width + x1) * channels + c];
                    let v10 = src[(y1 * width + x0) * channels + c];
                    let v11 = src[(y1 * width + x1) * channels + c];
                    row[x * channels + c] = (1.0 - fy) * ((1.0 - fx) * v00 + fx * v01)
                        + fy * ((1.0 - fx) * v10 + fx * v11);
                }
            }
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_size_is_identity_for_all_methods() {
        let img = Image::from_fn(7, 5, |x, y| {
            [
                (x as f32) / 7.0,
                (y as f32) / 5.0,
                ((x * y) as f32) / 35.0,
            ]
        })
        .unwrap();
        for m in [
            ResampleMethod::Nearest,
            ResampleMethod::Bilinear,
            ResampleMethod::Box,
        ] {
            let out = resample_image(&img, 7, 5, m).unwrap();
            assert_eq!(img.data(), out.data(), "{m:?}");
        }
    }

    #[test]
    fn constants_stay_constant() {
        let m = AlphaMatte::constant(9, 4, 0.37).unwrap();
        for method in [
            ResampleMethod::Nearest,
            ResampleMethod::Bilinear,
            ResampleMethod::Box,
        ] {
            for (nw, nh) in [(3, 2), (19, 9), (1, 1), (9, 4)] {
                let out = resample_matte(&m, nw, nh, method).unwrap();
                for &v in out.data() {
                    assert!((v - 0.37).abs() < 1e-6, "{method:?} {nw}x{nh} -> {v}");
                }
            }
        }
    }

    #[test]
    fn bilinear_upsample_matches_half_pixel_convention() {
        // Hand evaluation: source row [0, 1] to width 4 with half-pixel
        // centers gives source coords -0.25, 0.25, 0.75, 1.25, which clamp
        // to [0, 1] and interpolate to 0, 0.25, 0.75, 1.
        let m = AlphaMatte::from_vec(2, 1, vec![0.0, 1.0]).unwrap();
        let out = resample_matte(&m, 4, 1, ResampleMethod::Bilinear).unwrap();
        let expect = [0.0, 0.25, 0.75, 1.0];
        for (v, e) in out.data().iter().zip(expect) {
            assert!((v - e).abs() < 1e-7, "{v} vs {e}");
        }
    }

    #[test]
    fn box_downsample_averages_blocks() {
        let m = AlphaMatte::from_vec(4, 2, vec![0.0, 1.0, 0.5, 0.5, 1.0, 0.0, 0.0, 1.0]).unwrap();
        let out = resample_matte(&m, 2, 1, ResampleMethod::Box).unwrap();
        assert!((out.at(0, 0) - 0.5).abs() < 1e-7);
        assert!((out.at(1, 0) - 0.5).abs() < 1e-7);
    }

    #[test]
    fn zero_target_dimension_is_an_error() {
        let m = AlphaMatte::constant(4, 4, 0.5).unwrap();
        assert!(resample_matte(&m, 0, 4, ResampleMethod::Nearest).is_err());
    }
}
