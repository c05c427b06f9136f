//! Trimap generation and region masks.
//!
//! A trimap labels every pixel definite foreground, definite background, or
//! unknown. Generation thresholds the matte and erodes both definite regions
//! by `band_radius` to carve out the unknown band. Erosion uses the
//! radius-`r` 8-connected disk (all pixels within Chebyshev distance `r`,
//! i.e. `r` iterations of one-step erosion over the 4-neighbors plus
//! diagonals); pixels outside the image count as region members, so the band
//! does not creep in from frame edges.

use std::path::Path;

use image::DynamicImage;

use crate::error::{Error, Result};
use crate::exec;
use crate::io::{decode_png, encode_png};
use crate::raster::AlphaMatte;

/// Pixel classes of a trimap, with their 8-bit PNG encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum TrimapLabel {
    Background = 0,
    Unknown = 128,
    Foreground = 255,
}

/// A three-way label map partitioning an image.
#[derive(Debug, Clone, PartialEq)]
pub struct Trimap {
    width: usize,
    height: usize,
    labels: Vec<TrimapLabel>,
}

/// Thresholds and band width for [`generate_trimap`].
#[derive(Debug, Clone, Copy)]
pub struct TrimapConfig {
    /// Alpha at or above this is definite foreground before erosion.
    pub fg_threshold: f32,
    /// Alpha at or below this is definite background before erosion.
    pub bg_threshold: f32,
    /// Erosion radius carving the unknown band, in pixels.
    pub band_radius: usize,
}

impl Default for TrimapConfig {
    fn default() -> Self {
        TrimapConfig {
            fg_threshold: 0.95,
            bg_threshold: 0.05,
            band_radius: 10,
        }
    }
}

impl TrimapConfig {
    fn validate(&self) -> Result<()> {
        let ok = |t: f32| t > 0.0 && t < 1.0;
        if !ok(self.fg_threshold) || !ok(self.bg_threshold) {
            return Err(Error::InvalidParameter(
                "trimap thresholds must lie in (0, 1)".into(),
            ));
        }
        if self.bg_threshold >= self.fg_threshold {
            return Err(Error::InvalidParameter(format!(
                "bg_threshold {} must be below fg_threshold {}",
                self.bg_threshold, self.fg_threshold
            )));
        }
        Ok(())
    }
}

/// Erodes a binary mask by Chebyshev radius `r`; out-of-image counts as 1.
///
/// Separable min filter: a pixel survives iff every pixel of its
/// (2r+1)x(2r+1) window (clipped to the image) is set.
fn erode(mask: &[u8], width: usize, height: usize, r: usize) -> Vec<u8> {
    if r == 0 {
        return mask.to_vec();
    }
    let mut mid = vec![0u8; mask.len()];
    exec::for_each_row(&mut mid, width, |y, row| {
        let src = &mask[y * width..(y + 1) * width];
        for (x, slot) in row.iter_mut().enumerate() {
            let lo = x.saturating_sub(r);
            let hi = (x + r).min(width - 1);
            *slot = src[lo..=hi].iter().copied().min().unwrap_or(1);
        }
    });
    let mut out = vec![0u8; mask.len()];
    exec::for_each_row(&mut out, width, |y, row| {
        let lo = y.saturating_sub(r);
        let hi = (y + r).min(height - 1);
        for (x, slot) in row.iter_mut().enumerate() {
            let mut m = 1u8;
            for yy in lo..=hi {
                m = m.min(mid[yy * width + x]);
            }
            *slot = m;
        }
    });
    out
}

/// Builds a trimap from a matte: eroded definite regions, unknown elsewhere.
pub fn generate_trimap(alpha: &AlphaMatte, config: &TrimapConfig) -> Result<Trimap> {
    config.validate()?;
    let (w, h) = (alpha.width(), alpha.height());
    let fg: Vec<u8> = alpha
        .data()
        .iter()
        .map(|&v| (v >= config.fg_threshold) as u8)
        .collect();
    let bg: Vec<u8> = alpha
        .data()
        .iter()
        .map(|&v| (v <= config.bg_threshold) as u8)
        .collect();
    let fg = erode(&fg, w, h, config.band_radius);
    let bg = erode(&bg, w, h, config.band_radius);
    let labels = fg
        .iter()
        .zip(&bg)
        .map(|(&f, &b)| {
            if f == 1 {
                TrimapLabel::Foreground
            } else if b == 1 {
                TrimapLabel::Background
            } else {
                TrimapLabel::Unknown
            }
        })
        .collect();
    Ok(Trimap {
        width: w,
        height: h,
        labels,
    })
}

impl Trimap {
    pub fn from_labels(width: usize, height: usize, labels: Vec<TrimapLabel>) -> Result<Self> {
        if width == 0 || height == 0 || labels.len() != width * height {
            return Err(Error::InvalidRaster(format!(
                "trimap needs {width}x{height} = {} labels, got {}",
                width * height,
                labels.len()
            )));
        }
        Ok(Trimap {
            width,
            height,
            labels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[TrimapLabel] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, x: usize, y: usize) -> TrimapLabel {
        self.labels[y * self.width + x]
    }

    /// Binary mask of one region: 1 where the label matches.
    pub fn region_mask(&self, region: TrimapLabel) -> AlphaMatte {
        let data = self
            .labels
            .iter()
            .map(|&l| (l == region) as u8 as f32)
            .collect();
        AlphaMatte::from_vec(self.width, self.height, data)
            .expect("binary mask from valid trimap")
    }

    /// Serializes as an 8-bit grayscale PNG with values {0, 128, 255}.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let bytes: Vec<u8> = self.labels.iter().map(|&l| l as u8).collect();
        encode_png(
            path.as_ref(),
            self.width,
            self.height,
            &bytes,
            image::ExtendedColorType::L8,
        )
    }

    /// Loads a trimap PNG written by [`Trimap::save`].
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let decoded = decode_png(path)?;
        let (w, h) = (decoded.width() as usize, decoded.height() as usize);
        let gray = match decoded {
            DynamicImage::ImageLuma8(buf) => buf.into_raw(),
            other => {
                return Err(Error::UnsupportedPng {
                    path: path.to_path_buf(),
                    detail: format!(
                        "trimaps are 8-bit grayscale, got {}",
                        match other {
                            DynamicImage::ImageLuma16(_) => "16-bit grayscale",
                            DynamicImage::ImageRgb8(_) => "8-bit RGB",
                            DynamicImage::ImageRgba8(_) => "8-bit RGBA",
                            _ => "another color type",
                        }
                    ),
                })
            }
        };
        let labels = gray
            .iter()
            .map(|&v| match v {
                0 => Ok(TrimapLabel::Background),
                128 => Ok(TrimapLabel::Unknown),
                255 => Ok(TrimapLabel::Foreground),
                other => Err(Error::UnsupportedPng {
                    path: path.to_path_buf(),
                    detail: format!("trimap value {other} is not one of {{0, 128, 255}}"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Trimap::from_labels(w, h, labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_alpha_radius_zero_is_exact_binarization() {
        let a = AlphaMatte::from_fn(6, 4, |x, y| ((x + y) % 2) as f32).unwrap();
        let cfg = TrimapConfig {
            band_radius: 0,
            ..Default::default()
        };
        let t = generate_trimap(&a, &cfg).unwrap();
        for y in 0..4 {
            for x in 0..6 {
                let expect = if (x + y) % 2 == 1 {
                    TrimapLabel::Foreground
                } else {
                    TrimapLabel::Background
                };
                assert_eq!(t.label(x, y), expect);
            }
        }
    }

    #[test]
    fn mid_gray_alpha_is_all_unknown() {
        let a = AlphaMatte::constant(5, 5, 0.5).unwrap();
        let t = generate_trimap(&a, &TrimapConfig::default()).unwrap();
        assert!(t.labels().iter().all(|&l| l == TrimapLabel::Unknown));
    }

    #[test]
    fn single_foreground_pixel_with_radius_one() {
        // 5x5, alpha=1 only at the center, radius 1: the foreground region
        // erodes away entirely, and background erosion removes the center's
        // 8-neighborhood, leaving center + ring unknown.
        let a = AlphaMatte::from_fn(5, 5, |x, y| if x == 2 && y == 2 { 1.0 } else { 0.0 }).unwrap();
        let cfg = TrimapConfig {
            band_radius: 1,
            ..Default::default()
        };
        let t = generate_trimap(&a, &cfg).unwrap();
        for y in 0..5usize {
            for x in 0..5usize {
                let near_center = x.abs_diff(2) <= 1 && y.abs_diff(2) <= 1;
                let expect = if near_center {
                    TrimapLabel::Unknown
                } else {
                    TrimapLabel::Background
                };
                assert_eq!(t.label(x, y), expect, "at ({x}, {y})");
            }
        }
    }

    #[test]
    fn erosion_does_not_eat_frame_borders() {
        // All-foreground alpha stays all-foreground for any radius.
        let a = AlphaMatte::constant(6, 6, 1.0).unwrap();
        let cfg = TrimapConfig {
            band_radius: 3,
            ..Default::default()
        };
        let t = generate_trimap(&a, &cfg).unwrap();
        assert!(t.labels().iter().all(|&l| l == TrimapLabel::Foreground));
    }

    #[test]
    fn region_masks_partition_the_image() {
        let a = AlphaMatte::from_fn(16, 16, |x, y| ((x * 13 + y * 7) % 17) as f32 / 16.0).unwrap();
        let t = generate_trimap(
            &a,
            &TrimapConfig {
                band_radius: 2,
                ..Default::default()
            },
        )
        .unwrap();
        let fg = t.region_mask(TrimapLabel::Foreground);
        let bg = t.region_mask(TrimapLabel::Background);
        let un = t.region_mask(TrimapLabel::Unknown);
        for i in 0..fg.data().len() {
            let s = fg.data()[i] + bg.data()[i] + un.data()[i];
            assert_eq!(s, 1.0);
        }
    }

    #[test]
    fn mixed_two_by_two_region_mask() {
        let t = Trimap::from_labels(
            2,
            2,
            vec![
                TrimapLabel::Foreground,
                TrimapLabel::Background,
                TrimapLabel::Unknown,
                TrimapLabel::Unknown,
            ],
        )
        .unwrap();
        let u = t.region_mask(TrimapLabel::Unknown);
        assert_eq!(u.data(), &[0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn widening_the_band_never_shrinks_unknown() {
        let a = AlphaMatte::from_fn(24, 24, |x, y| {
            let d = ((x as f32 - 12.0).powi(2) + (y as f32 - 12.0).powi(2)).sqrt();
            (1.0 - (d - 6.0) / 3.0).clamp(0.0, 1.0)
        })
        .unwrap();
        let mut prev = 0usize;
        for r in 0..6 {
            let t = generate_trimap(
                &a,
                &TrimapConfig {
                    band_radius: r,
                    ..Default::default()
                },
            )
            .unwrap();
            let unknown = t
                .labels()
                .iter()
                .filter(|&&l| l == TrimapLabel::Unknown)
                .count();
            assert!(unknown >= prev, "radius {r}: {unknown} < {prev}");
            prev = unknown;
        }
    }

    #[test]
    fn png_roundtrip_preserves_labels() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.png");
        let a = AlphaMatte::from_fn(9, 7, |x, y| ((x * y) % 11) as f32 / 10.0).unwrap();
        let t = generate_trimap(
            &a,
            &TrimapConfig {
                band_radius: 1,
                ..Default::default()
            },
        )
        .unwrap();
        t.save(&p).unwrap();
        let t2 = Trimap::load(&p).unwrap();
        assert_eq!(t, t2);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let a = AlphaMatte::constant(4, 4, 0.5).unwrap();
        let bad = TrimapConfig {
            fg_threshold: 0.05,
            bg_threshold: 0.95,
            band_radius: 1,
        };
        assert!(generate_trimap(&a, &bad).is_err());
    }
}
