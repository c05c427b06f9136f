//! PNG input/output.
//!
//! Loads 8- and 16-bit RGB/RGBA PNGs (and grayscale mattes); always saves
//! 8-bit. Values are linearly scaled so that the full integer range maps to
//! `[0, 1]`.

use std::fs;
use std::io::BufWriter;
use std::path::Path;

use image::codecs::png::PngEncoder;
use image::{DynamicImage, ExtendedColorType, ImageEncoder};

use crate::error::{ensure_same_dims, Error, Result};
use crate::raster::{AlphaMatte, Image};

const PNG_SIGNATURE: [u8; 8] = [0x89, 0x50, 0x4E, 0x47, 0x0D, 0x0A, 0x1A, 0x0A];

fn read_file(path: &Path) -> Result<Vec<u8>> {
    match fs::read(path) {
        Ok(bytes) => Ok(bytes),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            Err(Error::FileNotFound(path.to_path_buf()))
        }
        Err(e) => Err(Error::Io {
            path: path.to_path_buf(),
            source: e,
        }),
    }
}

pub(crate) fn decode_png(path: &Path) -> Result<DynamicImage> {
    let bytes = read_file(path)?;
    if bytes.len() < PNG_SIGNATURE.len() || bytes[..8] != PNG_SIGNATURE {
        return Err(Error::NotPng(path.to_path_buf()));
    }
    image::load_from_memory_with_format(&bytes, image::ImageFormat::Png).map_err(|e| {
        Error::Codec {
            path: path.to_path_buf(),
            source: e,
        }
    })
}

fn color_name(img: &DynamicImage) -> &'static str {
    match img {
        DynamicImage::ImageLuma8(_) => "8-bit grayscale",
        DynamicImage::ImageLumaA8(_) => "8-bit grayscale+alpha",
        DynamicImage::ImageRgb8(_) => "8-bit RGB",
        DynamicImage::ImageRgba8(_) => "8-bit RGBA",
        DynamicImage::ImageLuma16(_) => "16-bit grayscale",
        DynamicImage::ImageLumaA16(_) => "16-bit grayscale+alpha",
        DynamicImage::ImageRgb16(_) => "16-bit RGB",
        DynamicImage::ImageRgba16(_) => "16-bit RGBA",
        _ => "unrecognized color type",
    }
}

/// Loads an RGB(A) PNG. Returns the color image and, iff the file carries an
/// alpha channel, the matte.
pub fn load_rgba(path: impl AsRef<Path>) -> Result<(Image, Option<AlphaMatte>)> {
    let path = path.as_ref();
    let decoded = decode_png(path)?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    let unsupported = |detail: String| Error::UnsupportedPng {
        path: path.to_path_buf(),
        detail,
    };
    match decoded {
        DynamicImage::ImageRgb8(buf) => {
            let data = buf.into_raw().iter().map(|&v| v as f32 / 255.0).collect();
            Ok((Image::from_vec(w, h, data)?, None))
        }
        DynamicImage::ImageRgba8(buf) => {
            let raw = buf.into_raw();
            let mut rgb = Vec::with_capacity(w * h * 3);
            let mut alpha = Vec::with_capacity(w * h);
            for px in raw.chunks_exact(4) {
                rgb.push(px[0] as f32 / 255.0);
                rgb.push(px[1] as f32 / 255.0);
                rgb.push(px[2] as f32 / 255.0);
                alpha.push(px[3] as f32 / 255.0);
            }
            Ok((
                Image::from_vec(w, h, rgb)?,
                Some(AlphaMatte::from_vec(w, h, alpha)?),
            ))
        }
        DynamicImage::ImageRgb16(buf) => {
            let data = buf
                .into_raw()
                .iter()
                .map(|&v| v as f32 / 65535.0)
                .collect();
            Ok((Image::from_vec(w, h, data)?, None))
        }
        DynamicImage::ImageRgba16(buf) => {
            let raw = buf.into_raw();
            let mut rgb = Vec::with_capacity(w * h * 3);
            let mut alpha = Vec::with_capacity(w * h);
            for px in raw.chunks_exact(4) {
                rgb.push(px[0] as f32 / 65535.0);
                rgb.push(px[1] as f32 / 65535.0);
                rgb.push(px[2] as f32 / 65535.0);
                alpha.push(px[3] as f32 / 65535.0);
            }
            Ok((
                Image::from_vec(w, h, rgb)?,
                Some(AlphaMatte::from_vec(w, h, alpha)?),
            ))
        }
        other => Err(unsupported(format!(
            "expected RGB or RGBA, got {}",
            color_name(&other)
        ))),
    }
}

/// Loads a matte: a grayscale PNG, or the alpha channel of an RGBA PNG.
pub fn load_alpha(path: impl AsRef<Path>) -> Result<AlphaMatte> {
    let path = path.as_ref();
    let decoded = decode_png(path)?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    match decoded {
        DynamicImage::ImageLuma8(buf) => {
            let data = buf.into_raw().iter().map(|&v| v as f32 / 255.0).collect();
            AlphaMatte::from_vec(w, h, data)
        }
        DynamicImage::ImageLuma16(buf) => {
            let data = buf
                .into_raw()
                .iter()
                .map(|&v| v as f32 / 65535.0)
                .collect();
            AlphaMatte::from_vec(w, h, data)
        }
        DynamicImage::ImageRgba8(buf) => {
            let data = buf
                .into_raw()
                .chunks_exact(4)
                .map(|px| px[3] as f32 / 255.0)
                .collect();
            AlphaMatte::from_vec(w, h, data)
        }
        DynamicImage::ImageRgba16(buf) => {
            let data = buf
                .into_raw()
                .chunks_exact(4)
                .map(|px| px[3] as f32 / 65535.0)
                .collect();
            AlphaMatte::from_vec(w, h, data)
        }
        other => Err(Error::UnsupportedPng {
            path: path.to_path_buf(),
            detail: format!(
                "expected grayscale or RGBA for a matte, got {}",
                color_name(&other)
            ),
        }),
    }
}

#[inline]
pub(crate) fn quantize8(v: f32) -> u8 {
    (v * 255.0).round().clamp(0.0, 255.0) as u8
}

pub(crate) fn encode_png(
    path: &Path,
    width: usize,
    height: usize,
    bytes: &[u8],
    color: ExtendedColorType,
) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let writer = BufWriter::new(file);
    PngEncoder::new(writer)
        .write_image(bytes, width as u32, height as u32, color)
        .map_err(|e| Error::Codec {
            path: path.to_path_buf(),
            source: e,
        })
}

/// Saves an 8-bit PNG: RGBA when `alpha` is given, RGB otherwise.
///
/// Values on the 8-bit grid survive a save/load cycle exactly; everything
/// else lands within 1/255 per channel.
pub fn save_rgba(path: impl AsRef<Path>, image: &Image, alpha: Option<&AlphaMatte>) -> Result<()> {
    let path = path.as_ref();
    let (w, h) = (image.width(), image.height());
    match alpha {
        Some(a) => {
            ensure_same_dims(w, h, a.width(), a.height())?;
            let mut bytes = Vec::with_capacity(w * h * 4);
            for (px, &av) in image.data().chunks_exact(3).zip(a.data()) {
                bytes.push(quantize8(px[0]));
                bytes.push(quantize8(px[1]));
                bytes.push(quantize8(px[2]));
                bytes.push(quantize8(av));
            }
            encode_png(path, w, h, &bytes, ExtendedColorType::Rgba8)
        }
        None => {
            let bytes: Vec<u8> = image.data().iter().map(|&v| quantize8(v)).collect();
            encode_png(path, w, h, &bytes, ExtendedColorType::Rgb8)
        }
    }
}

/// Saves a matte as an 8-bit grayscale PNG.
pub fn save_alpha(path: impl AsRef<Path>, alpha: &AlphaMatte) -> Result<()> {
    let path = path.as_ref();
    let bytes: Vec<u8> = alpha.data().iter().map(|&v| quantize8(v)).collect();
    encode_png(
        path,
        alpha.width(),
        alpha.height(),
        &bytes,
        ExtendedColorType::L8,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_byte_file_as_not_png() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("empty.png");
        fs::write(&p, b"").unwrap();
        match load_rgba(&p) {
            Err(Error::NotPng(_)) => {}
            other => panic!("expected NotPng, got {other:?}"),
        }
    }

    #[test]
    fn reports_missing_file_distinctly() {
        match load_rgba("/nonexistent/nowhere.png") {
            Err(Error::FileNotFound(_)) => {}
            other => panic!("expected FileNotFound, got {other:?}"),
        }
    }

    #[test]
    fn rejects_grayscale_for_rgba_load() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("gray.png");
        encode_png(&p, 2, 2, &[0, 64, 128, 255], ExtendedColorType::L8).unwrap();
        match load_rgba(&p) {
            Err(Error::UnsupportedPng { .. }) => {}
            other => panic!("expected UnsupportedPng, got {other:?}"),
        }
    }

    #[test]
    fn decodes_rgba_bytes_written_by_independent_encoder() {
        // 2x2 RGBA PNG with bytes (255, 0, 0, 128) everywhere, written by the
        // raw encoder rather than through save_rgba.
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("red.png");
        let px = [255u8, 0, 0, 128];
        let mut bytes = Vec::new();
        for _ in 0..4 {
            bytes.extend_from_slice(&px);
        }
        encode_png(&p, 2, 2, &bytes, ExtendedColorType::Rgba8).unwrap();

        let (img, alpha) = load_rgba(&p).unwrap();
        let alpha = alpha.expect("alpha channel present");
        for y in 0..2 {
            for x in 0..2 {
                assert_eq!(img.pixel(x, y), [1.0, 0.0, 0.0]);
                assert_eq!(alpha.at(x, y), 128.0 / 255.0);
            }
        }
    }

    #[test]
    fn rgb_without_alpha_loads_as_image_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("rgb.png");
        let img = Image::constant(3, 2, [0.5, 0.25, 0.75]).unwrap();
        save_rgba(&p, &img, None).unwrap();
        let (_, alpha) = load_rgba(&p).unwrap();
        assert!(alpha.is_none());
    }

    #[test]
    fn on_grid_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("grid.png");
        let img = Image::from_fn(5, 4, |x, y| {
            [
                (x as f32 * 17.0) / 255.0,
                (y as f32 * 31.0) / 255.0,
                ((x * y) as f32 * 3.0) / 255.0,
            ]
        })
        .unwrap();
        let a = AlphaMatte::from_fn(5, 4, |x, y| ((x + y) as f32 * 20.0) / 255.0).unwrap();
        save_rgba(&p, &img, Some(&a)).unwrap();
        let (img2, a2) = load_rgba(&p).unwrap();
        assert_eq!(img.data(), img2.data());
        assert_eq!(a.data(), a2.unwrap().data());
    }

    #[test]
    fn sixteen_bit_load_scales_to_unit_range() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("deep.png");
        // One pixel, RGBA16; the encoder takes native-endian u16 bytes.
        let vals: [u16; 4] = [65535, 0, 32768, 16384];
        let mut bytes = Vec::new();
        for v in vals {
            bytes.extend_from_slice(&v.to_ne_bytes());
        }
        encode_png(&p, 1, 1, &bytes, ExtendedColorType::Rgba16).unwrap();
        let (img, alpha) = load_rgba(&p).unwrap();
        assert_eq!(img.pixel(0, 0)[0], 1.0);
        assert_eq!(img.pixel(0, 0)[1], 0.0);
        assert!((img.pixel(0, 0)[2] - 32768.0 / 65535.0).abs() < 1e-7);
        assert!((alpha.unwrap().at(0, 0) - 16384.0 / 65535.0).abs() < 1e-7);
    }

    #[test]
    fn save_rejects_mismatched_alpha() {
        let dir = tempfile::tempdir().unwrap();
        let img = Image::constant(4, 4, [0.1, 0.2, 0.3]).unwrap();
        let a = AlphaMatte::constant(3, 4, 0.5).unwrap();
        match save_rgba(dir.path().join("x.png"), &img, Some(&a)) {
            Err(Error::DimensionMismatch { .. }) => {}
            other => panic!("expected DimensionMismatch, got {other:?}"),
        }
    }

    #[test]
    fn alpha_matte_roundtrip_through_gray_png() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.png");
        let a = AlphaMatte::from_fn(4, 3, |x, y| ((x * 40 + y * 25) as f32) / 255.0).unwrap();
        save_alpha(&p, &a).unwrap();
        let a2 = load_alpha(&p).unwrap();
        assert_eq!(a.data(), a2.data());
    }
}
