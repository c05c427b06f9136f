//! Core raster types.
//!
//! [`Image`] is an H×W×3 RGB picture and [`AlphaMatte`] an H×W opacity map;
//! both store row-major `f32` data constrained to `[0, 1]`. [`Plane`] is the
//! unconstrained (signed, `f64`) intermediate used by pyramids and filters,
//! where band-pass residuals and solver state legitimately leave `[0, 1]`.

use crate::error::{ensure_same_dims, Error, Result};

/// An RGB image with channel values in `[0, 1]`, row-major, interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

/// A single-channel opacity map with values in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaMatte {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidRaster(format!(
            "dimensions must be positive, got {width}x{height}"
        )));
    }
    Ok(())
}

fn check_values(data: &[f32]) -> Result<()> {
    for (i, &v) in data.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::InvalidRaster(format!(
                "non-finite value {v} at index {i}"
            )));
        }
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidRaster(format!(
                "value {v} at index {i} outside [0, 1]"
            )));
        }
    }
    Ok(())
}

impl Image {
    /// Builds an image from interleaved RGB data, validating range and finiteness.
    pub fn from_vec(width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height * 3 {
            return Err(Error::InvalidRaster(format!(
                "expected {} values for {width}x{height}x3, got {}",
                width * height * 3,
                data.len()
            )));
        }
        check_values(&data)?;
        Ok(Image {
            width,
            height,
            data,
        })
    }

    /// Like [`Image::from_vec`] but clamps values into `[0, 1]`.
    /// Non-finite values are still rejected.
    pub fn from_vec_clamped(width: usize, height: usize, mut data: Vec<f32>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height * 3 {
            return Err(Error::InvalidRaster(format!(
                "expected {} values for {width}x{height}x3, got {}",
                width * height * 3,
                data.len()
            )));
        }
        for v in &mut data {
            if !v.is_finite() {
                return Err(Error::InvalidRaster(format!("non-finite value {v}")));
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(Image {
            width,
            height,
            data,
        })
    }

    /// A width×height image filled with one RGB color.
    pub fn constant(width: usize, height: usize, rgb: [f32; 3]) -> Result<Self> {
        check_dims(width, height)?;
        check_values(&rgb)?;
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&rgb);
        }
        Ok(Image {
            width,
            height,
            data,
        })
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel. Values are clamped.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [f32; 3],
    ) -> Result<Self> {
        check_dims(width, height)?;
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                let px = f(x, y);
                data.extend_from_slice(&px);
            }
        }
        Self::from_vec_clamped(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [f32; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// One color channel as a [`Plane`].
    pub fn channel(&self, c: usize) -> Plane {
        assert!(c < 3, "channel index out of range");
        let data = self
            .data
            .chunks_exact(3)
            .map(|px| f64::from(px[c]))
            .collect();
        Plane {
            width: self.width,
            height: self.height,
            data,
        }
    }

    /// Reassembles an image from three channel planes, clamping to `[0, 1]`.
    pub fn from_channels(r: &Plane, g: &Plane, b: &Plane) -> Result<Self> {
        ensure_same_dims(r.width, r.height, g.width, g.height)?;
        ensure_same_dims(r.width, r.height, b.width, b.height)?;
        let mut data = Vec::with_capacity(r.data.len() * 3);
        for i in 0..r.data.len() {
            data.push(r.data[i] as f32);
            data.push(g.data[i] as f32);
            data.push(b.data[i] as f32);
        }
        Image::from_vec_clamped(r.width, r.height, data)
    }
}

impl AlphaMatte {
    pub fn from_vec(width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height {
            return Err(Error::InvalidRaster(format!(
                "expected {} values for {width}x{height}, got {}",
                width * height,
                data.len()
            )));
        }
        check_values(&data)?;
        Ok(AlphaMatte {
            width,
            height,
            data,
        })
    }

    /// Like [`AlphaMatte::from_vec`] but clamps values into `[0, 1]`.
    pub fn from_vec_clamped(width: usize, height: usize, mut data: Vec<f32>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height {
            return Err(Error::InvalidRaster(format!(
                "expected {} values for {width}x{height}, got {}",
                width * height,
                data.len()
            )));
        }
        for v in &mut data {
            if !v.is_finite() {
                return Err(Error::InvalidRaster(format!("non-finite value {v}")));
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(AlphaMatte {
            width,
            height,
            data,
        })
    }

    pub fn constant(width: usize, height: usize, value: f32) -> Result<Self> {
        check_dims(width, height)?;
        check_values(&[value])?;
        Ok(AlphaMatte {
            width,
            height,
            data: vec![value; width * height],
        })
    }

    /// Builds a matte by evaluating `f(x, y)` for every pixel. Values are clamped.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f32,
    ) -> Result<Self> {
        check_dims(width, height)?;
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::from_vec_clamped(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.width + x]
    }

    pub fn to_plane(&self) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f64::from(v)).collect(),
        }
    }
}

/// A single-channel raster without range constraints (values must be finite).
///
/// Band-pass pyramid levels, gradient responses, and unclamped solver state
/// live here; convert back with [`Plane::into_matte`] once values are meant
/// to be opacities again.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height {
            return Err(Error::InvalidRaster(format!(
                "expected {} values for {width}x{height}, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Plane {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Plane {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Clamps to `[0, 1]` and converts to an [`AlphaMatte`].
    pub fn into_matte(self) -> Result<AlphaMatte> {
        let data = self
            .data
            .into_iter()
            .map(|v| v.clamp(0.0, 1.0) as f32)
            .collect();
        AlphaMatte::from_vec(self.width, self.height, data)
    }
}
