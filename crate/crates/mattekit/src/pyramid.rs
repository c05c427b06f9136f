//! Gaussian/Laplacian pyramids.
//!
//! Burt–Adelson construction with the separable 5-tap binomial kernel
//! `[1, 4, 6, 4, 1] / 16` and reflect-101 borders. Downsampling filters then
//! decimates to ceil-half dimensions; upsampling zero-inserts and applies the
//! same kernel at twice the gain. Band-pass levels are signed and stored as
//! [`Plane`]s; the last level is the low-pass residue. [`Pyramid::reconstruct`]
//! inverts the analysis exactly up to floating-point rounding.

use crate::error::{Error, Result};
use crate::exec;
use crate::raster::{AlphaMatte, Image, Plane};

const KERNEL: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// A Laplacian pyramid of one raster channel; level 0 is full resolution.
#[derive(Debug, Clone)]
pub struct Pyramid {
    levels: Vec<Plane>,
}

/// Reflect-101 index folding: ... 2 1 | 0 1 2 ... n-1 | n-2 n-3 ...
#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = i;
    // A couple of folds suffice for the 5-tap kernel, but loop for safety.
    loop {
        if i < 0 {
            i = -i;
        } else if i >= n {
            i = 2 * n - 2 - i;
        } else {
            return i as usize;
        }
        if n == 1 {
            return 0;
        }
    }
}

/// Filters one row with the binomial kernel and keeps even samples.
fn down_axis(src: &[f64], out: &mut [f64]) {
    let n = src.len();
    for (k, slot) in out.iter_mut().enumerate() {
        let center = 2 * k as isize;
        let mut acc = 0.0;
        for (t, w) in KERNEL.iter().enumerate() {
            let i = reflect(center - 2 + t as isize, n);
            acc += w * src[i];
        }
        *slot = acc;
    }
}

/// Zero-inserts one row to the parent length and filters at 2x gain.
fn up_axis(src: &[f64], out: &mut [f64]) {
    let m = src.len();
    let n = out.len();
    // Zero-inserted signal z[i] = src[i/2] for even i < 2m, else 0.
    let z = |i: usize| -> f64 {
        if i.is_multiple_of(2) && i / 2 < m {
            src[i / 2]
        } else {
            0.0
        }
    };
    for (i, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (t, w) in KERNEL.iter().enumerate() {
            let j = reflect(i as isize - 2 + t as isize, n);
            acc += w * z(j);
        }
        *slot = 2.0 * acc;
    }
}

/// One pyramid downsampling step: binomial filter + decimation on both axes.
pub(crate) fn downsample(p: &Plane) -> Plane {
    let (w, h) = (p.width(), p.height());
    let (nw, nh) = (w.div_ceil(2), h.div_ceil(2));
    // Horizontal pass.
    let mut mid = Plane::zeros(nw, h);
    {
        let src = p.data();
        exec::for_each_row(mid.data_mut(), nw, |y, row| {
            down_axis(&src[y * w..(y + 1) * w], row);
        });
    }
    // Vertical pass: process columns; parallelize over output rows instead of
    // columns to keep writes row-contiguous.
    let mut out = Plane::zeros(nw, nh);
    {
        let src = mid.data();
        exec::for_each_row(out.data_mut(), nw, |k, row| {
            let center = 2 * k as isize;
            for (x, slot) in row.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (t, wgt) in KERNEL.iter().enumerate() {
                    let i = reflect(center - 2 + t as isize, h);
                    acc += wgt * src[i * nw + x];
                }
                *slot = acc;
            }
        });
    }
    out
}

/// One pyramid upsampling step to the requested parent dimensions.
pub(crate) fn upsample(p: &Plane, parent_width: usize, parent_height: usize) -> Plane {
    let (w, h) = (p.width(), p.height());
    debug_assert_eq!(w, parent_width.div_ceil(2));
    debug_assert_eq!(h, parent_height.div_ceil(2));
    // Horizontal pass to parent width.
    let mut mid = Plane::zeros(parent_width, h);
    {
        let src = p.data();
        exec::for_each_row(mid.data_mut(), parent_width, |y, row| {
            up_axis(&src[y * w..(y + 1) * w], row);
        });
    }
    // Vertical pass to parent height.
    let mut out = Plane::zeros(parent_width, parent_height);
    {
        let src = mid.data();
        let nh = parent_height;
        exec::for_each_row(out.data_mut(), parent_width, |i, row| {
            for (x, slot) in row.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (t, wgt) in KERNEL.iter().enumerate() {
                    let j = reflect(i as isize - 2 + t as isize, nh);
                    if j.is_multiple_of(2) && j / 2 < h {
                        acc += wgt * src[(j / 2) * parent_width + x];
                    }
                }
                *slot = 2.0 * acc;
            }
        });
    }
    out
}

/// Largest valid level count for a `width`×`height` raster: halving must be
/// real at every step, i.e. `2^(levels-1) <= min(width, height)`.
pub fn max_levels(width: usize, height: usize) -> usize {
    let mut dim = width.min(height);
    let mut levels = 1;
    while dim >= 2 {
        dim /= 2;
        levels += 1;
    }
    levels
}

fn check_levels(width: usize, height: usize, levels: usize) -> Result<()> {
    if levels == 0 {
        return Err(Error::InvalidParameter("levels must be >= 1".into()));
    }
    let max = max_levels(width, height);
    if levels > max {
        return Err(Error::InvalidParameter(format!(
            "{levels} pyramid levels too many for a {width}x{height} raster (max {max})"
        )));
    }
    Ok(())
}

fn build(plane: Plane, levels: usize) -> Pyramid {
    let mut out = Vec::with_capacity(levels);
    let mut gaussian = plane;
    for _ in 0..levels - 1 {
        let next = downsample(&gaussian);
        let up = upsample(&next, gaussian.width(), gaussian.height());
        let mut band = gaussian;
        for (b, u) in band.data_mut().iter_mut().zip(up.data()) {
            *b -= u;
        }
        out.push(band);
        gaussian = next;
    }
    out.push(gaussian);
    Pyramid { levels: out }
}

impl Pyramid {
    /// Band-pass levels 0..n-2 followed by the low-pass residue.
    pub fn levels(&self) -> &[Plane] {
        &self.levels
    }

    pub fn from_levels(levels: Vec<Plane>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::MalformedPyramid("no levels".into()));
        }
        for i in 1..levels.len() {
            let (pw, ph) = (levels[i - 1].width(), levels[i - 1].height());
            if levels[i].width() != pw.div_ceil(2) || levels[i].height() != ph.div_ceil(2) {
                return Err(Error::MalformedPyramid(format!(
                    "level {i} is {}x{}, expected {}x{} (ceil-half of level {})",
                    levels[i].width(),
                    levels[i].height(),
                    pw.div_ceil(2),
                    ph.div_ceil(2),
                    i - 1
                )));
            }
        }
        Ok(Pyramid { levels })
    }

    /// Inverts the analysis: upsample-and-add from the residue outward.
    pub fn reconstruct(&self) -> Plane {
        let n = self.levels.len();
        let mut acc = self.levels[n - 1].clone();
        for s in (0..n - 1).rev() {
            let band = &self.levels[s];
            let mut up = upsample(&acc, band.width(), band.height());
            for (u, b) in up.data_mut().iter_mut().zip(band.data()) {
                *u += b;
            }
            acc = up;
        }
        acc
    }

    /// Reconstructs and clamps into a matte (single final clamp to `[0, 1]`).
    pub fn reconstruct_matte(&self) -> Result<AlphaMatte> {
        self.reconstruct().into_matte()
    }
}

impl AlphaMatte {
    /// Laplacian pyramid of this matte with the given number of levels.
    pub fn laplacian_pyramid(&self, levels: usize) -> Result<Pyramid> {
        check_levels(self.width(), self.height(), levels)?;
        Ok(build(self.to_plane(), levels))
    }
}

impl Image {
    /// Per-channel Laplacian pyramids (R, G, B).
    pub fn laplacian_pyramid(&self, levels: usize) -> Result<[Pyramid; 3]> {
        check_levels(self.width(), self.height(), levels)?;
        Ok([
            build(self.channel(0), levels),
            build(self.channel(1), levels),
            build(self.channel(2), levels),
        ])
    }
}
