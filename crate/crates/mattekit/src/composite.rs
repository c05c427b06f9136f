//! Alpha blending, foreground/background estimation, and background
//! replacement.
//!
//! The estimator minimizes a quadratic energy: the squared blending residual
//! `(alpha*F + (1-alpha)*B - C)^2` plus first-order smoothness on both F and
//! B over 4-neighbor pairs. It runs coarse-to-fine; each level does
//! red-black Gauss-Seidel sweeps where every pixel update solves its local
//! 2x2 system exactly, so the energy never increases. Results are identical
//! for any worker count.

use crate::error::{ensure_same_dims, Error, Result};
use crate::exec;
use crate::raster::{AlphaMatte, Image};
use crate::resample::{resample_f64_channels, resample_image, ResampleMethod};

/// Paired foreground/background estimate for a composite.
#[derive(Debug, Clone)]
pub struct FbEstimate {
    pub foreground: Image,
    pub background: Image,
}

/// Configuration for [`estimate_fb`].
#[derive(Debug, Clone, Copy)]
pub struct FbSolverConfig {
    /// Weight of the first-order smoothness term on F and B.
    pub smoothness_weight: f64,
    /// Gauss-Seidel sweeps per pyramid level.
    pub iterations_per_level: usize,
    /// Coarsening stops once min(width, height) is at or below this.
    pub coarsest_size: usize,
}

impl Default for FbSolverConfig {
    fn default() -> Self {
        FbSolverConfig {
            smoothness_weight: 1.0,
            iterations_per_level: 10,
            coarsest_size: 4,
        }
    }
}

impl FbSolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.smoothness_weight >= 0.0 && self.smoothness_weight.is_finite()) {
            return Err(Error::InvalidParameter(
                "smoothness_weight must be finite and >= 0".into(),
            ));
        }
        if self.iterations_per_level < 1 {
            return Err(Error::InvalidParameter(
                "iterations_per_level must be >= 1".into(),
            ));
        }
        if self.coarsest_size < 2 {
            return Err(Error::InvalidParameter("coarsest_size must be >= 2".into()));
        }
        Ok(())
    }
}

/// Energy values recorded while solving one pyramid level.
#[derive(Debug, Clone)]
pub struct LevelTrace {
    pub width: usize,
    pub height: usize,
    /// Energy after initialization, then after each sweep.
    pub energies: Vec<f64>,
}

/// Per-level energy traces from a solver run, coarse level first.
#[derive(Debug, Clone, Default)]
pub struct SolverTrace {
    pub levels: Vec<LevelTrace>,
}

/// Blends foreground over background: `out = alpha*F + (1-alpha)*B`.
///
/// Binary alpha reproduces F/B bit-exactly, and F = B returns that image
/// unchanged for any alpha.
pub fn blend(foreground: &Image, background: &Image, alpha: &AlphaMatte) -> Result<Image> {
    let (w, h) = (foreground.width(), foreground.height());
    ensure_same_dims(w, h, background.width(), background.height())?;
    ensure_same_dims(w, h, alpha.width(), alpha.height())?;
    let f = foreground.data();
    let b = background.data();
    let a = alpha.data();
    let mut out = vec![0.0f32; w * h * 3];
    exec::for_each_row(&mut out, w * 3, |y, row| {
        for x in 0..w {
            let i = y * w + x;
            let av = a[i];
            for c in 0..3 {
                let j = i * 3 + c;
                row[x * 3 + c] = if av == 0.0 {
                    b[j]
                } else if av == 1.0 {
                    f[j]
                } else {
                    let fv = f[j] as f64;
                    let bv = b[j] as f64;
                    (bv + av as f64 * (fv - bv)) as f32
                };
            }
        }
    });
    Image::from_vec_clamped(w, h, out)
}

/// Solver state for one level, interleaved RGB in f64.
struct Level {
    width: usize,
    height: usize,
    composite: Vec<f64>,
    alpha: Vec<f64>,
}

impl Level {
    fn from_rasters(image: &Image, alpha: &AlphaMatte) -> Level {
        Level {
            width: image.width(),
            height: image.height(),
            composite: image.data().iter().map(|&v| v as f64).collect(),
            alpha: alpha.data().iter().map(|&v| v as f64).collect(),
        }
    }

    /// Ceil-half downsampling of composite and alpha by area averaging.
    fn coarsen(&self) -> Level {
        let (nw, nh) = (self.width.div_ceil(2), self.height.div_ceil(2));
        Level {
            width: nw,
            height: nh,
            composite: resample_f64_channels(
                &self.composite,
                self.width,
                self.height,
                3,
                nw,
                nh,
                true,
            ),
            alpha: resample_f64_channels(&self.alpha, self.width, self.height, 1, nw, nh, true),
        }
    }
}

fn energy(level: &Level, f: &[f64], b: &[f64], lambda: f64) -> f64 {
    let (w, h) = (level.width, level.height);
    exec::sum_indexed(w * h, |i| {
        let x = i % w;
        let y = i / w;
        let a = level.alpha[i];
        let mut e = 0.0;
        for c in 0..3 {
            let j = i * 3 + c;
            let r = a * f[j] + (1.0 - a) * b[j] - level.composite[j];
            e += r * r;
            // Right and down neighbor pairs, each pair counted once.
            if x + 1 < w {
                let df = f[j] - f[j + 3];
                let db = b[j] - b[j + 3];
                e += lambda * (df * df + db * db);
            }
            if y + 1 < h {
                let k = j + w * 3;
                let df = f[j] - f[k];
                let db = b[j] - b[k];
                e += lambda * (df * df + db * db);
            }
        }
        e
    })
}

/// One red-black half-sweep: updates pixels with `(x + y) % 2 == parity`.
///
/// A parity pixel's 4-neighbors all have the opposite parity, so all updates
/// in a phase read only values that the phase leaves untouched; computing
/// them from the pre-phase state is exactly sequential Gauss-Seidel.
fn half_sweep(level: &Level, f: &mut [f64], b: &mut [f64], lambda: f64, parity: usize) {
    let (w, h) = (level.width, level.height);
    // Pre-phase snapshot for neighbor reads. Every neighbor of a parity pixel
    // has the opposite parity and is untouched this phase, so the snapshot
    // holds exactly the values sequential Gauss-Seidel would read.
    let f_read = f.to_vec();
    let b_read = b.to_vec();
    exec::for_each_row2(f, b, w * 3, |y, frow, brow| {
        let start = (y + parity) % 2;
        for x in (start..w).step_by(2) {
            let i = y * w + x;
            let a = level.alpha[i];
            let ac = 1.0 - a;
            // Neighbor sums per channel.
            let mut n = 0.0f64;
            let mut sf = [0.0f64; 3];
            let mut sb = [0.0f64; 3];
            let mut add = |j: usize| {
                n += 1.0;
                for c in 0..3 {
                    sf[c] += f_read[j * 3 + c];
                    sb[c] += b_read[j * 3 + c];
                }
            };
            if x > 0 {
                add(i - 1);
            }
            if x + 1 < w {
                add(i + 1);
            }
            if y > 0 {
                add(i - w);
            }
            if y + 1 < h {
                add(i + w);
            }
            let ln = lambda * n;
            let m00 = a * a + ln;
            let m01 = a * ac;
            let m11 = ac * ac + ln;
            let det = m00 * m11 - m01 * m01;
            if det <= 1e-30 {
                // Smoothness-free updates are singular; leave values as-is.
                continue;
            }
            for c in 0..3 {
                let cv = level.composite[i * 3 + c];
                let rf = a * cv + lambda * sf[c];
                let rb = ac * cv + lambda * sb[c];
                frow[x * 3 + c] = (m11 * rf - m01 * rb) / det;
                brow[x * 3 + c] = (m00 * rb - m01 * rf) / det;
            }
        }
    });
}

fn solve_level(
    level: &Level,
    f: &mut [f64],
    b: &mut [f64],
    config: &FbSolverConfig,
) -> LevelTrace {
    let lambda = config.smoothness_weight;
    let mut energies = Vec::with_capacity(config.iterations_per_level + 1);
    energies.push(energy(level, f, b, lambda));
    for _ in 0..config.iterations_per_level {
        half_sweep(level, f, b, lambda, 0);
        half_sweep(level, f, b, lambda, 1);
        energies.push(energy(level, f, b, lambda));
    }
    LevelTrace {
        width: level.width,
        height: level.height,
        energies,
    }
}

fn to_image(data: &[f64], width: usize, height: usize) -> Image {
    let clamped: Vec<f32> = data.iter().map(|&v| v.clamp(0.0, 1.0) as f32).collect();
    Image::from_vec(width, height, clamped).expect("clamped solver output is a valid image")
}

/// Estimates foreground and background from a composite and its matte,
/// recording the per-sweep energy trace.
pub fn estimate_fb_traced(
    composite: &Image,
    alpha: &AlphaMatte,
    config: &FbSolverConfig,
) -> Result<(FbEstimate, SolverTrace)> {
    config.validate()?;
    ensure_same_dims(
        composite.width(),
        composite.height(),
        alpha.width(),
        alpha.height(),
    )?;

    // Fine-to-coarse level stack.
    let mut stack = vec![Level::from_rasters(composite, alpha)];
    while stack.last().unwrap().width.min(stack.last().unwrap().height) > config.coarsest_size {
        let next = stack.last().unwrap().coarsen();
        stack.push(next);
    }

    // Initialize at the coarsest level with F = B = C.
    let coarsest = stack.last().unwrap();
    let mut f = coarsest.composite.clone();
    let mut b = coarsest.composite.clone();

    let mut trace = SolverTrace::default();
    for (idx, level) in stack.iter().enumerate().rev() {
        if idx < stack.len() - 1 {
            // Prolong from the previous (coarser) level.
            let coarse = &stack[idx + 1];
            f = resample_f64_channels(
                &f,
                coarse.width,
                coarse.height,
                3,
                level.width,
                level.height,
                false,
            );
            b = resample_f64_channels(
                &b,
                coarse.width,
                coarse.height,
                3,
                level.width,
                level.height,
                false,
            );
        }
        trace.levels.push(solve_level(level, &mut f, &mut b, config));
    }

    let fine = &stack[0];
    Ok((
        FbEstimate {
            foreground: to_image(&f, fine.width, fine.height),
            background: to_image(&b, fine.width, fine.height),
        },
        trace,
    ))
}

/// Estimates foreground and background from a composite and its matte.
pub fn estimate_fb(
    composite: &Image,
    alpha: &AlphaMatte,
    config: &FbSolverConfig,
) -> Result<FbEstimate> {
    estimate_fb_traced(composite, alpha, config).map(|(fb, _)| fb)
}

/// Continues solving at full resolution from an existing estimate.
///
/// Returns the refined estimate and the energy trace of the extra sweeps.
pub fn refine_fb(
    composite: &Image,
    alpha: &AlphaMatte,
    init: &FbEstimate,
    config: &FbSolverConfig,
) -> Result<(FbEstimate, LevelTrace)> {
    config.validate()?;
    let (w, h) = (composite.width(), composite.height());
    ensure_same_dims(w, h, alpha.width(), alpha.height())?;
    ensure_same_dims(w, h, init.foreground.width(), init.foreground.height())?;
    ensure_same_dims(w, h, init.background.width(), init.background.height())?;
    let level = Level::from_rasters(composite, alpha);
    let mut f: Vec<f64> = init.foreground.data().iter().map(|&v| v as f64).collect();
    let mut b: Vec<f64> = init.background.data().iter().map(|&v| v as f64).collect();
    let trace = solve_level(&level, &mut f, &mut b, config);
    Ok((
        FbEstimate {
            foreground: to_image(&f, w, h),
            background: to_image(&b, w, h),
        },
        trace,
    ))
}

/// Re-composites onto a new background: estimates F from `(composite, alpha)`
/// and blends it over `new_background` (resampled to fit if needed).
pub fn replace_background(
    composite: &Image,
    alpha: &AlphaMatte,
    new_background: &Image,
    config: &FbSolverConfig,
) -> Result<Image> {
    let (w, h) = (composite.width(), composite.height());
    ensure_same_dims(w, h, alpha.width(), alpha.height())?;
    let fb = estimate_fb(composite, alpha, config)?;
    let bg = if new_background.width() == w && new_background.height() == h {
        new_background.clone()
    } else {
        resample_image(new_background, w, h, ResampleMethod::Bilinear)?
    };
    blend(&fb.foreground, &bg, alpha)
}
