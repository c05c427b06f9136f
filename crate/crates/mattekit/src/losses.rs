//! Training-objective evaluators: L1/Laplacian/composition losses with the
//! weighted total, minimax GAN objective values (single and dual
//! discriminator), and the alignment-agreement filter criterion.
//!
//! These score existing predictions; none of them produce gradients.

use serde::{Deserialize, Serialize};

use crate::composite::{blend, FbEstimate};
use crate::error::{ensure_same_dims, Error, Result};
use crate::exec;
use crate::raster::{AlphaMatte, Image};

/// Weights of the total matting loss. The composition term dominates by
/// default (10 vs 1 for the linear terms).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LossWeights {
    pub w_l1: f64,
    pub w_lap: f64,
    pub w_comp: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            w_l1: 1.0,
            w_lap: 1.0,
            w_comp: 10.0,
        }
    }
}

impl LossWeights {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("w_l1", self.w_l1),
            ("w_lap", self.w_lap),
            ("w_comp", self.w_comp),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "loss weight {name} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Mean absolute difference between two mattes.
pub fn l1_loss(pred: &AlphaMatte, gt: &AlphaMatte) -> Result<f64> {
    ensure_same_dims(gt.width(), gt.height(), pred.width(), pred.height())?;
    let p = pred.data();
    let g = gt.data();
    let n = p.len();
    Ok(exec::sum_indexed(n, |i| (p[i] as f64 - g[i] as f64).abs()) / n as f64)
}

/// Laplacian pyramid loss: stage-weighted sum of mean absolute band
/// differences, `sum over stages s of 2^s * mean|L_s(pred) - L_s(gt)|`,
/// including the low-pass residue stage.
///
/// With a single level the pyramid degenerates to the raster itself and the
/// loss equals [`l1_loss`].
pub fn laplacian_loss(pred: &AlphaMatte, gt: &AlphaMatte, levels: usize) -> Result<f64> {
    laplacian_loss_with(pred, gt, levels, 2.0)
}

/// [`laplacian_loss`] with a configurable geometric stage weight: stage `s`
/// contributes `stage_base^s` times its mean absolute band difference.
pub fn laplacian_loss_with(
    pred: &AlphaMatte,
    gt: &AlphaMatte,
    levels: usize,
    stage_base: f64,
) -> Result<f64> {
    ensure_same_dims(gt.width(), gt.height(), pred.width(), pred.height())?;
    if stage_base <= 0.0 || !stage_base.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "stage_base must be finite and > 0, got {stage_base}"
        )));
    }
    let pp = pred.laplacian_pyramid(levels)?;
    let gp = gt.laplacian_pyramid(levels)?;
    let mut total = 0.0;
    for (s, (lp, lg)) in pp.levels().iter().zip(gp.levels()).enumerate() {
        let n = lp.data().len();
        let mean = exec::sum_indexed(n, |i| (lp.data()[i] - lg.data()[i]).abs()) / n as f64;
        total += stage_base.powi(s as i32) * mean;
    }
    Ok(total)
}

/// MSE between the re-composite under `pred_alpha` and the observed
/// composite, averaged over pixels and channels.
pub fn composition_loss(
    pred_alpha: &AlphaMatte,
    fb: &FbEstimate,
    composite: &Image,
) -> Result<f64> {
    ensure_same_dims(
        composite.width(),
        composite.height(),
        pred_alpha.width(),
        pred_alpha.height(),
    )?;
    let recomposed = blend(&fb.foreground, &fb.background, pred_alpha)?;
    ensure_same_dims(
        composite.width(),
        composite.height(),
        recomposed.width(),
        recomposed.height(),
    )?;
    let a = recomposed.data();
    let b = composite.data();
    let n = a.len();
    Ok(exec::sum_indexed(n, |i| {
        let d = a[i] as f64 - b[i] as f64;
        d * d
    }) / n as f64)
}

/// The weighted loss stack: total plus its components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub total: f64,
    pub l1: f64,
    pub laplacian: f64,
    pub composition: f64,
}

/// Laplacian stage count used by [`total_matting_loss`].
pub const DEFAULT_LOSS_LEVELS: usize = 5;

/// Evaluates `w_l1 * l1 + w_lap * lap + w_comp * comp` and reports the parts.
pub fn total_matting_loss(
    pred: &AlphaMatte,
    gt: &AlphaMatte,
    fb: &FbEstimate,
    composite: &Image,
    weights: &LossWeights,
) -> Result<LossBreakdown> {
    weights.validate()?;
    let l1 = l1_loss(pred, gt)?;
    let levels = DEFAULT_LOSS_LEVELS.min(crate::pyramid::max_levels(pred.width(), pred.height()));
    let laplacian = laplacian_loss(pred, gt, levels)?;
    let composition = composition_loss(pred, fb, composite)?;
    Ok(LossBreakdown {
        total: weights.w_l1 * l1 + weights.w_lap * laplacian + weights.w_comp * composition,
        l1,
        laplacian,
        composition,
    })
}

/// A nonempty batch of discriminator scores, each strictly inside (0, 1).
#[derive(Debug, Clone)]
pub struct ScoreBatch {
    values: Vec<f64>,
}

impl ScoreBatch {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyScoreBatch);
        }
        for &v in &values {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::ScoreOutOfRange(v));
            }
        }
        Ok(ScoreBatch { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

// Scores are clamped away from the boundaries before logs so saturated
// discriminators still produce finite values.
const SCORE_CLAMP: f64 = 1e-12;

#[inline]
fn safe(v: f64) -> f64 {
    v.clamp(SCORE_CLAMP, 1.0 - SCORE_CLAMP)
}

fn mean(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    values.sum::<f64>() / n as f64
}

/// Single-discriminator minimax objective value:
/// `mean(log D(real)) + mean(log(1 - D(fake)))`. Always <= 0, approaching 0
/// only in the perfect-discriminator limit.
pub fn gan_minimax_value(real: &ScoreBatch, fake: &ScoreBatch) -> f64 {
    let r = mean(real.values().iter().map(|&v| safe(v).ln()), real.len());
    let f = mean(
        fake.values().iter().map(|&v| (1.0 - safe(v)).ln()),
        fake.len(),
    );
    r + f
}

/// Dual-discriminator objective value:
/// `mean(log r3 + lambda * log r4) + mean(log((1 - f3) * (1 - f4)))`,
/// pairing batch elements by index.
pub fn gan_dual_value(
    real3: &ScoreBatch,
    real4: &ScoreBatch,
    fake3: &ScoreBatch,
    fake4: &ScoreBatch,
    lambda: f64,
) -> Result<f64> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be finite and >= 0, got {lambda}"
        )));
    }
    if real3.len() != real4.len() {
        return Err(Error::BatchLengthMismatch(real3.len(), real4.len()));
    }
    if fake3.len() != fake4.len() {
        return Err(Error::BatchLengthMismatch(fake3.len(), fake4.len()));
    }
    let real_term = mean(
        real3
            .values()
            .iter()
            .zip(real4.values())
            .map(|(&r3, &r4)| safe(r3).ln() + lambda * safe(r4).ln()),
        real3.len(),
    );
    let fake_term = mean(
        fake3
            .values()
            .iter()
            .zip(fake4.values())
            .map(|(&f3, &f4)| ((1.0 - safe(f3)) * (1.0 - safe(f4))).ln()),
        fake3.len(),
    );
    Ok(real_term + fake_term)
}

/// Parameters of the alignment-agreement filter.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FilterConfig {
    /// Binarization level: matte pixels strictly above it count as set.
    pub epsilon: f64,
    /// Acceptance threshold on the mean disagreement.
    pub threshold_t: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            epsilon: 0.1,
            threshold_t: 0.1,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if !(self.threshold_t > 0.0 && self.threshold_t <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "threshold_t must lie in (0, 1], got {}",
                self.threshold_t
            )));
        }
        Ok(())
    }
}

/// Outcome of the alignment-agreement check for one matte/segmentation pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    /// Mean absolute difference between the binarized matte and the mask.
    pub distance: f64,
    /// Whether the pair passes (`distance < threshold_t`).
    pub accepted: bool,
}

/// Compares the epsilon-binarized matte against a binary segmentation mask.
///
/// Binarization is strict (`alpha > epsilon`); the distance is the fraction
/// of disagreeing pixels when the matte itself is binary.
pub fn alignment_agreement(
    alpha: &AlphaMatte,
    seg: &AlphaMatte,
    config: &FilterConfig,
) -> Result<Alignment> {
    config.validate()?;
    ensure_same_dims(seg.width(), seg.height(), alpha.width(), alpha.height())?;
    for (i, &v) in seg.data().iter().enumerate() {
        if v != 0.0 && v != 1.0 {
            return Err(Error::NonBinaryMask(v, i));
        }
    }
    let a = alpha.data();
    let s = seg.data();
    let n = a.len();
    let eps = config.epsilon;
    let distance = exec::sum_indexed(n, |i| {
        let bin = (a[i] as f64 > eps) as u8 as f64;
        (bin - s[i] as f64).abs()
    }) / n as f64;
    Ok(Alignment {
        distance,
        accepted: distance < config.threshold_t,
    })
}
