//! Single-pair tools: `extract-fg`, `trimap`, `upsample`.

use std::path::Path;

use mattekit::composite::estimate_fb;
use mattekit::guided::{upscale_alpha, GuidedFilterConfig, UpscaleMethod};
use mattekit::io::{load_alpha, load_rgba, save_alpha, save_rgba};
use mattekit::pipeline::reblend_residual;
use mattekit::trimap::generate_trimap;

use crate::cfg::ConfigFile;
use crate::dataset::solver_config;
use crate::eval::trimap_config;
use crate::UpscaleMethodArg;

pub fn run_extract_fg(
    config: &ConfigFile,
    image_path: &Path,
    alpha_path: Option<&Path>,
    out_fg: &Path,
    out_bg: Option<&Path>,
    solver_overrides: (Option<f64>, Option<usize>, Option<usize>),
) -> Result<u8, String> {
    let solver = solver_config(config, "extract-fg", solver_overrides);
    let (image, embedded) = load_rgba(image_path).map_err(|e| e.to_string())?;
    let alpha = match alpha_path {
        Some(p) => load_alpha(p).map_err(|e| e.to_string())?,
        None => embedded.ok_or_else(|| {
            format!(
                "{} has no alpha channel; pass --alpha",
                image_path.display()
            )
        })?,
    };
    let fb = estimate_fb(&image, &alpha, &solver).map_err(|e| e.to_string())?;
    save_rgba(out_fg, &fb.foreground, Some(&alpha)).map_err(|e| e.to_string())?;
    if let Some(p) = out_bg {
        save_rgba(p, &fb.background, None).map_err(|e| e.to_string())?;
    }
    let residual = reblend_residual(&image, &alpha, &fb).map_err(|e| e.to_string())?;
    eprintln!(
        "foreground -> {} (re-blend mse {residual:.3e})",
        out_fg.display()
    );
    Ok(0)
}

pub fn run_trimap(
    config: &ConfigFile,
    alpha_path: &Path,
    out: &Path,
    fg_threshold: Option<f64>,
    bg_threshold: Option<f64>,
    band_radius: Option<usize>,
) -> Result<u8, String> {
    let tconfig = trimap_config(config, "trimap", fg_threshold, bg_threshold, band_radius);
    let alpha = load_alpha(alpha_path).map_err(|e| e.to_string())?;
    let trimap = generate_trimap(&alpha, &tconfig).map_err(|e| e.to_string())?;
    trimap.save(out).map_err(|e| e.to_string())?;
    eprintln!("trimap -> {}", out.display());
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
pub fn run_upsample(
    config: &ConfigFile,
    alpha_low: &Path,
    guide: &Path,
    out: &Path,
    method: Option<UpscaleMethodArg>,
    radius: Option<usize>,
    eps: Option<f64>,
    subsample: Option<usize>,
) -> Result<u8, String> {
    let defaults = GuidedFilterConfig::default();
    let gconfig = GuidedFilterConfig {
        radius: radius
            .or_else(|| config.get_usize("upsample", "radius"))
            .unwrap_or(defaults.radius),
        epsilon: eps
            .or_else(|| config.get_f64("upsample", "eps"))
            .unwrap_or(defaults.epsilon),
        subsample: subsample
            .or_else(|| config.get_usize("upsample", "subsample"))
            .unwrap_or(defaults.subsample),
    };
    let method = match method {
        Some(UpscaleMethodArg::Bilinear) => UpscaleMethod::Bilinear,
        Some(UpscaleMethodArg::FastGuided) => UpscaleMethod::FastGuided,
        None => match config.get_string("upsample", "method").as_deref() {
            Some("bilinear") => UpscaleMethod::Bilinear,
            Some("fast-guided") | None => UpscaleMethod::FastGuided,
            Some(other) => return Err(format!("unknown upsample method in config: {other}")),
        },
    };
    let low = load_alpha(alpha_low).map_err(|e| e.to_string())?;
    let (guide_img, _) = load_rgba(guide).map_err(|e| e.to_string())?;
    let up = upscale_alpha(&low, &guide_img, method, &gconfig).map_err(|e| e.to_string())?;
    save_alpha(out, &up).map_err(|e| e.to_string())?;
    eprintln!("upscaled matte -> {}", out.display());
    Ok(0)
}
