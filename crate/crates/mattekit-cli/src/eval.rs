//! `mattekit eval`: directory evaluation into a CSV report.

use std::path::Path;

use mattekit::report::evaluate_directories;
use mattekit::trimap::TrimapConfig;
use mattekit::with_workers;

use crate::cfg::{resolve_workers, ConfigFile};
use crate::{EXIT_ERROR, EXIT_PARTIAL};

pub fn trimap_config(
    config: &ConfigFile,
    command: &str,
    fg_threshold: Option<f64>,
    bg_threshold: Option<f64>,
    band_radius: Option<usize>,
) -> TrimapConfig {
    let defaults = TrimapConfig::default();
    TrimapConfig {
        fg_threshold: fg_threshold
            .or_else(|| config.get_f64(command, "fg-threshold"))
            .map_or(defaults.fg_threshold, |v| v as f32),
        bg_threshold: bg_threshold
            .or_else(|| config.get_f64(command, "bg-threshold"))
            .map_or(defaults.bg_threshold, |v| v as f32),
        band_radius: band_radius
            .or_else(|| config.get_usize(command, "band-radius"))
            .unwrap_or(defaults.band_radius),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    config: &ConfigFile,
    workers: Option<usize>,
    pred_dir: &Path,
    gt_dir: &Path,
    trimap_dir: Option<&Path>,
    out: &Path,
    fg_threshold: Option<f64>,
    bg_threshold: Option<f64>,
    band_radius: Option<usize>,
) -> Result<u8, String> {
    let workers = resolve_workers(workers, config, "eval");
    let tconfig = trimap_config(config, "eval", fg_threshold, bg_threshold, band_radius);
    let (report, failures) = with_workers(workers, || {
        evaluate_directories(pred_dir, gt_dir, trimap_dir, &tconfig)
    })
    .map_err(|e| e.to_string())?;
    report.write_csv(out).map_err(|e| e.to_string())?;
    for f in &failures {
        eprintln!("failed: {}: {}", f.entry, f.error);
    }
    eprintln!(
        "evaluated {} pairs ({} failed) -> {}",
        report.rows().len(),
        failures.len(),
        out.display()
    );
    if report.rows().is_empty() && !failures.is_empty() {
        return Ok(EXIT_ERROR);
    }
    Ok(if failures.is_empty() { 0 } else { EXIT_PARTIAL })
}
