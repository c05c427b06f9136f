//! `mattekit composite` and `mattekit filter`: manifest batch jobs.

use std::path::Path;

use mattekit::composite::FbSolverConfig;
use mattekit::losses::FilterConfig;
use mattekit::pipeline::{
    build_composites, filter_by_instance_count, filter_dataset, save_failures, DatasetManifest,
};
use mattekit::with_workers;

use crate::cfg::{resolve_workers, ConfigFile};
use crate::EXIT_PARTIAL;

pub fn solver_config(
    config: &ConfigFile,
    command: &str,
    overrides: (Option<f64>, Option<usize>, Option<usize>),
) -> FbSolverConfig {
    let defaults = FbSolverConfig::default();
    FbSolverConfig {
        smoothness_weight: overrides
            .0
            .or_else(|| config.get_f64(command, "smoothness"))
            .unwrap_or(defaults.smoothness_weight),
        iterations_per_level: overrides
            .1
            .or_else(|| config.get_usize(command, "iterations"))
            .unwrap_or(defaults.iterations_per_level),
        coarsest_size: overrides
            .2
            .or_else(|| config.get_usize(command, "coarsest"))
            .unwrap_or(defaults.coarsest_size),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn run_composite(
    config: &ConfigFile,
    workers: Option<usize>,
    manifest_path: &Path,
    backgrounds: &Path,
    out_dir: &Path,
    seed: Option<u64>,
    failures_path: Option<&Path>,
    solver_overrides: (Option<f64>, Option<usize>, Option<usize>),
) -> Result<u8, String> {
    let workers = resolve_workers(workers, config, "composite");
    let seed = seed
        .or_else(|| config.get_u64("composite", "seed"))
        .unwrap_or(0);
    let solver = solver_config(config, "composite", solver_overrides);
    let manifest = DatasetManifest::load(manifest_path).map_err(|e| e.to_string())?;
    let outcome = with_workers(workers, || {
        build_composites(&manifest, backgrounds, out_dir, &solver, seed)
    })
    .map_err(|e| e.to_string())?;
    outcome
        .manifest
        .save(out_dir.join("manifest.json"))
        .map_err(|e| e.to_string())?;
    if let Some(p) = failures_path {
        save_failures(p, &outcome.failures).map_err(|e| e.to_string())?;
    }
    for f in &outcome.failures {
        eprintln!("failed: {}: {}", f.entry, f.error);
    }
    eprintln!(
        "composited {} entries ({} failed) -> {}",
        outcome.manifest.entries.len(),
        outcome.failures.len(),
        out_dir.display()
    );
    Ok(if outcome.failures.is_empty() {
        0
    } else {
        EXIT_PARTIAL
    })
}

#[allow(clippy::too_many_arguments)]
pub fn run_filter(
    config: &ConfigFile,
    workers: Option<usize>,
    manifest_path: &Path,
    epsilon: Option<f64>,
    t: Option<f64>,
    out_kept: &Path,
    out_rejected: &Path,
    report_path: Option<&Path>,
    failures_path: Option<&Path>,
    max_instances: Option<u32>,
) -> Result<u8, String> {
    let workers = resolve_workers(workers, config, "filter");
    let defaults = FilterConfig::default();
    let fconfig = FilterConfig {
        epsilon: epsilon
            .or_else(|| config.get_f64("filter", "epsilon"))
            .unwrap_or(defaults.epsilon),
        threshold_t: t
            .or_else(|| config.get_f64("filter", "t"))
            .unwrap_or(defaults.threshold_t),
    };
    let max_instances = max_instances.or_else(|| config.get_u32("filter", "max-instances"));

    let mut manifest = DatasetManifest::load(manifest_path).map_err(|e| e.to_string())?;
    if let Some(max) = max_instances {
        let (kept, dropped) = filter_by_instance_count(&manifest, max);
        eprintln!(
            "instance-count pre-filter dropped {} of {} entries",
            dropped.entries.len(),
            kept.entries.len() + dropped.entries.len()
        );
        manifest = kept;
    }

    let outcome = with_workers(workers, || filter_dataset(&manifest, &fconfig))
        .map_err(|e| e.to_string())?;
    outcome.kept.save(out_kept).map_err(|e| e.to_string())?;
    outcome
        .rejected
        .save(out_rejected)
        .map_err(|e| e.to_string())?;
    if let Some(p) = report_path {
        let mut text = serde_json::to_string_pretty(&outcome.records)
            .map_err(|e| format!("serialize report: {e}"))?;
        text.push('\n');
        std::fs::write(p, text).map_err(|e| format!("write {}: {e}", p.display()))?;
    }
    if let Some(p) = failures_path {
        save_failures(p, &outcome.failures).map_err(|e| e.to_string())?;
    }
    for f in &outcome.failures {
        eprintln!("failed: {}: {}", f.entry, f.error);
    }
    eprintln!(
        "kept {} / rejected {} ({} failed)",
        outcome.kept.entries.len(),
        outcome.rejected.entries.len(),
        outcome.failures.len()
    );
    Ok(if outcome.failures.is_empty() {
        0
    } else {
        EXIT_PARTIAL
    })
}
