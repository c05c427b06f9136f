//! Dataset-preparation workflows: manifests, batch composite building,
//! alignment filtering, and augmentation.
//!
//! Every operation here is a pure function of its inputs and an explicit
//! seed. Batch jobs process entries independently (optionally on a worker
//! pool), isolate per-entry failures into a machine-readable summary instead
//! of aborting, and emit outputs in an order sorted by entry path, so
//! repeated runs are byte-identical.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::composite::{blend, replace_background, FbEstimate, FbSolverConfig};
use crate::error::{Error, Result};
use crate::exec;
use crate::io::{load_alpha, load_rgba, save_rgba};
use crate::losses::{alignment_agreement, Alignment, FilterConfig};
use crate::raster::{AlphaMatte, Image};

/// Dataset split labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

/// One dataset record; paths are relative to the manifest root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub image: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seg: Option<String>,
    pub split: Split,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub instance_count: Option<u32>,
}

/// A dataset manifest: a root directory plus relative entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub root: String,
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn new(root: impl Into<String>, entries: Vec<ManifestEntry>) -> Result<Self> {
        let m = DatasetManifest {
            root: root.into(),
            entries,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for e in &self.entries {
            if Path::new(&e.image).is_absolute() {
                return Err(Error::Manifest(format!(
                    "entry path must be relative to root: {}",
                    e.image
                )));
            }
            for p in [&e.alpha, &e.seg].into_iter().flatten() {
                if Path::new(p).is_absolute() {
                    return Err(Error::Manifest(format!(
                        "entry path must be relative to root: {p}"
                    )));
                }
            }
            if !seen.insert(e.image.as_str()) {
                return Err(Error::Manifest(format!("duplicate entry: {}", e.image)));
            }
        }
        Ok(())
    }

    /// Reads a manifest from JSON. A relative root is resolved against the
    /// manifest file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
            _ => Error::Io {
                path: path.to_path_buf(),
                source: e,
            },
        })?;
        let mut manifest: DatasetManifest = serde_json::from_slice(&bytes)
            .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
        if Path::new(&manifest.root).is_relative() {
            if let Some(parent) = path.parent() {
                manifest.root = parent.join(&manifest.root).to_string_lossy().into_owned();
            }
        }
        manifest.validate()?;
        Ok(manifest)
    }

    /// Writes pretty-printed JSON with a trailing newline.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Manifest(format!("serialize: {e}")))?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    }

    pub fn resolve(&self, relative: &str) -> PathBuf {
        Path::new(&self.root).join(relative)
    }
}

/// One failed entry in a batch job.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntryFailure {
    pub entry: String,
    pub error: String,
}

/// Writes a failure summary as a JSON list of `{entry, error}`.
pub fn save_failures(path: impl AsRef<Path>, failures: &[EntryFailure]) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(failures)
        .map_err(|e| Error::Manifest(format!("serialize failures: {e}")))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// PNG files directly inside `dir`, sorted by file name.
pub fn list_png_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let iter = fs::read_dir(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let mut out = Vec::new();
    for item in iter {
        let item = item.map_err(|e| Error::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
        let p = item.path();
        let is_png = p
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if is_png && p.is_file() {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

/// Loads an entry's image and matte: the matte comes from the alpha path if
/// set, otherwise from the image's own alpha channel.
pub fn load_entry(manifest: &DatasetManifest, entry: &ManifestEntry) -> Result<(Image, AlphaMatte)> {
    let (image, embedded) = load_rgba(manifest.resolve(&entry.image))?;
    let alpha = match &entry.alpha {
        Some(rel) => load_alpha(manifest.resolve(rel))?,
        None => embedded.ok_or_else(|| {
            Error::Manifest(format!(
                "entry {} has no alpha path and the image has no alpha channel",
                entry.image
            ))
        })?,
    };
    if alpha.width() != image.width() || alpha.height() != image.height() {
        return Err(Error::dims(
            image.width(),
            image.height(),
            alpha.width(),
            alpha.height(),
        ));
    }
    Ok((image, alpha))
}

/// Flattened output file name for an entry (subdirectories become `__`).
fn output_name(entry_image: &str) -> String {
    let flat = entry_image.replace(['/', '\\'], "__");
    match flat.rsplit_once('.') {
        Some((stem, _)) => format!("{stem}.png"),
        None => format!("{flat}.png"),
    }
}

/// Result of [`build_composites`]: the output manifest plus per-entry failures.
#[derive(Debug)]
pub struct CompositeOutcome {
    pub manifest: DatasetManifest,
    pub failures: Vec<EntryFailure>,
}

/// Re-composites every entry onto a background drawn from `backgrounds`.
///
/// Foreground is estimated from each (image, alpha) pair; the background is
/// picked pseudo-randomly from `seed` plus the entry index, resampled to the
/// image size, and blended. Outputs are RGBA PNGs (composite plus original
/// matte) named after the flattened entry path. Given the same seed the
/// output file set is byte-for-byte reproducible; worker count never changes
/// the bytes.
pub fn build_composites(
    manifest: &DatasetManifest,
    backgrounds: &Path,
    out_dir: &Path,
    solver: &FbSolverConfig,
    seed: u64,
) -> Result<CompositeOutcome> {
    let pool = list_png_files(backgrounds)?;
    if pool.is_empty() {
        return Err(Error::EmptyBackgroundPool(backgrounds.to_path_buf()));
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;

    let mut entries = manifest.entries.clone();
    entries.sort_by(|a, b| a.image.cmp(&b.image));

    // Flattened names can collide ("a/b.png" vs "a__b.png"); fail those
    // entries instead of silently overwriting one output with another.
    let mut name_counts: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    for e in &entries {
        *name_counts.entry(output_name(&e.image)).or_default() += 1;
    }

    let results: Vec<std::result::Result<ManifestEntry, EntryFailure>> =
        exec::map_slice(&entries, |idx, entry| {
            let fail = |e: Error| EntryFailure {
                entry: entry.image.clone(),
                error: e.to_string(),
            };
            if name_counts[&output_name(&entry.image)] > 1 {
                return Err(EntryFailure {
                    entry: entry.image.clone(),
                    error: format!(
                        "output name collision: {} flattens to {}",
                        entry.image,
                        output_name(&entry.image)
                    ),
                });
            }
            let (image, alpha) = load_entry(manifest, entry).map_err(fail)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(idx as u64));
            let bg_path = &pool[rng.random_range(0..pool.len())];
            let (background, _) = load_rgba(bg_path).map_err(fail)?;
            let composed =
                replace_background(&image, &alpha, &background, solver).map_err(fail)?;
            let name = output_name(&entry.image);
            save_rgba(out_dir.join(&name), &composed, Some(&alpha)).map_err(fail)?;
            Ok(ManifestEntry {
                image: name,
                alpha: None,
                seg: None,
                split: entry.split,
                instance_count: entry.instance_count,
            })
        });

    let mut ok = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(e) => ok.push(e),
            Err(f) => failures.push(f),
        }
    }
    Ok(CompositeOutcome {
        manifest: DatasetManifest::new(out_dir.to_string_lossy().into_owned(), ok)?,
        failures,
    })
}

/// Per-entry record of the alignment filter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterRecord {
    pub entry: String,
    pub distance: f64,
    pub accepted: bool,
}

/// Result of [`filter_dataset`].
#[derive(Debug)]
pub struct FilterOutcome {
    pub kept: DatasetManifest,
    pub rejected: DatasetManifest,
    pub records: Vec<FilterRecord>,
    pub failures: Vec<EntryFailure>,
}

/// Splits a manifest by the alignment-agreement criterion.
///
/// Each entry's matte (alpha path, or the image's alpha channel) is
/// binarized and compared against its segmentation mask; entries pass when
/// the disagreement stays below the threshold. Kept and rejected manifests
/// partition the readable entries; unreadable ones land in `failures`.
pub fn filter_dataset(manifest: &DatasetManifest, config: &FilterConfig) -> Result<FilterOutcome> {
    config.validate()?;
    let mut entries = manifest.entries.clone();
    entries.sort_by(|a, b| a.image.cmp(&b.image));

    type Verdict = (ManifestEntry, Alignment);
    let results: Vec<std::result::Result<Verdict, EntryFailure>> =
        exec::map_slice(&entries, |_, entry| {
            let fail = |e: Error| EntryFailure {
                entry: entry.image.clone(),
                error: e.to_string(),
            };
            let seg_rel = entry.seg.as_ref().ok_or_else(|| EntryFailure {
                entry: entry.image.clone(),
                error: "entry has no seg mask".into(),
            })?;
            let (_, alpha) = load_entry(manifest, entry).map_err(fail)?;
            let seg = load_alpha(manifest.resolve(seg_rel)).map_err(fail)?;
            let alignment = alignment_agreement(&alpha, &seg, config).map_err(fail)?;
            Ok((entry.clone(), alignment))
        });

    let mut kept = Vec::new();
    let mut rejected = Vec::new();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok((entry, alignment)) => {
                records.push(FilterRecord {
                    entry: entry.image.clone(),
                    distance: alignment.distance,
                    accepted: alignment.accepted,
                });
                if alignment.accepted {
                    kept.push(entry);
                } else {
                    rejected.push(entry);
                }
            }
            Err(f) => failures.push(f),
        }
    }
    Ok(FilterOutcome {
        kept: DatasetManifest::new(manifest.root.clone(), kept)?,
        rejected: DatasetManifest::new(manifest.root.clone(), rejected)?,
        records,
        failures,
    })
}

/// Drops entries whose sidecar instance count exceeds `max_instances`.
/// Entries without a count are kept.
pub fn filter_by_instance_count(
    manifest: &DatasetManifest,
    max_instances: u32,
) -> (DatasetManifest, DatasetManifest) {
    let (kept, rejected): (Vec<_>, Vec<_>) = manifest
        .entries
        .iter()
        .cloned()
        .partition(|e| e.instance_count.is_none_or(|c| c <= max_instances));
    (
        DatasetManifest {
            root: manifest.root.clone(),
            entries: kept,
        },
        DatasetManifest {
            root: manifest.root.clone(),
            entries: rejected,
        },
    )
}

/// Augmentation parameters. All randomness comes from the generator passed
/// to [`augment`]; `seed` is the conventional way for callers to build it.
///
/// Only horizontal flips, square crops, and background replacement are
/// offered; blur, affine, and color-space augmentations are intentionally
/// out of scope.
#[derive(Debug, Clone)]
pub struct AugmentConfig {
    pub horizontal_flip_prob: f64,
    /// Side of the square random crop; absent means no crop.
    pub crop_size: Option<usize>,
    /// Directory of replacement backgrounds; absent means keep the original.
    pub background_pool: Option<PathBuf>,
    pub seed: u64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            horizontal_flip_prob: 0.5,
            crop_size: None,
            background_pool: None,
            seed: 0,
        }
    }
}

impl AugmentConfig {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

fn flip_horizontal(image: &Image, alpha: &AlphaMatte) -> (Image, AlphaMatte) {
    let (w, h) = (image.width(), image.height());
    let img = Image::from_fn(w, h, |x, y| image.pixel(w - 1 - x, y)).expect("flip preserves range");
    let a = AlphaMatte::from_fn(w, h, |x, y| alpha.at(w - 1 - x, y)).expect("flip preserves range");
    (img, a)
}

fn crop(image: &Image, alpha: &AlphaMatte, x0: usize, y0: usize, size: usize) -> (Image, AlphaMatte) {
    let img = Image::from_fn(size, size, |x, y| image.pixel(x0 + x, y0 + y))
        .expect("crop preserves range");
    let a = AlphaMatte::from_fn(size, size, |x, y| alpha.at(x0 + x, y0 + y))
        .expect("crop preserves range");
    (img, a)
}

/// Applies horizontal flip, square random crop, and optional background
/// replacement, identically to image and matte.
///
/// Draws from `rng` in a fixed order: flip decision, crop corner (when
/// configured), background pick (when configured).
pub fn augment(
    image: &Image,
    alpha: &AlphaMatte,
    config: &AugmentConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(Image, AlphaMatte)> {
    if !(0.0..=1.0).contains(&config.horizontal_flip_prob) {
        return Err(Error::InvalidParameter(format!(
            "horizontal_flip_prob must lie in [0, 1], got {}",
            config.horizontal_flip_prob
        )));
    }
    let (mut img, mut a) = (image.clone(), alpha.clone());
    if rng.random_bool(config.horizontal_flip_prob) {
        (img, a) = flip_horizontal(&img, &a);
    }
    if let Some(size) = config.crop_size {
        if size == 0 || size > img.width() || size > img.height() {
            return Err(Error::InvalidParameter(format!(
                "crop_size {size} invalid for a {}x{} image",
                img.width(),
                img.height()
            )));
        }
        let x0 = rng.random_range(0..=img.width() - size);
        let y0 = rng.random_range(0..=img.height() - size);
        (img, a) = crop(&img, &a, x0, y0, size);
    }
    if let Some(pool_dir) = &config.background_pool {
        let pool = list_png_files(pool_dir)?;
        if pool.is_empty() {
            return Err(Error::EmptyBackgroundPool(pool_dir.clone()));
        }
        let (background, _) = load_rgba(&pool[rng.random_range(0..pool.len())])?;
        img = replace_background(&img, &a, &background, &FbSolverConfig::default())?;
    }
    Ok((img, a))
}

/// MSE between the original composite and the re-blend of an F/B estimate;
/// the usual fit diagnostic after foreground extraction.
pub fn reblend_residual(image: &Image, alpha: &AlphaMatte, fb: &FbEstimate) -> Result<f64> {
    let re = blend(&fb.foreground, &fb.background, alpha)?;
    let n = re.data().len();
    Ok(exec::sum_indexed(n, |i| {
        let d = re.data()[i] as f64 - image.data()[i] as f64;
        d * d
    }) / n as f64)
}
