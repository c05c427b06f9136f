//! Batch evaluation over directories and CSV report assembly.
//!
//! Predictions and ground truths are paired by file stem, sorted
//! lexicographically. Numeric CSV cells use a fixed 9-significant-digit
//! scientific format so committed reports are stable across platforms and
//! worker counts.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::exec;
use crate::io::load_alpha;
use crate::metrics::{evaluate, mean_report, MetricReport, METRIC_NAMES};
use crate::pipeline::EntryFailure;
use crate::trimap::{generate_trimap, Trimap, TrimapConfig};

/// One evaluated pair.
#[derive(Debug, Clone)]
pub struct EvalRow {
    pub name: String,
    pub report: MetricReport,
}

/// Rows sorted by name plus their mean footer.
#[derive(Debug, Clone, Default)]
pub struct EvalReport {
    rows: Vec<EvalRow>,
}

/// Fixed CSV number format: 9 significant digits, scientific, '.' separator.
pub fn format_metric(v: f64) -> String {
    format!("{v:.8e}")
}

fn csv_field(name: &str) -> String {
    if name.contains([',', '"', '\n']) {
        format!("\"{}\"", name.replace('"', "\"\""))
    } else {
        name.to_string()
    }
}

impl EvalReport {
    pub fn new(mut rows: Vec<EvalRow>) -> Self {
        rows.sort_by(|a, b| a.name.cmp(&b.name));
        EvalReport { rows }
    }

    pub fn rows(&self) -> &[EvalRow] {
        &self.rows
    }

    pub fn mean(&self) -> MetricReport {
        mean_report(&self.rows.iter().map(|r| r.report).collect::<Vec<_>>())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name");
        for m in METRIC_NAMES {
            out.push(',');
            out.push_str(m);
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&csv_field(&row.name));
            for v in row.report.as_array() {
                out.push(',');
                out.push_str(&format_metric(v));
            }
            out.push('\n');
        }
        out.push_str("mean");
        for v in self.mean().as_array() {
            out.push(',');
            out.push_str(&format_metric(v));
        }
        out.push('\n');
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv()).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    }
}

fn stems_of(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    for p in crate::pipeline::list_png_files(dir)? {
        if let Some(stem) = p.file_stem().and_then(|s| s.to_str()) {
            out.push((stem.to_string(), p.clone()));
        }
    }
    // Path order and stem order disagree when a stem contains characters
    // sorting before '.', e.g. "a-b.png" vs "a.png"; the lookups search by
    // stem, so sort by stem.
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

fn lookup<'a>(pairs: &'a [(String, PathBuf)], stem: &str) -> Option<&'a PathBuf> {
    pairs
        .binary_search_by(|(s, _)| s.as_str().cmp(stem))
        .ok()
        .map(|i| &pairs[i].1)
}

/// Evaluates every stem found in either directory.
///
/// Trimaps are read from `trimap_dir` when given, otherwise generated from
/// the ground truth with `trimap_config`. Pairs failing to load are reported
/// individually; the rest still evaluate.
pub fn evaluate_directories(
    pred_dir: &Path,
    gt_dir: &Path,
    trimap_dir: Option<&Path>,
    trimap_config: &TrimapConfig,
) -> Result<(EvalReport, Vec<EntryFailure>)> {
    let preds = stems_of(pred_dir)?;
    let gts = stems_of(gt_dir)?;
    let trimaps = match trimap_dir {
        Some(d) => Some(stems_of(d)?),
        None => None,
    };

    let stems: BTreeSet<String> = preds
        .iter()
        .map(|(s, _)| s.clone())
        .chain(gts.iter().map(|(s, _)| s.clone()))
        .collect();
    let stems: Vec<String> = stems.into_iter().collect();

    let results: Vec<std::result::Result<EvalRow, EntryFailure>> =
        exec::map_slice(&stems, |_, stem| {
            let fail = |msg: String| EntryFailure {
                entry: stem.clone(),
                error: msg,
            };
            let pred_path = lookup(&preds, stem)
                .ok_or_else(|| fail(format!("missing prediction in {}", pred_dir.display())))?;
            let gt_path = lookup(&gts, stem)
                .ok_or_else(|| fail(format!("missing ground truth in {}", gt_dir.display())))?;
            let pred = load_alpha(pred_path).map_err(|e| fail(e.to_string()))?;
            let gt = load_alpha(gt_path).map_err(|e| fail(e.to_string()))?;
            let trimap = match &trimaps {
                Some(t) => {
                    let p = lookup(t, stem)
                        .ok_or_else(|| fail("missing trimap".to_string()))?;
                    Trimap::load(p).map_err(|e| fail(e.to_string()))?
                }
                None => generate_trimap(&gt, trimap_config).map_err(|e| fail(e.to_string()))?,
            };
            let report = evaluate(&pred, &gt, &trimap).map_err(|e| fail(e.to_string()))?;
            Ok(EvalRow {
                name: stem.clone(),
                report,
            })
        });

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(f) => failures.push(f),
        }
    }
    Ok((EvalReport::new(rows), failures))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::save_alpha;
    use crate::raster::AlphaMatte;

    #[test]
    fn format_is_fixed_width_scientific() {
        assert_eq!(format_metric(0.0), "0.00000000e0");
        assert_eq!(format_metric(0.004), "4.00000000e-3");
        assert_eq!(format_metric(1.0), "1.00000000e0");
        assert_eq!(format_metric(12.34), "1.23400000e1");
    }

    #[test]
    fn csv_field_quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("q\"q"), "\"q\"\"q\"");
    }

    #[test]
    fn identical_directories_give_zero_rows_and_mean() {
        let dir = tempfile::tempdir().unwrap();
        let pred = dir.path().join("pred");
        let gt = dir.path().join("gt");
        fs::create_dir_all(&pred).unwrap();
        fs::create_dir_all(&gt).unwrap();
        for i in 0..3 {
            let a = AlphaMatte::from_fn(8, 8, |x, y| ((x * (i + 2) + y) % 9) as f32 / 8.0).unwrap();
            save_alpha(pred.join(format!("s{i}.png")), &a).unwrap();
            save_alpha(gt.join(format!("s{i}.png")), &a).unwrap();
        }
        let (report, failures) =
            evaluate_directories(&pred, &gt, None, &TrimapConfig::default()).unwrap();
        assert!(failures.is_empty());
        assert_eq!(report.rows().len(), 3);
        for row in report.rows() {
            for v in row.report.as_array() {
                assert_eq!(v, 0.0);
            }
        }
        for v in report.mean().as_array() {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn stems_sorting_before_dot_still_pair_up() {
        // '-' sorts before '.', so path order and stem order disagree for
        // these names; pairing must still find every file.
        let dir = tempfile::tempdir().unwrap();
        let pred = dir.path().join("pred");
        let gt = dir.path().join("gt");
        fs::create_dir_all(&pred).unwrap();
        fs::create_dir_all(&gt).unwrap();
        for name in ["a.png", "a-b.png", "a-c.png", "ab.png"] {
            let m = AlphaMatte::constant(4, 4, 0.5).unwrap();
            save_alpha(pred.join(name), &m).unwrap();
            save_alpha(gt.join(name), &m).unwrap();
        }
        let (report, failures) =
            evaluate_directories(&pred, &gt, None, &TrimapConfig::default()).unwrap();
        assert!(failures.is_empty(), "{failures:?}");
        assert_eq!(report.rows().len(), 4);
    }

    #[test]
    fn missing_pred_is_isolated() {
        let dir = tempfile::tempdir().unwrap();
        let pred = dir.path().join("pred");
        let gt = dir.path().join("gt");
        fs::create_dir_all(&pred).unwrap();
        fs::create_dir_all(&gt).unwrap();
        let a = AlphaMatte::constant(4, 4, 0.25).unwrap();
        save_alpha(pred.join("a.png"), &a).unwrap();
        save_alpha(gt.join("a.png"), &a).unwrap();
        save_alpha(gt.join("b.png"), &a).unwrap();
        let (report, failures) =
            evaluate_directories(&pred, &gt, None, &TrimapConfig::default()).unwrap();
        assert_eq!(report.rows().len(), 1);
        assert_eq!(failures.len(), 1);
        assert_eq!(failures[0].entry, "b");
    }

    #[test]
    fn csv_mean_footer_matches_row_mean() {
        let rows = vec![
            EvalRow {
                name: "b".into(),
                report: MetricReport::from_array([1.0; 10]),
            },
            EvalRow {
                name: "a".into(),
                report: MetricReport::from_array([3.0; 10]),
            },
        ];
        let report = EvalReport::new(rows);
        // Sorted by name.
        assert_eq!(report.rows()[0].name, "a");
        let csv = report.to_csv();
        let mean_line = csv.lines().last().unwrap();
        assert!(mean_line.starts_with("mean,"));
        for cell in mean_line.split(',').skip(1) {
            let v: f64 = cell.parse().unwrap();
            assert!((v - 2.0).abs() < 1e-9);
        }
    }
}
