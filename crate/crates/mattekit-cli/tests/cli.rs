//! End-to-end tests of the command-line interface.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mattekit::guided::{upscale_alpha, GuidedFilterConfig, UpscaleMethod};
use mattekit::io::{load_alpha, load_rgba, save_alpha, save_rgba};
use mattekit::raster::{AlphaMatte, Image};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mattekit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("run mattekit")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_bundle(dir: &Path, name: &str, w: usize, h: usize) -> (Image, AlphaMatte) {
    let img = Image::from_fn(w, h, |x, y| {
        [
            x as f32 / w as f32,
            y as f32 / h as f32,
            ((x * 3 + y * 5) % 11) as f32 / 10.0,
        ]
    })
    .unwrap();
    let alpha = AlphaMatte::from_fn(w, h, |x, _| if 3 * x < 2 * w { 1.0 } else { 0.0 }).unwrap();
    save_rgba(dir.join(name), &img, Some(&alpha)).unwrap();
    (img, alpha)
}

fn manifest_json(root: &Path, entries: &[(&str, Option<&str>)]) -> String {
    let items: Vec<String> = entries
        .iter()
        .map(|(image, seg)| match seg {
            Some(s) => format!(
                "{{\"image\": \"{image}\", \"seg\": \"{s}\", \"split\": \"train\"}}"
            ),
            None => format!("{{\"image\": \"{image}\", \"split\": \"train\"}}"),
        })
        .collect();
    format!(
        "{{\"root\": \"{}\", \"entries\": [{}]}}\n",
        root.display(),
        items.join(", ")
    )
}

#[test]
fn composite_is_seed_deterministic_and_isolates_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let bgs = tmp.path().join("bgs");
    fs::create_dir_all(&data).unwrap();
    fs::create_dir_all(&bgs).unwrap();
    write_bundle(&data, "a.png", 24, 16);
    write_bundle(&data, "b.png", 24, 16);
    let bg = Image::constant(12, 12, [0.1, 0.8, 0.3]).unwrap();
    save_rgba(bgs.join("bg0.png"), &bg, None).unwrap();
    save_rgba(bgs.join("bg1.png"), &bg, None).unwrap();

    let manifest = tmp.path().join("m.json");
    fs::write(
        &manifest,
        manifest_json(&data, &[("a.png", None), ("b.png", None), ("gone.png", None)]),
    )
    .unwrap();

    let out1 = tmp.path().join("out1");
    let out2 = tmp.path().join("out2");
    let fails = tmp.path().join("failures.json");
    let r1 = run(&[
        "composite",
        manifest.to_str().unwrap(),
        bgs.to_str().unwrap(),
        out1.to_str().unwrap(),
        "--seed",
        "5",
        "--failures",
        fails.to_str().unwrap(),
    ]);
    assert_eq!(code(&r1), 1, "partial failure must exit 1: {}", stderr(&r1));
    let r2 = run(&[
        "composite",
        manifest.to_str().unwrap(),
        bgs.to_str().unwrap(),
        out2.to_str().unwrap(),
        "--seed",
        "5",
    ]);
    assert_eq!(code(&r2), 1);

    for name in ["a.png", "b.png"] {
        let x = fs::read(out1.join(name)).unwrap();
        let y = fs::read(out2.join(name)).unwrap();
        assert_eq!(x, y, "{name} differs across runs with the same seed");
    }
    let summary = fs::read_to_string(&fails).unwrap();
    assert!(summary.contains("gone.png"));
    assert!(out1.join("manifest.json").exists());
}

#[test]
fn composite_missing_manifest_is_a_hard_error() {
    let tmp = tempfile::tempdir().unwrap();
    let r = run(&[
        "composite",
        tmp.path().join("absent.json").to_str().unwrap(),
        tmp.path().to_str().unwrap(),
        tmp.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 2);
    assert!(stderr(&r).contains("error"));
}

#[test]
fn filter_splits_and_honors_threshold_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    fs::create_dir_all(&data).unwrap();
    let (_, alpha) = write_bundle(&data, "good.png", 20, 10);
    save_alpha(data.join("good_seg.png"), &alpha).unwrap();
    write_bundle(&data, "bad.png", 20, 10);
    let off = AlphaMatte::from_fn(20, 10, |x, _| if x < 5 { 1.0 } else { 0.0 }).unwrap();
    save_alpha(data.join("bad_seg.png"), &off).unwrap();

    let manifest = tmp.path().join("m.json");
    fs::write(
        &manifest,
        manifest_json(
            &data,
            &[("good.png", Some("good_seg.png")), ("bad.png", Some("bad_seg.png"))],
        ),
    )
    .unwrap();

    let kept = tmp.path().join("kept.json");
    let rejected = tmp.path().join("rejected.json");
    let report = tmp.path().join("report.json");
    let r = run(&[
        "filter",
        manifest.to_str().unwrap(),
        "--out-kept",
        kept.to_str().unwrap(),
        "--out-rejected",
        rejected.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let kept_text = fs::read_to_string(&kept).unwrap();
    let rejected_text = fs::read_to_string(&rejected).unwrap();
    assert!(kept_text.contains("good.png"));
    assert!(rejected_text.contains("bad.png"));
    let report_text = fs::read_to_string(&report).unwrap();
    assert!(report_text.contains("\"distance\""));

    // With t = 1.0 everything passes (distances here are below 1).
    let r = run(&[
        "filter",
        manifest.to_str().unwrap(),
        "--t",
        "1.0",
        "--out-kept",
        kept.to_str().unwrap(),
        "--out-rejected",
        rejected.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0);
    let rejected_text = fs::read_to_string(&rejected).unwrap();
    assert!(!rejected_text.contains("bad.png"), "{rejected_text}");
}

#[test]
fn filter_threshold_from_config_file_with_flag_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    fs::create_dir_all(&data).unwrap();
    write_bundle(&data, "bad.png", 20, 10);
    let off = AlphaMatte::from_fn(20, 10, |x, _| if x < 5 { 1.0 } else { 0.0 }).unwrap();
    save_alpha(data.join("bad_seg.png"), &off).unwrap();
    let manifest = tmp.path().join("m.json");
    fs::write(
        &manifest,
        manifest_json(&data, &[("bad.png", Some("bad_seg.png"))]),
    )
    .unwrap();
    let config = tmp.path().join("config.json");
    fs::write(&config, "{\"filter\": {\"t\": 0.99}}\n").unwrap();

    let kept = tmp.path().join("kept.json");
    let rejected = tmp.path().join("rejected.json");
    // Config threshold 0.99 keeps the entry.
    let r = run(&[
        "filter",
        manifest.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--out-kept",
        kept.to_str().unwrap(),
        "--out-rejected",
        rejected.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    assert!(fs::read_to_string(&kept).unwrap().contains("bad.png"));
    // An explicit flag beats the config file.
    let r = run(&[
        "filter",
        manifest.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--t",
        "0.05",
        "--out-kept",
        kept.to_str().unwrap(),
        "--out-rejected",
        rejected.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0);
    assert!(fs::read_to_string(&rejected).unwrap().contains("bad.png"));
}

#[test]
fn upsample_equal_size_bilinear_is_identity_and_matches_library() {
    let tmp = tempfile::tempdir().unwrap();
    let alpha = AlphaMatte::from_fn(16, 16, |x, y| ((x * 5 + y * 3) % 17) as f32 / 16.0).unwrap();
    let guide = Image::from_fn(16, 16, |x, y| {
        [x as f32 / 16.0, y as f32 / 16.0, 0.5]
    })
    .unwrap();
    let alpha_path = tmp.path().join("a.png");
    let guide_path = tmp.path().join("g.png");
    save_alpha(&alpha_path, &alpha).unwrap();
    save_rgba(&guide_path, &guide, None).unwrap();

    let out_path = tmp.path().join("up.png");
    let r = run(&[
        "upsample",
        alpha_path.to_str().unwrap(),
        guide_path.to_str().unwrap(),
        out_path.to_str().unwrap(),
        "--method",
        "bilinear",
    ]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let out = load_alpha(&out_path).unwrap();
    let orig = load_alpha(&alpha_path).unwrap();
    assert_eq!(out.data(), orig.data());

    // fast-guided must match the library call bit-exactly.
    let low = AlphaMatte::from_fn(4, 4, |x, y| ((x + y) % 5) as f32 / 4.0).unwrap();
    let low_path = tmp.path().join("low.png");
    save_alpha(&low_path, &low).unwrap();
    let r = run(&[
        "upsample",
        low_path.to_str().unwrap(),
        guide_path.to_str().unwrap(),
        out_path.to_str().unwrap(),
        "--method",
        "fast-guided",
        "--subsample",
        "4",
        "--radius",
        "2",
    ]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let cli_bytes = fs::read(&out_path).unwrap();
    let lib = upscale_alpha(
        &load_alpha(&low_path).unwrap(),
        &load_rgba(&guide_path).unwrap().0,
        UpscaleMethod::FastGuided,
        &GuidedFilterConfig {
            radius: 2,
            epsilon: 1e-4,
            subsample: 4,
        },
    )
    .unwrap();
    let lib_path = tmp.path().join("lib.png");
    save_alpha(&lib_path, &lib).unwrap();
    assert_eq!(cli_bytes, fs::read(&lib_path).unwrap());
}

#[test]
fn upsample_rejects_unknown_method_with_usage() {
    let tmp = tempfile::tempdir().unwrap();
    let r = run(&[
        "upsample",
        "a.png",
        "g.png",
        tmp.path().join("o.png").to_str().unwrap(),
        "--method",
        "cubic",
    ]);
    assert_eq!(code(&r), 2);
    let err = stderr(&r);
    assert!(err.contains("possible values") || err.contains("Usage"), "{err}");
}

#[test]
fn trimap_command_round_trips_through_library() {
    let tmp = tempfile::tempdir().unwrap();
    let alpha = AlphaMatte::from_fn(24, 24, |x, y| {
        let d = ((x as f32 - 12.0).powi(2) + (y as f32 - 12.0).powi(2)).sqrt();
        (1.0 - (d - 6.0) / 3.0).clamp(0.0, 1.0)
    })
    .unwrap();
    let alpha_path = tmp.path().join("a.png");
    save_alpha(&alpha_path, &alpha).unwrap();
    let out_path = tmp.path().join("t.png");
    let r = run(&[
        "trimap",
        alpha_path.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--band-radius",
        "2",
    ]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let trimap = mattekit::trimap::Trimap::load(&out_path).unwrap();
    let expected = mattekit::trimap::generate_trimap(
        &load_alpha(&alpha_path).unwrap(),
        &mattekit::trimap::TrimapConfig {
            band_radius: 2,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(trimap, expected);
}

#[test]
fn extract_fg_writes_foreground_and_background() {
    let tmp = tempfile::tempdir().unwrap();
    let (img, _alpha) = write_bundle(tmp.path(), "c.png", 32, 24);
    let fg_path = tmp.path().join("fg.png");
    let bg_path = tmp.path().join("bg.png");
    let r = run(&[
        "extract-fg",
        tmp.path().join("c.png").to_str().unwrap(),
        "--out-fg",
        fg_path.to_str().unwrap(),
        "--out-bg",
        bg_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let (fg, fg_alpha) = load_rgba(&fg_path).unwrap();
    assert!(fg_alpha.is_some(), "foreground keeps the matte");
    assert_eq!(fg.width(), img.width());
    let (bg, bg_alpha) = load_rgba(&bg_path).unwrap();
    assert!(bg_alpha.is_none());
    assert_eq!(bg.height(), img.height());
}

#[test]
fn loss_file_mode_reports_zero_for_identical_inputs() {
    let tmp = tempfile::tempdir().unwrap();
    let alpha = AlphaMatte::from_fn(16, 16, |x, _| x as f32 / 15.0).unwrap();
    let p = tmp.path().join("m.png");
    save_alpha(&p, &alpha).unwrap();
    let r = run(&[
        "loss",
        "--pred",
        p.to_str().unwrap(),
        "--gt",
        p.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let out = stdout(&r);
    assert!(out.contains("l1 0\n"), "{out}");
    assert!(out.contains("laplacian 0\n"), "{out}");
    assert!(out.contains("total 0\n"), "{out}");
}

#[test]
fn loss_gan_mode_prints_known_values() {
    let r = run(&["loss", "--real", "0.5,0.5", "--fake", "0.5"]);
    assert_eq!(code(&r), 0);
    let v: f64 = stdout(&r)
        .trim()
        .strip_prefix("minimax ")
        .unwrap()
        .parse()
        .unwrap();
    assert!((v - 2.0 * 0.5f64.ln()).abs() < 1e-12);

    let r = run(&[
        "loss", "--real", "0.5", "--fake", "0.5", "--real4", "0.5", "--fake4", "0.5",
        "--lambda", "0.5",
    ]);
    assert_eq!(code(&r), 0);
    let v: f64 = stdout(&r)
        .trim()
        .strip_prefix("dual ")
        .unwrap()
        .parse()
        .unwrap();
    assert!((v - (1.5 * 0.5f64.ln() + 0.25f64.ln())).abs() < 1e-12);

    // Scores outside (0, 1) are rejected.
    let r = run(&["loss", "--real", "1.0", "--fake", "0.5"]);
    assert_eq!(code(&r), 2);
}

#[test]
fn bench_validates_size_and_emits_three_rows() {
    let r = run(&["bench", "--size", "8"]);
    assert_eq!(code(&r), 2);
    assert!(stderr(&r).contains("at least 16"));

    let r = run(&["bench", "--size", "32", "--iters", "2"]);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let out = stdout(&r);
    for row in ["metric suite", "guided filter", "f/b solver"] {
        assert!(out.contains(row), "missing row {row}: {out}");
    }
    assert!(out.contains("+/-"), "variance missing: {out}");
}

#[test]
fn eval_missing_pred_exits_partial_but_emits_other_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let pred = tmp.path().join("pred");
    let gt = tmp.path().join("gt");
    fs::create_dir_all(&pred).unwrap();
    fs::create_dir_all(&gt).unwrap();
    let a = AlphaMatte::from_fn(16, 16, |x, y| ((x + y) % 7) as f32 / 6.0).unwrap();
    save_alpha(pred.join("one.png"), &a).unwrap();
    save_alpha(gt.join("one.png"), &a).unwrap();
    save_alpha(gt.join("two.png"), &a).unwrap();
    let out: PathBuf = tmp.path().join("report.csv");
    let r = run(&[
        "eval",
        pred.to_str().unwrap(),
        gt.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 1, "{}", stderr(&r));
    let csv = fs::read_to_string(&out).unwrap();
    assert!(csv.contains("one,"), "{csv}");
    assert!(!csv.contains("two,"), "{csv}");
    assert!(stderr(&r).contains("two"));
}

#[test]
fn workers_env_var_is_accepted() {
    let tmp = tempfile::tempdir().unwrap();
    let pred = tmp.path().join("pred");
    let gt = tmp.path().join("gt");
    fs::create_dir_all(&pred).unwrap();
    fs::create_dir_all(&gt).unwrap();
    let a = AlphaMatte::constant(8, 8, 0.4).unwrap();
    save_alpha(pred.join("x.png"), &a).unwrap();
    save_alpha(gt.join("x.png"), &a).unwrap();
    let out = tmp.path().join("r.csv");
    let r = bin()
        .env("MATTEKIT_WORKERS", "2")
        .args([
            "eval",
            pred.to_str().unwrap(),
            gt.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(code(&r), 0, "{}", stderr(&r));
}
