//! Regenerates the committed test fixtures under `fixtures/` at the repo
//! root, and the golden CSV for the `eval` command.
//!
//! Golden metric values are computed with the brute-force implementations
//! from mattekit-reference, not with this crate, so the committed CSV is an
//! independent check on the evaluation pipeline. The generator also verifies
//! the properties the fixtures are meant to exercise (solver residuals,
//! guided-vs-bilinear SAD) and aborts if a fixture would not serve its
//! purpose.
//!
//! Usage: cargo run -p mattekit --example gen_fixtures

use std::fs;
use std::path::{Path, PathBuf};

use mattekit::composite::{blend, estimate_fb, FbSolverConfig};
use mattekit::guided::{upscale_alpha, GuidedFilterConfig, UpscaleMethod};
use mattekit::io::{load_alpha, load_rgba, save_alpha, save_rgba};
use mattekit::metrics::evaluate;
use mattekit::raster::{AlphaMatte, Image};
use mattekit::report::{format_metric, EvalReport, EvalRow};
use mattekit::trimap::{Trimap, TrimapLabel};

fn fixtures_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Hash noise in [0, 1): deterministic, dependency-free.
fn noise(x: usize, y: usize, salt: u64) -> f32 {
    let mut h = (x as u64)
        .wrapping_mul(0x9E3779B97F4A7C15)
        .wrapping_add((y as u64).wrapping_mul(0xC2B2AE3D27D4EB4F))
        .wrapping_add(salt.wrapping_mul(0x165667B19E3779F9));
    h ^= h >> 30;
    h = h.wrapping_mul(0xBF58476D1CE4E5B9);
    h ^= h >> 27;
    (h >> 40) as f32 / (1u64 << 24) as f32
}

fn smoothstep(e0: f32, e1: f32, x: f32) -> f32 {
    let t = ((x - e0) / (e1 - e0)).clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

fn to_f64(data: &[f32]) -> Vec<f64> {
    data.iter().map(|&v| v as f64).collect()
}

// ----- foreground/background solver fixtures --------------------------------

fn fb_alpha(kind: usize, w: usize, h: usize) -> AlphaMatte {
    AlphaMatte::from_fn(w, h, |x, y| {
        let fx = x as f32;
        let fy = y as f32;
        let cx = w as f32 / 2.0;
        let cy = h as f32 / 2.0;
        match kind {
            0 => {
                let d = ((fx - cx).powi(2) + (fy - cy).powi(2)).sqrt();
                1.0 - smoothstep(18.0, 24.0, d)
            }
            1 => smoothstep(16.0, 48.0, fx),
            2 => {
                let d1 = ((fx - 20.0).powi(2) + (fy - 22.0).powi(2)).sqrt();
                let d2 = ((fx - 44.0).powi(2) + (fy - 40.0).powi(2)).sqrt();
                (1.0 - smoothstep(10.0, 16.0, d1)).max(1.0 - smoothstep(12.0, 18.0, d2))
            }
            3 => smoothstep(-6.0, 6.0, fx - fy),
            _ => {
                let d = ((fx - cx).powi(2) + (fy - cy).powi(2)).sqrt();
                let ring = (d - 18.0).abs();
                1.0 - smoothstep(4.0, 9.0, ring)
            }
        }
    })
    .unwrap()
}

fn fb_field(seed: f32, w: usize, h: usize, base: [f32; 3], swing: [f32; 3]) -> Image {
    Image::from_fn(w, h, |x, y| {
        let fx = x as f32 / w as f32;
        let fy = y as f32 / h as f32;
        let wave = |k: f32, p: f32| (fx * k + fy * (k * 0.7) + p + seed).sin() * 0.5 + 0.5;
        [
            (base[0] + swing[0] * wave(4.0, 0.0)).clamp(0.0, 1.0),
            (base[1] + swing[1] * wave(3.0, 1.3)).clamp(0.0, 1.0),
            (base[2] + swing[2] * wave(5.0, 2.1)).clamp(0.0, 1.0),
        ]
    })
    .unwrap()
}

fn gen_fb_fixtures(dir: &Path) {
    fs::create_dir_all(dir).unwrap();
    let (w, h) = (64usize, 64usize);
    for i in 0..5usize {
        let alpha = fb_alpha(i, w, h);
        let fg = fb_field(i as f32, w, h, [0.55, 0.30, 0.20], [0.40, 0.35, 0.25]);
        let bg = fb_field(i as f32 + 10.0, w, h, [0.10, 0.45, 0.60], [0.25, 0.35, 0.35]);
        // Compose by the blending equation directly.
        let comp = Image::from_fn(w, h, |x, y| {
            let a = alpha.at(x, y);
            let f = fg.pixel(x, y);
            let b = bg.pixel(x, y);
            [
                a * f[0] + (1.0 - a) * b[0],
                a * f[1] + (1.0 - a) * b[1],
                a * f[2] + (1.0 - a) * b[2],
            ]
        })
        .unwrap();
        save_rgba(dir.join(format!("fg_{i}.png")), &fg, None).unwrap();
        save_rgba(dir.join(format!("bg_{i}.png")), &bg, None).unwrap();
        save_alpha(dir.join(format!("alpha_{i}.png")), &alpha).unwrap();
        save_rgba(dir.join(format!("comp_{i}.png")), &comp, None).unwrap();

        // Sanity: the solver must meet its residual targets on this fixture.
        let (comp_l, _) = load_rgba(dir.join(format!("comp_{i}.png"))).unwrap();
        let alpha_l = load_alpha(dir.join(format!("alpha_{i}.png"))).unwrap();
        let fg_l = load_rgba(dir.join(format!("fg_{i}.png"))).unwrap().0;
        let fb = estimate_fb(&comp_l, &alpha_l, &FbSolverConfig::default()).unwrap();
        let re = blend(&fb.foreground, &fb.background, &alpha_l).unwrap();
        let mse = re
            .data()
            .iter()
            .zip(comp_l.data())
            .map(|(&a, &b)| (a as f64 - b as f64).powi(2))
            .sum::<f64>()
            / re.data().len() as f64;
        let mut mad = 0.0f64;
        let mut cnt = 0.0f64;
        for y in 0..h {
            for x in 0..w {
                if alpha_l.at(x, y) > 0.9 {
                    for c in 0..3 {
                        mad += (fb.foreground.pixel(x, y)[c] as f64 - fg_l.pixel(x, y)[c] as f64)
                            .abs();
                        cnt += 1.0;
                    }
                }
            }
        }
        mad /= cnt.max(1.0);
        println!("fb fixture {i}: reblend mse {mse:.3e}, fg mad {mad:.4}");
        assert!(mse < 1e-3, "fixture {i} reblend mse too high");
        assert!(mad < 0.05, "fixture {i} foreground error too high");
    }
}

// ----- eval golden fixtures --------------------------------------------------

fn eval_gt(i: usize, w: usize, h: usize) -> AlphaMatte {
    AlphaMatte::from_fn(w, h, |x, y| {
        let fx = x as f32;
        let fy = y as f32;
        let c1 = (10.0 + 3.0 * i as f32, 12.0 + 2.0 * i as f32);
        let c2 = (22.0 - 2.0 * i as f32, 20.0 + 1.5 * i as f32);
        let d1 = ((fx - c1.0).powi(2) + (fy - c1.1).powi(2)).sqrt();
        let d2 = ((fx - c2.0).powi(2) + (fy - c2.1).powi(2)).sqrt();
        let v = (1.0 - smoothstep(5.0, 9.0, d1)).max(1.0 - smoothstep(6.0, 10.0, d2));
        v.clamp(0.0, 1.0)
    })
    .unwrap()
}

fn eval_pred(gt: &AlphaMatte, salt: u64) -> AlphaMatte {
    let (w, h) = (gt.width(), gt.height());
    AlphaMatte::from_fn(w, h, |x, y| {
        // Shift one column and add mild noise: plausible prediction error.
        let sx = if x + 1 < w { x + 1 } else { x };
        let base = gt.at(sx, y);
        (base + 0.08 * (noise(x, y, salt) - 0.5)).clamp(0.0, 1.0)
    })
    .unwrap()
}

fn gen_eval_fixtures(dir: &Path) {
    let pred_dir = dir.join("pred");
    let gt_dir = dir.join("gt");
    let tri_dir = dir.join("trimap");
    for d in [&pred_dir, &gt_dir, &tri_dir] {
        fs::create_dir_all(d).unwrap();
    }
    let (w, h) = (32usize, 32usize);
    let mut rows = Vec::new();
    let mut ref_rows: Vec<[f64; 10]> = Vec::new();
    let mut names = Vec::new();
    for i in 0..5usize {
        let name = format!("pair_{i:02}");
        let gt = eval_gt(i, w, h);
        let pred = eval_pred(&gt, i as u64 + 99);
        save_alpha(gt_dir.join(format!("{name}.png")), &gt).unwrap();
        save_alpha(pred_dir.join(format!("{name}.png")), &pred).unwrap();

        // Trimap from the quantized ground truth, brute-force morphology.
        let gt_l = load_alpha(gt_dir.join(format!("{name}.png"))).unwrap();
        let labels = mattekit_reference::morph::generate_trimap(
            &to_f64(gt_l.data()),
            w,
            h,
            0.95f32 as f64,
            0.05f32 as f64,
            3,
        );
        let trimap = Trimap::from_labels(
            w,
            h,
            labels
                .iter()
                .map(|&v| match v {
                    0 => TrimapLabel::Background,
                    128 => TrimapLabel::Unknown,
                    _ => TrimapLabel::Foreground,
                })
                .collect(),
        )
        .unwrap();
        trimap.save(tri_dir.join(format!("{name}.png"))).unwrap();

        // Golden row from the reference metric suite on the loaded files.
        let pred_l = load_alpha(pred_dir.join(format!("{name}.png"))).unwrap();
        let values = mattekit_reference::metrics::evaluate(
            &to_f64(pred_l.data()),
            &to_f64(gt_l.data()),
            &labels,
            w,
            h,
            1.4,
            0.1,
            0.15,
        );
        ref_rows.push(values);
        names.push(name.clone());

        // Cross-check: the library evaluation must agree to the last printed
        // digit, otherwise the golden would be flaky.
        let lib = evaluate(&pred_l, &gt_l, &trimap).unwrap().as_array();
        for (k, (&r, &l)) in values.iter().zip(lib.iter()).enumerate() {
            assert_eq!(
                format_metric(r),
                format_metric(l),
                "library and reference disagree at 9 digits ({name}, metric {k}: {r} vs {l})"
            );
        }
        rows.push(EvalRow {
            name,
            report: mattekit::metrics::MetricReport::from_array(lib),
        });
    }

    // Golden CSV assembled from the reference rows.
    let mut golden = String::from("name,sad,mse,mad,sad_t,mse_t,mad_t,sad_fg,sad_bg,grad,conn\n");
    for (name, values) in names.iter().zip(&ref_rows) {
        golden.push_str(name);
        for v in values {
            golden.push(',');
            golden.push_str(&format_metric(*v));
        }
        golden.push('\n');
    }
    golden.push_str("mean");
    for k in 0..10 {
        let mean = ref_rows.iter().map(|r| r[k]).sum::<f64>() / ref_rows.len() as f64;
        golden.push(',');
        golden.push_str(&format_metric(mean));
    }
    golden.push('\n');

    // It must match what the library-side report writer produces.
    let lib_csv = EvalReport::new(rows).to_csv();
    assert_eq!(golden, lib_csv, "golden CSV and library CSV diverge");
    fs::write(dir.join("golden.csv"), &golden).unwrap();
    println!("eval fixture: 5 pairs, golden.csv written");
}

// ----- guided upscale fixture -------------------------------------------------

fn gen_upscale_fixture(dir: &Path) {
    fs::create_dir_all(dir).unwrap();
    let (w, h) = (256usize, 256usize);
    let inside = |x: usize, y: usize| -> bool {
        let fx = x as f32;
        let fy = y as f32;
        let disk = ((fx - 128.0).powi(2) + (fy - 110.0).powi(2)).sqrt() < 70.0;
        let bar = (118.0..=138.0).contains(&fx) && (110.0..236.0).contains(&fy);
        let notch = ((fx - 128.0).powi(2) + (fy - 52.0).powi(2)).sqrt() < 18.0;
        (disk || bar) && !notch
    };
    let gt = AlphaMatte::from_fn(w, h, |x, y| if inside(x, y) { 1.0 } else { 0.0 }).unwrap();
    let guide = Image::from_fn(w, h, |x, y| {
        let t = noise(x, y, 7) * 0.08;
        if inside(x, y) {
            [0.78 + t, 0.45 + t * 0.5, 0.25 + t]
        } else {
            let fy = y as f32 / h as f32;
            [0.15 + t, 0.35 + 0.2 * fy + t, 0.55 + 0.3 * fy + t]
        }
    })
    .unwrap();
    save_alpha(dir.join("gt_alpha.png"), &gt).unwrap();
    save_rgba(dir.join("guide.png"), &guide, None).unwrap();

    // Low-resolution matte: block means of the quantized ground truth.
    let gt_l = load_alpha(dir.join("gt_alpha.png")).unwrap();
    let low_data =
        mattekit_reference::guided::block_downsample(&to_f64(gt_l.data()), w, h, 4);
    let low = AlphaMatte::from_vec_clamped(
        w / 4,
        h / 4,
        low_data.iter().map(|&v| v as f32).collect(),
    )
    .unwrap();
    save_alpha(dir.join("alpha_low.png"), &low).unwrap();

    // The fixture only makes sense if guided beats bilinear here.
    let guide_l = load_rgba(dir.join("guide.png")).unwrap().0;
    let low_l = load_alpha(dir.join("alpha_low.png")).unwrap();
    let cfg = GuidedFilterConfig::default();
    let up_guided = upscale_alpha(&low_l, &guide_l, UpscaleMethod::FastGuided, &cfg).unwrap();
    let up_bilinear = upscale_alpha(&low_l, &guide_l, UpscaleMethod::Bilinear, &cfg).unwrap();
    let sad = |m: &AlphaMatte| -> f64 {
        m.data()
            .iter()
            .zip(gt_l.data())
            .map(|(&a, &b)| (a as f64 - b as f64).abs())
            .sum::<f64>()
            / 1000.0
    };
    let (sg, sb) = (sad(&up_guided), sad(&up_bilinear));
    println!("upscale fixture: SAD fast-guided {sg:.4} vs bilinear {sb:.4}");
    assert!(sg <= sb, "guided upscaling must not lose to bilinear here");
}

fn main() {
    let root = fixtures_root();
    gen_fb_fixtures(&root.join("fb"));
    gen_eval_fixtures(&root.join("eval"));
    gen_upscale_fixture(&root.join("upscale"));
    println!("fixtures written to {}", root.display());
}
