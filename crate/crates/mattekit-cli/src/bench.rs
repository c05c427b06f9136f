//! `mattekit bench`: wall-clock timing of the three heavy pipelines.

use std::time::Instant;

use mattekit::composite::{estimate_fb, FbSolverConfig};
use mattekit::guided::{guided_filter, GuidedFilterConfig};
use mattekit::metrics::evaluate;
use mattekit::raster::{AlphaMatte, Image};
use mattekit::trimap::{generate_trimap, TrimapConfig};
use mattekit::with_workers;

use crate::cfg::{resolve_workers, ConfigFile};

fn synth_matte(size: usize, phase: f32) -> AlphaMatte {
    AlphaMatte::from_fn(size, size, |x, y| {
        let fx = x as f32 / size as f32;
        let fy = y as f32 / size as f32;
        (0.5 + 0.5 * ((fx * 9.0 + phase).sin() * (fy * 7.0 - phase).cos())).clamp(0.0, 1.0)
    })
    .expect("valid synthetic matte")
}

fn synth_image(size: usize) -> Image {
    Image::from_fn(size, size, |x, y| {
        let fx = x as f32 / size as f32;
        let fy = y as f32 / size as f32;
        [fx, fy, (0.5 + 0.5 * (fx * 13.0).sin() * (fy * 5.0).cos()).clamp(0.0, 1.0)]
    })
    .expect("valid synthetic image")
}

fn time_row(name: &str, iters: usize, mut f: impl FnMut()) {
    let mut samples = Vec::with_capacity(iters);
    for _ in 0..iters {
        let t0 = Instant::now();
        f();
        samples.push(t0.elapsed().as_secs_f64() * 1e3);
    }
    let mean = samples.iter().sum::<f64>() / iters as f64;
    let var = if iters > 1 {
        samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (iters - 1) as f64
    } else {
        0.0
    };
    println!("{name:<14} {mean:>10.2} ms  +/- {:>8.2} ms  ({iters} iters)", var.sqrt());
}

pub fn run(
    config: &ConfigFile,
    workers: Option<usize>,
    size: Option<usize>,
    iters: Option<usize>,
) -> Result<u8, String> {
    let size = size
        .or_else(|| config.get_usize("bench", "size"))
        .unwrap_or(256);
    let iters = iters
        .or_else(|| config.get_usize("bench", "iters"))
        .unwrap_or(5)
        .max(1);
    if size < 16 {
        return Err(format!("--size must be at least 16, got {size}"));
    }
    let workers = resolve_workers(workers, config, "bench");

    let pred = synth_matte(size, 0.3);
    let gt = synth_matte(size, 0.0);
    let trimap = generate_trimap(&gt, &TrimapConfig::default()).map_err(|e| e.to_string())?;
    let guide = synth_image(size);

    with_workers(workers, || {
        println!("square size {size}, {iters} iterations per row");
        time_row("metric suite", iters, || {
            evaluate(&pred, &gt, &trimap).expect("bench metric suite");
        });
        time_row("guided filter", iters, || {
            guided_filter(&guide, &pred, &GuidedFilterConfig::default()).expect("bench guided");
        });
        time_row("f/b solver", iters, || {
            estimate_fb(&guide, &gt, &FbSolverConfig::default()).expect("bench solver");
        });
    });
    Ok(0)
}
