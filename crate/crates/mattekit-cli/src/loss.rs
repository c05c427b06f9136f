//! `mattekit loss`: loss-stack and GAN objective values.

use std::path::PathBuf;

use mattekit::composite::{estimate_fb, FbSolverConfig};
use mattekit::io::{load_alpha, load_rgba};
use mattekit::losses::{
    composition_loss, gan_dual_value, gan_minimax_value, l1_loss, laplacian_loss, LossWeights,
    ScoreBatch,
};
use mattekit::pyramid::max_levels;

use crate::cfg::ConfigFile;

pub struct LossArgs {
    pub pred: Option<PathBuf>,
    pub gt: Option<PathBuf>,
    pub image: Option<PathBuf>,
    pub w_l1: Option<f64>,
    pub w_lap: Option<f64>,
    pub w_comp: Option<f64>,
    pub levels: Option<usize>,
    pub real: Option<Vec<f64>>,
    pub fake: Option<Vec<f64>>,
    pub real4: Option<Vec<f64>>,
    pub fake4: Option<Vec<f64>>,
    pub lambda: Option<f64>,
}

fn batch(values: Vec<f64>, name: &str) -> Result<ScoreBatch, String> {
    ScoreBatch::new(values).map_err(|e| format!("--{name}: {e}"))
}

fn run_scores(config: &ConfigFile, args: &LossArgs) -> Result<u8, String> {
    let real = batch(args.real.clone().unwrap(), "real")?;
    let fake = batch(
        args.fake
            .clone()
            .ok_or("--fake is required with --real")?,
        "fake",
    )?;
    match (&args.real4, &args.fake4) {
        (None, None) => {
            println!("minimax {}", gan_minimax_value(&real, &fake));
        }
        (Some(r4), Some(f4)) => {
            let lambda = args
                .lambda
                .or_else(|| config.get_f64("loss", "lambda"))
                .unwrap_or(1.0);
            let real4 = batch(r4.clone(), "real4")?;
            let fake4 = batch(f4.clone(), "fake4")?;
            let v = gan_dual_value(&real, &real4, &fake, &fake4, lambda)
                .map_err(|e| e.to_string())?;
            println!("dual {v}");
        }
        _ => return Err("--real4 and --fake4 must be given together".into()),
    }
    Ok(0)
}

fn run_files(config: &ConfigFile, args: &LossArgs) -> Result<u8, String> {
    let pred_path = args.pred.as_ref().unwrap();
    let gt_path = args
        .gt
        .as_ref()
        .ok_or("--gt is required with --pred")?;
    let pred = load_alpha(pred_path).map_err(|e| e.to_string())?;
    let gt = load_alpha(gt_path).map_err(|e| e.to_string())?;
    let defaults = LossWeights::default();
    let weights = LossWeights {
        w_l1: args
            .w_l1
            .or_else(|| config.get_f64("loss", "w-l1"))
            .unwrap_or(defaults.w_l1),
        w_lap: args
            .w_lap
            .or_else(|| config.get_f64("loss", "w-lap"))
            .unwrap_or(defaults.w_lap),
        w_comp: args
            .w_comp
            .or_else(|| config.get_f64("loss", "w-comp"))
            .unwrap_or(defaults.w_comp),
    };
    let levels = args
        .levels
        .or_else(|| config.get_usize("loss", "levels"))
        .unwrap_or(5)
        .min(max_levels(pred.width(), pred.height()));

    let l1 = l1_loss(&pred, &gt).map_err(|e| e.to_string())?;
    let lap = laplacian_loss(&pred, &gt, levels).map_err(|e| e.to_string())?;
    println!("l1 {l1}");
    println!("laplacian {lap}");
    let mut total = weights.w_l1 * l1 + weights.w_lap * lap;
    if let Some(image_path) = &args.image {
        let (composite, _) = load_rgba(image_path).map_err(|e| e.to_string())?;
        let fb = estimate_fb(&composite, &gt, &FbSolverConfig::default())
            .map_err(|e| e.to_string())?;
        let comp = composition_loss(&pred, &fb, &composite).map_err(|e| e.to_string())?;
        println!("composition {comp}");
        total += weights.w_comp * comp;
    } else {
        eprintln!("note: no --image given; composition loss omitted from total");
    }
    println!("total {total}");
    Ok(0)
}

pub fn run(config: &ConfigFile, args: LossArgs) -> Result<u8, String> {
    match (&args.real, &args.pred) {
        (Some(_), None) => run_scores(config, &args),
        (None, Some(_)) => run_files(config, &args),
        (Some(_), Some(_)) => Err("pass either score lists or matte files, not both".into()),
        (None, None) => Err("pass --pred/--gt files or --real/--fake score lists".into()),
    }
}
