//! mattekit command-line frontend.
//!
//! Data goes to files (or stdout for the report-style commands); diagnostics
//! go to stderr. Exit status: 0 on full success, 1 when some entries failed
//! but the batch completed, 2 on hard errors.

mod bench;
mod cfg;
mod dataset;
mod eval;
mod loss;
mod tools;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cfg::ConfigFile;

#[derive(Parser)]
#[command(
    name = "mattekit",
    version,
    about = "Alpha-matting toolkit: dataset preparation, evaluation, and single-pair tools"
)]
struct Cli {
    /// JSON config file with per-command flag defaults.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for batch commands (default: MATTEKIT_WORKERS or all
    /// logical CPUs). Affects wall time only, never output bytes.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum UpscaleMethodArg {
    Bilinear,
    FastGuided,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate predicted mattes against ground truth into a CSV report.
    Eval {
        /// Directory of predicted mattes (PNG, matched by file stem).
        pred_dir: PathBuf,
        /// Directory of ground-truth mattes.
        gt_dir: PathBuf,
        /// Directory of trimaps; omitted: generated from the ground truth.
        #[arg(long, value_name = "DIR")]
        trimaps: Option<PathBuf>,
        /// Output CSV path.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Trimap foreground threshold (when generating).
        #[arg(long)]
        fg_threshold: Option<f64>,
        /// Trimap background threshold (when generating).
        #[arg(long)]
        bg_threshold: Option<f64>,
        /// Trimap unknown-band radius in pixels (when generating).
        #[arg(long)]
        band_radius: Option<usize>,
    },
    /// Re-composite every manifest entry onto backgrounds from a pool.
    Composite {
        /// Input dataset manifest (JSON).
        manifest: PathBuf,
        /// Directory of background PNGs.
        backgrounds: PathBuf,
        /// Output directory for RGBA composites and the new manifest.
        out_dir: PathBuf,
        /// Seed for background selection.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the per-entry failure summary to this JSON file.
        #[arg(long, value_name = "FILE")]
        failures: Option<PathBuf>,
        /// Solver smoothness weight.
        #[arg(long)]
        smoothness: Option<f64>,
        /// Solver sweeps per pyramid level.
        #[arg(long)]
        iterations: Option<usize>,
        /// Solver coarsest-level size.
        #[arg(long)]
        coarsest: Option<usize>,
    },
    /// Estimate the foreground (and background) of one composite.
    ExtractFg {
        /// Composite image; RGBA bundles provide the matte directly.
        image: PathBuf,
        /// Matte PNG (required when the image has no alpha channel).
        #[arg(long, value_name = "FILE")]
        alpha: Option<PathBuf>,
        /// Output path for the estimated foreground (RGBA with the matte).
        #[arg(long, value_name = "FILE")]
        out_fg: PathBuf,
        /// Optional output path for the estimated background (RGB).
        #[arg(long, value_name = "FILE")]
        out_bg: Option<PathBuf>,
        #[arg(long)]
        smoothness: Option<f64>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        coarsest: Option<usize>,
    },
    /// Generate a trimap from a matte.
    Trimap {
        /// Input matte PNG.
        alpha: PathBuf,
        /// Output trimap PNG ({0, 128, 255} grayscale).
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        #[arg(long)]
        fg_threshold: Option<f64>,
        #[arg(long)]
        bg_threshold: Option<f64>,
        #[arg(long)]
        band_radius: Option<usize>,
    },
    /// Split a manifest by the alignment-agreement criterion.
    Filter {
        /// Input dataset manifest (JSON); entries need alpha and seg masks.
        manifest: PathBuf,
        /// Binarization level for the matte.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Acceptance threshold on the disagreement fraction.
        #[arg(long)]
        t: Option<f64>,
        /// Output manifest of accepted entries.
        #[arg(long, value_name = "FILE")]
        out_kept: PathBuf,
        /// Output manifest of rejected entries.
        #[arg(long, value_name = "FILE")]
        out_rejected: PathBuf,
        /// Per-entry distance report (JSON).
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
        /// Write the per-entry failure summary to this JSON file.
        #[arg(long, value_name = "FILE")]
        failures: Option<PathBuf>,
        /// Drop entries whose sidecar instance count exceeds this first.
        #[arg(long)]
        max_instances: Option<u32>,
    },
    /// Upscale a low-resolution matte to the guide image's resolution.
    Upsample {
        /// Low-resolution matte PNG.
        alpha_low: PathBuf,
        /// Full-resolution guide image.
        guide: PathBuf,
        /// Output matte PNG.
        out: PathBuf,
        #[arg(long, value_enum)]
        method: Option<UpscaleMethodArg>,
        /// Guided-filter radius (at coefficient resolution).
        #[arg(long)]
        radius: Option<usize>,
        /// Guided-filter regularization.
        #[arg(long)]
        eps: Option<f64>,
        /// Fast-variant subsampling factor.
        #[arg(long)]
        subsample: Option<usize>,
    },
    /// Time the metric suite, guided filter, and F/B solver.
    Bench {
        /// Square input size in pixels (min 16).
        #[arg(long)]
        size: Option<usize>,
        /// Timed repetitions per row.
        #[arg(long)]
        iters: Option<usize>,
    },
    /// Print loss-stack or GAN objective values.
    ///
    /// File mode: --pred and --gt (plus --image for the composition term).
    /// Score mode: --real/--fake lists, optionally --real4/--fake4 for the
    /// dual-discriminator objective.
    Loss {
        #[arg(long, value_name = "FILE")]
        pred: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        gt: Option<PathBuf>,
        /// Composite image for the composition loss; F/B are estimated from
        /// it with the ground-truth matte.
        #[arg(long, value_name = "FILE")]
        image: Option<PathBuf>,
        #[arg(long)]
        w_l1: Option<f64>,
        #[arg(long)]
        w_lap: Option<f64>,
        #[arg(long)]
        w_comp: Option<f64>,
        /// Laplacian stages for the pyramid loss.
        #[arg(long)]
        levels: Option<usize>,
        /// Real-batch scores, comma separated, each in (0, 1).
        #[arg(long, value_delimiter = ',')]
        real: Option<Vec<f64>>,
        /// Fake-batch scores, comma separated.
        #[arg(long, value_delimiter = ',')]
        fake: Option<Vec<f64>>,
        /// Second-discriminator real scores (enables the dual objective).
        #[arg(long, value_delimiter = ',')]
        real4: Option<Vec<f64>>,
        /// Second-discriminator fake scores.
        #[arg(long, value_delimiter = ',')]
        fake4: Option<Vec<f64>>,
        /// Real-term weight of the second discriminator.
        #[arg(long)]
        lambda: Option<f64>,
    },
}

/// Per-entry failures occurred but the batch completed.
pub const EXIT_PARTIAL: u8 = 1;
/// Hard error; nothing useful was produced.
pub const EXIT_ERROR: u8 = 2;

fn run(cli: Cli) -> Result<u8, String> {
    let config = ConfigFile::load(cli.config.as_deref())?;
    match cli.command {
        Command::Eval {
            pred_dir,
            gt_dir,
            trimaps,
            out,
            fg_threshold,
            bg_threshold,
            band_radius,
        } => eval::run(
            &config,
            cli.workers,
            &pred_dir,
            &gt_dir,
            trimaps.as_deref(),
            &out,
            fg_threshold,
            bg_threshold,
            band_radius,
        ),
        Command::Composite {
            manifest,
            backgrounds,
            out_dir,
            seed,
            failures,
            smoothness,
            iterations,
            coarsest,
        } => dataset::run_composite(
            &config,
            cli.workers,
            &manifest,
            &backgrounds,
            &out_dir,
            seed,
            failures.as_deref(),
            (smoothness, iterations, coarsest),
        ),
        Command::ExtractFg {
            image,
            alpha,
            out_fg,
            out_bg,
            smoothness,
            iterations,
            coarsest,
        } => tools::run_extract_fg(
            &config,
            &image,
            alpha.as_deref(),
            &out_fg,
            out_bg.as_deref(),
            (smoothness, iterations, coarsest),
        ),
        Command::Trimap {
            alpha,
            out,
            fg_threshold,
            bg_threshold,
            band_radius,
        } => tools::run_trimap(&config, &alpha, &out, fg_threshold, bg_threshold, band_radius),
        Command::Filter {
            manifest,
            epsilon,
            t,
            out_kept,
            out_rejected,
            report,
            failures,
            max_instances,
        } => dataset::run_filter(
            &config,
            cli.workers,
            &manifest,
            epsilon,
            t,
            &out_kept,
            &out_rejected,
            report.as_deref(),
            failures.as_deref(),
            max_instances,
        ),
        Command::Upsample {
            alpha_low,
            guide,
            out,
            method,
            radius,
            eps,
            subsample,
        } => tools::run_upsample(
            &config,
            &alpha_low,
            &guide,
            &out,
            method,
            radius,
            eps,
            subsample,
        ),
        Command::Bench { size, iters } => bench::run(&config, cli.workers, size, iters),
        Command::Loss {
            pred,
            gt,
            image,
            w_l1,
            w_lap,
            w_comp,
            levels,
            real,
            fake,
            real4,
            fake4,
            lambda,
        } => loss::run(
            &config,
            loss::LossArgs {
                pred,
                gt,
                image,
                w_l1,
                w_lap,
                w_comp,
                levels,
                real,
                fake,
                real4,
                fake4,
                lambda,
            },
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
