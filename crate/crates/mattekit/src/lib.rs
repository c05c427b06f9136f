//! mattekit: an alpha-matting pipeline toolkit.
//!
//! The crate covers the non-neural machinery around portrait matting:
//!
//! - [`raster`]: core image/matte types; [`io`]: PNG bundles; [`resample`];
//!   [`pyramid`]: Laplacian pyramids.
//! - [`composite`]: alpha blending, multi-level foreground/background
//!   estimation, background replacement.
//! - [`trimap`]: trimap generation and region masks.
//! - [`metrics`]: SAD/MSE/MAD (whole and region-restricted), gradient and
//!   connectivity errors.
//! - [`losses`]: L1/Laplacian/composition loss stack, GAN objective
//!   evaluators, alignment-agreement filter.
//! - [`guided`]: exact and fast guided filtering for alpha upscaling.
//! - [`pipeline`]: dataset manifests, batch composite building, filtering,
//!   augmentation; [`report`]: batch metric evaluation and CSV reports.
//!
//! Heavy loops run on rayon with the default `parallel` feature and fall
//! back to sequential code without it; outputs are identical either way.

pub mod composite;
pub mod error;
mod exec;
pub mod guided;
pub mod io;
pub mod losses;
pub mod metrics;
pub mod pipeline;
pub mod pyramid;
pub mod raster;
pub mod report;
pub mod resample;
pub mod trimap;

pub use error::{Error, Result};
pub use exec::with_workers;
pub use raster::{AlphaMatte, Image, Plane};
