//! Brute-force reference implementations for validating mattekit.
//!
//! Everything here favors obviousness over speed: direct window sums, dense
//! linear solves, flood fills, literal formula transcriptions. The crate
//! deliberately has no dependency on mattekit (or anything else) so the two
//! codebases cannot share a bug. All functions take flat `f64` buffers in
//! row-major order.

pub mod fb;
pub mod guided;
pub mod linsolve;
pub mod metrics;
pub mod morph;
pub mod png;
