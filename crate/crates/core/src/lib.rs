//! Structure-aware image downscaling.
//!
//! The downscaler combines three stages computed on the full-resolution input:
//!
//! 1. a normalized Sobel edge map of the luma channel,
//! 2. an edge-weighted blend of plain bicubic output and a bicubic-downscaled
//!    unsharp-masked copy of the input,
//! 3. a Laplacian texture term added back with a per-pixel gain that grows
//!    with edge strength.
//!
//! Plain bicubic and Lanczos baselines and the PSNR/SSIM metrics used to
//! compare them live alongside, together with PNG and binary PPM/PGM codecs.
//!
//! All intensities are `f64` in `[0, 1]`. Every operation is a pure function;
//! the heavier ones split work across rows with rayon and produce the same bits
//! regardless of thread count.

mod error;
pub mod filters;
pub mod image;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod resample;

pub use error::{Error, Result};
pub use filters::{EdgeMap, GradientPair, Kernel3x3, TextureMap};
pub use image::{clamp_unit, to_luma, ColorSpace, Image, Plane, ValueRange};
pub use metrics::{psnr, ssim, MetricReport};
pub use pipeline::{said_downscale, BaselineMethod, SaidParams, SaidTrace};
pub use resample::{BicubicKernelParam, ScaleSpec};
