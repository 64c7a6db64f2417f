//! Full-reference quality metrics: PSNR and single-scale SSIM.

use crate::error::{Error, Result};
use crate::image::{to_luma, Image, Plane};

/// Side length of the SSIM window.
pub const SSIM_WINDOW: usize = 11;
/// Standard deviation of the SSIM Gaussian window.
pub const SSIM_SIGMA: f64 = 1.5;
const SSIM_C1: f64 = 0.01 * 0.01;
const SSIM_C2: f64 = 0.03 * 0.03;

/// PSNR and SSIM of one image pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    /// Decibels; `+inf` when the images are identical.
    pub psnr_db: f64,
    pub ssim: f64,
}

impl MetricReport {
    pub fn compare(a: &Image, b: &Image) -> Result<Self> {
        Ok(Self {
            psnr_db: psnr(a, b)?,
            ssim: ssim(a, b)?,
        })
    }
}

/// Mean squared error over every channel and pixel.
pub fn mse(a: &Image, b: &Image) -> Result<f64> {
    a.ensure_compatible(b)?;
    let sum: f64 = a
        .channels()
        .iter()
        .zip(b.channels())
        .flat_map(|(p, q)| p.data().iter().zip(q.data()))
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    let count = a.channels().len() * a.width() * a.height();
    Ok(sum / count as f64)
}

/// Peak signal-to-noise ratio with a peak value of 1.
pub fn psnr(a: &Image, b: &Image) -> Result<f64> {
    let mse = mse(a, b)?;
    if mse == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(-10.0 * mse.log10())
    }
}

fn window_taps() -> [f64; SSIM_WINDOW] {
    let mut taps = [0.0; SSIM_WINDOW];
    let centre = (SSIM_WINDOW / 2) as f64;
    for (i, t) in taps.iter_mut().enumerate() {
        let d = i as f64 - centre;
        *t = (-(d * d) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Separable Gaussian filtering keeping only fully covered window positions.
fn filter_valid(data: &[f64], width: usize, height: usize, taps: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let out_w = width - SSIM_WINDOW + 1;
    let out_h = height - SSIM_WINDOW + 1;
    let mut rows = Vec::with_capacity(out_w * height);
    for row in data.chunks_exact(width) {
        for x in 0..out_w {
            rows.push(row[x..x + SSIM_WINDOW].iter().zip(taps).map(|(v, t)| v * t).sum());
        }
    }
    let mut out = vec![0.0; out_w * out_h];
    for (y, dst) in out.chunks_exact_mut(out_w).enumerate() {
        for (k, &t) in taps.iter().enumerate() {
            let src = &rows[(y + k) * out_w..(y + k + 1) * out_w];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s * t;
            }
        }
    }
    out
}

fn ssim_planes(a: &Plane, b: &Plane) -> f64 {
    let (w, h) = a.dims();
    let taps = window_taps();
    let filter = |v: Vec<f64>| filter_valid(&v, w, h, &taps);
    let products = |f: fn(f64, f64) -> f64| -> Vec<f64> {
        a.data().iter().zip(b.data()).map(|(&x, &y)| f(x, y)).collect()
    };

    let mu_a = filter(a.data().to_vec());
    let mu_b = filter(b.data().to_vec());
    let e_aa = filter(products(|x, _| x * x));
    let e_bb = filter(products(|_, y| y * y));
    let e_ab = filter(products(|x, y| x * y));

    let total: f64 = (0..mu_a.len())
        .map(|i| {
            let (ma, mb) = (mu_a[i], mu_b[i]);
            let var_a = e_aa[i] - ma * ma;
            let var_b = e_bb[i] - mb * mb;
            let cov = e_ab[i] - ma * mb;
            ((2.0 * ma * mb + SSIM_C1) * (2.0 * cov + SSIM_C2))
                / ((ma * ma + mb * mb + SSIM_C1) * (var_a + var_b + SSIM_C2))
        })
        .sum();
    total / mu_a.len() as f64
}

/// Single-scale SSIM on luma: 11x11 Gaussian window with sigma 1.5,
/// `C1 = 0.01^2`, `C2 = 0.03^2`, averaged over every window position that fits
/// entirely inside the image.
pub fn ssim(a: &Image, b: &Image) -> Result<f64> {
    a.ensure_compatible(b)?;
    let (width, height) = a.dims();
    if width < SSIM_WINDOW || height < SSIM_WINDOW {
        return Err(Error::TooSmall {
            width,
            height,
            window: SSIM_WINDOW,
        });
    }
    Ok(ssim_planes(&to_luma(a), &to_luma(b)))
}
