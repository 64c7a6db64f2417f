//! Straightforward scalar reference implementations used as test oracles.
//!
//! Nothing here calls into the library's filtering, resampling or metric
//! code; inputs and outputs are plain `Vec<f64>` grids.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use said::{ColorSpace, Image, Plane};

/// Row-major grid of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub w: usize,
    pub h: usize,
    pub v: Vec<f64>,
}

impl Grid {
    pub fn new(w: usize, h: usize) -> Self {
        Self { w, h, v: vec![0.0; w * h] }
    }

    pub fn from_plane(p: &Plane) -> Self {
        Self { w: p.width(), h: p.height(), v: p.data().to_vec() }
    }

    pub fn at(&self, x: i64, y: i64) -> f64 {
        self.v[reflect(y, self.h) * self.w + reflect(x, self.w)]
    }

    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.v[y * self.w + x] = value;
    }
}

/// Reflect-101 by repeated folding.
pub fn reflect(mut i: i64, n: usize) -> usize {
    let n = n as i64;
    if n == 1 {
        return 0;
    }
    while i < 0 || i >= n {
        if i < 0 {
            i = -i;
        }
        if i >= n {
            i = 2 * (n - 1) - i;
        }
    }
    i as usize
}

pub const SOBEL_X: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
pub const SOBEL_Y: [[f64; 3]; 3] = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];
pub const LAPLACE: [[f64; 3]; 3] = [[0.0, 1.0, 0.0], [1.0, -4.0, 1.0], [0.0, 1.0, 0.0]];

/// `out(x, y) = sum_{i, j} g(x + i, y + j) * k[j + 1][i + 1]`.
pub fn correlate3(g: &Grid, k: &[[f64; 3]; 3]) -> Grid {
    let mut out = Grid::new(g.w, g.h);
    for y in 0..g.h {
        for x in 0..g.w {
            let mut s = 0.0;
            for j in -1i64..=1 {
                for i in -1i64..=1 {
                    s += g.at(x as i64 + i, y as i64 + j) * k[(j + 1) as usize][(i + 1) as usize];
                }
            }
            out.set(x, y, s);
        }
    }
    out
}

pub fn gauss_1d(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil() as i64;
    let raw: Vec<f64> = (-r..=r)
        .map(|t| (-(t as f64).powi(2) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| v / total).collect()
}

/// Direct 2-D sum with the outer-product Gaussian window.
pub fn gauss_blur_2d(g: &Grid, sigma: f64) -> Grid {
    let taps = gauss_1d(sigma);
    let r = (taps.len() / 2) as i64;
    let mut out = Grid::new(g.w, g.h);
    for y in 0..g.h {
        for x in 0..g.w {
            let mut s = 0.0;
            for j in -r..=r {
                for i in -r..=r {
                    let wt = taps[(i + r) as usize] * taps[(j + r) as usize];
                    s += wt * g.at(x as i64 + i, y as i64 + j);
                }
            }
            out.set(x, y, s);
        }
    }
    out
}

pub fn sobel_edge(g: &Grid) -> Grid {
    let gx = correlate3(g, &SOBEL_X);
    let gy = correlate3(g, &SOBEL_Y);
    let mut e = Grid::new(g.w, g.h);
    for k in 0..e.v.len() {
        e.v[k] = (gx.v[k].powi(2) + gy.v[k].powi(2)).sqrt();
    }
    let lo = e.v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = e.v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for v in &mut e.v {
        *v = if hi > lo { (*v - lo) / (hi - lo) } else { 0.0 };
    }
    e
}

pub fn keys(t: f64) -> f64 {
    let a = -0.5;
    let t = t.abs();
    if t < 1.0 {
        (a + 2.0) * t.powi(3) - (a + 3.0) * t.powi(2) + 1.0
    } else if t < 2.0 {
        a * t.powi(3) - 5.0 * a * t.powi(2) + 8.0 * a * t - 4.0 * a
    } else {
        0.0
    }
}

pub fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        (std::f64::consts::PI * t).sin() / (std::f64::consts::PI * t)
    }
}

/// Plain bicubic: centre-aligned source coordinate, 4x4 Keys neighbourhood,
/// no renormalization.
pub fn bicubic(g: &Grid, out_w: usize, out_h: usize) -> Grid {
    let sx = g.w as f64 / out_w as f64;
    let sy = g.h as f64 / out_h as f64;
    let mut out = Grid::new(out_w, out_h);
    for oy in 0..out_h {
        let y = (oy as f64 + 0.5) * sy - 0.5;
        let y0 = y.floor() as i64;
        for ox in 0..out_w {
            let x = (ox as f64 + 0.5) * sx - 0.5;
            let x0 = x.floor() as i64;
            let mut s = 0.0;
            for n in -1..=2 {
                for m in -1..=2 {
                    let wx = keys(x - (x0 + m) as f64);
                    let wy = keys(y - (y0 + n) as f64);
                    s += wx * wy * g.at(x0 + m, y0 + n);
                }
            }
            out.set(ox, oy, s);
        }
    }
    out
}

/// Generic separable-kernel resampler evaluated as a direct 2-D sum. The
/// kernel is stretched by the scale factor when `stretch` is set and the
/// axis shrinks; weights are renormalized per output pixel.
pub fn resample_direct(
    g: &Grid,
    out_w: usize,
    out_h: usize,
    kernel: impl Fn(f64) -> f64,
    support: f64,
    stretch: bool,
) -> Grid {
    let axis = |in_n: usize, out_n: usize, o: usize| -> Vec<(i64, f64)> {
        let s = in_n as f64 / out_n as f64;
        let scale = if stretch && s > 1.0 { s } else { 1.0 };
        let c = (o as f64 + 0.5) * s - 0.5;
        let reach = support * scale;
        let lo = (c - reach).floor() as i64 - 1;
        let hi = (c + reach).ceil() as i64 + 1;
        let mut taps: Vec<(i64, f64)> = (lo..=hi)
            .filter(|&i| (c - i as f64).abs() < reach)
            .map(|i| (i, kernel((c - i as f64) / scale)))
            .collect();
        let total: f64 = taps.iter().map(|t| t.1).sum();
        taps.iter_mut().for_each(|t| t.1 /= total);
        taps
    };
    let mut out = Grid::new(out_w, out_h);
    for oy in 0..out_h {
        let ty = axis(g.h, out_h, oy);
        for ox in 0..out_w {
            let tx = axis(g.w, out_w, ox);
            let mut s = 0.0;
            for &(j, wy) in &ty {
                for &(i, wx) in &tx {
                    s += wx * wy * g.at(i, j);
                }
            }
            out.set(ox, oy, s);
        }
    }
    out
}

pub fn lanczos_direct(g: &Grid, out_w: usize, out_h: usize, lobes: f64, stretch: bool) -> Grid {
    resample_direct(g, out_w, out_h, |t| sinc(t) * sinc(t / lobes), lobes, stretch)
}

pub fn keys_direct(g: &Grid, out_w: usize, out_h: usize, stretch: bool) -> Grid {
    resample_direct(g, out_w, out_h, keys, 2.0, stretch)
}

pub struct RefParams {
    pub sigma: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for RefParams {
    fn default() -> Self {
        Self { sigma: 1.0, gamma: 0.5, alpha: 0.5, beta: 0.1 }
    }
}

/// Line-by-line structure-aware downscale of a gray or RGB image given as
/// channel grids, with plain bicubic and a luma edge map.
pub fn said_reference(channels: &[Grid], d: f64, p: &RefParams) -> Vec<Grid> {
    let (w, h) = (channels[0].w, channels[0].h);
    let m = (w as f64 / d).round() as usize;
    let n = (h as f64 / d).round() as usize;

    // edge map computation
    let luma = if channels.len() == 1 {
        channels[0].clone()
    } else {
        let mut l = Grid::new(w, h);
        for k in 0..l.v.len() {
            l.v[k] = 0.299 * channels[0].v[k] + 0.587 * channels[1].v[k] + 0.114 * channels[2].v[k];
        }
        l
    };
    let i_e = sobel_edge(&luma);

    // edge-guided interpolation
    let mut i_e_down = bicubic(&i_e, m, n);
    for v in &mut i_e_down.v {
        *v = v.clamp(0.0, 1.0);
    }
    let mut out = Vec::new();
    for i in channels {
        let i_b = bicubic(i, m, n);
        let i_blur = gauss_blur_2d(i, p.sigma);
        let mut i_s = Grid::new(w, h);
        for k in 0..i_s.v.len() {
            i_s.v[k] = i.v[k] + p.gamma * (i.v[k] - i_blur.v[k]);
        }
        let i_s_down = bicubic(&i_s, m, n);
        let mut i_prime = Grid::new(m, n);
        for k in 0..i_prime.v.len() {
            let i1 = (1.0 - i_e_down.v[k]) * i_b.v[k];
            let i2 = i_e_down.v[k] * i_s_down.v[k];
            i_prime.v[k] = i1 + i2;
        }

        // texture enhancement
        let i_t = correlate3(i, &LAPLACE);
        let i_t_down = bicubic(&i_t, m, n);
        let mut i_d = Grid::new(m, n);
        for k in 0..i_d.v.len() {
            let lambda = p.alpha * i_e_down.v[k] + p.beta;
            i_d.v[k] = (i_prime.v[k] + lambda * i_t_down.v[k]).clamp(0.0, 1.0);
        }
        out.push(i_d);
    }
    out
}

pub fn grids(img: &Image) -> Vec<Grid> {
    img.channels().iter().map(Grid::from_plane).collect()
}

/// Mean squared error by explicit accumulation, then PSNR.
pub fn psnr_direct(a: &[Grid], b: &[Grid]) -> f64 {
    let mut total = 0.0;
    let mut count = 0usize;
    for (ga, gb) in a.iter().zip(b) {
        for (x, y) in ga.v.iter().zip(&gb.v) {
            total += (x - y) * (x - y);
            count += 1;
        }
    }
    let mse = total / count as f64;
    10.0 * (1.0 / mse).log10()
}

/// SSIM by explicit 11x11 window sums at every fully covered position.
pub fn ssim_direct(a: &Grid, b: &Grid) -> f64 {
    let taps = {
        let raw: Vec<f64> = (-5i64..=5).map(|t| (-(t * t) as f64 / (2.0 * 1.5 * 1.5)).exp()).collect();
        let s: f64 = raw.iter().sum();
        raw.iter().map(|v| v / s).collect::<Vec<_>>()
    };
    let (c1, c2) = (0.01f64.powi(2), 0.03f64.powi(2));
    let mut total = 0.0;
    let mut count = 0;
    for y0 in 0..=a.h - 11 {
        for x0 in 0..=a.w - 11 {
            let (mut ma, mut mb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for j in 0..11 {
                for i in 0..11 {
                    let wt = taps[i] * taps[j];
                    let va = a.v[(y0 + j) * a.w + x0 + i];
                    let vb = b.v[(y0 + j) * b.w + x0 + i];
                    ma += wt * va;
                    mb += wt * vb;
                    saa += wt * va * va;
                    sbb += wt * vb * vb;
                    sab += wt * va * vb;
                }
            }
            let va = saa - ma * ma;
            let vb = sbb - mb * mb;
            let cov = sab - ma * mb;
            total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
                / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            count += 1;
        }
    }
    total / count as f64
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_plane(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Plane {
    Plane::new(w, h, (0..w * h).map(|_| rng.random::<f64>()).collect()).unwrap()
}

pub fn random_rgb(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Image {
    Image::rgb(random_plane(rng, w, h), random_plane(rng, w, h), random_plane(rng, w, h)).unwrap()
}

pub fn checkerboard(n: usize, cell: usize) -> Image {
    Image::gray(Plane::from_fn(n, n, |x, y| ((x / cell + y / cell) % 2) as f64))
}

pub fn constant(colorspace: ColorSpace, w: usize, h: usize, c: f64) -> Image {
    Image::filled(colorspace, w, h, c)
}

/// 256x256 crop of a public-domain NASA portrait.
pub fn natural_image() -> Image {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/astronaut_256.png");
    said::io::load(path).expect("test photo loads")
}

/// Mean Sobel gradient magnitude over the luma channel.
pub fn mean_sobel(img: &Image) -> f64 {
    let g = Grid::from_plane(&said::to_luma(img));
    let gx = correlate3(&g, &SOBEL_X);
    let gy = correlate3(&g, &SOBEL_Y);
    let total: f64 = gx.v.iter().zip(&gy.v).map(|(a, b)| (a * a + b * b).sqrt()).sum();
    total / g.v.len() as f64
}
