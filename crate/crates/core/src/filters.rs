//! 3x3 correlation kernels (Sobel, Laplacian) and separable Gaussian blur.
//!
//! Kernels are applied as written, without flipping:
//! `out(x, y) = sum_{dx, dy} p(x + dx, y + dy) * k(dx, dy)`, where `k` is
//! stored row-major with rows indexed by `dy` and columns by `dx`.
//! Reads past the border use reflect-101 extension (`-1 -> 1`, `n -> n - 2`).

use crate::error::{invalid, Result};
use crate::image::Plane;

/// Maps any integer index into `0..n` by reflect-101 mirroring about the
/// first and last samples. Handles indices arbitrarily far out of range.
#[inline]
pub(crate) fn reflect_101(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m >= n as isize {
        (period - m) as usize
    } else {
        m as usize
    }
}

/// Nine coefficients of a 3x3 kernel in row-major order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel3x3 {
    taps: [f64; 9],
}

impl Kernel3x3 {
    /// Horizontal Sobel derivative; positive where intensity increases with `x`.
    pub const SOBEL_X: Kernel3x3 = Kernel3x3 {
        taps: [-1.0, 0.0, 1.0, -2.0, 0.0, 2.0, -1.0, 0.0, 1.0],
    };
    /// Vertical Sobel derivative; positive where intensity increases with `y`.
    pub const SOBEL_Y: Kernel3x3 = Kernel3x3 {
        taps: [-1.0, -2.0, -1.0, 0.0, 0.0, 0.0, 1.0, 2.0, 1.0],
    };
    /// Four-neighbour Laplacian.
    pub const LAPLACIAN: Kernel3x3 = Kernel3x3 {
        taps: [0.0, 1.0, 0.0, 1.0, -4.0, 1.0, 0.0, 1.0, 0.0],
    };
    pub const IDENTITY: Kernel3x3 = Kernel3x3 {
        taps: [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
    };

    pub fn new(taps: [f64; 9]) -> Result<Self> {
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(invalid("kernel taps must be finite"));
        }
        Ok(Self { taps })
    }

    pub fn taps(&self) -> &[f64; 9] {
        &self.taps
    }

    /// Coefficient applied to the sample at offset `(dx, dy)`, each in `-1..=1`.
    #[inline]
    pub fn tap(&self, dx: isize, dy: isize) -> f64 {
        self.taps[((dy + 1) * 3 + (dx + 1)) as usize]
    }
}

/// Same-size 3x3 correlation with reflect-101 borders.
pub fn convolve3x3(p: &Plane, k: &Kernel3x3) -> Plane {
    let (w, h) = p.dims();
    // Column neighbours are the same for every row.
    let left: Vec<usize> = (0..w).map(|x| reflect_101(x as isize - 1, w)).collect();
    let right: Vec<usize> = (0..w).map(|x| reflect_101(x as isize + 1, w)).collect();
    let t = k.taps;

    Plane::from_rows_par(w, h, |y, out| {
        let rows = [
            p.row(reflect_101(y as isize - 1, h)),
            p.row(y),
            p.row(reflect_101(y as isize + 1, h)),
        ];
        for (x, o) in out.iter_mut().enumerate() {
            let (xl, xr) = (left[x], right[x]);
            let mut acc = 0.0;
            for (r, row) in rows.iter().enumerate() {
                acc += row[xl] * t[r * 3] + row[x] * t[r * 3 + 1] + row[xr] * t[r * 3 + 2];
            }
            *o = acc;
        }
    })
}

/// Horizontal and vertical Sobel responses.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientPair {
    pub gx: Plane,
    pub gy: Plane,
}

impl GradientPair {
    /// Per-pixel Euclidean norm `sqrt(gx^2 + gy^2)`.
    pub fn magnitude(&self) -> Plane {
        self.gx
            .zip_map(&self.gy, |gx, gy| (gx * gx + gy * gy).sqrt())
            .expect("gradient planes share dimensions")
    }
}

pub fn sobel_gradients(p: &Plane) -> GradientPair {
    GradientPair {
        gx: convolve3x3(p, &Kernel3x3::SOBEL_X),
        gy: convolve3x3(p, &Kernel3x3::SOBEL_Y),
    }
}

/// Min-max normalized Sobel magnitude. Every sample lies in `[0, 1]`; unless
/// the magnitude is flat the extremes are exactly 0 and 1.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMap {
    plane: Plane,
}

impl EdgeMap {
    /// Wraps a plane whose samples are already in `[0, 1]`.
    pub fn from_plane(plane: Plane) -> Result<Self> {
        if let Some(v) = plane.data().iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(invalid(format!("edge map sample {v} outside [0, 1]")));
        }
        Ok(Self { plane })
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }

    pub fn into_plane(self) -> Plane {
        self.plane
    }
}

pub fn sobel_edge_map(p: &Plane) -> EdgeMap {
    let magnitude = sobel_gradients(p).magnitude();
    let (lo, hi) = magnitude.min_max();
    let range = hi - lo;
    let plane = if range > 0.0 {
        magnitude.map(|e| ((e - lo) / range).clamp(0.0, 1.0))
    } else {
        Plane::filled(p.width(), p.height(), 0.0)
    };
    EdgeMap { plane }
}

/// Signed Laplacian response. Neither normalized nor clamped.
#[derive(Debug, Clone, PartialEq)]
pub struct TextureMap {
    plane: Plane,
}

impl TextureMap {
    pub fn from_plane(plane: Plane) -> Self {
        Self { plane }
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }

    pub fn into_plane(self) -> Plane {
        self.plane
    }
}

pub fn laplacian(p: &Plane) -> TextureMap {
    TextureMap {
        plane: convolve3x3(p, &Kernel3x3::LAPLACIAN),
    }
}

/// Sampled Gaussian of radius `ceil(3 * sigma)`, renormalized to sum to 1.
/// The returned vector has `2 * radius + 1` taps centred on the middle one.
pub fn gaussian_taps(sigma: f64) -> Result<Vec<f64>> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(invalid(format!("gaussian sigma must be positive, got {sigma}")));
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let denom = 2.0 * sigma * sigma;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|t| (-((t * t) as f64) / denom).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    Ok(taps)
}

/// Separable Gaussian blur (rows first, then columns) with reflect-101 borders.
pub fn gaussian_blur(p: &Plane, sigma: f64) -> Result<Plane> {
    let taps = gaussian_taps(sigma)?;
    let radius = (taps.len() / 2) as isize;
    let (w, h) = p.dims();

    let col_index: Vec<Vec<usize>> = (0..w as isize)
        .map(|x| (-radius..=radius).map(|t| reflect_101(x + t, w)).collect())
        .collect();
    let horizontal = Plane::from_rows_par(w, h, |y, out| {
        let row = p.row(y);
        for (o, idx) in out.iter_mut().zip(&col_index) {
            *o = idx.iter().zip(&taps).map(|(&i, &t)| row[i] * t).sum();
        }
    });

    Ok(Plane::from_rows_par(w, h, |y, out| {
        out.fill(0.0);
        for (t, &weight) in (-radius..=radius).zip(&taps) {
            let src = horizontal.row(reflect_101(y as isize + t, h));
            for (o, &s) in out.iter_mut().zip(src) {
                *o += s * weight;
            }
        }
    }))
}
