//! Separable resampling with Keys bicubic and Lanczos kernels at arbitrary
//! real scale factors.
//!
//! Output pixel `X` samples the source at `x = (X + 0.5) * in / out - 0.5`
//! (pixel centres aligned). Positions are kept as exact integer fractions
//! `n / (2 * out)` so that tap selection and kernel arguments are symmetric
//! under mirroring: resizing a mirrored image gives the mirror of the resized
//! image bit for bit. Taps that fall outside the source are reflected
//! (reflect-101).
//!
//! In antialias mode a downscaling axis stretches the kernel by the scale
//! factor `s = in / out`, widening its support to `s` times as many taps, and
//! the weights are renormalized. Output is never clamped here.

use crate::error::{invalid, Result};
use crate::filters::reflect_101;
use crate::image::{PerChannel, Plane};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Target {
    Factor(f64),
    Dims { width: usize, height: usize },
}

/// Requested output size, either a downscale divisor or explicit dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleSpec {
    target: Target,
    antialias: bool,
}

impl ScaleSpec {
    /// Downscale by `d`: output dimensions are `round(in / d)`. Requires `d > 1`.
    pub fn factor(d: f64) -> Result<Self> {
        if !(d.is_finite() && d > 1.0) {
            return Err(invalid(format!("scale factor must be a finite value > 1, got {d}")));
        }
        Ok(Self {
            target: Target::Factor(d),
            antialias: false,
        })
    }

    pub fn dims(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(invalid(format!("output dimensions {width}x{height} must be nonzero")));
        }
        Ok(Self {
            target: Target::Dims { width, height },
            antialias: false,
        })
    }

    pub fn with_antialias(mut self, antialias: bool) -> Self {
        self.antialias = antialias;
        self
    }

    pub fn antialias(&self) -> bool {
        self.antialias
    }

    /// The divisor, when the spec was built from one.
    pub fn divisor(&self) -> Option<f64> {
        match self.target {
            Target::Factor(d) => Some(d),
            Target::Dims { .. } => None,
        }
    }

    /// Output dimensions for an `in_w`x`in_h` source.
    pub fn output_dims(&self, in_w: usize, in_h: usize) -> Result<(usize, usize)> {
        let (w, h) = match self.target {
            Target::Factor(d) => (
                (in_w as f64 / d).round() as usize,
                (in_h as f64 / d).round() as usize,
            ),
            Target::Dims { width, height } => (width, height),
        };
        if w == 0 || h == 0 {
            return Err(invalid(format!(
                "scaling {in_w}x{in_h} gives an empty {w}x{h} output"
            )));
        }
        Ok((w, h))
    }
}

/// Keys cubic convolution parameter `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BicubicKernelParam {
    pub a: f64,
}

impl Default for BicubicKernelParam {
    fn default() -> Self {
        Self { a: -0.5 }
    }
}

impl BicubicKernelParam {
    /// Kernel value at distance `t`. Equals 1 at 0 and 0 at +-1 and beyond +-2.
    pub fn eval(&self, t: f64) -> f64 {
        let a = self.a;
        let t = t.abs();
        if t <= 1.0 {
            ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0
        } else if t < 2.0 {
            ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a
        } else {
            0.0
        }
    }
}

/// Interpolation kernel used by [`resize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResampleKernel {
    Bicubic(BicubicKernelParam),
    Lanczos { lobes: u32 },
}

impl ResampleKernel {
    fn validate(&self) -> Result<()> {
        match *self {
            ResampleKernel::Bicubic(p) if !p.a.is_finite() => {
                Err(invalid("bicubic parameter must be finite"))
            }
            ResampleKernel::Lanczos { lobes: 0 } => Err(invalid("lanczos needs at least one lobe")),
            _ => Ok(()),
        }
    }

    /// Half-width of the kernel in (unstretched) source pixels.
    fn support(&self) -> i64 {
        match *self {
            ResampleKernel::Bicubic(_) => 2,
            ResampleKernel::Lanczos { lobes } => i64::from(lobes),
        }
    }

    fn eval(&self, t: f64) -> f64 {
        match *self {
            ResampleKernel::Bicubic(p) => p.eval(t),
            ResampleKernel::Lanczos { lobes } => lanczos(t, f64::from(lobes)),
        }
    }
}

fn lanczos(t: f64, lobes: f64) -> f64 {
    let t = t.abs();
    if t == 0.0 {
        1.0
    } else if t >= lobes || t.fract() == 0.0 {
        0.0
    } else {
        let pt = std::f64::consts::PI * t;
        lobes * pt.sin() * (pt / lobes).sin() / (pt * pt)
    }
}

/// Sums `term(0..n)` pairing the first with the last, the second with the
/// second to last, and so on. Reversing the terms leaves the result unchanged.
#[inline]
fn symmetric_sum(n: usize, term: impl Fn(usize) -> f64) -> f64 {
    let mut acc = 0.0;
    for k in 0..n / 2 {
        acc += term(k) + term(n - 1 - k);
    }
    if n % 2 == 1 {
        acc += term(n / 2);
    }
    acc
}

/// Source taps and normalized weights for every output position along one axis.
struct AxisWeights {
    bounds: Vec<usize>,
    index: Vec<usize>,
    weight: Vec<f64>,
}

impl AxisWeights {
    fn new(in_n: usize, out_n: usize, kernel: ResampleKernel, antialias: bool) -> Self {
        let (in_i, out_i) = (in_n as i64, out_n as i64);
        // Positions are n / (2 * out); kernel arguments are distances in those
        // units divided by `stretch`, which is 2 * in when the kernel widens.
        let unit = 2 * out_i;
        let stretch = if antialias && in_i > out_i { 2 * in_i } else { unit };
        let reach = kernel.support() * stretch;

        let mut bounds = Vec::with_capacity(out_n + 1);
        let mut index = Vec::new();
        let mut weight = Vec::new();
        bounds.push(0);
        for x in 0..out_i {
            let n = (2 * x + 1) * in_i - out_i;
            // Taps i with |n - i * unit| < reach.
            let first = (n - reach).div_euclid(unit) + 1;
            let last = -(-(n + reach)).div_euclid(unit) - 1;
            let start = weight.len();
            for i in first..=last {
                let dist = (n - i * unit).abs();
                index.push(reflect_101(i as isize, in_n));
                weight.push(kernel.eval(dist as f64 / stretch as f64));
            }
            let w = &mut weight[start..];
            let total = symmetric_sum(w.len(), |k| w[k]);
            w.iter_mut().for_each(|v| *v /= total);
            bounds.push(weight.len());
        }
        Self {
            bounds,
            index,
            weight,
        }
    }

    #[inline]
    fn taps(&self, out: usize) -> (&[usize], &[f64]) {
        let range = self.bounds[out]..self.bounds[out + 1];
        (&self.index[range.clone()], &self.weight[range])
    }
}

fn resize_plane(p: &Plane, out_w: usize, out_h: usize, kernel: ResampleKernel, antialias: bool) -> Plane {
    let (in_w, in_h) = p.dims();
    let cols = AxisWeights::new(in_w, out_w, kernel, antialias);
    let rows = AxisWeights::new(in_h, out_h, kernel, antialias);

    let horizontal = Plane::from_rows_par(out_w, in_h, |y, out| {
        let src = p.row(y);
        for (x, o) in out.iter_mut().enumerate() {
            let (idx, w) = cols.taps(x);
            *o = symmetric_sum(idx.len(), |k| src[idx[k]] * w[k]);
        }
    });

    Plane::from_rows_par(out_w, out_h, |y, out| {
        let (idx, w) = rows.taps(y);
        let n = idx.len();
        out.fill(0.0);
        for k in 0..n / 2 {
            let (a, b) = (horizontal.row(idx[k]), horizontal.row(idx[n - 1 - k]));
            let (wa, wb) = (w[k], w[n - 1 - k]);
            for ((o, &sa), &sb) in out.iter_mut().zip(a).zip(b) {
                *o += sa * wa + sb * wb;
            }
        }
        if n % 2 == 1 {
            let (m, wm) = (horizontal.row(idx[n / 2]), w[n / 2]);
            for (o, &s) in out.iter_mut().zip(m) {
                *o += s * wm;
            }
        }
    })
}

/// Resizes every plane of `input` with the given kernel.
pub fn resize<T: PerChannel>(input: &T, spec: &ScaleSpec, kernel: ResampleKernel) -> Result<T> {
    kernel.validate()?;
    input.try_map_planes(|p| {
        let (out_w, out_h) = spec.output_dims(p.width(), p.height())?;
        Ok(resize_plane(p, out_w, out_h, kernel, spec.antialias))
    })
}

/// Keys bicubic (`a = -0.5`) resampling.
pub fn resize_bicubic<T: PerChannel>(input: &T, spec: &ScaleSpec) -> Result<T> {
    resize(input, spec, ResampleKernel::Bicubic(BicubicKernelParam::default()))
}

/// Lanczos resampling with `lobes` lobes; weights are always renormalized.
pub fn resize_lanczos<T: PerChannel>(input: &T, spec: &ScaleSpec, lobes: u32) -> Result<T> {
    resize(input, spec, ResampleKernel::Lanczos { lobes })
}
