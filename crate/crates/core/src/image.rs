//! Image containers and value-range helpers shared by every stage.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

/// Single-channel 2-D grid of real-valued samples in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    /// Wraps `data` as a `width`x`height` plane.
    ///
    /// Fails when a dimension is zero, the length does not match, or any
    /// sample is NaN or infinite.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(invalid(format!("plane dimensions {width}x{height} must be nonzero")));
        }
        let expected = width * height;
        if data.len() != expected {
            return Err(Error::BadLength {
                expected,
                actual: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(index));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Constant plane. Panics on zero dimensions or a non-finite value.
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "plane dimensions must be nonzero");
        assert!(value.is_finite(), "fill value must be finite");
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    /// Builds a plane by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "plane dimensions must be nonzero");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        assert!(data.iter().all(|v| v.is_finite()), "generator produced a non-finite sample");
        Self {
            width,
            height,
            data,
        }
    }

    /// Fills each output row in parallel. `fill(y, row)` writes row `y`.
    pub(crate) fn from_rows_par<F>(width: usize, height: usize, fill: F) -> Self
    where
        F: Fn(usize, &mut [f64]) + Sync,
    {
        let mut data = vec![0.0; width * height];
        data.par_chunks_mut(width)
            .enumerate()
            .for_each(|(y, row)| fill(y, row));
        Self::from_raw(width, height, data)
    }

    pub(crate) fn from_raw(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    /// Applies `f` to every sample.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.width, self.height, self.data.iter().map(|&v| f(v)).collect())
    }

    /// Combines two equally sized planes sample by sample.
    pub fn zip_map(&self, other: &Plane, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.ensure_same_dims(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self::from_raw(self.width, self.height, data))
    }

    pub(crate) fn ensure_same_dims(&self, other: &Plane) -> Result<()> {
        ensure_dims(self.dims(), other.dims())
    }

    /// Smallest and largest sample.
    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Left-right mirror image.
    pub fn mirror_horizontal(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for row in self.data.chunks_exact(self.width) {
            data.extend(row.iter().rev());
        }
        Self::from_raw(self.width, self.height, data)
    }
}

pub(crate) fn ensure_dims(expected: (usize, usize), actual: (usize, usize)) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected_w: expected.0,
            expected_h: expected.1,
            actual_w: actual.0,
            actual_h: actual.1,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColorSpace {
    Gray,
    Rgb,
}

impl ColorSpace {
    pub fn channel_count(self) -> usize {
        match self {
            ColorSpace::Gray => 1,
            ColorSpace::Rgb => 3,
        }
    }
}

/// One or three planes of identical size tagged with a color space.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    channels: Vec<Plane>,
    colorspace: ColorSpace,
}

impl Image {
    pub fn gray(plane: Plane) -> Self {
        Self {
            channels: vec![plane],
            colorspace: ColorSpace::Gray,
        }
    }

    pub fn rgb(r: Plane, g: Plane, b: Plane) -> Result<Self> {
        Self::from_planes(ColorSpace::Rgb, vec![r, g, b])
    }

    /// Checks that the plane count matches the color space and that all
    /// planes share dimensions.
    pub fn from_planes(colorspace: ColorSpace, channels: Vec<Plane>) -> Result<Self> {
        if channels.len() != colorspace.channel_count() {
            return Err(Error::ChannelMismatch {
                expected: colorspace.channel_count(),
                actual: channels.len(),
            });
        }
        for plane in &channels[1..] {
            channels[0].ensure_same_dims(plane)?;
        }
        Ok(Self {
            channels,
            colorspace,
        })
    }

    pub fn filled(colorspace: ColorSpace, width: usize, height: usize, value: f64) -> Self {
        let channels = (0..colorspace.channel_count())
            .map(|_| Plane::filled(width, height, value))
            .collect();
        Self {
            channels,
            colorspace,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.channels[0].width()
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.channels[0].height()
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        self.channels[0].dims()
    }

    pub fn colorspace(&self) -> ColorSpace {
        self.colorspace
    }

    pub fn channels(&self) -> &[Plane] {
        &self.channels
    }

    pub fn channel(&self, index: usize) -> &Plane {
        &self.channels[index]
    }

    pub fn into_channels(self) -> Vec<Plane> {
        self.channels
    }

    pub fn map_channels(&self, f: impl Fn(&Plane) -> Plane) -> Self {
        Self {
            channels: self.channels.iter().map(f).collect(),
            colorspace: self.colorspace,
        }
    }

    /// Fails with a mismatch error unless `other` has the same size and channel count.
    pub fn ensure_compatible(&self, other: &Image) -> Result<()> {
        if self.channels.len() != other.channels.len() {
            return Err(Error::ChannelMismatch {
                expected: self.channels.len(),
                actual: other.channels.len(),
            });
        }
        ensure_dims(self.dims(), other.dims())
    }

    pub fn mirror_horizontal(&self) -> Self {
        self.map_channels(Plane::mirror_horizontal)
    }
}

/// Something made of planes that can be processed one plane at a time.
pub trait PerChannel: Sized {
    fn try_map_planes<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&Plane) -> Result<Plane>;
}

impl PerChannel for Plane {
    fn try_map_planes<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&Plane) -> Result<Plane>,
    {
        f(self)
    }
}

impl PerChannel for Image {
    fn try_map_planes<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&Plane) -> Result<Plane>,
    {
        let channels = self.channels.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            channels,
            colorspace: self.colorspace,
        })
    }
}

/// Closed intensity interval used for decoded pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueRange {
    lo: f64,
    hi: f64,
}

impl ValueRange {
    pub const UNIT: ValueRange = ValueRange { lo: 0.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid(format!("value range [{lo}, {hi}] must satisfy lo < hi")));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    #[inline]
    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lo, self.hi)
    }
}

impl Default for ValueRange {
    fn default() -> Self {
        Self::UNIT
    }
}

const LUMA_R: f64 = 0.299;
const LUMA_G: f64 = 0.587;
const LUMA_B: f64 = 0.114;

/// BT.601 luma. Gray images return a copy of their only plane.
pub fn to_luma(img: &Image) -> Plane {
    match img.colorspace {
        ColorSpace::Gray => img.channels[0].clone(),
        ColorSpace::Rgb => {
            let [r, g, b] = [&img.channels[0], &img.channels[1], &img.channels[2]];
            let data = r
                .data()
                .iter()
                .zip(g.data())
                .zip(b.data())
                .map(|((&r, &g), &b)| LUMA_R * r + LUMA_G * g + LUMA_B * b)
                .collect();
            Plane::from_raw(img.width(), img.height(), data)
        }
    }
}

/// Clamps every sample to `[0, 1]`.
pub fn clamp_unit(p: &Plane) -> Plane {
    p.map(|v| ValueRange::UNIT.clamp(v))
}
