//! Structure-aware downscaling and the classical baselines it is compared to.
//!
//! Stage order for [`said_downscale`]:
//!
//! ```text
//! I_E      = sobel_edge_map(luma(I))
//! I_B      = bicubic(I)
//! I_E_down = clamp(bicubic(I_E))
//! I_s      = I + gamma * (I - gaussian_blur(I, sigma))
//! I'       = (1 - I_E_down) * I_B + I_E_down * bicubic(I_s)
//! I_T      = laplacian(I)                       (per channel)
//! I_D      = clamp(I' + (alpha * I_E_down + beta) * bicubic(I_T))
//! ```
//!
//! One luma edge plane is shared by all channels. Intermediates are left
//! unclamped except for the downscaled edge map.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::filters::{gaussian_blur, laplacian, sobel_edge_map, EdgeMap, TextureMap};
use crate::image::{clamp_unit, ensure_dims, to_luma, Image, Plane};
use crate::resample::{resize_bicubic, resize_lanczos, ScaleSpec};

/// Largest accepted `alpha + beta`.
pub const MAX_TEXTURE_GAIN: f64 = 4.0;

/// Tunable parameters of the structure-aware downscaler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaidParams {
    /// Standard deviation of the unsharp-mask blur.
    pub sigma: f64,
    /// Sharpening strength.
    pub gamma: f64,
    /// Texture gain that scales with edge strength.
    pub alpha: f64,
    /// Texture gain applied everywhere.
    pub beta: f64,
    /// Use the antialiased (stretched-kernel) bicubic for every resampling step.
    pub antialias: bool,
    /// Scale the texture map by its largest magnitude before fusing.
    pub texture_normalize: bool,
}

impl Default for SaidParams {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            gamma: 0.5,
            alpha: 0.5,
            beta: 0.1,
            antialias: false,
            texture_normalize: false,
        }
    }
}

impl SaidParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(invalid(format!("sigma must be positive, got {}", self.sigma)));
        }
        for (name, v) in [("gamma", self.gamma), ("alpha", self.alpha), ("beta", self.beta)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} must be a finite value >= 0, got {v}")));
            }
        }
        if self.alpha + self.beta > MAX_TEXTURE_GAIN {
            return Err(invalid(format!(
                "alpha + beta = {} exceeds {MAX_TEXTURE_GAIN}",
                self.alpha + self.beta
            )));
        }
        Ok(())
    }
}

/// Intermediate results of one [`said_downscale`] call.
#[derive(Debug, Clone, PartialEq)]
pub struct SaidTrace {
    /// Full-resolution edge map of the luma channel.
    pub edge_map: EdgeMap,
    /// Edge map after downscaling and clamping.
    pub edge_map_down: EdgeMap,
    pub blurred: Image,
    pub sharpened: Image,
    pub sharpened_down: Image,
    pub bicubic: Image,
    /// Per-channel Laplacian at full resolution.
    pub texture: Vec<TextureMap>,
    pub texture_down: Vec<TextureMap>,
    /// Edge-guided blend before texture fusion.
    pub blended: Image,
}

fn sharpen(img: &Image, sigma: f64, gamma: f64) -> Result<(Image, Image)> {
    let mut blurred = Vec::with_capacity(img.channels().len());
    let mut sharpened = Vec::with_capacity(img.channels().len());
    for plane in img.channels() {
        let blur = gaussian_blur(plane, sigma)?;
        sharpened.push(plane.zip_map(&blur, |i, b| i + gamma * (i - b))?);
        blurred.push(blur);
    }
    Ok((
        Image::from_planes(img.colorspace(), blurred)?,
        Image::from_planes(img.colorspace(), sharpened)?,
    ))
}

/// Unsharp masking `I + gamma * (I - blur(I))` per channel, without clamping.
pub fn unsharp_mask(img: &Image, sigma: f64, gamma: f64) -> Result<Image> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(invalid(format!("gamma must be a finite value >= 0, got {gamma}")));
    }
    Ok(sharpen(img, sigma, gamma)?.1)
}

/// Per-pixel convex blend `(1 - e) * bicubic + e * sharpened` with one edge
/// plane shared by all channels.
pub fn edge_guided_blend(bicubic: &Image, sharpened_down: &Image, edge_down: &EdgeMap) -> Result<Image> {
    bicubic.ensure_compatible(sharpened_down)?;
    let edge = edge_down.plane();
    ensure_dims(bicubic.dims(), edge.dims())?;
    let channels = bicubic
        .channels()
        .iter()
        .zip(sharpened_down.channels())
        .map(|(b, s)| {
            let data = b
                .data()
                .iter()
                .zip(s.data())
                .zip(edge.data())
                .map(|((&b, &s), &e)| (1.0 - e) * b + e * s)
                .collect();
            Plane::new(b.width(), b.height(), data)
        })
        .collect::<Result<Vec<_>>>()?;
    Image::from_planes(bicubic.colorspace(), channels)
}

/// Adds `(alpha * e + beta) * texture` to each channel and clamps to `[0, 1]`.
pub fn texture_fuse(
    blended: &Image,
    texture_down: &[TextureMap],
    edge_down: &EdgeMap,
    alpha: f64,
    beta: f64,
) -> Result<Image> {
    if texture_down.len() != blended.channels().len() {
        return Err(Error::ChannelMismatch {
            expected: blended.channels().len(),
            actual: texture_down.len(),
        });
    }
    let edge = edge_down.plane();
    ensure_dims(blended.dims(), edge.dims())?;
    let channels = blended
        .channels()
        .iter()
        .zip(texture_down)
        .map(|(base, texture)| {
            let texture = texture.plane();
            ensure_dims(blended.dims(), texture.dims())?;
            let data = base
                .data()
                .iter()
                .zip(texture.data())
                .zip(edge.data())
                .map(|((&b, &t), &e)| (b + (alpha * e + beta) * t).clamp(0.0, 1.0))
                .collect();
            Plane::new(base.width(), base.height(), data)
        })
        .collect::<Result<Vec<_>>>()?;
    Image::from_planes(blended.colorspace(), channels)
}

fn normalize_textures(textures: Vec<TextureMap>) -> Vec<TextureMap> {
    let peak = textures
        .iter()
        .flat_map(|t| t.plane().data())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return textures;
    }
    textures
        .into_iter()
        .map(|t| TextureMap::from_plane(t.plane().map(|v| v / peak)))
        .collect()
}

fn check_downscale(img: &Image, spec: &ScaleSpec) -> Result<(usize, usize)> {
    let (in_w, in_h) = img.dims();
    let (out_w, out_h) = spec.output_dims(in_w, in_h)?;
    if spec.divisor().is_none() && (out_w > in_w || out_h > in_h || (out_w, out_h) == (in_w, in_h)) {
        return Err(invalid(format!(
            "{out_w}x{out_h} is not a downscale of {in_w}x{in_h}"
        )));
    }
    Ok((out_w, out_h))
}

/// Structure-aware downscaling of `img`.
///
/// `spec.antialias` is overridden by `params.antialias`. When `want_trace` is
/// set the intermediates are returned as well.
pub fn said_downscale(
    img: &Image,
    spec: &ScaleSpec,
    params: &SaidParams,
    want_trace: bool,
) -> Result<(Image, Option<SaidTrace>)> {
    params.validate()?;
    check_downscale(img, spec)?;
    let spec = spec.with_antialias(params.antialias);

    // Edge map on luma, shared by every channel.
    let edge_map = sobel_edge_map(&to_luma(img));
    let edge_map_down = EdgeMap::from_plane(clamp_unit(&resize_bicubic(edge_map.plane(), &spec)?))?;

    // Edge-guided interpolation.
    let bicubic = resize_bicubic(img, &spec)?;
    let (blurred, sharpened) = sharpen(img, params.sigma, params.gamma)?;
    let sharpened_down = resize_bicubic(&sharpened, &spec)?;
    let blended = edge_guided_blend(&bicubic, &sharpened_down, &edge_map_down)?;

    // Texture enhancement.
    let mut texture: Vec<TextureMap> = img.channels().iter().map(laplacian).collect();
    if params.texture_normalize {
        texture = normalize_textures(texture);
    }
    let texture_down = texture
        .iter()
        .map(|t| Ok(TextureMap::from_plane(resize_bicubic(t.plane(), &spec)?)))
        .collect::<Result<Vec<_>>>()?;
    let output = texture_fuse(&blended, &texture_down, &edge_map_down, params.alpha, params.beta)?;

    let trace = want_trace.then_some(SaidTrace {
        edge_map,
        edge_map_down,
        blurred,
        sharpened,
        sharpened_down,
        bicubic,
        texture,
        texture_down,
        blended,
    });
    Ok((output, trace))
}

/// Classical resampler used for comparison rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMethod {
    Bicubic,
    Lanczos { lobes: u32 },
}

impl fmt::Display for BaselineMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaselineMethod::Bicubic => f.write_str("bicubic"),
            BaselineMethod::Lanczos { lobes: 3 } => f.write_str("lanczos"),
            BaselineMethod::Lanczos { lobes } => write!(f, "lanczos{lobes}"),
        }
    }
}

impl FromStr for BaselineMethod {
    type Err = Error;

    /// Accepts `bicubic`, `lanczos` (three lobes) and `lanczosN`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "bicubic" => Ok(BaselineMethod::Bicubic),
            "lanczos" => Ok(BaselineMethod::Lanczos { lobes: 3 }),
            other => other
                .strip_prefix("lanczos")
                .and_then(|n| n.parse::<u32>().ok())
                .filter(|&lobes| lobes >= 1)
                .map(|lobes| BaselineMethod::Lanczos { lobes })
                .ok_or_else(|| invalid(format!("unknown baseline method `{s}`"))),
        }
    }
}

/// Plain resampling followed by a clamp to `[0, 1]`.
pub fn baseline_downscale(img: &Image, spec: &ScaleSpec, method: BaselineMethod) -> Result<Image> {
    let resized = match method {
        BaselineMethod::Bicubic => resize_bicubic(img, spec)?,
        BaselineMethod::Lanczos { lobes } => resize_lanczos(img, spec, lobes)?,
    };
    Ok(resized.map_channels(clamp_unit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::ColorSpace;

    fn px(v: f64) -> Image {
        Image::gray(Plane::filled(1, 1, v))
    }

    fn edge(v: f64) -> EdgeMap {
        EdgeMap::from_plane(Plane::filled(1, 1, v)).unwrap()
    }

    fn checker(n: usize) -> Image {
        Image::gray(Plane::from_fn(n, n, |x, y| ((x + y) % 2) as f64))
    }

    #[test]
    fn params_validation() {
        assert!(SaidParams::default().validate().is_ok());
        let bad = [
            SaidParams { sigma: 0.0, ..Default::default() },
            SaidParams { gamma: -0.1, ..Default::default() },
            SaidParams { alpha: f64::NAN, ..Default::default() },
            SaidParams { alpha: 3.0, beta: 1.5, ..Default::default() },
        ];
        for p in bad {
            assert!(p.validate().is_err(), "{p:?}");
        }
    }

    #[test]
    fn unsharp_identities() {
        let img = checker(8);
        assert_eq!(unsharp_mask(&img, 1.0, 0.0).unwrap(), img);
        let flat = Image::filled(ColorSpace::Rgb, 6, 5, 0.3);
        let out = unsharp_mask(&flat, 1.0, 0.7).unwrap();
        for c in out.channels() {
            assert!(c.data().iter().all(|v| (v - 0.3).abs() < 1e-15));
        }
        assert!(unsharp_mask(&flat, -1.0, 0.5).is_err());
        assert!(unsharp_mask(&flat, 1.0, -0.5).is_err());
    }

    #[test]
    fn blend_arithmetic() {
        let out = edge_guided_blend(&px(0.2), &px(0.6), &edge(0.5)).unwrap();
        assert!((out.channel(0).get(0, 0) - 0.4).abs() < 1e-15);

        let b = checker(4);
        let s = Image::gray(Plane::filled(4, 4, 0.3));
        let zero = EdgeMap::from_plane(Plane::filled(4, 4, 0.0)).unwrap();
        let one = EdgeMap::from_plane(Plane::filled(4, 4, 1.0)).unwrap();
        assert_eq!(edge_guided_blend(&b, &s, &zero).unwrap(), b);
        assert_eq!(edge_guided_blend(&b, &s, &one).unwrap(), s);
    }

    #[test]
    fn blend_rejects_mismatch() {
        let err = edge_guided_blend(&checker(4), &checker(3), &edge(0.0)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        let err = edge_guided_blend(&checker(4), &checker(4), &edge(0.0)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn fuse_arithmetic() {
        let t = [TextureMap::from_plane(Plane::filled(1, 1, 0.2))];
        let out = texture_fuse(&px(0.5), &t, &edge(1.0), 0.5, 0.1).unwrap();
        assert!((out.channel(0).get(0, 0) - 0.62).abs() < 1e-15);

        let over = texture_fuse(&px(0.9), &t, &edge(1.0), 2.0, 1.0).unwrap();
        assert_eq!(over.channel(0).get(0, 0), 1.0);

        let base = Image::gray(Plane::new(2, 1, vec![-0.3, 0.7]).unwrap());
        let zero_t = [TextureMap::from_plane(Plane::filled(2, 1, 0.0))];
        let e = EdgeMap::from_plane(Plane::filled(2, 1, 0.4)).unwrap();
        let expected = base.map_channels(clamp_unit);
        assert_eq!(texture_fuse(&base, &zero_t, &e, 0.5, 0.1).unwrap(), expected);
        let some_t = [TextureMap::from_plane(Plane::filled(2, 1, 0.8))];
        assert_eq!(texture_fuse(&base, &some_t, &e, 0.0, 0.0).unwrap(), expected);
    }

    #[test]
    fn fuse_rejects_mismatch() {
        let t = [TextureMap::from_plane(Plane::filled(2, 1, 0.0))];
        assert!(texture_fuse(&px(0.5), &t, &edge(0.0), 0.5, 0.1).is_err());
        assert!(matches!(
            texture_fuse(&px(0.5), &[], &edge(0.0), 0.5, 0.1),
            Err(Error::ChannelMismatch { expected: 1, actual: 0 })
        ));
    }

    #[test]
    fn baseline_method_names() {
        assert_eq!("bicubic".parse::<BaselineMethod>().unwrap(), BaselineMethod::Bicubic);
        assert_eq!(
            "Lanczos".parse::<BaselineMethod>().unwrap(),
            BaselineMethod::Lanczos { lobes: 3 }
        );
        assert_eq!(
            "lanczos2".parse::<BaselineMethod>().unwrap(),
            BaselineMethod::Lanczos { lobes: 2 }
        );
        for bad in ["nearest", "lanczos0", "lanczosx", ""] {
            assert!(bad.parse::<BaselineMethod>().is_err(), "{bad}");
        }
        assert_eq!(BaselineMethod::Lanczos { lobes: 3 }.to_string(), "lanczos");
    }

    #[test]
    fn baseline_is_clamped_resample() {
        let img = checker(12);
        let spec = ScaleSpec::factor(2.5).unwrap();
        let expected = resize_bicubic(&img, &spec).unwrap().map_channels(clamp_unit);
        assert_eq!(baseline_downscale(&img, &spec, BaselineMethod::Bicubic).unwrap(), expected);
    }

    #[test]
    fn rejects_non_downscale_dims() {
        let img = checker(8);
        let params = SaidParams::default();
        for (w, h) in [(8, 8), (9, 4)] {
            let spec = ScaleSpec::dims(w, h).unwrap();
            assert!(said_downscale(&img, &spec, &params, false).is_err());
        }
        let spec = ScaleSpec::dims(4, 8).unwrap();
        assert_eq!(said_downscale(&img, &spec, &params, false).unwrap().0.dims(), (4, 8));
    }

    #[test]
    fn trace_dimensions() {
        let img = checker(16);
        let spec = ScaleSpec::factor(4.0).unwrap();
        let (out, trace) = said_downscale(&img, &spec, &SaidParams::default(), true).unwrap();
        let t = trace.unwrap();
        assert_eq!(out.dims(), (4, 4));
        assert_eq!(t.edge_map.plane().dims(), (16, 16));
        assert_eq!(t.blurred.dims(), (16, 16));
        assert_eq!(t.sharpened.dims(), (16, 16));
        assert_eq!(t.texture[0].plane().dims(), (16, 16));
        assert_eq!(t.edge_map_down.plane().dims(), (4, 4));
        assert_eq!(t.bicubic.dims(), (4, 4));
        assert_eq!(t.sharpened_down.dims(), (4, 4));
        assert_eq!(t.texture_down[0].plane().dims(), (4, 4));
        assert_eq!(t.blended.dims(), (4, 4));
    }

    #[test]
    fn texture_normalization_scales_to_unit_peak() {
        let img = checker(8);
        let spec = ScaleSpec::factor(2.0).unwrap();
        let params = SaidParams { texture_normalize: true, ..Default::default() };
        let (_, trace) = said_downscale(&img, &spec, &params, true).unwrap();
        let peak = trace.unwrap().texture[0]
            .plane()
            .data()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert_eq!(peak, 1.0);
    }
}
