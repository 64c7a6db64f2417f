//! Decoding and encoding of 8-bit PNG and binary PGM/PPM files.
//!
//! Bytes map to intensities as `v / 255`; intensities map back to bytes as
//! `floor(v * 255 + 0.5)` (round half up), so 0.5 encodes as 128.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{ColorSpace, Image, Plane};

/// On-disk container format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImageFormat {
    Png,
    /// Binary netpbm: P5 for gray images, P6 for RGB.
    Pnm,
}

impl ImageFormat {
    /// Guesses the format from a file extension (`png`, `ppm`, `pgm`, `pnm`).
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "png" => Some(ImageFormat::Png),
            "ppm" | "pgm" | "pnm" => Some(ImageFormat::Pnm),
            _ => None,
        }
    }
}

/// Loads an image, sniffing the format from the file contents.
pub fn load(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| Error::Unreadable {
        path: path.to_path_buf(),
        source,
    })?;
    decode(&bytes)
}

/// Decodes an in-memory PNG, PGM or PPM file.
pub fn decode(bytes: &[u8]) -> Result<Image> {
    if bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
        decode_png(bytes)
    } else if bytes.starts_with(b"P5") || bytes.starts_with(b"P6") {
        decode_pnm(bytes)
    } else {
        Err(Error::UnsupportedFormat("not a PNG, binary PGM or binary PPM file".into()))
    }
}

/// Writes `img`, which must only hold samples in `[0, 1]`.
pub fn save(img: &Image, path: impl AsRef<Path>, format: ImageFormat) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode(img, format)?;
    fs::write(path, bytes).map_err(|source| Error::Unwritable {
        path: path.to_path_buf(),
        source,
    })
}

pub fn encode(img: &Image, format: ImageFormat) -> Result<Vec<u8>> {
    let samples = quantize(img)?;
    match format {
        ImageFormat::Png => encode_png(img, &samples),
        ImageFormat::Pnm => Ok(encode_pnm(img, &samples)),
    }
}

/// Interleaved 8-bit samples.
fn quantize(img: &Image) -> Result<Vec<u8>> {
    let channels = img.channels();
    let n = img.width() * img.height();
    let mut out = Vec::with_capacity(n * channels.len());
    for i in 0..n {
        for plane in channels {
            let v = plane.data()[i];
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange { index: i, value: v });
            }
            out.push((v * 255.0 + 0.5).floor() as u8);
        }
    }
    Ok(out)
}

fn from_interleaved(width: usize, height: usize, colorspace: ColorSpace, bytes: &[u8]) -> Result<Image> {
    let c = colorspace.channel_count();
    let planes = (0..c)
        .map(|k| {
            let data = bytes.iter().skip(k).step_by(c).map(|&b| f64::from(b) / 255.0).collect();
            Plane::new(width, height, data)
        })
        .collect::<Result<Vec<_>>>()?;
    Image::from_planes(colorspace, planes)
}

struct PnmHeader {
    colorspace: ColorSpace,
    width: usize,
    height: usize,
    payload_start: usize,
}

fn parse_pnm_header(bytes: &[u8]) -> Result<PnmHeader> {
    let colorspace = match &bytes[..2] {
        b"P5" => ColorSpace::Gray,
        b"P6" => ColorSpace::Rgb,
        _ => return Err(Error::MalformedHeader("bad netpbm magic".into())),
    };
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while !matches!(bytes.get(pos), None | Some(b'\n') | Some(b'\r')) {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::MalformedHeader("expected a decimal number".into()));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedHeader("number out of range".into()))?;
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::MalformedHeader("missing whitespace after maxval".into()));
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!("empty {width}x{height} image")));
    }
    if maxval != 255 {
        return Err(Error::UnsupportedLayout(format!("maxval {maxval}; only 255 is supported")));
    }
    Ok(PnmHeader {
        colorspace,
        width,
        height,
        payload_start: pos + 1,
    })
}

fn decode_pnm(bytes: &[u8]) -> Result<Image> {
    let header = parse_pnm_header(bytes)?;
    let needed = header
        .width
        .checked_mul(header.height)
        .and_then(|n| n.checked_mul(header.colorspace.channel_count()))
        .ok_or_else(|| Error::MalformedHeader("image dimensions overflow".into()))?;
    let payload = &bytes[header.payload_start..];
    if payload.len() < needed {
        return Err(Error::MalformedPayload(format!(
            "expected {needed} bytes of pixel data, found {}",
            payload.len()
        )));
    }
    from_interleaved(header.width, header.height, header.colorspace, &payload[..needed])
}

fn encode_pnm(img: &Image, samples: &[u8]) -> Vec<u8> {
    let magic = match img.colorspace() {
        ColorSpace::Gray => "P5",
        ColorSpace::Rgb => "P6",
    };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(samples);
    out
}

fn png_error(e: png::DecodingError) -> Error {
    match e {
        png::DecodingError::Format(f) => Error::MalformedPayload(f.to_string()),
        other => Error::MalformedHeader(other.to_string()),
    }
}

fn decode_png(bytes: &[u8]) -> Result<Image> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(png_error)?;
    let info = reader.info();
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedLayout(format!(
            "{}-bit PNG; only 8-bit samples are supported",
            info.bit_depth as u8
        )));
    }
    let colorspace = match info.color_type {
        _ if info.trns.is_some() => None,
        png::ColorType::Grayscale => Some(ColorSpace::Gray),
        png::ColorType::Rgb | png::ColorType::Indexed => Some(ColorSpace::Rgb),
        png::ColorType::GrayscaleAlpha | png::ColorType::Rgba => None,
    }
    .ok_or_else(|| Error::UnsupportedLayout("PNG with alpha channel".into()))?;

    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::MalformedHeader("PNG too large".into()))?;
    let mut buf = vec![0; size];
    let frame = reader.next_frame(&mut buf).map_err(png_error)?;
    let (width, height) = (frame.width as usize, frame.height as usize);
    let row = width * colorspace.channel_count();
    let mut packed = Vec::with_capacity(row * height);
    for line in buf.chunks(frame.line_size).take(height) {
        packed.extend_from_slice(&line[..row]);
    }
    from_interleaved(width, height, colorspace, &packed)
}

fn encode_png(img: &Image, samples: &[u8]) -> Result<Vec<u8>> {
    let too_big = |_| Error::UnsupportedLayout("image too large for PNG".into());
    let width = u32::try_from(img.width()).map_err(too_big)?;
    let height = u32::try_from(img.height()).map_err(too_big)?;
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, width, height);
        encoder.set_color(match img.colorspace() {
            ColorSpace::Gray => png::ColorType::Grayscale,
            ColorSpace::Rgb => png::ColorType::Rgb,
        });
        encoder.set_depth(png::BitDepth::Eight);
        let encode_err = |e: png::EncodingError| Error::UnsupportedLayout(e.to_string());
        let mut writer = encoder.write_header().map_err(encode_err)?;
        writer.write_image_data(samples).map_err(encode_err)?;
        writer.finish().map_err(encode_err)?;
    }
    Ok(out)
}
