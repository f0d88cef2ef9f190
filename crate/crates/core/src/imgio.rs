//! Image containers, netpbm I/O and format conversions.
//!
//! Three pixel containers cover the formats the pipeline works in:
//! [`RasterImage`] (rgb or gray as decoded), [`GrayImage`] (8-bit
//! intensities) and [`BinaryImage`] (0/1 after thresholding). I/O is
//! limited to binary netpbm (P5/P6, maxval 255); anything else is expected
//! to be converted externally.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ImageError {
    #[error("malformed netpbm header: {0}")]
    MalformedHeader(String),
    #[error("unsupported netpbm magic {0:?} (only binary P5/P6 are supported)")]
    UnsupportedMagic(String),
    #[error("unsupported maxval {0} (only 255 is supported)")]
    UnsupportedMaxval(u32),
    #[error("truncated pixel payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("invalid image geometry: {0}")]
    BadGeometry(String),
}

/// Interleaved 8-bit raster with 1 (gray) or 3 (rgb) channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    pub width: u32,
    pub height: u32,
    pub channels: u8,
    pub data: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: u32, height: u32, channels: u8, data: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::BadGeometry("zero dimension".into()));
        }
        if channels != 1 && channels != 3 {
            return Err(ImageError::BadGeometry(format!(
                "channels must be 1 or 3, got {channels}"
            )));
        }
        let expected = width as usize * height as usize * channels as usize;
        if data.len() != expected {
            return Err(ImageError::BadGeometry(format!(
                "data length {} does not match {}x{}x{}",
                data.len(),
                width,
                height,
                channels
            )));
        }
        Ok(Self { width, height, channels, data })
    }
}

/// Single-channel 8-bit image, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrayImage {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::BadGeometry("zero dimension".into()));
        }
        if data.len() != width as usize * height as usize {
            return Err(ImageError::BadGeometry(format!(
                "data length {} does not match {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    #[inline]
    pub fn pixel(&self, x: u32, y: u32) -> u8 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    /// Copies the `w`x`h` region at `(x, y)`; the region must be in bounds.
    pub fn crop(&self, x: u32, y: u32, w: u32, h: u32) -> Result<GrayImage, ImageError> {
        if w == 0 || h == 0 || x + w > self.width || y + h > self.height {
            return Err(ImageError::BadGeometry(format!(
                "crop {w}x{h}+{x}+{y} outside {}x{}",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(w as usize * h as usize);
        for row in y..y + h {
            let start = row as usize * self.width as usize + x as usize;
            data.extend_from_slice(&self.data[start..start + w as usize]);
        }
        Ok(GrayImage { width: w, height: h, data })
    }

    pub fn to_raster(&self) -> RasterImage {
        RasterImage {
            width: self.width,
            height: self.height,
            channels: 1,
            data: self.data.clone(),
        }
    }
}

/// Image with every sample restricted to {0, 1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl BinaryImage {
    #[inline]
    pub fn pixel(&self, x: u32, y: u32) -> u8 {
        self.data[y as usize * self.width as usize + x as usize]
    }
}

/// Decodes a binary netpbm file (P5 grayscale or P6 rgb, maxval 255).
///
/// Header tokens may be separated by arbitrary ASCII whitespace and `#`
/// comment lines. Exactly one whitespace byte separates the maxval from
/// the raw sample payload.
pub fn decode_netpbm(bytes: &[u8]) -> Result<RasterImage, ImageError> {
    if bytes.len() < 2 {
        return Err(ImageError::MalformedHeader("missing magic".into()));
    }
    let magic = &bytes[..2];
    let channels = match magic {
        b"P5" => 1u8,
        b"P6" => 3u8,
        b"P1" | b"P2" | b"P3" | b"P4" | b"P7" => {
            return Err(ImageError::UnsupportedMagic(
                String::from_utf8_lossy(magic).into_owned(),
            ))
        }
        _ => {
            return Err(ImageError::MalformedHeader(format!(
                "unknown magic {:?}",
                String::from_utf8_lossy(magic)
            )))
        }
    };

    let mut pos = 2usize;
    let mut fields = [0u32; 3];
    for field in fields.iter_mut() {
        *field = parse_header_int(bytes, &mut pos)?;
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(ImageError::UnsupportedMaxval(maxval));
    }
    // Single whitespace byte between header and payload.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => {
            return Err(ImageError::MalformedHeader(
                "missing whitespace after maxval".into(),
            ))
        }
    }
    if width == 0 || height == 0 {
        return Err(ImageError::BadGeometry("zero dimension in header".into()));
    }
    let expected = width as usize * height as usize * channels as usize;
    let payload = &bytes[pos..];
    if payload.len() < expected {
        return Err(ImageError::Truncated { expected, found: payload.len() });
    }
    RasterImage::new(width, height, channels, payload[..expected].to_vec())
}

fn parse_header_int(bytes: &[u8], pos: &mut usize) -> Result<u32, ImageError> {
    // Skip whitespace and '#' comments (which run to end of line).
    loop {
        match bytes.get(*pos) {
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(b'#') => {
                while let Some(&b) = bytes.get(*pos) {
                    *pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            }
            Some(_) => break,
            None => return Err(ImageError::MalformedHeader("unexpected end of header".into())),
        }
    }
    let start = *pos;
    while let Some(b) = bytes.get(*pos) {
        if b.is_ascii_digit() {
            *pos += 1;
        } else {
            break;
        }
    }
    if *pos == start {
        return Err(ImageError::MalformedHeader(format!(
            "expected integer at byte {start}"
        )));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| ImageError::MalformedHeader("integer out of range".into()))
}

/// Encodes to binary netpbm, bit-exact: magic, `'\n'`, `width ' ' height`,
/// `'\n'`, `255`, `'\n'`, raw samples.
pub fn encode_netpbm(img: &RasterImage) -> Vec<u8> {
    let magic = if img.channels == 3 { "P6" } else { "P5" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

pub fn encode_netpbm_gray(img: &GrayImage) -> Vec<u8> {
    encode_netpbm(&img.to_raster())
}

/// ITU-R BT.601 luma: `round(0.299 R + 0.587 G + 0.114 B)`, round half up.
/// Single-channel input is returned as a copy.
pub fn to_grayscale(img: &RasterImage) -> GrayImage {
    if img.channels == 1 {
        return GrayImage {
            width: img.width,
            height: img.height,
            data: img.data.clone(),
        };
    }
    let data = img
        .data
        .chunks_exact(3)
        .map(|px| {
            let y = 0.299 * px[0] as f64 + 0.587 * px[1] as f64 + 0.114 * px[2] as f64;
            (y + 0.5).floor().clamp(0.0, 255.0) as u8
        })
        .collect();
    GrayImage { width: img.width, height: img.height, data }
}

/// Otsu's threshold: the `t` maximizing between-class variance of the
/// 256-bin histogram, with class 0 holding pixels `<= t`. Ties go to the
/// smallest `t`. A constant image returns its constant value.
pub fn otsu_threshold(img: &GrayImage) -> u8 {
    let mut hist = [0u64; 256];
    for &p in &img.data {
        hist[p as usize] += 1;
    }
    let (lo, hi) = (
        hist.iter().position(|&c| c > 0).unwrap_or(0),
        hist.iter().rposition(|&c| c > 0).unwrap_or(0),
    );
    if lo == hi {
        return lo as u8;
    }

    let total = img.data.len() as f64;
    let total_sum: f64 = hist.iter().enumerate().map(|(v, &c)| v as f64 * c as f64).sum();

    let mut best_t = 0u8;
    let mut best_var = f64::NEG_INFINITY;
    let mut w0 = 0.0;
    let mut sum0 = 0.0;
    for (t, &count) in hist.iter().enumerate().take(255) {
        w0 += count as f64;
        sum0 += t as f64 * count as f64;
        let w1 = total - w0;
        let var = if w0 == 0.0 || w1 == 0.0 {
            0.0
        } else {
            let mu0 = sum0 / w0;
            let mu1 = (total_sum - sum0) / w1;
            w0 * w1 * (mu0 - mu1) * (mu0 - mu1)
        };
        if var > best_var {
            best_var = var;
            best_t = t as u8;
        }
    }
    best_t
}

/// Output pixel is 1 iff the input pixel is strictly greater than `t`.
pub fn binarize(img: &GrayImage, t: u8) -> BinaryImage {
    BinaryImage {
        width: img.width,
        height: img.height,
        data: img.data.iter().map(|&p| u8::from(p > t)).collect(),
    }
}

/// Bilinear resample to `w`x`h`. Sample positions map pixel centers to
/// pixel centers; weights and rounding are fixed so results are identical
/// across platforms.
pub fn resize_bilinear(img: &GrayImage, w: u32, h: u32) -> Result<GrayImage, ImageError> {
    if w == 0 || h == 0 {
        return Err(ImageError::BadGeometry("zero target dimension".into()));
    }
    let sx = img.width as f64 / w as f64;
    let sy = img.height as f64 / h as f64;
    let mut data = Vec::with_capacity(w as usize * h as usize);
    for oy in 0..h {
        let fy = ((oy as f64 + 0.5) * sy - 0.5).max(0.0);
        let y0 = (fy.floor() as u32).min(img.height - 1);
        let y1 = (y0 + 1).min(img.height - 1);
        let wy = fy - y0 as f64;
        for ox in 0..w {
            let fx = ((ox as f64 + 0.5) * sx - 0.5).max(0.0);
            let x0 = (fx.floor() as u32).min(img.width - 1);
            let x1 = (x0 + 1).min(img.width - 1);
            let wx = fx - x0 as f64;
            let top = img.pixel(x0, y0) as f64 * (1.0 - wx) + img.pixel(x1, y0) as f64 * wx;
            let bot = img.pixel(x0, y1) as f64 * (1.0 - wx) + img.pixel(x1, y1) as f64 * wx;
            let v = top * (1.0 - wy) + bot * wy;
            data.push((v + 0.5).floor().clamp(0.0, 255.0) as u8);
        }
    }
    GrayImage::new(w, h, data)
}
