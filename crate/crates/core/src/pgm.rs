//! Binary PGM (P5) reading and canonical writing, plus optional 8-bit PNG.
//!
//! Header comments are accepted on read and never written. Pixel values are
//! kept as stored; images with `maxval < 255` are not rescaled.

use thiserror::Error;

use crate::image::{GrayImage, ImageError};

#[derive(Debug, Error)]
pub enum PgmError {
    #[error("not a binary PGM: expected magic \"P5\"")]
    BadMagic,
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("PGM maxval {0} exceeds 255")]
    MaxvalTooLarge(u32),
    #[error("PGM pixel data truncated: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("PGM pixel {index} has value {value} above maxval {maxval}")]
    PixelAboveMaxval { index: usize, value: u8, maxval: u32 },
    #[error(transparent)]
    Image(#[from] ImageError),
    #[cfg(feature = "png")]
    #[error("PNG codec error: {0}")]
    Png(String),
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, field: &str) -> Result<u32, PgmError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(PgmError::MalformedHeader(format!("missing {field}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| PgmError::MalformedHeader(format!("{field} out of range")))
    }
}

pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage, PgmError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(PgmError::BadMagic);
    }
    let mut cur = HeaderCursor { bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(PgmError::MalformedHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    if maxval == 0 {
        return Err(PgmError::MalformedHeader("maxval must be positive".into()));
    }
    if maxval > 255 {
        return Err(PgmError::MaxvalTooLarge(maxval));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => {
            return Err(PgmError::MalformedHeader(
                "missing whitespace after maxval".into(),
            ))
        }
    }
    let expected = width as usize * height as usize;
    let body = &bytes[cur.pos..];
    if body.len() < expected {
        return Err(PgmError::Truncated {
            expected,
            actual: body.len(),
        });
    }
    let data = body[..expected].to_vec();
    if let Some(index) = data.iter().position(|&v| u32::from(v) > maxval) {
        return Err(PgmError::PixelAboveMaxval {
            index,
            value: data[index],
            maxval,
        });
    }
    Ok(GrayImage::new(width as usize, height as usize, data)?)
}

/// Canonical P5 encoding: `P5\n<w> <h>\n255\n` followed by the raster.
pub fn write_pgm(img: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(img.data());
    out
}

#[cfg(feature = "png")]
pub fn read_png(bytes: &[u8]) -> Result<GrayImage, PgmError> {
    let decoded = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| PgmError::Png(e.to_string()))?;
    let luma = decoded.to_luma8();
    let (w, h) = luma.dimensions();
    Ok(GrayImage::new(w as usize, h as usize, luma.into_raw())?)
}

#[cfg(feature = "png")]
pub fn write_png(img: &GrayImage) -> Result<Vec<u8>, PgmError> {
    let buf = image::GrayImage::from_raw(img.width() as u32, img.height() as u32, img.data().to_vec())
        .ok_or_else(|| PgmError::Png("buffer size mismatch".into()))?;
    let mut out = std::io::Cursor::new(Vec::new());
    buf.write_to(&mut out, image::ImageFormat::Png)
        .map_err(|e| PgmError::Png(e.to_string()))?;
    Ok(out.into_inner())
}

/// Decodes PGM, or PNG when the feature is enabled and the bytes carry a PNG
/// signature.
pub fn read_gray(bytes: &[u8]) -> Result<GrayImage, PgmError> {
    #[cfg(feature = "png")]
    if bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
        return read_png(bytes);
    }
    read_pgm(bytes)
}
