//! Binary PGM (P5) / PPM (P6) reading and writing.
//!
//! Images are 8-bit with maxval 255. In-memory pixel order is planar
//! `C x H x W` to match [`Tensor`]; PPM payloads are interleaved RGB on disk.

use std::path::Path;

use fampe_core::Tensor;

use crate::error::{CliError, CliResult};
use crate::fsutil;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawImage {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    /// Planar `C x H x W` bytes.
    pub pixels: Vec<u8>,
}

impl RawImage {
    /// Planar image from bytes; `channels` must be 1 (PGM) or 3 (PPM).
    pub fn new(channels: usize, height: usize, width: usize, pixels: Vec<u8>) -> CliResult<Self> {
        if channels != 1 && channels != 3 {
            return Err(CliError::format(format!(
                "images must have 1 or 3 channels, got {channels}"
            )));
        }
        if pixels.len() != channels * height * width {
            return Err(CliError::format(format!(
                "pixel payload has {} bytes, expected {}",
                pixels.len(),
                channels * height * width
            )));
        }
        Ok(RawImage { channels, height, width, pixels })
    }

    /// Values scaled to `[0, 1]`.
    pub fn to_tensor(&self) -> Tensor {
        let data = self.pixels.iter().map(|&b| f64::from(b) / 255.0).collect();
        Tensor::from_vec(&[self.channels, self.height, self.width], data)
            .expect("RawImage dimensions are validated on construction")
    }

    /// Quantize a `C x H x W` tensor of unit-range values; out-of-range
    /// values clamp.
    pub fn from_tensor(t: &Tensor) -> CliResult<Self> {
        let shape = t.shape();
        if shape.len() != 3 {
            return Err(CliError::format(format!("expected a C x H x W tensor, got {shape:?}")));
        }
        let pixels = t
            .data()
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect();
        RawImage::new(shape[0], shape[1], shape[2], pixels)
    }

    /// Serialize as binary PGM (1 channel) or PPM (3 channels).
    pub fn encode(&self) -> Vec<u8> {
        let magic = if self.channels == 1 { "P5" } else { "P6" };
        let mut out = format!("{magic}\n{} {}\n255\n", self.width, self.height).into_bytes();
        if self.channels == 1 {
            out.extend_from_slice(&self.pixels);
        } else {
            let plane = self.height * self.width;
            for p in 0..plane {
                for c in 0..3 {
                    out.push(self.pixels[c * plane + p]);
                }
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> CliResult<Self> {
        let mut cursor = Cursor { bytes, pos: 0 };
        let magic = cursor.token()?;
        let channels = match magic.as_str() {
            "P5" => 1,
            "P6" => 3,
            other => {
                return Err(CliError::format(format!(
                    "unsupported image magic {other:?} (expected P5 or P6)"
                )))
            }
        };
        let width = cursor.number()?;
        let height = cursor.number()?;
        let maxval = cursor.number()?;
        if maxval != 255 {
            return Err(CliError::format(format!("only maxval 255 is supported, got {maxval}")));
        }
        cursor.single_whitespace()?;
        let need = channels * height * width;
        let payload = &bytes[cursor.pos..];
        if payload.len() < need {
            return Err(CliError::format(format!(
                "truncated image payload: expected {need} bytes, got {}",
                payload.len()
            )));
        }
        let pixels = if channels == 1 {
            payload[..need].to_vec()
        } else {
            // de-interleave RGB into planes
            let plane = height * width;
            let mut planar = vec![0u8; need];
            for p in 0..plane {
                for c in 0..3 {
                    planar[c * plane + p] = payload[p * 3 + c];
                }
            }
            planar
        };
        RawImage::new(channels, height, width, pixels)
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        fsutil::write_atomic(path, &self.encode())
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        RawImage::decode(&fsutil::read_file(path)?)
            .map_err(|e| CliError::format(format!("{}: {}", path.display(), e.message)))
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    /// Skip whitespace and `#` comments, then read one token.
    fn token(&mut self) -> CliResult<String> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(CliError::format("truncated image header"));
        }
        String::from_utf8(self.bytes[start..self.pos].to_vec())
            .map_err(|_| CliError::format("non-ASCII image header"))
    }

    fn number(&mut self) -> CliResult<usize> {
        let tok = self.token()?;
        tok.parse()
            .map_err(|_| CliError::format(format!("expected a number in image header, got {tok:?}")))
    }

    /// Exactly one whitespace byte separates the header from the payload.
    fn single_whitespace(&mut self) -> CliResult<()> {
        if self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
            Ok(())
        } else {
            Err(CliError::format("missing separator before image payload"))
        }
    }
}
