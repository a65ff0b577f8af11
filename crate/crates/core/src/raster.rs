//! H×W×C float grids and their on-disk formats.
//!
//! Dump format: `b"RAST"`, then little-endian u32 height, width, channels,
//! then H·W·C little-endian f32 values in row-major (y, x, c) order.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const RASTER_MAGIC: &[u8; 4] = b"RAST";

#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub data: Vec<f32>,
}

impl Raster {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != height * width * channels {
            return Err(Error::invalid(format!(
                "raster data length {} does not match {height}x{width}x{channels}",
                data.len()
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("raster values must be finite"));
        }
        Ok(Raster {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn zeros(height: usize, width: usize, channels: usize) -> Self {
        Raster {
            height,
            width,
            channels,
            data: vec![0.0; height * width * channels],
        }
    }

    pub fn filled(height: usize, width: usize, channels: usize, value: f32) -> Self {
        Raster {
            height,
            width,
            channels,
            data: vec![value; height * width * channels],
        }
    }

    pub fn from_fn(
        height: usize,
        width: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f32,
    ) -> Self {
        let mut data = Vec::with_capacity(height * width * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(f(y, x, c));
                }
            }
        }
        Raster {
            height,
            width,
            channels,
            data,
        }
    }

    #[inline]
    pub fn index(&self, y: usize, x: usize, c: usize) -> usize {
        (y * self.width + x) * self.channels + c
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize, c: usize) -> f32 {
        self.data[self.index(y, x, c)]
    }

    pub fn same_shape(&self, other: &Raster) -> bool {
        self.height == other.height && self.width == other.width && self.channels == other.channels
    }

    pub fn row_len(&self) -> usize {
        self.width * self.channels
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 4 * self.data.len());
        out.extend_from_slice(RASTER_MAGIC);
        for dim in [self.height, self.width, self.channels] {
            out.extend_from_slice(&(dim as u32).to_le_bytes());
        }
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cursor = bytes;
        let mut magic = [0u8; 4];
        read_exact(&mut cursor, &mut magic)?;
        if &magic != RASTER_MAGIC {
            return Err(Error::invalid("missing RAST magic"));
        }
        let h = read_u32(&mut cursor)? as usize;
        let w = read_u32(&mut cursor)? as usize;
        let c = read_u32(&mut cursor)? as usize;
        let data = read_f32_payload(cursor, h * w * c)?;
        Raster::new(h, w, c, data)
    }

    pub fn read_dump(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    pub fn write_dump(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    /// Loads an 8-bit PNG as a 3-channel raster in [0, 1].
    pub fn read_png(path: &Path) -> Result<Self> {
        let img = image::open(path)
            .map_err(|source| Error::Image {
                path: path.to_path_buf(),
                source,
            })?
            .to_rgb8();
        let (w, h) = img.dimensions();
        let data = img.into_raw().into_iter().map(|q| q as f32 / 255.0).collect();
        Raster::new(h as usize, w as usize, 3, data)
    }

    /// Writes 3-channel rasters as RGB and 1-channel rasters as grayscale.
    pub fn write_png(&self, path: &Path) -> Result<()> {
        let bytes: Vec<u8> = self.data.iter().map(|&v| quantize_u8(v)).collect();
        let color = match self.channels {
            1 => image::ExtendedColorType::L8,
            3 => image::ExtendedColorType::Rgb8,
            c => return Err(Error::invalid(format!("png output needs 1 or 3 channels, got {c}"))),
        };
        image::save_buffer(path, &bytes, self.width as u32, self.height as u32, color).map_err(
            |source| Error::Image {
                path: path.to_path_buf(),
                source,
            },
        )
    }

    /// Reads either a RAST dump or a PNG, chosen by magic bytes.
    pub fn read_any(path: &Path) -> Result<Self> {
        let mut head = [0u8; 4];
        let mut f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let n = f.read(&mut head).map_err(|e| Error::io(path, e))?;
        if n == 4 && &head == RASTER_MAGIC {
            Self::read_dump(path)
        } else {
            Self::read_png(path)
        }
    }

    /// Writes a PNG for `.png` paths and a RAST dump otherwise.
    pub fn write_any(&self, path: &Path) -> Result<()> {
        let is_png = path
            .extension()
            .map(|e| e.eq_ignore_ascii_case("png"))
            .unwrap_or(false);
        if is_png {
            self.write_png(path)
        } else {
            self.write_dump(path)
        }
    }
}

/// Linear [0, 1] → [0, 255] with round-half-up and clamping.
pub fn quantize_u8(v: f32) -> u8 {
    (v as f64 * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
}

fn read_exact(cursor: &mut &[u8], buf: &mut [u8]) -> Result<()> {
    cursor
        .read_exact(buf)
        .map_err(|_| Error::invalid("truncated tensor dump"))
}

pub(crate) fn read_u32(cursor: &mut &[u8]) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(cursor, &mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub(crate) fn read_f32_payload(cursor: &[u8], len: usize) -> Result<Vec<f32>> {
    if cursor.len() != len * 4 {
        return Err(Error::invalid(format!(
            "payload has {} bytes, expected {}",
            cursor.len(),
            len * 4
        )));
    }
    Ok(cursor
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect())
}
