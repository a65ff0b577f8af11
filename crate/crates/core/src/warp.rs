//! Homography warping by inverse mapping with bilinear sampling, plus the
//! resize and center-crop kernels used by intrinsic augmentation.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::homography::DEHOM_EPS;
use crate::raster::Raster;

#[derive(Clone, Debug, PartialEq)]
pub struct WarpResult {
    pub raster: Raster,
    /// Row-major validity, one entry per output pixel.
    pub mask: Vec<bool>,
}

impl WarpResult {
    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn mask_raster(&self) -> Raster {
        let data = self.mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
        Raster {
            height: self.raster.height,
            width: self.raster.width,
            channels: 1,
            data,
        }
    }
}

/// Bilinear taps along one axis. A tap with zero weight is not taken, so
/// samples landing exactly on grid nodes read a single pixel.
#[inline]
fn axis_taps(s: f64, len: usize) -> Option<(usize, usize, f64)> {
    if !s.is_finite() {
        return None;
    }
    let s0 = s.floor();
    let frac = s - s0;
    if s0 < 0.0 || s0 > (len - 1) as f64 {
        return None;
    }
    let i0 = s0 as usize;
    if frac == 0.0 {
        return Some((i0, i0, 0.0));
    }
    if i0 + 1 > len - 1 {
        return None;
    }
    Some((i0, i0 + 1, frac))
}

/// Samples `src` at continuous `(sx, sy)` into `out`; returns false (and
/// leaves `out` untouched) when any weighted tap is outside the grid.
#[inline]
pub fn sample_bilinear(src: &Raster, sx: f64, sy: f64, out: &mut [f32]) -> bool {
    let (Some((x0, x1, fx)), Some((y0, y1, fy))) = (axis_taps(sx, src.width), axis_taps(sy, src.height))
    else {
        return false;
    };
    let c = src.channels;
    let row0 = y0 * src.width;
    let row1 = y1 * src.width;
    for (ch, o) in out.iter_mut().enumerate().take(c) {
        let p00 = src.data[(row0 + x0) * c + ch] as f64;
        let v = if fx == 0.0 && fy == 0.0 {
            p00
        } else {
            let p01 = src.data[(row0 + x1) * c + ch] as f64;
            let p10 = src.data[(row1 + x0) * c + ch] as f64;
            let p11 = src.data[(row1 + x1) * c + ch] as f64;
            let top = p00 * (1.0 - fx) + p01 * fx;
            let bottom = p10 * (1.0 - fx) + p11 * fx;
            top * (1.0 - fy) + bottom * fy
        };
        *o = v as f32;
    }
    true
}

/// Warps `src` by `h`, which maps source pixel coordinates to output pixel
/// coordinates. Output pixels whose preimage is behind the source camera
/// (wrong sign of the homogeneous coordinate) or off-grid are zero and
/// masked out.
pub fn warp_homography(src: &Raster, h: &Matrix3<f64>, out_height: usize, out_width: usize) -> Result<WarpResult> {
    warp_homography_with(src, h, out_height, out_width, Exec::default())
}

pub fn warp_homography_with(
    src: &Raster,
    h: &Matrix3<f64>,
    out_height: usize,
    out_width: usize,
    exec: Exec,
) -> Result<WarpResult> {
    let det = h.determinant();
    if !(det.abs() > 1e-12) {
        return Err(Error::invalid(format!("homography is singular (det = {det:e})")));
    }
    let h_inv = h
        .try_inverse()
        .ok_or_else(|| Error::invalid("homography is not invertible"))?;
    let orientation = det.signum();
    let c = src.channels;
    let mut data = vec![0.0f32; out_height * out_width * c];
    let mut mask = vec![false; out_height * out_width];

    // Rows carry their pixels and mask bits together so the parallel split stays disjoint.
    let mut rows: Vec<(&mut [f32], &mut [bool])> = data
        .chunks_mut(out_width * c)
        .zip(mask.chunks_mut(out_width))
        .collect();
    let fill = |y: usize, row: &mut (&mut [f32], &mut [bool])| {
        let (pixels, valid) = row;
        for x in 0..out_width {
            let p = h_inv * Vector3::new(x as f64, y as f64, 1.0);
            if p.z * orientation <= DEHOM_EPS {
                continue;
            }
            let (sx, sy) = (p.x / p.z, p.y / p.z);
            valid[x] = sample_bilinear(src, sx, sy, &mut pixels[x * c..(x + 1) * c]);
        }
    };
    exec.rows_mut(&mut rows, 1, |y, row| fill(y, &mut row[0]));
    drop(rows);

    Ok(WarpResult {
        raster: Raster {
            height: out_height,
            width: out_width,
            channels: c,
            data,
        },
        mask,
    })
}

/// Output dimension for scaling `dim` by `ratio`: round half to even, at least 1.
pub fn scaled_dim(dim: usize, ratio: f64) -> usize {
    ((dim as f64 * ratio).round_ties_even() as usize).max(1)
}

#[inline]
fn corner_aligned(u: usize, old: usize, new: usize) -> f64 {
    if new == 1 {
        (old - 1) as f64 / 2.0
    } else {
        (u * (old - 1)) as f64 / (new - 1) as f64
    }
}

/// Bilinear resize with corner-aligned pixel centers: output pixel `u` samples
/// source coordinate `u * (old - 1) / (new - 1)` on each axis.
pub fn resize_bilinear(src: &Raster, new_height: usize, new_width: usize) -> Result<Raster> {
    resize_bilinear_with(src, new_height, new_width, Exec::default())
}

pub fn resize_bilinear_with(src: &Raster, new_height: usize, new_width: usize, exec: Exec) -> Result<Raster> {
    if new_height == 0 || new_width == 0 {
        return Err(Error::invalid("resize target must be at least 1x1"));
    }
    if src.height == 0 || src.width == 0 {
        return Err(Error::invalid("cannot resize an empty raster"));
    }
    let c = src.channels;
    let xs: Vec<f64> = (0..new_width)
        .map(|u| corner_aligned(u, src.width, new_width))
        .collect();
    let mut data = vec![0.0f32; new_height * new_width * c];
    exec.rows_mut(&mut data, new_width * c, |v, row| {
        let sy = corner_aligned(v, src.height, new_height);
        for (u, &sx) in xs.iter().enumerate() {
            let ok = sample_bilinear(src, sx, sy, &mut row[u * c..(u + 1) * c]);
            debug_assert!(ok, "corner-aligned samples stay on the grid");
        }
    });
    Ok(Raster {
        height: new_height,
        width: new_width,
        channels: c,
        data,
    })
}

/// Top-left offset `(y, x)` of a centered window.
pub fn crop_offsets(src_height: usize, src_width: usize, out_height: usize, out_width: usize) -> (usize, usize) {
    ((src_height - out_height) / 2, (src_width - out_width) / 2)
}

pub fn center_crop(src: &Raster, out_height: usize, out_width: usize) -> Result<Raster> {
    if out_height > src.height || out_width > src.width {
        return Err(Error::invalid(format!(
            "crop {out_height}x{out_width} exceeds source {}x{}",
            src.height, src.width
        )));
    }
    if out_height == 0 || out_width == 0 {
        return Err(Error::invalid("crop must be at least 1x1"));
    }
    let (oy, ox) = crop_offsets(src.height, src.width, out_height, out_width);
    let c = src.channels;
    let mut data = Vec::with_capacity(out_height * out_width * c);
    for y in 0..out_height {
        let start = src.index(oy + y, ox, 0);
        data.extend_from_slice(&src.data[start..start + out_width * c]);
    }
    Ok(Raster {
        height: out_height,
        width: out_width,
        channels: c,
        data,
    })
}

/// Learned residual applied to the warped latent before it is added back.
///
/// The trained layer is zero-initialized, so [`ZeroConv`] is the exact
/// stand-in at initialization: `out = z + C(warp(z))` reduces to `z`.
pub trait ResidualConv {
    fn apply(&self, warped: &Raster) -> Raster;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroConv;

impl ResidualConv for ZeroConv {
    fn apply(&self, warped: &Raster) -> Raster {
        Raster::zeros(warped.height, warped.width, warped.channels)
    }
}

pub fn composite_residual(z: &Raster, warped: &Raster, conv: &dyn ResidualConv) -> Result<Raster> {
    let residual = conv.apply(warped);
    if !residual.same_shape(z) {
        return Err(Error::invalid("residual shape does not match the latent"));
    }
    let data = z.data.iter().zip(&residual.data).map(|(a, b)| a + b).collect();
    Ok(Raster {
        data,
        ..z.clone()
    })
}
