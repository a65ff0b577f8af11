//! Latent-shape bookkeeping for the homography-guided attention layer.
//!
//! Latents are `(b, f, h, w, d)` row-major. For attention every (batch,
//! frame) pair becomes one item whose token axis is the spatial
//! concatenation `[source | target | warped]`, giving `(b·f, 3·h·w, d)`.

use crate::error::{Error, Result};
use crate::geometry::{validate_rotation, Intrinsics, PoseSE3};
use crate::raster::{read_f32_payload, read_u32};

pub const TENSOR5_MAGIC: &[u8; 4] = b"TEN5";

/// Temporal stride of the video autoencoder.
pub const TEMPORAL_STRIDE: usize = 4;
/// Spatial stride after autoencoder (8) and patchification (2).
pub const SPATIAL_STRIDE: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatentDims {
    pub b: usize,
    pub f: usize,
    pub h: usize,
    pub w: usize,
    pub d: usize,
}

impl LatentDims {
    pub fn new(b: usize, f: usize, h: usize, w: usize, d: usize) -> Result<Self> {
        if [b, f, h, w, d].contains(&0) {
            return Err(Error::invalid("latent dimensions must all be at least 1"));
        }
        Ok(LatentDims { b, f, h, w, d })
    }

    pub fn numel(&self) -> usize {
        self.b * self.f * self.h * self.w * self.d
    }

    pub fn tokens(&self) -> usize {
        self.h * self.w
    }
}

/// Latent grid for a clip of `frames` frames at `height_px × width_px`.
pub fn latent_dims(
    frames: usize,
    height_px: usize,
    width_px: usize,
    feature_dim: usize,
    batch: usize,
) -> Result<LatentDims> {
    if frames == 0 || (frames - 1) % TEMPORAL_STRIDE != 0 {
        return Err(Error::invalid(format!(
            "frame count {frames} must be 1 more than a multiple of {TEMPORAL_STRIDE}"
        )));
    }
    if height_px == 0 || width_px == 0 || height_px % SPATIAL_STRIDE != 0 || width_px % SPATIAL_STRIDE != 0 {
        return Err(Error::invalid(format!(
            "frame size {height_px}x{width_px} must be a positive multiple of {SPATIAL_STRIDE}"
        )));
    }
    LatentDims::new(
        batch,
        1 + (frames - 1) / TEMPORAL_STRIDE,
        height_px / SPATIAL_STRIDE,
        width_px / SPATIAL_STRIDE,
        feature_dim,
    )
}

/// Pre-encoder camera vector: `[R row-major (9), t (3), fx, fy, cx, cy]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CameraVec16(pub [f64; 16]);

impl CameraVec16 {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Returns `(fx, fy, cx, cy, pose)`.
    pub fn unpack(&self) -> Result<(f64, f64, f64, f64, PoseSE3)> {
        let v = &self.0;
        let r = nalgebra::Matrix3::from_row_slice(&v[..9]);
        if !validate_rotation(&r, 1e-6) {
            return Err(Error::invalid("camera vector rotation block is not a rotation"));
        }
        let t = nalgebra::Vector3::new(v[9], v[10], v[11]);
        Ok((v[12], v[13], v[14], v[15], PoseSE3::from_parts_unchecked(r, t)))
    }
}

pub fn camera_vec16(k: &Intrinsics, p: &PoseSE3) -> CameraVec16 {
    let mut v = [0.0; 16];
    v[..9].copy_from_slice(&p.r_row_major());
    v[9] = p.t.x;
    v[10] = p.t.y;
    v[11] = p.t.z;
    v[12] = k.fx;
    v[13] = k.fy;
    v[14] = k.cx;
    v[15] = k.cy;
    CameraVec16(v)
}

/// Source latents carry the source intrinsics with an identity pose.
pub fn source_camera_vec16(ks: &Intrinsics) -> CameraVec16 {
    camera_vec16(ks, &PoseSE3::identity())
}

/// Which intrinsics the warped latent's camera embedding carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WarpedEmbedding {
    #[default]
    TargetIntrinsics,
    SourceIntrinsics,
}

pub fn warped_camera_vec16(
    choice: WarpedEmbedding,
    ks: &Intrinsics,
    kt: &Intrinsics,
    target_pose: &PoseSE3,
) -> CameraVec16 {
    match choice {
        WarpedEmbedding::TargetIntrinsics => camera_vec16(kt, target_pose),
        WarpedEmbedding::SourceIntrinsics => camera_vec16(ks, target_pose),
    }
}

/// Row-major `(b, f, h, w, d)` tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor5 {
    pub dims: LatentDims,
    pub data: Vec<f32>,
}

impl Tensor5 {
    pub fn new(dims: LatentDims, data: Vec<f32>) -> Result<Self> {
        if data.len() != dims.numel() {
            return Err(Error::invalid(format!(
                "tensor data length {} does not match {:?}",
                data.len(),
                dims
            )));
        }
        Ok(Tensor5 { dims, data })
    }

    pub fn filled(dims: LatentDims, value: f32) -> Self {
        Tensor5 {
            dims,
            data: vec![value; dims.numel()],
        }
    }

    /// `(b, f·h·w, d)` view of the same buffer.
    pub fn token_shape(&self) -> [usize; 3] {
        [self.dims.b, self.dims.f * self.dims.tokens(), self.dims.d]
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(28 + 4 * self.data.len());
        out.extend_from_slice(TENSOR5_MAGIC);
        out.extend_from_slice(&5u32.to_le_bytes());
        let LatentDims { b, f, h, w, d } = self.dims;
        for dim in [b, f, h, w, d] {
            out.extend_from_slice(&(dim as u32).to_le_bytes());
        }
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 || &bytes[..4] != TENSOR5_MAGIC {
            return Err(Error::invalid("missing TEN5 magic"));
        }
        let mut cursor = &bytes[4..];
        let rank = read_u32(&mut cursor)?;
        if rank != 5 {
            return Err(Error::invalid(format!("expected rank 5, found {rank}")));
        }
        let mut dims = [0usize; 5];
        for d in dims.iter_mut() {
            *d = read_u32(&mut cursor)? as usize;
        }
        let dims = LatentDims::new(dims[0], dims[1], dims[2], dims[3], dims[4])?;
        let data = read_f32_payload(cursor, dims.numel())?;
        Tensor5::new(dims, data)
    }
}

/// Attention-ready tensor of shape `(b·f, 3·h·w, d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    pub shape: [usize; 3],
    pub data: Vec<f32>,
}

pub fn concat3(source: &Tensor5, target: &Tensor5, warped: &Tensor5) -> Result<Tensor3> {
    if source.dims != target.dims || source.dims != warped.dims {
        return Err(Error::invalid(format!(
            "latent dims differ: {:?} / {:?} / {:?}",
            source.dims, target.dims, warped.dims
        )));
    }
    let dims = source.dims;
    let item = dims.tokens() * dims.d;
    let items = dims.b * dims.f;
    let mut data = Vec::with_capacity(3 * dims.numel());
    for i in 0..items {
        let span = i * item..(i + 1) * item;
        data.extend_from_slice(&source.data[span.clone()]);
        data.extend_from_slice(&target.data[span.clone()]);
        data.extend_from_slice(&warped.data[span]);
    }
    Ok(Tensor3 {
        shape: [items, 3 * dims.tokens(), dims.d],
        data,
    })
}

/// Inverse of [`concat3`]; returns `(source, target, warped)`.
pub fn split3(zc: &Tensor3, dims: LatentDims) -> Result<(Tensor5, Tensor5, Tensor5)> {
    let expected = [dims.b * dims.f, 3 * dims.tokens(), dims.d];
    if zc.shape != expected || zc.data.len() != 3 * dims.numel() {
        return Err(Error::invalid(format!(
            "concatenated shape {:?} does not match {:?}",
            zc.shape, expected
        )));
    }
    let item = dims.tokens() * dims.d;
    let mut parts: [Vec<f32>; 3] = std::array::from_fn(|_| Vec::with_capacity(dims.numel()));
    for chunk in zc.data.chunks_exact(3 * item) {
        for (k, part) in parts.iter_mut().enumerate() {
            part.extend_from_slice(&chunk[k * item..(k + 1) * item]);
        }
    }
    let [s, t, w] = parts;
    Ok((
        Tensor5 { dims, data: s },
        Tensor5 { dims, data: t },
        Tensor5 { dims, data: w },
    ))
}

/// Rectified-flow training pair: `z_t = tt·z1 + (1−tt)·z0`, `v_t = z1 − z0`.
pub fn rf_interpolate(z0: &Tensor5, z1: &Tensor5, tt: f64) -> Result<(Tensor5, Tensor5)> {
    if z0.dims != z1.dims {
        return Err(Error::invalid("rectified-flow endpoints have different dims"));
    }
    if !(0.0..=1.0).contains(&tt) {
        return Err(Error::invalid(format!("interpolation time {tt} outside [0, 1]")));
    }
    let zt = z0
        .data
        .iter()
        .zip(&z1.data)
        .map(|(&a, &b)| (tt * b as f64 + (1.0 - tt) * a as f64) as f32)
        .collect();
    let vt = z0.data.iter().zip(&z1.data).map(|(&a, &b)| b - a).collect();
    Ok((
        Tensor5 { dims: z0.dims, data: zt },
        Tensor5 { dims: z0.dims, data: vt },
    ))
}
