//! Per-frame trajectory files.
//!
//! A trajectory file is a JSON array of records
//! `{frame, r: [9 row-major], t: [3], fx, fy, cx, cy, width, height}`.
//! serde_json formats floats with the shortest representation that parses
//! back to the same bits, so write → read is lossless.

use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{project_to_rotation, validate_rotation, Intrinsics, PoseSE3, ROTATION_TOL};

/// Rotation tolerance accepted from files; matrices inside it but outside
/// [`ROTATION_TOL`] are projected back onto SO(3).
pub const FILE_ROTATION_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub frame: u32,
    pub r: [f64; 9],
    pub t: [f64; 3],
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

/// Camera state at one frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CameraState {
    /// Timeline index the frame belongs to.
    pub frame: u32,
    pub pose: PoseSE3,
    pub intrinsics: Intrinsics,
}

impl CameraState {
    pub fn to_record(&self) -> TrajectoryRecord {
        let k = &self.intrinsics;
        TrajectoryRecord {
            frame: self.frame,
            r: self.pose.r_row_major(),
            t: [self.pose.t.x, self.pose.t.y, self.pose.t.z],
            fx: k.fx,
            fy: k.fy,
            cx: k.cx,
            cy: k.cy,
            width: k.width,
            height: k.height,
        }
    }

    pub fn from_record(rec: &TrajectoryRecord) -> Result<Self> {
        let mut r = Matrix3::from_row_slice(&rec.r);
        if !validate_rotation(&r, ROTATION_TOL) {
            if !validate_rotation(&r, FILE_ROTATION_TOL) {
                return Err(Error::invalid(format!(
                    "frame {}: rotation is not orthonormal within {FILE_ROTATION_TOL:e}",
                    rec.frame
                )));
            }
            r = project_to_rotation(&r)
                .ok_or_else(|| Error::invalid(format!("frame {}: rotation svd failed", rec.frame)))?;
        }
        let pose = PoseSE3::new(r, Vector3::from(rec.t))?;
        let intrinsics = Intrinsics::new(rec.fx, rec.fy, rec.cx, rec.cy, rec.width, rec.height)?;
        Ok(CameraState {
            frame: rec.frame,
            pose,
            intrinsics,
        })
    }
}

pub fn to_json(states: &[CameraState]) -> String {
    let records: Vec<TrajectoryRecord> = states.iter().map(CameraState::to_record).collect();
    serde_json::to_string_pretty(&records).expect("trajectory records always serialize")
}

pub fn from_json(text: &str) -> std::result::Result<Vec<CameraState>, TrajectoryParseError> {
    let records: Vec<TrajectoryRecord> =
        serde_json::from_str(text).map_err(TrajectoryParseError::Json)?;
    records
        .iter()
        .map(CameraState::from_record)
        .collect::<Result<_>>()
        .map_err(TrajectoryParseError::Invalid)
}

#[derive(Debug)]
pub enum TrajectoryParseError {
    Json(serde_json::Error),
    Invalid(Error),
}

pub fn read(path: &Path) -> Result<Vec<CameraState>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json(&text).map_err(|e| match e {
        TrajectoryParseError::Json(source) => Error::Json {
            path: path.to_path_buf(),
            source,
        },
        TrajectoryParseError::Invalid(e) => e,
    })
}

pub fn write(path: &Path, states: &[CameraState]) -> Result<()> {
    let mut text = to_json(states);
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
