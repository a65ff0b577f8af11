//! Pinhole intrinsics, rigid poses and their algebra.
//!
//! Pixel convention: origin at the top-left pixel center, x to the right,
//! y downward, pixel centers at integer coordinates.
//!
//! Camera poses stored in trajectories are camera-to-world transforms:
//! `X_world = r * X_cam + t`. The motion used by the reprojection formulas
//! (`X_target = R * X_source + t`) is obtained with [`PoseSE3::motion_to`].

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Tolerance used for rotation checks on in-memory poses.
pub const ROTATION_TOL: f64 = 1e-9;

/// Default sensor width (full-frame) for millimeter to pixel conversion.
pub const DEFAULT_SENSOR_WIDTH_MM: f64 = 36.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl Intrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: u32, height: u32) -> Result<Self> {
        if !(fx > 0.0 && fx.is_finite() && fy > 0.0 && fy.is_finite()) {
            return Err(Error::invalid(format!(
                "focal lengths must be positive and finite, got fx={fx} fy={fy}"
            )));
        }
        if !(cx.is_finite() && cy.is_finite()) {
            return Err(Error::invalid("principal point must be finite"));
        }
        if width == 0 || height == 0 {
            return Err(Error::invalid("image dimensions must be at least 1"));
        }
        Ok(Intrinsics {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        })
    }

    /// Square-pixel intrinsics with the principal point at the image center.
    pub fn centered(focal_px: f64, width: u32, height: u32) -> Result<Self> {
        Self::new(
            focal_px,
            focal_px,
            (width as f64 - 1.0) / 2.0,
            (height as f64 - 1.0) / 2.0,
            width,
            height,
        )
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(self.fx, 0.0, self.cx, 0.0, self.fy, self.cy, 0.0, 0.0, 1.0)
    }

    /// Closed-form inverse of [`Intrinsics::matrix`].
    pub fn inverse_matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            1.0 / self.fx,
            0.0,
            -self.cx / self.fx,
            0.0,
            1.0 / self.fy,
            -self.cy / self.fy,
            0.0,
            0.0,
            1.0,
        )
    }

    /// Inverse of [`Intrinsics::matrix`]; rejects matrices with skew or a
    /// non-canonical last row.
    pub fn from_matrix(k: &Matrix3<f64>, width: u32, height: u32) -> Result<Self> {
        if k[(0, 1)] != 0.0 || k[(1, 0)] != 0.0 || k.row(2) != nalgebra::RowVector3::new(0.0, 0.0, 1.0)
        {
            return Err(Error::invalid("not a pinhole calibration matrix"));
        }
        Self::new(k[(0, 0)], k[(1, 1)], k[(0, 2)], k[(1, 2)], width, height)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FocalSpec {
    pub focal_mm: f64,
    pub sensor_width_mm: f64,
}

impl FocalSpec {
    pub fn new(focal_mm: f64, sensor_width_mm: f64) -> Result<Self> {
        if !(focal_mm > 0.0 && focal_mm.is_finite() && sensor_width_mm > 0.0 && sensor_width_mm.is_finite())
        {
            return Err(Error::invalid(format!(
                "focal ({focal_mm} mm) and sensor width ({sensor_width_mm} mm) must be positive"
            )));
        }
        Ok(FocalSpec {
            focal_mm,
            sensor_width_mm,
        })
    }

    pub fn full_frame(focal_mm: f64) -> Result<Self> {
        Self::new(focal_mm, DEFAULT_SENSOR_WIDTH_MM)
    }
}

/// Horizontal focal length in pixels; square pixels give `fy == fx`.
pub fn focal_mm_to_px(f: FocalSpec, image_width_px: u32) -> f64 {
    f.focal_mm / f.sensor_width_mm * image_width_px as f64
}

/// Rigid transform stored as a raw rotation matrix plus translation (meters).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoseSE3 {
    pub r: Matrix3<f64>,
    pub t: Vector3<f64>,
}

impl PoseSE3 {
    pub fn identity() -> Self {
        PoseSE3 {
            r: Matrix3::identity(),
            t: Vector3::zeros(),
        }
    }

    pub fn new(r: Matrix3<f64>, t: Vector3<f64>) -> Result<Self> {
        Self::with_tolerance(r, t, ROTATION_TOL)
    }

    pub fn with_tolerance(r: Matrix3<f64>, t: Vector3<f64>, tol: f64) -> Result<Self> {
        if !validate_rotation(&r, tol) {
            return Err(Error::invalid(format!("matrix is not a rotation within {tol:e}")));
        }
        if !t.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("translation must be finite"));
        }
        Ok(PoseSE3 { r, t })
    }

    /// Builds a pose without checking the rotation. Callers own the invariant.
    pub fn from_parts_unchecked(r: Matrix3<f64>, t: Vector3<f64>) -> Self {
        PoseSE3 { r, t }
    }

    pub fn from_translation(t: Vector3<f64>) -> Self {
        PoseSE3 {
            r: Matrix3::identity(),
            t,
        }
    }

    pub fn compose(&self, other: &PoseSE3) -> PoseSE3 {
        compose(self, other)
    }

    pub fn inverse(&self) -> PoseSE3 {
        invert(self)
    }

    pub fn transform_point(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.r * x + self.t
    }

    /// Motion taking points from this camera's frame into `target`'s frame,
    /// both poses being camera-to-world.
    pub fn motion_to(&self, target: &PoseSE3) -> PoseSE3 {
        compose(&invert(target), self)
    }

    /// Row-major rotation entries.
    pub fn r_row_major(&self) -> [f64; 9] {
        let r = &self.r;
        [
            r[(0, 0)],
            r[(0, 1)],
            r[(0, 2)],
            r[(1, 0)],
            r[(1, 1)],
            r[(1, 2)],
            r[(2, 0)],
            r[(2, 1)],
            r[(2, 2)],
        ]
    }

    pub fn max_abs_diff(&self, other: &PoseSE3) -> f64 {
        let dr = (self.r - other.r).abs().max();
        let dt = (self.t - other.t).abs().max();
        dr.max(dt)
    }
}

/// Plane `{X : n . X + d = 0}` expressed in the source camera frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane {
    pub n: Vector3<f64>,
    pub d: f64,
}

impl Plane {
    /// Normalizes `normal` (rescaling `d` accordingly is not done: `d` is the
    /// distance for the unit normal).
    pub fn new(normal: Vector3<f64>, d: f64) -> Result<Self> {
        let norm = normal.norm();
        if !(norm > 0.0 && norm.is_finite()) || !d.is_finite() {
            return Err(Error::invalid("plane normal must be non-zero and finite"));
        }
        Ok(Plane {
            n: normal / norm,
            d,
        })
    }
}

pub fn intrinsics_matrix(k: &Intrinsics) -> Matrix3<f64> {
    k.matrix()
}

pub fn compose(a: &PoseSE3, b: &PoseSE3) -> PoseSE3 {
    PoseSE3 {
        r: a.r * b.r,
        t: a.r * b.t + a.t,
    }
}

pub fn invert(p: &PoseSE3) -> PoseSE3 {
    let rt = p.r.transpose();
    PoseSE3 { r: rt, t: -(rt * p.t) }
}

/// Pose of `p` expressed in the frame of `reference`.
pub fn relative(reference: &PoseSE3, p: &PoseSE3) -> PoseSE3 {
    compose(&invert(reference), p)
}

pub fn validate_rotation(m: &Matrix3<f64>, tol: f64) -> bool {
    if !m.iter().all(|v| v.is_finite()) {
        return false;
    }
    let ortho = (m.transpose() * m - Matrix3::identity()).norm();
    ortho <= tol && (m.determinant() - 1.0).abs() <= tol
}

/// Nearest rotation in the Frobenius sense.
pub fn project_to_rotation(m: &Matrix3<f64>) -> Option<Matrix3<f64>> {
    let svd = m.svd(true, true);
    let u = svd.u?;
    let v_t = svd.v_t?;
    let mut d = Matrix3::identity();
    if (u * v_t).determinant() < 0.0 {
        d[(2, 2)] = -1.0;
    }
    Some(u * d * v_t)
}

pub fn rot_x(angle_rad: f64) -> Matrix3<f64> {
    let (s, c) = angle_rad.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub fn rot_y(angle_rad: f64) -> Matrix3<f64> {
    let (s, c) = angle_rad.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

pub fn rot_z(angle_rad: f64) -> Matrix3<f64> {
    let (s, c) = angle_rad.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Rodrigues rotation about `axis` (need not be unit length).
pub fn rot_axis_angle(axis: &Vector3<f64>, angle_rad: f64) -> Matrix3<f64> {
    let a = axis.normalize();
    let k = Matrix3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0);
    let (s, c) = angle_rad.sin_cos();
    Matrix3::identity() + k * s + k * k * (1.0 - c)
}
