//! Infinite and plane-induced homographies, the reprojection decomposition
//! `x' = H_inf x + K_t t / Z`, and the epipolar parallax segment.
//!
//! `R` and `t` always denote the motion from the source camera frame into the
//! target camera frame: `X_t = R X_s + t`.

use nalgebra::{Matrix3, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::geometry::{validate_rotation, Intrinsics, Plane, ROTATION_TOL};

/// Smallest |w| for which a homogeneous point is treated as finite.
pub const DEHOM_EPS: f64 = 1e-12;

/// Default pixel tolerance for segment membership.
pub const SEGMENT_TOL_PX: f64 = 1e-6;

/// Homogeneous image point. Never normalized implicitly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HPoint2(pub Vector3<f64>);

impl HPoint2 {
    pub fn new(v: Vector3<f64>) -> Result<Self> {
        if v == Vector3::zeros() || !v.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid("homogeneous point must be non-zero and finite"));
        }
        Ok(HPoint2(v))
    }

    pub fn from_pixel(x: f64, y: f64) -> Self {
        HPoint2(Vector3::new(x, y, 1.0))
    }

    pub fn dehom(&self) -> Result<Vector2<f64>> {
        let w = self.0.z;
        if w.abs() <= DEHOM_EPS {
            return Err(Error::PointAtInfinity);
        }
        Ok(Vector2::new(self.0.x / w, self.0.y / w))
    }

    /// Last homogeneous coordinate (depth-like; its sign encodes cheirality).
    pub fn w(&self) -> f64 {
        self.0.z
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DepthValue(pub f64);

/// Epipole `e'`, vanishing point `x_inf` and the epipolar line through both.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpipolarGeom {
    pub epipole: HPoint2,
    pub at_infinity: HPoint2,
    pub line: Vector3<f64>,
}

fn check_rotation(r: &Matrix3<f64>) -> Result<()> {
    if validate_rotation(r, ROTATION_TOL) {
        Ok(())
    } else {
        Err(Error::invalid("R is not a rotation matrix"))
    }
}

/// `H_inf = K_t R K_s^-1`, returned without projective normalization.
pub fn infinite_homography(ks: &Intrinsics, kt: &Intrinsics, r: &Matrix3<f64>) -> Result<Matrix3<f64>> {
    check_rotation(r)?;
    Ok(kt.matrix() * r * ks.inverse_matrix())
}

/// `H = K_t (R - t n^T / d) K_s^-1` for the plane `n . X + d = 0` in the
/// source frame.
pub fn plane_homography(
    ks: &Intrinsics,
    kt: &Intrinsics,
    r: &Matrix3<f64>,
    t: &Vector3<f64>,
    plane: &Plane,
) -> Result<Matrix3<f64>> {
    check_rotation(r)?;
    if plane.d == 0.0 {
        return Err(Error::invalid("plane distance must be non-zero"));
    }
    let inner = r - t * plane.n.transpose() / plane.d;
    Ok(kt.matrix() * inner * ks.inverse_matrix())
}

/// Reprojects source pixel `x` at depth `z` into the target view as the sum
/// of the infinite-homography image and the parallax term.
pub fn reproject(
    ks: &Intrinsics,
    kt: &Intrinsics,
    r: &Matrix3<f64>,
    t: &Vector3<f64>,
    x: &HPoint2,
    z: DepthValue,
) -> Result<HPoint2> {
    if !(z.0 > 0.0) || !z.0.is_finite() {
        return Err(Error::invalid(format!("depth must be positive, got {}", z.0)));
    }
    if x.0.z != 1.0 {
        return Err(Error::invalid("source point must have unit last coordinate"));
    }
    let h = infinite_homography(ks, kt, r)?;
    Ok(HPoint2(h * x.0 + kt.matrix() * t / z.0))
}

pub fn epipolar_geometry(
    ks: &Intrinsics,
    kt: &Intrinsics,
    r: &Matrix3<f64>,
    t: &Vector3<f64>,
    x: &HPoint2,
) -> Result<EpipolarGeom> {
    if t.norm() == 0.0 {
        return Err(Error::invalid("epipole is undefined for a pure rotation (t = 0)"));
    }
    if x.0.z != 1.0 {
        return Err(Error::invalid("source point must have unit last coordinate"));
    }
    let h = infinite_homography(ks, kt, r)?;
    let epipole = kt.matrix() * t;
    let at_infinity = h * x.0;
    let line = epipole.cross(&at_infinity);
    let scale = epipole.norm() * at_infinity.norm();
    if line.norm() <= 1e-14 * scale {
        return Err(Error::invalid(
            "source point is collinear with the epipole; epipolar line is degenerate",
        ));
    }
    Ok(EpipolarGeom {
        epipole: HPoint2(epipole),
        at_infinity: HPoint2(at_infinity),
        line,
    })
}

/// Position of `xp` along the segment, measured from `x_inf` (0) towards the
/// epipole (1), together with its perpendicular offset in pixels.
pub fn segment_coordinates(xp: &HPoint2, g: &EpipolarGeom) -> Result<(f64, f64)> {
    let p = xp.dehom()?;
    let a = g.at_infinity.dehom()?;
    let e = g.epipole.dehom()?;
    let dir = e - a;
    let len = dir.norm();
    let rel = p - a;
    if len == 0.0 {
        return Ok((0.0, rel.norm()));
    }
    let along = rel.dot(&dir) / (len * len);
    let perp = (rel.x * dir.y - rel.y * dir.x).abs() / len;
    Ok((along, perp))
}

/// Whether `xp` lies on the closed segment between `x_inf` and `e'`, with
/// `tol` pixels of slack both across and along the segment.
pub fn on_parallax_segment(xp: &HPoint2, g: &EpipolarGeom, tol: f64) -> Result<bool> {
    let p = xp.dehom()?;
    let a = g.at_infinity.dehom()?;
    let e = g.epipole.dehom()?;
    let dir = e - a;
    let len = dir.norm();
    if len == 0.0 {
        return Ok((p - a).norm() <= tol);
    }
    let rel = p - a;
    let along_px = rel.dot(&dir) / len;
    let perp_px = (rel.x * dir.y - rel.y * dir.x).abs() / len;
    Ok(perp_px <= tol && along_px >= -tol && along_px <= len + tol)
}

/// `det[a | b | c]` with every column scaled to unit length.
pub fn normalized_collinearity(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
    Matrix3::from_columns(&[a.normalize(), b.normalize(), c.normalize()])
        .determinant()
        .abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rot_z;

    fn unit_k() -> Intrinsics {
        Intrinsics::new(1.0, 1.0, 0.0, 0.0, 1, 1).unwrap()
    }

    #[test]
    fn infinite_homography_examples() {
        let i = Matrix3::identity();
        assert_eq!(infinite_homography(&unit_k(), &unit_k(), &i).unwrap(), i);
        let zoom = Intrinsics::new(2.0, 2.0, 0.0, 0.0, 1, 1).unwrap();
        assert_eq!(
            infinite_homography(&unit_k(), &zoom, &i).unwrap(),
            Matrix3::from_diagonal(&Vector3::new(2.0, 2.0, 1.0))
        );
        let bad = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert!(infinite_homography(&unit_k(), &unit_k(), &bad).is_err());
    }

    #[test]
    fn plane_homography_examples() {
        let k = unit_k();
        let i = Matrix3::identity();
        let plane = Plane::new(Vector3::new(0.0, 0.0, 1.0), 2.0).unwrap();
        let h = plane_homography(&k, &k, &i, &Vector3::new(0.0, 0.0, 1.0), &plane).unwrap();
        assert_eq!(h, Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 0.5)));

        let ks = Intrinsics::new(300.0, 310.0, 160.0, 120.0, 320, 240).unwrap();
        let kt = Intrinsics::new(500.0, 505.0, 200.0, 100.0, 400, 200).unwrap();
        let r = rot_z(0.3);
        assert_eq!(
            plane_homography(&ks, &kt, &r, &Vector3::zeros(), &plane).unwrap(),
            infinite_homography(&ks, &kt, &r).unwrap()
        );
        let zero = Plane { n: plane.n, d: 0.0 };
        assert!(plane_homography(&ks, &kt, &r, &Vector3::x(), &zero).is_err());
    }

    #[test]
    fn reproject_without_translation_ignores_depth() {
        let ks = Intrinsics::new(300.0, 300.0, 160.0, 120.0, 320, 240).unwrap();
        let r = rot_z(0.1);
        let x = HPoint2::from_pixel(10.0, 20.0);
        let h = infinite_homography(&ks, &ks, &r).unwrap();
        let expect = HPoint2(h * x.0).dehom().unwrap();
        for z in [0.1, 1.0, 50.0] {
            let got = reproject(&ks, &ks, &r, &Vector3::zeros(), &x, DepthValue(z))
                .unwrap()
                .dehom()
                .unwrap();
            assert_eq!(got, expect);
        }
        let far = reproject(&ks, &ks, &r, &Vector3::new(0.3, 0.1, 0.2), &x, DepthValue(1e12))
            .unwrap()
            .dehom()
            .unwrap();
        assert!((far - expect).norm() < 1e-9);
    }

    #[test]
    fn reproject_rejects_bad_depth() {
        let k = unit_k();
        let x = HPoint2::from_pixel(0.0, 0.0);
        let i = Matrix3::identity();
        assert!(reproject(&k, &k, &i, &Vector3::x(), &x, DepthValue(0.0)).is_err());
        assert!(reproject(&k, &k, &i, &Vector3::x(), &x, DepthValue(-1.0)).is_err());
    }

    #[test]
    fn epipolar_axis_aligned_case() {
        let k = unit_k();
        let g = epipolar_geometry(&k, &k, &Matrix3::identity(), &Vector3::x(), &HPoint2::from_pixel(0.0, 0.0))
            .unwrap();
        assert_eq!(g.epipole.0, Vector3::new(1.0, 0.0, 0.0));
        assert_eq!(g.at_infinity.0, Vector3::new(0.0, 0.0, 1.0));
        assert_eq!(g.line, Vector3::new(0.0, -1.0, 0.0));
        assert_eq!(g.line.dot(&g.epipole.0), 0.0);
        assert_eq!(g.line.dot(&g.at_infinity.0), 0.0);
    }

    #[test]
    fn epipolar_errors() {
        let k = unit_k();
        let i = Matrix3::identity();
        assert!(epipolar_geometry(&k, &k, &i, &Vector3::zeros(), &HPoint2::from_pixel(0.0, 0.0)).is_err());
        // x coincides with the epipole direction: t along the optical axis, x at the principal point
        assert!(epipolar_geometry(&k, &k, &i, &Vector3::z(), &HPoint2::from_pixel(0.0, 0.0)).is_err());
    }

    #[test]
    fn segment_endpoints_and_outside() {
        let ks = Intrinsics::new(300.0, 300.0, 160.0, 120.0, 320, 240).unwrap();
        let t = Vector3::new(0.4, -0.1, 0.5);
        let g = epipolar_geometry(&ks, &ks, &rot_z(0.05), &t, &HPoint2::from_pixel(40.0, 60.0)).unwrap();
        assert!(on_parallax_segment(&g.at_infinity, &g, SEGMENT_TOL_PX).unwrap());
        assert!(on_parallax_segment(&g.epipole, &g, SEGMENT_TOL_PX).unwrap());
        let a = g.at_infinity.dehom().unwrap();
        let e = g.epipole.dehom().unwrap();
        let beyond = a + (a - e) * 0.1;
        assert!(!on_parallax_segment(&HPoint2::from_pixel(beyond.x, beyond.y), &g, SEGMENT_TOL_PX).unwrap());
        let off = (a + e) / 2.0 + Vector2::new(0.0, 1.0);
        assert!(!on_parallax_segment(&HPoint2::from_pixel(off.x, off.y), &g, SEGMENT_TOL_PX).unwrap());
        let inf = HPoint2(Vector3::new(1.0, 1.0, 0.0));
        assert!(matches!(on_parallax_segment(&inf, &g, 1e-6), Err(Error::PointAtInfinity)));
    }
}
