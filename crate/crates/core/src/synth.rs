//! Synthetic multi-camera scenes and a direct-projection renderer.
//!
//! The renderer projects world points with `K [R|t] X` and shades a textured
//! plane by exact ray/plane intersection. It never goes through the
//! homography decomposition, so it can serve as an independent oracle for it.

use nalgebra::{Matrix3, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{rot_axis_angle, rot_x, rot_y, Intrinsics, Plane, PoseSE3};
use crate::raster::Raster;

/// Half-angle tangents of the frustum points are generated in.
pub const GEN_FRUSTUM_TAN: (f64, f64) = (0.55, 0.35);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScenePoint {
    pub position: Vector3<f64>,
    pub color: [f32; 3],
}

/// Plane `n . X + d = 0` in world coordinates, shaded with a smooth
/// (sinusoidal) checkerboard of period `2 * cell_m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TexturedPlane {
    pub plane: Plane,
    pub cell_m: f64,
    basis: (Vector3<f64>, Vector3<f64>),
}

impl TexturedPlane {
    pub fn new(plane: Plane, cell_m: f64) -> Result<Self> {
        if !(cell_m > 0.0) {
            return Err(Error::invalid("checker cell size must be positive"));
        }
        let n = plane.n;
        let helper = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let e1 = (helper - n * n.dot(&helper)).normalize();
        let e2 = n.cross(&e1);
        Ok(TexturedPlane {
            plane,
            cell_m,
            basis: (e1, e2),
        })
    }

    /// Fronto-parallel plane at `depth` meters in front of the identity camera.
    pub fn facing_camera(depth: f64, cell_m: f64) -> Result<Self> {
        Self::new(Plane::new(Vector3::new(0.0, 0.0, -1.0), depth)?, cell_m)
    }

    pub fn shade(&self, x: &Vector3<f64>) -> [f32; 3] {
        let origin = -self.plane.n * self.plane.d;
        let rel = x - origin;
        let a = rel.dot(&self.basis.0) / self.cell_m * std::f64::consts::PI;
        let b = rel.dot(&self.basis.1) / self.cell_m * std::f64::consts::PI;
        [
            (0.5 + 0.4 * a.sin() * b.sin()) as f32,
            (0.5 + 0.35 * ((a + b) / 1.7).sin()) as f32,
            (0.5 + 0.3 * ((a - b) / 2.3).cos()) as f32,
        ]
    }

    /// Distance along a world ray `origin + s * dir` to the plane, if ahead.
    pub fn intersect(&self, origin: &Vector3<f64>, dir: &Vector3<f64>) -> Option<f64> {
        let denom = self.plane.n.dot(dir);
        if denom.abs() < 1e-15 {
            return None;
        }
        let s = -(self.plane.n.dot(origin) + self.plane.d) / denom;
        (s > 0.0 && s.is_finite()).then_some(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthScene {
    pub points: Vec<ScenePoint>,
    pub plane: Option<TexturedPlane>,
    pub seed: u64,
}

impl SynthScene {
    pub fn plane_only(plane: TexturedPlane) -> Self {
        SynthScene {
            points: Vec::new(),
            plane: Some(plane),
            seed: 0,
        }
    }

    pub fn with_plane(mut self, plane: TexturedPlane) -> Self {
        self.plane = Some(plane);
        self
    }
}

/// Random colored points inside the identity camera's frustum with depths in
/// `[depth_min, depth_max]`.
pub fn gen_scene(seed: u64, n_points: usize, depth_min: f64, depth_max: f64) -> Result<SynthScene> {
    if n_points == 0 {
        return Err(Error::invalid("scene needs at least one point"));
    }
    if !(depth_min > 0.0 && depth_max > depth_min && depth_max.is_finite()) {
        return Err(Error::invalid(format!(
            "depth range [{depth_min}, {depth_max}] must satisfy 0 < min < max"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (tx, ty) = GEN_FRUSTUM_TAN;
    let points = (0..n_points)
        .map(|_| {
            let z = rng.gen_range(depth_min..=depth_max);
            let x = rng.gen_range(-tx..=tx) * z;
            let y = rng.gen_range(-ty..=ty) * z;
            let color = [rng.gen::<f32>(), rng.gen::<f32>(), rng.gen::<f32>()];
            ScenePoint {
                position: Vector3::new(x, y, z),
                color,
            }
        })
        .collect();
    Ok(SynthScene {
        points,
        plane: None,
        seed,
    })
}

/// Continuous pixel coordinates and depth of a world point, or `None` when
/// it is not in front of the camera.
pub fn project_point(k: &Intrinsics, pose: &PoseSE3, x: &Vector3<f64>) -> Option<(Vector2<f64>, f64)> {
    let cam = pose.r.transpose() * (x - pose.t);
    if cam.z <= 0.0 {
        return None;
    }
    let u = k.fx * cam.x / cam.z + k.cx;
    let v = k.fy * cam.y / cam.z + k.cy;
    Some((Vector2::new(u, v), cam.z))
}

/// Projected centers of every scene point (same math the splats use).
pub fn splat_centers(scene: &SynthScene, k: &Intrinsics, pose: &PoseSE3) -> Vec<Option<Vector2<f64>>> {
    scene
        .points
        .iter()
        .map(|p| project_point(k, pose, &p.position).map(|(uv, _)| uv))
        .collect()
}

/// Pixel hit by a splat: round half up on each axis.
pub fn splat_pixel(uv: &Vector2<f64>, k: &Intrinsics) -> Option<(usize, usize)> {
    let px = (uv.x + 0.5).floor();
    let py = (uv.y + 0.5).floor();
    if px < 0.0 || py < 0.0 || px >= k.width as f64 || py >= k.height as f64 {
        return None;
    }
    Some((py as usize, px as usize))
}

pub fn render(scene: &SynthScene, k: &Intrinsics, pose: &PoseSE3) -> Raster {
    render_with(scene, k, pose, Exec::default())
}

pub fn render_with(scene: &SynthScene, k: &Intrinsics, pose: &PoseSE3, exec: Exec) -> Raster {
    let (h, w) = (k.height as usize, k.width as usize);
    let mut data = vec![0.0f32; h * w * 3];
    let mut depth = vec![f64::INFINITY; h * w];

    if let Some(plane) = &scene.plane {
        let k_inv = k.inverse_matrix();
        let origin = pose.t;
        let mut rows: Vec<(&mut [f32], &mut [f64])> =
            data.chunks_mut(w * 3).zip(depth.chunks_mut(w)).collect();
        exec.rows_mut(&mut rows, 1, |y, row| {
            let (pixels, zbuf) = &mut row[0];
            for x in 0..w {
                let ray_cam = k_inv * Vector3::new(x as f64, y as f64, 1.0);
                let ray_world = pose.r * ray_cam;
                if let Some(s) = plane.intersect(&origin, &ray_world) {
                    // ray_cam has unit z, so the ray parameter is the camera depth
                    zbuf[x] = s;
                    let hit = origin + ray_world * s;
                    pixels[x * 3..x * 3 + 3].copy_from_slice(&plane.shade(&hit));
                }
            }
        });
    }

    for p in &scene.points {
        let Some((uv, z)) = project_point(k, pose, &p.position) else {
            continue;
        };
        let Some((py, px)) = splat_pixel(&uv, k) else {
            continue;
        };
        let i = py * w + px;
        if z < depth[i] {
            depth[i] = z;
            data[i * 3..i * 3 + 3].copy_from_slice(&p.color);
        }
    }

    Raster {
        height: h,
        width: w,
        channels: 3,
        data,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrajectoryKind {
    Static,
    Pan,
    Tilt,
    Translate,
    Arc,
    Random,
}

impl TrajectoryKind {
    pub const ALL: [TrajectoryKind; 6] = [
        TrajectoryKind::Static,
        TrajectoryKind::Pan,
        TrajectoryKind::Tilt,
        TrajectoryKind::Translate,
        TrajectoryKind::Arc,
        TrajectoryKind::Random,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectorySpec {
    pub kind: TrajectoryKind,
    pub n_frames: usize,
    /// Total rotation for pan/tilt/arc, per-run bound for random.
    pub angle_deg: f64,
    /// Total displacement for translate, orbit radius for arc, bound for random.
    pub displacement_m: f64,
    /// Translation direction in the start camera's frame.
    pub direction: Vector3<f64>,
    pub seed: u64,
}

impl TrajectorySpec {
    pub fn new(kind: TrajectoryKind, n_frames: usize) -> Self {
        TrajectorySpec {
            kind,
            n_frames,
            angle_deg: 10.0,
            displacement_m: 0.5,
            direction: Vector3::x(),
            seed: 0,
        }
    }
}

fn progress(i: usize, n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        i as f64 / (n - 1) as f64
    }
}

/// Camera-to-world poses for one trajectory; pose 0 is exactly `start`.
pub fn make_trajectory(spec: &TrajectorySpec, start: &PoseSE3) -> Result<Vec<PoseSE3>> {
    let n = spec.n_frames;
    if n == 0 {
        return Err(Error::invalid("trajectory needs at least one frame"));
    }
    let angle = spec.angle_deg.to_radians();
    let mut poses = Vec::with_capacity(n);
    poses.push(*start);
    match spec.kind {
        TrajectoryKind::Static => poses.resize(n, *start),
        TrajectoryKind::Pan | TrajectoryKind::Tilt => {
            let rot: fn(f64) -> Matrix3<f64> = if spec.kind == TrajectoryKind::Pan { rot_y } else { rot_x };
            for i in 1..n {
                let r = rot(angle * progress(i, n)) * start.r;
                poses.push(PoseSE3::from_parts_unchecked(r, start.t));
            }
        }
        TrajectoryKind::Translate => {
            let norm = spec.direction.norm();
            if !(norm > 0.0) {
                return Err(Error::invalid("translation direction must be non-zero"));
            }
            let step = start.r * (spec.direction / norm) * spec.displacement_m;
            for i in 1..n {
                poses.push(PoseSE3::from_parts_unchecked(start.r, start.t + step * progress(i, n)));
            }
        }
        TrajectoryKind::Arc => {
            let axis = start.r * Vector3::y();
            let center = start.t + start.r * Vector3::new(0.0, 0.0, spec.displacement_m);
            let arm = start.t - center;
            for i in 1..n {
                let orbit = rot_axis_angle(&axis, angle * progress(i, n));
                poses.push(PoseSE3::from_parts_unchecked(orbit * start.r, center + orbit * arm));
            }
        }
        TrajectoryKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let steps = (n - 1).max(1) as f64;
            let max_rot = angle / steps;
            let max_move = spec.displacement_m / steps;
            let mut omega = Vector3::zeros();
            let mut vel = Vector3::zeros();
            let mut cur = *start;
            for _ in 1..n {
                let noise_w = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let noise_v = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                omega = omega * 0.8 + noise_w * 0.2;
                vel = vel * 0.8 + noise_v * 0.2;
                // |omega|, |vel| < sqrt(3); scale keeps each step inside its bound
                let w_scaled = omega * (max_rot / 3f64.sqrt());
                let v_scaled = vel * (max_move / 3f64.sqrt());
                let r = if w_scaled.norm() > 0.0 {
                    rot_axis_angle(&w_scaled, w_scaled.norm()) * cur.r
                } else {
                    cur.r
                };
                cur = PoseSE3::from_parts_unchecked(r, cur.t + v_scaled);
                poses.push(cur);
            }
        }
    }
    Ok(poses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{relative, validate_rotation};

    #[test]
    fn scene_generation_is_deterministic_and_bounded() {
        let a = gen_scene(7, 500, 2.0, 6.0).unwrap();
        let b = gen_scene(7, 500, 2.0, 6.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, gen_scene(8, 500, 2.0, 6.0).unwrap());
        assert!(a.points.iter().all(|p| (2.0..=6.0).contains(&p.position.z)));
        assert_eq!(gen_scene(1, 1, 1.0, 2.0).unwrap().points.len(), 1);
        assert!(gen_scene(1, 10, 3.0, 3.0).is_err());
        assert!(gen_scene(1, 0, 1.0, 3.0).is_err());
    }

    #[test]
    fn on_axis_point_lights_principal_pixel() {
        let scene = SynthScene {
            points: vec![ScenePoint {
                position: Vector3::new(0.0, 0.0, 2.0),
                color: [1.0, 0.5, 0.25],
            }],
            plane: None,
            seed: 0,
        };
        let k = Intrinsics::new(100.0, 100.0, 64.0, 64.0, 128, 128).unwrap();
        let img = render(&scene, &k, &PoseSE3::identity());
        assert_eq!(img.get(64, 64, 0), 1.0);
        assert_eq!(img.get(64, 64, 2), 0.25);
        let lit = img.data.iter().filter(|&&v| v != 0.0).count();
        assert_eq!(lit, 3);
    }

    #[test]
    fn nearer_point_wins_the_zbuffer() {
        let p = |z: f64, c: f32| ScenePoint {
            position: Vector3::new(0.0, 0.0, z),
            color: [c; 3],
        };
        let scene = SynthScene {
            points: vec![p(5.0, 0.2), p(2.0, 0.9), p(3.0, 0.4)],
            plane: Some(TexturedPlane::facing_camera(10.0, 1.0).unwrap()),
            seed: 0,
        };
        let k = Intrinsics::centered(50.0, 33, 33).unwrap();
        let img = render(&scene, &k, &PoseSE3::identity());
        assert_eq!(img.get(16, 16, 1), 0.9);
        // behind the plane: hidden
        let hidden = SynthScene {
            points: vec![p(12.0, 0.9)],
            ..scene.clone()
        };
        assert_ne!(render(&hidden, &k, &PoseSE3::identity()).get(16, 16, 1), 0.9);
    }

    #[test]
    fn render_is_execution_independent() {
        let scene = gen_scene(3, 200, 1.0, 5.0)
            .unwrap()
            .with_plane(TexturedPlane::facing_camera(6.0, 0.4).unwrap());
        let k = Intrinsics::centered(80.0, 96, 64).unwrap();
        let pose = PoseSE3::from_parts_unchecked(rot_y(0.1), Vector3::new(0.1, 0.0, 0.0));
        assert_eq!(
            render_with(&scene, &k, &pose, Exec::Sequential),
            render_with(&scene, &k, &pose, Exec::default())
        );
    }

    #[test]
    fn plane_shading_is_smooth_and_bounded() {
        let plane = TexturedPlane::facing_camera(4.0, 0.5).unwrap();
        for i in 0..100 {
            let x = Vector3::new(i as f64 * 0.013, -(i as f64) * 0.021, 4.0);
            assert!(plane.shade(&x).iter().all(|&c| (0.0..=1.0).contains(&c)));
        }
        assert!(plane.intersect(&Vector3::zeros(), &Vector3::new(0.0, 0.0, -1.0)).is_none());
        assert_eq!(plane.intersect(&Vector3::zeros(), &Vector3::z()), Some(4.0));
    }

    #[test]
    fn trajectory_shapes() {
        let start = PoseSE3::from_parts_unchecked(rot_x(0.2), Vector3::new(1.0, 0.0, -0.5));
        let stat = make_trajectory(&TrajectorySpec::new(TrajectoryKind::Static, 81), &start).unwrap();
        assert_eq!(stat.len(), 81);
        assert!(stat.iter().all(|p| *p == start));

        let pan = make_trajectory(&TrajectorySpec::new(TrajectoryKind::Pan, 2), &start).unwrap();
        assert!((pan[1].r - rot_y(10f64.to_radians()) * start.r).abs().max() < 1e-12);
        assert_eq!(pan[1].t, start.t);

        let mut arc = TrajectorySpec::new(TrajectoryKind::Arc, 5);
        arc.angle_deg = 360.0;
        arc.displacement_m = 3.0;
        let orbit = make_trajectory(&arc, &start).unwrap();
        assert!(orbit[0].max_abs_diff(&orbit[4]) < 1e-9);
        // every arc pose looks at the orbit center
        let center = start.t + start.r * Vector3::new(0.0, 0.0, 3.0);
        for p in &orbit {
            let c = p.r.transpose() * (center - p.t);
            assert!(c.x.abs() < 1e-9 && c.y.abs() < 1e-9 && (c.z - 3.0).abs() < 1e-9);
        }

        let mut tr = TrajectorySpec::new(TrajectoryKind::Translate, 11);
        tr.displacement_m = 2.0;
        let line = make_trajectory(&tr, &start).unwrap();
        assert!(((line[10].t - start.t).norm() - 2.0).abs() < 1e-12);
        assert!(make_trajectory(&TrajectorySpec::new(TrajectoryKind::Pan, 0), &start).is_err());
    }

    #[test]
    fn random_trajectory_is_deterministic_smooth_and_bounded() {
        let mut spec = TrajectorySpec::new(TrajectoryKind::Random, 81);
        spec.seed = 99;
        spec.angle_deg = 15.0;
        spec.displacement_m = 1.0;
        let start = PoseSE3::identity();
        let a = make_trajectory(&spec, &start).unwrap();
        assert_eq!(a, make_trajectory(&spec, &start).unwrap());
        assert_eq!(a[0], start);
        let max_step = 15f64.to_radians() / 80.0;
        for w in a.windows(2) {
            let rel = relative(&w[0], &w[1]);
            let angle = ((rel.r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos();
            assert!(angle <= max_step + 1e-12);
            assert!(rel.t.norm() <= 1.0 / 80.0 + 1e-12);
            assert!(validate_rotation(&w[1].r, 1e-9));
        }
    }
}
