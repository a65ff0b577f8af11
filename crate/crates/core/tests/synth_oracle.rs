use homowarp::dataset::{write_synth_dataset, SynthDatasetConfig};
use homowarp::geometry::{rot_y, Intrinsics, PoseSE3};
use homowarp::homography::{reproject, DepthValue, HPoint2};
use homowarp::synth::{gen_scene, make_trajectory, project_point, render, splat_centers, splat_pixel, TrajectoryKind, TrajectorySpec};
use homowarp::Exec;
use nalgebra::{Rotation3, Vector3};

fn camera() -> Intrinsics {
    Intrinsics::new(420.0, 410.0, 160.3, 119.7, 320, 240).unwrap()
}

#[test]
fn splat_centers_match_reprojection() {
    let k = camera();
    let scene = gen_scene(21, 500, 1.5, 30.0).unwrap();
    let source = PoseSE3::identity();
    for (i, axis) in [Vector3::new(0.2, 1.0, 0.1), Vector3::new(1.0, -0.3, 0.4)].iter().enumerate() {
        let r = *Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(*axis), 0.12 * (i + 1) as f64).matrix();
        let target = PoseSE3::new(r, Vector3::new(0.3, -0.1, 0.2)).unwrap();
        let motion = source.motion_to(&target);
        let src_centers = splat_centers(&scene, &k, &source);
        let tgt_centers = splat_centers(&scene, &k, &target);
        let mut checked = 0;
        for (p, (s, t)) in scene.points.iter().zip(src_centers.iter().zip(&tgt_centers)) {
            let (Some(s), Some(t)) = (s, t) else { continue };
            let z = p.position.z;
            let x = HPoint2::from_pixel(s.x, s.y);
            let got = reproject(&k, &k, &motion.r, &motion.t, &x, DepthValue(z)).unwrap().dehom().unwrap();
            assert!((got - t).norm() <= 1e-6, "point {:?}: {} vs {}", p.position, got, t);
            checked += 1;
        }
        assert!(checked > 400);
    }
}

#[test]
fn lateral_translation_shifts_by_parallax_term() {
    let k = camera();
    let scene = gen_scene(5, 300, 1.0, 50.0).unwrap();
    let shift = Vector3::new(0.4, -0.25, 0.0);
    let target = PoseSE3::from_translation(shift);
    let motion = PoseSE3::identity().motion_to(&target);
    for p in &scene.points {
        let (s, z) = project_point(&k, &PoseSE3::identity(), &p.position).unwrap();
        let (t, _) = project_point(&k, &target, &p.position).unwrap();
        let expected = (k.matrix() * motion.t / z).xy();
        assert!(((t - s) - expected).norm() <= 1e-6);
    }
}

#[test]
fn rendered_splats_land_on_their_centers() {
    let k = camera();
    let scene = gen_scene(9, 40, 2.0, 8.0).unwrap();
    let pose = PoseSE3::new(rot_y(0.05), Vector3::new(0.1, 0.0, -0.2)).unwrap();
    let img = render(&scene, &k, &pose);
    let centers = splat_centers(&scene, &k, &pose);
    let hits: Vec<_> = centers.iter().map(|c| c.and_then(|c| splat_pixel(&c, &k))).collect();
    for (i, p) in scene.points.iter().enumerate() {
        let Some((y, x)) = hits[i] else { continue };
        if hits.iter().filter(|h| **h == Some((y, x))).count() > 1 {
            continue;
        }
        let px: Vec<f32> = (0..3).map(|c| img.get(y, x, c)).collect();
        assert_eq!(px, p.color.to_vec());
    }
}

#[test]
fn trajectory_endpoint_examples() {
    let start = PoseSE3::new(rot_y(0.3), Vector3::new(1.0, 2.0, 3.0)).unwrap();
    let mut pan = TrajectorySpec::new(TrajectoryKind::Pan, 2);
    pan.angle_deg = 10.0;
    let poses = make_trajectory(&pan, &start).unwrap();
    assert_eq!(poses[0], start);
    assert!((poses[1].r - rot_y(10f64.to_radians()) * start.r).abs().max() <= 1e-12);

    let mut arc = TrajectorySpec::new(TrajectoryKind::Arc, 5);
    arc.angle_deg = 360.0;
    arc.displacement_m = 3.0;
    let poses = make_trajectory(&arc, &start).unwrap();
    assert!(poses[0].max_abs_diff(&poses[4]) <= 1e-9);

    let poses = make_trajectory(&TrajectorySpec::new(TrajectoryKind::Static, 81), &start).unwrap();
    assert_eq!(poses.len(), 81);
    assert!(poses.iter().all(|p| *p == start));
}

#[test]
fn synthetic_dataset_is_byte_deterministic() {
    let cfg = SynthDatasetConfig {
        frames: 5,
        width: 40,
        height: 24,
        points: 30,
        seed: 3,
        ..Default::default()
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    write_synth_dataset(&cfg, a.path(), true, Exec::Sequential).unwrap();
    write_synth_dataset(&cfg, b.path(), true, Exec::default()).unwrap();
    let read = |root: &std::path::Path| {
        let mut files: Vec<_> = walk(root)
            .into_iter()
            .map(|p| (p.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&p).unwrap()))
            .collect();
        files.sort();
        files
    };
    let fa = read(a.path());
    assert_eq!(fa.len(), 10 * 6 + 1);
    assert_eq!(fa, read(b.path()));
}

fn walk(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}
