//! Synthetic multi-camera scenes written in the manifest format.

use std::path::{Path, PathBuf};

use nalgebra::Vector3;

use crate::augment::{CameraClip, FrameRef, SceneManifest};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{focal_mm_to_px, FocalSpec, Intrinsics, PoseSE3};
use crate::manifest::{frame_path, write_metadata};
use crate::synth::{gen_scene, make_trajectory, render_with, SynthScene, TexturedPlane, TrajectoryKind, TrajectorySpec};
use crate::trajectory::CameraState;

#[derive(Clone, Debug, PartialEq)]
pub struct SynthDatasetConfig {
    pub scene_id: String,
    pub seed: u64,
    pub cameras: usize,
    pub frames: usize,
    pub width: u32,
    pub height: u32,
    pub focal_mm: f64,
    pub sensor_width_mm: f64,
    pub points: usize,
    pub fps: f64,
}

impl Default for SynthDatasetConfig {
    fn default() -> Self {
        SynthDatasetConfig {
            scene_id: "scene_0000".into(),
            seed: 0,
            cameras: 10,
            frames: 81,
            width: 832,
            height: 480,
            focal_mm: 18.0,
            sensor_width_mm: 36.0,
            points: 400,
            fps: 15.0,
        }
    }
}

/// Motion assigned to camera `index`; cycles through every trajectory kind.
pub fn camera_motion(index: usize, frames: usize, seed: u64) -> TrajectorySpec {
    let mut spec = TrajectorySpec::new(TrajectoryKind::Static, frames);
    spec.seed = seed.wrapping_add(index as u64);
    match index % 10 {
        0 => {
            spec.kind = TrajectoryKind::Pan;
            spec.angle_deg = 15.0;
        }
        1 => {
            spec.kind = TrajectoryKind::Pan;
            spec.angle_deg = -15.0;
        }
        2 => {
            spec.kind = TrajectoryKind::Tilt;
            spec.angle_deg = 10.0;
        }
        3 => {
            spec.kind = TrajectoryKind::Tilt;
            spec.angle_deg = -10.0;
        }
        4 => {
            spec.kind = TrajectoryKind::Translate;
            spec.displacement_m = 1.0;
            spec.direction = Vector3::x();
        }
        5 => {
            spec.kind = TrajectoryKind::Translate;
            spec.displacement_m = 1.0;
            spec.direction = Vector3::z();
        }
        6 => {
            spec.kind = TrajectoryKind::Arc;
            spec.angle_deg = 30.0;
            spec.displacement_m = 4.0;
        }
        7 => {
            spec.kind = TrajectoryKind::Arc;
            spec.angle_deg = -30.0;
            spec.displacement_m = 4.0;
        }
        8 => {
            spec.kind = TrajectoryKind::Random;
            spec.angle_deg = 12.0;
            spec.displacement_m = 0.8;
        }
        _ => spec.kind = TrajectoryKind::Static,
    }
    spec
}

pub fn synth_world(cfg: &SynthDatasetConfig) -> Result<SynthScene> {
    Ok(gen_scene(cfg.seed, cfg.points.max(1), 2.0, 5.5)?.with_plane(TexturedPlane::facing_camera(6.0, 0.35)?))
}

/// Builds the scene's clips with frame paths under `scene_dir`.
pub fn synth_manifest(cfg: &SynthDatasetConfig, scene_dir: &Path) -> Result<SceneManifest> {
    if cfg.cameras == 0 || cfg.frames == 0 {
        return Err(Error::invalid("synthetic scene needs at least one camera and one frame"));
    }
    let focal = FocalSpec::new(cfg.focal_mm, cfg.sensor_width_mm)?;
    let f_px = focal_mm_to_px(focal, cfg.width);
    let k = Intrinsics::centered(f_px, cfg.width, cfg.height)?;
    let start = PoseSE3::identity();
    let clips = (0..cfg.cameras)
        .map(|c| {
            let cam_id = format!("cam{:02}", c + 1);
            let poses = make_trajectory(&camera_motion(c, cfg.frames, cfg.seed), &start)?;
            let trajectory = poses
                .into_iter()
                .enumerate()
                .map(|(i, pose)| CameraState {
                    frame: i as u32,
                    pose,
                    intrinsics: k,
                })
                .collect();
            let frames = (0..cfg.frames)
                .map(|i| FrameRef::new(frame_path(scene_dir, &cam_id, i as u32)))
                .collect();
            CameraClip::new(cam_id, frames, trajectory, focal)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SceneManifest {
        scene_id: cfg.scene_id.clone(),
        clips,
        fps: cfg.fps,
        synchronized: true,
    })
}

/// Renders and writes a synthetic scene to `out_root/<scene_id>/`; with
/// `render_frames == false` only the manifest and trajectories are written.
pub fn write_synth_dataset(cfg: &SynthDatasetConfig, out_root: &Path, render_frames: bool, exec: Exec) -> Result<PathBuf> {
    let scene_dir = out_root.join(&cfg.scene_id);
    let scene = synth_manifest(cfg, &scene_dir)?;
    crate::manifest::manifest_file_for(&scene)?;
    let world = synth_world(cfg)?;
    if render_frames {
        for c in &scene.clips {
            let d = scene_dir.join(&c.cam_id);
            std::fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
        }
        let jobs: Vec<(&CameraClip, usize)> = scene
            .clips
            .iter()
            .flat_map(|c| (0..c.frame_count()).map(move |i| (c, i)))
            .collect();
        exec.map(jobs.len(), |j| {
            let (clip, i) = jobs[j];
            let state = &clip.trajectory[i];
            // frames are already parallel; render each one sequentially
            render_with(&world, &state.intrinsics, &state.pose, Exec::Sequential).write_png(&clip.frames[i].path)
        })
        .into_iter()
        .collect::<Result<()>>()?;
    } else {
        std::fs::create_dir_all(&scene_dir).map_err(|e| Error::io(&scene_dir, e))?;
    }
    write_metadata(&scene, &scene_dir)
}
