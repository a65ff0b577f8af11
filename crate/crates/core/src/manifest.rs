//! Scene manifests on disk.
//!
//! ```json
//! {"scene_id": "...", "focal_mm": 18.0, "sensor_width_mm": 36.0,
//!  "width": 832, "height": 480, "fps": 15.0, "synchronized": true,
//!  "clips": [{"cam_id": "cam01", "frames": "cam01/frame_%05d.png",
//!             "trajectory": "cam01/trajectory.json"}]}
//! ```
//! Paths are relative to the manifest's directory. Frame patterns are
//! expanded with each trajectory record's `frame` number. A clip may carry
//! its own `focal_mm` when it differs from the scene's.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::augment::{CameraClip, FrameRef, SceneManifest};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{FocalSpec, DEFAULT_SENSOR_WIDTH_MM};
use crate::trajectory;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TRAJECTORY_FILE: &str = "trajectory.json";
pub const FRAME_PATTERN: &str = "frame_%05d.png";

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestFile {
    pub scene_id: String,
    pub focal_mm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensor_width_mm: Option<f64>,
    pub width: u32,
    pub height: u32,
    pub fps: f64,
    #[serde(default = "default_true")]
    pub synchronized: bool,
    pub clips: Vec<ManifestClip>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestClip {
    pub cam_id: String,
    pub frames: String,
    pub trajectory: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub focal_mm: Option<f64>,
}

/// Expands a printf-style frame pattern (`%d`, `%0Nd`, `%%`).
pub fn expand_pattern(pattern: &str, index: u32) -> Result<String> {
    let mut out = String::with_capacity(pattern.len() + 8);
    let mut chars = pattern.chars().peekable();
    let mut used = false;
    while let Some(c) = chars.next() {
        if c != '%' {
            out.push(c);
            continue;
        }
        if chars.peek() == Some(&'%') {
            chars.next();
            out.push('%');
            continue;
        }
        let mut width = String::new();
        while let Some(&d) = chars.peek() {
            if d.is_ascii_digit() {
                width.push(d);
                chars.next();
            } else {
                break;
            }
        }
        if chars.next() != Some('d') {
            return Err(Error::invalid(format!("unsupported frame pattern {pattern:?}")));
        }
        let w: usize = if width.is_empty() { 0 } else { width.parse().unwrap_or(0) };
        out.push_str(&format!("{index:0w$}"));
        used = true;
    }
    if !used {
        return Err(Error::invalid(format!("frame pattern {pattern:?} has no %d field")));
    }
    Ok(out)
}

pub fn read_manifest_file(path: &Path) -> Result<ManifestFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a manifest with its trajectories. Frame images are not opened.
pub fn load_manifest(path: &Path) -> Result<SceneManifest> {
    load_manifest_with(path, DEFAULT_SENSOR_WIDTH_MM)
}

/// As [`load_manifest`], with the sensor width used when the file has none.
pub fn load_manifest_with(path: &Path, default_sensor_mm: f64) -> Result<SceneManifest> {
    let file = read_manifest_file(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut clips = Vec::with_capacity(file.clips.len());
    for c in &file.clips {
        let traj = trajectory::read(&dir.join(&c.trajectory))?;
        if let Some(bad) = traj
            .iter()
            .find(|s| s.intrinsics.width != file.width || s.intrinsics.height != file.height)
        {
            return Err(Error::invalid(format!(
                "{}: clip {} frame {} is {}x{}, manifest says {}x{}",
                path.display(),
                c.cam_id,
                bad.frame,
                bad.intrinsics.width,
                bad.intrinsics.height,
                file.width,
                file.height
            )));
        }
        let frames = traj
            .iter()
            .map(|s| Ok(FrameRef::new(dir.join(expand_pattern(&c.frames, s.frame)?))))
            .collect::<Result<Vec<_>>>()?;
        let focal = FocalSpec::new(c.focal_mm.unwrap_or(file.focal_mm), file.sensor_width_mm.unwrap_or(default_sensor_mm))?;
        clips.push(CameraClip::new(c.cam_id.clone(), frames, traj, focal)?);
    }
    let scene = SceneManifest {
        scene_id: file.scene_id,
        clips,
        fps: file.fps,
        synchronized: file.synchronized,
    };
    scene.validate()?;
    Ok(scene)
}

/// Manifest paths under `root`: the file itself, or every `manifest.json`
/// below a directory, sorted.
pub fn discover_manifests(root: &Path) -> Result<Vec<PathBuf>> {
    if root.is_file() {
        return Ok(vec![root.to_path_buf()]);
    }
    if !root.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no such manifest or directory"),
        ));
    }
    let mut out = Vec::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| Error::io(root, e.into()))?;
        if entry.file_type().is_file() && entry.file_name() == MANIFEST_FILE {
            out.push(entry.into_path());
        }
    }
    Ok(out)
}

pub fn frame_path(scene_dir: &Path, cam_id: &str, frame: u32) -> PathBuf {
    let name = expand_pattern(FRAME_PATTERN, frame).expect("built-in pattern is valid");
    scene_dir.join(cam_id).join(name)
}

fn check_component(name: &str, what: &str) -> Result<()> {
    if name.is_empty() || name.contains(['/', '\\']) || name == "." || name == ".." {
        return Err(Error::invalid(format!("{what} {name:?} is not usable as a directory name")));
    }
    Ok(())
}

pub fn manifest_file_for(scene: &SceneManifest) -> Result<ManifestFile> {
    check_component(&scene.scene_id, "scene id")?;
    let first = scene
        .clips
        .first()
        .ok_or_else(|| Error::invalid(format!("scene {} has no clips", scene.scene_id)))?;
    let (h, w) = first
        .dims()
        .ok_or_else(|| Error::invalid(format!("scene {} has empty clips", scene.scene_id)))?;
    let clips = scene
        .clips
        .iter()
        .map(|c| {
            check_component(&c.cam_id, "camera id")?;
            Ok(ManifestClip {
                cam_id: c.cam_id.clone(),
                frames: format!("{}/{FRAME_PATTERN}", c.cam_id),
                trajectory: format!("{}/{TRAJECTORY_FILE}", c.cam_id),
                focal_mm: (c.focal.focal_mm != first.focal.focal_mm).then_some(c.focal.focal_mm),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ManifestFile {
        scene_id: scene.scene_id.clone(),
        focal_mm: first.focal.focal_mm,
        sensor_width_mm: Some(first.focal.sensor_width_mm),
        width: w as u32,
        height: h as u32,
        fps: scene.fps,
        synchronized: scene.synchronized,
        clips,
    })
}

/// Writes `manifest.json` and per-clip trajectories under `scene_dir`.
pub fn write_metadata(scene: &SceneManifest, scene_dir: &Path) -> Result<PathBuf> {
    let file = manifest_file_for(scene)?;
    for c in &scene.clips {
        let cam_dir = scene_dir.join(&c.cam_id);
        std::fs::create_dir_all(&cam_dir).map_err(|e| Error::io(&cam_dir, e))?;
        trajectory::write(&cam_dir.join(TRAJECTORY_FILE), &c.trajectory)?;
    }
    let path = scene_dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&file).expect("manifest always serializes");
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes a scene under `out_root/<scene_id>/`. With `materialize`, every
/// frame is produced from its source image (copied verbatim when no pixel
/// operation is pending). Returns the manifest path.
pub fn write_scene(scene: &SceneManifest, out_root: &Path, materialize: bool, exec: Exec) -> Result<PathBuf> {
    scene.validate()?;
    manifest_file_for(scene)?;
    let scene_dir = out_root.join(&scene.scene_id);
    std::fs::create_dir_all(&scene_dir).map_err(|e| Error::io(&scene_dir, e))?;
    if materialize {
        let jobs: Vec<(&CameraClip, usize)> = scene
            .clips
            .iter()
            .flat_map(|c| (0..c.frame_count()).map(move |i| (c, i)))
            .collect();
        for c in &scene.clips {
            let d = scene_dir.join(&c.cam_id);
            std::fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
        }
        exec.map(jobs.len(), |j| {
            let (clip, i) = jobs[j];
            let dst = frame_path(&scene_dir, &clip.cam_id, clip.trajectory[i].frame);
            let frame = &clip.frames[i];
            let is_png = frame
                .path
                .extension()
                .map(|e| e.eq_ignore_ascii_case("png"))
                .unwrap_or(false);
            if frame.zooms.is_empty() && is_png {
                std::fs::copy(&frame.path, &dst)
                    .map(|_| ())
                    .map_err(|e| Error::io(&frame.path, e))
            } else {
                frame.load()?.write_png(&dst)
            }
        })
        .into_iter()
        .collect::<Result<()>>()?;
    }
    write_metadata(scene, &scene_dir)
}
