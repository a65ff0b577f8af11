//! Multi-camera dataset augmentation: reversed-and-concatenated
//! trajectories, synchronized cropping, focal-length (intrinsic)
//! augmentation by resize + center crop, and source/target pair selection.

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::FocalSpec;
use crate::raster::Raster;
use crate::trajectory::CameraState;
use crate::warp::{center_crop, crop_offsets, resize_bilinear, scaled_dim};

/// Clip length the downstream video model consumes.
pub const WINDOW_FRAMES: usize = 81;

/// Focal lengths present in the source dataset, in millimeters.
pub const DATASET_FOCALS_MM: [f64; 4] = [18.0, 24.0, 35.0, 50.0];

/// Tolerance on the shared first pose of two clips from one scene.
pub const SHARED_START_TOL: f64 = 1e-6;

/// Identifier of the scene RNG derivation; bump when it changes.
pub const SCENE_RNG_VERSION: &str = "chacha8/sha256-xor/v1";

/// Resize-then-crop applied to a frame when it is materialized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZoomCrop {
    pub ratio: f64,
    pub resized_height: usize,
    pub resized_width: usize,
    pub out_height: usize,
    pub out_width: usize,
    pub offset_y: usize,
    pub offset_x: usize,
}

impl ZoomCrop {
    pub fn for_ratio(height: usize, width: usize, ratio: f64) -> Self {
        let resized_height = scaled_dim(height, ratio);
        let resized_width = scaled_dim(width, ratio);
        let (offset_y, offset_x) = crop_offsets(resized_height, resized_width, height, width);
        ZoomCrop {
            ratio,
            resized_height,
            resized_width,
            out_height: height,
            out_width: width,
            offset_y,
            offset_x,
        }
    }

    pub fn apply(&self, src: &Raster) -> Result<Raster> {
        if src.height != self.out_height || src.width != self.out_width {
            return Err(Error::invalid(format!(
                "frame is {}x{}, zoom expects {}x{}",
                src.height, src.width, self.out_height, self.out_width
            )));
        }
        let resized = resize_bilinear(src, self.resized_height, self.resized_width)?;
        center_crop(&resized, self.out_height, self.out_width)
    }
}

/// Image behind one clip frame plus pending pixel operations.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameRef {
    pub path: PathBuf,
    pub zooms: Vec<ZoomCrop>,
}

impl FrameRef {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        FrameRef {
            path: path.into(),
            zooms: Vec::new(),
        }
    }

    pub fn load(&self) -> Result<Raster> {
        let mut img = Raster::read_any(&self.path)?;
        for z in &self.zooms {
            img = z.apply(&img)?;
        }
        Ok(img)
    }
}

/// One camera's video: frames and the per-frame camera state. The
/// trajectory's `frame` field is the frame's timestamp on the scene timeline.
#[derive(Clone, Debug, PartialEq)]
pub struct CameraClip {
    pub cam_id: String,
    pub frames: Vec<FrameRef>,
    pub trajectory: Vec<CameraState>,
    pub focal: FocalSpec,
}

impl CameraClip {
    pub fn new(cam_id: impl Into<String>, frames: Vec<FrameRef>, trajectory: Vec<CameraState>, focal: FocalSpec) -> Result<Self> {
        let cam_id = cam_id.into();
        if frames.len() != trajectory.len() {
            return Err(Error::invalid(format!(
                "clip {cam_id}: {} frames but {} trajectory entries",
                frames.len(),
                trajectory.len()
            )));
        }
        if let Some(first) = trajectory.first() {
            let (w, h) = (first.intrinsics.width, first.intrinsics.height);
            if trajectory.iter().any(|s| s.intrinsics.width != w || s.intrinsics.height != h) {
                return Err(Error::invalid(format!("clip {cam_id}: frames differ in size")));
            }
        }
        Ok(CameraClip {
            cam_id,
            frames,
            trajectory,
            focal,
        })
    }

    pub fn frame_count(&self) -> usize {
        self.trajectory.len()
    }

    /// `(height, width)` shared by every frame.
    pub fn dims(&self) -> Option<(usize, usize)> {
        self.trajectory
            .first()
            .map(|s| (s.intrinsics.height as usize, s.intrinsics.width as usize))
    }

    pub fn timestamps(&self) -> Vec<u32> {
        self.trajectory.iter().map(|s| s.frame).collect()
    }
}

/// Synchronized cameras of one scene.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneManifest {
    pub scene_id: String,
    pub clips: Vec<CameraClip>,
    pub fps: f64,
    pub synchronized: bool,
}

impl SceneManifest {
    pub fn validate(&self) -> Result<()> {
        let Some(first) = self.clips.first() else {
            return Ok(());
        };
        let n = first.frame_count();
        let stamps = first.timestamps();
        for clip in &self.clips {
            if clip.frame_count() != n {
                return Err(Error::invalid(format!(
                    "scene {}: clip {} has {} frames, expected {n}",
                    self.scene_id,
                    clip.cam_id,
                    clip.frame_count()
                )));
            }
            if self.synchronized && clip.timestamps() != stamps {
                return Err(Error::invalid(format!(
                    "scene {}: clip {} is not synchronized",
                    self.scene_id, clip.cam_id
                )));
            }
        }
        Ok(())
    }
}

/// Reverses `a` and appends `b` without its first frame, which duplicates
/// `a`'s first frame. The result lives on a fresh `0..2n-1` timeline.
pub fn trajectory_augment(a: &CameraClip, b: &CameraClip) -> Result<CameraClip> {
    let n = a.frame_count();
    if n == 0 || n != b.frame_count() {
        return Err(Error::invalid(format!(
            "clips {} and {} must have the same non-zero length ({} vs {})",
            a.cam_id,
            b.cam_id,
            n,
            b.frame_count()
        )));
    }
    if a.dims() != b.dims() {
        return Err(Error::invalid("clips differ in frame size"));
    }
    let gap = a.trajectory[0].pose.max_abs_diff(&b.trajectory[0].pose);
    if gap > SHARED_START_TOL {
        return Err(Error::invalid(format!(
            "clips {} and {} do not share a start pose (gap {gap:e})",
            a.cam_id, b.cam_id
        )));
    }
    let order: Vec<(&CameraClip, usize)> = (0..n)
        .rev()
        .map(|i| (a, i))
        .chain((1..n).map(|i| (b, i)))
        .collect();
    let frames = order.iter().map(|(c, i)| c.frames[*i].clone()).collect();
    let trajectory = order
        .iter()
        .enumerate()
        .map(|(t, (c, i))| CameraState {
            frame: t as u32,
            ..c.trajectory[*i]
        })
        .collect();
    CameraClip::new(format!("{}-{}", a.cam_id, b.cam_id), frames, trajectory, a.focal)
}

/// Cuts `[start, start + length)` out of every clip, keeping timestamps.
pub fn crop_window(clips: &[CameraClip], start: usize, length: usize) -> Result<Vec<CameraClip>> {
    if length == 0 {
        return Err(Error::invalid("crop length must be positive"));
    }
    clips
        .iter()
        .map(|c| {
            if start + length > c.frame_count() {
                return Err(Error::invalid(format!(
                    "window [{start}, {}) exceeds clip {} of {} frames",
                    start + length,
                    c.cam_id,
                    c.frame_count()
                )));
            }
            Ok(CameraClip {
                cam_id: c.cam_id.clone(),
                frames: c.frames[start..start + length].to_vec(),
                trajectory: c.trajectory[start..start + length].to_vec(),
                focal: c.focal,
            })
        })
        .collect()
}

/// Focal lengths an intrinsic augmentation may target.
#[derive(Clone, Debug, PartialEq)]
pub enum FocalSet {
    Only(Vec<f64>),
    Any,
}

impl Default for FocalSet {
    fn default() -> Self {
        FocalSet::Only(DATASET_FOCALS_MM.to_vec())
    }
}

impl FocalSet {
    pub fn contains(&self, f: f64) -> bool {
        match self {
            FocalSet::Only(v) => v.contains(&f),
            FocalSet::Any => true,
        }
    }

    /// Values strictly longer than `current`, ascending. Empty for `Any`
    /// (there is nothing to sample from).
    pub fn admissible_above(&self, current: f64) -> Vec<f64> {
        match self {
            FocalSet::Only(v) => {
                let mut out: Vec<f64> = v.iter().copied().filter(|&x| x > current).collect();
                out.sort_by(f64::total_cmp);
                out.dedup();
                out
            }
            FocalSet::Any => Vec::new(),
        }
    }
}

/// Simulates a longer lens: frames are resized by `f_new / f_old` and
/// center-cropped back to their size, and the intrinsics follow.
pub fn intrinsic_augment(clip: &CameraClip, f_new_mm: f64, allowed: &FocalSet) -> Result<CameraClip> {
    let f_old = clip.focal.focal_mm;
    if !(f_new_mm > f_old) {
        return Err(Error::invalid(format!(
            "focal augmentation only lengthens the lens: {f_new_mm} mm <= {f_old} mm"
        )));
    }
    if !allowed.contains(f_new_mm) {
        return Err(Error::invalid(format!("focal length {f_new_mm} mm is not in the allowed set")));
    }
    let Some((h, w)) = clip.dims() else {
        return Err(Error::invalid("cannot augment an empty clip"));
    };
    let ratio = f_new_mm / f_old;
    let zoom = ZoomCrop::for_ratio(h, w, ratio);
    let frames = clip
        .frames
        .iter()
        .map(|f| {
            let mut f = f.clone();
            f.zooms.push(zoom);
            f
        })
        .collect();
    let trajectory = clip
        .trajectory
        .iter()
        .map(|s| {
            let k = s.intrinsics;
            let mut out = *s;
            out.intrinsics.fx = k.fx * ratio;
            out.intrinsics.fy = k.fy * ratio;
            out.intrinsics.cx = k.cx * ratio - zoom.offset_x as f64;
            out.intrinsics.cy = k.cy * ratio - zoom.offset_y as f64;
            out
        })
        .collect();
    CameraClip::new(
        clip.cam_id.clone(),
        frames,
        trajectory,
        FocalSpec::new(f_new_mm, clip.focal.sensor_width_mm)?,
    )
}

/// Deterministic per-scene generator: the first eight bytes of
/// `sha256(domain || scene_id)` (little endian) XOR `seed` seed a ChaCha8
/// stream. The empty domain is used for pair selection.
pub fn scene_rng(domain: &str, scene_id: &str, seed: u64) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(domain.as_bytes());
    hasher.update(scene_id.as_bytes());
    let digest = hasher.finalize();
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    ChaCha8Rng::seed_from_u64(u64::from_le_bytes(head) ^ seed)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClipChoice {
    pub cam_id: String,
    /// Target focal length of an intrinsic augmentation, if applied.
    pub focal_mm: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSpec {
    pub scene_id: String,
    pub source: ClipChoice,
    pub target: ClipChoice,
    pub crop_start: usize,
    pub window: usize,
    pub seed: u64,
}

impl PairSpec {
    fn effective_focal(choice: &ClipChoice, scene: &SceneManifest) -> Option<f64> {
        choice.focal_mm.or_else(|| {
            scene
                .clips
                .iter()
                .find(|c| c.cam_id == choice.cam_id)
                .map(|c| c.focal.focal_mm)
        })
    }

    /// `(source, target)` focal lengths after augmentation.
    pub fn focals(&self, scene: &SceneManifest) -> Option<(f64, f64)> {
        Some((
            Self::effective_focal(&self.source, scene)?,
            Self::effective_focal(&self.target, scene)?,
        ))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairConfig {
    pub allowed: FocalSet,
    pub augment_probability: f64,
    pub window: usize,
}

impl Default for PairConfig {
    fn default() -> Self {
        PairConfig {
            allowed: FocalSet::default(),
            augment_probability: 0.5,
            window: WINDOW_FRAMES,
        }
    }
}

pub fn pair_select(scene: &SceneManifest, seed: u64) -> Result<PairSpec> {
    pair_select_with(scene, seed, &PairConfig::default())
}

/// Samples an ordered (source, target) pair of distinct clips, then for each
/// independently decides on focal augmentation, then a crop start.
pub fn pair_select_with(scene: &SceneManifest, seed: u64, cfg: &PairConfig) -> Result<PairSpec> {
    let n = scene.clips.len();
    if n < 2 {
        return Err(Error::invalid(format!(
            "scene {} needs at least two clips to form a pair",
            scene.scene_id
        )));
    }
    let len = scene.clips[0].frame_count();
    if len < cfg.window {
        return Err(Error::invalid(format!(
            "scene {} clips have {len} frames, fewer than the {}-frame window",
            scene.scene_id, cfg.window
        )));
    }
    let mut rng = scene_rng("", &scene.scene_id, seed);
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    let mut choose = |clip: &CameraClip| {
        let augment = rng.gen_bool(cfg.augment_probability);
        let options = cfg.allowed.admissible_above(clip.focal.focal_mm);
        let focal_mm = (augment && !options.is_empty()).then(|| options[rng.gen_range(0..options.len())]);
        ClipChoice {
            cam_id: clip.cam_id.clone(),
            focal_mm,
        }
    };
    let source = choose(&scene.clips[i]);
    let target = choose(&scene.clips[j]);
    let crop_start = rng.gen_range(0..=len - cfg.window);
    Ok(PairSpec {
        scene_id: scene.scene_id.clone(),
        source,
        target,
        crop_start,
        window: cfg.window,
        seed,
    })
}

/// Scene-level augmentation: clips are shuffled and paired consecutively for
/// trajectory augmentation; the resulting scene is also emitted at one
/// longer focal length when the allowed set has one.
pub fn augment_scene(scene: &SceneManifest, seed: u64, allowed: &FocalSet) -> Result<Vec<SceneManifest>> {
    scene.validate()?;
    if scene.clips.len() < 2 {
        return Err(Error::invalid(format!(
            "scene {} needs at least two clips for trajectory augmentation",
            scene.scene_id
        )));
    }
    let mut rng = scene_rng("augment", &scene.scene_id, seed);
    let mut order: Vec<usize> = (0..scene.clips.len()).collect();
    order.shuffle(&mut rng);
    let clips = order
        .chunks_exact(2)
        .map(|p| trajectory_augment(&scene.clips[p[0]], &scene.clips[p[1]]))
        .collect::<Result<Vec<_>>>()?;
    let traj_scene = SceneManifest {
        scene_id: format!("{}_traj", scene.scene_id),
        clips,
        fps: scene.fps,
        synchronized: scene.synchronized,
    };
    let mut out = vec![traj_scene];

    let focal = scene.clips[0].focal.focal_mm;
    let options = allowed.admissible_above(focal);
    if !options.is_empty() {
        let f_new = options[rng.gen_range(0..options.len())];
        let zoomed = out[0]
            .clips
            .iter()
            .map(|c| intrinsic_augment(c, f_new, allowed))
            .collect::<Result<Vec<_>>>()?;
        out.push(SceneManifest {
            scene_id: format!("{}_f{}mm", out[0].scene_id, f_new),
            clips: zoomed,
            fps: scene.fps,
            synchronized: scene.synchronized,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{rot_y, Intrinsics, PoseSE3};
    use nalgebra::Vector3;
    use proptest::prelude::*;

    fn clip(id: &str, n: usize, yaw_step: f64, focal: f64) -> CameraClip {
        let k = Intrinsics::centered(416.0, 832, 480).unwrap();
        let trajectory = (0..n)
            .map(|i| CameraState {
                frame: i as u32,
                pose: PoseSE3::from_parts_unchecked(rot_y(yaw_step * i as f64), Vector3::new(0.0, 0.0, 0.01 * i as f64)),
                intrinsics: k,
            })
            .collect();
        let frames = (0..n).map(|i| FrameRef::new(format!("{id}/{i}.png"))).collect();
        CameraClip::new(id, frames, trajectory, FocalSpec::full_frame(focal).unwrap()).unwrap()
    }

    fn scene(n_clips: usize, frames: usize, focal: f64) -> SceneManifest {
        SceneManifest {
            scene_id: "scene_0001".into(),
            clips: (0..n_clips)
                .map(|c| clip(&format!("cam{c:02}"), frames, 0.01 * (c as f64 + 1.0), focal))
                .collect(),
            fps: 15.0,
            synchronized: true,
        }
    }

    #[test]
    fn trajectory_augment_layout() {
        let a = clip("a", 81, 0.01, 18.0);
        let b = clip("b", 81, -0.02, 18.0);
        let out = trajectory_augment(&a, &b).unwrap();
        assert_eq!(out.frame_count(), 161);
        assert_eq!(out.frames[0], a.frames[80]);
        assert_eq!(out.frames[80], a.frames[0]);
        assert_eq!(out.frames[81], b.frames[1]);
        assert_eq!(out.frames[160], b.frames[80]);
        assert_eq!(out.trajectory[0].pose, a.trajectory[80].pose);
        assert_eq!(out.trajectory[160].pose, b.trajectory[80].pose);
        assert_eq!(out.timestamps(), (0..161).collect::<Vec<u32>>());
        // seam: no repeated pose around the shared start frame
        assert_ne!(out.trajectory[79].pose, out.trajectory[80].pose);
        assert_ne!(out.trajectory[80].pose, out.trajectory[81].pose);
    }

    #[test]
    fn trajectory_augment_rejects_mismatch() {
        let a = clip("a", 81, 0.01, 18.0);
        assert!(trajectory_augment(&a, &clip("b", 80, 0.01, 18.0)).is_err());
        let mut c = clip("c", 81, 0.01, 18.0);
        c.trajectory[0].pose.t.x += 1e-3;
        assert!(trajectory_augment(&a, &c).is_err());
        let mut d = clip("d", 81, 0.01, 18.0);
        d.trajectory[0].pose.t.x += 1e-8;
        assert!(trajectory_augment(&a, &d).is_ok());
    }

    #[test]
    fn reversal_involution() {
        let a = clip("a", 9, 0.03, 18.0);
        let out = trajectory_augment(&a, &a).unwrap();
        assert_eq!(out.frame_count(), 17);
        let head = crop_window(&[out], 0, 9).unwrap().remove(0);
        let rev: Vec<_> = a.trajectory.iter().rev().map(|s| s.pose).collect();
        assert_eq!(head.trajectory.iter().map(|s| s.pose).collect::<Vec<_>>(), rev);
    }

    #[test]
    fn crop_window_examples() {
        let s = scene(3, 81, 18.0);
        let long: Vec<CameraClip> = s
            .clips
            .windows(2)
            .map(|w| trajectory_augment(&w[0], &w[1]).unwrap())
            .collect();
        let first = crop_window(&long, 0, 81).unwrap();
        assert_eq!(first[0].timestamps(), (0..81).collect::<Vec<u32>>());
        let last = crop_window(&long, 80, 81).unwrap();
        assert_eq!(last[1].timestamps(), (80..161).collect::<Vec<u32>>());
        let mid = crop_window(&long, 40, 81).unwrap();
        for (c, src) in mid.iter().zip(&long) {
            assert_eq!(c.frames[0], src.frames[40]);
            assert_eq!(c.timestamps(), mid[0].timestamps());
        }
        assert!(crop_window(&long, 81, 81).is_err());
    }

    #[test]
    fn intrinsic_augment_18_to_24() {
        let c = clip("a", 3, 0.0, 18.0);
        let out = intrinsic_augment(&c, 24.0, &FocalSet::default()).unwrap();
        let z = out.frames[0].zooms[0];
        assert_eq!((z.resized_width, z.resized_height), (1109, 640));
        assert_eq!((z.out_width, z.out_height), (832, 480));
        assert_eq!((z.offset_x, z.offset_y), (138, 80));
        let k = out.trajectory[0].intrinsics;
        assert!((k.fx - 416.0 * 4.0 / 3.0).abs() < 1e-12);
        assert!((k.cx - (415.5 * 4.0 / 3.0 - 138.0)).abs() < 1e-12);
        assert_eq!((k.width, k.height), (832, 480));
        assert_eq!(out.trajectory[1].pose, c.trajectory[1].pose);
        assert_eq!(out.focal.focal_mm, 24.0);
    }

    #[test]
    fn intrinsic_augment_errors() {
        let c = clip("a", 2, 0.0, 24.0);
        assert!(intrinsic_augment(&c, 24.0, &FocalSet::default()).is_err());
        assert!(intrinsic_augment(&c, 18.0, &FocalSet::default()).is_err());
        assert!(intrinsic_augment(&c, 30.0, &FocalSet::default()).is_err());
        assert!(intrinsic_augment(&c, 30.0, &FocalSet::Any).is_ok());
    }

    #[test]
    fn zoom_apply_checks_dims() {
        let z = ZoomCrop::for_ratio(8, 10, 1.5);
        assert_eq!((z.resized_height, z.resized_width), (12, 15));
        let out = z.apply(&Raster::filled(8, 10, 3, 0.25)).unwrap();
        assert_eq!((out.height, out.width), (8, 10));
        assert!(out.data.iter().all(|&v| v == 0.25));
        assert!(z.apply(&Raster::zeros(9, 10, 3)).is_err());
    }

    #[test]
    fn pair_select_is_deterministic() {
        let s = scene(10, 161, 18.0);
        assert_eq!(pair_select(&s, 42).unwrap(), pair_select(&s, 42).unwrap());
        let p = pair_select(&s, 42).unwrap();
        assert_ne!(p.source.cam_id, p.target.cam_id);
        assert!(p.crop_start + 81 <= 161);
    }

    #[test]
    fn pair_select_at_longest_focal_never_augments() {
        let s = scene(4, 81, 50.0);
        for seed in 0..500 {
            let p = pair_select(&s, seed).unwrap();
            assert!(p.source.focal_mm.is_none() && p.target.focal_mm.is_none());
            assert_eq!(p.crop_start, 0);
        }
    }

    #[test]
    fn pair_select_errors() {
        assert!(pair_select(&scene(1, 81, 18.0), 0).is_err());
        assert!(pair_select(&scene(3, 40, 18.0), 0).is_err());
    }

    #[test]
    fn scene_rng_depends_on_domain_id_and_seed() {
        let draw = |d: &str, id: &str, s: u64| rand::Rng::gen::<u64>(&mut scene_rng(d, id, s));
        assert_eq!(draw("", "a", 1), draw("", "a", 1));
        assert_ne!(draw("", "a", 1), draw("", "a", 2));
        assert_ne!(draw("", "a", 1), draw("", "b", 1));
        assert_ne!(draw("", "a", 1), draw("augment", "a", 1));
    }

    #[test]
    fn augment_scene_produces_trajectory_and_focal_variants() {
        let s = scene(10, 81, 18.0);
        let out = augment_scene(&s, 3, &FocalSet::default()).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].clips.len(), 5);
        assert!(out[0].clips.iter().all(|c| c.frame_count() == 161));
        assert!(out[1].clips.iter().all(|c| c.focal.focal_mm > 18.0));
        assert_eq!(out, augment_scene(&s, 3, &FocalSet::default()).unwrap());
        let top = scene(4, 81, 50.0);
        assert_eq!(augment_scene(&top, 3, &FocalSet::default()).unwrap().len(), 1);
    }

    proptest! {
        #[test]
        fn zoom_window_stays_inside_resized_frame(h in 1usize..2000, w in 1usize..2000, ratio in 1.0001f64..4.0) {
            let z = ZoomCrop::for_ratio(h, w, ratio);
            prop_assert!(z.resized_height >= h && z.resized_width >= w);
            prop_assert!(z.offset_y + h <= z.resized_height);
            prop_assert!(z.offset_x + w <= z.resized_width);
        }

        #[test]
        fn trajectory_augment_length_law(n in 1usize..60) {
            let a = clip("a", n, 0.01, 18.0);
            let b = clip("b", n, 0.02, 18.0);
            prop_assert_eq!(trajectory_augment(&a, &b).unwrap().frame_count(), 2 * n - 1);
        }
    }
}
