//! Command-line front end.
//!
//! Exit codes: 0 success, 2 bad input (usage, validation), 1 I/O failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::augment::{augment_scene, pair_select_with, scene_rng, FocalSet, FrameRef, PairConfig, WINDOW_FRAMES};
use crate::dataset::{write_synth_dataset, SynthDatasetConfig};
use crate::error::{Error, Result};
use crate::exec::{with_workers, Exec};
use crate::geometry::{Plane, DEFAULT_SENSOR_WIDTH_MM};
use crate::homography::{infinite_homography, plane_homography};
use crate::manifest::{discover_manifests, load_manifest_with, manifest_file_for, write_scene};
use crate::metrics::{discard_prepended, psnr, ssim_with, traj_errors, EvalReport, PairEval};
use crate::raster::Raster;
use crate::trajectory::{self, CameraState};
use crate::warp::warp_homography;

#[derive(Parser, Debug)]
#[command(name = "homowarp", version, about = "Infinite-homography geometry, warping and multi-camera dataset tools")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct GlobalArgs {
    /// Seed for every stochastic step
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sensor width used to convert focal lengths to pixels
    #[arg(long, global = true)]
    sensor_width_mm: Option<f64>,
    /// Comma-separated focal lengths allowed for intrinsic augmentation
    #[arg(long, global = true, value_delimiter = ',')]
    focals: Option<Vec<f64>>,
    /// Worker threads (default: available cores)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Print machine-readable JSON on stdout
    #[arg(long, global = true)]
    json: bool,
    /// Compute everything but write only manifests / metadata
    #[arg(long, global = true)]
    dry_run: bool,
    /// Output file or directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON file with defaults for the flags above
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Infinite and plane-induced homographies between two camera records
    Homography(HomographyArgs),
    /// Warp an image by a homography
    Warp(WarpArgs),
    /// Render a synthetic multi-camera scene
    Synth(SynthArgs),
    /// Trajectory and intrinsic augmentation over manifests
    Augment(AugmentArgs),
    /// Deterministic training pairs per scene
    Pairs(PairsArgs),
    /// Pose and image metrics between predictions and ground truth
    Eval(EvalArgs),
}

#[derive(Args, Debug)]
struct PosePairArgs {
    /// Trajectory JSON of the source camera
    #[arg(long)]
    source: Option<PathBuf>,
    /// Trajectory JSON of the target camera (default: the source file)
    #[arg(long)]
    target: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    source_frame: u32,
    #[arg(long, default_value_t = 0)]
    target_frame: u32,
    /// Scene plane as nx,ny,nz,d in the source frame
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    plane: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct HomographyArgs {
    #[command(flatten)]
    poses: PosePairArgs,
}

#[derive(Args, Debug)]
struct WarpArgs {
    /// PNG or raster dump
    #[arg(long)]
    input: PathBuf,
    /// JSON with a homography (9 numbers, 3x3 rows, or homography output)
    #[arg(long, conflicts_with = "source")]
    homography: Option<PathBuf>,
    #[command(flatten)]
    poses: PosePairArgs,
    /// Where to write the validity mask (default: next to the output)
    #[arg(long)]
    mask: Option<PathBuf>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, default_value = "scene")]
    prefix: String,
    #[arg(long, default_value_t = 1)]
    scenes: usize,
    #[arg(long, default_value_t = 10)]
    cameras: usize,
    #[arg(long, default_value_t = WINDOW_FRAMES)]
    frames: usize,
    #[arg(long, default_value_t = 832)]
    width: u32,
    #[arg(long, default_value_t = 480)]
    height: u32,
    #[arg(long, default_value_t = 18.0)]
    focal_mm: f64,
    #[arg(long, default_value_t = 400)]
    points: usize,
    #[arg(long, default_value_t = 15.0)]
    fps: f64,
}

#[derive(Args, Debug)]
struct AugmentArgs {
    /// Manifest files or directories searched for manifest.json
    #[arg(required = true)]
    manifests: Vec<PathBuf>,
}

#[derive(Args, Debug)]
struct PairsArgs {
    #[arg(required = true)]
    manifests: Vec<PathBuf>,
    /// Pairs per scene; pair k uses seed + k
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = WINDOW_FRAMES)]
    window: usize,
    #[arg(long, default_value_t = 0.5)]
    augment_probability: f64,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Prediction: trajectory JSON, manifest, or directory of manifests
    #[arg(long)]
    pred: PathBuf,
    /// Ground truth, same forms as --pred
    #[arg(long)]
    gt: PathBuf,
    /// Compare raw poses instead of poses relative to the first frame
    #[arg(long)]
    no_normalize: bool,
    /// The prediction carries one extra leading frame to drop
    #[arg(long)]
    drop_first: bool,
    /// Skip PSNR / SSIM even when frames are available
    #[arg(long)]
    no_images: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    sensor_width_mm: Option<f64>,
    allowed_focals_mm: Option<Vec<f64>>,
    workers: Option<usize>,
    out: Option<PathBuf>,
}

/// Effective settings after merging flags over the optional config file.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub sensor_width_mm: f64,
    pub allowed_focals_mm: Vec<f64>,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub json: bool,
    pub dry_run: bool,
}

impl RunConfig {
    fn resolve(g: &GlobalArgs) -> Result<Self> {
        let file = match &g.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                serde_json::from_str::<ConfigFile>(&text).map_err(|source| Error::Json {
                    path: p.clone(),
                    source,
                })?
            }
            None => ConfigFile::default(),
        };
        let cfg = RunConfig {
            seed: g.seed.or(file.seed),
            sensor_width_mm: g.sensor_width_mm.or(file.sensor_width_mm).unwrap_or(DEFAULT_SENSOR_WIDTH_MM),
            allowed_focals_mm: g
                .focals
                .clone()
                .or(file.allowed_focals_mm)
                .unwrap_or_else(|| crate::augment::DATASET_FOCALS_MM.to_vec()),
            workers: g
                .workers
                .or(file.workers)
                .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
            out: g.out.clone().or(file.out),
            json: g.json,
            dry_run: g.dry_run,
        };
        if cfg.workers == 0 {
            return Err(Error::invalid("--workers must be at least 1"));
        }
        if !(cfg.sensor_width_mm.is_finite() && cfg.sensor_width_mm > 0.0) {
            return Err(Error::invalid("--sensor-width-mm must be positive"));
        }
        if cfg.allowed_focals_mm.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
            return Err(Error::invalid("--focals must be positive"));
        }
        Ok(cfg)
    }

    fn seed(&self, command: &str) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::invalid(format!("{command} is stochastic and needs --seed")))
    }

    fn out(&self, command: &str) -> Result<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| Error::invalid(format!("{command} needs --out")))
    }

    fn focal_set(&self) -> FocalSet {
        FocalSet::Only(self.allowed_focals_mm.clone())
    }
}

/// What a subcommand reports: the JSON form and a human rendering.
struct Report {
    json: Value,
    text: String,
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok((report, json)) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&report.json).expect("reports serialize"));
            } else {
                print!("{}", report.text);
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                2
            } else {
                1
            }
        }
    }
}

fn execute(cli: &Cli) -> Result<(Report, bool)> {
    let cfg = RunConfig::resolve(&cli.global)?;
    let report = with_workers(cfg.workers, || match &cli.command {
        Command::Homography(a) => homography_cmd(&cfg, a),
        Command::Warp(a) => warp_cmd(&cfg, a),
        Command::Synth(a) => synth_cmd(&cfg, a),
        Command::Augment(a) => augment_cmd(&cfg, a),
        Command::Pairs(a) => pairs_cmd(&cfg, a),
        Command::Eval(a) => eval_cmd(&cfg, a),
    })?;
    Ok((report, cfg.json))
}

fn row_major(m: &Matrix3<f64>) -> [f64; 9] {
    let mut out = [0.0; 9];
    for r in 0..3 {
        for c in 0..3 {
            out[3 * r + c] = m[(r, c)];
        }
    }
    out
}

fn matrix_text(name: &str, m: &Matrix3<f64>) -> String {
    let mut s = format!("{name}:\n");
    for r in 0..3 {
        let _ = writeln!(s, "  {:>14.8} {:>14.8} {:>14.8}", m[(r, 0)], m[(r, 1)], m[(r, 2)]);
    }
    s
}

fn state_at<'a>(states: &'a [CameraState], frame: u32, path: &Path) -> Result<&'a CameraState> {
    states
        .iter()
        .find(|s| s.frame == frame)
        .ok_or_else(|| Error::invalid(format!("{} has no frame {frame}", path.display())))
}

struct PosePair {
    source: CameraState,
    target: CameraState,
    r: Matrix3<f64>,
    t: Vector3<f64>,
    h_inf: Matrix3<f64>,
    plane_h: Option<Matrix3<f64>>,
}

fn pose_pair(a: &PosePairArgs) -> Result<PosePair> {
    let src_path = a
        .source
        .as_ref()
        .ok_or_else(|| Error::invalid("--source trajectory is required"))?;
    let src_states = trajectory::read(src_path)?;
    let tgt_path = a.target.as_ref().unwrap_or(src_path);
    let tgt_states = if a.target.is_some() {
        trajectory::read(tgt_path)?
    } else {
        src_states.clone()
    };
    let source = *state_at(&src_states, a.source_frame, src_path)?;
    let target = *state_at(&tgt_states, a.target_frame, tgt_path)?;
    let motion = source.pose.motion_to(&target.pose);
    let h_inf = infinite_homography(&source.intrinsics, &target.intrinsics, &motion.r)?;
    let plane_h = match &a.plane {
        Some(p) if p.len() != 4 => return Err(Error::invalid("--plane takes nx,ny,nz,d")),
        Some(p) => {
            let plane = Plane::new(Vector3::new(p[0], p[1], p[2]), p[3])?;
            Some(plane_homography(&source.intrinsics, &target.intrinsics, &motion.r, &motion.t, &plane)?)
        }
        None => None,
    };
    Ok(PosePair {
        source,
        target,
        r: motion.r,
        t: motion.t,
        h_inf,
        plane_h,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

fn homography_cmd(cfg: &RunConfig, a: &HomographyArgs) -> Result<Report> {
    let p = pose_pair(&a.poses)?;
    let json = json!({
        "source_frame": p.source.frame,
        "target_frame": p.target.frame,
        "r": row_major(&p.r),
        "t": [p.t.x, p.t.y, p.t.z],
        "h_inf": row_major(&p.h_inf),
        "plane_h": p.plane_h.as_ref().map(row_major),
    });
    let mut text = format!("frames {} -> {}\n", p.source.frame, p.target.frame);
    text += &matrix_text("R", &p.r);
    let _ = writeln!(text, "t: {:.8} {:.8} {:.8}", p.t.x, p.t.y, p.t.z);
    text += &matrix_text("H_inf", &p.h_inf);
    if let Some(h) = &p.plane_h {
        text += &matrix_text("H_plane", h);
    }
    if let (Some(out), false) = (&cfg.out, cfg.dry_run) {
        write_text(out, &pretty(&json))?;
    }
    Ok(Report { json, text })
}

fn parse_homography(v: &Value) -> Option<Matrix3<f64>> {
    let num = |x: &Value| x.as_f64();
    match v {
        Value::Array(items) if items.len() == 9 => {
            let vals: Option<Vec<f64>> = items.iter().map(num).collect();
            vals.map(|v| Matrix3::from_row_slice(&v))
        }
        Value::Array(rows) if rows.len() == 3 => {
            let mut vals = Vec::with_capacity(9);
            for row in rows {
                let row = row.as_array().filter(|r| r.len() == 3)?;
                for x in row {
                    vals.push(num(x)?);
                }
            }
            Some(Matrix3::from_row_slice(&vals))
        }
        Value::Object(map) => ["h", "plane_h", "h_inf"]
            .iter()
            .filter_map(|k| map.get(*k))
            .find(|v| !v.is_null())
            .and_then(parse_homography),
        _ => None,
    }
}

fn default_mask_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("warp");
    out.with_file_name(format!("{stem}_mask.png"))
}

fn warp_cmd(cfg: &RunConfig, a: &WarpArgs) -> Result<Report> {
    let out = cfg.out("warp")?.to_path_buf();
    let (h, dims) = match &a.homography {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            let v: Value = serde_json::from_str(&text).map_err(|source| Error::Json {
                path: p.clone(),
                source,
            })?;
            let h = parse_homography(&v)
                .ok_or_else(|| Error::invalid(format!("{} does not hold a 3x3 homography", p.display())))?;
            (h, None)
        }
        None => {
            let p = pose_pair(&a.poses)?;
            let k = p.target.intrinsics;
            (p.plane_h.unwrap_or(p.h_inf), Some((k.height as usize, k.width as usize)))
        }
    };
    let src = Raster::read_any(&a.input)?;
    let (dh, dw) = dims.unwrap_or((src.height, src.width));
    let (oh, ow) = (a.height.unwrap_or(dh), a.width.unwrap_or(dw));
    let result = warp_homography(&src, &h, oh, ow)?;
    let mask_path = a.mask.clone().unwrap_or_else(|| default_mask_path(&out));
    if !cfg.dry_run {
        for p in [&out, &mask_path] {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
        }
        result.raster.write_any(&out)?;
        result.mask_raster().write_any(&mask_path)?;
    }
    let valid = result.valid_count();
    let total = oh * ow;
    let json = json!({
        "output": out,
        "mask": mask_path,
        "height": oh,
        "width": ow,
        "valid_pixels": valid,
        "valid_fraction": valid as f64 / total as f64,
        "h": row_major(&h),
    });
    let text = format!(
        "warped {} -> {} ({ow}x{oh}), {valid}/{total} valid pixels\n",
        a.input.display(),
        out.display()
    );
    Ok(Report { json, text })
}

fn synth_cmd(cfg: &RunConfig, a: &SynthArgs) -> Result<Report> {
    let seed = cfg.seed("synth")?;
    let out = cfg.out("synth")?.to_path_buf();
    if a.scenes == 0 {
        return Err(Error::invalid("--scenes must be at least 1"));
    }
    let configs: Vec<SynthDatasetConfig> = (0..a.scenes)
        .map(|i| {
            let scene_id = format!("{}_{i:04}", a.prefix);
            let scene_seed = scene_rng("synth", &scene_id, seed).gen::<u64>();
            SynthDatasetConfig {
                scene_id,
                seed: scene_seed,
                cameras: a.cameras,
                frames: a.frames,
                width: a.width,
                height: a.height,
                focal_mm: a.focal_mm,
                sensor_width_mm: cfg.sensor_width_mm,
                points: a.points,
                fps: a.fps,
            }
        })
        .collect();
    for c in &configs {
        let scene = crate::dataset::synth_manifest(c, &out.join(&c.scene_id))?;
        manifest_file_for(&scene)?;
    }
    let exec = Exec::default();
    let paths = exec
        .map(configs.len(), |i| write_synth_dataset(&configs[i], &out, !cfg.dry_run, exec))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut text = String::new();
    for (c, p) in configs.iter().zip(&paths) {
        let _ = writeln!(
            text,
            "{}: {} cameras x {} frames ({}x{}) -> {}",
            c.scene_id,
            c.cameras,
            c.frames,
            c.width,
            c.height,
            p.display()
        );
    }
    Ok(Report {
        json: json!({ "manifests": paths, "frames_written": !cfg.dry_run }),
        text,
    })
}

fn load_scenes(cfg: &RunConfig, roots: &[PathBuf]) -> Result<Vec<crate::augment::SceneManifest>> {
    let mut paths = Vec::new();
    for r in roots {
        paths.extend(discover_manifests(r)?);
    }
    if paths.is_empty() {
        return Err(Error::invalid("no manifest.json found under the given paths"));
    }
    paths
        .iter()
        .map(|p| load_manifest_with(p, cfg.sensor_width_mm))
        .collect()
}

fn augment_cmd(cfg: &RunConfig, a: &AugmentArgs) -> Result<Report> {
    let seed = cfg.seed("augment")?;
    let out = cfg.out("augment")?.to_path_buf();
    let scenes = load_scenes(cfg, &a.manifests)?;
    let allowed = cfg.focal_set();
    let exec = Exec::default();
    let produced = exec
        .map(scenes.len(), |i| augment_scene(&scenes[i], seed, &allowed))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let produced: Vec<_> = produced.into_iter().flatten().collect();
    let mut ids = std::collections::BTreeSet::new();
    for s in &produced {
        manifest_file_for(s)?;
        if !ids.insert(s.scene_id.as_str()) {
            return Err(Error::invalid(format!("augmented scene id {} produced twice", s.scene_id)));
        }
    }
    if !cfg.dry_run {
        for s in &produced {
            for c in &s.clips {
                if let Some(f) = c.frames.iter().find(|f| !f.path.is_file()) {
                    return Err(Error::io(
                        &f.path,
                        std::io::Error::new(std::io::ErrorKind::NotFound, "source frame is missing"),
                    ));
                }
            }
        }
    }
    let paths = exec
        .map(produced.len(), |i| write_scene(&produced[i], &out, !cfg.dry_run, exec))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut text = String::new();
    for (s, p) in produced.iter().zip(&paths) {
        let _ = writeln!(
            text,
            "{}: {} clips x {} frames, {:.0} mm -> {}",
            s.scene_id,
            s.clips.len(),
            s.clips[0].frame_count(),
            s.clips[0].focal.focal_mm,
            p.display()
        );
    }
    Ok(Report {
        json: json!({ "manifests": paths, "frames_written": !cfg.dry_run }),
        text,
    })
}

fn pairs_cmd(cfg: &RunConfig, a: &PairsArgs) -> Result<Report> {
    let seed = cfg.seed("pairs")?;
    if a.count == 0 {
        return Err(Error::invalid("--count must be at least 1"));
    }
    if !(0.0..=1.0).contains(&a.augment_probability) {
        return Err(Error::invalid("--augment-probability must lie in [0, 1]"));
    }
    let scenes = load_scenes(cfg, &a.manifests)?;
    let pc = PairConfig {
        allowed: cfg.focal_set(),
        augment_probability: a.augment_probability,
        window: a.window,
    };
    let mut pairs = Vec::new();
    for s in &scenes {
        for k in 0..a.count {
            pairs.push(pair_select_with(s, seed.wrapping_add(k), &pc)?);
        }
    }
    let text_json = pretty(&pairs);
    if let (Some(out), false) = (&cfg.out, cfg.dry_run) {
        write_text(out, &text_json)?;
    }
    let mut text = String::new();
    for p in &pairs {
        let focal = |f: Option<f64>| f.map(|f| format!("@{f}mm")).unwrap_or_default();
        let _ = writeln!(
            text,
            "{} seed {}: {}{} -> {}{} frames {}..{}",
            p.scene_id,
            p.seed,
            p.source.cam_id,
            focal(p.source.focal_mm),
            p.target.cam_id,
            focal(p.target.focal_mm),
            p.crop_start,
            p.crop_start + p.window
        );
    }
    Ok(Report {
        json: serde_json::to_value(&pairs).expect("pairs serialize"),
        text,
    })
}

struct EvalEntry {
    name: String,
    states: Vec<CameraState>,
    frames: Option<Vec<FrameRef>>,
    bare: bool,
}

fn load_eval_side(cfg: &RunConfig, path: &Path) -> Result<Vec<EvalEntry>> {
    let manifests = if path.is_dir() {
        discover_manifests(path)?
    } else {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let v: Value = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        if v.is_array() {
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            return Ok(vec![EvalEntry {
                name,
                states: trajectory::read(path)?,
                frames: None,
                bare: true,
            }]);
        }
        vec![path.to_path_buf()]
    };
    if manifests.is_empty() {
        return Err(Error::invalid(format!("no manifest.json under {}", path.display())));
    }
    let mut out = Vec::new();
    for m in manifests {
        let scene = load_manifest_with(&m, cfg.sensor_width_mm)?;
        for c in scene.clips {
            out.push(EvalEntry {
                name: format!("{}/{}", scene.scene_id, c.cam_id),
                states: c.trajectory,
                frames: Some(c.frames),
                bare: false,
            });
        }
    }
    Ok(out)
}

fn image_scores(pred: &[FrameRef], gt: &[FrameRef], exec: Exec) -> Result<(f64, f64)> {
    if pred.len() != gt.len() {
        return Err(Error::invalid(format!(
            "frame counts differ: {} predicted vs {} ground truth",
            pred.len(),
            gt.len()
        )));
    }
    let scores = exec
        .map(gt.len(), |i| {
            let a = pred[i].load()?;
            let b = gt[i].load()?;
            Ok((psnr(&a, &b, 1.0)?, ssim_with(&a, &b, 1.0, Exec::Sequential)?))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let n = scores.len().max(1) as f64;
    Ok((
        scores.iter().map(|s| s.0).sum::<f64>() / n,
        scores.iter().map(|s| s.1).sum::<f64>() / n,
    ))
}

fn eval_cmd(cfg: &RunConfig, a: &EvalArgs) -> Result<Report> {
    let pred = load_eval_side(cfg, &a.pred)?;
    let gt = load_eval_side(cfg, &a.gt)?;
    let matched: Vec<(&EvalEntry, &EvalEntry)> = if pred.len() == 1 && gt.len() == 1 && (pred[0].bare || gt[0].bare) {
        vec![(&pred[0], &gt[0])]
    } else {
        let by_name: BTreeMap<&str, &EvalEntry> = pred.iter().map(|e| (e.name.as_str(), e)).collect();
        gt.iter()
            .map(|g| {
                by_name
                    .get(g.name.as_str())
                    .map(|p| (*p, g))
                    .ok_or_else(|| Error::invalid(format!("prediction has no trajectory for {}", g.name)))
            })
            .collect::<Result<Vec<_>>>()?
    };
    let exec = Exec::default();
    let pairs = matched
        .iter()
        .map(|(p, g)| {
            let mut pred_poses: Vec<_> = p.states.iter().map(|s| s.pose).collect();
            let mut pred_frames = p.frames.clone();
            if a.drop_first {
                pred_poses = discard_prepended(&pred_poses)?.to_vec();
                if let Some(f) = pred_frames.as_mut() {
                    f.remove(0);
                }
            }
            let gt_poses: Vec<_> = g.states.iter().map(|s| s.pose).collect();
            let err = traj_errors(&pred_poses, &gt_poses, !a.no_normalize)?;
            let (psnr, ssim) = match (&pred_frames, &g.frames, a.no_images) {
                (Some(pf), Some(gf), false) => {
                    let (p, s) = image_scores(pf, gf, exec)?;
                    (Some(p), Some(s))
                }
                _ => (None, None),
            };
            Ok(PairEval {
                name: g.name.clone(),
                frames: gt_poses.len(),
                mean_rot_deg: err.mean_rot_deg,
                mean_trans_m: err.mean_trans_m,
                per_frame_rot_deg: err.per_frame_rot_deg,
                per_frame_trans_m: err.per_frame_trans_m,
                psnr,
                ssim,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = EvalReport::from_pairs(pairs);
    let body = pretty(&report);
    if let (Some(out), false) = (&cfg.out, cfg.dry_run) {
        write_text(out, &body)?;
    }
    let opt = |v: Option<f64>, prec: usize| v.map(|x| format!("{x:.prec$}")).unwrap_or_else(|| "-".into());
    let mut text = format!(
        "{:<28} {:>6} {:>10} {:>10} {:>8} {:>7}\n",
        "trajectory", "frames", "rot_deg", "trans_m", "psnr", "ssim"
    );
    for p in &report.pairs {
        let _ = writeln!(
            text,
            "{:<28} {:>6} {:>10.4} {:>10.4} {:>8} {:>7}",
            p.name,
            p.frames,
            p.mean_rot_deg,
            p.mean_trans_m,
            opt(p.psnr, 2),
            opt(p.ssim, 4)
        );
    }
    let _ = writeln!(
        text,
        "{:<28} {:>6} {:>10.4} {:>10.4} {:>8} {:>7}",
        "mean (per video)",
        "",
        report.mean_rot_deg,
        report.mean_trans_m,
        opt(report.mean_psnr, 2),
        opt(report.mean_ssim, 4)
    );
    let _ = writeln!(
        text,
        "{:<28} {:>6} {:>10.4} {:>10.4}",
        "mean (per frame)", "", report.frame_mean_rot_deg, report.frame_mean_trans_m
    );
    Ok(Report {
        json: serde_json::to_value(&report).expect("report serializes"),
        text,
    })
}
