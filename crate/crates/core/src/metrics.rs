//! Camera-pose fidelity (rotation / translation error after first-frame
//! normalization) and image fidelity (PSNR, SSIM).

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{relative, validate_rotation, PoseSE3};
use crate::raster::Raster;

/// PSNR reported for identical inputs.
pub const PSNR_CAP_DB: f64 = 99.0;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

const METRIC_ROTATION_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajError {
    pub per_frame_rot_deg: Vec<f64>,
    pub per_frame_trans_m: Vec<f64>,
    pub mean_rot_deg: f64,
    pub mean_trans_m: f64,
}

/// Geodesic angle between two rotations, in degrees.
///
/// Equals `arccos((tr(R_pred R_gt^T) - 1) / 2)`; evaluated as
/// `atan2(|sin|, cos)` with the sine taken from the skew part, which stays
/// accurate near 0° and 180° where `arccos` of the clamped trace does not.
pub fn rot_err_deg(r_pred: &Matrix3<f64>, r_gt: &Matrix3<f64>) -> Result<f64> {
    if !validate_rotation(r_pred, METRIC_ROTATION_TOL) || !validate_rotation(r_gt, METRIC_ROTATION_TOL) {
        return Err(Error::invalid("rotation error needs two rotation matrices"));
    }
    let d = r_pred * r_gt.transpose();
    let cos = ((d.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let sin = Vector3::new(d[(2, 1)] - d[(1, 2)], d[(0, 2)] - d[(2, 0)], d[(1, 0)] - d[(0, 1)]).norm() / 2.0;
    Ok(sin.atan2(cos).to_degrees())
}

pub fn trans_err(t_pred: &Vector3<f64>, t_gt: &Vector3<f64>) -> f64 {
    (t_pred - t_gt).norm()
}

/// Expresses every pose relative to the first one.
pub fn normalize_to_first(traj: &[PoseSE3]) -> Result<Vec<PoseSE3>> {
    let first = traj
        .first()
        .ok_or_else(|| Error::invalid("cannot normalize an empty trajectory"))?;
    let mut out: Vec<PoseSE3> = traj.iter().map(|p| relative(first, p)).collect();
    out[0] = PoseSE3::identity();
    Ok(out)
}

/// Drops the pose estimated for a frame that was prepended before estimation.
pub fn discard_prepended(traj: &[PoseSE3]) -> Result<&[PoseSE3]> {
    if traj.len() < 2 {
        return Err(Error::invalid("trajectory too short to discard a prepended frame"));
    }
    Ok(&traj[1..])
}

pub fn traj_errors(pred: &[PoseSE3], gt: &[PoseSE3], prenormalize: bool) -> Result<TrajError> {
    if pred.len() != gt.len() {
        return Err(Error::invalid(format!(
            "trajectory lengths differ: {} predicted vs {} ground truth",
            pred.len(),
            gt.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::invalid("trajectories must be non-empty"));
    }
    let (pred, gt) = if prenormalize {
        (normalize_to_first(pred)?, normalize_to_first(gt)?)
    } else {
        (pred.to_vec(), gt.to_vec())
    };
    let mut rot = Vec::with_capacity(pred.len());
    let mut trans = Vec::with_capacity(pred.len());
    for (p, g) in pred.iter().zip(&gt) {
        rot.push(rot_err_deg(&p.r, &g.r)?);
        trans.push(trans_err(&p.t, &g.t));
    }
    let n = rot.len() as f64;
    Ok(TrajError {
        mean_rot_deg: rot.iter().sum::<f64>() / n,
        mean_trans_m: trans.iter().sum::<f64>() / n,
        per_frame_rot_deg: rot,
        per_frame_trans_m: trans,
    })
}

fn check_pair(a: &Raster, b: &Raster, peak: f64) -> Result<()> {
    if !a.same_shape(b) {
        return Err(Error::invalid(format!(
            "image shapes differ: {}x{}x{} vs {}x{}x{}",
            a.height, a.width, a.channels, b.height, b.width, b.channels
        )));
    }
    if !(peak > 0.0) {
        return Err(Error::invalid("peak value must be positive"));
    }
    if a.data.is_empty() {
        return Err(Error::invalid("images are empty"));
    }
    Ok(())
}

pub fn mse(a: &Raster, b: &Raster) -> Result<f64> {
    check_pair(a, b, 1.0)?;
    let se: f64 = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum();
    Ok(se / a.data.len() as f64)
}

pub fn psnr(a: &Raster, b: &Raster, peak: f64) -> Result<f64> {
    check_pair(a, b, peak)?;
    Ok(psnr_from_mse(mse(a, b)?, peak))
}

pub fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        PSNR_CAP_DB
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let half = (SSIM_WINDOW / 2) as f64;
    let mut w = [0.0; SSIM_WINDOW];
    for (i, v) in w.iter_mut().enumerate() {
        let d = i as f64 - half;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= sum);
    w
}

pub fn ssim(a: &Raster, b: &Raster, peak: f64) -> Result<f64> {
    ssim_with(a, b, peak, Exec::default())
}

/// Mean SSIM over all fully-contained 11×11 Gaussian windows, averaged over
/// channels.
pub fn ssim_with(a: &Raster, b: &Raster, peak: f64, exec: Exec) -> Result<f64> {
    check_pair(a, b, peak)?;
    if a.height < SSIM_WINDOW || a.width < SSIM_WINDOW {
        return Err(Error::invalid(format!(
            "ssim needs images of at least {SSIM_WINDOW}x{SSIM_WINDOW}"
        )));
    }
    let c1 = (SSIM_K1 * peak).powi(2);
    let c2 = (SSIM_K2 * peak).powi(2);
    let win = gaussian_window();
    let (h, w, ch) = (a.height, a.width, a.channels);
    let (oh, ow) = (h - SSIM_WINDOW + 1, w - SSIM_WINDOW + 1);

    let per_channel = exec.map(ch, |c| {
        // horizontal pass over x, y, x², y², xy
        let mut horiz = vec![[0.0f64; 5]; h * ow];
        for y in 0..h {
            for x in 0..ow {
                let mut acc = [0.0f64; 5];
                for (k, &wk) in win.iter().enumerate() {
                    let p = a.get(y, x + k, c) as f64;
                    let q = b.get(y, x + k, c) as f64;
                    acc[0] += wk * p;
                    acc[1] += wk * q;
                    acc[2] += wk * p * p;
                    acc[3] += wk * q * q;
                    acc[4] += wk * p * q;
                }
                horiz[y * ow + x] = acc;
            }
        }
        let mut total = 0.0;
        for y in 0..oh {
            for x in 0..ow {
                let mut s = [0.0f64; 5];
                for (k, &wk) in win.iter().enumerate() {
                    let v = &horiz[(y + k) * ow + x];
                    for j in 0..5 {
                        s[j] += wk * v[j];
                    }
                }
                let (mu_a, mu_b) = (s[0], s[1]);
                let var_a = s[2] - mu_a * mu_a;
                let var_b = s[3] - mu_b * mu_b;
                let cov = s[4] - mu_a * mu_b;
                total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2))
                    / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
            }
        }
        total / (oh * ow) as f64
    });
    Ok(per_channel.iter().sum::<f64>() / ch as f64)
}

/// Metrics for one compared clip.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEval {
    pub name: String,
    pub frames: usize,
    pub mean_rot_deg: f64,
    pub mean_trans_m: f64,
    pub per_frame_rot_deg: Vec<f64>,
    pub per_frame_trans_m: Vec<f64>,
    pub psnr: Option<f64>,
    pub ssim: Option<f64>,
}

/// Aggregate report. `mean_*` average per-clip means (video mean);
/// `frame_mean_*` pool every frame of every clip.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub pairs: Vec<PairEval>,
    pub mean_rot_deg: f64,
    pub mean_trans_m: f64,
    pub frame_mean_rot_deg: f64,
    pub frame_mean_trans_m: f64,
    pub mean_psnr: Option<f64>,
    pub mean_ssim: Option<f64>,
}

impl EvalReport {
    /// Aggregates in index order so the report is independent of scheduling.
    pub fn from_pairs(pairs: Vec<PairEval>) -> Self {
        let n = pairs.len().max(1) as f64;
        let frames: usize = pairs.iter().map(|p| p.frames).sum();
        let frames_f = frames.max(1) as f64;
        let mean_opt = |f: &dyn Fn(&PairEval) -> Option<f64>| {
            let vals: Vec<f64> = pairs.iter().filter_map(f).collect();
            (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
        };
        EvalReport {
            mean_rot_deg: pairs.iter().map(|p| p.mean_rot_deg).sum::<f64>() / n,
            mean_trans_m: pairs.iter().map(|p| p.mean_trans_m).sum::<f64>() / n,
            frame_mean_rot_deg: pairs.iter().flat_map(|p| &p.per_frame_rot_deg).sum::<f64>() / frames_f,
            frame_mean_trans_m: pairs.iter().flat_map(|p| &p.per_frame_trans_m).sum::<f64>() / frames_f,
            mean_psnr: mean_opt(&|p| p.psnr),
            mean_ssim: mean_opt(&|p| p.ssim),
            pairs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{compose, rot_axis_angle, rot_z};
    use proptest::prelude::*;

    fn checker(n: usize) -> Raster {
        Raster::from_fn(n, n, 1, |y, x, _| if (x / 2 + y / 2) % 2 == 0 { 1.0 } else { 0.0 })
    }

    #[test]
    fn rotation_error_examples() {
        let i = Matrix3::identity();
        assert_eq!(rot_err_deg(&i, &i).unwrap(), 0.0);
        assert!((rot_err_deg(&rot_z(10f64.to_radians()), &i).unwrap() - 10.0).abs() < 1e-9);
        assert!((rot_err_deg(&rot_z(std::f64::consts::PI), &i).unwrap() - 180.0).abs() < 1e-9);
        let bad = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert!(rot_err_deg(&bad, &i).is_err());
    }

    #[test]
    fn translation_error_examples() {
        let a = Vector3::new(1.0, 2.0, 2.0);
        assert_eq!(trans_err(&a, &a), 0.0);
        assert_eq!(trans_err(&Vector3::zeros(), &a), 3.0);
        assert_eq!(trans_err(&a, &Vector3::zeros()), 3.0);
    }

    #[test]
    fn normalization_examples() {
        let traj: Vec<PoseSE3> = (0..5)
            .map(|i| PoseSE3::from_parts_unchecked(rot_z(0.1 * i as f64 + 0.3), Vector3::new(i as f64, 1.0, 0.0)))
            .collect();
        let n = normalize_to_first(&traj).unwrap();
        assert_eq!(n[0], PoseSE3::identity());
        let again = normalize_to_first(&n).unwrap();
        for (a, b) in n.iter().zip(&again) {
            assert!(a.max_abs_diff(b) < 1e-12);
        }
        assert!(normalize_to_first(&[]).is_err());
        assert_eq!(discard_prepended(&traj).unwrap().len(), 4);
    }

    #[test]
    fn trajectory_error_examples() {
        let gt = vec![PoseSE3::identity(), PoseSE3::identity()];
        let pred = vec![
            PoseSE3::identity(),
            PoseSE3::from_parts_unchecked(rot_z(5f64.to_radians()), Vector3::new(0.2, 0.0, 0.0)),
        ];
        let e = traj_errors(&pred, &gt, false).unwrap();
        assert!((e.mean_rot_deg - 2.5).abs() < 1e-9);
        assert!((e.mean_trans_m - 0.1).abs() < 1e-12);
        let z = traj_errors(&gt, &gt, true).unwrap();
        assert!(z.per_frame_rot_deg.iter().chain(&z.per_frame_trans_m).all(|&v| v == 0.0));
        assert!(traj_errors(&gt, &gt[..1], true).is_err());
    }

    #[test]
    fn psnr_examples() {
        let a = Raster::filled(4, 4, 3, 0.3);
        assert_eq!(psnr(&a, &a, 1.0).unwrap(), PSNR_CAP_DB);
        let b = Raster::filled(4, 4, 3, 0.4);
        assert!((psnr(&a, &b, 1.0).unwrap() - 20.0).abs() < 1e-5);
        let zero = Raster::filled(4, 4, 3, 0.0);
        let one = Raster::filled(4, 4, 3, 1.0);
        assert_eq!(psnr(&zero, &one, 1.0).unwrap(), 0.0);
        assert!(psnr(&a, &Raster::filled(4, 5, 3, 0.3), 1.0).is_err());
        assert!(psnr(&a, &a, 0.0).is_err());
    }

    #[test]
    fn ssim_examples() {
        let a = checker(24);
        assert!((ssim(&a, &a, 1.0).unwrap() - 1.0).abs() < 1e-9);
        let inv = Raster::from_fn(24, 24, 1, |y, x, c| 1.0 - a.get(y, x, c));
        assert!(ssim(&a, &inv, 1.0).unwrap() < 0.0);
        assert!(ssim(&Raster::zeros(10, 30, 1), &Raster::zeros(10, 30, 1), 1.0).is_err());
    }

    #[test]
    fn ssim_of_constants_reduces_to_luminance_term() {
        // plugged into the definition: sigma terms vanish, contrast/structure = c2/c2
        let (m1, m2) = (0.3f64, 0.45f64);
        let c1 = (SSIM_K1 * 1.0f64).powi(2);
        let expect = (2.0 * m1 * m2 + c1) / (m1 * m1 + m2 * m2 + c1);
        let a = Raster::filled(16, 16, 2, m1 as f32);
        let b = Raster::filled(16, 16, 2, m2 as f32);
        let got = ssim(&a, &b, 1.0).unwrap();
        // f32 storage of 0.3/0.45 limits agreement
        assert!((got - expect).abs() < 1e-6, "{got} vs {expect}");
    }

    #[test]
    fn ssim_execution_independent() {
        let a = Raster::from_fn(20, 25, 3, |y, x, c| ((x * 3 + y * 5 + c) % 11) as f32 / 11.0);
        let b = Raster::from_fn(20, 25, 3, |y, x, c| ((x * 7 + y * 2 + c) % 13) as f32 / 13.0);
        assert_eq!(
            ssim_with(&a, &b, 1.0, Exec::Sequential).unwrap(),
            ssim_with(&a, &b, 1.0, Exec::default()).unwrap()
        );
    }

    fn arccos_angle_of(r: &Matrix3<f64>) -> f64 {
        ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos().to_degrees()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn rot_err_matches_axis_angle(
            a in prop::array::uniform3(-1.0f64..1.0),
            b in prop::array::uniform3(-1.0f64..1.0),
            ta in 0.0f64..3.1,
            tb in 0.0f64..3.1,
        ) {
            prop_assume!(Vector3::from(a).norm() > 1e-3 && Vector3::from(b).norm() > 1e-3);
            let ra = rot_axis_angle(&Vector3::from(a), ta);
            let rb = rot_axis_angle(&Vector3::from(b), tb);
            let e = rot_err_deg(&ra, &rb).unwrap();
            prop_assert!((0.0..=180.0).contains(&e));
            prop_assert!((e - rot_err_deg(&rb, &ra).unwrap()).abs() < 1e-9);
            let geo = arccos_angle_of(&(ra * rb.transpose()));
            // arccos conditioning degrades near the ends of the range
            let tol = if e > 1.0 && e < 179.0 { 1e-9 } else { 1e-5 };
            prop_assert!((e - geo).abs() < tol, "{} vs {}", e, geo);
        }

        #[test]
        fn psnr_symmetric_and_decreasing(v in 0.0f32..1.0, d1 in 0.001f32..0.2, d2 in 0.001f32..0.2) {
            let a = Raster::filled(3, 3, 1, v);
            let b = Raster::filled(3, 3, 1, v + d1);
            prop_assert_eq!(psnr(&a, &b, 1.0).unwrap(), psnr(&b, &a, 1.0).unwrap());
            let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
            prop_assume!(hi - lo > 1e-4);
            prop_assert!(psnr_from_mse((lo * lo) as f64, 1.0) > psnr_from_mse((hi * hi) as f64, 1.0));
        }

        #[test]
        fn ssim_symmetric_and_bounded(seed_a in 0usize..500, seed_b in 0usize..500) {
            let a = Raster::from_fn(14, 14, 1, |y, x, _| ((x * 7 + y * 3 + seed_a) % 17) as f32 / 16.0);
            let b = Raster::from_fn(14, 14, 1, |y, x, _| ((x * 5 + y * 11 + seed_b) % 19) as f32 / 18.0);
            let s = ssim(&a, &b, 1.0).unwrap();
            prop_assert!((-1.0..=1.0).contains(&s));
            prop_assert!((s - ssim(&b, &a, 1.0).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn prenormalized_errors_ignore_global_motion(
            axis in prop::array::uniform3(0.1f64..1.0),
            angle in 0.0f64..3.0,
            shift in prop::array::uniform3(-5.0f64..5.0),
        ) {
            let g = PoseSE3::from_parts_unchecked(rot_axis_angle(&Vector3::from(axis), angle), Vector3::from(shift));
            let gt: Vec<PoseSE3> = (0..6)
                .map(|i| PoseSE3::from_parts_unchecked(rot_z(0.2 * i as f64), Vector3::new(0.1 * i as f64, 0.0, 1.0)))
                .collect();
            let moved: Vec<PoseSE3> = gt.iter().map(|p| compose(&g, p)).collect();
            let e = traj_errors(&moved, &gt, true).unwrap();
            prop_assert!(e.per_frame_rot_deg.iter().all(|&v| v <= 1e-9));
            prop_assert!(e.per_frame_trans_m.iter().all(|&v| v <= 1e-9));
            let n1 = normalize_to_first(&moved).unwrap();
            let n2 = normalize_to_first(&gt).unwrap();
            for (a, b) in n1.iter().zip(&n2) {
                prop_assert!(a.max_abs_diff(b) <= 1e-9);
            }
        }
    }
}
