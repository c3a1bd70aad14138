//! Independent reference implementations shared by the integration tests
//! and the acceptance suite.
#![allow(dead_code)]

use matrixgt::geometry::{Box2, Vec3};
use matrixgt::kitti::{Difficulty, KittiLabel, CAR, DONT_CARE};
use matrixgt::rng::Xorshift64Star;
use matrixgt::scene_sim::{face_depth, triangle_covers, CameraModel, ObjectClass, SceneObject, ScreenTriangle, Size3};
use matrixgt::Camera;

/// Corner quads of a cuboid, same corner numbering as `SceneObject::corners`.
const FACES: [[usize; 4]; 6] = [
    [0, 2, 6, 4],
    [1, 5, 7, 3],
    [0, 4, 5, 1],
    [2, 3, 7, 6],
    [0, 1, 3, 2],
    [4, 6, 7, 5],
];

fn screen_triangles(camera: &Camera, obj: &SceneObject) -> Option<Vec<ScreenTriangle>> {
    let c = obj.corners();
    if c.iter().any(|p| p.z <= camera.depth.near_m()) {
        return None;
    }
    let tri = |a: usize, b: usize, d: usize| {
        let verts = [c[a], c[b], c[d]];
        let screen = verts.map(|v| {
            let p = camera.project_point(v).unwrap();
            (p.u, p.v)
        });
        ScreenTriangle { camera: verts, screen }
    };
    Some(FACES.iter().flat_map(|f| [tri(f[0], f[1], f[2]), tri(f[0], f[2], f[3])]).collect())
}

/// Nearest surface per pixel center, testing every triangle at every pixel.
///
/// Same coverage and depth arithmetic as the renderer, no bounding boxes and
/// no incremental state: returns `(depth, object index)`.
pub fn brute_force_zbuffer(camera: &Camera, objects: &[SceneObject]) -> (Vec<f64>, Vec<Option<usize>>) {
    let (w, h) = (camera.width as usize, camera.height as usize);
    let tris: Vec<(usize, Vec<ScreenTriangle>)> = objects
        .iter()
        .enumerate()
        .filter_map(|(i, o)| screen_triangles(camera, o).map(|t| (i, t)))
        .collect();
    let mut depth = vec![f64::INFINITY; w * h];
    let mut owner = vec![None; w * h];
    for y in 0..h {
        for x in 0..w {
            let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
            for (i, ts) in &tris {
                for t in ts {
                    if !triangle_covers(t, px, py) {
                        continue;
                    }
                    if let Some(z) = face_depth(t, camera, px, py) {
                        if z < depth[y * w + x] {
                            depth[y * w + x] = z;
                            owner[y * w + x] = Some(*i);
                        }
                    }
                }
            }
        }
    }
    (depth, owner)
}

/// Entry distance of the ray `t·dir` into an oriented box, by slab clipping
/// in the box frame. `dir` has unit z so `t` is the camera depth.
pub fn ray_box_entry(obj: &SceneObject, dir: Vec3<f64>) -> Option<f64> {
    let (s, c) = obj.yaw.sin_cos();
    // camera -> local: inverse of the yaw rotation
    let to_local = |v: Vec3<f64>| Vec3::new(c * v.x - s * v.z, v.y, s * v.x + c * v.z);
    let o = to_local(Vec3::new(0.0, 0.0, 0.0) - obj.center);
    let d = to_local(dir);
    let half = [obj.size.length / 2.0, obj.size.height / 2.0, obj.size.width / 2.0];
    let (oo, dd) = ([o.x, o.y, o.z], [d.x, d.y, d.z]);
    let (mut t0, mut t1) = (0.0f64, f64::INFINITY);
    for k in 0..3 {
        if dd[k].abs() < 1e-15 {
            if oo[k].abs() > half[k] {
                return None;
            }
            continue;
        }
        let a = (-half[k] - oo[k]) / dd[k];
        let b = (half[k] - oo[k]) / dd[k];
        t0 = t0.max(a.min(b));
        t1 = t1.min(a.max(b));
    }
    (t0 <= t1 && t0 > 0.0).then_some(t0)
}

/// Nearest depth per pixel center from analytic ray/box intersection.
pub fn geometric_depth(camera: &Camera, objects: &[SceneObject]) -> Vec<f64> {
    let (w, h) = (camera.width as usize, camera.height as usize);
    let mut out = vec![f64::INFINITY; w * h];
    for y in 0..h {
        for x in 0..w {
            let dir = Vec3::new(
                (x as f64 + 0.5 - camera.cx) / camera.fx,
                (y as f64 + 0.5 - camera.cy) / camera.fy,
                1.0,
            );
            for o in objects {
                if o.corners().iter().any(|p| p.z <= camera.depth.near_m()) {
                    continue;
                }
                if let Some(t) = ray_box_entry(o, dir) {
                    out[y * w + x] = out[y * w + x].min(t);
                }
            }
        }
    }
    out
}

/// Distance from a pixel center to the nearest projected cuboid edge, pixels.
pub fn silhouette_distance(camera: &Camera, objects: &[SceneObject], x: f64, y: f64) -> f64 {
    let mut best = f64::INFINITY;
    for o in objects {
        let Some(ts) = screen_triangles(camera, o) else { continue };
        for t in ts {
            for k in 0..3 {
                let (a, b) = (t.screen[k], t.screen[(k + 1) % 3]);
                let (dx, dy) = (b.0 - a.0, b.1 - a.1);
                let len2 = dx * dx + dy * dy;
                let u = if len2 == 0.0 { 0.0 } else { (((x - a.0) * dx + (y - a.1) * dy) / len2).clamp(0.0, 1.0) };
                best = best.min((x - a.0 - u * dx).hypot(y - a.1 - u * dy));
            }
        }
    }
    best
}

/// A small scene of random cuboids in front of a `w`×`h` camera.
pub fn random_scene(seed: u64, w: u32, h: u32) -> (Camera, Vec<SceneObject>) {
    let mut rng = Xorshift64Star::new(seed);
    let f = rng.uniform(40.0, 90.0);
    let camera = CameraModel::new(f, f, w as f64 / 2.0, h as f64 / 2.0, w, h, Default::default()).unwrap();
    let n = rng.range_inclusive(2, 6);
    let objects = (1..=n)
        .map(|id| {
            let z = rng.uniform(4.0, 30.0);
            let class = if rng.next_f64() < 0.7 { ObjectClass::Vehicle } else { ObjectClass::Distractor };
            SceneObject::new(
                id,
                class,
                Vec3::new(rng.uniform(-0.3, 0.3) * z, rng.uniform(-0.2, 0.3) * z, z),
                Size3 {
                    length: rng.uniform(0.5, 5.0),
                    width: rng.uniform(0.5, 2.5),
                    height: rng.uniform(0.5, 2.5),
                },
                rng.uniform(-3.2, 3.2),
            )
            .unwrap()
        })
        .collect();
    (camera, objects)
}

/// Exact hull `[left, top, right, bottom)` of the pixels carrying `id`.
pub fn oracle_hull(ids: &[u16], width: u32, id: u16) -> Option<Box2<f64>> {
    let mut hull: Option<(u32, u32, u32, u32)> = None;
    for (i, _) in ids.iter().enumerate().filter(|(_, &v)| v == id) {
        let (x, y) = (i as u32 % width, i as u32 / width);
        hull = Some(match hull {
            None => (x, y, x + 1, y + 1),
            Some((l, t, r, b)) => (l.min(x), t.min(y), r.max(x + 1), b.max(y + 1)),
        });
    }
    hull.map(|(l, t, r, b)| Box2::new(l as f64, t as f64, r as f64, b as f64))
}

pub fn box_iou(a: &Box2<f64>, b: &Box2<f64>) -> f64 {
    let iw = (a.right.min(b.right) - a.left.max(b.left)).max(0.0);
    let ih = (a.bottom.min(b.bottom) - a.top.max(b.top)).max(0.0);
    let inter = iw * ih;
    let area = |x: &Box2<f64>| (x.right - x.left) * (x.bottom - x.top);
    inter / (area(a) + area(b) - inter)
}

#[derive(Debug, Clone)]
pub struct MicroGt {
    pub bbox: Box2<f64>,
    pub difficulty: Difficulty,
    pub dont_care: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MicroOutcome {
    Tp,
    Fp,
    Ignored,
}

fn required(g: &MicroGt, level: Difficulty) -> bool {
    let rank = |d: Difficulty| Difficulty::LEVELS.iter().position(|&l| l == d).unwrap_or(usize::MAX);
    !g.dont_care && rank(g.difficulty) <= rank(level)
}

/// Greedy matching written from the definition: visit detections by
/// (score desc, left, top, index); among boxes at the threshold (unmatched
/// required ones and every non-required one) take the highest IoU, a
/// required box winning ties, then the lowest index.
pub fn brute_match(dets: &[(Box2<f64>, f64)], gts: &[MicroGt], thr: f64, level: Difficulty) -> Vec<MicroOutcome> {
    let mut idx: Vec<usize> = (0..dets.len()).collect();
    idx.sort_by(|&a, &b| {
        let (da, db) = (&dets[a], &dets[b]);
        db.1.partial_cmp(&da.1)
            .unwrap()
            .then(da.0.left.partial_cmp(&db.0.left).unwrap())
            .then(da.0.top.partial_cmp(&db.0.top).unwrap())
            .then(a.cmp(&b))
    });
    let mut used = vec![false; gts.len()];
    let mut out = vec![MicroOutcome::Fp; dets.len()];
    for i in idx {
        let mut cands: Vec<(f64, bool, usize)> = gts
            .iter()
            .enumerate()
            .filter(|(g, gt)| !(required(gt, level) && used[*g]))
            .map(|(g, gt)| (box_iou(&dets[i].0, &gt.bbox), required(gt, level), g))
            .filter(|c| c.0 >= thr)
            .collect();
        cands.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));
        match cands.first() {
            Some(&(_, true, g)) => {
                used[g] = true;
                out[i] = MicroOutcome::Tp;
            }
            Some(_) => out[i] = MicroOutcome::Ignored,
            None => {}
        }
    }
    out
}

/// Pooled (score, left, top, frame, is_tp) entries to 11-point and all-point
/// AP, from the textbook definitions with O(n²) envelopes.
pub fn brute_ap(mut entries: Vec<(f64, f64, f64, usize, bool)>, n_gt: usize) -> Option<(f64, f64)> {
    if n_gt == 0 {
        return None;
    }
    entries.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then(a.1.partial_cmp(&b.1).unwrap())
            .then(a.2.partial_cmp(&b.2).unwrap())
            .then(a.3.cmp(&b.3))
    });
    let mut pts = Vec::new();
    let mut tp = 0;
    for (i, e) in entries.iter().enumerate() {
        tp += e.4 as usize;
        pts.push((tp, tp as f64 / (i + 1) as f64));
    }
    let p_at_or_after = |start: usize| pts[start..].iter().map(|p| p.1).fold(0.0, f64::max);
    let mut eleven = 0.0;
    for k in 0..=10 {
        let best = pts
            .iter()
            .enumerate()
            .filter(|(_, p)| p.0 * 10 >= k * n_gt)
            .map(|(i, _)| p_at_or_after(i))
            .fold(0.0, f64::max);
        eleven += best;
    }
    let mut all = 0.0;
    let mut prev = 0;
    for (i, p) in pts.iter().enumerate() {
        if p.0 > prev {
            all += (p.0 - prev) as f64 / n_gt as f64 * p_at_or_after(i);
            prev = p.0;
        }
    }
    Some((eleven / 11.0, all))
}

pub const CAMERA_HEIGHT_M: f64 = 1.65;

pub fn vga_camera() -> Camera {
    CameraModel::new(500.0, 500.0, 320.0, 240.0, 640, 480, Default::default()).unwrap()
}

/// A vehicle resting on the ground plane.
pub fn vehicle(id: u32, x: f64, z: f64, size: (f64, f64, f64), yaw: f64) -> SceneObject {
    let (length, width, height) = size;
    SceneObject::new(
        id,
        ObjectClass::Vehicle,
        Vec3::new(x, CAMERA_HEIGHT_M - height / 2.0, z),
        Size3 { length, width, height },
        yaw,
    )
    .unwrap()
}

/// Ground plus a car at 8 m partly covering a truck at 16 m.
pub fn occlusion_scene() -> (Camera, Vec<SceneObject>) {
    let cam = vga_camera();
    let ground = matrixgt::scene_sim::ground_slab(3, cam.depth.near_m(), CAMERA_HEIGHT_M, 150.0).unwrap();
    let car = vehicle(1, 1.2, 8.0, (4.2, 1.8, 1.5), 0.0);
    let truck = vehicle(2, -1.0, 16.0, (8.0, 2.5, 3.2), 0.0);
    (cam, vec![ground, car, truck])
}

/// One evaluator frame: scored detections and ground truth.
pub type MicroFrame = (Vec<(Box2<f64>, f64)>, Vec<MicroGt>);

fn small_box(rng: &mut Xorshift64Star) -> Box2<f64> {
    let l = rng.range_inclusive(0, 12) as f64;
    let t = rng.range_inclusive(0, 12) as f64;
    let w = rng.range_inclusive(1, 8) as f64;
    let h = rng.range_inclusive(1, 8) as f64;
    Box2::new(l, t, l + w, t + h)
}

/// Up to 5 frames of up to 6 detections and 6 boxes on a 20 px integer
/// grid. Scores come from a short list so ties are common; half the
/// detections are a ground-truth box nudged by at most one pixel.
pub fn micro_instance(seed: u64) -> Vec<MicroFrame> {
    const SCORES: [f64; 4] = [0.25, 0.5, 0.75, 0.9];
    const LEVELS: [Difficulty; 4] = [Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard, Difficulty::Unknown];
    let mut rng = Xorshift64Star::new(seed);
    let frames = rng.range_inclusive(1, 5);
    (0..frames)
        .map(|_| {
            let gts: Vec<MicroGt> = (0..rng.range_inclusive(0, 6))
                .map(|_| MicroGt {
                    bbox: small_box(&mut rng),
                    difficulty: LEVELS[rng.range_inclusive(0, 3) as usize],
                    dont_care: rng.next_f64() < 0.15,
                })
                .collect();
            let dets = (0..rng.range_inclusive(0, 6))
                .map(|_| {
                    let b = if !gts.is_empty() && rng.next_f64() < 0.5 {
                        let g = gts[rng.range_inclusive(0, gts.len() as u32 - 1) as usize].bbox;
                        let mut j = || rng.range_inclusive(0, 2) as f64 - 1.0;
                        let (l, t) = (g.left + j(), g.top + j());
                        Box2::new(l, t, (g.right + j()).max(l + 1.0), (g.bottom + j()).max(t + 1.0))
                    } else {
                        small_box(&mut rng)
                    };
                    (b, SCORES[rng.range_inclusive(0, 3) as usize])
                })
                .collect();
            (dets, gts)
        })
        .collect()
}

/// Random Car and DontCare labels for a frame, spread over all difficulty levels.
pub fn random_labels(rng: &mut Xorshift64Star, n: u32) -> Vec<KittiLabel> {
    (0..n)
        .map(|_| {
            let (l, t) = (rng.uniform(0.0, 560.0), rng.uniform(0.0, 400.0));
            let (w, h) = (rng.uniform(8.0, 80.0), rng.uniform(10.0, 80.0));
            let q = |v: f64| (v * 100.0).round() / 100.0;
            let dont_care = rng.next_f64() < 0.1;
            KittiLabel {
                label_type: if dont_care { DONT_CARE } else { CAR }.into(),
                truncated: q(rng.uniform(0.0, 0.7)),
                occluded: rng.range_inclusive(0, 3) as u8,
                alpha: 0.0,
                bbox: Box2::new(q(l), q(t), q(l + w), q(t + h)),
                dimensions: [1.5, 1.7, 4.0],
                location: Vec3::new(0.0, 1.65, 10.0),
                rotation_y: 0.0,
                score: None,
            }
        })
        .collect()
}

/// Runs `match_frame` and `average_precision` on one micro-instance at IoU
/// 0.5 and 0.7, every level and both methods, against the brute-force versions.
pub fn check_micro_instance(seed: u64) -> Result<(), String> {
    use matrixgt::evaluator::{average_precision, match_frame, ApMethod, Detection, GroundTruth, Outcome, ScoredOutcome};
    let inst = micro_instance(seed);
    for thr in [0.5, 0.7] {
        for level in Difficulty::LEVELS {
            let mut pooled = Vec::new();
            let mut entries = Vec::new();
            let mut n_gt = 0;
            for (f, (dets, gts)) in inst.iter().enumerate() {
                let d: Vec<Detection<f64>> = dets.iter().map(|&(bbox, score)| Detection { bbox, score }).collect();
                let g: Vec<GroundTruth<f64>> = gts
                    .iter()
                    .map(|g| GroundTruth {
                        bbox: g.bbox,
                        difficulty: g.difficulty,
                        dont_care: g.dont_care,
                    })
                    .collect();
                let m = match_frame(&d, &g, thr, level);
                let want = brute_match(dets, gts, thr, level);
                let got: Vec<MicroOutcome> = m
                    .outcomes
                    .iter()
                    .map(|o| match o {
                        Outcome::TruePositive => MicroOutcome::Tp,
                        Outcome::FalsePositive => MicroOutcome::Fp,
                        Outcome::Ignored => MicroOutcome::Ignored,
                    })
                    .collect();
                if got != want {
                    return Err(format!("seed {seed} frame {f} thr {thr} {level:?}: {got:?} vs {want:?}"));
                }
                n_gt += m.required_gt;
                for (det, o) in d.iter().zip(&want) {
                    if *o != MicroOutcome::Ignored {
                        let tp = *o == MicroOutcome::Tp;
                        pooled.push(ScoredOutcome {
                            score: det.score,
                            true_positive: tp,
                            bbox: det.bbox,
                            frame: f,
                        });
                        entries.push((det.score, det.bbox.left, det.bbox.top, f, tp));
                    }
                }
            }
            let oracle = brute_ap(entries, n_gt);
            let eleven = average_precision(&pooled, n_gt, ApMethod::ElevenPoint).map(|r| r.ap);
            let all = average_precision(&pooled, n_gt, ApMethod::AllPoint).map(|r| r.ap);
            let agree = match (oracle, eleven, all) {
                (None, None, None) => true,
                (Some((e, a)), Some(x), Some(y)) => (x - e).abs() <= 1e-9 && (y - a).abs() <= 1e-9,
                _ => false,
            };
            if !agree {
                return Err(format!("seed {seed} thr {thr} {level:?}: AP {eleven:?}/{all:?} vs {oracle:?}"));
            }
        }
    }
    Ok(())
}

/// Evaluates a random label set against itself with both AP methods.
pub fn check_self_evaluation(seed: u64) -> Result<(), String> {
    use matrixgt::evaluator::{evaluate_labels, ApMethod, EvalOptions};
    let mut rng = Xorshift64Star::new(seed);
    let frames = rng.range_inclusive(1, 6);
    let gts: std::collections::BTreeMap<String, Vec<KittiLabel>> = (0..frames)
        .map(|f| {
            let n = rng.range_inclusive(0, 8);
            (format!("{f:06}"), random_labels(&mut rng, n))
        })
        .collect();
    for method in [ApMethod::ElevenPoint, ApMethod::AllPoint] {
        let opts = EvalOptions {
            method,
            ..EvalOptions::default()
        };
        let report = evaluate_labels(&gts, &gts, &opts).map_err(|e| e.to_string())?;
        for l in &report.levels {
            let want = if l.gt_count > 0 { Some(1.0) } else { None };
            if l.fp != 0 || l.fn_ != 0 || l.ap != want {
                return Err(format!("seed {seed} {:?} {:?}: ap {:?} fp {} fn {}", method, l.level, l.ap, l.fp, l.fn_));
            }
        }
    }
    Ok(())
}
