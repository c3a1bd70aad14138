//! Difficulty-binned detection evaluation: greedy IoU matching and
//! interpolated average precision.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{iou, Box2};
use crate::kitti::{classify_difficulty, read_label_dir, Difficulty, DifficultyThresholds, KittiLabel};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection<T> {
    pub bbox: Box2<T>,
    pub score: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruth<T> {
    pub bbox: Box2<T>,
    pub difficulty: Difficulty,
    pub dont_care: bool,
}

impl<T> GroundTruth<T> {
    /// Counted at `level`: not DontCare and no harder than `level`.
    pub fn is_required(&self, level: Difficulty) -> bool {
        !self.dont_care && self.difficulty <= level
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    TruePositive,
    FalsePositive,
    /// Matched only a box that does not count at this level.
    Ignored,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatch {
    /// Outcome of each detection, in input order.
    pub outcomes: Vec<Outcome>,
    /// Whether each ground truth box was claimed by a true positive, in input order.
    pub gt_matched: Vec<bool>,
    pub required_gt: usize,
}

/// Descending score, then ascending left, then ascending top.
fn detection_order<T: Scalar>(a: &Detection<T>, b: &Detection<T>) -> Ordering {
    b.score
        .partial_cmp(&a.score)
        .unwrap_or(Ordering::Equal)
        .then(a.bbox.left.partial_cmp(&b.bbox.left).unwrap_or(Ordering::Equal))
        .then(a.bbox.top.partial_cmp(&b.bbox.top).unwrap_or(Ordering::Equal))
}

fn overlap<T: Scalar>(a: &Box2<T>, b: &Box2<T>) -> T {
    iou(a, b).unwrap_or_else(|_| T::zero())
}

/// Greedy matching of one frame's detections against its ground truth.
///
/// Detections are visited in [`detection_order`]. Each goes to the box with
/// the highest IoU ≥ `iou_thr` among unmatched required boxes and all
/// non-required boxes, preferring a required box on equal IoU. A required
/// match is a true positive and consumes the box; a non-required match
/// makes the detection [`Outcome::Ignored`] and consumes nothing; no match
/// is a false positive.
pub fn match_frame<T: Scalar>(
    dets: &[Detection<T>],
    gts: &[GroundTruth<T>],
    iou_thr: T,
    level: Difficulty,
) -> FrameMatch {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&i, &j| detection_order(&dets[i], &dets[j]).then(i.cmp(&j)));

    let mut gt_matched = vec![false; gts.len()];
    let mut outcomes = vec![Outcome::FalsePositive; dets.len()];
    for i in order {
        let d = &dets[i];
        // (gt index, iou, required)
        let mut best: Option<(usize, T, bool)> = None;
        for (g, gt) in gts.iter().enumerate() {
            let required = gt.is_required(level);
            if required && gt_matched[g] {
                continue;
            }
            let o = overlap(&d.bbox, &gt.bbox);
            if o < iou_thr {
                continue;
            }
            let better = match best {
                None => true,
                Some((_, b, breq)) => o > b || (o == b && required && !breq),
            };
            if better {
                best = Some((g, o, required));
            }
        }
        outcomes[i] = match best {
            Some((g, _, true)) => {
                gt_matched[g] = true;
                Outcome::TruePositive
            }
            Some((_, _, false)) => Outcome::Ignored,
            None => Outcome::FalsePositive,
        };
    }
    FrameMatch {
        outcomes,
        required_gt: gts.iter().filter(|g| g.is_required(level)).count(),
        gt_matched,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApMethod {
    /// Mean of the interpolated precision at recall 0, 0.1, …, 1.
    ElevenPoint,
    /// Area under the monotone precision envelope.
    AllPoint,
}

impl ApMethod {
    pub fn name(self) -> &'static str {
        match self {
            ApMethod::ElevenPoint => "11pt",
            ApMethod::AllPoint => "all",
        }
    }
}

impl std::str::FromStr for ApMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "11pt" | "11" => Ok(ApMethod::ElevenPoint),
            "all" | "all-point" => Ok(ApMethod::AllPoint),
            _ => Err(Error::Config(format!("unknown AP method {s:?} (expected 11pt or all)"))),
        }
    }
}

/// A non-ignored detection outcome pooled across frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredOutcome<T> {
    pub score: T,
    pub true_positive: bool,
    pub bbox: Box2<T>,
    pub frame: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint<T> {
    pub recall: T,
    pub precision: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApResult<T> {
    pub ap: T,
    pub curve: Vec<PrPoint<T>>,
    pub tp: usize,
    pub fp: usize,
}

/// Average precision of pooled outcomes against `required_gt` boxes; `None` when there are none.
pub fn average_precision<T: Scalar>(
    outcomes: &[ScoredOutcome<T>],
    required_gt: usize,
    method: ApMethod,
) -> Option<ApResult<T>> {
    if required_gt == 0 {
        return None;
    }
    let mut sorted = outcomes.to_vec();
    sorted.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then(a.bbox.left.partial_cmp(&b.bbox.left).unwrap_or(Ordering::Equal))
            .then(a.bbox.top.partial_cmp(&b.bbox.top).unwrap_or(Ordering::Equal))
            .then(a.frame.cmp(&b.frame))
    });

    let g = T::from_count(required_gt);
    let mut tp = 0usize;
    // (true positives so far, precision) after each detection
    let mut steps = Vec::with_capacity(sorted.len());
    for (i, o) in sorted.iter().enumerate() {
        tp += o.true_positive as usize;
        steps.push((tp, T::from_count(tp) / T::from_count(i + 1)));
    }
    let curve = steps
        .iter()
        .map(|&(t, p)| PrPoint {
            recall: T::from_count(t) / g,
            precision: p,
        })
        .collect::<Vec<_>>();

    // envelope[i] = max precision at or after step i
    let mut envelope = steps.iter().map(|s| s.1).collect::<Vec<_>>();
    for i in (0..envelope.len().saturating_sub(1)).rev() {
        envelope[i] = envelope[i].max(envelope[i + 1]);
    }

    let ap = match method {
        ApMethod::ElevenPoint => {
            let mut sum = T::zero();
            for k in 0..=10usize {
                // first step whose recall reaches k/10, compared exactly in integers
                if let Some(i) = steps.iter().position(|&(t, _)| t * 10 >= k * required_gt) {
                    sum = sum + envelope[i];
                }
            }
            sum / T::lit(11.0)
        }
        ApMethod::AllPoint => {
            let mut sum = T::zero();
            let mut prev_tp = 0usize;
            for (i, &(t, _)) in steps.iter().enumerate() {
                if t > prev_tp {
                    sum = sum + T::from_count(t - prev_tp) * envelope[i];
                    prev_tp = t;
                }
            }
            sum / g
        }
    };
    Some(ApResult {
        ap,
        curve,
        tp,
        fp: sorted.len() - tp,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub iou_threshold: f64,
    pub method: ApMethod,
    pub thresholds: DifficultyThresholds,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            iou_threshold: 0.7,
            method: ApMethod::ElevenPoint,
            thresholds: DifficultyThresholds::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub level: Difficulty,
    /// `None` when the level has no required ground truth.
    pub ap: Option<f64>,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub gt_count: usize,
    pub curve: Vec<PrPoint<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub iou_threshold: f64,
    pub method: ApMethod,
    pub frames: usize,
    pub levels: Vec<LevelReport>,
}

impl EvalReport {
    pub fn level(&self, level: Difficulty) -> Option<&LevelReport> {
        self.levels.iter().find(|l| l.level == level)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("level,ap,tp,fp,fn,gt_count\n");
        for l in &self.levels {
            writeln!(s, "{},{},{},{},{},{}", l.level.name(), fmt_ap(l.ap), l.tp, l.fp, l.fn_, l.gt_count).unwrap();
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "IoU threshold {:.2}, {} AP, {} frames\n{:<10}{:>8}{:>8}{:>8}{:>8}{:>8}\n",
            self.iou_threshold,
            self.method.name(),
            self.frames,
            "level",
            "AP",
            "TP",
            "FP",
            "FN",
            "GT"
        );
        for l in &self.levels {
            writeln!(
                s,
                "{:<10}{:>8}{:>8}{:>8}{:>8}{:>8}",
                l.level.name(),
                fmt_ap(l.ap),
                l.tp,
                l.fp,
                l.fn_,
                l.gt_count
            )
            .unwrap();
        }
        s
    }
}

fn fmt_ap(ap: Option<f64>) -> String {
    ap.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"))
}

fn to_detections(labels: &[KittiLabel]) -> Vec<Detection<f64>> {
    labels
        .iter()
        .filter(|l| l.is_car() && l.bbox.is_well_ordered())
        .map(|l| Detection {
            bbox: l.bbox,
            score: l.confidence(),
        })
        .collect()
}

fn to_ground_truth(labels: &[KittiLabel], t: &DifficultyThresholds) -> Result<Vec<GroundTruth<f64>>> {
    labels
        .iter()
        .filter(|l| (l.is_car() || l.is_dont_care()) && l.bbox.is_well_ordered())
        .map(|l| {
            Ok(GroundTruth {
                bbox: l.bbox,
                difficulty: if l.is_car() {
                    classify_difficulty(l, t)?
                } else {
                    Difficulty::Unknown
                },
                dont_care: l.is_dont_care(),
            })
        })
        .collect()
}

type EvalFrame = (Vec<Detection<f64>>, Vec<GroundTruth<f64>>);

/// Evaluate detection labels against ground-truth labels keyed by frame.
///
/// Both maps must hold the same frame keys.
pub fn evaluate_labels(
    dets: &BTreeMap<String, Vec<KittiLabel>>,
    gts: &BTreeMap<String, Vec<KittiLabel>>,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    let missing_det: Vec<&String> = gts.keys().filter(|k| !dets.contains_key(*k)).collect();
    let missing_gt: Vec<&String> = dets.keys().filter(|k| !gts.contains_key(*k)).collect();
    if !missing_det.is_empty() || !missing_gt.is_empty() {
        let list = |v: &[&String]| v.iter().map(|k| format!("{k}.txt")).collect::<Vec<_>>().join(", ");
        return Err(Error::Validation(format!(
            "frame sets differ; missing detections: [{}]; missing ground truth: [{}]",
            list(&missing_det),
            list(&missing_gt)
        )));
    }
    let frames: Vec<EvalFrame> = gts
        .iter()
        .map(|(k, g)| Ok((to_detections(&dets[k]), to_ground_truth(g, &opts.thresholds)?)))
        .collect::<Result<_>>()?;

    let mut levels = Vec::new();
    for level in Difficulty::LEVELS {
        let mut pooled = Vec::new();
        let mut required = 0;
        for (f, (d, g)) in frames.iter().enumerate() {
            let m = match_frame(d, g, opts.iou_threshold, level);
            required += m.required_gt;
            for (det, o) in d.iter().zip(&m.outcomes) {
                if *o != Outcome::Ignored {
                    pooled.push(ScoredOutcome {
                        score: det.score,
                        true_positive: *o == Outcome::TruePositive,
                        bbox: det.bbox,
                        frame: f,
                    });
                }
            }
        }
        let tp = pooled.iter().filter(|o| o.true_positive).count();
        let res = average_precision(&pooled, required, opts.method);
        levels.push(LevelReport {
            level,
            ap: res.as_ref().map(|r| r.ap),
            tp,
            fp: pooled.len() - tp,
            fn_: required - tp,
            gt_count: required,
            curve: res.map(|r| r.curve).unwrap_or_default(),
        });
    }
    Ok(EvalReport {
        iou_threshold: opts.iou_threshold,
        method: opts.method,
        frames: frames.len(),
        levels,
    })
}

/// Evaluate two KITTI label directories.
pub fn evaluate(det_dir: &Path, gt_dir: &Path, opts: &EvalOptions) -> Result<EvalReport> {
    let dets = read_label_dir(det_dir)?;
    let gts = read_label_dir(gt_dir)?;
    evaluate_labels(&dets, &gts, opts)
}
