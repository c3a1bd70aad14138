//! KITTI object label text files and difficulty levels.
//!
//! One object per line:
//! `type truncated occluded alpha left top right bottom h w l x y z rotation_y [score]`.
//! Floats are written with two decimals, the optional score with four.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::annotator::TightAnnotation;
use crate::error::{Error, Result};
use crate::geometry::{Box2, Vec3};

pub const CAR: &str = "Car";
pub const DONT_CARE: &str = "DontCare";
pub const ALPHA_UNKNOWN: f64 = -10.0;
pub const DIMENSION_UNKNOWN: f64 = -1.0;
pub const LOCATION_UNKNOWN: f64 = -1000.0;

#[derive(Debug, Clone, PartialEq)]
pub struct KittiLabel {
    pub label_type: String,
    pub truncated: f64,
    pub occluded: u8,
    pub alpha: f64,
    pub bbox: Box2<f64>,
    /// Height, width, length in meters.
    pub dimensions: [f64; 3],
    pub location: Vec3<f64>,
    pub rotation_y: f64,
    pub score: Option<f64>,
}

impl KittiLabel {
    pub fn is_car(&self) -> bool {
        self.label_type == CAR
    }

    pub fn is_dont_care(&self) -> bool {
        self.label_type == DONT_CARE
    }

    /// Detection confidence; labels without a score count as 1.
    pub fn confidence(&self) -> f64 {
        self.score.unwrap_or(1.0)
    }

    /// Every float rounded to its written precision.
    pub fn quantized(&self) -> Self {
        let q = |v: f64| (v * 100.0).round() / 100.0;
        Self {
            label_type: self.label_type.clone(),
            truncated: q(self.truncated),
            occluded: self.occluded,
            alpha: q(self.alpha),
            bbox: Box2::new(q(self.bbox.left), q(self.bbox.top), q(self.bbox.right), q(self.bbox.bottom)),
            dimensions: self.dimensions.map(q),
            location: Vec3::new(q(self.location.x), q(self.location.y), q(self.location.z)),
            rotation_y: q(self.rotation_y),
            score: self.score.map(|s| (s * 1e4).round() / 1e4),
        }
    }
}

/// Wrap an angle into `[−π, π]`.
pub fn normalize_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut a = (a + PI).rem_euclid(TAU) - PI;
    if a < -PI {
        a += TAU;
    }
    a
}

/// KITTI label for a tight annotation; orphans get the unknown sentinels.
pub fn from_annotation(a: &TightAnnotation) -> KittiLabel {
    let bbox = a.tight_box.to_box();
    match &a.geometry {
        Some(g) => KittiLabel {
            label_type: CAR.into(),
            truncated: a.truncation,
            occluded: a.occlusion_level,
            alpha: normalize_angle(g.yaw - g.location_cam.x.atan2(g.location_cam.z)),
            bbox,
            dimensions: [g.size.height, g.size.width, g.size.length],
            location: g.location_cam,
            rotation_y: normalize_angle(g.yaw),
            score: None,
        },
        None => KittiLabel {
            label_type: CAR.into(),
            truncated: a.truncation,
            occluded: a.occlusion_level,
            alpha: ALPHA_UNKNOWN,
            bbox,
            dimensions: [DIMENSION_UNKNOWN; 3],
            location: Vec3::new(LOCATION_UNKNOWN, LOCATION_UNKNOWN, LOCATION_UNKNOWN),
            rotation_y: ALPHA_UNKNOWN,
            score: None,
        },
    }
}

fn fmt2(out: &mut String, v: f64) {
    let s = format!("{v:.2}");
    out.push_str(if s == "-0.00" { "0.00" } else { &s });
}

pub fn format_label(l: &KittiLabel) -> String {
    let mut s = String::with_capacity(96);
    s.push_str(&l.label_type);
    s.push(' ');
    fmt2(&mut s, l.truncated);
    write!(s, " {} ", l.occluded).unwrap();
    let rest = [
        l.alpha,
        l.bbox.left,
        l.bbox.top,
        l.bbox.right,
        l.bbox.bottom,
        l.dimensions[0],
        l.dimensions[1],
        l.dimensions[2],
        l.location.x,
        l.location.y,
        l.location.z,
        l.rotation_y,
    ];
    for (i, v) in rest.into_iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        fmt2(&mut s, v);
    }
    if let Some(score) = l.score {
        let t = format!("{score:.4}");
        write!(s, " {}", if t == "-0.0000" { "0.0000" } else { &t }).unwrap();
    }
    s
}

pub fn write_labels(labels: &[KittiLabel]) -> String {
    labels.iter().map(|l| format_label(l) + "\n").collect()
}

/// Parse label text; blank lines are skipped, errors name the 1-based line.
pub fn parse_labels(text: &str) -> Result<Vec<KittiLabel>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 15 && fields.len() != 16 {
            return Err(Error::Format(format!(
                "line {line_no}: expected 15 or 16 fields, found {}",
                fields.len()
            )));
        }
        let num = |k: usize| -> Result<f64> {
            fields[k]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Format(format!("line {line_no}: field {} is not a number: {:?}", k + 1, fields[k])))
        };
        let occluded = fields[2]
            .parse::<u8>()
            .ok()
            .filter(|o| *o <= 3)
            .ok_or_else(|| Error::Format(format!("line {line_no}: occluded must be 0..3, got {:?}", fields[2])))?;
        let label = KittiLabel {
            label_type: fields[0].to_string(),
            truncated: num(1)?,
            occluded,
            alpha: num(3)?,
            bbox: Box2::new(num(4)?, num(5)?, num(6)?, num(7)?),
            dimensions: [num(8)?, num(9)?, num(10)?],
            location: Vec3::new(num(11)?, num(12)?, num(13)?),
            rotation_y: num(14)?,
            score: if fields.len() == 16 { Some(num(15)?) } else { None },
        };
        if label.is_car() && !label.bbox.is_well_ordered() {
            return Err(Error::Format(format!("line {line_no}: Car box must have left < right and top < bottom")));
        }
        if !(0.0..=1.0).contains(&label.truncated) && label.truncated != -1.0 {
            return Err(Error::Format(format!("line {line_no}: truncated outside [0, 1]")));
        }
        out.push(label);
    }
    Ok(out)
}

pub fn read_label_file(path: &Path) -> Result<Vec<KittiLabel>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labels(&text).map_err(|e| e.in_file(path))
}

pub fn write_label_file(path: &Path, labels: &[KittiLabel]) -> Result<()> {
    fs::write(path, write_labels(labels)).map_err(|e| Error::io(path, e))
}

/// All `*.txt` label files of a directory keyed by file stem, in sorted order.
pub fn read_label_dir(dir: &Path) -> Result<BTreeMap<String, Vec<KittiLabel>>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("txt") || !path.is_file() {
            continue;
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        out.insert(stem, read_label_file(&path)?);
    }
    Ok(out)
}

/// Evaluation level of a box; `Easy < Moderate < Hard < Unknown`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Difficulty {
    Easy,
    Moderate,
    Hard,
    Unknown,
}

impl Difficulty {
    pub const LEVELS: [Difficulty; 3] = [Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard];

    pub fn name(self) -> &'static str {
        match self {
            Difficulty::Easy => "Easy",
            Difficulty::Moderate => "Moderate",
            Difficulty::Hard => "Hard",
            Difficulty::Unknown => "Unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelThreshold {
    pub min_height_px: f64,
    pub max_truncation: f64,
    pub max_occlusion: u8,
}

/// Per-level limits, indexed Easy, Moderate, Hard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifficultyThresholds {
    pub levels: [LevelThreshold; 3],
}

impl Default for DifficultyThresholds {
    fn default() -> Self {
        Self {
            levels: [
                LevelThreshold {
                    min_height_px: 40.0,
                    max_truncation: 0.15,
                    max_occlusion: 0,
                },
                LevelThreshold {
                    min_height_px: 25.0,
                    max_truncation: 0.30,
                    max_occlusion: 1,
                },
                LevelThreshold {
                    min_height_px: 25.0,
                    max_truncation: 0.50,
                    max_occlusion: 2,
                },
            ],
        }
    }
}

/// Easiest level whose height, truncation and occlusion limits the label meets.
pub fn classify_difficulty(label: &KittiLabel, t: &DifficultyThresholds) -> Result<Difficulty> {
    if !label.bbox.is_well_ordered() {
        return Err(Error::Domain(format!("malformed box {:?}", label.bbox)));
    }
    let h = label.bbox.height();
    for (level, lim) in Difficulty::LEVELS.into_iter().zip(&t.levels) {
        if h >= lim.min_height_px && label.truncated <= lim.max_truncation && label.occluded <= lim.max_occlusion {
            return Ok(level);
        }
    }
    Ok(Difficulty::Unknown)
}
