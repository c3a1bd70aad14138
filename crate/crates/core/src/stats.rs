//! Dataset properties: centroid heatmaps, detections-per-frame histograms,
//! and size summaries over KITTI label sets.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::kitti::{classify_difficulty, Difficulty, DifficultyThresholds, KittiLabel};
use crate::netpbm::Pgm;

/// Labels of a dataset keyed by frame name.
pub type LabelSet = BTreeMap<String, Vec<KittiLabel>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeatmapGrid {
    pub cols: u32,
    pub rows: u32,
    pub image_width: u32,
    pub image_height: u32,
    /// Row-major cell counts.
    pub counts: Vec<u64>,
    /// Centroids outside the image that were clamped into a border cell.
    pub clamped: u64,
}

impl HeatmapGrid {
    pub fn new(cols: u32, rows: u32, image_width: u32, image_height: u32) -> Result<Self> {
        if cols == 0 || rows == 0 || image_width == 0 || image_height == 0 {
            return Err(Error::Config(format!(
                "grid {cols}x{rows} over image {image_width}x{image_height} must have positive dimensions"
            )));
        }
        Ok(Self {
            cols,
            rows,
            image_width,
            image_height,
            counts: vec![0; cols as usize * rows as usize],
            clamped: 0,
        })
    }

    pub fn get(&self, col: u32, row: u32) -> u64 {
        self.counts[row as usize * self.cols as usize + col as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Cell index along one axis; a centroid on a cell boundary goes to the lower cell.
    fn bin(v: f64, extent: u32, cells: u32) -> (u32, bool) {
        let outside = !(0.0..=extent as f64).contains(&v);
        let raw = (v * cells as f64 / extent as f64).ceil() - 1.0;
        (raw.clamp(0.0, (cells - 1) as f64) as u32, outside)
    }

    pub fn add_centroid(&mut self, x: f64, y: f64) {
        let (c, ox) = Self::bin(x, self.image_width, self.cols);
        let (r, oy) = Self::bin(y, self.image_height, self.rows);
        self.clamped += (ox || oy) as u64;
        self.counts[r as usize * self.cols as usize + c as usize] += 1;
    }

    /// Cell-wise sum of two grids of the same shape.
    pub fn merge(&mut self, other: &Self) {
        assert_eq!((self.cols, self.rows), (other.cols, other.rows));
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.clamped += other.clamped;
    }

    /// Grayscale image, one pixel per cell, scaled so the busiest cell is 255.
    pub fn to_pgm(&self) -> Pgm {
        let max = self.counts.iter().copied().max().unwrap_or(0);
        Pgm {
            width: self.cols,
            height: self.rows,
            gray: self
                .counts
                .iter()
                .map(|&c| if max == 0 { 0 } else { ((c as f64 * 255.0) / max as f64).round() as u8 })
                .collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("row,col,count\n");
        for r in 0..self.rows {
            for c in 0..self.cols {
                writeln!(s, "{r},{c},{}", self.get(c, r)).unwrap();
            }
        }
        s
    }
}

/// Bin the centroid of every Car box; DontCare and other types are skipped.
pub fn centroid_heatmap(labels: &LabelSet, image: (u32, u32), grid: (u32, u32)) -> Result<HeatmapGrid> {
    let mut h = HeatmapGrid::new(grid.0, grid.1, image.0, image.1)?;
    for l in labels.values().flatten().filter(|l| l.is_car()) {
        let (x, y) = l.bbox.center();
        h.add_centroid(x, y);
    }
    Ok(h)
}

/// Number of frames for each Car count.
pub type FrameHistogram = BTreeMap<usize, usize>;

pub fn detections_histogram(labels: &LabelSet) -> FrameHistogram {
    let mut hist = FrameHistogram::new();
    for frame in labels.values() {
        *hist.entry(frame.iter().filter(|l| l.is_car()).count()).or_default() += 1;
    }
    hist
}

pub fn histogram_csv(hist: &FrameHistogram) -> String {
    let mut s = String::from("n,frames\n");
    for (n, f) in hist {
        writeln!(s, "{n},{f}").unwrap();
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSummary {
    pub frames: usize,
    pub total_boxes: usize,
    /// Car boxes per level, Easy, Moderate, Hard, Unknown.
    pub per_difficulty: [usize; 4],
    pub mean_boxes_per_frame: f64,
}

pub fn dataset_summary(labels: &LabelSet, thresholds: &DifficultyThresholds) -> Result<DatasetSummary> {
    let mut per_difficulty = [0usize; 4];
    let mut total = 0;
    for l in labels.values().flatten().filter(|l| l.is_car()) {
        total += 1;
        let d = classify_difficulty(l, thresholds)?;
        per_difficulty[d as usize] += 1;
    }
    let frames = labels.len();
    Ok(DatasetSummary {
        frames,
        total_boxes: total,
        per_difficulty,
        mean_boxes_per_frame: if frames == 0 { 0.0 } else { total as f64 / frames as f64 },
    })
}

impl DatasetSummary {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "frames={}", self.frames).unwrap();
        writeln!(s, "boxes={}", self.total_boxes).unwrap();
        for (d, n) in [Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard, Difficulty::Unknown]
            .iter()
            .zip(self.per_difficulty)
        {
            writeln!(s, "{}={n}", d.name().to_lowercase()).unwrap();
        }
        writeln!(s, "mean_boxes_per_frame={:.4}", self.mean_boxes_per_frame).unwrap();
        s
    }
}
