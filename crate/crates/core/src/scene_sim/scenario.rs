//! Line-oriented `key=value` scenario files.
//!
//! Blank lines and lines starting with `#` are ignored. Ranges are written
//! `lo..hi`; a single value means `lo = hi`. `seed` is the only required key.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{CameraModel, RenderOptions};
use crate::error::{Error, Result};
use crate::raster_codec::DepthCodec;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub frames: u32,
    pub camera: CameraModel<f64>,
    /// Height of the camera above the ground plane, meters.
    pub camera_height_m: f64,
    pub vehicle_count: (u32, u32),
    pub distractor_count: (u32, u32),
    pub vehicle_length_m: (f64, f64),
    pub vehicle_width_m: (f64, f64),
    pub vehicle_height_m: (f64, f64),
    pub distractor_footprint_m: (f64, f64),
    pub distractor_height_m: (f64, f64),
    /// Placement region: camera-space x range.
    pub lateral_m: (f64, f64),
    /// Placement region: camera-space z range.
    pub longitudinal_m: (f64, f64),
    pub yaw_rad: (f64, f64),
    /// Vehicles whose coarse boxes overlap must differ in center depth by at least this much.
    pub min_depth_gap_m: f64,
    pub box_inflation: f64,
    pub record_range_m: f64,
    /// Far edge of the ground slab, meters.
    pub ground_extent_m: f64,
    pub write_color: bool,
}

impl ScenarioConfig {
    /// Defaults for everything but the seed.
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            frames: 10,
            camera: CameraModel::new(500.0, 500.0, 320.0, 240.0, 640, 480, DepthCodec::default())
                .expect("default camera"),
            camera_height_m: 1.65,
            vehicle_count: (3, 8),
            distractor_count: (0, 4),
            vehicle_length_m: (3.6, 5.0),
            vehicle_width_m: (1.6, 2.0),
            vehicle_height_m: (1.4, 1.9),
            distractor_footprint_m: (0.3, 1.0),
            distractor_height_m: (0.8, 2.2),
            lateral_m: (-12.0, 12.0),
            longitudinal_m: (8.0, 60.0),
            yaw_rad: (-std::f64::consts::PI, std::f64::consts::PI),
            min_depth_gap_m: 0.0,
            box_inflation: 0.10,
            record_range_m: f64::INFINITY,
            ground_extent_m: 150.0,
            write_color: false,
        }
    }

    pub fn render_options(&self) -> RenderOptions {
        RenderOptions {
            box_inflation: self.box_inflation,
            record_range_m: self.record_range_m,
            color: self.write_color,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ranges = [
            ("vehicle_length_m", self.vehicle_length_m),
            ("vehicle_width_m", self.vehicle_width_m),
            ("vehicle_height_m", self.vehicle_height_m),
            ("distractor_footprint_m", self.distractor_footprint_m),
            ("distractor_height_m", self.distractor_height_m),
            ("lateral_m", self.lateral_m),
            ("longitudinal_m", self.longitudinal_m),
            ("yaw_rad", self.yaw_rad),
        ];
        for (k, (lo, hi)) in ranges {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::Config(format!("{k}: empty or non-finite range {lo}..{hi}")));
            }
        }
        for (k, (lo, hi)) in [("vehicles", self.vehicle_count), ("distractors", self.distractor_count)] {
            if lo > hi {
                return Err(Error::Config(format!("{k}: empty range {lo}..{hi}")));
            }
        }
        let positive = [
            ("vehicle_length_m", self.vehicle_length_m.0),
            ("vehicle_width_m", self.vehicle_width_m.0),
            ("vehicle_height_m", self.vehicle_height_m.0),
            ("distractor_footprint_m", self.distractor_footprint_m.0),
            ("distractor_height_m", self.distractor_height_m.0),
            ("camera_height_m", self.camera_height_m),
        ];
        for (k, v) in positive {
            if !(v > 0.0) {
                return Err(Error::Config(format!("{k} must be positive")));
            }
        }
        if self.longitudinal_m.0 <= self.camera.depth.near_m() {
            return Err(Error::Config("longitudinal_m must start beyond the near plane".into()));
        }
        if !(self.min_depth_gap_m >= 0.0 && self.box_inflation >= 0.0 && self.record_range_m > 0.0) {
            return Err(Error::Config(
                "min_depth_gap_m and box_inflation must be non-negative, record_range_m positive".into(),
            ));
        }
        if !(self.ground_extent_m > 1.0 && self.ground_extent_m <= self.camera.depth.far_m()) {
            return Err(Error::Config("ground_extent_m must lie in (1, far_m]".into()));
        }
        let max_objects = self.vehicle_count.1 as u64 + self.distractor_count.1 as u64 + 1;
        if max_objects > u16::MAX as u64 {
            return Err(Error::Config("too many objects per frame".into()));
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::with_seed(0);
        let mut seen = BTreeSet::new();
        let (mut width, mut height) = (cfg.camera.width, cfg.camera.height);
        let (mut fx, mut fy, mut cx, mut cy) = (cfg.camera.fx, cfg.camera.fy, None, None);
        let (mut near, mut far) = (cfg.camera.depth.near_m(), cfg.camera.depth.far_m());

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Config(format!("line {line_no}: {msg}"));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(err(format!("duplicate key {key:?}")));
            }
            let f = || value.parse::<f64>().map_err(|_| err(format!("{key}: invalid number {value:?}")));
            let u = || value.parse::<u32>().map_err(|_| err(format!("{key}: invalid integer {value:?}")));
            let fr = || parse_range(value, |s| s.parse::<f64>().ok()).ok_or_else(|| err(format!("{key}: invalid range {value:?}")));
            let ur = || parse_range(value, |s| s.parse::<u32>().ok()).ok_or_else(|| err(format!("{key}: invalid range {value:?}")));
            match key {
                "format_version" => {
                    if value != "1" {
                        return Err(err(format!("unsupported format_version {value}")));
                    }
                }
                "seed" => cfg.seed = value.parse().map_err(|_| err(format!("seed: invalid integer {value:?}")))?,
                "frames" => cfg.frames = u()?,
                "width" => width = u()?,
                "height" => height = u()?,
                "fx" => fx = f()?,
                "fy" => fy = f()?,
                "cx" => cx = Some(f()?),
                "cy" => cy = Some(f()?),
                "near_m" => near = f()?,
                "far_m" => far = f()?,
                "camera_height_m" => cfg.camera_height_m = f()?,
                "vehicles" => cfg.vehicle_count = ur()?,
                "distractors" => cfg.distractor_count = ur()?,
                "vehicle_length_m" => cfg.vehicle_length_m = fr()?,
                "vehicle_width_m" => cfg.vehicle_width_m = fr()?,
                "vehicle_height_m" => cfg.vehicle_height_m = fr()?,
                "distractor_footprint_m" => cfg.distractor_footprint_m = fr()?,
                "distractor_height_m" => cfg.distractor_height_m = fr()?,
                "lateral_m" => cfg.lateral_m = fr()?,
                "longitudinal_m" => cfg.longitudinal_m = fr()?,
                "yaw_rad" => cfg.yaw_rad = fr()?,
                "min_depth_gap_m" => cfg.min_depth_gap_m = f()?,
                "box_inflation" => cfg.box_inflation = f()?,
                "record_range_m" => cfg.record_range_m = f()?,
                "ground_extent_m" => cfg.ground_extent_m = f()?,
                "write_color" => {
                    cfg.write_color = match value {
                        "true" | "1" => true,
                        "false" | "0" => false,
                        _ => return Err(err(format!("write_color: expected true/false, got {value:?}"))),
                    }
                }
                _ => return Err(err(format!("unknown key {key:?}"))),
            }
        }
        if !seen.contains("seed") {
            return Err(Error::Config("missing required key \"seed\"".into()));
        }
        let depth = DepthCodec::new(near, far)?;
        let cx = cx.unwrap_or(width as f64 / 2.0);
        let cy = cy.unwrap_or(height as f64 / 2.0);
        cfg.camera = CameraModel::new(fx, fy, cx, cy, width, height, depth)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical text form; [`ScenarioConfig::parse`] reads it back exactly.
    pub fn to_text(&self) -> String {
        let c = &self.camera;
        let mut s = String::new();
        let fr = |(a, b): (f64, f64)| format!("{a}..{b}");
        let ur = |(a, b): (u32, u32)| format!("{a}..{b}");
        let lines: Vec<(&str, String)> = vec![
            ("seed", self.seed.to_string()),
            ("frames", self.frames.to_string()),
            ("width", c.width.to_string()),
            ("height", c.height.to_string()),
            ("fx", c.fx.to_string()),
            ("fy", c.fy.to_string()),
            ("cx", c.cx.to_string()),
            ("cy", c.cy.to_string()),
            ("near_m", c.depth.near_m().to_string()),
            ("far_m", c.depth.far_m().to_string()),
            ("camera_height_m", self.camera_height_m.to_string()),
            ("vehicles", ur(self.vehicle_count)),
            ("distractors", ur(self.distractor_count)),
            ("vehicle_length_m", fr(self.vehicle_length_m)),
            ("vehicle_width_m", fr(self.vehicle_width_m)),
            ("vehicle_height_m", fr(self.vehicle_height_m)),
            ("distractor_footprint_m", fr(self.distractor_footprint_m)),
            ("distractor_height_m", fr(self.distractor_height_m)),
            ("lateral_m", fr(self.lateral_m)),
            ("longitudinal_m", fr(self.longitudinal_m)),
            ("yaw_rad", fr(self.yaw_rad)),
            ("min_depth_gap_m", self.min_depth_gap_m.to_string()),
            ("box_inflation", self.box_inflation.to_string()),
            ("record_range_m", self.record_range_m.to_string()),
            ("ground_extent_m", self.ground_extent_m.to_string()),
            ("write_color", self.write_color.to_string()),
        ];
        for (k, v) in lines {
            writeln!(s, "{k}={v}").unwrap();
        }
        s
    }
}

fn parse_range<T: Copy>(s: &str, parse: impl Fn(&str) -> Option<T>) -> Option<(T, T)> {
    match s.split_once("..") {
        Some((a, b)) => Some((parse(a.trim())?, parse(b.trim())?)),
        None => {
            let v = parse(s)?;
            Some((v, v))
        }
    }
}
