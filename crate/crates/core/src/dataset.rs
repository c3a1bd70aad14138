//! Dataset directories: per-frame buffer files, engine metadata and the manifest.
//!
//! Layout, with `NNNNNN` the zero-padded frame index:
//!
//! ```text
//! manifest.txt
//! NNNNNN_color.ppm      (only when write_color is set)
//! NNNNNN_depth.mrb      F32 encoded log-depth
//! NNNNNN_stencil.mrb    U8 packed stencil
//! NNNNNN_instance.mrb   U16 instance oracle
//! NNNNNN_meta.txt       id class left top right bottom range_m h w l x y z yaw
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::annotator::{
    estimate_truncation, occlusion_level, FrameView, ObjectGeometry, TightAnnotation,
};
use crate::error::{Error, Result};
use crate::geometry::{Box2, PixelRect, Vec3};
use crate::raster_codec::{read_raster_file, unpack_stencil, write_raster_file, Raster, SampleKind};
use crate::scene_sim::{
    generate_scene, render_frame, render_objects, CameraModel, EngineRecord, FrameBundle, ObjectClass,
    ScenarioConfig, SceneObject, Size3,
};

pub const MANIFEST_FILE: &str = "manifest.txt";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameFile {
    Color,
    Depth,
    Stencil,
    Instance,
    Meta,
}

impl FrameFile {
    pub fn suffix(self) -> &'static str {
        match self {
            FrameFile::Color => "color.ppm",
            FrameFile::Depth => "depth.mrb",
            FrameFile::Stencil => "stencil.mrb",
            FrameFile::Instance => "instance.mrb",
            FrameFile::Meta => "meta.txt",
        }
    }
}

pub fn frame_stem(frame_id: u32) -> String {
    format!("{frame_id:06}")
}

pub fn frame_path(dir: &Path, frame_id: u32, file: FrameFile) -> PathBuf {
    dir.join(format!("{}_{}", frame_stem(frame_id), file.suffix()))
}

pub fn manifest_text(cfg: &ScenarioConfig) -> String {
    format!("format_version={FORMAT_VERSION}\n{}", cfg.to_text())
}

pub fn write_manifest(dir: &Path, cfg: &ScenarioConfig) -> Result<()> {
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, manifest_text(cfg)).map_err(|e| Error::io(&path, e))
}

pub fn read_manifest(dir: &Path) -> Result<ScenarioConfig> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    ScenarioConfig::parse(&text).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn fmt4(out: &mut String, v: f64) {
    let s = format!("{v:.4}");
    out.push_str(if s == "-0.0000" { "0.0000" } else { &s });
}

pub fn format_meta(records: &[EngineRecord]) -> String {
    let mut s = String::new();
    for r in records {
        write!(s, "{} {}", r.object_id, r.class.name()).unwrap();
        let b = &r.coarse_box;
        for v in [
            b.left,
            b.top,
            b.right,
            b.bottom,
            r.range_m,
            r.size.height,
            r.size.width,
            r.size.length,
            r.location_cam.x,
            r.location_cam.y,
            r.location_cam.z,
            r.yaw,
        ] {
            s.push(' ');
            fmt4(&mut s, v);
        }
        s.push('\n');
    }
    s
}

pub fn parse_meta(text: &str) -> Result<Vec<EngineRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |m: String| Error::Format(format!("line {}: {m}", i + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 14 {
            return Err(err(format!("expected 14 fields, found {}", fields.len())));
        }
        let object_id: u32 = fields[0].parse().map_err(|_| err(format!("invalid id {:?}", fields[0])))?;
        let class = ObjectClass::from_name(fields[1]).ok_or_else(|| err(format!("unknown class {:?}", fields[1])))?;
        let mut v = [0.0f64; 12];
        for (slot, f) in v.iter_mut().zip(&fields[2..]) {
            *slot = f
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| err(format!("invalid number {f:?}")))?;
        }
        out.push(EngineRecord {
            object_id,
            class,
            coarse_box: Box2::new(v[0], v[1], v[2], v[3]),
            range_m: v[4],
            size: Size3 {
                height: v[5],
                width: v[6],
                length: v[7],
            },
            location_cam: Vec3::new(v[8], v[9], v[10]),
            yaw: v[11],
        });
    }
    Ok(out)
}

/// Simulate one frame of a scenario.
pub fn simulate_frame(cfg: &ScenarioConfig, frame_id: u32) -> Result<FrameBundle> {
    let scene = generate_scene(cfg, frame_id)?;
    render_frame(&cfg.camera, &scene, frame_id, &cfg.render_options())
}

pub fn write_frame(dir: &Path, frame: &FrameBundle) -> Result<()> {
    let id = frame.frame_id;
    if let Some(ppm) = &frame.color {
        let path = frame_path(dir, id, FrameFile::Color);
        let mut bytes = Vec::new();
        ppm.write(&mut bytes).map_err(|e| Error::io(&path, e))?;
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    }
    write_raster_file(&frame.depth, &frame_path(dir, id, FrameFile::Depth))?;
    write_raster_file(&frame.stencil, &frame_path(dir, id, FrameFile::Stencil))?;
    write_raster_file(&frame.instance_oracle, &frame_path(dir, id, FrameFile::Instance))?;
    let path = frame_path(dir, id, FrameFile::Meta);
    fs::write(&path, format_meta(&frame.records)).map_err(|e| Error::io(&path, e))
}

/// The buffers the annotator may read; the instance oracle is not loaded.
#[derive(Debug, Clone)]
pub struct EngineFrame {
    pub frame_id: u32,
    pub depth: Raster,
    pub stencil: Raster,
    pub records: Vec<EngineRecord>,
}

impl EngineFrame {
    pub fn view(&self) -> FrameView<'_> {
        FrameView {
            depth: &self.depth,
            stencil: &self.stencil,
            records: &self.records,
        }
    }
}

pub fn read_engine_frame(dir: &Path, frame_id: u32) -> Result<EngineFrame> {
    let depth = read_raster_file(&frame_path(dir, frame_id, FrameFile::Depth))?;
    let stencil = read_raster_file(&frame_path(dir, frame_id, FrameFile::Stencil))?;
    let path = frame_path(dir, frame_id, FrameFile::Meta);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let records = parse_meta(&text).map_err(|e| e.in_file(&path))?;
    Ok(EngineFrame {
        frame_id,
        depth,
        stencil,
        records,
    })
}

pub fn read_instance(dir: &Path, frame_id: u32) -> Result<Raster> {
    let path = frame_path(dir, frame_id, FrameFile::Instance);
    let r = read_raster_file(&path)?;
    r.expect_kind(SampleKind::U16, "instance")?;
    Ok(r)
}

/// Perfect annotations from the instance oracle.
///
/// Each vehicle with at least one visible pixel yields a box equal to the
/// hull of its pixels. Occlusion compares the visible pixel count with the
/// count the object would cover if rendered alone. Visible vehicles with no
/// engine record are identified through the stencil and get no geometry,
/// zero truncation and occlusion level 2.
pub fn oracle_annotations(
    camera: &CameraModel<f64>,
    instance: &Raster,
    stencil: &Raster,
    records: &[EngineRecord],
) -> Result<Vec<TightAnnotation>> {
    instance.expect_kind(SampleKind::U16, "instance")?;
    stencil.expect_kind(SampleKind::U8, "stencil")?;
    let (w, h) = (instance.width(), instance.height());
    if (w, h) != (camera.width, camera.height) || (stencil.width(), stencil.height()) != (w, h) {
        return Err(Error::Format(format!(
            "instance {w}x{h}, stencil {}x{} and camera {}x{} disagree",
            stencil.width(),
            stencil.height(),
            camera.width,
            camera.height
        )));
    }
    let ids = instance.as_u16().expect("checked kind");
    let classes = stencil.as_u8().expect("checked kind");

    // id -> (hull, visible count, stencil class at the first pixel)
    let mut seen: BTreeMap<u16, (PixelRect, usize, u8)> = BTreeMap::new();
    for (i, &id) in ids.iter().enumerate() {
        if id == 0 {
            continue;
        }
        let (x, y) = ((i % w as usize) as u32, (i / w as usize) as u32);
        seen.entry(id)
            .and_modify(|(rect, n, _)| {
                rect.include(x, y);
                *n += 1;
            })
            .or_insert((PixelRect::of_pixel(x, y), 1, unpack_stencil(classes[i]).class_id));
    }

    let by_id: BTreeMap<u32, &EngineRecord> = records.iter().map(|r| (r.object_id, r)).collect();
    let mut out = Vec::new();
    for (id, (rect, visible, class_code)) in seen {
        let record = by_id.get(&(id as u32));
        let is_vehicle = match record {
            Some(r) => r.class == ObjectClass::Vehicle,
            None => class_code == ObjectClass::Vehicle.stencil_code(),
        };
        if !is_vehicle {
            continue;
        }
        let a = match record {
            Some(r) => {
                let obj = SceneObject::new(r.object_id, r.class, r.location_cam, r.size, r.yaw)?;
                let alone = render_objects(camera, std::slice::from_ref(&obj))
                    .owner
                    .iter()
                    .filter(|o| o.is_some())
                    .count();
                let fraction = if alone == 0 { 0.0 } else { (visible as f64 / alone as f64).min(1.0) };
                TightAnnotation {
                    source_id: r.object_id,
                    class: ObjectClass::Vehicle,
                    tight_box: rect,
                    visible_px: visible,
                    truncation: estimate_truncation(&r.coarse_box, w, h).unwrap_or(1.0),
                    occlusion_level: occlusion_level(fraction),
                    range_m: r.range_m,
                    geometry: Some(ObjectGeometry {
                        size: r.size,
                        location_cam: r.location_cam,
                        yaw: r.yaw,
                    }),
                }
            }
            None => TightAnnotation {
                source_id: id as u32,
                class: ObjectClass::Vehicle,
                tight_box: rect,
                visible_px: visible,
                truncation: 0.0,
                occlusion_level: 2,
                range_m: f64::NAN,
                geometry: None,
            },
        };
        out.push(a);
    }
    Ok(out)
}
