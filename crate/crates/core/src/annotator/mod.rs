//! Tight 2D vehicle boxes from engine buffers.
//!
//! Pipeline per frame:
//! 1. vehicle mask from the stencil class nibble;
//! 2. 8-connected components of the mask (partially occluding vehicles
//!    merge into one component here);
//! 3. per engine record, a seed mean depth over the record's candidate
//!    pixels;
//! 4. a relative depth band around the iterated mean that splits merged
//!    vehicles apart;
//! 5. recovery of vehicle pixels no record claimed (vehicles rendered but
//!    never registered by the engine). Leftovers that sit inside some
//!    vehicle record's candidate region are attributed to that record and
//!    dropped.
//!
//! The annotator never sees the instance oracle: [`FrameView`] does not carry it.

mod components;
mod mask;
mod refine;

pub use components::{connected_components, Component};
pub use mask::{vehicle_mask, BinaryMask};
pub use refine::{
    estimate_occlusion, estimate_truncation, mean_region_depth, occlusion_level, refine_pixels, refine_tight_box,
    Refined, Rejection,
};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{PixelRect, Vec3};
use crate::raster_codec::{DepthCodec, LinearDepth, Raster, SampleKind};
use crate::scene_sim::{EngineRecord, FrameBundle, ObjectClass, Size3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementParams {
    /// Relative depth tolerance of the band `|z − μ| ≤ rho·μ`.
    pub rho: f64,
    /// Number of band/mean passes.
    pub iterations: usize,
    /// Smallest pixel count for an accepted box or an orphan.
    pub min_component_px: usize,
    /// Dilation of the coarse box when gathering candidates, pixels.
    pub coarse_box_margin_px: f64,
    /// Seed the mean from candidates inside the record's 3D depth extent.
    pub seed_from_extent: bool,
    /// Also keep candidates inside the record's 3D depth extent, so long
    /// vehicles seen at a steep angle are not clipped by the band.
    pub keep_extent: bool,
}

impl Default for RefinementParams {
    fn default() -> Self {
        Self {
            rho: 0.10,
            iterations: 2,
            min_component_px: 16,
            coarse_box_margin_px: 2.0,
            seed_from_extent: true,
            keep_extent: true,
        }
    }
}

impl RefinementParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::Config(format!("rho must lie in (0, 1), got {}", self.rho)));
        }
        if self.iterations == 0 || self.min_component_px == 0 {
            return Err(Error::Config("iterations and min_component_px must be at least 1".into()));
        }
        if !(self.coarse_box_margin_px >= 0.0) {
            return Err(Error::Config("coarse_box_margin_px must be non-negative".into()));
        }
        Ok(())
    }
}

/// 3D fields copied from an engine record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectGeometry {
    pub size: Size3,
    pub location_cam: Vec3<f64>,
    pub yaw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TightAnnotation {
    /// Engine object id, 0 for orphans.
    pub source_id: u32,
    pub class: ObjectClass,
    pub tight_box: PixelRect,
    pub visible_px: usize,
    pub truncation: f64,
    pub occlusion_level: u8,
    pub range_m: f64,
    /// `None` for orphans.
    pub geometry: Option<ObjectGeometry>,
}

impl TightAnnotation {
    fn from_record(
        record: &EngineRecord,
        refined: &Refined,
        width: u32,
        height: u32,
    ) -> std::result::Result<Self, Rejection> {
        let truncation = estimate_truncation(&record.coarse_box, width, height).unwrap_or(1.0);
        Ok(Self {
            source_id: record.object_id,
            class: ObjectClass::Vehicle,
            tight_box: refine::hull(&refined.kept, width),
            visible_px: refined.kept.len(),
            truncation,
            occlusion_level: estimate_occlusion(refined.kept.len(), &record.coarse_box, width, height),
            range_m: record.range_m,
            geometry: Some(ObjectGeometry {
                size: record.size,
                location_cam: record.location_cam,
                yaw: record.yaw,
            }),
        })
    }
}

/// Everything the annotator may read from a capture.
#[derive(Debug, Clone, Copy)]
pub struct FrameView<'a> {
    pub depth: &'a Raster,
    pub stencil: &'a Raster,
    pub records: &'a [EngineRecord],
}

impl FrameBundle {
    pub fn view(&self) -> FrameView<'_> {
        FrameView {
            depth: &self.depth,
            stencil: &self.stencil,
            records: &self.records,
        }
    }
}

/// Annotations plus the intermediate sets behind them.
#[derive(Debug, Clone)]
pub struct FrameAnnotation {
    pub annotations: Vec<TightAnnotation>,
    /// Kept pixel set of each accepted record-based annotation, same order.
    pub kept: Vec<Vec<usize>>,
    /// Components of the raw vehicle mask.
    pub mask_components: usize,
    pub rejected: Vec<(u32, Rejection)>,
    /// Unclaimed components below the size threshold.
    pub dropped_specks: usize,
    /// Unclaimed components depth-continuous with an accepted annotation.
    pub dropped_residue: usize,
    /// Unclaimed components lying inside a vehicle record's candidate region.
    pub dropped_covered: usize,
    /// Pixels of all dropped components.
    pub dropped_px: usize,
    pub clamped_depth_samples: usize,
}

/// Tight boxes for every vehicle record plus orphan detections.
///
/// Output order: record-based annotations by source id, then orphans by
/// (top, left).
pub fn annotate_frame(view: FrameView<'_>, codec: &DepthCodec<f64>, params: &RefinementParams) -> Result<Vec<TightAnnotation>> {
    annotate_frame_detailed(view, codec, params).map(|f| f.annotations)
}

pub fn annotate_frame_detailed(
    view: FrameView<'_>,
    codec: &DepthCodec<f64>,
    params: &RefinementParams,
) -> Result<FrameAnnotation> {
    params.validate()?;
    view.depth.expect_kind(SampleKind::F32, "depth")?;
    view.stencil.expect_kind(SampleKind::U8, "stencil")?;
    let (w, h) = (view.stencil.width(), view.stencil.height());
    if (view.depth.width(), view.depth.height()) != (w, h) {
        return Err(Error::Format(format!(
            "depth is {}x{} but stencil is {w}x{h}",
            view.depth.width(),
            view.depth.height()
        )));
    }
    let depth = codec.linearize_raster(view.depth)?;
    let mask = vehicle_mask(view.stencil)?;
    let mask_components = connected_components(&mask).len();

    let mut records: Vec<&EngineRecord> = view.records.iter().filter(|r| r.class == ObjectClass::Vehicle).collect();
    records.sort_by_key(|r| r.object_id);
    let regions: Vec<PixelRect> = records
        .iter()
        .filter_map(|r| PixelRect::covering_centers(&r.coarse_box.dilate(params.coarse_box_margin_px), w, h))
        .collect();

    let mut refined = Vec::new();
    let mut rejected = Vec::new();
    for r in records {
        match refine_pixels(r, &mask, &depth, params) {
            Ok(x) => refined.push((r, x)),
            Err(why) => rejected.push((r.object_id, why)),
        }
    }
    resolve_shared_pixels(&mut refined, &depth);

    let mut annotations = Vec::new();
    let mut kept = Vec::new();
    for (r, x) in refined {
        if x.kept.len() < params.min_component_px {
            rejected.push((r.object_id, Rejection::TooFewPixels(x.kept.len())));
            continue;
        }
        let a = TightAnnotation::from_record(r, &x, w, h).expect("non-empty kept set");
        annotations.push(a);
        kept.push(x.kept);
    }
    rejected.sort_by_key(|(id, _)| *id);

    let orphans = recover_orphans_detailed(&mask, &kept, &depth, params);
    let mut dropped_covered = 0;
    let mut dropped_px = orphans.dropped_px;
    for o in orphans.annotations {
        let b = o.tight_box;
        let inside = |r: &PixelRect| r.left <= b.left && r.top <= b.top && b.right <= r.right && b.bottom <= r.bottom;
        if regions.iter().any(inside) {
            dropped_covered += 1;
            dropped_px += o.visible_px;
        } else {
            annotations.push(o);
        }
    }
    Ok(FrameAnnotation {
        annotations,
        kept,
        mask_components,
        rejected,
        dropped_specks: orphans.specks,
        dropped_residue: orphans.residue,
        dropped_covered,
        dropped_px,
        clamped_depth_samples: depth.clamped,
    })
}

/// A pixel kept by several records stays with a record whose 3D depth extent
/// contains it, then with the one whose mean depth is relatively closest
/// (lower source id on ties).
fn resolve_shared_pixels(refined: &mut [(&EngineRecord, Refined)], depth: &LinearDepth) {
    let extents: Vec<(f64, f64)> = refined.iter().map(|(r, _)| refine::depth_extent(r)).collect();
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    let mut shared = false;
    for (k, (_, r)) in refined.iter().enumerate() {
        for &p in &r.kept {
            match owner.get(&p) {
                None => {
                    owner.insert(p, k);
                }
                Some(&prev) => {
                    shared = true;
                    let z = depth.meters[p];
                    let key = |j: usize| {
                        let (lo, hi) = extents[j];
                        let outside = !(lo..=hi).contains(&z);
                        (outside, (z - refined[j].1.mean_depth_m).abs() / refined[j].1.mean_depth_m)
                    };
                    if key(k) < key(prev) {
                        owner.insert(p, k);
                    }
                }
            }
        }
    }
    if !shared {
        return;
    }
    for (k, (_, r)) in refined.iter_mut().enumerate() {
        r.kept.retain(|p| owner[p] == k);
    }
}

struct Orphans {
    annotations: Vec<TightAnnotation>,
    specks: usize,
    residue: usize,
    dropped_px: usize,
}

/// Vehicle pixels no accepted annotation kept, grouped into components and
/// promoted to annotations with `source_id = 0`.
///
/// Components smaller than `min_component_px` are dropped, as are
/// components touching an accepted kept set across a pixel pair whose depths
/// agree within the band (the trimmed remainder of an annotated vehicle).
pub fn recover_orphans(
    mask: &BinaryMask,
    accepted_kept: &[Vec<usize>],
    depth: &LinearDepth,
    params: &RefinementParams,
) -> Vec<TightAnnotation> {
    recover_orphans_detailed(mask, accepted_kept, depth, params).annotations
}

fn recover_orphans_detailed(
    mask: &BinaryMask,
    accepted_kept: &[Vec<usize>],
    depth: &LinearDepth,
    params: &RefinementParams,
) -> Orphans {
    let (w, h) = (mask.width as usize, mask.height as usize);
    let mut claimed = vec![false; w * h];
    for set in accepted_kept {
        for &p in set {
            claimed[p] = true;
        }
    }
    let mut unclaimed = mask.clone();
    for (b, c) in unclaimed.bits.iter_mut().zip(&claimed) {
        *b &= !c;
    }
    let mut out = Orphans {
        annotations: Vec::new(),
        specks: 0,
        residue: 0,
        dropped_px: 0,
    };
    for comp in connected_components(&unclaimed) {
        if comp.pixel_count() < params.min_component_px {
            out.specks += 1;
            out.dropped_px += comp.pixel_count();
            continue;
        }
        let continuous = comp.pixels.iter().any(|&p| {
            let (x, y) = (p % w, p / w);
            let zp = depth.meters[p];
            (y.saturating_sub(1)..=(y + 1).min(h - 1)).any(|ny| {
                (x.saturating_sub(1)..=(x + 1).min(w - 1)).any(|nx| {
                    let q = ny * w + nx;
                    claimed[q] && (zp - depth.meters[q]).abs() <= params.rho * depth.meters[q]
                })
            })
        });
        if continuous {
            out.residue += 1;
            out.dropped_px += comp.pixel_count();
            continue;
        }
        let range_m = refine::mean_of(&comp.pixels, depth).expect("non-empty component");
        let truncation = estimate_truncation(&comp.bbox.to_box(), mask.width, mask.height).unwrap_or(0.0);
        out.annotations.push(TightAnnotation {
            source_id: 0,
            class: ObjectClass::Vehicle,
            tight_box: comp.bbox,
            visible_px: comp.pixel_count(),
            truncation,
            occlusion_level: 2,
            range_m,
            geometry: None,
        });
    }
    out
}
