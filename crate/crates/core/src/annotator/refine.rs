use super::{BinaryMask, RefinementParams, TightAnnotation};
use crate::error::{Error, Result};
use crate::geometry::{Box2, PixelRect};
use crate::raster_codec::{DepthCodec, LinearDepth, Raster};
use crate::scene_sim::{EngineRecord, ObjectClass};

/// Slack added to a record's depth extent when gating seed pixels, meters.
const EXTENT_SLACK_M: f64 = 0.05;

/// Mean linearized depth over `region` (row-major pixel indices).
pub fn mean_region_depth(region: &[usize], depth: &Raster, codec: &DepthCodec<f64>) -> Result<f64> {
    let samples = depth
        .as_f32()
        .ok_or_else(|| Error::Format(format!("depth raster must be F32, found {:?}", depth.kind())))?;
    if region.is_empty() {
        return Err(Error::Domain("mean depth of an empty region".into()));
    }
    let sum: f64 = region.iter().map(|&i| codec.linearize(samples[i] as f64)).sum();
    Ok(sum / region.len() as f64)
}

pub(crate) fn mean_of(region: &[usize], depth: &LinearDepth) -> Option<f64> {
    (!region.is_empty()).then(|| region.iter().map(|&i| depth.meters[i]).sum::<f64>() / region.len() as f64)
}

pub(crate) fn hull(pixels: &[usize], width: u32) -> PixelRect {
    let w = width as usize;
    let mut r = PixelRect::of_pixel((pixels[0] % w) as u32, (pixels[0] / w) as u32);
    for &i in &pixels[1..] {
        r.include((i % w) as u32, (i / w) as u32);
    }
    r
}

/// Why a record produced no annotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    /// No vehicle pixels inside the dilated coarse box.
    NoCandidates,
    /// The depth band kept fewer than `min_component_px` pixels.
    TooFewPixels(usize),
}

/// Depth-refined pixel set of one engine record.
#[derive(Debug, Clone, PartialEq)]
pub struct Refined {
    /// Row-major pixel indices, ascending.
    pub kept: Vec<usize>,
    /// Mean depth of the kept set.
    pub mean_depth_m: f64,
}

/// Camera-space depth span of a record's cuboid.
pub(crate) fn depth_extent(record: &EngineRecord) -> (f64, f64) {
    let (s, c) = record.yaw.sin_cos();
    let reach = 0.5 * (record.size.length * s.abs() + record.size.width * c.abs());
    let z = record.location_cam.z;
    (z - reach - EXTENT_SLACK_M, z + reach + EXTENT_SLACK_M)
}

/// Select the vehicle pixels of one record by thresholding depth around an
/// iterated mean.
///
/// Candidates are mask pixels whose centers lie in the coarse box dilated by
/// `coarse_box_margin_px`. The seed mean is taken over candidates inside the
/// record's own depth extent, or over all candidates when
/// `seed_from_extent` is off. A record with no candidate inside its extent
/// is hidden and gets [`Rejection::NoCandidates`]. Each pass keeps
/// candidates with `|z − μ| ≤ rho·μ` and recomputes `μ` over them. With
/// `keep_extent` the final set also takes every candidate inside the
/// extent.
pub fn refine_pixels(
    record: &EngineRecord,
    mask: &BinaryMask,
    depth: &LinearDepth,
    params: &RefinementParams,
) -> std::result::Result<Refined, Rejection> {
    let region = record.coarse_box.dilate(params.coarse_box_margin_px);
    let Some(rect) = PixelRect::covering_centers(&region, mask.width, mask.height) else {
        return Err(Rejection::NoCandidates);
    };
    let w = mask.width as usize;
    let candidates: Vec<usize> = (rect.top..rect.bottom)
        .flat_map(|y| (rect.left..rect.right).map(move |x| y as usize * w + x as usize))
        .filter(|&i| mask.bits[i])
        .collect();
    if candidates.is_empty() {
        return Err(Rejection::NoCandidates);
    }

    let (lo, hi) = depth_extent(record);
    let gated: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&i| (lo..=hi).contains(&depth.meters[i]))
        .collect();
    let mut mu = if params.seed_from_extent {
        mean_of(&gated, depth).ok_or(Rejection::NoCandidates)?
    } else {
        mean_of(&candidates, depth).expect("non-empty")
    };

    let mut kept = Vec::new();
    for _ in 0..params.iterations {
        kept = band(&candidates, depth, mu, params.rho);
        match mean_of(&kept, depth) {
            Some(m) => mu = m,
            None => break,
        }
    }
    if params.keep_extent && !gated.is_empty() {
        let before = kept.len();
        kept.extend(&gated);
        kept.sort_unstable();
        kept.dedup();
        if kept.len() != before {
            mu = mean_of(&kept, depth).expect("non-empty");
        }
    }
    if kept.is_empty() || kept.len() < params.min_component_px {
        return Err(Rejection::TooFewPixels(kept.len()));
    }
    Ok(Refined {
        kept,
        mean_depth_m: mu,
    })
}

pub(crate) fn band(candidates: &[usize], depth: &LinearDepth, mu: f64, rho: f64) -> Vec<usize> {
    candidates
        .iter()
        .copied()
        .filter(|&i| (depth.meters[i] - mu).abs() <= rho * mu)
        .collect()
}

/// Tight annotation for one vehicle record, or the reason it was rejected.
pub fn refine_tight_box(
    record: &EngineRecord,
    mask: &BinaryMask,
    depth: &Raster,
    codec: &DepthCodec<f64>,
    params: &RefinementParams,
) -> Result<std::result::Result<TightAnnotation, Rejection>> {
    if record.class != ObjectClass::Vehicle {
        return Err(Error::Domain(format!(
            "record {} is a {}, not a vehicle",
            record.object_id,
            record.class.name()
        )));
    }
    let lin = codec.linearize_raster(depth)?;
    Ok(refine_pixels(record, mask, &lin, params)
        .and_then(|r| TightAnnotation::from_record(record, &r, mask.width, mask.height)))
}

/// `1 − area(box ∩ image) / area(box)`.
pub fn estimate_truncation(coarse_box: &Box2<f64>, width: u32, height: u32) -> Result<f64> {
    if !coarse_box.is_well_ordered() {
        return Err(Error::Domain(format!("truncation of a zero-area box {coarse_box:?}")));
    }
    let inside = coarse_box
        .intersect(&Box2::image(width, height))
        .map(|b| b.area())
        .unwrap_or(0.0);
    Ok((1.0 - inside / coarse_box.area()).clamp(0.0, 1.0))
}

/// Occlusion level from the visible fraction `visible_px / area(box ∩ image)`:
/// 0 when at least 0.8, 1 when at least 0.5, else 2.
pub fn estimate_occlusion(visible_px: usize, coarse_box: &Box2<f64>, width: u32, height: u32) -> u8 {
    let Some(clipped) = coarse_box.intersect(&Box2::image(width, height)) else {
        return 2;
    };
    occlusion_level(visible_px as f64 / clipped.area())
}

pub fn occlusion_level(visible_fraction: f64) -> u8 {
    if visible_fraction >= 0.8 {
        0
    } else if visible_fraction >= 0.5 {
        1
    } else {
        2
    }
}
