use log::debug;

use super::{CameraModel, EngineRecord, ObjectClass, SceneObject, BACKGROUND_CODE, CUBOID_FACES};
use crate::error::{Error, Result};
use crate::geometry::{Box2, PixelRect, Vec3};
use crate::netpbm::Ppm;
use crate::raster_codec::{Raster, Samples};

/// A cuboid face triangle in camera space and on screen.
#[derive(Debug, Clone, Copy)]
pub struct ScreenTriangle {
    pub camera: [Vec3<f64>; 3],
    pub screen: [(f64, f64); 3],
}

impl ScreenTriangle {
    fn new(camera_model: &CameraModel<f64>, verts: [Vec3<f64>; 3]) -> Result<Self> {
        let mut screen = [(0.0, 0.0); 3];
        for (s, v) in screen.iter_mut().zip(verts) {
            let p = camera_model.project_point(v)?;
            *s = (p.u, p.v);
        }
        Ok(Self {
            camera: verts,
            screen,
        })
    }

    pub fn screen_bounds(&self) -> Box2<f64> {
        let xs = self.screen.map(|p| p.0);
        let ys = self.screen.map(|p| p.1);
        Box2::new(
            xs.iter().copied().fold(f64::INFINITY, f64::min),
            ys.iter().copied().fold(f64::INFINITY, f64::min),
            xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            ys.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    }
}

fn edge(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0)
}

/// Top-left fill rule: does the triangle cover the point `(x, y)`?
///
/// Points exactly on an edge belong to the triangle only if the edge is a
/// top edge (horizontal, interior below) or a left edge. Degenerate
/// triangles cover nothing.
pub fn triangle_covers(tri: &ScreenTriangle, x: f64, y: f64) -> bool {
    let [a, mut b, mut c] = tri.screen;
    let area = edge(a, b, c);
    if area == 0.0 || !area.is_finite() {
        return false;
    }
    if area < 0.0 {
        std::mem::swap(&mut b, &mut c);
    }
    [(a, b), (b, c), (c, a)].into_iter().all(|(p, q)| {
        let e = edge(p, q, (x, y));
        let (dx, dy) = (q.0 - p.0, q.1 - p.1);
        e > 0.0 || (e == 0.0 && ((dy == 0.0 && dx > 0.0) || dy < 0.0))
    })
}

/// Camera-space depth where the ray through `(x, y)` meets the triangle's plane.
pub fn face_depth(tri: &ScreenTriangle, camera: &CameraModel<f64>, x: f64, y: f64) -> Option<f64> {
    let [v0, v1, v2] = tri.camera;
    let n = (v1 - v0).cross(v2 - v0);
    let denom = n.dot(camera.ray(x, y));
    if denom == 0.0 {
        return None;
    }
    let z = n.dot(v0) / denom;
    (z > 0.0 && z.is_finite()).then_some(z)
}

/// The twelve face triangles of an object, or an error if a corner is not
/// strictly in front of the near plane.
pub(crate) fn object_triangles(camera: &CameraModel<f64>, obj: &SceneObject) -> Result<Vec<ScreenTriangle>> {
    let corners = obj.corners();
    let near = camera.depth.near_m();
    if let Some(c) = corners.iter().find(|c| c.z <= near) {
        return Err(Error::BehindCamera(c.z));
    }
    let mut tris = Vec::with_capacity(12);
    for f in CUBOID_FACES {
        tris.push(ScreenTriangle::new(camera, [corners[f[0]], corners[f[1]], corners[f[2]]])?);
        tris.push(ScreenTriangle::new(camera, [corners[f[0]], corners[f[2]], corners[f[3]]])?);
    }
    Ok(tris)
}

/// Axis-aligned hull of the object's eight projected corners, not clipped to the image.
pub fn coarse_box(camera: &CameraModel<f64>, obj: &SceneObject) -> Result<Box2<f64>> {
    let near = camera.depth.near_m();
    let mut b = Box2::new(f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for c in obj.corners() {
        if c.z <= near {
            return Err(Error::BehindCamera(c.z));
        }
        let p = camera.project_point(c)?;
        b.left = b.left.min(p.u);
        b.top = b.top.min(p.v);
        b.right = b.right.max(p.u);
        b.bottom = b.bottom.max(p.v);
    }
    Ok(b)
}

/// Z-buffer contents: nearest depth per pixel and the index of the object that produced it.
#[derive(Debug, Clone)]
pub struct RenderedBuffers {
    pub width: u32,
    pub height: u32,
    /// Linear depth in meters; `f64::INFINITY` where nothing was drawn.
    pub depth_m: Vec<f64>,
    /// Index into the rendered object slice, `None` for background.
    pub owner: Vec<Option<usize>>,
}

/// Z-buffer the objects in order. Objects with a corner behind the near plane are skipped.
///
/// A later surface replaces an earlier one only if it is strictly nearer.
pub fn render_objects(camera: &CameraModel<f64>, objects: &[SceneObject]) -> RenderedBuffers {
    let (w, h) = (camera.width, camera.height);
    let n = w as usize * h as usize;
    let mut depth_m = vec![f64::INFINITY; n];
    let mut owner = vec![None; n];
    for (idx, obj) in objects.iter().enumerate() {
        let tris = match object_triangles(camera, obj) {
            Ok(t) => t,
            Err(e) => {
                debug!("object {} not rendered: {e}", obj.object_id);
                continue;
            }
        };
        for tri in &tris {
            let Some(rect) = PixelRect::covering_centers(&tri.screen_bounds(), w, h) else {
                continue;
            };
            for y in rect.top..rect.bottom {
                let py = y as f64 + 0.5;
                for x in rect.left..rect.right {
                    let px = x as f64 + 0.5;
                    if !triangle_covers(tri, px, py) {
                        continue;
                    }
                    let Some(z) = face_depth(tri, camera, px, py) else {
                        continue;
                    };
                    let i = y as usize * w as usize + x as usize;
                    if z < depth_m[i] {
                        depth_m[i] = z;
                        owner[i] = Some(idx);
                    }
                }
            }
        }
    }
    RenderedBuffers {
        width: w,
        height: h,
        depth_m,
        owner,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    /// Fractional growth of width and height applied to reported coarse boxes.
    pub box_inflation: f64,
    /// Objects whose center is farther than this get no engine record.
    pub record_range_m: f64,
    pub color: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            box_inflation: 0.10,
            record_range_m: f64::INFINITY,
            color: false,
        }
    }
}

/// One capture: engine buffers, engine records and the withheld instance oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameBundle {
    pub frame_id: u32,
    pub color: Option<Ppm>,
    /// F32 encoded log-depth.
    pub depth: Raster,
    /// U8 packed stencil.
    pub stencil: Raster,
    /// U16 object id per pixel, 0 where no recorded-class object is visible.
    pub instance_oracle: Raster,
    pub records: Vec<EngineRecord>,
}

fn shade(class: Option<ObjectClass>, d: f32) -> [u8; 3] {
    let base = match class {
        None => return [135, 180, 235],
        Some(ObjectClass::Ground) => [90, 90, 95],
        Some(ObjectClass::Vehicle) => [200, 40, 40],
        Some(ObjectClass::Distractor) => [60, 160, 70],
    };
    let k = 1.0 - 0.6 * d;
    base.map(|c| (c as f32 * k).round() as u8)
}

/// Render a scene into a [`FrameBundle`].
///
/// Ground pixels carry stencil class 1 but instance id 0; every other
/// covered pixel carries its object's id.
pub fn render_frame(
    camera: &CameraModel<f64>,
    scene: &[SceneObject],
    frame_id: u32,
    opts: &RenderOptions,
) -> Result<FrameBundle> {
    if scene.is_empty() {
        return Err(Error::Domain("cannot render an empty scene".into()));
    }
    if let Some(o) = scene.iter().find(|o| o.object_id > u16::MAX as u32) {
        return Err(Error::Domain(format!("object id {} exceeds the instance range", o.object_id)));
    }
    let buf = render_objects(camera, scene);
    let n = buf.depth_m.len();
    let mut depth = Vec::with_capacity(n);
    let mut stencil = Vec::with_capacity(n);
    let mut instance = Vec::with_capacity(n);
    for (z, owner) in buf.depth_m.iter().zip(&buf.owner) {
        match owner {
            Some(idx) => {
                let obj = &scene[*idx];
                depth.push(camera.depth.encode(*z) as f32);
                stencil.push(obj.class.stencil_byte());
                instance.push(if obj.class == ObjectClass::Ground {
                    0
                } else {
                    obj.object_id as u16
                });
            }
            None => {
                depth.push(1.0f32);
                stencil.push(BACKGROUND_CODE);
                instance.push(0);
            }
        }
    }
    let color = opts.color.then(|| Ppm {
        width: camera.width,
        height: camera.height,
        rgb: buf
            .owner
            .iter()
            .zip(&depth)
            .flat_map(|(o, d)| shade(o.map(|i| scene[i].class), *d))
            .collect(),
    });

    let mut records = Vec::new();
    for obj in scene.iter().filter(|o| o.class != ObjectClass::Ground) {
        let hull = match coarse_box(camera, obj) {
            Ok(b) => b,
            Err(e) => {
                debug!("frame {frame_id}: no record for object {}: {e}", obj.object_id);
                continue;
            }
        };
        let range_m = obj.center.norm();
        if range_m > opts.record_range_m {
            continue;
        }
        records.push(EngineRecord {
            object_id: obj.object_id,
            class: obj.class,
            coarse_box: hull.inflate(opts.box_inflation),
            range_m,
            size: obj.size,
            yaw: obj.yaw,
            location_cam: obj.center,
        });
    }
    records.sort_by_key(|r| r.object_id);

    let (w, h) = (camera.width, camera.height);
    Ok(FrameBundle {
        frame_id,
        color,
        depth: Raster::new(w, h, Samples::F32(depth))?,
        stencil: Raster::new(w, h, Samples::U8(stencil))?,
        instance_oracle: Raster::new(w, h, Samples::U16(instance))?,
        records,
    })
}
