//! Deterministic stand-in for the game engine and its capture plugins.
//!
//! A scene is a list of cuboids on a ground slab. [`render_frame`] z-buffers
//! them into the buffers the annotator consumes (encoded log-depth, class
//! stencil, engine records with loose 2D boxes) plus a per-pixel instance
//! oracle that only tests and the oracle labeller may look at.

mod camera;
mod generate;
mod render;
mod scenario;

pub use camera::{CameraModel, Projection};
pub use generate::{generate_scene, ground_slab};
pub use render::{
    coarse_box, face_depth, render_frame, render_objects, triangle_covers, FrameBundle, RenderOptions,
    RenderedBuffers, ScreenTriangle,
};
pub use scenario::ScenarioConfig;

use crate::error::{Error, Result};
use crate::geometry::{Box2, Vec3};
use crate::raster_codec::{pack_stencil, StencilValue};

/// Stencil class code of pixels no object covers.
pub const BACKGROUND_CODE: u8 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObjectClass {
    Vehicle,
    Distractor,
    Ground,
}

impl ObjectClass {
    /// Class id stored in the low nibble of the stencil byte.
    pub fn stencil_code(self) -> u8 {
        match self {
            ObjectClass::Ground => 1,
            ObjectClass::Vehicle => 2,
            ObjectClass::Distractor => 3,
        }
    }

    pub fn stencil_byte(self) -> u8 {
        pack_stencil(StencilValue {
            class_id: self.stencil_code(),
            flags: 0,
        })
        .expect("class codes fit in 4 bits")
    }

    pub fn name(self) -> &'static str {
        match self {
            ObjectClass::Vehicle => "Vehicle",
            ObjectClass::Distractor => "Distractor",
            ObjectClass::Ground => "Ground",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "Vehicle" => Some(ObjectClass::Vehicle),
            "Distractor" => Some(ObjectClass::Distractor),
            "Ground" => Some(ObjectClass::Ground),
            _ => None,
        }
    }
}

/// Cuboid extents in meters: `length` along the object's heading, `width`
/// across it, `height` vertical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Size3 {
    pub length: f64,
    pub width: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneObject {
    pub object_id: u32,
    pub class: ObjectClass,
    /// Cuboid center in camera coordinates, meters.
    pub center: Vec3<f64>,
    pub size: Size3,
    /// Rotation about the camera's vertical (y) axis, radians.
    pub yaw: f64,
}

/// Corner ordering used by [`SceneObject::corners`] and the face table.
/// Bit 0 selects ±length, bit 1 ±height, bit 2 ±width.
pub(crate) const CUBOID_FACES: [[usize; 4]; 6] = [
    [0, 2, 6, 4], // -length
    [1, 5, 7, 3], // +length
    [0, 4, 5, 1], // -height (top, y up is negative)
    [2, 3, 7, 6], // +height (bottom)
    [0, 1, 3, 2], // -width
    [4, 6, 7, 5], // +width
];

impl SceneObject {
    pub fn new(object_id: u32, class: ObjectClass, center: Vec3<f64>, size: Size3, yaw: f64) -> Result<Self> {
        if object_id == 0 {
            return Err(Error::Domain("object ids start at 1".into()));
        }
        if !(size.length > 0.0 && size.width > 0.0 && size.height > 0.0) {
            return Err(Error::Domain(format!("object {object_id} has non-positive size {size:?}")));
        }
        Ok(Self {
            object_id,
            class,
            center,
            size,
            yaw,
        })
    }

    /// The eight cuboid corners in camera coordinates.
    pub fn corners(&self) -> [Vec3<f64>; 8] {
        let (s, c) = self.yaw.sin_cos();
        let half = Vec3::new(self.size.length / 2.0, self.size.height / 2.0, self.size.width / 2.0);
        std::array::from_fn(|i| {
            let lx = if i & 1 != 0 { half.x } else { -half.x };
            let ly = if i & 2 != 0 { half.y } else { -half.y };
            let lz = if i & 4 != 0 { half.z } else { -half.z };
            // rotation about y: x' = c·x + s·z, z' = −s·x + c·z
            self.center + Vec3::new(c * lx + s * lz, ly, -s * lx + c * lz)
        })
    }

    /// Map a camera-space point into the cuboid's local (length, height, width) frame.
    pub fn to_local(&self, p: Vec3<f64>) -> Vec3<f64> {
        let (s, c) = self.yaw.sin_cos();
        let d = p - self.center;
        Vec3::new(c * d.x - s * d.z, d.y, s * d.x + c * d.z)
    }

    /// Radius of the ground footprint's circumscribed circle.
    pub fn footprint_radius(&self) -> f64 {
        0.5 * self.size.length.hypot(self.size.width)
    }
}

/// What the engine reports about an object: loose 2D box plus 3D pose.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineRecord {
    pub object_id: u32,
    pub class: ObjectClass,
    /// Un-clipped projected box, possibly inflated.
    pub coarse_box: Box2<f64>,
    /// Camera-to-center distance, meters.
    pub range_m: f64,
    pub size: Size3,
    pub yaw: f64,
    pub location_cam: Vec3<f64>,
}
