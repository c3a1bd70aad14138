//! Ground-truth forge for vehicle detection.
//!
//! A seeded scene simulator renders the buffers a game engine exposes (log
//! depth, class stencil, loose projected boxes); the annotator refines them
//! into tight 2D boxes; KITTI-style label I/O, difficulty-binned average
//! precision and dataset statistics check the result against a per-pixel
//! instance oracle.
//!
//! Geometry, the depth codec and the metrics are generic over [`Scalar`]
//! (`f32`/`f64`); the aliases below fix the `f64` instantiation used by the
//! pipeline.

pub mod annotator;
pub mod dataset;
pub mod error;
pub mod evaluator;
pub mod geometry;
pub mod kitti;
pub mod netpbm;
pub mod raster_codec;
pub mod rng;
pub mod scalar;
pub mod scene_sim;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Pixel-space box in `f64`.
pub type Box2f = geometry::Box2<f64>;
/// Pixel-space box in `f32`.
pub type Box2f32 = geometry::Box2<f32>;
/// Camera-space vector in `f64`.
pub type Vec3f = geometry::Vec3<f64>;
/// Near/far parameters of the log-depth codec.
pub type DepthCodecParams = raster_codec::DepthCodec<f64>;
pub type Camera = scene_sim::CameraModel<f64>;
