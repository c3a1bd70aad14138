use crate::error::{Error, Result};
use crate::raster_codec::Raster;
use crate::scalar::Scalar;

/// Logarithmic depth encoding `d = ln(z/near) / ln(far/near)`.
///
/// Precision is concentrated far from the camera; `d` is 0 at the near plane
/// and 1 at the far plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthCodec<T> {
    near_m: T,
    far_m: T,
}

impl<T: Scalar> DepthCodec<T> {
    pub fn new(near_m: T, far_m: T) -> Result<Self> {
        if !(near_m.is_finite() && far_m.is_finite() && near_m > T::zero() && near_m < far_m) {
            return Err(Error::Config(format!(
                "depth codec needs 0 < near < far, got near={near_m} far={far_m}"
            )));
        }
        Ok(Self { near_m, far_m })
    }

    pub fn near_m(&self) -> T {
        self.near_m
    }

    pub fn far_m(&self) -> T {
        self.far_m
    }

    fn log_range(&self) -> T {
        (self.far_m / self.near_m).ln()
    }

    /// Encode a metric depth; `z` is clamped into `[near, far]` first.
    pub fn encode(&self, z: T) -> T {
        let z = z.max(self.near_m).min(self.far_m);
        let d = (z / self.near_m).ln() / self.log_range();
        d.max(T::zero()).min(T::one())
    }

    /// Metric depth of an encoded value, plus whether `d` had to be clamped into `[0, 1]`.
    pub fn linearize_clamped(&self, d: T) -> (T, bool) {
        let clamped = d < T::zero() || d > T::one();
        let d = d.max(T::zero()).min(T::one());
        (self.near_m * (self.far_m / self.near_m).powf(d), clamped)
    }

    pub fn linearize(&self, d: T) -> T {
        self.linearize_clamped(d).0
    }
}

impl Default for DepthCodec<f64> {
    fn default() -> Self {
        Self {
            near_m: 0.15,
            far_m: 600.0,
        }
    }
}

/// Linearized depth image of an F32 raster of encoded values.
#[derive(Debug, Clone)]
pub struct LinearDepth {
    pub width: u32,
    pub height: u32,
    pub meters: Vec<f64>,
    /// Samples outside `[0, 1]` that were clamped before decoding.
    pub clamped: usize,
}

impl LinearDepth {
    pub fn at(&self, x: u32, y: u32) -> f64 {
        self.meters[y as usize * self.width as usize + x as usize]
    }
}

impl DepthCodec<f64> {
    pub fn linearize_raster(&self, depth: &Raster) -> Result<LinearDepth> {
        let samples = depth
            .as_f32()
            .ok_or_else(|| Error::Format(format!("depth raster must be F32, found {:?}", depth.kind())))?;
        let mut clamped = 0;
        let meters = samples
            .iter()
            .map(|&d| {
                let (z, c) = self.linearize_clamped(d as f64);
                clamped += c as usize;
                z
            })
            .collect();
        Ok(LinearDepth {
            width: depth.width(),
            height: depth.height(),
            meters,
            clamped,
        })
    }
}
