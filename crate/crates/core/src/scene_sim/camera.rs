use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::raster_codec::DepthCodec;
use crate::scalar::Scalar;

/// Pinhole camera looking down +z, with x to the right and y down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraModel<T> {
    pub fx: T,
    pub fy: T,
    pub cx: T,
    pub cy: T,
    pub width: u32,
    pub height: u32,
    pub depth: DepthCodec<T>,
}

/// Image position of a projected point, with its camera-space depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection<T> {
    pub u: T,
    pub v: T,
    pub depth: T,
}

impl<T: Scalar> CameraModel<T> {
    pub fn new(fx: T, fy: T, cx: T, cy: T, width: u32, height: u32, depth: DepthCodec<T>) -> Result<Self> {
        let w = T::from_u32(width).unwrap();
        let h = T::from_u32(height).unwrap();
        if !(fx > T::zero() && fy > T::zero()) {
            return Err(Error::Config(format!("focal lengths must be positive, got fx={fx} fy={fy}")));
        }
        if width == 0 || height == 0 {
            return Err(Error::Config("image size must be positive".into()));
        }
        if !(cx >= T::zero() && cx < w && cy >= T::zero() && cy < h) {
            return Err(Error::Config(format!(
                "principal point ({cx}, {cy}) outside the {width}x{height} image"
            )));
        }
        Ok(Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
            depth,
        })
    }

    /// `u = fx·x/z + cx`, `v = fy·y/z + cy`.
    pub fn project_point(&self, p: Vec3<T>) -> Result<Projection<T>> {
        if !(p.z > T::zero()) {
            return Err(Error::BehindCamera(p.z.as_f64()));
        }
        Ok(Projection {
            u: self.fx * p.x / p.z + self.cx,
            v: self.fy * p.y / p.z + self.cy,
            depth: p.z,
        })
    }

    /// Ray direction through image point `(u, v)`, scaled so that `z = 1`.
    pub fn ray(&self, u: T, v: T) -> Vec3<T> {
        Vec3::new((u - self.cx) / self.fx, (v - self.cy) / self.fy, T::one())
    }
}
