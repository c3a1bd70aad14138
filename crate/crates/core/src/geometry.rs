//! Small geometric primitives shared by the simulator, annotator and evaluator.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Point or direction in camera space (x right, y down, z forward), meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }
}

impl<T: Scalar> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Scalar> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Scalar> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Axis-aligned box in continuous pixel coordinates: `(left, top, right, bottom)`.
///
/// Pixel `(x, y)` occupies `[x, x+1) × [y, y+1)`, so the box of a pixel set
/// `{(x, y)}` spans `min x .. max x + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Box2<T> {
    pub left: T,
    pub top: T,
    pub right: T,
    pub bottom: T,
}

impl<T: Scalar> Box2<T> {
    pub fn new(left: T, top: T, right: T, bottom: T) -> Self {
        Self {
            left,
            top,
            right,
            bottom,
        }
    }

    /// Box covering the whole image `[0, width) × [0, height)`.
    pub fn image(width: u32, height: u32) -> Self {
        Self::new(
            T::zero(),
            T::zero(),
            T::from_u32(width).unwrap(),
            T::from_u32(height).unwrap(),
        )
    }

    pub fn width(&self) -> T {
        self.right - self.left
    }

    pub fn height(&self) -> T {
        self.bottom - self.top
    }

    /// `left < right` and `top < bottom`, all coordinates finite.
    pub fn is_well_ordered(&self) -> bool {
        [self.left, self.top, self.right, self.bottom]
            .iter()
            .all(|v| v.is_finite())
            && self.left < self.right
            && self.top < self.bottom
    }

    pub fn area(&self) -> T {
        if self.right <= self.left || self.bottom <= self.top {
            T::zero()
        } else {
            self.width() * self.height()
        }
    }

    pub fn center(&self) -> (T, T) {
        let two = T::lit(2.0);
        ((self.left + self.right) / two, (self.top + self.bottom) / two)
    }

    /// Intersection, `None` when the boxes do not overlap with positive area.
    pub fn intersect(&self, o: &Self) -> Option<Self> {
        let b = Self::new(
            self.left.max(o.left),
            self.top.max(o.top),
            self.right.min(o.right),
            self.bottom.min(o.bottom),
        );
        (b.left < b.right && b.top < b.bottom).then_some(b)
    }

    /// Grow every side by `margin` (negative shrinks).
    pub fn dilate(&self, margin: T) -> Self {
        Self::new(
            self.left - margin,
            self.top - margin,
            self.right + margin,
            self.bottom + margin,
        )
    }

    /// Scale width and height by `1 + fraction` about the center.
    pub fn inflate(&self, fraction: T) -> Self {
        let half = T::lit(0.5) * fraction;
        let dx = self.width() * half;
        let dy = self.height() * half;
        Self::new(self.left - dx, self.top - dy, self.right + dx, self.bottom + dy)
    }

    pub fn cast<U: Scalar>(&self) -> Box2<U> {
        Box2::new(
            U::lit(self.left.as_f64()),
            U::lit(self.top.as_f64()),
            U::lit(self.right.as_f64()),
            U::lit(self.bottom.as_f64()),
        )
    }
}

/// Intersection over union with continuous areas; 0 for disjoint boxes.
pub fn iou<T: Scalar>(a: &Box2<T>, b: &Box2<T>) -> Result<T> {
    for bx in [a, b] {
        if !bx.is_well_ordered() {
            return Err(Error::Domain(format!(
                "IoU needs boxes with positive area, got {bx:?}"
            )));
        }
    }
    let inter = a.intersect(b).map(|i| i.area()).unwrap_or_else(T::zero);
    let union = a.area() + b.area() - inter;
    Ok(inter / union)
}

/// Integer pixel rectangle with exclusive right/bottom edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PixelRect {
    pub left: u32,
    pub top: u32,
    pub right: u32,
    pub bottom: u32,
}

impl PixelRect {
    /// Rectangle containing exactly pixel `(x, y)`.
    pub fn of_pixel(x: u32, y: u32) -> Self {
        Self {
            left: x,
            top: y,
            right: x + 1,
            bottom: y + 1,
        }
    }

    pub fn include(&mut self, x: u32, y: u32) {
        self.left = self.left.min(x);
        self.top = self.top.min(y);
        self.right = self.right.max(x + 1);
        self.bottom = self.bottom.max(y + 1);
    }

    pub fn width(&self) -> u32 {
        self.right - self.left
    }

    pub fn height(&self) -> u32 {
        self.bottom - self.top
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.left && x < self.right && y >= self.top && y < self.bottom
    }

    pub fn to_box<T: Scalar>(&self) -> Box2<T> {
        Box2::new(
            T::from_u32(self.left).unwrap(),
            T::from_u32(self.top).unwrap(),
            T::from_u32(self.right).unwrap(),
            T::from_u32(self.bottom).unwrap(),
        )
    }

    /// Pixels whose centers lie inside `b`, clipped to the image. `None` if empty.
    pub fn covering_centers<T: Scalar>(b: &Box2<T>, width: u32, height: u32) -> Option<Self> {
        let half = T::lit(0.5);
        // pixel x is inside when left <= x + 0.5 <= right
        let lo = |v: T| (v - half).ceil().max(T::zero());
        let hi = |v: T, lim: u32| (v - half).floor().min(T::from_u32(lim).unwrap() - T::one());
        let (l, t) = (lo(b.left), lo(b.top));
        let (r, bt) = (hi(b.right, width), hi(b.bottom, height));
        if !(l <= r && t <= bt) || width == 0 || height == 0 {
            return None;
        }
        Some(Self {
            left: l.to_u32()?,
            top: t.to_u32()?,
            right: r.to_u32()? + 1,
            bottom: bt.to_u32()? + 1,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn iou_examples() {
        let a = Box2::new(0.0, 0.0, 10.0, 10.0);
        assert_eq!(iou(&a, &a).unwrap(), 1.0);
        let far = Box2::new(20.0, 20.0, 30.0, 30.0);
        assert_eq!(iou(&a, &far).unwrap(), 0.0);
        let half = Box2::new(5.0, 0.0, 15.0, 10.0);
        assert_relative_eq!(iou(&a, &half).unwrap(), 1.0 / 3.0, epsilon = 1e-12);
        let a32 = Box2::new(0.0f32, 0.0, 10.0, 10.0);
        let h32 = Box2::new(5.0f32, 0.0, 15.0, 10.0);
        assert_relative_eq!(iou(&a32, &h32).unwrap(), 1.0 / 3.0, epsilon = 1e-6);
    }

    #[test]
    fn iou_matches_grid_counting() {
        // count 0.01-px cells covered by both / either box
        let a = Box2::new(0.0, 0.0, 10.0, 10.0);
        let b = Box2::new(5.0, 0.0, 15.0, 10.0);
        let step = 0.01;
        let (mut inter, mut uni) = (0u64, 0u64);
        for i in 0..1500 {
            for j in 0..1000 {
                let (x, y) = ((i as f64 + 0.5) * step, (j as f64 + 0.5) * step);
                let ina = x < a.right && y < a.bottom;
                let inb = x >= b.left && x < b.right && y < b.bottom;
                inter += (ina && inb) as u64;
                uni += (ina || inb) as u64;
            }
        }
        let grid = inter as f64 / uni as f64;
        assert!((grid - iou(&a, &b).unwrap()).abs() < 1e-3);
    }

    #[test]
    fn iou_rejects_degenerate() {
        let a = Box2::new(0.0, 0.0, 0.0, 10.0);
        let b = Box2::new(0.0, 0.0, 1.0, 1.0);
        assert!(matches!(iou(&a, &b), Err(Error::Domain(_))));
    }

    #[test]
    fn inflate_keeps_center() {
        let b = Box2::new(10.0, 20.0, 30.0, 60.0).inflate(0.1);
        assert_relative_eq!(b.width(), 22.0);
        assert_relative_eq!(b.height(), 44.0);
        assert_eq!(b.center(), (20.0, 40.0));
    }

    #[test]
    fn covering_centers_clips() {
        let r = PixelRect::covering_centers(&Box2::new(-5.0, 1.2, 3.5, 2.6), 10, 10).unwrap();
        assert_eq!((r.left, r.top, r.right, r.bottom), (0, 1, 4, 3));
        assert!(PixelRect::covering_centers(&Box2::new(11.0, 0.0, 12.0, 1.0), 10, 10).is_none());
    }
}
